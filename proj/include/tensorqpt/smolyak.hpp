#ifndef TENSORQPT_SMOLYAK_HPP
#define TENSORQPT_SMOLYAK_HPP

#include "tensorqpt/tensor_algorithm.hpp"
#include "tensorqpt/univariate.hpp"

namespace tensorqpt {

/// Sparse-grid combination A(q,k) = sum_{|i|_1 <= q} (x)_l (U_{i_l} - U_{i_l - 1})
/// with U_0 = 0, expanded into merged (point, rank-one outputs) terms via the
/// combination-technique form. Levels must be nested:
/// points(U_i) is a prefix-subset of points(U_{i+1}); otherwise
/// StructuralError. For k = 1 the result is exactly U_q.
TensorAlgorithm smolyak_algorithm(const std::vector<LinearAlgorithm1D>& levels,
                                  int k, int q);

/// Same sum expanded literally from the difference form; quadratically more
/// terms, used as an independent construction in tests.
TensorAlgorithm smolyak_algorithm_difference_form(
    const std::vector<LinearAlgorithm1D>& levels, int k, int q);

struct RateSample {
  double n = 0;      // cardinality
  double error = 0;  // measured worst-case error
  int k = 0;         // component dimension
  int q = 0;         // level
};

/// Envelope power-law fit e <= alpha n^{-r}: least squares on logs for r,
/// alpha inflated so the bound holds on every sample. Throws RateFailure
/// when the fitted r is <= 0 and InputError on bad samples.
struct RateFit {
  double alpha = 0.0;
  double r = 0.0;
  double residual = 0.0;  // rms log-residual of the least-squares fit
  std::vector<RateSample> samples;
};

RateFit fit_rate(std::vector<RateSample> samples);

std::string rate_fit_to_json(const RateFit& fit);

}  // namespace tensorqpt

#endif
