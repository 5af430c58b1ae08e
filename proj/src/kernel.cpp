#include "tensorqpt/kernel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tensorqpt {

double Kernel::eval(double x, double y) const {
  if (!domain_.contains(x) || !domain_.contains(y)) {
    std::ostringstream msg;
    msg << "kernel argument outside domain [" << domain_.lo << ", "
        << domain_.hi << "]: (" << x << ", " << y << ")";
    throw InputError(msg.str());
  }
  return eval_impl(x, y);
}

Eigen::MatrixXd Kernel::gram(const std::vector<double>& points) const {
  const int n = static_cast<int>(points.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (points[i] == points[j]) {
        throw InputError("gram: duplicate point " + std::to_string(points[i]));
      }
    }
  }
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = eval(points[i], points[j]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Eigen::VectorXd Kernel::section(double x,
                                const std::vector<double>& nodes) const {
  Eigen::VectorXd s(static_cast<Eigen::Index>(nodes.size()));
  for (size_t i = 0; i < nodes.size(); ++i) s(i) = eval(nodes[i], x);
  return s;
}

ModifiedKernel::ModifiedKernel(KernelPtr base, std::vector<double> nodes,
                               Eigen::VectorXd coefficients, double norm_sq,
                               double anchor_point)
    : Kernel(base->domain()),
      base_(std::move(base)),
      nodes_(std::move(nodes)),
      coeffs_(std::move(coefficients)),
      norm_sq_(norm_sq),
      anchor_(anchor_point) {
  if (static_cast<Eigen::Index>(nodes_.size()) != coeffs_.size()) {
    throw InputError("modified kernel: nodes/coefficients size mismatch");
  }
  if (!(norm_sq_ > 0.0)) {
    throw InputError("modified kernel: correction norm must be positive");
  }
}

double ModifiedKernel::correction(double x) const {
  double s = 0.0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    s += coeffs_(static_cast<Eigen::Index>(i)) * base_->eval(x, nodes_[i]);
  }
  return s;
}

double ModifiedKernel::eval_impl(double x, double y) const {
  return base_->eval(x, y) - correction(x) * correction(y) / norm_sq_;
}

KernelPtr make_preset_kernel(const std::string& id) {
  if (id == "sobolev" || id == "sobolev-min-plus-one") {
    return std::make_shared<SobolevKernel>();
  }
  if (id == "rank1") {
    return std::make_shared<RankOneKernel>(
        [](double x) { return 1.0 + x; }, "rank1");
  }
  throw InputError("unknown kernel preset: " + id);
}

std::string kernel_to_json(const Kernel& k) {
  nlohmann::json j;
  j["domain"] = {k.domain().lo, k.domain().hi};
  if (const auto* mod = dynamic_cast<const ModifiedKernel*>(&k)) {
    j["id"] = mod->id();
    j["base"] = mod->base().id();
    j["nodes"] = mod->nodes();
    std::vector<double> coeffs(mod->coefficients().data(),
                               mod->coefficients().data() +
                                   mod->coefficients().size());
    j["coefficients"] = coeffs;
    j["norm_sq"] = mod->norm_sq();
    j["anchor"] = *mod->anchor();
  } else {
    j["id"] = k.id();
    j["nodes"] = std::vector<double>{};
    j["coefficients"] = std::vector<double>{};
    j["norm_sq"] = 0.0;
  }
  return j.dump(2);
}

KernelPtr kernel_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const std::string id = j.at("id").get<std::string>();
  if (id.rfind("modified:", 0) == 0) {
    KernelPtr base = make_preset_kernel(id.substr(9));
    auto nodes = j.at("nodes").get<std::vector<double>>();
    auto coeffs = j.at("coefficients").get<std::vector<double>>();
    Eigen::VectorXd c(static_cast<Eigen::Index>(coeffs.size()));
    for (size_t i = 0; i < coeffs.size(); ++i)
      c(static_cast<Eigen::Index>(i)) = coeffs[i];
    return std::make_shared<ModifiedKernel>(std::move(base), std::move(nodes),
                                            std::move(c),
                                            j.at("norm_sq").get<double>(),
                                            j.at("anchor").get<double>());
  }
  return make_preset_kernel(id);
}

void save_kernel(const Kernel& k, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write kernel file: " + path);
  out << kernel_to_json(k) << "\n";
}

KernelPtr load_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read kernel file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return kernel_from_json(buf.str());
}

}  // namespace tensorqpt
