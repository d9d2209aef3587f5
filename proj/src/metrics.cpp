#include "qwpde/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace qwpde::metrics {

double relative_l2(const Eigen::Ref<const Eigen::VectorXd>& pred,
                   const Eigen::Ref<const Eigen::VectorXd>& ref) {
  if (pred.size() != ref.size()) {
    throw std::invalid_argument("relative_l2 needs equal-length inputs");
  }
  const double denom = ref.norm();
  if (denom == 0.0) {
    throw std::domain_error("relative_l2 reference has zero norm");
  }
  return (pred - ref).norm() / denom;
}

double relative_linf(const Eigen::Ref<const Eigen::VectorXd>& pred,
                     const Eigen::Ref<const Eigen::VectorXd>& ref) {
  if (pred.size() != ref.size()) {
    throw std::invalid_argument("relative_linf needs equal-length inputs");
  }
  const double denom = ref.cwiseAbs().maxCoeff();
  if (denom == 0.0) {
    throw std::domain_error("relative_linf reference is identically zero");
  }
  return (pred - ref).cwiseAbs().maxCoeff() / denom;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  out.n = static_cast<int>(values.size());
  if (out.n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / out.n;
  if (out.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (out.n - 1));
  }
  return out;
}

}  // namespace qwpde::metrics
