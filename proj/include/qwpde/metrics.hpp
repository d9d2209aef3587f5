#pragma once

#include <Eigen/Core>
#include <vector>

namespace qwpde::metrics {

/// ||pred - ref||_2 / ||ref||_2 over the validation set. Throws
/// std::domain_error on a zero reference norm.
double relative_l2(const Eigen::Ref<const Eigen::VectorXd>& pred,
                   const Eigen::Ref<const Eigen::VectorXd>& ref);

/// max|pred - ref| / max|ref|. Throws std::domain_error on a zero reference.
double relative_linf(const Eigen::Ref<const Eigen::VectorXd>& pred,
                     const Eigen::Ref<const Eigen::VectorXd>& ref);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n-1); 0 when n == 1
  int n = 0;
};

/// Mean and sample standard deviation of the given values.
MeanStd mean_std(const std::vector<double>& values);

}  // namespace qwpde::metrics
