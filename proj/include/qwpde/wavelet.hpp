#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qwpde::wave {

/// Gaussian mother wavelet psi(x) = -x exp(-x^2/2) and its first two
/// analytic derivatives:
///   order 1: (x^2 - 1) exp(-x^2/2)
///   order 2: x (3 - x^2) exp(-x^2/2)
double gaussian_wavelet(double x, int order);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

struct Member1D {
  int scale;        // j
  int translation;  // k
};

/// Dyadic wavelet family over [a, b]: for each scale j in the resolution set,
/// translations k run from floor(a * 2^{j+1}) to ceil(b * 2^{j+1}) inclusive.
/// Members are ordered by ascending scale, then ascending translation.
class WaveletFamily1D {
 public:
  WaveletFamily1D() = default;
  WaveletFamily1D(Interval domain, std::vector<int> resolutions);

  const Interval& domain() const { return domain_; }
  const std::vector<int>& resolutions() const { return resolutions_; }
  const std::vector<Member1D>& members() const { return members_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(members_.size()); }

  /// 2^{j/2} * 2^{j*order} * psi^{(order)}(2^j x - k); the 2^{j*order} factor
  /// is the chain rule of the dyadic argument.
  double value(Eigen::Index member, double x, int order) const;

 private:
  Interval domain_;
  std::vector<int> resolutions_;
  std::vector<Member1D> members_;
};

WaveletFamily1D build_family_1d(Interval domain, std::vector<int> resolutions);

/// Tensor product of two 1D families. Member m = mx * y.size() + my covers
/// all ((j_x, k_x), (j_y, k_y)) pairs, x-major.
struct WaveletFamily2D {
  WaveletFamily1D x;
  WaveletFamily1D y;
  Eigen::Index size() const { return x.size() * y.size(); }
};

WaveletFamily2D build_family_2d(Interval x_domain, std::vector<int> x_resolutions,
                                Interval y_domain, std::vector<int> y_resolutions);

/// Derivative multi-order (d_x, d_y); each component at most 2 (the benchmark
/// PDEs need no more than second derivatives).
struct DerivOrder {
  int dx = 0;
  int dy = 0;
  friend bool operator==(DerivOrder a, DerivOrder b) {
    return a.dx == b.dx && a.dy == b.dy;
  }
};

/// Dense 1D basis matrix: entry (i, m) = family.value(m, points[i], order).
Eigen::MatrixXd basis_matrix_1d(const WaveletFamily1D& family,
                                const Eigen::Ref<const Eigen::VectorXd>& points,
                                int order);

/// Precomputed 2D basis/derivative matrices at a point set. The product
/// matrix factorises over dimensions, so per-dimension factor matrices
/// X^{(d)}(i, mx) and Y^{(d)}(i, my) are stored; entry (i, m) of the order
/// (dx, dy) matrix is X^{(dx)}(i, mx) * Y^{(dy)}(i, my) with m = mx*ny + my.
/// apply/apply_transpose evaluate the matrix-vector products without ever
/// materialising the n_points x n_members product; dense() materialises it
/// for tests and small runs. Side-effect free after construction.
class BasisMatrices {
 public:
  BasisMatrices() = default;
  BasisMatrices(WaveletFamily2D family, Eigen::Matrix<double, Eigen::Dynamic, 2> points,
                std::vector<DerivOrder> orders, double truncation_threshold = 0.0);

  const WaveletFamily2D& family() const { return family_; }
  const Eigen::Matrix<double, Eigen::Dynamic, 2>& points() const { return points_; }
  const std::vector<DerivOrder>& orders() const { return orders_; }
  Eigen::Index n_points() const { return points_.rows(); }
  Eigen::Index n_members() const { return family_.size(); }
  bool has_order(DerivOrder order) const;

  /// u_i = sum_m B^{(order)}(i, m) c_m.
  Eigen::VectorXd apply(DerivOrder order,
                        const Eigen::Ref<const Eigen::VectorXd>& coeffs) const;
  /// (B^{(order)})^T w.
  Eigen::VectorXd apply_transpose(DerivOrder order,
                                  const Eigen::Ref<const Eigen::VectorXd>& w) const;

  /// Row i of B^{(order)} dotted with coeffs.
  double row_apply(DerivOrder order, Eigen::Index i,
                   const Eigen::Ref<const Eigen::VectorXd>& coeffs) const;
  /// acc += w * row_i(B^{(order)})^T.
  void row_accumulate(DerivOrder order, Eigen::Index i, double w,
                      Eigen::Ref<Eigen::VectorXd> acc) const;

  double entry(Eigen::Index point, Eigen::Index member, DerivOrder order) const;
  Eigen::MatrixXd dense(DerivOrder order) const;

  const Eigen::MatrixXd& factor_x(int d) const;
  const Eigen::MatrixXd& factor_y(int d) const;

  /// Assembles an instance from precomputed factors (cache loading).
  static BasisMatrices from_factors(
      WaveletFamily2D family, Eigen::Matrix<double, Eigen::Dynamic, 2> points,
      std::vector<DerivOrder> orders,
      std::array<std::optional<Eigen::MatrixXd>, 3> x_factors,
      std::array<std::optional<Eigen::MatrixXd>, 3> y_factors);

 private:
  void require_order(DerivOrder order) const;

  WaveletFamily2D family_;
  Eigen::Matrix<double, Eigen::Dynamic, 2> points_;
  std::vector<DerivOrder> orders_;
  std::array<std::optional<Eigen::MatrixXd>, 3> x_factors_;
  std::array<std::optional<Eigen::MatrixXd>, 3> y_factors_;
};

/// truncation_threshold zeroes factor entries with |e| < threshold; default
/// off (the Gaussian wavelet is analytically global).
BasisMatrices basis_matrices(const WaveletFamily2D& family,
                             const Eigen::Matrix<double, Eigen::Dynamic, 2>& points,
                             const std::vector<DerivOrder>& orders,
                             double truncation_threshold = 0.0);

/// Optional binary cache. The key covers domains, resolution sets, the exact
/// point bytes and the order list; any mismatch invalidates (load returns
/// nullopt and the caller recomputes).
void save_basis_cache(const std::string& path, const BasisMatrices& basis);
std::optional<BasisMatrices> load_basis_cache(
    const std::string& path, const WaveletFamily2D& family,
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& points,
    const std::vector<DerivOrder>& orders);

}  // namespace qwpde::wave
