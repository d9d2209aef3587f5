#include "qwpde/wavelet.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace qwpde::wave {

double gaussian_wavelet(double x, int order) {
  if (!std::isfinite(x)) throw std::invalid_argument("wavelet argument must be finite");
  const double g = std::exp(-0.5 * x * x);
  switch (order) {
    case 0:
      return -x * g;
    case 1:
      return (x * x - 1.0) * g;
    case 2:
      return x * (3.0 - x * x) * g;
    default:
      throw std::invalid_argument("gaussian_wavelet supports derivative orders 0..2, got " +
                                  std::to_string(order));
  }
}

WaveletFamily1D::WaveletFamily1D(Interval domain, std::vector<int> resolutions)
    : domain_(domain), resolutions_(std::move(resolutions)) {
  if (!(domain_.lo < domain_.hi)) {
    throw std::invalid_argument("wavelet family domain needs lo < hi");
  }
  if (resolutions_.empty()) {
    throw std::invalid_argument("wavelet family needs a nonempty resolution set");
  }
  for (std::size_t i = 1; i < resolutions_.size(); ++i) {
    if (resolutions_[i] <= resolutions_[i - 1]) {
      throw std::invalid_argument("resolution set must be strictly increasing");
    }
  }
  for (int j : resolutions_) {
    const double span = std::exp2(double(j) + 1.0);
    const int k_lo = static_cast<int>(std::floor(domain_.lo * span));
    const int k_hi = static_cast<int>(std::ceil(domain_.hi * span));
    for (int k = k_lo; k <= k_hi; ++k) members_.push_back({j, k});
  }
}

double WaveletFamily1D::value(Eigen::Index member, double x, int order) const {
  const Member1D& m = members_.at(static_cast<std::size_t>(member));
  const double scaled = std::exp2(double(m.scale)) * x - m.translation;
  return std::exp2(m.scale * (0.5 + order)) * gaussian_wavelet(scaled, order);
}

WaveletFamily1D build_family_1d(Interval domain, std::vector<int> resolutions) {
  return WaveletFamily1D(domain, std::move(resolutions));
}

WaveletFamily2D build_family_2d(Interval x_domain, std::vector<int> x_resolutions,
                                Interval y_domain, std::vector<int> y_resolutions) {
  return {WaveletFamily1D(x_domain, std::move(x_resolutions)),
          WaveletFamily1D(y_domain, std::move(y_resolutions))};
}

Eigen::MatrixXd basis_matrix_1d(const WaveletFamily1D& family,
                                const Eigen::Ref<const Eigen::VectorXd>& points,
                                int order) {
  Eigen::MatrixXd out(points.size(), family.size());
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    for (Eigen::Index m = 0; m < family.size(); ++m) {
      out(i, m) = family.value(m, points[i], order);
    }
  }
  return out;
}

namespace {

Eigen::MatrixXd factor_matrix(const WaveletFamily1D& family,
                              const Eigen::Ref<const Eigen::VectorXd>& coords, int order,
                              double threshold) {
  Eigen::MatrixXd f(coords.size(), family.size());
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    for (Eigen::Index m = 0; m < family.size(); ++m) {
      double v = family.value(m, coords[i], order);
      if (threshold > 0.0 && std::abs(v) < threshold) v = 0.0;
      f(i, m) = v;
    }
  }
  return f;
}

}  // namespace

BasisMatrices::BasisMatrices(WaveletFamily2D family,
                             Eigen::Matrix<double, Eigen::Dynamic, 2> points,
                             std::vector<DerivOrder> orders, double truncation_threshold)
    : family_(std::move(family)), points_(std::move(points)), orders_(std::move(orders)) {
  for (const DerivOrder& o : orders_) {
    if (o.dx < 0 || o.dx > 2 || o.dy < 0 || o.dy > 2) {
      throw std::invalid_argument("basis matrices support per-dimension orders 0..2");
    }
    if (!x_factors_[o.dx]) {
      x_factors_[o.dx] =
          factor_matrix(family_.x, points_.col(0), o.dx, truncation_threshold);
    }
    if (!y_factors_[o.dy]) {
      y_factors_[o.dy] =
          factor_matrix(family_.y, points_.col(1), o.dy, truncation_threshold);
    }
  }
}

bool BasisMatrices::has_order(DerivOrder order) const {
  for (const DerivOrder& o : orders_) {
    if (o == order) return true;
  }
  return false;
}

void BasisMatrices::require_order(DerivOrder order) const {
  if (!has_order(order)) {
    throw std::invalid_argument("basis matrices were not built for derivative order (" +
                                std::to_string(order.dx) + "," + std::to_string(order.dy) +
                                ")");
  }
}

const Eigen::MatrixXd& BasisMatrices::factor_x(int d) const {
  if (d < 0 || d > 2 || !x_factors_[d]) {
    throw std::invalid_argument("missing x factor of order " + std::to_string(d));
  }
  return *x_factors_[d];
}

const Eigen::MatrixXd& BasisMatrices::factor_y(int d) const {
  if (d < 0 || d > 2 || !y_factors_[d]) {
    throw std::invalid_argument("missing y factor of order " + std::to_string(d));
  }
  return *y_factors_[d];
}

Eigen::VectorXd BasisMatrices::apply(DerivOrder order,
                                     const Eigen::Ref<const Eigen::VectorXd>& coeffs) const {
  require_order(order);
  const Eigen::Index nx = family_.x.size();
  const Eigen::Index ny = family_.y.size();
  if (coeffs.size() != nx * ny) {
    throw std::invalid_argument("coefficient vector length does not match family size");
  }
  // u_i = x_row_i . C . y_row_i^T with C the x-major coefficient matrix.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      c(coeffs.data(), nx, ny);
  const Eigen::MatrixXd t = factor_x(order.dx) * c;  // n_points x ny
  return (t.array() * factor_y(order.dy).array()).rowwise().sum();
}

Eigen::VectorXd BasisMatrices::apply_transpose(
    DerivOrder order, const Eigen::Ref<const Eigen::VectorXd>& w) const {
  require_order(order);
  if (w.size() != n_points()) {
    throw std::invalid_argument("cotangent length does not match point count");
  }
  const Eigen::Index nx = family_.x.size();
  const Eigen::Index ny = family_.y.size();
  // C_cot = X^T diag(w) Y, flattened x-major.
  const Eigen::MatrixXd scaled =
      (factor_y(order.dy).array().colwise() * w.array()).matrix();
  Eigen::MatrixXd c_cot = factor_x(order.dx).transpose() * scaled;  // nx x ny
  Eigen::VectorXd out(nx * ny);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.data(), nx, ny) = c_cot;
  return out;
}

double BasisMatrices::row_apply(DerivOrder order, Eigen::Index i,
                                const Eigen::Ref<const Eigen::VectorXd>& coeffs) const {
  require_order(order);
  const Eigen::Index nx = family_.x.size();
  const Eigen::Index ny = family_.y.size();
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      c(coeffs.data(), nx, ny);
  return factor_x(order.dx).row(i) * (c * factor_y(order.dy).row(i).transpose());
}

void BasisMatrices::row_accumulate(DerivOrder order, Eigen::Index i, double w,
                                   Eigen::Ref<Eigen::VectorXd> acc) const {
  require_order(order);
  const Eigen::Index nx = family_.x.size();
  const Eigen::Index ny = family_.y.size();
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
      acc.data(), nx, ny);
  a.noalias() += w * factor_x(order.dx).row(i).transpose() * factor_y(order.dy).row(i);
}

double BasisMatrices::entry(Eigen::Index point, Eigen::Index member,
                            DerivOrder order) const {
  require_order(order);
  const Eigen::Index ny = family_.y.size();
  return factor_x(order.dx)(point, member / ny) * factor_y(order.dy)(point, member % ny);
}

Eigen::MatrixXd BasisMatrices::dense(DerivOrder order) const {
  require_order(order);
  const Eigen::Index n = n_points();
  const Eigen::Index m = n_members();
  if (n * m > Eigen::Index(200'000'000)) {
    throw std::length_error("dense basis matrix would exceed the materialisation guard; "
                            "use apply()/apply_transpose()");
  }
  const Eigen::MatrixXd& fx = factor_x(order.dx);
  const Eigen::MatrixXd& fy = factor_y(order.dy);
  const Eigen::Index ny = family_.y.size();
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index mm = 0; mm < m; ++mm) {
      out(i, mm) = fx(i, mm / ny) * fy(i, mm % ny);
    }
  }
  return out;
}

BasisMatrices basis_matrices(const WaveletFamily2D& family,
                             const Eigen::Matrix<double, Eigen::Dynamic, 2>& points,
                             const std::vector<DerivOrder>& orders,
                             double truncation_threshold) {
  return BasisMatrices(family, points, orders, truncation_threshold);
}

BasisMatrices BasisMatrices::from_factors(
    WaveletFamily2D family, Eigen::Matrix<double, Eigen::Dynamic, 2> points,
    std::vector<DerivOrder> orders, std::array<std::optional<Eigen::MatrixXd>, 3> x_factors,
    std::array<std::optional<Eigen::MatrixXd>, 3> y_factors) {
  BasisMatrices b;
  b.family_ = std::move(family);
  b.points_ = std::move(points);
  b.orders_ = std::move(orders);
  b.x_factors_ = std::move(x_factors);
  b.y_factors_ = std::move(y_factors);
  for (const DerivOrder& o : b.orders_) {
    if (!b.x_factors_[o.dx] || !b.y_factors_[o.dy]) {
      throw std::invalid_argument("cached basis is missing a factor its orders need");
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Binary cache. Layout: magic, fnv64 of the key block, key block (domains,
// resolution sets, orders, point bytes), then the factor matrices.
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kCacheMagic = 0x5157424153495331ull;  // "QWBASIS1"

std::uint64_t fnv64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void put_raw(std::string& out, const void* data, std::size_t n) {
  out.append(static_cast<const char*>(data), n);
}

template <typename T>
void put(std::string& out, T v) {
  put_raw(out, &v, sizeof(T));
}

std::string cache_key(const WaveletFamily2D& family,
                      const Eigen::Matrix<double, Eigen::Dynamic, 2>& points,
                      const std::vector<DerivOrder>& orders) {
  std::string key;
  for (const WaveletFamily1D* f : {&family.x, &family.y}) {
    put(key, f->domain().lo);
    put(key, f->domain().hi);
    put(key, static_cast<std::int64_t>(f->resolutions().size()));
    for (int j : f->resolutions()) put(key, static_cast<std::int32_t>(j));
  }
  put(key, static_cast<std::int64_t>(orders.size()));
  for (const DerivOrder& o : orders) {
    put(key, static_cast<std::int32_t>(o.dx));
    put(key, static_cast<std::int32_t>(o.dy));
  }
  put(key, static_cast<std::int64_t>(points.rows()));
  put_raw(key, points.data(), sizeof(double) * static_cast<std::size_t>(points.size()));
  return key;
}

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  const std::int64_t rows = m.rows(), cols = m.cols();
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

bool read_matrix(std::ifstream& in, Eigen::MatrixXd& m) {
  std::int64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || rows < 0 || cols < 0) return false;
  m.resize(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  return bool(in);
}

}  // namespace

void save_basis_cache(const std::string& path, const BasisMatrices& basis) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open basis cache for writing: " + path);
  const std::string key = cache_key(basis.family(), basis.points(), basis.orders());
  const std::uint64_t h = fnv64(key);
  const std::uint64_t key_len = key.size();
  out.write(reinterpret_cast<const char*>(&kCacheMagic), sizeof(kCacheMagic));
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  out.write(reinterpret_cast<const char*>(&key_len), sizeof(key_len));
  out.write(key.data(), static_cast<std::streamsize>(key.size()));
  for (int d = 0; d < 3; ++d) {
    std::uint8_t have_x = 0, have_y = 0;
    Eigen::MatrixXd fx, fy;
    try {
      fx = basis.factor_x(d);
      have_x = 1;
    } catch (const std::invalid_argument&) {
    }
    try {
      fy = basis.factor_y(d);
      have_y = 1;
    } catch (const std::invalid_argument&) {
    }
    out.write(reinterpret_cast<const char*>(&have_x), 1);
    if (have_x) write_matrix(out, fx);
    out.write(reinterpret_cast<const char*>(&have_y), 1);
    if (have_y) write_matrix(out, fy);
  }
}

std::optional<BasisMatrices> load_basis_cache(
    const std::string& path, const WaveletFamily2D& family,
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& points,
    const std::vector<DerivOrder>& orders) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::uint64_t magic = 0, h = 0, key_len = 0;
  in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  in.read(reinterpret_cast<char*>(&key_len), sizeof(key_len));
  if (!in || magic != kCacheMagic) return std::nullopt;
  std::string stored_key(key_len, '\0');
  in.read(stored_key.data(), static_cast<std::streamsize>(key_len));
  if (!in || fnv64(stored_key) != h) return std::nullopt;
  // Exact-match invalidation: every byte of the key must agree.
  if (stored_key != cache_key(family, points, orders)) return std::nullopt;

  std::array<std::optional<Eigen::MatrixXd>, 3> x_factors, y_factors;
  for (int d = 0; d < 3; ++d) {
    for (auto* side : {&x_factors, &y_factors}) {
      std::uint8_t have = 0;
      in.read(reinterpret_cast<char*>(&have), 1);
      if (!in) return std::nullopt;
      if (have) {
        Eigen::MatrixXd m;
        if (!read_matrix(in, m)) return std::nullopt;
        (*side)[d] = std::move(m);
      }
    }
  }
  try {
    return BasisMatrices::from_factors(family, points, orders, std::move(x_factors),
                                       std::move(y_factors));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace qwpde::wave
