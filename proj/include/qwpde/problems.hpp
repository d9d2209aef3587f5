#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qwpde/wavelet.hpp"

namespace qwpde::prob {

using wave::DerivOrder;
using wave::Interval;

/// Rectangular coordinate box of one subdomain; the second axis is time for
/// the evolution problems and y for the Helmholtz equation.
struct Domain2 {
  Interval x;
  Interval t;
};

enum class SegmentKind { Initial, Boundary, Interface };

/// One pointwise condition on a segment: a derivative of a field must match
/// a target trace. Interface constraints instead equate the two subdomain
/// models and carry no target.
struct PointConstraint {
  int field = 0;
  DerivOrder order;
  std::function<double(double, double)> target;
  std::string label;
};

struct Segment {
  SegmentKind kind = SegmentKind::Boundary;
  int subdomain = 0;   // owning subdomain; interface segments touch both
  int fixed_dim = 0;   // which coordinate is pinned (0: x, 1: t/y)
  double fixed_value = 0.0;
  std::vector<PointConstraint> constraints;
};

/// A benchmark PDE: exact solution, analytically derived forcing, the
/// residual operator over precomputed derivative arrays, and the IC/BC/
/// interface constraint list. The residual's pullback is closed-form, so no
/// automatic differentiation appears anywhere in the loss.
class Problem {
 public:
  virtual ~Problem() = default;

  const std::string& name() const { return name_; }
  int field_count() const { return static_cast<int>(field_names_.size()); }
  const std::string& field_name(int f) const { return field_names_[f]; }
  int subdomain_count() const { return static_cast<int>(domains_.size()); }
  const Domain2& domain(int sub) const { return domains_[sub]; }
  const std::vector<Segment>& segments() const { return segments_; }
  bool has_interface() const;

  /// Derivative orders the residual consumes, per field (all subdomains).
  const std::vector<DerivOrder>& residual_orders(int field) const {
    return residual_orders_[field];
  }

  virtual double exact(int sub, int field, double x, double t) const = 0;
  /// Analytic derivative of the exact solution; supports the orders the
  /// residual and constraints consume (plus (0,0)).
  virtual double exact_derivative(int sub, int field, double x, double t,
                                  DerivOrder order) const = 0;
  virtual double forcing(int sub, int field, double x, double t) const = 0;

  /// u[field][k] holds the derivative array for residual_orders(field)[k].
  using DerivArrays = std::vector<std::vector<Eigen::VectorXd>>;

  virtual void residual(int sub, const DerivArrays& u,
                        const std::vector<Eigen::VectorXd>& forcing,
                        std::vector<Eigen::VectorXd>& out) const = 0;
  /// Accumulates d(sum_i w_i r_i)/d(u^{(o)}) into u_cot (same shape as u).
  virtual void residual_pullback(int sub, const DerivArrays& u,
                                 const std::vector<Eigen::VectorXd>& residual_cot,
                                 DerivArrays& u_cot) const = 0;

 protected:
  std::string name_;
  std::vector<std::string> field_names_;
  std::vector<Domain2> domains_;
  std::vector<std::vector<DerivOrder>> residual_orders_;
  std::vector<Segment> segments_;
};

/// u_t = eps u_xx + f on (-1,1) x (0,1], manufactured from
/// u = (1 - x^2) exp(1 / ((2t-1)^2 + eps)). Requires eps > 0.
std::unique_ptr<Problem> heat_conduction_problem(double epsilon);

/// Laplacian u + kappa^2 u = f on (-1,1)^2, exact u = sin(pi b1 x) sin(pi b2 y).
std::unique_ptr<Problem> helmholtz_problem(double kappa = 1.0, double b1 = 1.0,
                                           double b2 = 8.0);

/// u_tt + alpha u_xx + beta u + gamma u^power = f on [0,1] x (0,1], exact
/// u = x cos(a pi t) + (x t)^3. Requires a != 0.
std::unique_ptr<Problem> klein_gordon_problem(double a, double alpha = -1.0,
                                              double beta = 0.0, double gamma = 1.0,
                                              int power = 3);

struct MaxwellMedium {
  bool heterogeneous = false;
  // homogeneous cavity: E = sin(n pi x) cos(w t), H = -cos(n pi x) sin(w t),
  // w = n pi / cavity_length
  double mode_n = 4.0;
  double cavity_length = 1.0;
};

/// 1D transverse electromagnetic system E_t = -(1/eps) H_x, H_t = -(1/mu) E_x
/// on [0,1] x [0,1]. The heterogeneous medium splits at x = 0.5 with
/// (eps, mu) = (1, 1) on the left and (0.5, 4.5) on the right, matching the
/// piecewise-cosine exact fields; E and H are continuous at the interface.
std::unique_ptr<Problem> maxwell_problem(const MaxwellMedium& medium);

// ---------------------------------------------------------------------------
// Residual assembly over coefficient vectors
// ---------------------------------------------------------------------------

struct ResidualEvaluation {
  std::vector<Eigen::VectorXd> residuals;   // per field
  Problem::DerivArrays derivatives;         // cached u^{(o)} arrays
  std::vector<Eigen::VectorXd> forcing;     // per field
};

/// Residual at one subdomain's collocation basis: derivative arrays come from
/// basis-matrix products with the coefficients (bias added at order (0,0)),
/// then the problem's pointwise residual. forcing_cache, when given, skips the
/// per-point forcing evaluation (it is fixed across epochs).
ResidualEvaluation evaluate_residual(const Problem& problem, int sub,
                                     const wave::BasisMatrices& basis,
                                     const std::vector<Eigen::VectorXd>& coeffs,
                                     const std::vector<double>& biases,
                                     const std::vector<Eigen::VectorXd>* forcing_cache =
                                         nullptr);

struct CoefficientPullback {
  std::vector<Eigen::VectorXd> coefficients;  // per field
  std::vector<double> biases;                 // per field
};

/// d(sum_i w_i r_i)/d(c, B) in closed form: residual pullback to the
/// derivative arrays, then transposed basis products.
CoefficientPullback residual_vjp(const Problem& problem, int sub,
                                 const wave::BasisMatrices& basis,
                                 const ResidualEvaluation& eval,
                                 const std::vector<Eigen::VectorXd>& residual_cot);

/// Manufactured-solution self-check: max |residual(exact)| over n uniformly
/// random interior points of every subdomain (forcing subtracted).
double manufactured_residual_max(const Problem& problem, int n_points,
                                 std::uint64_t seed);

/// Max |field trace mismatch| across the interface over random times; 0 for
/// single-subdomain problems.
double interface_mismatch_max(const Problem& problem, int n_points, std::uint64_t seed);

}  // namespace qwpde::prob
