#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fracstep {

struct Rect {
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
  double lx() const { return x_hi - x_lo; }
  double ly() const { return y_hi - y_lo; }
};

// Grid sample of a field snapshot, rows (x, y, value), for CSV emission.
struct FieldSnapshot {
  std::vector<double> x, y, value;
};

// Discrete spatial operator L = kappa * Laplacian with homogeneous Dirichlet
// boundary on a rectangle. Implementations are immutable after construction
// and safe to share across concurrently running time integrations.
class SpatialOperator {
 public:
  virtual ~SpatialOperator() = default;

  virtual int dof() const = 0;

  // out = L u
  virtual void apply(std::span<const double> u, std::span<double> out) const = 0;

  // Solves (gamma I - c L) x = r for gamma > 0, c >= 0.
  virtual void solve_shifted(double gamma, double c, std::span<const double> r,
                             std::span<double> x) const = 0;

  // Dof vector representing the analytic field.
  virtual void sample(const std::function<double(double, double)>& field,
                      std::span<double> out) const = 0;

  // Discrete L2(Omega) norm.
  virtual double l2_norm(std::span<const double> u) const = 0;

  // f applied on the physical representation of u (grid values; modal state
  // transforms to collocation values and back).
  virtual void apply_pointwise(const std::function<double(double)>& f,
                               std::span<const double> u, std::span<double> out) const = 0;

  // Diagonal-coupled Jacobian solve (gamma I - L - diag(d)) x = r, available
  // where the dof vector is a pointwise representation (scalar, FD).
  virtual bool supports_pointwise_jacobian() const { return false; }
  virtual void solve_jacobian(double gamma, std::span<const double> d,
                              std::span<const double> r, std::span<double> x) const;

  // Physical-space view of the state for field dumps.
  virtual FieldSnapshot snapshot(std::span<const double> u) const = 0;
};

// Single excited eigenmode; lambda is the eigenvalue of kappa*Laplacian on it.
std::unique_ptr<SpatialOperator> build_scalar(double lambda);

// 5-point finite differences on an nx x ny interior grid, shifted solves by
// tensor sine-eigenvector diagonalization.
std::unique_ptr<SpatialOperator> build_fd2d(double kappa, int nx, int ny, const Rect& domain);

// Sine-basis spectral operator with kx x ky modes and an (mx-1) x (my-1)
// interior collocation grid for the nonlinear terms; requires m >= 2k.
std::unique_ptr<SpatialOperator> build_sine_spectral(double kappa, int kx, int ky, int mx,
                                                     int my, const Rect& domain);

}  // namespace fracstep
