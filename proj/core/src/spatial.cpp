#include "fracstep/spatial.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "fftw_util.hpp"

namespace fracstep {

namespace {

constexpr double kPi = 3.14159265358979323846;

using detail::ensure_planner_thread_safe;
using detail::FftwBuf;

// Unnormalized 2D DST-I (RODFT00 in both dimensions). Applying it twice
// multiplies by 4 (n0+1)(n1+1). execute() is safe to call concurrently.
class Dst2d {
 public:
  Dst2d(int n0, int n1) : n0_(n0), n1_(n1) {
    ensure_planner_thread_safe();
    FftwBuf in(size()), out(size());
    plan_ = fftw_plan_r2r_2d(n0, n1, in.p, out.p, FFTW_RODFT00, FFTW_RODFT00, FFTW_MEASURE);
    if (!plan_) throw std::runtime_error("fftw plan creation failed");
  }
  ~Dst2d() { fftw_destroy_plan(plan_); }
  Dst2d(const Dst2d&) = delete;
  Dst2d& operator=(const Dst2d&) = delete;

  std::size_t size() const {
    return static_cast<std::size_t>(n0_) * static_cast<std::size_t>(n1_);
  }

  void execute(const double* in, double* out) const {
    FftwBuf a(size()), b(size());
    std::memcpy(a.p, in, size() * sizeof(double));
    fftw_execute_r2r(plan_, a.p, b.p);
    std::memcpy(out, b.p, size() * sizeof(double));
  }

 private:
  int n0_, n1_;
  fftw_plan plan_;
};

class ScalarMode final : public SpatialOperator {
 public:
  explicit ScalarMode(double lambda) : lambda_(lambda) {
    if (!(lambda <= 0.0)) throw std::invalid_argument("scalar mode eigenvalue must be <= 0");
  }

  int dof() const override { return 1; }

  void apply(std::span<const double> u, std::span<double> out) const override {
    out[0] = lambda_ * u[0];
  }

  void solve_shifted(double gamma, double c, std::span<const double> r,
                     std::span<double> x) const override {
    x[0] = r[0] / (gamma - c * lambda_);
  }

  void sample(const std::function<double(double, double)>& field,
              std::span<double> out) const override {
    out[0] = field(0.0, 0.0);
  }

  double l2_norm(std::span<const double> u) const override { return std::fabs(u[0]); }

  void apply_pointwise(const std::function<double(double)>& f, std::span<const double> u,
                       std::span<double> out) const override {
    out[0] = f(u[0]);
  }

  bool supports_pointwise_jacobian() const override { return true; }

  void solve_jacobian(double gamma, std::span<const double> d, std::span<const double> r,
                      std::span<double> x) const override {
    x[0] = r[0] / (gamma - lambda_ - d[0]);
  }

  FieldSnapshot snapshot(std::span<const double> u) const override {
    return FieldSnapshot{{0.0}, {0.0}, {u[0]}};
  }

 private:
  double lambda_;
};

class Fd2dRect final : public SpatialOperator {
 public:
  Fd2dRect(double kappa, int nx, int ny, const Rect& dom)
      : kappa_(kappa), nx_(nx), ny_(ny), dom_(dom), dst_(nx, ny) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("fd2d grid needs nx, ny >= 2");
    if (!(dom.lx() > 0.0) || !(dom.ly() > 0.0))
      throw std::invalid_argument("fd2d domain is degenerate");
    hx_ = dom.lx() / (nx + 1);
    hy_ = dom.ly() / (ny + 1);
    eigx_.resize(static_cast<std::size_t>(nx));
    eigy_.resize(static_cast<std::size_t>(ny));
    for (int k = 0; k < nx; ++k) {
      const double s = std::sin((k + 1) * kPi / (2.0 * (nx + 1)));
      eigx_[static_cast<std::size_t>(k)] = -4.0 / (hx_ * hx_) * s * s;
    }
    for (int l = 0; l < ny; ++l) {
      const double s = std::sin((l + 1) * kPi / (2.0 * (ny + 1)));
      eigy_[static_cast<std::size_t>(l)] = -4.0 / (hy_ * hy_) * s * s;
    }
  }

  int dof() const override { return nx_ * ny_; }

  void apply(std::span<const double> u, std::span<double> out) const override {
    const double cx = kappa_ / (hx_ * hx_), cy = kappa_ / (hy_ * hy_);
    for (int i = 0; i < nx_; ++i) {
      for (int j = 0; j < ny_; ++j) {
        const double c = u[idx(i, j)];
        const double xm = i > 0 ? u[idx(i - 1, j)] : 0.0;
        const double xp = i < nx_ - 1 ? u[idx(i + 1, j)] : 0.0;
        const double ym = j > 0 ? u[idx(i, j - 1)] : 0.0;
        const double yp = j < ny_ - 1 ? u[idx(i, j + 1)] : 0.0;
        out[idx(i, j)] = cx * (xm - 2.0 * c + xp) + cy * (ym - 2.0 * c + yp);
      }
    }
  }

  void solve_shifted(double gamma, double c, std::span<const double> r,
                     std::span<double> x) const override {
    std::vector<double> hat(static_cast<std::size_t>(dof()));
    dst_.execute(r.data(), hat.data());
    const double norm = 1.0 / (4.0 * (nx_ + 1) * (ny_ + 1));
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < ny_; ++j) {
        const double lam = kappa_ * (eigx_[static_cast<std::size_t>(i)] +
                                     eigy_[static_cast<std::size_t>(j)]);
        hat[idx(i, j)] *= norm / (gamma - c * lam);
      }
    dst_.execute(hat.data(), x.data());
  }

  void sample(const std::function<double(double, double)>& field,
              std::span<double> out) const override {
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < ny_; ++j)
        out[idx(i, j)] = field(dom_.x_lo + (i + 1) * hx_, dom_.y_lo + (j + 1) * hy_);
  }

  double l2_norm(std::span<const double> u) const override {
    double s = 0.0;
    for (double v : u) s += v * v;
    return std::sqrt(hx_ * hy_ * s);
  }

  void apply_pointwise(const std::function<double(double)>& f, std::span<const double> u,
                       std::span<double> out) const override {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = f(u[i]);
  }

  bool supports_pointwise_jacobian() const override { return true; }

  // PCG on (gamma I - L - diag(d)) with the constant-shift fast solve as
  // preconditioner; the diagonal perturbation is small relative to gamma for
  // the implicit steps this serves.
  void solve_jacobian(double gamma, std::span<const double> d, std::span<const double> r,
                      std::span<double> x) const override {
    const std::size_t n = static_cast<std::size_t>(dof());
    double dbar = 0.0;
    for (double v : d) dbar += v;
    dbar /= static_cast<double>(n);

    std::vector<double> res(r.begin(), r.end()), z(n), p(n), ap(n);
    std::fill(x.begin(), x.end(), 0.0);
    auto matvec = [&](std::span<const double> v, std::span<double> out) {
      apply(v, out);
      for (std::size_t i = 0; i < n; ++i) out[i] = gamma * v[i] - out[i] - d[i] * v[i];
    };
    auto dot = [&](std::span<const double> a, std::span<const double> b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
      return s;
    };

    const double r0 = std::sqrt(dot(res, res));
    if (r0 == 0.0) return;
    solve_shifted(gamma - dbar, 1.0, res, z);
    p = z;
    double rz = dot(res, z);
    for (int it = 0; it < 500; ++it) {
      matvec(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) throw std::runtime_error("jacobian solve lost positive definiteness");
      const double a = rz / pap;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += a * p[i];
        res[i] -= a * ap[i];
      }
      if (std::sqrt(dot(res, res)) <= 1e-14 * r0 + 1e-300) return;
      solve_shifted(gamma - dbar, 1.0, res, z);
      const double rz_new = dot(res, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
  }

  FieldSnapshot snapshot(std::span<const double> u) const override {
    FieldSnapshot s;
    s.x.reserve(u.size());
    s.y.reserve(u.size());
    s.value.reserve(u.size());
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < ny_; ++j) {
        s.x.push_back(dom_.x_lo + (i + 1) * hx_);
        s.y.push_back(dom_.y_lo + (j + 1) * hy_);
        s.value.push_back(u[idx(i, j)]);
      }
    return s;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny_) +
           static_cast<std::size_t>(j);
  }

  double kappa_;
  int nx_, ny_;
  Rect dom_;
  double hx_, hy_;
  std::vector<double> eigx_, eigy_;
  Dst2d dst_;
};

class SineSpectral2d final : public SpatialOperator {
 public:
  SineSpectral2d(double kappa, int kx, int ky, int mx, int my, const Rect& dom)
      : kappa_(kappa), kx_(kx), ky_(ky), mx_(mx), my_(my), dom_(dom), dst_(mx - 1, my - 1) {
    if (kx < 1 || ky < 1) throw std::invalid_argument("spectral cutoffs must be >= 1");
    if (mx < 2 * kx || my < 2 * ky)
      throw std::invalid_argument("collocation size must satisfy m >= 2k");
    if (!(dom.lx() > 0.0) || !(dom.ly() > 0.0))
      throw std::invalid_argument("spectral domain is degenerate");
    eig_.resize(static_cast<std::size_t>(dof()));
    for (int k = 0; k < kx; ++k)
      for (int l = 0; l < ky; ++l) {
        const double fx = (k + 1) / dom_.lx(), fy = (l + 1) / dom_.ly();
        eig_[midx(k, l)] = -kappa_ * kPi * kPi * (fx * fx + fy * fy);
      }
  }

  int dof() const override { return kx_ * ky_; }

  void apply(std::span<const double> u, std::span<double> out) const override {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = eig_[i] * u[i];
  }

  void solve_shifted(double gamma, double c, std::span<const double> r,
                     std::span<double> x) const override {
    for (std::size_t i = 0; i < r.size(); ++i) x[i] = r[i] / (gamma - c * eig_[i]);
  }

  void sample(const std::function<double(double, double)>& field,
              std::span<double> out) const override {
    std::vector<double> grid(grid_size());
    const double hx = dom_.lx() / mx_, hy = dom_.ly() / my_;
    for (int i = 1; i < mx_; ++i)
      for (int j = 1; j < my_; ++j)
        grid[gidx(i, j)] = field(dom_.x_lo + i * hx, dom_.y_lo + j * hy);
    to_modal(grid, out);
  }

  double l2_norm(std::span<const double> u) const override {
    double s = 0.0;
    for (double v : u) s += v * v;
    return std::sqrt(dom_.lx() * dom_.ly() / 4.0 * s);
  }

  void apply_pointwise(const std::function<double(double)>& f, std::span<const double> u,
                       std::span<double> out) const override {
    std::vector<double> grid(grid_size());
    to_grid(u, grid);
    for (double& v : grid) v = f(v);
    to_modal(grid, out);
  }

  FieldSnapshot snapshot(std::span<const double> u) const override {
    std::vector<double> grid(grid_size());
    to_grid(u, grid);
    const double hx = dom_.lx() / mx_, hy = dom_.ly() / my_;
    FieldSnapshot s;
    for (int i = 1; i < mx_; ++i)
      for (int j = 1; j < my_; ++j) {
        s.x.push_back(dom_.x_lo + i * hx);
        s.y.push_back(dom_.y_lo + j * hy);
        s.value.push_back(grid[gidx(i, j)]);
      }
    return s;
  }

 private:
  std::size_t midx(int k, int l) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(ky_) +
           static_cast<std::size_t>(l);
  }
  // collocation grid, interior points indexed 1..m-1
  std::size_t gidx(int i, int j) const {
    return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(my_ - 1) +
           static_cast<std::size_t>(j - 1);
  }
  std::size_t grid_size() const {
    return static_cast<std::size_t>(mx_ - 1) * static_cast<std::size_t>(my_ - 1);
  }

  // u(x_i, y_j) = sum_{k,l} uhat_{kl} sin(k pi i / mx) sin(l pi j / my)
  void to_grid(std::span<const double> modal, std::span<double> grid) const {
    std::vector<double> padded(grid_size(), 0.0);
    for (int k = 0; k < kx_; ++k)
      for (int l = 0; l < ky_; ++l)
        padded[static_cast<std::size_t>(k) * static_cast<std::size_t>(my_ - 1) +
               static_cast<std::size_t>(l)] = modal[midx(k, l)];
    dst_.execute(padded.data(), grid.data());
    for (double& v : grid) v *= 0.25;
  }

  void to_modal(std::span<const double> grid, std::span<double> modal) const {
    std::vector<double> hat(grid_size());
    dst_.execute(grid.data(), hat.data());
    const double scale = 1.0 / (static_cast<double>(mx_) * static_cast<double>(my_));
    for (int k = 0; k < kx_; ++k)
      for (int l = 0; l < ky_; ++l)
        modal[midx(k, l)] = scale * hat[static_cast<std::size_t>(k) *
                                            static_cast<std::size_t>(my_ - 1) +
                                        static_cast<std::size_t>(l)];
  }

  double kappa_;
  int kx_, ky_, mx_, my_;
  Rect dom_;
  std::vector<double> eig_;
  Dst2d dst_;
};

}  // namespace

void SpatialOperator::solve_jacobian(double, std::span<const double>, std::span<const double>,
                                     std::span<double>) const {
  throw std::invalid_argument("operator has no pointwise Jacobian representation");
}

std::unique_ptr<SpatialOperator> build_scalar(double lambda) {
  return std::make_unique<ScalarMode>(lambda);
}

std::unique_ptr<SpatialOperator> build_fd2d(double kappa, int nx, int ny, const Rect& domain) {
  return std::make_unique<Fd2dRect>(kappa, nx, ny, domain);
}

std::unique_ptr<SpatialOperator> build_sine_spectral(double kappa, int kx, int ky, int mx,
                                                     int my, const Rect& domain) {
  return std::make_unique<SineSpectral2d>(kappa, kx, ky, mx, my, domain);
}

}  // namespace fracstep
