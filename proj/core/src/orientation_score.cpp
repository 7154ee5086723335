#include "rtflow/orientation_score.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rtflow/errors.hpp"

namespace rtflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPassbandTolerance = 0.0025;
constexpr int kMaxRadialOrder = 400;

// 2D complex buffer with forward/backward FFTW plans (row-major, ny rows of nx).
class Fft2 {
 public:
  Fft2(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny) {
    data_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nx * ny));
    if (data_ == nullptr) throw NumericalError("FFT buffer allocation failed");
    const int rows = static_cast<int>(ny);
    const int cols = static_cast<int>(nx);
    forward_ = fftw_plan_dft_2d(rows, cols, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(rows, cols, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(data_);
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(data_); }
  std::size_t size() const { return nx_ * ny_; }
  void clear() { std::fill(data(), data() + size(), std::complex<double>(0.0, 0.0)); }
  void forward() { fftw_execute(forward_); }
  /// Unnormalized inverse.
  void backward() { fftw_execute(backward_); }

 private:
  std::size_t nx_;
  std::size_t ny_;
  fftw_complex* data_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

double centered_bspline(int order, double x) {
  // B_k(x) = (1/k!) Σ_j (-1)^j C(k+1, j) (x + (k+1)/2 - j)_+^k
  const double half = 0.5 * static_cast<double>(order + 1);
  if (x <= -half || x >= half) return 0.0;
  double sum = 0.0;
  double binom = 1.0;
  double fact = 1.0;
  for (int k = 2; k <= order; ++k) fact *= k;
  for (int j = 0; j <= order + 1; ++j) {
    const double t = x + half - static_cast<double>(j);
    if (t > 0.0) sum += ((j % 2 == 0) ? 1.0 : -1.0) * binom * std::pow(t, order);
    binom = binom * static_cast<double>(order + 1 - j) / static_cast<double>(j + 1);
  }
  return sum / fact;
}

// Truncated-exponential window e^{-x} Σ_{k≤N} x^k / k!.
double mn_window(double x, int order) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= order; ++k) {
    term *= x / static_cast<double>(k);
    sum += term;
  }
  return sum * std::exp(-x);
}

long signed_frequency(std::size_t k, std::size_t n) {
  const long kk = static_cast<long>(k);
  const long nn = static_cast<long>(n);
  return kk <= nn / 2 ? kk : kk - nn;
}

void validate(const CakeParams& p) {
  if (p.n_orientations < 4 || p.n_orientations % 2 != 0) {
    throw ConfigError("cake wavelets need an even orientation count >= 4, got " + std::to_string(p.n_orientations));
  }
  if (p.size < 3 || p.size % 2 == 0) {
    throw ConfigError("kernel size must be odd and >= 3, got " + std::to_string(p.size));
  }
  if (p.spline_order < 1 || p.spline_order > 5 ||
      static_cast<std::size_t>(p.spline_order + 1) >= p.n_orientations) {
    throw ConfigError("spline order must lie in [1, 5] and stay below N - 1, got " + std::to_string(p.spline_order));
  }
  if (!(p.nyquist_cut > 0.0) || !(p.inflection > p.nyquist_cut)) {
    throw ConfigError("need 0 < nyquist_cut < inflection");
  }
}

}  // namespace

WaveletStack::WaveletStack(const CakeParams& p) : params_(p) {
  validate(p);
  const std::size_t n_or = p.n_orientations;
  const std::size_t s = p.size;
  const long r = static_cast<long>((s - 1) / 2);

  // Radial order: smallest N keeping the window within tolerance at the band edge.
  for (int order = 1; order <= kMaxRadialOrder; ++order) {
    radial_order_ = order;
    window_scale_ = 0.5 * (1.0 + 2.0 * order) / (p.inflection * p.inflection);
    if (1.0 - radial_window(p.nyquist_cut) <= kPassbandTolerance) break;
    if (order == kMaxRadialOrder) throw ConfigError("radial window cannot meet the pass band; raise inflection");
  }

  frequency_.assign(n_or, std::vector<double>(s * s, 0.0));
  cover_.assign(s * s, 0.0);
  for (long ky = -r; ky <= r; ++ky) {
    for (long kx = -r; kx <= r; ++kx) {
      const std::size_t idx = static_cast<std::size_t>((ky + r) * static_cast<long>(s) + (kx + r));
      const double rho = 2.0 * std::hypot(static_cast<double>(kx), static_cast<double>(ky)) / static_cast<double>(s);
      const double radial = radial_window(rho);
      const double phi = std::atan2(static_cast<double>(ky), static_cast<double>(kx));
      for (std::size_t n = 0; n < n_or; ++n) {
        const double angular = (kx == 0 && ky == 0) ? 1.0 / static_cast<double>(n_or) : angular_profile(n, phi);
        frequency_[n][idx] = angular * radial;
        cover_[idx] += frequency_[n][idx];
      }
    }
  }

  Fft2 fft(s, s);
  kernels_.assign(n_or, std::vector<std::complex<double>>(s * s));
  const double norm = 1.0 / static_cast<double>(s * s);
  for (std::size_t n = 0; n < n_or; ++n) {
    fft.clear();
    auto* buf = fft.data();
    for (long ky = -r; ky <= r; ++ky)
      for (long kx = -r; kx <= r; ++kx) {
        const std::size_t wrapped = static_cast<std::size_t>(((ky + static_cast<long>(s)) % static_cast<long>(s)) *
                                                                 static_cast<long>(s) +
                                                             (kx + static_cast<long>(s)) % static_cast<long>(s));
        buf[wrapped] = frequency_[n][static_cast<std::size_t>((ky + r) * static_cast<long>(s) + (kx + r))];
      }
    fft.backward();
    for (long y = -r; y <= r; ++y)
      for (long x = -r; x <= r; ++x) {
        const std::size_t wrapped = static_cast<std::size_t>(((y + static_cast<long>(s)) % static_cast<long>(s)) *
                                                                 static_cast<long>(s) +
                                                             (x + static_cast<long>(s)) % static_cast<long>(s));
        kernels_[n][static_cast<std::size_t>((y + r) * static_cast<long>(s) + (x + r))] = buf[wrapped] * norm;
      }
  }
}

double WaveletStack::h_a() const { return 2.0 * kPi / static_cast<double>(params_.n_orientations); }

double WaveletStack::radial_window(double rho) const { return mn_window(window_scale_ * rho * rho, radial_order_); }

double WaveletStack::angular_profile(std::size_t n, double phi) const {
  const double n_or = static_cast<double>(params_.n_orientations);
  const double step = 2.0 * kPi / n_or;
  double d = phi - step * static_cast<double>(n) - 0.5 * kPi;
  d = std::remainder(d, 2.0 * kPi);
  const double x = d / step;
  double v = 0.0;
  for (int m = -1; m <= 1; ++m) v += centered_bspline(params_.spline_order, x + m * n_or);
  return v;
}

double WaveletStack::admissibility_deviation(double lo, double hi) const {
  const std::size_t s = params_.size;
  const long r = static_cast<long>((s - 1) / 2);
  double worst = 0.0;
  for (long ky = -r; ky <= r; ++ky)
    for (long kx = -r; kx <= r; ++kx) {
      const double rho = 2.0 * std::hypot(static_cast<double>(kx), static_cast<double>(ky)) / static_cast<double>(s);
      if (rho < lo || rho > hi) continue;
      const std::size_t idx = static_cast<std::size_t>((ky + r) * static_cast<long>(s) + (kx + r));
      worst = std::max(worst, std::abs(cover_[idx] - 1.0));
    }
  return worst;
}

double WaveletStack::admissibility_deviation_on_grid(std::size_t nx, std::size_t ny, double lo, double hi) const {
  const std::size_t s = params_.size;
  if (nx < s || ny < s) throw ConfigError("image grid is smaller than the wavelet kernels");
  const long r = static_cast<long>((s - 1) / 2);
  Fft2 fft(nx, ny);
  fft.clear();
  auto* buf = fft.data();
  for (long y = -r; y <= r; ++y)
    for (long x = -r; x <= r; ++x) {
      const std::size_t src = static_cast<std::size_t>((y + r) * static_cast<long>(s) + (x + r));
      std::complex<double> sum = 0.0;
      for (const auto& k : kernels_) sum += k[src];
      const std::size_t yy = static_cast<std::size_t>((y + static_cast<long>(ny)) % static_cast<long>(ny));
      const std::size_t xx = static_cast<std::size_t>((x + static_cast<long>(nx)) % static_cast<long>(nx));
      buf[yy * nx + xx] = sum;
    }
  fft.forward();
  double worst = 0.0;
  for (std::size_t ky = 0; ky < ny; ++ky)
    for (std::size_t kx = 0; kx < nx; ++kx) {
      const double fx = 2.0 * static_cast<double>(signed_frequency(kx, nx)) / static_cast<double>(nx);
      const double fy = 2.0 * static_cast<double>(signed_frequency(ky, ny)) / static_cast<double>(ny);
      const double rho = std::hypot(fx, fy);
      if (rho < lo || rho > hi) continue;
      worst = std::max(worst, std::abs(buf[ky * nx + kx] - 1.0));
    }
  return worst;
}

LiftedField WaveletStack::kernels_as_field() const {
  const std::size_t s = params_.size;
  LiftedField out(LiftedGrid::planar(s, s, params_.n_orientations));
  for (std::size_t n = 0; n < params_.n_orientations; ++n) {
    auto sl = out.slice(n);
    for (std::size_t i = 0; i < s * s; ++i) sl[i] = kernels_[n][i].real();
  }
  return out;
}

WaveletStack build_cake_wavelets(const CakeParams& p) { return WaveletStack(p); }

LiftedField lift(const Image& f, const WaveletStack& w, Boundary boundary) {
  const std::size_t nx = f.nx;
  const std::size_t ny = f.ny;
  const std::size_t s = w.size();
  if (f.data.size() != nx * ny) throw ConfigError("image storage does not match its extents");
  if (nx < s || ny < s) {
    throw ConfigError("image " + std::to_string(nx) + "x" + std::to_string(ny) + " is smaller than the " +
                      std::to_string(s) + "x" + std::to_string(s) + " wavelet kernels; pad it first");
  }
  const std::size_t n_or = w.n_orientations();
  const long r = static_cast<long>((s - 1) / 2);
  const std::size_t np = nx * ny;

  Fft2 image_fft(nx, ny);
  for (std::size_t i = 0; i < np; ++i) image_fft.data()[i] = f.data[i];
  image_fft.forward();

  LiftedField u(LiftedGrid::planar(nx, ny, n_or, 1.0, boundary));
  Fft2 fft(nx, ny);
  const double scale = 1.0 / (static_cast<double>(np) * w.h_a());
  for (std::size_t n = 0; n < n_or; ++n) {
    fft.clear();
    auto* buf = fft.data();
    const auto& k = w.kernel(n);
    for (long y = -r; y <= r; ++y)
      for (long x = -r; x <= r; ++x) {
        const std::size_t yy = static_cast<std::size_t>((y + static_cast<long>(ny)) % static_cast<long>(ny));
        const std::size_t xx = static_cast<std::size_t>((x + static_cast<long>(nx)) % static_cast<long>(nx));
        buf[yy * nx + xx] = k[static_cast<std::size_t>((y + r) * static_cast<long>(s) + (x + r))];
      }
    fft.forward();
    for (std::size_t i = 0; i < np; ++i) buf[i] = std::conj(buf[i]) * image_fft.data()[i];
    fft.backward();
    auto sl = u.slice(n);
    for (std::size_t i = 0; i < np; ++i) sl[i] = buf[i].real() * scale;
  }
  return u;
}

Image reconstruct(const LiftedField& u, const WaveletStack& w) {
  const LiftedGrid& g = u.grid();
  if (g.dim != 2 || g.n_orient != w.n_orientations()) {
    throw ConfigError("score has " + std::to_string(g.n_orient) + " orientations, wavelet stack has " +
                      std::to_string(w.n_orientations()));
  }
  Image out(g.nx, g.ny);
  const double ha = w.h_a();
  for (std::size_t n = 0; n < g.n_orient; ++n) {
    const auto sl = u.slice(n);
    for (std::size_t i = 0; i < sl.size(); ++i) out.data[i] += sl[i] * ha;
  }
  return out;
}

Image enhance(const Image& f, const WaveletStack& w, const FlowSpec& spec, const MetricParams& m,
              Boundary boundary) {
  const LiftedField u = lift(f, w, boundary);
  const FlowTrajectory traj = FlowEngine(u.grid(), m, spec).run(u);
  return reconstruct(traj.final_field(), w);
}

}  // namespace rtflow
