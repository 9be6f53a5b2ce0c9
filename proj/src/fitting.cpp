#include "fitting.hpp"

#include <gsl/gsl_blas.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "errors.hpp"
#include "linalg.hpp"

namespace ahmsim {

namespace {

struct FitData {
  const std::vector<double>* t;
  const std::vector<double>* y;
};

int cosine_residuals(const gsl_vector* x, void* params, gsl_vector* f) {
  const auto* d = static_cast<const FitData*>(params);
  const double a = gsl_vector_get(x, 0);
  const double k = gsl_vector_get(x, 1);
  const double w = gsl_vector_get(x, 2);
  const double ph = gsl_vector_get(x, 3);
  const double c = gsl_vector_get(x, 4);
  for (size_t i = 0; i < d->t->size(); ++i) {
    const double ti = (*d->t)[i];
    const double model = a * std::exp(-k * ti) * std::cos(w * ti + ph) + c;
    gsl_vector_set(f, i, model - (*d->y)[i]);
  }
  return GSL_SUCCESS;
}

// Coarse spectrum over a frequency grid; t need not be uniform.
void dft_seed(const std::vector<double>& t, const std::vector<double>& y, double mean,
              double* omega_out, double* phase_out) {
  const double span = t.back() - t.front();
  double dt_min = span;
  for (size_t i = 1; i < t.size(); ++i) dt_min = std::min(dt_min, t[i] - t[i - 1]);
  if (dt_min <= 0.0) dt_min = span / static_cast<double>(t.size());
  const double w_max = kPi / dt_min;
  const double w_min = kTwoPi / (8.0 * span);
  const int n_grid = 2048;
  double best_w = w_min;
  double best_mag = -1.0;
  std::complex<double> best_amp = 0.0;
  for (int g = 0; g <= n_grid; ++g) {
    const double w = w_min + (w_max - w_min) * g / n_grid;
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < t.size(); ++i)
      acc += (y[i] - mean) * std::exp(std::complex<double>(0.0, -w * t[i]));
    if (std::abs(acc) > best_mag) {
      best_mag = std::abs(acc);
      best_w = w;
      best_amp = acc;
    }
  }
  *omega_out = best_w;
  // y - mean ~ A cos(wt + ph) => sum (y-mean) e^{-iwt} ~ (A N / 2) e^{i ph}
  *phase_out = std::arg(best_amp);
}

}  // namespace

CosineFit fit_decaying_cosine(const std::vector<double>& t, const std::vector<double>& y,
                              double residual_rel_tol) {
  if (t.size() != y.size() || t.size() < 8)
    throw InvalidArgumentError("fit_decaying_cosine: need >= 8 samples");

  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double ymin = y[0], ymax = y[0];
  for (double v : y) {
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  const double amp0 = std::max(0.5 * (ymax - ymin), 1e-12);

  double w0 = 0.0, ph0 = 0.0;
  dft_seed(t, y, mean, &w0, &ph0);

  // Decay seed from the log of the envelope over the first/second half.
  const size_t half = t.size() / 2;
  double e1 = 0.0, e2 = 0.0;
  for (size_t i = 0; i < half; ++i) e1 = std::max(e1, std::abs(y[i] - mean));
  for (size_t i = half; i < t.size(); ++i) e2 = std::max(e2, std::abs(y[i] - mean));
  double k0 = 0.0;
  if (e1 > 0.0 && e2 > 0.0 && e2 < e1) {
    const double dt_half = t[t.size() - 1] - t[half];
    if (dt_half > 0.0) k0 = std::log(e1 / e2) / dt_half;
  }

  const gsl_multifit_nlinear_type* type = gsl_multifit_nlinear_trust;
  gsl_multifit_nlinear_parameters params = gsl_multifit_nlinear_default_parameters();
  const size_t n = t.size(), p = 5;
  gsl_multifit_nlinear_workspace* w = gsl_multifit_nlinear_alloc(type, &params, n, p);

  FitData data{&t, &y};
  gsl_multifit_nlinear_fdf fdf;
  fdf.f = cosine_residuals;
  fdf.df = nullptr;  // finite-difference Jacobian
  fdf.fvv = nullptr;
  fdf.n = n;
  fdf.p = p;
  fdf.params = &data;

  gsl_vector* x0 = gsl_vector_alloc(p);
  gsl_vector_set(x0, 0, amp0);
  gsl_vector_set(x0, 1, k0);
  gsl_vector_set(x0, 2, w0);
  gsl_vector_set(x0, 3, ph0);
  gsl_vector_set(x0, 4, mean);
  gsl_multifit_nlinear_init(x0, &fdf, w);

  int info = 0;
  gsl_multifit_nlinear_driver(400, 1e-12, 1e-12, 0.0, nullptr, nullptr, &info, w);

  CosineFit fit;
  fit.amplitude = gsl_vector_get(w->x, 0);
  fit.decay_rate = gsl_vector_get(w->x, 1);
  fit.omega = gsl_vector_get(w->x, 2);
  fit.phase = gsl_vector_get(w->x, 3);
  fit.offset = gsl_vector_get(w->x, 4);
  double chi2 = 0.0;
  gsl_blas_ddot(w->f, w->f, &chi2);
  fit.rms_residual = std::sqrt(chi2 / n);

  gsl_vector_free(x0);
  gsl_multifit_nlinear_free(w);

  // Canonical form: positive amplitude, nonnegative frequency.
  if (fit.amplitude < 0.0) {
    fit.amplitude = -fit.amplitude;
    fit.phase += kPi;
  }
  if (fit.omega < 0.0) {
    fit.omega = -fit.omega;
    fit.phase = -fit.phase;
  }
  fit.phase = std::remainder(fit.phase, kTwoPi);

  if (fit.rms_residual > residual_rel_tol * std::max(fit.amplitude, 1e-12))
    throw FitError("fit_decaying_cosine: residual above threshold");
  return fit;
}

QuadraticRoot fit_quadratic_root(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw InvalidArgumentError("fit_quadratic_root: need >= 3 samples");
  bool has_pos = false, has_neg = false;
  for (double v : y) {
    has_pos |= v > 0.0;
    has_neg |= v < 0.0;
  }
  if (!(has_pos && has_neg))
    throw BracketError("fit_quadratic_root: no sign change in grid");

  // scale x for conditioning, then transform the coefficients back
  double xs = 0.0;
  for (double v : x) xs = std::max(xs, std::abs(v));
  if (xs == 0.0) xs = 1.0;
  Eigen::MatrixXd a(x.size(), 3);
  Eigen::VectorXd b(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] / xs;
    a(i, 0) = 1.0;
    a(i, 1) = u;
    a(i, 2) = u * u;
    b(i) = y[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  QuadraticRoot out;
  out.c0 = c[0];
  out.c1 = c[1] / xs;
  out.c2 = c[2] / (xs * xs);
  out.rms_residual = std::sqrt((a * c - b).squaredNorm() / x.size());

  const double lo = *std::min_element(x.begin(), x.end());
  const double hi = *std::max_element(x.begin(), x.end());
  std::vector<double> roots;
  if (std::abs(out.c2) < 1e-300 * std::abs(out.c1)) {
    if (out.c1 != 0.0) roots.push_back(-out.c0 / out.c1);
  } else {
    const double disc = out.c1 * out.c1 - 4.0 * out.c2 * out.c0;
    if (disc < 0.0) throw FitError("fit_quadratic_root: complex roots");
    const double sq = std::sqrt(disc);
    roots.push_back((-out.c1 + sq) / (2.0 * out.c2));
    roots.push_back((-out.c1 - sq) / (2.0 * out.c2));
  }
  bool found = false;
  for (double r : roots) {
    if (r >= lo && r <= hi) {
      out.root = r;
      found = true;
      break;
    }
  }
  if (!found) throw FitError("fit_quadratic_root: no real root inside the bracket");
  return out;
}

double fit_phase_slope(const std::vector<double>& t, const std::vector<double>& phase_wrapped) {
  if (t.size() != phase_wrapped.size() || t.size() < 2)
    throw InvalidArgumentError("fit_phase_slope: need >= 2 samples");
  std::vector<double> unwrapped(phase_wrapped.size());
  unwrapped[0] = phase_wrapped[0];
  for (size_t i = 1; i < phase_wrapped.size(); ++i) {
    double d = phase_wrapped[i] - phase_wrapped[i - 1];
    d = std::remainder(d, kTwoPi);
    unwrapped[i] = unwrapped[i - 1] + d;
  }
  double st = 0.0, sp = 0.0, stt = 0.0, stp = 0.0;
  const double n = static_cast<double>(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sp += unwrapped[i];
    stt += t[i] * t[i];
    stp += t[i] * unwrapped[i];
  }
  const double denom = n * stt - st * st;
  if (denom == 0.0) throw InvalidArgumentError("fit_phase_slope: degenerate time grid");
  return (n * stp - st * sp) / denom;
}

}  // namespace ahmsim
