#include "nhb/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_matrix.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

namespace nhb {

namespace {

constexpr double huge = 1e300;

// GSL aborts on error by default; status codes are checked instead.
void quiet_gsl() {
  static const bool once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}

std::size_t n_params(FitModel m) {
  return (m == FitModel::eq3 || m == FitModel::eq4_canonical) ? 5 : 4;
}

// Nonlinear parameters: the rates, then tau0.
std::size_t n_nonlinear(FitModel m) { return n_params(m) - 2; }

double shape(FitModel m, const double* q, double tau) {
  switch (m) {
    case FitModel::eq3: {
      const double t = tau - q[2];
      if (t < 0.0) return 0.0;
      const double s = std::sin(0.5 * q[1] * t);
      return std::exp(-2.0 * q[0] * t) * 2.0 * s * s;
    }
    case FitModel::eq4_canonical: {
      const double t = tau - q[2];
      if (t < 0.0) return 0.0;
      const double s = std::abs(q[1]);
      const double d = s > 0.0 ? -std::expm1(-s * t) / s : t;
      return std::exp(-2.0 * (q[0] - 0.5 * s) * t) * d * d;
    }
    case FitModel::s34_single_exp: {
      const double t = tau - q[1];
      if (t < 0.0) return 0.0;
      return std::exp(-q[0] * t);
    }
    case FitModel::ep_limit: {
      const double t = tau - q[1];
      if (t < 0.0) return 0.0;
      return t * t * std::exp(-2.0 * q[0] * t);
    }
  }
  return 0.0;
}

// Full parameter vector <-> (A, nonlinear, b).
void split_params(FitModel m, std::span<const double> p, double& a, double* q, double& b) {
  a = p[0];
  if (n_params(m) == 5) {
    q[0] = p[1];
    q[1] = p[2];
    q[2] = p[4];
    b = p[3];
  } else {
    q[0] = p[1];
    q[1] = p[3];
    b = p[2];
  }
}

std::vector<double> join_params(FitModel m, double a, const double* q, double b) {
  if (n_params(m) == 5) return {a, q[0], q[1], b, q[2]};
  return {a, q[0], b, q[1]};
}

struct Problem {
  FitModel model;
  const std::vector<double>* tau;
  const std::vector<double>* y;
  std::vector<double> w;  // 1/sigma^2, 0 for masked points
};

struct LinearFit {
  double a = 0.0, b = 0.0, chi2 = huge;
};

// Best A and b for fixed nonlinear parameters (weighted 2x2 normal equations).
LinearFit solve_linear(const Problem& pr, const double* q) {
  const auto& tau = *pr.tau;
  const auto& y = *pr.y;
  double sw = 0, sf = 0, sff = 0, sy = 0, sfy = 0;
  std::vector<double> f(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    f[i] = shape(pr.model, q, tau[i]);
    const double w = pr.w[i];
    sw += w;
    sf += w * f[i];
    sff += w * f[i] * f[i];
    sy += w * y[i];
    sfy += w * f[i] * y[i];
  }
  LinearFit out;
  const double det = sw * sff - sf * sf;
  if (!(det > 1e-300 * std::max(1.0, sw * sff)) || !std::isfinite(det)) return out;
  out.a = (sw * sfy - sf * sy) / det;
  out.b = (sff * sy - sf * sfy) / det;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double r = y[i] - out.a * f[i] - out.b;
    chi2 += pr.w[i] * r * r;
  }
  out.chi2 = std::isfinite(chi2) ? chi2 : huge;
  return out;
}

// Simplex coordinates: logs of the positive rates, tau0 as is. For eq4 the
// rates are (G-, s) so that G- > 0 holds everywhere.
void to_natural(FitModel m, const double* z, double* q) {
  switch (m) {
    case FitModel::eq3:
      q[0] = std::exp(z[0]);
      q[1] = std::exp(z[1]);
      q[2] = z[2];
      break;
    case FitModel::eq4_canonical: {
      const double gm = std::exp(z[0]);
      const double s = std::exp(z[1]);
      q[0] = gm + 0.5 * s;
      q[1] = s;
      q[2] = z[2];
      break;
    }
    default:
      q[0] = std::exp(z[0]);
      q[1] = z[1];
  }
}

void to_simplex(FitModel m, const double* q, double* z) {
  switch (m) {
    case FitModel::eq3:
      z[0] = std::log(q[0]);
      z[1] = std::log(q[1]);
      z[2] = q[2];
      break;
    case FitModel::eq4_canonical:
      z[0] = std::log(q[0] - 0.5 * q[1]);
      z[1] = std::log(q[1]);
      z[2] = q[2];
      break;
    default:
      z[0] = std::log(q[0]);
      z[1] = q[1];
  }
}

double simplex_objective(const gsl_vector* x, void* params) {
  const auto* pr = static_cast<const Problem*>(params);
  double z[3], q[3];
  for (std::size_t j = 0; j < x->size; ++j) z[j] = gsl_vector_get(x, j);
  to_natural(pr->model, z, q);
  for (std::size_t j = 0; j < n_nonlinear(pr->model); ++j)
    if (!std::isfinite(q[j])) return huge;
  return solve_linear(*pr, q).chi2;
}

struct Candidate {
  std::vector<double> q;
  double chi2 = huge;
};

Candidate run_simplex(const Problem& pr, const std::vector<double>& q0, double t0_step) {
  const std::size_t n = n_nonlinear(pr.model);
  double z0[3];
  to_simplex(pr.model, q0.data(), z0);
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t j = 0; j < n; ++j) {
    gsl_vector_set(x, j, z0[j]);
    gsl_vector_set(step, j, j + 1 == n ? t0_step : 0.2);
  }
  gsl_multimin_function fn{&simplex_objective, n, const_cast<Problem*>(&pr)};
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, step);
  for (int iter = 0; iter < 3000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-9) == GSL_SUCCESS) break;
  }
  Candidate c;
  double z[3];
  for (std::size_t j = 0; j < n; ++j) z[j] = gsl_vector_get(s->x, j);
  c.q.resize(n);
  to_natural(pr.model, z, c.q.data());
  c.chi2 = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return c;
}

int lm_residual(const gsl_vector* x, void* params, gsl_vector* f) {
  const auto* pr = static_cast<const Problem*>(params);
  const std::size_t np = n_params(pr->model);
  double p[5];
  for (std::size_t j = 0; j < np; ++j) p[j] = gsl_vector_get(x, j);
  const auto& tau = *pr->tau;
  const auto& y = *pr->y;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double m = model_value(pr->model, std::span<const double>(p, np), tau[i]);
    const double r = std::sqrt(pr->w[i]) * (y[i] - m);
    gsl_vector_set(f, i, std::isfinite(r) ? r : 1e150);
  }
  return GSL_SUCCESS;
}

struct PolishResult {
  std::vector<double> p;
  std::vector<double> err;
  double chi2 = huge;
  bool converged = false;
};

PolishResult run_lm(const Problem& pr, const std::vector<double>& p0, const FitOptions& opts) {
  const std::size_t np = n_params(pr.model);
  const std::size_t n = pr.tau->size();
  PolishResult out;
  gsl_multifit_nlinear_fdf fdf{};
  fdf.f = &lm_residual;
  fdf.df = nullptr;
  fdf.fvv = nullptr;
  fdf.n = n;
  fdf.p = np;
  fdf.params = const_cast<Problem*>(&pr);
  gsl_multifit_nlinear_parameters fp = gsl_multifit_nlinear_default_parameters();
  fp.trs = gsl_multifit_nlinear_trs_lm;
  fp.scale = gsl_multifit_nlinear_scale_more;
  gsl_multifit_nlinear_workspace* w =
      gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &fp, n, np);
  gsl_vector* x = gsl_vector_alloc(np);
  for (std::size_t j = 0; j < np; ++j) gsl_vector_set(x, j, p0[j]);
  int info = 0;
  int status = gsl_multifit_nlinear_init(x, &fdf, w);
  if (status == GSL_SUCCESS)
    status = gsl_multifit_nlinear_driver(opts.max_iterations, opts.xtol, 1e-14, 0.0, nullptr,
                                         nullptr, &info, w);
  const gsl_vector* pos = gsl_multifit_nlinear_position(w);
  out.p.resize(np);
  for (std::size_t j = 0; j < np; ++j) out.p[j] = gsl_vector_get(pos, j);
  double chi2 = 0.0;
  gsl_blas_ddot(gsl_multifit_nlinear_residual(w), gsl_multifit_nlinear_residual(w), &chi2);
  out.chi2 = chi2;
  // gtol hits mean a stationary point as well; both count as converged.
  out.converged = status == GSL_SUCCESS;

  gsl_matrix* cov = gsl_matrix_alloc(np, np);
  gsl_multifit_nlinear_covar(gsl_multifit_nlinear_jac(w), 0.0, cov);
  out.err.resize(np);
  for (std::size_t j = 0; j < np; ++j) {
    const double v = gsl_matrix_get(cov, j, j);
    out.err[j] = (v > 0.0 && std::isfinite(v)) ? std::sqrt(v)
                                                : std::numeric_limits<double>::infinity();
  }
  gsl_matrix_free(cov);
  gsl_vector_free(x);
  gsl_multifit_nlinear_free(w);
  return out;
}

struct Estimates {
  double background = 0.0;
  double peak = 0.0;
  double t_peak = 0.0;
  double t_onset = 0.0;
  double t_char = 0.0;
  double bin = 0.0;
};

Estimates estimate(const std::vector<double>& tau, const std::vector<double>& y) {
  const std::size_t n = y.size();
  Estimates e;
  e.bin = (tau.back() - tau.front()) / static_cast<double>(n - 1);
  const std::size_t tail = std::max<std::size_t>(1, n / 5);
  for (std::size_t i = n - tail; i < n; ++i) e.background += y[i];
  e.background /= static_cast<double>(tail);

  std::vector<double> sm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    const std::size_t hi = std::min(n - 1, i + 2);
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += y[j];
    sm[i] = acc / static_cast<double>(hi - lo + 1) - e.background;
  }
  const auto ipk = static_cast<std::size_t>(std::max_element(sm.begin(), sm.end()) - sm.begin());
  e.peak = sm[ipk];
  e.t_peak = tau[ipk];
  std::size_t ion = ipk;
  while (ion > 0 && sm[ion - 1] > 0.05 * e.peak) --ion;
  e.t_onset = tau[ion];
  std::size_t iend = ipk;
  for (std::size_t i = ipk; i < n; ++i)
    if (sm[i] > 0.1 * e.peak) iend = i;
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = ion; i <= iend; ++i) {
    const double v = std::max(sm[i], 0.0);
    m0 += v;
    m1 += v * (tau[i] - e.t_onset);
  }
  e.t_char = std::max(m0 > 0.0 ? m1 / m0 : 0.0, 3.0 * e.bin);
  return e;
}

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return v;
}

std::vector<std::vector<double>> start_grid(FitModel m, const Estimates& e) {
  const double tc = e.t_char;
  const double rise = std::max(e.t_peak - e.t_onset, e.bin);
  const std::vector<double> t0s = {e.t_onset, e.t_onset - 0.3 * rise, e.t_onset - rise};
  const auto gammas = geometric(0.1 / tc, 3.0 / tc, 8);
  std::vector<std::vector<double>> grid;
  for (double t0 : t0s) {
    for (double g : gammas) {
      switch (m) {
        case FitModel::eq3:
          for (int k = 1; k <= 240; ++k) grid.push_back({g, 0.25 * k / tc, t0});
          break;
        case FitModel::eq4_canonical:
          for (double frac : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95})
            grid.push_back({g, 2.0 * g * frac, t0});
          break;
        case FitModel::s34_single_exp:
          grid.push_back({2.0 * g, t0});
          break;
        case FitModel::ep_limit:
          grid.push_back({g, t0});
          break;
      }
    }
  }
  return grid;
}

struct ModelFit {
  FitModel model;
  std::vector<double> p;
  std::vector<double> err;
  double chi2 = huge;
  bool converged = false;
};

ModelFit fit_model(const Problem& pr, const Estimates& e, const FitOptions& opts) {
  const FitModel m = pr.model;
  auto grid = start_grid(m, e);
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    ranked.emplace_back(solve_linear(pr, grid[k].data()).chi2, k);
  std::sort(ranked.begin(), ranked.end());

  const double t0_step = std::max(2.0 * e.bin, 0.05 * std::max(e.t_peak - e.t_onset, e.bin));
  std::vector<Candidate> refined;
  const std::size_t starts = std::min<std::size_t>(std::max(opts.restarts, 1), ranked.size());
  for (std::size_t k = 0; k < starts; ++k)
    refined.push_back(run_simplex(pr, grid[ranked[k].second], t0_step));
  std::sort(refined.begin(), refined.end(),
            [](const Candidate& a, const Candidate& b) { return a.chi2 < b.chi2; });

  ModelFit best{m, {}, {}, huge, false};
  for (const Candidate& c : refined) {
    const LinearFit lin = solve_linear(pr, c.q.data());
    const auto p0 = join_params(m, lin.a, c.q.data(), lin.b);
    PolishResult pol = run_lm(pr, p0, opts);
    if (!(pol.chi2 <= lin.chi2 * (1.0 + 1e-9) + 1e-12)) {
      pol.p = p0;
      pol.chi2 = lin.chi2;
      pol.converged = false;
    }
    if (pol.chi2 < best.chi2 || (pol.converged && !best.converged &&
                                 pol.chi2 <= best.chi2 * (1.0 + 1e-9))) {
      best.p = pol.p;
      best.err = pol.err;
      best.chi2 = pol.chi2;
      best.converged = pol.converged;
    }
    if (best.converged) break;
  }
  if (m == FitModel::eq3 || m == FitModel::eq4_canonical) best.p[2] = std::abs(best.p[2]);
  return best;
}

double aicc(double chi2, std::size_t k, std::size_t n) {
  const double kk = static_cast<double>(k), nn = static_cast<double>(n);
  if (nn - kk - 1.0 <= 0.0) return std::numeric_limits<double>::infinity();
  return chi2 + 2.0 * kk + 2.0 * kk * (kk + 1.0) / (nn - kk - 1.0);
}

EigenPair eigen_from(double gamma_eff, double splitting, FitModel m) {
  EigenPair e;
  if (m == FitModel::eq3) {
    e.delta_plus = Complex(0.5 * splitting, gamma_eff);
    e.delta_minus = Complex(-0.5 * splitting, gamma_eff);
  } else {
    e.delta_plus = Complex(0.0, gamma_eff + 0.5 * splitting);
    e.delta_minus = Complex(0.0, gamma_eff - 0.5 * splitting);
  }
  e.omega_e = e.delta_plus - e.delta_minus;
  e.gamma_e_plus = std::max(e.delta_plus.imag(), e.delta_minus.imag());
  e.gamma_e_minus = std::min(e.delta_plus.imag(), e.delta_minus.imag());
  return e;
}

Problem make_problem(FitModel m, const FitData& d, const Estimates& e, int mask) {
  Problem pr{m, &d.tau_ns, &d.y, std::vector<double>(d.y.size())};
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    const double s = d.sigma[i];
    pr.w[i] = s > 0.0 ? 1.0 / (s * s) : 0.0;
    if (mask > 0 && d.tau_ns[i] >= e.t_onset && d.tau_ns[i] < e.t_onset + mask * e.bin)
      pr.w[i] = 0.0;
  }
  return pr;
}

void check_data(const FitData& d, const FitOptions& opts) {
  if (d.tau_ns.size() != d.y.size() || d.y.size() != d.sigma.size())
    throw InvalidParameter("fit data columns differ in length");
  if (d.y.size() < static_cast<std::size_t>(std::max(opts.min_bins, 8)))
    throw InvalidParameter("fit needs at least " + std::to_string(opts.min_bins) + " bins");
  for (std::size_t i = 1; i < d.tau_ns.size(); ++i)
    if (!(d.tau_ns[i] > d.tau_ns[i - 1])) throw InvalidParameter("fit tau must be increasing");
  if (opts.models.empty()) throw InvalidParameter("no fit models requested");
}

}  // namespace

std::string_view to_string(FitModel model) {
  switch (model) {
    case FitModel::eq3: return "eq3";
    case FitModel::eq4_canonical: return "eq4_canonical";
    case FitModel::s34_single_exp: return "s34_single_exp";
    case FitModel::ep_limit: return "ep_limit";
  }
  return "unknown";
}

FitModel fit_model_from_string(std::string_view name) {
  for (auto m : {FitModel::eq3, FitModel::eq4_canonical, FitModel::s34_single_exp,
                 FitModel::ep_limit})
    if (to_string(m) == name) return m;
  throw InvalidParameter("unknown fit model '" + std::string(name) + "'");
}

std::vector<std::string> parameter_names(FitModel model) {
  switch (model) {
    case FitModel::eq3: return {"amplitude", "gamma", "omega", "background", "tau0"};
    case FitModel::eq4_canonical: return {"amplitude", "gamma", "splitting", "background", "tau0"};
    case FitModel::s34_single_exp: return {"amplitude", "rate", "background", "tau0"};
    case FitModel::ep_limit: return {"amplitude", "gamma", "background", "tau0"};
  }
  return {};
}

double model_value(FitModel model, std::span<const double> params, double tau_ns) {
  if (params.size() != n_params(model)) throw InvalidParameter("wrong parameter count");
  double a = 0.0, b = 0.0, q[3] = {};
  split_params(model, params, a, q, b);
  return a * shape(model, q, tau_ns) + b;
}

double FitResult::value(std::string_view name) const {
  for (const auto& p : parameters)
    if (p.name == name) return p.value;
  throw InvalidParameter("fit has no parameter '" + std::string(name) + "'");
}

double FitResult::uncertainty(std::string_view name) const {
  for (const auto& p : parameters)
    if (p.name == name) return p.uncertainty;
  throw InvalidParameter("fit has no parameter '" + std::string(name) + "'");
}

FitResult fit_data(const FitData& data, const SystemParams& sys, const FitOptions& opts) {
  quiet_gsl();
  check_data(data, opts);
  const Estimates est = estimate(data.tau_ns, data.y);
  if (!(est.peak > 0.0)) throw NoSignal("no feature above the background");

  std::vector<ModelFit> fits;
  std::size_t n_used = 0;
  for (FitModel m : opts.models) {
    const Problem pr = make_problem(m, data, est, opts.mask_after_onset);
    n_used = static_cast<std::size_t>(
        std::count_if(pr.w.begin(), pr.w.end(), [](double w) { return w > 0.0; }));
    fits.push_back(fit_model(pr, est, opts));
  }

  // flat-line reference for the no-signal test
  const Problem flat = make_problem(opts.models.front(), data, est, opts.mask_after_onset);
  double sw = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    sw += flat.w[i];
    swy += flat.w[i] * data.y[i];
  }
  const double mean = swy / sw;
  double chi2_flat = 0.0;
  for (std::size_t i = 0; i < data.y.size(); ++i)
    chi2_flat += flat.w[i] * (data.y[i] - mean) * (data.y[i] - mean);

  FitResult res;
  res.n_points = static_cast<int>(n_used);
  std::size_t best = 0;
  for (std::size_t k = 0; k < fits.size(); ++k) {
    const double score = aicc(fits[k].chi2, n_params(fits[k].model), n_used);
    res.scores.push_back({fits[k].model, fits[k].chi2, score, fits[k].converged});
    if (score < res.scores[best].aicc) best = k;
  }
  if (aicc(chi2_flat, 1, n_used) - res.scores[best].aicc < opts.no_signal_margin)
    throw NoSignal("no model improves on a flat background");

  const ModelFit& f = fits[best];
  res.model = f.model;
  res.chi2 = f.chi2;
  res.aicc = res.scores[best].aicc;
  res.converged = f.converged;
  for (std::size_t k = 0; k < res.scores.size(); ++k)
    if (k != best && res.scores[k].aicc - res.aicc < opts.ambiguity_margin) res.ambiguous = true;

  const auto names = parameter_names(f.model);
  for (std::size_t j = 0; j < names.size(); ++j)
    res.parameters.push_back({names[j], f.p[j], f.err[j]});

  const double ns_per_unit = sys.to_ns(1.0);
  switch (f.model) {
    case FitModel::eq3:
    case FitModel::eq4_canonical:
      res.gamma_eff = f.p[1] * ns_per_unit;
      res.gamma_eff_err = f.err[1] * ns_per_unit;
      res.splitting = f.p[2] * ns_per_unit;
      res.splitting_err = f.err[2] * ns_per_unit;
      break;
    case FitModel::s34_single_exp:
      res.gamma_eff = 0.5 * f.p[1] * ns_per_unit;
      res.gamma_eff_err = 0.5 * f.err[1] * ns_per_unit;
      break;
    case FitModel::ep_limit:
      res.gamma_eff = f.p[1] * ns_per_unit;
      res.gamma_eff_err = f.err[1] * ns_per_unit;
      break;
  }
  res.eigen = eigen_from(res.gamma_eff, res.splitting, f.model);

  res.tau_ns = data.tau_ns;
  res.curve.resize(data.tau_ns.size());
  for (std::size_t i = 0; i < data.tau_ns.size(); ++i)
    res.curve[i] = model_value(f.model, f.p, data.tau_ns[i]);

  if (!res.converged) {
    bool any = false;
    for (const auto& s : res.scores) any = any || s.converged;
    if (!any) throw FitFailure("no model converged within the restart budget", res);
  }
  return res;
}

FitResult fit_waveform(const CoincidenceHistogram& hist, const SystemParams& sys,
                       const FitOptions& opts) {
  FitData d;
  d.tau_ns = hist.tau_ns;
  d.y.resize(hist.counts.size());
  d.sigma.resize(hist.counts.size());
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const double c = static_cast<double>(hist.counts[i]);
    d.y[i] = c;
    d.sigma[i] = std::sqrt(std::max(c, 1.0));
  }
  return fit_data(d, sys, opts);
}

FitResult fit_waveform(const NormalizedCurve& curve, const SystemParams& sys,
                       const FitOptions& opts) {
  if (!(curve.scale > 0.0)) throw InvalidParameter("normalized curve has no scale");
  FitData d;
  d.tau_ns = curve.tau_ns;
  d.y.resize(curve.values.size());
  d.sigma.resize(curve.values.size());
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    const double c = curve.values[i] * curve.scale;
    d.y[i] = c;
    d.sigma[i] = std::sqrt(std::max(c, 1.0));
  }
  FitResult r = fit_data(d, sys, opts);
  for (auto& p : r.parameters)
    if (p.name == "amplitude" || p.name == "background") {
      p.value /= curve.scale;
      p.uncertainty /= curve.scale;
    }
  for (double& v : r.curve) v /= curve.scale;
  return r;
}

std::vector<TraceRow> trace_transition(std::vector<TraceInput> inputs, const SystemParams& sys,
                                       const FitOptions& opts, Exec exec) {
  std::stable_sort(inputs.begin(), inputs.end(),
                   [](const TraceInput& a, const TraceInput& b) { return a.omega3 < b.omega3; });
  std::vector<TraceRow> rows(inputs.size());
  for_each_index(exec, inputs.size(), [&](std::size_t k) {
    TraceRow& row = rows[k];
    row.omega3 = inputs[k].omega3;
    try {
      row.fit = fit_waveform(inputs[k].hist, sys, opts);
      row.ok = true;
      row.plus = row.fit.eigen.delta_plus;
      row.minus = row.fit.eigen.delta_minus;
    } catch (const FitFailure& e) {
      row.error = e.what();
      row.fit = e.best();
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return rows;
}

std::string_view to_string(ShapeClass shape) {
  switch (shape) {
    case ShapeClass::oscillatory: return "oscillatory";
    case ShapeClass::oscillatory_with_offset: return "oscillatory_with_offset";
    case ShapeClass::ep: return "ep";
    case ShapeClass::antibunching: return "antibunching";
    case ShapeClass::group_delay: return "group_delay";
  }
  return "unknown";
}

ShapeReport classify_shape(const CorrelationWaveform& waveform, const SystemParams& sys,
                           const ShapeOptions& opts) {
  quiet_gsl();
  std::vector<double> tau, g;
  for (std::size_t i = 0; i < waveform.tau.size(); ++i)
    if (waveform.tau[i] >= 0.0) {
      tau.push_back(sys.to_ns(waveform.tau[i]));
      g.push_back(waveform.g2[i]);
    }
  if (g.size() < 16) throw InvalidParameter("waveform too short to classify");
  const auto ipk = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
  const double peak = g[ipk];
  if (!(peak > 0.0)) throw NoSignal("waveform is identically zero");

  ShapeReport rep;
  rep.onset_ratio = g.front() / peak;
  bool first_is_zero = false;
  for (std::size_t i = ipk + 1; i + 1 < g.size(); ++i) {
    if (!(g[i] < g[i - 1] && g[i] <= g[i + 1])) continue;
    std::size_t j = i + 1;
    while (j + 1 < g.size() && g[j + 1] >= g[j]) ++j;
    const double lobe = g[j];
    if (lobe < opts.lobe_floor * peak) break;
    if (lobe <= g[i]) continue;
    const bool zero = g[i] <= opts.zero_ratio * lobe;
    if (rep.interior_minima == 0) first_is_zero = zero;
    ++rep.interior_minima;
    if (zero) ++rep.interior_zeros;
    i = j;
  }
  if (rep.interior_minima > 0) {
    rep.shape = first_is_zero ? ShapeClass::oscillatory : ShapeClass::oscillatory_with_offset;
    return rep;
  }
  if (rep.onset_ratio > opts.onset_threshold) {
    rep.shape = ShapeClass::group_delay;
    return rep;
  }

  // Residual test: coalesced t^2 shape against two exponentials.
  FitData d{tau, g, std::vector<double>(g.size(), opts.relative_noise * peak)};
  FitOptions fo;
  const Estimates est = estimate(d.tau_ns, d.y);
  const Problem pe = make_problem(FitModel::ep_limit, d, est, 0);
  const Problem p4 = make_problem(FitModel::eq4_canonical, d, est, 0);
  const ModelFit fe = fit_model(pe, est, fo);
  const ModelFit f4 = fit_model(p4, est, fo);
  const std::size_t n = g.size();
  rep.aicc_gain = aicc(fe.chi2, 4, n) - aicc(f4.chi2, 5, n);
  rep.relative_splitting = f4.p[2] / f4.p[1];
  const bool split = rep.aicc_gain > fo.ambiguity_margin && rep.relative_splitting > opts.ep_splitting;
  rep.shape = split ? ShapeClass::antibunching : ShapeClass::ep;
  return rep;
}

}  // namespace nhb
