#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nhb/counting.hpp"
#include "nhb/eigensystem.hpp"
#include "nhb/errors.hpp"
#include "nhb/exec.hpp"
#include "nhb/params.hpp"
#include "nhb/waveform.hpp"

namespace nhb {

/// Closed-form models, each with a flat background b and an onset offset
/// tau0; t = tau - tau0, all zero for t < 0:
///   eq3            A exp(-2 G t) [1 - cos(W t)] + b           (A, G, W, b, tau0)
///   eq4_canonical  A exp(-2 G- t) [(1 - exp(-s t)) / s]^2 + b  (A, G, s, b, tau0), G- = G - s/2
///   s34_single_exp A exp(-g t) + b                            (A, g, b, tau0)
///   ep_limit       A t^2 exp(-2 G t) + b                      (A, G, b, tau0)
/// Rates are in 1/ns during the fit.
enum class FitModel { eq3, eq4_canonical, s34_single_exp, ep_limit };

std::string_view to_string(FitModel model);
FitModel fit_model_from_string(std::string_view name);

/// Parameter names in the order used by model_value.
std::vector<std::string> parameter_names(FitModel model);

/// Model curve at tau (ns) for a parameter vector in the order above.
double model_value(FitModel model, std::span<const double> params, double tau_ns);

struct FitParameter {
  std::string name;
  double value = 0.0;
  double uncertainty = 0.0;
};

struct ModelScore {
  FitModel model;
  double chi2 = 0.0;
  double aicc = 0.0;
  bool converged = false;
};

struct FitResult {
  FitModel model = FitModel::eq3;
  std::vector<FitParameter> parameters;  // A and b in the units of the input data
  double chi2 = 0.0;
  double aicc = 0.0;
  int n_points = 0;
  bool converged = false;
  bool ambiguous = false;  // runner-up within the ambiguity margin
  std::vector<ModelScore> scores;

  // Internal (Gamma41) units.
  double gamma_eff = 0.0;
  double gamma_eff_err = 0.0;
  double splitting = 0.0;  // |W_e|
  double splitting_err = 0.0;
  EigenPair eigen;

  std::vector<double> tau_ns;  // overlay of the selected model
  std::vector<double> curve;

  double value(std::string_view name) const;
  double uncertainty(std::string_view name) const;
};

/// Raised when no model converges within the restart budget; carries the
/// best parameters found so far.
class FitFailure : public NumericalError {
 public:
  FitFailure(const std::string& what, FitResult best)
      : NumericalError(what), best_(std::move(best)) {}
  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

struct FitOptions {
  std::vector<FitModel> models = {FitModel::eq3, FitModel::eq4_canonical,
                                  FitModel::s34_single_exp, FitModel::ep_limit};
  int mask_after_onset = 0;        // bins dropped right after the estimated onset
  double ambiguity_margin = 2.0;   // AICc units
  double no_signal_margin = 10.0;  // AICc gain over a flat line required
  int restarts = 3;                // simplex starts refined per model
  int max_iterations = 200;        // damped least-squares iterations
  double xtol = 1e-8;              // relative parameter change at convergence
  int min_bins = 50;
};

/// Curve with per-point standard deviations, tau in ns.
struct FitData {
  std::vector<double> tau_ns;
  std::vector<double> y;
  std::vector<double> sigma;
};

/// Weighted least squares: for each model a multi-start grid over the
/// nonlinear rates, Nelder-Mead refinement of the best starts with A and b
/// solved linearly, then a Levenberg-Marquardt polish of all parameters.
/// The model with the smallest small-sample AICc is returned.
FitResult fit_data(const FitData& data, const SystemParams& sys, const FitOptions& opts = {});

/// Poisson weights, variance = max(count, 1).
FitResult fit_waveform(const CoincidenceHistogram& hist, const SystemParams& sys,
                       const FitOptions& opts = {});

/// Fits the counts the curve came from (values * scale) so that the rates
/// agree with the histogram fit; A and b are reported in curve units.
FitResult fit_waveform(const NormalizedCurve& curve, const SystemParams& sys,
                       const FitOptions& opts = {});

struct TraceInput {
  double omega3 = 0.0;
  CoincidenceHistogram hist;
};

struct TraceRow {
  double omega3 = 0.0;
  bool ok = false;
  std::string error;
  FitResult fit;
  Complex plus;
  Complex minus;
};

/// One fit per histogram, rows sorted by omega3. Failed fits are marked in
/// the row rather than thrown.
std::vector<TraceRow> trace_transition(std::vector<TraceInput> inputs, const SystemParams& sys,
                                       const FitOptions& opts = {}, Exec exec = default_exec);

enum class ShapeClass { oscillatory, oscillatory_with_offset, ep, antibunching, group_delay };

std::string_view to_string(ShapeClass shape);

struct ShapeOptions {
  double zero_ratio = 0.01;       // minimum counts as a zero below this fraction of the next lobe
  double lobe_floor = 1e-7;       // lobes below this fraction of the peak are ignored
  double onset_threshold = 0.05;  // G2 at onset over peak above this: no antibunching
  double relative_noise = 1e-3;   // sigma used for the residual test, fraction of peak
  double ep_splitting = 0.1;      // fitted s / G_eff below this counts as coalesced
};

struct ShapeReport {
  ShapeClass shape = ShapeClass::ep;
  int interior_zeros = 0;
  int interior_minima = 0;
  double onset_ratio = 0.0;
  double aicc_gain = 0.0;  // AICc(ep_limit) - AICc(eq4_canonical)
  double relative_splitting = 0.0;
};

/// Shape class of a noise-free waveform (internal tau) from the interior
/// minima, the onset value and a single-versus-double exponential residual
/// test.
ShapeReport classify_shape(const CorrelationWaveform& waveform, const SystemParams& sys,
                           const ShapeOptions& opts = {});

}  // namespace nhb
