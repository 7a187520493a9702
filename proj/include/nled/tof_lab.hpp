#pragma once

// Experiment orchestration: time-of-flight measurement of a pulse crossing
// a constant magnetic background, model-discrimination sweeps, duality
// scans and constitutive round-trip checks. Results are written as CSV
// data plus a JSON summary; identical configuration and seed give
// bit-identical outputs.

#include <nled/config.hpp>
#include <nled/exact_solutions.hpp>
#include <nled/forms.hpp>
#include <nled/lagrangian.hpp>
#include <nled/solver1d.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace nled {

enum class InitKind { Ansatz, Paired, Background };

struct TofConfig {
  LagrangianModel model = LagrangianModel::maxwell();
  Vec3 B0 = Vec3::Zero();
  PulseProfile pulse{0.0, 6.0, 0.5};  // amplitude <= 0: use 0.1 / coupling scale
  long n = 4096;
  double length = 48.0;
  double window_start = 8.0;
  double window_stop = 32.0;
  Scheme scheme = Scheme::LeapfrogFdtd;
  double cfl = 0.5;
  double t_end = 0.0;  // 0: derived from the window and predicted speed
  InitKind init = InitKind::Ansatz;
  long snapshot_count = 5;
  long centroid_every = 0;  // steps between centroid samples; 0: ~600 samples
  std::uint64_t seed = 0;
  std::string out_prefix;  // empty: no files written

  static TofConfig from_config(const Config& cfg);
  void validate() const;
  /// Pulse with the amplitude default resolved.
  PulseProfile effective_pulse() const;
};

struct TofResult {
  std::string model_id;
  Vec3 B0 = Vec3::Zero();
  bool fit_ok = true;
  double v_used = 0.0;    // ansatz speed used for initial data
  double chi_used = 0.0;  // ansatz longitudinal coefficient
  double v_predicted = 0.0;  // NaN when the theory offers no exact wave here
  double v_measured = 0.0;
  double rel_error = 0.0;  // |v_measured - v_predicted| / v_predicted
  double r_squared = 0.0;
  long fit_samples = 0;
  double transit_time = 0.0;     // time of the last in-window sample
  double shape_fidelity = 0.0;   // relative L2 deviation from the translated start
  double energy_start = 0.0;
  double energy_end = 0.0;
  double energy_drift = 0.0;  // |end - start| / |start|
  long steps = 0;
  double mean_newton_iterations = 0.0;
};

/// Run the transit experiment described by the config. Writes
/// <prefix>.csv (snapshots), <prefix>_centroid.csv and <prefix>.json when
/// an output prefix is set. Throws FitError when the centroid fit is
/// rejected or the window is never traversed; with throw_on_fit_failure
/// false a rejected fit instead returns fit_ok = false with v_measured NaN
/// (shape fidelity and energies stay valid).
TofResult measure_tof(const TofConfig& cfg, bool throw_on_fit_failure = true);

struct SweepRow {
  std::string model_id;
  double bx = 0, by = 0, bz = 0;
  bool fit_ok = false;
  double v_measured = 0, v_predicted = 0, r_squared = 0;
  double shape_fidelity = 0;
  std::string note;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

/// Transit runs for every (model, background) pair. All models must share
/// the family coupling lambda (kappa^2/4 for Born-Infeld). Rows run as
/// independent jobs, up to NLED_THREADS in parallel, and are sorted by
/// (model, background) before reporting.
SweepReport discrimination_sweep(const std::vector<LagrangianModel>& models,
                                 const std::vector<Vec3>& backgrounds,
                                 const TofConfig& base);

struct DualityScan {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  long points = 0;
  long rejected = 0;  // out-of-domain draws
};

/// Duality residual statistics over random in-domain field points with
/// |E|, |B| <= bound (draws outside the model domain are rejected).
DualityScan duality_scan(const LagrangianModel& model, long points, double bound,
                         std::uint64_t seed);

struct InvertCheck {
  double max_error = 0.0;  // |E_recovered - E|_inf over the cloud
  long points = 0;
};

/// Constitutive round-trip (E, B) -> (D, B) -> E over random in-domain points.
InvertCheck invert_check(const LagrangianModel& model, long points, double bound,
                         std::uint64_t seed);

struct VerifyExactReport {
  std::string model_id;
  Vec3 B0 = Vec3::Zero();
  double v = 0.0, chi = 0.0;
  RefinementStudy study;
  RefinementStudy bi_matched;  // Born-Infeld baseline at the same coupling and B0
  bool converges = false;      // slope 2 +- 0.1
  double ratio_vs_bi = 0.0;    // extrapolated residual over the BI baseline's
};

/// Stencil-refinement verification that (model, B0) admits the travelling
/// wave with the model's own (v, chi). The Born-Infeld model at the
/// matched coupling provides the scale for the plateau judgement.
VerifyExactReport verify_exact(const LagrangianModel& model, const Vec3& B0,
                               const PulseProfile& pulse,
                               const std::vector<double>& steps);

/// Hardware parallelism capped by the NLED_THREADS environment variable.
int thread_budget(long jobs);

// --- reporting helpers (deterministic formatting) ---
std::string format_g17(double v);
void write_text_file(const std::string& path, const std::string& content);
std::string snapshots_csv(const Grid1D& grid, const std::vector<Snapshot>& snaps);
std::string sweep_csv(const SweepReport& report);
std::string verify_exact_csv(const VerifyExactReport& report);

}  // namespace nled
