#pragma once

// Time-domain evolution of fields depending on (t, z) only. The curl
// equations of dF = 0 and d(star G) = 0 reduce to
//
//     dt Dx = -dz Hy      dt Bx = +dz Ey
//     dt Dy = +dz Hx      dt By = -dz Ex
//
// with Dz and Bz constant in both t and z. The solver evolves (D, B) --
// these are exact conservation laws -- and recovers (E, H) per cell from
// the constitutive inversion, warm-started from the previous step.
//
// Dz being a conserved scalar is what admits a longitudinal electric
// component: Ez = Ez(Dz, B, E_perp) varies along the pulse while the
// excitation Dz stays uniform, which is exactly how the travelling wave
// carries its chi E(u) dt^dz piece through a tilted background.
//
// Schemes:
//   LeapfrogFdtd   three-level leapfrog in time on a spatially staggered
//                  (Yee-style) grid: D, E at cell centers, B, H at faces.
//                  Non-dissipative and exactly time-reversible; stable for
//                  dt <= 0.5 dz (speed-1 bound).
//   LaxFriedrichs  collocated first-order scheme, dt <= dz. Dissipative;
//                  kept as an independent cross-check of wave speeds.

#include <nled/constitutive.hpp>
#include <nled/exact_solutions.hpp>
#include <nled/forms.hpp>
#include <nled/lagrangian.hpp>

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace nled {

enum class Scheme { LeapfrogFdtd, LaxFriedrichs };

struct Grid1D {
  int n = 0;
  double length = 0.0;

  double dz() const { return length / n; }
  double z_center(int i) const { return (i + 0.5) * dz(); }
  /// face i sits between centers i and i+1; face n-1 wraps to z = 0
  double z_face(int i) const { return (i + 1.0) * dz(); }
};

struct GridState1D {
  Grid1D grid;
  double t = 0.0;
  Eigen::ArrayXd Dx, Dy;  // cell centers
  Eigen::ArrayXd Bx, By;  // faces when staggered, centers otherwise
  double Dz = 0.0;        // conserved scalars of the (t, z) reduction
  double Bz = 0.0;
  bool staggered = true;
  Eigen::ArrayXd Ex, Ey, Ez;  // cell-center inversion cache (warm starts)
};

/// Uniform background state: E = 0, B = B0 everywhere.
GridState1D init_uniform(const Grid1D& grid, const LagrangianModel& model,
                         const Vec3& B0, bool staggered = true);

/// Pulse E = pol * profile(z) on top of B0. When paired, the magnetic field
/// carries the vacuum companion zhat x E (a right-mover at speed 1 in the
/// Maxwell limit); otherwise B = B0 only and the pulse splits.
GridState1D init_pulse(const Grid1D& grid, const LagrangianModel& model,
                       const Vec3& B0, const PulseProfile& pulse,
                       const Vec3& polarization, bool paired,
                       bool staggered = true);

/// Exact travelling-wave initial data sampled from the ansatz at t = 0.
GridState1D init_ansatz(const Grid1D& grid, const LagrangianModel& model,
                        const AnsatzSpec& spec, bool staggered = true);

/// Cell-center collocated view of the state (B averaged from faces when
/// staggered, E from the constitutive inversion).
struct CenterFields {
  Eigen::ArrayXd Ex, Ey, Ez;
  Eigen::ArrayXd Bx, By;
};

class Stepper {
 public:
  /// dt = cfl * dz; throws CFLViolation beyond the scheme's stability bound.
  Stepper(const LagrangianModel& model, GridState1D state, Scheme scheme,
          double cfl);

  void step();

  /// Stepper that walks the leapfrog recurrence backward from the current
  /// pair of time levels; n forward steps are undone by n-1 backward steps.
  Stepper reversed() const;

  const GridState1D& state() const { return curr_; }
  const LagrangianModel& model() const { return model_; }
  Scheme scheme() const { return scheme_; }
  double dt() const { return dt_; }
  long steps_taken() const { return steps_; }

  CenterFields center_fields();
  /// Energy density u = E.D - L per cell center.
  Eigen::ArrayXd energy_density_array();
  /// Total energy, sum of the density over cells times dz.
  double total_energy();

  double mean_newton_iterations() const {
    return inversions_ > 0 ? static_cast<double>(newton_iters_) / inversions_ : 0.0;
  }

 private:
  struct Fields {
    Eigen::ArrayXd Dx, Dy, Bx, By;
  };

  Fields rhs(const Fields& f);
  void step_leapfrog();
  void step_lax_friedrichs();
  void invert_centers(const Fields& f, Eigen::ArrayXd& ex, Eigen::ArrayXd& ey,
                      Eigen::ArrayXd& ez, bool count);
  void center_b(const Fields& f, Eigen::ArrayXd& bx, Eigen::ArrayXd& by) const;

  LagrangianModel model_;
  Scheme scheme_;
  double dt_;
  GridState1D curr_;
  Fields prev_;  // previous time level (leapfrog)
  bool have_prev_ = false;
  long steps_ = 0;
  long newton_iters_ = 0;
  long inversions_ = 0;
};

struct Snapshot {
  double t = 0.0;
  Eigen::ArrayXd Dx, Dy, Bx, By;  // cell centers (B averaged when staggered)
  Eigen::ArrayXd Ex, Ey, Ez;
  Eigen::ArrayXd energy;  // density per cell
  double total_energy = 0.0;
  double max_abs_E = 0.0;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  long steps = 0;
  double mean_newton_iterations = 0.0;
};

Snapshot take_snapshot(Stepper& stepper);

/// Advance to t_end, recording a snapshot every record_every steps (always
/// including the initial and final states). The observer, when given, runs
/// after every step; returning false stops the run early.
Trajectory run(Stepper& stepper, double t_end, long record_every,
               const std::function<bool(Stepper&)>& observer = {});

struct SolverConfig {
  double cfl = 0.5;  // dt = cfl * dz, against the universal speed bound 1
  double t_end = 0.0;
  long record_every = 1;
  Scheme scheme = Scheme::LeapfrogFdtd;
};

/// Convenience wrapper: build the stepper for the state and run it.
Trajectory run(const LagrangianModel& model, GridState1D state,
               const SolverConfig& config,
               const std::function<bool(Stepper&)>& observer = {});

}  // namespace nled
