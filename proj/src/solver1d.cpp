#include <nled/solver1d.hpp>

#include <nled/errors.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace nled {

namespace {

void validate_grid(const Grid1D& grid) {
  if (grid.n < 16) throw ConfigError("grid: need at least 16 cells");
  if (!(grid.length > 0.0)) throw ConfigError("grid: length must be positive");
}

/// Dz must be representable as one scalar: the (t, z) reduction keeps it
/// constant, so spatially varying initial data cannot be evolved here.
double uniform_dz(const Eigen::ArrayXd& dz_cells) {
  const double lo = dz_cells.minCoeff();
  const double hi = dz_cells.maxCoeff();
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  if (hi - lo > 1e-10 * scale)
    throw ConfigError(
        "initial data: longitudinal D varies across cells; this reduction "
        "stores Dz as a conserved scalar (use the ansatz initializer)");
  return 0.5 * (lo + hi);
}

}  // namespace

GridState1D init_uniform(const Grid1D& grid, const LagrangianModel& model,
                         const Vec3& B0, bool staggered) {
  validate_grid(grid);
  GridState1D s;
  s.grid = grid;
  s.staggered = staggered;
  const int n = grid.n;
  const Excitation bg = to_DH(model, Vec3::Zero(), B0);
  s.Dx = Eigen::ArrayXd::Constant(n, bg.D.x());
  s.Dy = Eigen::ArrayXd::Constant(n, bg.D.y());
  s.Bx = Eigen::ArrayXd::Constant(n, B0.x());
  s.By = Eigen::ArrayXd::Constant(n, B0.y());
  s.Dz = bg.D.z();
  s.Bz = B0.z();
  s.Ex = Eigen::ArrayXd::Zero(n);
  s.Ey = Eigen::ArrayXd::Zero(n);
  s.Ez = Eigen::ArrayXd::Zero(n);
  return s;
}

namespace {

void check_pulse_support(const Grid1D& grid, const PulseProfile& pulse) {
  if (!(pulse.sigma > 0.0)) throw ConfigError("pulse: sigma must be positive");
  if (pulse.center - 10.0 * pulse.sigma < 0.0 ||
      pulse.center + 10.0 * pulse.sigma > grid.length)
    throw ConfigError("pulse: support (center +- 10 sigma) must fit inside the domain");
}

GridState1D init_from_fields(const Grid1D& grid, const LagrangianModel& model,
                             const std::function<Vec3(double)>& E_of_z,
                             const std::function<Vec3(double)>& B_of_z,
                             bool staggered) {
  GridState1D s;
  s.grid = grid;
  s.staggered = staggered;
  const int n = grid.n;
  s.Dx.resize(n);
  s.Dy.resize(n);
  s.Bx.resize(n);
  s.By.resize(n);
  s.Ex.resize(n);
  s.Ey.resize(n);
  s.Ez.resize(n);
  Eigen::ArrayXd dz_cells(n);
  for (int i = 0; i < n; ++i) {
    const double zc = grid.z_center(i);
    const Vec3 E = E_of_z(zc);
    const Vec3 B = B_of_z(zc);
    const Excitation ex = to_DH(model, E, B);
    s.Dx[i] = ex.D.x();
    s.Dy[i] = ex.D.y();
    dz_cells[i] = ex.D.z();
    s.Ex[i] = E.x();
    s.Ey[i] = E.y();
    s.Ez[i] = E.z();
    const double zb = staggered ? grid.z_face(i) : zc;
    const Vec3 Bb = B_of_z(zb);
    s.Bx[i] = Bb.x();
    s.By[i] = Bb.y();
  }
  s.Dz = uniform_dz(dz_cells);
  s.Bz = B_of_z(0.0).z();  // constant by construction for all initializers
  return s;
}

}  // namespace

GridState1D init_pulse(const Grid1D& grid, const LagrangianModel& model,
                       const Vec3& B0, const PulseProfile& pulse,
                       const Vec3& polarization, bool paired, bool staggered) {
  validate_grid(grid);
  check_pulse_support(grid, pulse);
  if (std::abs(polarization.z()) > 1e-12)
    throw ConfigError("init_pulse: polarization must be orthogonal to the propagation axis");
  const Vec3 pol = polarization.normalized();
  const Vec3 zhat = Vec3::UnitZ();
  auto E_of_z = [&](double z) -> Vec3 { return pol * pulse.value(z); };
  auto B_of_z = [&](double z) -> Vec3 {
    return paired ? Vec3(B0 + zhat.cross(pol) * pulse.value(z)) : B0;
  };
  return init_from_fields(grid, model, E_of_z, B_of_z, staggered);
}

GridState1D init_ansatz(const Grid1D& grid, const LagrangianModel& model,
                        const AnsatzSpec& spec, bool staggered) {
  validate_grid(grid);
  spec.validate();
  check_pulse_support(grid, spec.profile);
  auto E_of_z = [&](double z) { return ansatz_field(spec, 0.0, z).E; };
  auto B_of_z = [&](double z) { return ansatz_field(spec, 0.0, z).B; };
  return init_from_fields(grid, model, E_of_z, B_of_z, staggered);
}

Stepper::Stepper(const LagrangianModel& model, GridState1D state, Scheme scheme,
                 double cfl)
    : model_(model), scheme_(scheme), curr_(std::move(state)) {
  validate_grid(curr_.grid);
  const double limit = scheme == Scheme::LeapfrogFdtd ? 0.5 : 1.0;
  if (cfl < 0.0 || cfl > limit + 1e-12)
    throw CFLViolation("cfl " + std::to_string(cfl) + " outside [0, " +
                       std::to_string(limit) + "] for this scheme (speed-1 bound)");
  if (scheme == Scheme::LaxFriedrichs && curr_.staggered)
    throw ConfigError("LaxFriedrichs expects collocated initial data (staggered = false)");
  if (scheme == Scheme::LeapfrogFdtd && !curr_.staggered)
    throw ConfigError("LeapfrogFdtd expects staggered initial data");
  dt_ = cfl * curr_.grid.dz();
}

void Stepper::center_b(const Fields& f, Eigen::ArrayXd& bx, Eigen::ArrayXd& by) const {
  const int n = curr_.grid.n;
  bx.resize(n);
  by.resize(n);
  if (!curr_.staggered) {
    bx = f.Bx;
    by = f.By;
    return;
  }
  for (int i = 0; i < n; ++i) {
    const int below = (i + n - 1) % n;  // face below center i
    bx[i] = 0.5 * (f.Bx[below] + f.Bx[i]);
    by[i] = 0.5 * (f.By[below] + f.By[i]);
  }
}

void Stepper::invert_centers(const Fields& f, Eigen::ArrayXd& ex, Eigen::ArrayXd& ey,
                             Eigen::ArrayXd& ez, bool count) {
  const int n = curr_.grid.n;
  Eigen::ArrayXd bx, by;
  center_b(f, bx, by);
  ex.resize(n);
  ey.resize(n);
  ez.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 D(f.Dx[i], f.Dy[i], curr_.Dz);
    const Vec3 B(bx[i], by[i], curr_.Bz);
    const Vec3 guess(curr_.Ex[i], curr_.Ey[i], curr_.Ez[i]);
    NewtonStats st;
    Vec3 E;
    try {
      E = invert_DB(model_, D, B, guess, &st);
    } catch (const NoConvergence& e) {
      throw NoConvergence(std::string(e.what()) + " at cell " + std::to_string(i), i);
    }
    ex[i] = E.x();
    ey[i] = E.y();
    ez[i] = E.z();
    curr_.Ex[i] = E.x();
    curr_.Ey[i] = E.y();
    curr_.Ez[i] = E.z();
    if (count) {
      newton_iters_ += st.iterations;
      ++inversions_;
    }
  }
}

Stepper::Fields Stepper::rhs(const Fields& f) {
  const int n = curr_.grid.n;
  const double inv_dz = 1.0 / curr_.grid.dz();

  Eigen::ArrayXd ex, ey, ez;
  invert_centers(f, ex, ey, ez, true);

  // H on faces, from face B and center-averaged E
  Eigen::ArrayXd hx(n), hy(n);
  for (int i = 0; i < n; ++i) {
    const int up = (i + 1) % n;  // center above face i
    const Vec3 Ef(0.5 * (ex[i] + ex[up]), 0.5 * (ey[i] + ey[up]),
                  0.5 * (ez[i] + ez[up]));
    const Vec3 Bf(f.Bx[i], f.By[i], curr_.Bz);
    const Excitation g = to_DH(model_, Ef, Bf);
    hx[i] = g.H.x();
    hy[i] = g.H.y();
  }

  Fields d;
  d.Dx.resize(n);
  d.Dy.resize(n);
  d.Bx.resize(n);
  d.By.resize(n);
  for (int i = 0; i < n; ++i) {
    const int below = (i + n - 1) % n;
    d.Dx[i] = -(hy[i] - hy[below]) * inv_dz;
    d.Dy[i] = (hx[i] - hx[below]) * inv_dz;
  }
  for (int i = 0; i < n; ++i) {
    const int up = (i + 1) % n;
    d.Bx[i] = (ey[up] - ey[i]) * inv_dz;
    d.By[i] = -(ex[up] - ex[i]) * inv_dz;
  }
  return d;
}

void Stepper::step_leapfrog() {
  const Fields cur{curr_.Dx, curr_.Dy, curr_.Bx, curr_.By};
  auto axpy = [](const Fields& a, double s, const Fields& b) {
    return Fields{a.Dx + s * b.Dx, a.Dy + s * b.Dy, a.Bx + s * b.Bx, a.By + s * b.By};
  };

  Fields next;
  if (!have_prev_) {
    // single RK4 bootstrap step; keeps the parasitic leapfrog mode at the
    // O(dt^5) level so the scheme's neutral stability is not spoiled
    const Fields k1 = rhs(cur);
    const Fields k2 = rhs(axpy(cur, 0.5 * dt_, k1));
    const Fields k3 = rhs(axpy(cur, 0.5 * dt_, k2));
    const Fields k4 = rhs(axpy(cur, dt_, k3));
    next = cur;
    next.Dx += dt_ / 6.0 * (k1.Dx + 2.0 * k2.Dx + 2.0 * k3.Dx + k4.Dx);
    next.Dy += dt_ / 6.0 * (k1.Dy + 2.0 * k2.Dy + 2.0 * k3.Dy + k4.Dy);
    next.Bx += dt_ / 6.0 * (k1.Bx + 2.0 * k2.Bx + 2.0 * k3.Bx + k4.Bx);
    next.By += dt_ / 6.0 * (k1.By + 2.0 * k2.By + 2.0 * k3.By + k4.By);
    have_prev_ = true;
  } else {
    next = axpy(prev_, 2.0 * dt_, rhs(cur));
  }
  prev_ = cur;
  curr_.Dx = next.Dx;
  curr_.Dy = next.Dy;
  curr_.Bx = next.Bx;
  curr_.By = next.By;
  curr_.t += dt_;
}

void Stepper::step_lax_friedrichs() {
  // flux form with the local Lax-Friedrichs (Rusanov) interface flux
  // F_{i+1/2} = (f_i + f_{i+1})/2 - (w_{i+1} - w_i)/2, using the universal
  // characteristic bound 1 as the dissipation speed
  const int n = curr_.grid.n;
  const double r = dt_ / curr_.grid.dz();
  const Fields cur{curr_.Dx, curr_.Dy, curr_.Bx, curr_.By};

  Eigen::ArrayXd ex, ey, ez;
  invert_centers(cur, ex, ey, ez, true);
  Eigen::ArrayXd hx(n), hy(n);
  for (int i = 0; i < n; ++i) {
    const Excitation g = to_DH(model_, Vec3(ex[i], ey[i], ez[i]),
                               Vec3(cur.Bx[i], cur.By[i], curr_.Bz));
    hx[i] = g.H.x();
    hy[i] = g.H.y();
  }

  // interface fluxes, index i for the face between cells i and i+1
  Eigen::ArrayXd fdx(n), fdy(n), fbx(n), fby(n);
  for (int i = 0; i < n; ++i) {
    const int p = (i + 1) % n;
    fdx[i] = 0.5 * (hy[i] + hy[p]) - 0.5 * (cur.Dx[p] - cur.Dx[i]);
    fdy[i] = -0.5 * (hx[i] + hx[p]) - 0.5 * (cur.Dy[p] - cur.Dy[i]);
    fbx[i] = -0.5 * (ey[i] + ey[p]) - 0.5 * (cur.Bx[p] - cur.Bx[i]);
    fby[i] = 0.5 * (ex[i] + ex[p]) - 0.5 * (cur.By[p] - cur.By[i]);
  }
  for (int i = 0; i < n; ++i) {
    const int m = (i + n - 1) % n;
    curr_.Dx[i] = cur.Dx[i] - r * (fdx[i] - fdx[m]);
    curr_.Dy[i] = cur.Dy[i] - r * (fdy[i] - fdy[m]);
    curr_.Bx[i] = cur.Bx[i] - r * (fbx[i] - fbx[m]);
    curr_.By[i] = cur.By[i] - r * (fby[i] - fby[m]);
  }
  curr_.t += dt_;
}

void Stepper::step() {
  if (scheme_ == Scheme::LeapfrogFdtd)
    step_leapfrog();
  else
    step_lax_friedrichs();
  ++steps_;
}

Stepper Stepper::reversed() const {
  if (scheme_ != Scheme::LeapfrogFdtd)
    throw ConfigError("reversed(): only the leapfrog scheme is time-reversible");
  if (!have_prev_) throw ConfigError("reversed(): no forward steps taken yet");
  Stepper back(*this);
  back.dt_ = -dt_;
  back.curr_.Dx = prev_.Dx;
  back.curr_.Dy = prev_.Dy;
  back.curr_.Bx = prev_.Bx;
  back.curr_.By = prev_.By;
  back.curr_.t = curr_.t - dt_;
  back.prev_ = Fields{curr_.Dx, curr_.Dy, curr_.Bx, curr_.By};
  back.steps_ = 0;
  return back;
}

CenterFields Stepper::center_fields() {
  const Fields cur{curr_.Dx, curr_.Dy, curr_.Bx, curr_.By};
  CenterFields cf;
  invert_centers(cur, cf.Ex, cf.Ey, cf.Ez, false);
  center_b(cur, cf.Bx, cf.By);
  return cf;
}

Eigen::ArrayXd Stepper::energy_density_array() {
  const CenterFields cf = center_fields();
  const int n = curr_.grid.n;
  Eigen::ArrayXd u(n);
  for (int i = 0; i < n; ++i)
    u[i] = energy_density(model_, Vec3(cf.Ex[i], cf.Ey[i], cf.Ez[i]),
                          Vec3(cf.Bx[i], cf.By[i], curr_.Bz));
  return u;
}

double Stepper::total_energy() { return energy_density_array().sum() * curr_.grid.dz(); }

Snapshot take_snapshot(Stepper& stepper) {
  Snapshot s;
  const GridState1D& st = stepper.state();
  const CenterFields cf = stepper.center_fields();
  s.t = st.t;
  s.Dx = st.Dx;
  s.Dy = st.Dy;
  s.Bx = cf.Bx;
  s.By = cf.By;
  s.Ex = cf.Ex;
  s.Ey = cf.Ey;
  s.Ez = cf.Ez;
  s.energy = stepper.energy_density_array();
  s.total_energy = s.energy.sum() * st.grid.dz();
  s.max_abs_E = std::max({s.Ex.abs().maxCoeff(), s.Ey.abs().maxCoeff(),
                          s.Ez.abs().maxCoeff()});
  return s;
}

Trajectory run(Stepper& stepper, double t_end, long record_every,
               const std::function<bool(Stepper&)>& observer) {
  if (t_end < 0.0) throw ConfigError("run: t_end must be non-negative");
  Trajectory traj;
  traj.snapshots.push_back(take_snapshot(stepper));
  if (t_end == 0.0) return traj;
  if (stepper.dt() <= 0.0) throw ConfigError("run: t_end > 0 requires dt > 0");
  if (record_every < 1) record_every = 1;

  const long n_steps = static_cast<long>(std::ceil(t_end / stepper.dt() - 1e-9));
  bool stopped = false;
  long k = 0;
  for (; k < n_steps && !stopped; ) {
    stepper.step();
    ++k;
    if (k % record_every == 0 && k < n_steps)
      traj.snapshots.push_back(take_snapshot(stepper));
    if (observer && !observer(stepper)) stopped = true;
  }
  traj.snapshots.push_back(take_snapshot(stepper));
  traj.steps = k;
  traj.mean_newton_iterations = stepper.mean_newton_iterations();
  return traj;
}

Trajectory run(const LagrangianModel& model, GridState1D state,
               const SolverConfig& config,
               const std::function<bool(Stepper&)>& observer) {
  Stepper stepper(model, std::move(state), config.scheme, config.cfl);
  return run(stepper, config.t_end, config.record_every, observer);
}

}  // namespace nled
