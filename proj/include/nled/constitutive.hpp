#pragma once

// The pointwise (E, B) <-> (D, H) map induced by G = 2 (L_X F - L_Y star F):
//
//     D = 2 (L_X E + L_Y B),   H = 2 (L_X B - L_Y E),
//
// together with the damped Newton inverse (D, B) -> E needed by the
// time-domain solver, which evolves D and B but computes fluxes from E and H.
// Everything here is a pure per-point computation with no shared state;
// grid-parallel invocation across cells is safe.

#include <nled/errors.hpp>
#include <nled/forms.hpp>
#include <nled/lagrangian.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace nled {

struct Excitation {
  Vec3 D;
  Vec3 H;
};

inline Excitation to_DH(const LagrangianModel& model, const Vec3& E, const Vec3& B) {
  const auto [X, Y] = invariants(E, B);
  const LDerivs d = model.eval(X, Y);
  return {2.0 * (d.L_X * E + d.L_Y * B), 2.0 * (d.L_X * B - d.L_Y * E)};
}

/// dD/dE at fixed B. Symmetric (it is the E-Hessian of L).
inline Eigen::Matrix3d jacobian_D_of_E(const LagrangianModel& model, const Vec3& E,
                                       const Vec3& B) {
  const auto [X, Y] = invariants(E, B);
  const LDerivs d = model.eval(X, Y);
  Eigen::Matrix3d J = 2.0 * d.L_X * Eigen::Matrix3d::Identity();
  const Vec3 gx = d.L_XX * E + d.L_XY * B;  // grad of L_X wrt E, over 2
  const Vec3 gy = d.L_XY * E + d.L_YY * B;  // grad of L_Y wrt E, over 2
  J += 4.0 * gx * E.transpose();
  J += 4.0 * gy * B.transpose();
  return J;
}

/// Energy (Hamiltonian) density u = E.D - L. Conserved with Poynting flux
/// E x H by the field equations; reduces to (E^2 + B^2)/2 for Maxwell.
inline double energy_density(const LagrangianModel& model, const Vec3& E,
                             const Vec3& B) {
  const auto [X, Y] = invariants(E, B);
  const LDerivs d = model.eval(X, Y);
  return 2.0 * (d.L_X * E + d.L_Y * B).dot(E) - d.L;
}

struct NewtonStats {
  int iterations = 0;
  int halvings = 0;
  double residual = 0.0;
  double first_step_scale = 1.0;  // damping factor of the first accepted step
  bool record_history = false;    // opt-in: fill `residuals` per accepted step
  std::vector<double> residuals;
};

namespace detail {
inline bool point_in_domain(const LagrangianModel& model, const Vec3& E, const Vec3& B) {
  const auto [X, Y] = invariants(E, B);
  return model.in_domain(X, Y);
}
}  // namespace detail

/// Solve to_DH(model, E, B).D == D for E at fixed B. Damped Newton with
/// backtracking halving; each accepted step strictly decreases the residual.
/// The guess is used if it lies in the model domain, otherwise E = 0 (which
/// is in the domain of every built-in model for any B with 1 + k^2 B^2 > 0).
inline Vec3 invert_DB(const LagrangianModel& model, const Vec3& D, const Vec3& B,
                      const Vec3& guess, NewtonStats* stats = nullptr) {
  constexpr int kMaxIterations = 50;
  constexpr int kMaxHalvings = 40;
  const double tol = 1e-12 * std::max(1.0, D.lpNorm<Eigen::Infinity>());

  if (model.kind() == ModelKind::Maxwell) {
    if (stats) {
      NewtonStats st;
      st.iterations = 1;
      *stats = st;
    }
    return D;  // D = E exactly
  }

  Vec3 E = detail::point_in_domain(model, guess, B) ? guess : Vec3::Zero();
  Vec3 R = to_DH(model, E, B).D - D;
  double res = R.lpNorm<Eigen::Infinity>();
  NewtonStats st;
  if (stats) st.record_history = stats->record_history;
  if (st.record_history) st.residuals.push_back(res);

  for (int it = 0; it < kMaxIterations; ++it) {
    if (res <= tol) {
      st.residual = res;
      if (stats) *stats = st;
      return E;
    }
    ++st.iterations;
    const Eigen::Matrix3d J = jacobian_D_of_E(model, E, B);
    const Vec3 dE = J.colPivHouseholderQr().solve(-R);

    double s = 1.0;
    bool accepted = false;
    bool any_in_domain = false;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      const Vec3 E_try = E + s * dE;
      if (detail::point_in_domain(model, E_try, B)) {
        any_in_domain = true;
        const Vec3 R_try = to_DH(model, E_try, B).D - D;
        const double res_try = R_try.lpNorm<Eigen::Infinity>();
        if (res_try < res) {
          E = E_try;
          R = R_try;
          res = res_try;
          accepted = true;
          if (st.iterations == 1) st.first_step_scale = s;
          if (st.record_history) st.residuals.push_back(res);
          break;
        }
      }
      s *= 0.5;
      ++st.halvings;
    }
    if (!accepted) {
      if (!any_in_domain)
        throw DomainError("invert_DB: Newton direction leaves the model domain at every damping level");
      throw NoConvergence("invert_DB: line search found no residual decrease (residual " +
                          std::to_string(res) + ")");
    }
  }
  if (res <= tol) {
    st.residual = res;
    if (stats) *stats = st;
    return E;
  }
  throw NoConvergence("invert_DB: no convergence after 50 iterations (residual " +
                      std::to_string(res) + ")");
}

}  // namespace nled
