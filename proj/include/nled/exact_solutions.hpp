#pragma once

// Travelling-wave solutions on a constant magnetic background.
//
// The ansatz, with the frame oriented so the wave runs along +z and the
// profile E(u) depends on u = z - v t only:
//
//   F = E(u) (dz - v dt)^dx - Bx dy^dz - By dz^dx - Bz dx^dy + chi E(u) dt^dz
//
// Reading the 2-form back through the forms kernel gives the field point
//
//   E = (-v E(u), 0, chi E(u)),   B = (Bx, By - E(u), Bz).
//
// dF = 0 holds identically; d(star G) = 0 holds exactly for
//   - every family member L = c1 + c2 Y + F(X + l Y^2) when By = 0, with
//       v^2 = (1 + 4 l Bz^2) / (1 + 4 l (Bx^2 + Bz^2)),
//       chi = 4 l Bx Bz v / (1 + 4 l Bz^2),
//   - Born-Infeld for any background, with
//       v^2 = (1 + k^2 Bz^2) / (1 + k^2 |B0|^2),
//       chi = k^2 Bx Bz v / (1 + k^2 Bz^2).
// A generic family member with By != 0 admits no such solution; the residual
// of d(star G) then saturates at an h-independent plateau under stencil
// refinement instead of converging at second order.

#include <nled/constitutive.hpp>
#include <nled/forms.hpp>
#include <nled/lagrangian.hpp>

#include <Eigen/Core>

#include <cmath>
#include <utility>
#include <vector>

namespace nled {

/// Gaussian pulse A exp(-(u - u0)^2 / (2 sigma^2)) with analytic slope.
struct PulseProfile {
  double amplitude = 1.0;
  double center = 0.0;
  double sigma = 1.0;

  double value(double u) const {
    const double s = (u - center) / sigma;
    return amplitude * std::exp(-0.5 * s * s);
  }
  double slope(double u) const {
    const double s = (u - center) / sigma;
    return -amplitude * s / sigma * std::exp(-0.5 * s * s);
  }
};

struct AnsatzSpec {
  PulseProfile profile;
  double v = 1.0;  // phase velocity, in (0, 1]
  double chi = 0.0;
  Vec3 B0 = Vec3::Zero();

  double gamma() const { return 1.0 / std::sqrt(1.0 - v * v); }
  /// subluminal and forward-moving; throws ConfigError otherwise
  void validate() const;
};

struct WaveParams {
  double v;
  double chi;
};

/// v = 1 / sqrt(1 + 4 l B^2): background orthogonal to propagation.
inline double velocity_simple(double lambda, double B) {
  return 1.0 / std::sqrt(1.0 + 4.0 * lambda * B * B);
}

/// Background in the (x, z) plane.
inline WaveParams velocity_coplanar(double lambda, double Bx, double Bz) {
  const double den = 1.0 + 4.0 * lambda * Bz * Bz;
  const double v = std::sqrt(den / (1.0 + 4.0 * lambda * (Bx * Bx + Bz * Bz)));
  return {v, 4.0 * lambda * Bx * Bz * v / den};
}

/// Born-Infeld, arbitrary constant background.
inline WaveParams velocity_BI(double kappa, const Vec3& B0) {
  const double k2 = kappa * kappa;
  const double den = 1.0 + k2 * B0.z() * B0.z();
  const double v = std::sqrt(den / (1.0 + k2 * B0.squaredNorm()));
  return {v, k2 * B0.x() * B0.z() * v / den};
}

/// The (v, chi) candidate the theory prescribes for this background:
/// Maxwell -> light speed, Born-Infeld -> its exact formula, families ->
/// the coplanar formula on (Bx, Bz) (exact when By = 0).
inline WaveParams candidate_wave(const LagrangianModel& model, const Vec3& B0) {
  switch (model.kind()) {
    case ModelKind::Maxwell:
      return {1.0, 0.0};
    case ModelKind::BornInfeld:
      return velocity_BI(model.kappa(), B0);
    default:
      return velocity_coplanar(model.lambda(), B0.x(), B0.z());
  }
}

/// True when candidate_wave is an exact solution for this background.
inline bool has_exact_wave(const LagrangianModel& model, const Vec3& B0) {
  return model.kind() == ModelKind::Maxwell ||
         model.kind() == ModelKind::BornInfeld || B0.y() == 0.0;
}

inline AnsatzSpec make_ansatz(const LagrangianModel& model, const Vec3& B0,
                              const PulseProfile& pulse) {
  const WaveParams w = candidate_wave(model, B0);
  return {pulse, w.v, w.chi, B0};
}

inline TwoForm ansatz_faraday(const AnsatzSpec& spec, double t, double z) {
  const double e = spec.profile.value(z - spec.v * t);
  TwoForm F;
  F.c << -spec.v * e, 0.0, spec.chi * e, -spec.B0.x(), e - spec.B0.y(),
      -spec.B0.z();
  return F;
}

inline FieldPoint ansatz_field(const AnsatzSpec& spec, double t, double z) {
  return to_EB(ansatz_faraday(spec, t, z));
}

/// The two bracketed factors of the plane-wave field equations in the
/// simple geometry (background along x, By = Bz = 0), evaluated at the
/// invariant point X = -(1 - v^2) e^2 - B^2, Y = -2 B v e. Both vanish for
/// every pulse value e exactly when (model, v) are compatible. Requires
/// v in (0, 1): the Lorentz factor diverges at v = 1 (for Maxwell use the
/// residual route instead).
std::pair<double, double> dispersion_coefficients(const LagrangianModel& model,
                                                  double v, double B, double e);

struct EquationResidual {
  Eigen::Vector4d r_F;  // components of dF
  Eigen::Vector4d r_G;  // components of d(star G)
  double norm() const {
    return std::max(r_F.lpNorm<Eigen::Infinity>(), r_G.lpNorm<Eigen::Infinity>());
  }
};

/// Central-difference residual of dF = 0 and d(star G) = 0 at one event,
/// using the 5-point cross stencil (t +- h, z +- h) around (t, z).
EquationResidual field_equation_residual(const LagrangianModel& model,
                                         const AnsatzSpec& spec, double t,
                                         double z, double h);

struct RefinementRow {
  double h;
  double r_F;  // max over the sample cloud of |dF|_inf
  double r_G;  // max over the sample cloud of |d star G|_inf
  double norm() const { return std::max(r_F, r_G); }
};

struct RefinementStudy {
  std::vector<RefinementRow> rows;  // coarse to fine
  double slope = 0.0;         // least-squares slope of log r vs log h
  double extrapolated = 0.0;  // |(4 r_fine - r_coarse) / 3| from the two finest
  bool second_order(double tol = 0.1) const {
    return std::abs(slope - 2.0) <= tol;
  }
};

/// Residuals of (model, spec) over a refinement ladder of stencil steps,
/// sampled on a small (t, z) cloud across the pulse. An exact solution
/// shows slope ~ 2 and extrapolated residual ~ 0; a non-solution plateaus.
RefinementStudy residual_refinement(const LagrangianModel& model,
                                    const AnsatzSpec& spec,
                                    const std::vector<double>& steps);

}  // namespace nled
