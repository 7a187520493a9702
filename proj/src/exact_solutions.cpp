#include <nled/exact_solutions.hpp>

#include <nled/errors.hpp>

#include <algorithm>
#include <cmath>

namespace nled {

void AnsatzSpec::validate() const {
  if (!(v > 0.0 && v <= 1.0))
    throw ConfigError("ansatz: phase velocity must lie in (0, 1]");
  if (!std::isfinite(chi)) throw ConfigError("ansatz: chi must be finite");
}

std::pair<double, double> dispersion_coefficients(const LagrangianModel& model,
                                                  double v, double B, double e) {
  if (!(v > 0.0 && v < 1.0))
    throw DomainError("dispersion_coefficients: requires 0 < v < 1 (finite Lorentz factor)");
  const double g2inv = 1.0 - v * v;
  const double g2 = 1.0 / g2inv;
  const double X = -g2inv * e * e - B * B;
  const double Y = -2.0 * B * v * e;
  const LDerivs d = model.eval(X, Y);
  const double c1 = g2 * B * v * d.L_XY + e * d.L_XX;
  const double c2 = d.L_X - 2.0 * e * e * g2inv * d.L_XX - 4.0 * v * B * e * d.L_XY -
                    2.0 * v * v * g2 * B * B * d.L_YY;
  return {c1, c2};
}

EquationResidual field_equation_residual(const LagrangianModel& model,
                                         const AnsatzSpec& spec, double t,
                                         double z, double h) {
  if (!(h > 0.0)) throw ConfigError("field_equation_residual: h must be positive");
  spec.validate();

  const auto starG_at = [&](double tt, double zz) {
    const TwoForm F = ansatz_faraday(spec, tt, zz);
    return hodge(excitation_form(model, F));  // eval throws DomainError outside
  };

  const double inv2h = 0.5 / h;

  const TwoForm F_tp = ansatz_faraday(spec, t + h, z);
  const TwoForm F_tm = ansatz_faraday(spec, t - h, z);
  const TwoForm F_zp = ansatz_faraday(spec, t, z + h);
  const TwoForm F_zm = ansatz_faraday(spec, t, z - h);
  const TwoForm dF_dt = (F_tp - F_tm) * inv2h;
  const TwoForm dF_dz = (F_zp - F_zm) * inv2h;

  const TwoForm sG_tp = starG_at(t + h, z);
  const TwoForm sG_tm = starG_at(t - h, z);
  const TwoForm sG_zp = starG_at(t, z + h);
  const TwoForm sG_zm = starG_at(t, z - h);
  const TwoForm dsG_dt = (sG_tp - sG_tm) * inv2h;
  const TwoForm dsG_dz = (sG_zp - sG_zm) * inv2h;

  return {d_tz(dF_dt, dF_dz).c, d_tz(dsG_dt, dsG_dz).c};
}

RefinementStudy residual_refinement(const LagrangianModel& model,
                                    const AnsatzSpec& spec,
                                    const std::vector<double>& steps) {
  if (steps.size() < 2)
    throw ConfigError("residual_refinement: need at least two stencil steps");

  // asymmetric cloud across the pulse; avoids the profile's symmetry points
  const double u0 = spec.profile.center;
  const double s = spec.profile.sigma;
  const std::vector<double> zs = {u0 - 1.5 * s, u0 - 0.6 * s, u0 + 0.35 * s,
                                  u0 + 0.9 * s, u0 + 1.7 * s};
  const std::vector<double> ts = {0.0, 0.25 * s};

  RefinementStudy study;
  for (double h : steps) {
    RefinementRow row{h, 0.0, 0.0};
    for (double t : ts) {
      for (double z : zs) {
        const EquationResidual r = field_equation_residual(model, spec, t, z, h);
        row.r_F = std::max(row.r_F, r.r_F.lpNorm<Eigen::Infinity>());
        row.r_G = std::max(row.r_G, r.r_G.lpNorm<Eigen::Infinity>());
      }
    }
    study.rows.push_back(row);
  }
  std::sort(study.rows.begin(), study.rows.end(),
            [](const RefinementRow& a, const RefinementRow& b) { return a.h > b.h; });

  // slope of log residual vs log h
  const int n = static_cast<int>(study.rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const RefinementRow& r : study.rows) {
    const double x = std::log(r.h);
    const double y = std::log(std::max(r.norm(), 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  study.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  const double r_coarse = study.rows[n - 2].norm();
  const double r_fine = study.rows[n - 1].norm();
  study.extrapolated = std::abs((4.0 * r_fine - r_coarse) / 3.0);
  return study;
}

}  // namespace nled
