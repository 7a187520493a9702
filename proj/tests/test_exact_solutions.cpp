#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nled/errors.hpp>
#include <nled/exact_solutions.hpp>

#include "oracles.hpp"

#include <cmath>

using namespace nled;

namespace {

PulseProfile test_pulse(double amplitude) { return {amplitude, 0.0, 1.0}; }

const std::vector<double> kSteps = {1e-2, 5e-3, 2.5e-3};

}  // namespace

TEST_CASE("velocity formulas: pinned values") {
  CHECK(velocity_simple(0.0, 3.0) == 1.0);
  CHECK(velocity_simple(0.25, 1.0) == doctest::Approx(0.7071067812).epsilon(1e-9));

  const WaveParams cp = velocity_coplanar(0.25, 1.0, 1.0);
  CHECK(cp.v * cp.v == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(cp.v == doctest::Approx(0.8164966).epsilon(1e-7));
  CHECK(cp.chi == doctest::Approx(cp.v / 2.0).epsilon(1e-14));

  // background parallel to propagation has no effect
  const WaveParams par = velocity_coplanar(0.25, 0.0, 2.0);
  CHECK(par.v == 1.0);
  CHECK(par.chi == 0.0);

  // Bz = 0 reduces to the simple formula
  const WaveParams perp = velocity_coplanar(0.3, 1.4, 0.0);
  CHECK(perp.v == doctest::Approx(velocity_simple(0.3, 1.4)).epsilon(1e-15));
  CHECK(perp.chi == 0.0);

  const WaveParams bi = velocity_BI(1.0, Vec3(1, 1, 1));
  CHECK(bi.v * bi.v == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bi.v == doctest::Approx(0.7071068).epsilon(1e-7));
  CHECK(bi.chi == doctest::Approx(0.3535534).epsilon(1e-7));

  const WaveParams zero = velocity_BI(0.8, Vec3::Zero());
  CHECK(zero.v == 1.0);
  CHECK(zero.chi == 0.0);
}

TEST_CASE("velocity_BI with By = 0 equals velocity_coplanar at kappa^2 = 4 lambda") {
  // kappa = 1, lambda = 1/4: the two formulas are bitwise identical here
  const WaveParams a = velocity_BI(1.0, Vec3(1.3, 0.0, 0.7));
  const WaveParams b = velocity_coplanar(0.25, 1.3, 0.7);
  CHECK(a.v == b.v);
  CHECK(a.chi == b.chi);

  oracle::Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const double kappa = rng.uniform(0.2, 2.0);
    const double bx = rng.uniform(-2, 2), bz = rng.uniform(-2, 2);
    const WaveParams u = velocity_BI(kappa, Vec3(bx, 0.0, bz));
    const WaveParams w = velocity_coplanar(0.25 * kappa * kappa, bx, bz);
    CHECK(u.v == doctest::Approx(w.v).epsilon(1e-14));
    CHECK(u.chi == doctest::Approx(w.chi).epsilon(1e-13));
  }
}

TEST_CASE("subluminal propagation for any parameters") {
  oracle::Rng rng(35);
  for (int trial = 0; trial < 500; ++trial) {
    const double lambda = rng.uniform(0.0, 3.0);
    const double kappa = rng.uniform(1e-3, 3.0);
    const Vec3 B0 = rng.vec3(-3, 3);
    const double v1 = velocity_simple(lambda, B0.x());
    const WaveParams v2 = velocity_coplanar(lambda, B0.x(), B0.z());
    const WaveParams v3 = velocity_BI(kappa, B0);
    for (double v : {v1, v2.v, v3.v}) {
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("pulse profile: compact support and analytic slope") {
  const PulseProfile p{0.7, 2.0, 0.3};
  CHECK(std::abs(p.value(p.center + 10.0 * p.sigma)) < 1e-14 * p.amplitude);
  CHECK(std::abs(p.value(p.center - 10.0 * p.sigma)) < 1e-14 * p.amplitude);
  oracle::Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const double u = rng.uniform(p.center - 3.0, p.center + 3.0);
    const double fd = oracle::fd_best([&](double x) { return p.value(x); }, u);
    CHECK(std::abs(p.slope(u) - fd) <= 1e-8 * std::max(1.0, std::abs(p.slope(u))));
  }
}

TEST_CASE("ansatz field readout") {
  AnsatzSpec spec;
  spec.profile = test_pulse(0.2);
  spec.v = 0.8;
  spec.chi = 0.1;
  spec.B0 = Vec3(1.0, 0.4, 0.7);

  // zero profile leaves the pure background
  AnsatzSpec bg = spec;
  bg.profile.amplitude = 0.0;
  const FieldPoint f0 = ansatz_field(bg, 0.3, 1.2);
  CHECK(f0.E.isZero(0.0));
  CHECK(f0.B == spec.B0);

  // component pattern at a generic event
  const double t = 0.37, z = 0.52;
  const double e = spec.profile.value(z - spec.v * t);
  const FieldPoint f = ansatz_field(spec, t, z);
  CHECK(f.E.x() == doctest::Approx(-spec.v * e).epsilon(1e-15));
  CHECK(f.E.y() == 0.0);
  CHECK(f.E.z() == doctest::Approx(spec.chi * e).epsilon(1e-15));
  CHECK(f.B.x() == spec.B0.x());
  CHECK(f.B.y() == doctest::Approx(spec.B0.y() - e).epsilon(1e-15));
  CHECK(f.B.z() == spec.B0.z());

  // the readout is exactly the kernel decomposition of the 2-form
  const TwoForm F = ansatz_faraday(spec, t, z);
  const auto [E, B] = to_EB(F);
  CHECK(E == f.E);
  CHECK(B == f.B);

  // travelling-wave property: (t, z) -> (t + d, z + v d) is invariant
  oracle::Rng rng(39);
  for (int trial = 0; trial < 50; ++trial) {
    const double tt = rng.uniform(-2, 2), zz = rng.uniform(-2, 2),
                 d = rng.uniform(-1, 1);
    const FieldPoint a = ansatz_field(spec, tt, zz);
    const FieldPoint b = ansatz_field(spec, tt + d, zz + spec.v * d);
    CHECK((a.E - b.E).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((a.B - b.B).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("simple geometry: wave E parallel to background, Poynting along +z") {
  AnsatzSpec spec;
  spec.profile = test_pulse(0.3);
  spec.v = velocity_simple(0.25, 1.0);
  spec.chi = 0.0;
  spec.B0 = Vec3(1.0, 0.0, 0.0);
  const FieldPoint f = ansatz_field(spec, 0.0, 0.4);
  CHECK(f.E.y() == 0.0);
  CHECK(f.E.z() == 0.0);  // chi = 0: E purely along the background axis
  const Vec3 B_wave = f.B - spec.B0;
  CHECK(B_wave.x() == 0.0);
  CHECK(B_wave.z() == 0.0);
  CHECK(f.E.cross(B_wave).z() > 0.0);  // energy flows along +z
}

TEST_CASE("dispersion coefficients") {
  const auto duality = LagrangianModel::duality_family(0.25);
  const double B = 0.8;
  const double v = velocity_simple(0.25, B);

  // at the family's own phase velocity both coefficients vanish for every e
  for (double e = -0.5; e <= 0.5001; e += 0.125) {
    const auto [c1, c2] = dispersion_coefficients(duality, v, B, e);
    CHECK(std::abs(c1) <= 1e-12);
    CHECK(std::abs(c2) <= 1e-12);
  }

  // same for a polynomial tail with the same lambda (family degeneracy)
  const auto fam = LagrangianModel::general_family(0.25, {1.0});
  for (double e = -0.4; e <= 0.4001; e += 0.2) {
    const auto [c1, c2] = dispersion_coefficients(fam, v, B, e);
    CHECK(std::abs(c1) <= 1e-12);
    CHECK(std::abs(c2) <= 1e-12);
  }

  // a wrong speed leaves at least one coefficient nonzero
  const auto [w1, w2] = dispersion_coefficients(duality, 0.9 * v, B, 0.3);
  CHECK(std::max(std::abs(w1), std::abs(w2)) > 1e-4);

  // the Lorentz factor diverges at v = 1; that case is handled by the
  // residual route (Maxwell below)
  CHECK_THROWS_AS(dispersion_coefficients(duality, 1.0, B, 0.1), DomainError);
}

TEST_CASE("superluminal ansatz specs are rejected") {
  AnsatzSpec bad;
  bad.profile = test_pulse(0.1);
  bad.v = 1.5;
  CHECK_THROWS_AS(field_equation_residual(LagrangianModel::maxwell(), bad, 0, 0, 1e-3),
                  ConfigError);
}

TEST_CASE("Maxwell: the v = 1 ansatz solves both equations on any background") {
  const auto mx = LagrangianModel::maxwell();
  AnsatzSpec spec = make_ansatz(mx, Vec3(0.3, 0.2, 0.5), test_pulse(0.1));
  CHECK(spec.v == 1.0);
  CHECK(spec.chi == 0.0);
  const EquationResidual r = field_equation_residual(mx, spec, 0.1, 0.4, 1e-3);
  CHECK(r.r_F.lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK(r.r_G.lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("coplanar background: every family member converges at second order") {
  const Vec3 B0(1.0, 0.0, 1.0);
  const std::vector<LagrangianModel> members = {
      LagrangianModel::duality_family(0.25),
      LagrangianModel::general_family(0.25, {0.1}),
      LagrangianModel::general_family(0.25, {1.0})};
  const WaveParams expect = velocity_coplanar(0.25, 1.0, 1.0);
  for (const auto& m : members) {
    const AnsatzSpec spec = make_ansatz(m, B0, test_pulse(0.1));
    CHECK(spec.v == expect.v);  // same (v, chi) for the whole family
    CHECK(spec.chi == expect.chi);
    const RefinementStudy study = residual_refinement(m, spec, kSteps);
    INFO("model ", m.id(), " slope ", study.slope);
    CHECK(study.second_order(0.1));
  }
}

TEST_CASE("Born-Infeld solves the non-coplanar case; a generic member does not") {
  const auto bi = LagrangianModel::born_infeld(1.0);
  const Vec3 B_nc(1.0, 0.7, 1.0);

  const RefinementStudy bi_study =
      residual_refinement(bi, make_ansatz(bi, B_nc, test_pulse(0.1)), kSteps);
  CHECK(bi_study.second_order(0.1));

  // family member with the matched lambda: candidate (v, chi) from the
  // coplanar formula, residual saturates at a plateau instead of converging
  const auto fam = LagrangianModel::general_family(0.25, {1.0});
  const RefinementStudy fam_study =
      residual_refinement(fam, make_ansatz(fam, B_nc, test_pulse(0.1)), kSteps);
  CHECK(!fam_study.second_order(0.5));  // nowhere near second order
  CHECK(std::abs(fam_study.slope) < 0.3);
  CHECK(fam_study.extrapolated >= 1e3 * bi_study.extrapolated);

  // the same member with By = 0.5 (spec'd non-coplanar obstruction case)
  const Vec3 B_mid(1.0, 0.5, 1.0);
  const RefinementStudy mid =
      residual_refinement(fam, make_ansatz(fam, B_mid, test_pulse(0.1)), kSteps);
  const RefinementStudy bi_mid =
      residual_refinement(bi, make_ansatz(bi, B_mid, test_pulse(0.1)), kSteps);
  CHECK(mid.extrapolated >= 1e3 * bi_mid.extrapolated);
}

TEST_CASE("route consistency: algebraic coefficients vs residual refinement") {
  // simple geometry (background along x only) where both routes apply
  const double B = 0.8;
  const std::vector<LagrangianModel> models = {
      LagrangianModel::duality_family(0.25),
      LagrangianModel::general_family(0.25, {1.0}),
      LagrangianModel::born_infeld(1.0)};
  for (const auto& m : models) {
    const Vec3 B0(B, 0.0, 0.0);
    const AnsatzSpec good = make_ansatz(m, B0, test_pulse(0.1));

    double cmax = 0.0;
    for (double e = -0.3; e <= 0.3001; e += 0.15) {
      const auto [c1, c2] = dispersion_coefficients(m, good.v, B, e);
      cmax = std::max({cmax, std::abs(c1), std::abs(c2)});
    }
    const RefinementStudy ok = residual_refinement(m, good, kSteps);
    CHECK(cmax <= 1e-12);
    CHECK(ok.second_order(0.1));

    AnsatzSpec bad = good;
    bad.v = 0.9 * good.v;
    double cbad = 0.0;
    for (double e = -0.3; e <= 0.3001; e += 0.15) {
      const auto [c1, c2] = dispersion_coefficients(m, bad.v, B, e);
      cbad = std::max({cbad, std::abs(c1), std::abs(c2)});
    }
    const RefinementStudy wrong = residual_refinement(m, bad, kSteps);
    CHECK(cbad > 1e-6);
    CHECK(!wrong.second_order(0.5));
  }
}
