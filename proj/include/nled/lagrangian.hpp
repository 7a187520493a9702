#pragma once

// Electromagnetic Lagrangians L(X, Y) with analytic first and second
// partial derivatives.
//
// Built-in theories:
//   Maxwell              L = X/2
//   BornInfeld(kappa)    L = (1 - sqrt(1 - k^2 X - k^4 Y^2 / 4)) / k^2
//   DualityFamily(l)     L = F(X + l Y^2),  F(xi) = (1 - sqrt(1 - 4 l xi)) / (4 l)
//   GeneralFamily(l, a)  L = c1 + c2 Y + F(X + l Y^2),
//                        F(xi) = xi/2 + a2 xi^2 + a3 xi^3 + ...
//
// BornInfeld(kappa) and DualityFamily(kappa^2/4) are the same theory:
// 1 - k^2 (X + k^2 Y^2 / 4) = 1 - k^2 X - k^4 Y^2 / 4.
//
// Models are immutable after construction and evaluation is pure, so they
// may be shared across threads freely.

#include <nled/errors.hpp>
#include <nled/forms.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace nled {

struct LDerivs {
  double L;
  double L_X, L_Y;
  double L_XX, L_XY, L_YY;
};

enum class ModelKind { Maxwell, BornInfeld, DualityFamily, GeneralFamily };

/// The duality-selected profile F(xi) = (1 - sqrt(1 - 4 l xi)) / (4 l),
/// normalized so that F(xi) ~ xi/2 for weak fields. Defined for xi < 1/(4 l).
struct DualityProfile {
  double lambda;

  double root(double xi) const { return 1.0 - 4.0 * lambda * xi; }

  double operator()(double xi) const {
    const double r = root(xi);
    if (r <= 0.0) throw DomainError("duality profile: 1 - 4*lambda*xi <= 0");
    return (1.0 - std::sqrt(r)) / (4.0 * lambda);
  }
  double d1(double xi) const { return 0.5 / std::sqrt(root(xi)); }
  double d2(double xi) const { return lambda / std::pow(root(xi), 1.5); }
};

inline DualityProfile duality_F(double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("duality_F requires lambda > 0");
  return DualityProfile{lambda};
}

class LagrangianModel {
 public:
  static LagrangianModel maxwell() { return LagrangianModel(ModelKind::Maxwell); }

  static LagrangianModel born_infeld(double kappa) {
    if (!(kappa > 0.0)) throw ConfigError("BornInfeld requires kappa > 0");
    LagrangianModel m(ModelKind::BornInfeld);
    m.kappa_ = kappa;
    m.lambda_ = 0.25 * kappa * kappa;
    return m;
  }

  static LagrangianModel duality_family(double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("DualityFamily requires lambda > 0");
    LagrangianModel m(ModelKind::DualityFamily);
    m.lambda_ = lambda;
    return m;
  }

  /// tail[k] multiplies xi^(k+2); the linear part xi/2 is implicit.
  static LagrangianModel general_family(double lambda, std::vector<double> tail,
                                        double c1 = 0.0, double c2 = 0.0) {
    if (!(lambda >= 0.0)) throw ConfigError("GeneralFamily requires lambda >= 0");
    LagrangianModel m(ModelKind::GeneralFamily);
    m.lambda_ = lambda;
    m.tail_ = std::move(tail);
    m.c1_ = c1;
    m.c2_ = c2;
    return m;
  }

  ModelKind kind() const { return kind_; }
  double kappa() const { return kappa_; }
  /// Family coupling; BornInfeld reports the equivalent kappa^2/4.
  double lambda() const { return lambda_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  const std::vector<double>& tail() const { return tail_; }

  /// Field strength at which nonlinearities turn on, max(kappa, 2 sqrt(lambda)).
  /// Used to pick default pulse amplitudes; 1 for Maxwell.
  double coupling_scale() const {
    const double s = std::max(kappa_, 2.0 * std::sqrt(std::max(lambda_, 0.0)));
    return s > 0.0 ? s : 1.0;
  }

  /// Positive inside the model's validity region, <= 0 outside.
  /// Polynomial families are entire, so the margin is +inf.
  double domain_margin(double X, double Y) const {
    switch (kind_) {
      case ModelKind::BornInfeld:
        return 1.0 - kappa_ * kappa_ * X -
               0.25 * std::pow(kappa_, 4) * Y * Y;
      case ModelKind::DualityFamily:
        return 1.0 - 4.0 * lambda_ * (X + lambda_ * Y * Y);
      default:
        return std::numeric_limits<double>::infinity();
    }
  }

  bool in_domain(double X, double Y) const { return domain_margin(X, Y) > 0.0; }

  LDerivs eval(double X, double Y) const {
    switch (kind_) {
      case ModelKind::Maxwell:
        return {0.5 * X, 0.5, 0.0, 0.0, 0.0, 0.0};
      case ModelKind::BornInfeld: {
        const double k2 = kappa_ * kappa_;
        const double W = 1.0 - k2 * X - 0.25 * k2 * k2 * Y * Y;
        if (W <= 0.0)
          throw DomainError("BornInfeld: field strength beyond 1/kappa (root argument <= 0)");
        const double rw = std::sqrt(W);
        LDerivs d;
        d.L = (1.0 - rw) / k2;
        d.L_X = 0.5 / rw;
        d.L_Y = 0.25 * k2 * Y / rw;
        d.L_XX = 0.25 * k2 / (W * rw);
        d.L_XY = 0.125 * k2 * k2 * Y / (W * rw);
        d.L_YY = 0.25 * k2 / rw + 0.0625 * k2 * k2 * k2 * Y * Y / (W * rw);
        return d;
      }
      case ModelKind::DualityFamily: {
        const double xi = X + lambda_ * Y * Y;
        const double r = 1.0 - 4.0 * lambda_ * xi;
        if (r <= 0.0)
          throw DomainError("DualityFamily: 1 - 4*lambda*xi <= 0");
        const double rw = std::sqrt(r);
        const double f = (1.0 - rw) / (4.0 * lambda_);
        const double f1 = 0.5 / rw;
        const double f2 = lambda_ / (r * rw);
        return chain_rule(Y, f, f1, f2);
      }
      case ModelKind::GeneralFamily: {
        const double xi = X + lambda_ * Y * Y;
        double f = 0.5 * xi, f1 = 0.5, f2 = 0.0;
        double xin2 = 1.0;  // xi^(n-2) for the term a_n xi^n
        for (std::size_t k = 0; k < tail_.size(); ++k) {
          const double n = static_cast<double>(k + 2);
          const double a = tail_[k];
          f2 += a * n * (n - 1.0) * xin2;
          f1 += a * n * xin2 * xi;
          f += a * xin2 * xi * xi;
          xin2 *= xi;
        }
        LDerivs d = chain_rule(Y, f, f1, f2);
        d.L += c1_ + c2_ * Y;
        d.L_Y += c2_;
        return d;
      }
    }
    throw std::logic_error("unreachable model kind");
  }

  /// Short human-readable identifier for CSV rows and reports.
  std::string id() const {
    switch (kind_) {
      case ModelKind::Maxwell:
        return "maxwell";
      case ModelKind::BornInfeld:
        return "bi(kappa=" + trim_num(kappa_) + ")";
      case ModelKind::DualityFamily:
        return "duality(lambda=" + trim_num(lambda_) + ")";
      case ModelKind::GeneralFamily: {
        std::string s = "family(lambda=" + trim_num(lambda_);
        for (std::size_t k = 0; k < tail_.size(); ++k)
          s += ",a" + std::to_string(k + 2) + "=" + trim_num(tail_[k]);
        if (c1_ != 0.0) s += ",c1=" + trim_num(c1_);
        if (c2_ != 0.0) s += ",c2=" + trim_num(c2_);
        return s + ")";
      }
    }
    return "?";
  }

 private:
  explicit LagrangianModel(ModelKind k) : kind_(k) {}

  /// L = F(xi), xi = X + lambda Y^2, given F and its first two derivatives.
  LDerivs chain_rule(double Y, double f, double f1, double f2) const {
    LDerivs d;
    const double l = lambda_;
    d.L = f;
    d.L_X = f1;
    d.L_Y = 2.0 * l * Y * f1;
    d.L_XX = f2;
    d.L_XY = 2.0 * l * Y * f2;
    d.L_YY = 2.0 * l * f1 + 4.0 * l * l * Y * Y * f2;
    return d;
  }

  static std::string trim_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
  }

  ModelKind kind_;
  double kappa_ = 0.0;
  double lambda_ = 0.0;
  double c1_ = 0.0;
  double c2_ = 0.0;
  std::vector<double> tail_;
};

/// Excitation 2-form G = 2 (L_X F - L_Y star F).
inline TwoForm excitation_form(const LagrangianModel& model, const TwoForm& F) {
  const auto [E, B] = to_EB(F);
  const auto [X, Y] = invariants(E, B);
  const LDerivs d = model.eval(X, Y);
  return 2.0 * d.L_X * F - 2.0 * d.L_Y * hodge(F);
}

/// star(F^F) - star(G^G), the quantity that must be constant in field space
/// for a duality-invariant theory (and zero on the family containing G = F).
/// Computed through the forms kernel.
inline double duality_residual(const LagrangianModel& model, const Vec3& E,
                               const Vec3& B) {
  const TwoForm F = from_EB(E, B);
  const TwoForm G = excitation_form(model, F);
  return hodge(wedge22(F, F)) - hodge(wedge22(G, G));
}

/// SO(2) duality rotation of the pair (F, star G).
inline std::pair<TwoForm, TwoForm> duality_rotate(const TwoForm& F,
                                                  const TwoForm& starG,
                                                  double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  return {c * F + s * starG, -s * F + c * starG};
}

}  // namespace nled
