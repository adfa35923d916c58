#include "qmetro/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmetro {
namespace {

constexpr double kCrossover = 350.0;

void require_xx(const SystemParams& p) {
  p.validate();
  if (p.interaction != InteractionKind::XX) {
    std::ostringstream os;
    os << "closed-form steady state exists only for the XX interaction (got "
       << to_string(p.interaction)
       << "); for XZ the steady probe is maximally mixed and all steady QFIs vanish";
    fail(ErrorCode::InvalidArgument, os.str());
  }
}

double population_splitting(const SystemParams& p) {
  const DecayRates r = decay_rates(p);
  const double sum = r.up + r.down;
  const double omega = 4.0 * (p.omega_a * p.omega_a + p.omega_p * p.omega_p);
  return 4.0 * (r.up - r.down) * p.omega_a * p.omega_p /
         (sum * (8.0 * p.g * p.g + sum * sum + omega));
}

void fill_direct(const SystemParams& p, SteadyStateClosedForm& c) {
  const double x = p.omega_a / p.temperature;
  const double g2 = p.g * p.g;
  const double y2 = p.gamma * p.gamma;
  const double wa = p.omega_a;
  const double wp = p.omega_p;
  const double t = p.temperature;
  const double ch = std::cosh(x);
  const double sh = std::sinh(x);
  const double th = std::tanh(0.5 * x);

  c.omega_cap = 4.0 * (wa * wa + wp * wp);
  const double base = (y2 + 8.0 * g2 + c.omega_cap) * ch + y2 - 8.0 * g2 - c.omega_cap;
  c.chi = base * base;
  c.xi = (3.0 * y2 + 8.0 * g2 + c.omega_cap) * ch;
  c.lambda_cap =
      2.0 * wa * (3.0 * y2 - 8.0 * g2 + c.xi - c.omega_cap) +
      2.0 * t * sh *
          ((y2 + 8.0 * g2 + 4.0 * wp * wp - 4.0 * wa * wa) * ch + y2 - 8.0 * g2 +
           4.0 * wa * wa - 4.0 * wp * wp);

  c.a_T = 4.0 * wa * wa * wp * th * th * (3.0 * y2 - 8.0 * g2 + c.xi - c.omega_cap) /
          (t * t * c.chi);
  // e^{-x} (e^x - 1)^2 sech^2(x/2) = 4 tanh^2(x/2)
  c.a_wA = -wp * 4.0 * th * th * c.lambda_cap / (2.0 * t * c.chi);
  c.a_gamma = 4.0 * p.gamma * wa * wp * (std::sinh(2.0 * x) - 2.0 * sh) / c.chi;
  c.scaled = false;
}

void fill_scaled(const SystemParams& p, SteadyStateClosedForm& c) {
  const double x = p.omega_a / p.temperature;
  const double g2 = p.g * p.g;
  const double y2 = p.gamma * p.gamma;
  const double wa = p.omega_a;
  const double wp = p.omega_p;
  const double t = p.temperature;
  const double e1 = std::exp(-x);
  const double e2 = e1 * e1;
  const double ch = 0.5 * (1.0 + e2);  // cosh(x) e^{-x}
  const double sh = 0.5 * (1.0 - e2);  // sinh(x) e^{-x}
  const double th = std::tanh(0.5 * x);

  c.omega_cap = 4.0 * (wa * wa + wp * wp);
  const double base = (y2 + 8.0 * g2 + c.omega_cap) * ch + (y2 - 8.0 * g2 - c.omega_cap) * e1;
  c.chi = base * base;
  c.xi = (3.0 * y2 + 8.0 * g2 + c.omega_cap) * ch;
  const double bracket = (3.0 * y2 - 8.0 * g2 - c.omega_cap) * e2 + c.xi * e1;
  c.lambda_cap = 2.0 * wa * bracket +
                 2.0 * t * sh *
                     ((y2 + 8.0 * g2 + 4.0 * wp * wp - 4.0 * wa * wa) * ch +
                      (y2 - 8.0 * g2 + 4.0 * wa * wa - 4.0 * wp * wp) * e1);

  c.a_T = 4.0 * wa * wa * wp * th * th * bracket / (t * t * c.chi);
  c.a_wA = -wp * 4.0 * th * th * c.lambda_cap / (2.0 * t * c.chi);
  // (sinh 2x - 2 sinh x) e^{-2x}
  const double hyper = 0.5 * (1.0 - e2 * e2) - 2.0 * sh * e1;
  c.a_gamma = 4.0 * p.gamma * wa * wp * hyper / c.chi;
  c.scaled = true;
}

// Derivatives of the population splitting by the chain rule through the
// occupation number, used to validate the hyperbolic forms.
struct ChainRule {
  double d_T, d_wA, d_gamma;
};

ChainRule chain_rule(const SystemParams& p) {
  const double n = thermal_occupation(p.omega_a, p.temperature).n_th;
  const double s = 2.0 * n + 1.0;
  const double k = 4.0 * p.omega_a * p.omega_p;
  const double omega = 4.0 * (p.omega_a * p.omega_a + p.omega_p * p.omega_p);
  const double y2 = p.gamma * p.gamma;
  const double q = 8.0 * p.g * p.g + y2 * s * s + omega;
  // delta = -k / (s q)
  const double d_ds = k * (q + 2.0 * y2 * s * s) / (s * s * q * q);
  ChainRule r{};
  r.d_T = d_ds * 2.0 * thermal_occupation_dT(p.omega_a, p.temperature);
  r.d_wA = -4.0 * p.omega_p / (s * q) + k * 8.0 * p.omega_a / (s * q * q) +
           d_ds * 2.0 * thermal_occupation_domega(p.omega_a, p.temperature);
  r.d_gamma = 2.0 * k * p.gamma * s / (q * q);
  return r;
}

void check_close(const char* name, double closed, double chain, double x) {
  // the hyperbolic differences cancel like x^2 at high temperature
  const double tol = 1e-8 + 1e-14 / (x * x);
  const double diff = std::abs(closed - chain);
  if (diff <= tol * std::max(std::abs(closed), std::abs(chain)) || diff < 1e-300) return;
  std::ostringstream os;
  os.precision(17);
  os << "closed form " << name << " = " << closed
     << " disagrees with the chain-rule derivative " << chain;
  fail(ErrorCode::Internal, os.str());
}

SteadyStateClosedForm finish(const SystemParams& p, SteadyStateClosedForm c) {
  c.delta_p = population_splitting(p);
  if (!(std::abs(c.delta_p) < 0.5))
    fail(ErrorCode::Numerical, "closed form: |delta_p| must stay below 1/2");
  if (!(c.chi > 0.0) || !std::isfinite(c.chi))
    fail(ErrorCode::Numerical, "closed form: chi is not a positive finite number");

  const double denom = 1.0 - 4.0 * c.delta_p * c.delta_p;
  c.f_T = 4.0 * c.a_T * c.a_T / denom;
  c.f_wA = 4.0 * c.a_wA * c.a_wA / denom;
  c.f_gamma = 4.0 * c.a_gamma * c.a_gamma / denom;

  const ChainRule r = chain_rule(p);
  const double x = p.omega_a / p.temperature;
  check_close("A_T", c.a_T, r.d_T, x);
  check_close("A_wA", c.a_wA, r.d_wA, x);
  check_close("A_gamma", c.a_gamma, r.d_gamma, x);
  return c;
}

}  // namespace

SteadyStateClosedForm closed_form_direct(const SystemParams& p) {
  require_xx(p);
  if (p.omega_a / p.temperature > 700.0)
    fail(ErrorCode::InvalidArgument, "direct hyperbolic branch overflows for omega_a/T > 700");
  SteadyStateClosedForm c;
  fill_direct(p, c);
  return finish(p, c);
}

SteadyStateClosedForm closed_form_scaled(const SystemParams& p) {
  require_xx(p);
  SteadyStateClosedForm c;
  fill_scaled(p, c);
  return finish(p, c);
}

SteadyStateClosedForm closed_form(const SystemParams& p) {
  require_xx(p);
  return p.omega_a / p.temperature > kCrossover ? closed_form_scaled(p)
                                                : closed_form_direct(p);
}

double coherence_l1(const DensityMatrix& rho) {
  const ComplexMatrix& m = rho.matrix();
  double c = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j) c += std::abs(m(i, j));
  return c;
}

std::vector<double> probe_coherence(const SystemParams& p, const DensityMatrix& rho0,
                                    const TimeGrid& times) {
  const Trajectory traj = evolve(Liouvillian::build(p), rho0, times);
  std::vector<double> out;
  out.reserve(times.size());
  for (const DensityMatrix& rho : reduce_probe(traj)) out.push_back(coherence_l1(rho));
  return out;
}

}  // namespace qmetro
