#include "doctest.h"
#include "qmetro/analytics.hpp"
#include "qmetro/nonmarkov.hpp"
#include "oracle_values.hpp"

using namespace qmetro;

TEST_CASE("trace distance of the probe pair against high precision values") {
  for (const auto& o : oracle::kDistance) {
    SystemParams p;
    p.interaction = *parse_interaction(o.interaction);
    const BackflowCurve c = backflow(p, DensityMatrix(states::excited()), {0.0, o.t});
    INFO(o.interaction, " t=", o.t);
    CHECK(c.distance[0] == doctest::Approx(1.0));
    CHECK(c.distance[1] == doctest::Approx(o.distance).epsilon(1e-9));
  }
}

TEST_CASE("cumulative backflow is a running sum of positive increments") {
  SystemParams p;
  p.g = 0.09;
  const TimeGrid t = linear_grid(300.0, 3001);
  const BackflowCurve c = backflow(p, DensityMatrix(states::excited()), t);
  double n = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    n += std::max(0.0, c.distance[k] - c.distance[k - 1]);
    CHECK(c.n_cumulative[k] == doctest::Approx(n).epsilon(1e-12));
    CHECK(c.n_cumulative[k] >= c.n_cumulative[k - 1]);
  }
  CHECK(c.saturation() > 0.0);
}

TEST_CASE("without coupling there is no backflow") {
  SystemParams p;
  p.g = 0.0;
  const BackflowCurve c = backflow(p, DensityMatrix(states::excited()), linear_grid(100.0, 101));
  for (double d : c.distance) CHECK(d == doctest::Approx(1.0));
  CHECK(c.saturation() < 1e-12);
}

TEST_CASE("saturated backflow agrees with a plain grid") {
  SystemParams p;
  p.g = 0.09;
  SaturationOptions o;
  const BackflowCurve s = saturated_backflow(p, DensityMatrix(states::excited()), o);
  CHECK(s.saturated);
  CHECK(s.tail_bound <= o.tail_relative * s.saturation() + o.tail_absolute);
  CHECK(s.times.size() <= o.output_points + 1);
  // same fine cells on a direct evolution up to the fine horizon
  const std::size_t n = static_cast<std::size_t>(std::lround(s.fine_horizon / o.step));
  const BackflowCurve direct =
      backflow(p, DensityMatrix(states::excited()), linear_grid(s.fine_horizon, n + 1));
  CHECK(direct.saturation() <= s.saturation() + 1e-9);
  CHECK(direct.saturation() == doctest::Approx(s.saturation()).epsilon(2e-3));
}

TEST_CASE("closed form steady state against high precision values") {
  for (const auto& o : oracle::kSteadyXX) {
    SystemParams p;
    p.temperature = o.temperature;
    p.omega_a = o.omega_a;
    const SteadyStateClosedForm c = closed_form(p);
    INFO("T=", o.temperature, " wA=", o.omega_a);
    CHECK(c.delta_p == doctest::Approx(o.delta_p).epsilon(1e-12));
    CHECK(c.f_T == doctest::Approx(o.f_T).epsilon(1e-9));
    CHECK(c.f_wA == doctest::Approx(o.f_wA).epsilon(1e-9));
    CHECK(c.f_gamma == doctest::Approx(o.f_gamma).epsilon(1e-9));
  }
}

TEST_CASE("closed form branches agree at the crossover") {
  SystemParams p;
  for (double x : {100.0, 300.0, 345.0, 352.0}) {
    p.temperature = p.omega_a / x;
    const SteadyStateClosedForm d = closed_form_direct(p);
    const SteadyStateClosedForm s = closed_form_scaled(p);
    CHECK(d.delta_p == doctest::Approx(s.delta_p).epsilon(1e-12));
    CHECK(d.f_wA == doctest::Approx(s.f_wA).epsilon(1e-10));
    CHECK(d.f_gamma == doctest::Approx(s.f_gamma).epsilon(1e-10));
    CHECK(d.f_T == doctest::Approx(s.f_T).epsilon(1e-8).scale(0));
  }
  p.temperature = p.omega_a / 2000.0;
  const SteadyStateClosedForm cold = closed_form(p);
  CHECK(cold.scaled);
  CHECK(std::isfinite(cold.f_wA));
  CHECK(cold.f_T == 0.0);
}

TEST_CASE("closed form only exists for XX") {
  SystemParams p;
  p.interaction = InteractionKind::XZ;
  CHECK_THROWS_AS(closed_form(p), Error);
}

TEST_CASE("l1 coherence") {
  CHECK(coherence_l1(DensityMatrix(states::plus())) == doctest::Approx(1.0));
  CHECK(coherence_l1(DensityMatrix(states::excited())) == 0.0);
  SystemParams p;
  const TimeGrid t = linear_grid(200.0, 21);
  for (double c : probe_coherence(p, product_state(states::ground(), states::excited()), t))
    CHECK(c < 1e-10);
  p.interaction = InteractionKind::XZ;
  double peak = 0.0;
  for (double c : probe_coherence(p, product_state(states::ground(), states::excited()), t))
    peak = std::max(peak, c);
  CHECK(peak > 1e-3);
}
