#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sqz/chain.hpp"
#include "sqz/units.hpp"

using namespace sqz;

namespace {

ChainParams clean_params(double r1, double r2) {
  ChainParams p;
  p.r1 = r1;
  p.r2 = r2;
  p.eta_coupler = 1.0;
  p.eta_det = 1.0;
  p.pump_leak = 0.0;
  p.sigma_phase = 0.0;
  p.noise_floor = 0.0;
  return p;
}

}  // namespace

TEST_CASE("two-OPA readout formula reproduces the frozen oracle values") {
  // 10 log10(sinh^2(r2 -+ r1) / sinh^2 r2), evaluated independently:
  //   r = gain_db / 8.685889638065035
  //   (10 dB, 50 dB)        -> (-10.000781773065476, +10.000078173436702)
  //   (11 dB, 33 dB)        -> (-11.050623536814481, +11.004008549884306)
  //   (1.1513, 5.7565)      -> (-10.000846468047724, +10.000142908043969)
  //   (1.2664, 3.7993)      -> (-11.050428255248796, +11.003818895023148)
  const IdealSqueezing a =
      ideal_squeezing(units::r_from_gain_db(10.0), units::r_from_gain_db(50.0));
  CHECK(a.s_minus_db == doctest::Approx(-10.000781773065476).epsilon(1e-12));
  CHECK(a.s_plus_db == doctest::Approx(10.000078173436702).epsilon(1e-12));
  CHECK_FALSE(a.gain_insufficient);

  const IdealSqueezing b =
      ideal_squeezing(units::r_from_gain_db(11.0), units::r_from_gain_db(33.0));
  CHECK(b.s_minus_db == doctest::Approx(-11.050623536814481).epsilon(1e-12));
  CHECK(b.s_plus_db == doctest::Approx(11.004008549884306).epsilon(1e-12));

  const IdealSqueezing c = ideal_squeezing(1.1513, 5.7565);
  CHECK(c.s_minus_db == doctest::Approx(-10.000846468047724).epsilon(1e-12));
  CHECK(c.s_plus_db == doctest::Approx(10.000142908043969).epsilon(1e-12));
  // Within 0.01 dB of the round (-10, +10) statement.
  CHECK(std::abs(c.s_minus_db + 10.0) < 0.01);
  CHECK(std::abs(c.s_plus_db - 10.0) < 0.01);

  const IdealSqueezing d = ideal_squeezing(1.2664, 3.7993);
  CHECK(d.s_minus_db == doctest::Approx(-11.050428255248796).epsilon(1e-12));
  // Within 0.1 dB of the infinite-gain value -8.685889638065035 * 1.2664.
  CHECK(std::abs(d.s_minus_db + units::gain_db_from_r(1.2664)) < 0.1);
}

TEST_CASE("readout with no squeezer is flat, and zero measurement gain is rejected") {
  const IdealSqueezing none = ideal_squeezing(0.0, 2.0);
  CHECK(none.s_minus_db == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(none.s_plus_db == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(ideal_squeezing(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(ideal_squeezing(1.0, -0.5), std::domain_error);
}

TEST_CASE("insufficient measurement gain is flagged, not rejected") {
  const IdealSqueezing s = ideal_squeezing(1.5, 1.0);
  CHECK(s.gain_insufficient);
  CHECK(std::isfinite(s.s_minus_db));
  CHECK_FALSE(ideal_squeezing(1.0, 1.0).gain_insufficient);
}

TEST_CASE("loss-limited squeezing reproduces the frozen oracle values") {
  // 10 log10((1 - eta) + eta e^{-+2r}):
  //   (r = 1.2204, eta = 0.7)     -> (-4.4253634345367674, +9.2103876357242651)
  //   (r = r(10.6 dB), eta = 0.7) -> (-4.4253195698473933, +9.2101372666783945)
  const LossySqueezing a = lossy_squeezing_limit(1.2204, 0.7);
  CHECK(a.s_minus_db == doctest::Approx(-4.4253634345367674).epsilon(1e-12));
  CHECK(a.s_plus_db == doctest::Approx(9.2103876357242651).epsilon(1e-12));

  const LossySqueezing b = lossy_squeezing_limit(units::r_from_gain_db(10.6), 0.7);
  CHECK(b.s_minus_db == doctest::Approx(-4.4253195698473933).epsilon(1e-12));
  CHECK(b.s_plus_db == doctest::Approx(9.2101372666783945).epsilon(1e-12));

  // eta = 1 is the pure-state limit, eta = 0 all vacuum.
  const LossySqueezing pure = lossy_squeezing_limit(0.9, 1.0);
  CHECK(pure.s_minus_db == doctest::Approx(-units::gain_db_from_r(0.9)).epsilon(1e-12));
  CHECK(pure.s_plus_db == doctest::Approx(units::gain_db_from_r(0.9)).epsilon(1e-12));
  const LossySqueezing dark = lossy_squeezing_limit(0.9, 0.0);
  CHECK(dark.s_minus_db == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(dark.s_plus_db == doctest::Approx(0.0).epsilon(1e-15));

  CHECK_THROWS_AS(lossy_squeezing_limit(0.9, 1.0001), std::invalid_argument);
  CHECK_THROWS_AS(lossy_squeezing_limit(0.9, -0.0001), std::invalid_argument);
}

TEST_CASE("Gaussian simulation equals the readout formula over the full grid") {
  // With every imperfection off the exact covariance simulation and the
  // sinh-ratio formula are the same mathematical object; hold them to 1e-9 dB.
  // The grid deliberately includes r1 > r2 (insufficient-gain branch).
  for (double r1 : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5}) {
    for (double r2 : {1.0, 2.5, 4.0, 5.5, 7.0}) {
      const SqueezingResult sim = simulate_chain(clean_params(r1, r2));
      const IdealSqueezing formula = ideal_squeezing(r1, r2);
      if (r1 == r2) {
        // Matched gains cancel the squeezed arm exactly: zero photons, -inf dB
        // on both paths.
        CHECK(sim.n_minus == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::isinf(formula.s_minus_db));
        CHECK(std::isinf(sim.s_minus_db));
      } else {
        CHECK(std::abs(sim.s_minus_db - formula.s_minus_db) < 1e-9);
      }
      CHECK(std::abs(sim.s_plus_db - formula.s_plus_db) < 1e-9);
    }
  }
}

TEST_CASE("result photon numbers satisfy the dB-ratio identity") {
  ChainParams p;  // defaults: 10.6 dB squeezer, 50 dB readout, lossy coupler
  const SqueezingResult s = simulate_chain(p);
  CHECK(s.n_vac > 0.0);
  CHECK(s.s_minus_db == doctest::Approx(10 * std::log10(s.n_minus / s.n_vac)).epsilon(1e-15));
  CHECK(s.s_plus_db == doctest::Approx(10 * std::log10(s.n_plus / s.n_vac)).epsilon(1e-15));
}

TEST_CASE("photon numbers at (10 dB, 50 dB) sit in the expected decades") {
  const SqueezingResult s =
      simulate_chain(clean_params(units::r_from_gain_db(10.0), units::r_from_gain_db(50.0)));
  // n_plus ~ 2.5e5, n_minus ~ 2.5e3, ratio ~ e^{4 r1} ~ 100.
  CHECK(s.n_plus > 3.16e4);
  CHECK(s.n_plus < 3.17e5);
  CHECK(s.n_minus > 3.16e2);
  CHECK(s.n_minus < 3.17e3);
  CHECK(s.n_plus / s.n_minus > 100.0 / 3);
  CHECK(s.n_plus / s.n_minus < 100.0 * 3);
}

TEST_CASE("simulation converges to the loss-limited value as readout gain grows") {
  ChainParams p = clean_params(units::r_from_gain_db(10.6), 1.0);
  p.eta_coupler = 0.7;
  const double limit = lossy_squeezing_limit(p.r1, 0.7).s_minus_db;
  double previous_dev = std::numeric_limits<double>::infinity();
  for (double r2 : {1.8, 2.4, 3.0, 3.6, 4.2, 4.8, 5.4, 6.0, 6.91}) {
    p.r2 = r2;
    const double dev = std::abs(simulate_chain(p).s_minus_db - limit);
    CHECK(dev < previous_dev);  // monotone approach
    previous_dev = dev;
  }
  // 60 dB of measurement gain resolves the limit to well under 0.01 dB.
  p.r2 = units::r_from_gain_db(60.0);
  CHECK(std::abs(simulate_chain(p).s_minus_db - limit) < 0.01);
  p.r2 = units::r_from_gain_db(50.0);
  CHECK(std::abs(simulate_chain(p).s_minus_db - limit) < 0.05);
}

TEST_CASE("measured ratios are exactly invariant under detection loss when the floor is zero") {
  ChainParams p = clean_params(units::r_from_gain_db(10.6), units::r_from_gain_db(50.0));
  p.eta_coupler = 0.7;
  const SqueezingResult ref = simulate_chain(p);
  for (double eta_det : {0.9, 0.5, 0.2, 0.05}) {
    p.eta_det = eta_det;
    const SqueezingResult s = simulate_chain(p);
    CHECK(std::abs(s.s_minus_db - ref.s_minus_db) < 1e-12);
    CHECK(std::abs(s.s_plus_db - ref.s_plus_db) < 1e-12);
  }
}

TEST_CASE("finite readout gain overshoots squeezing, and the asymmetry never flips sign") {
  // sinh(r2+r1) sinh(r2-r1) = sinh^2 r2 - sinh^2 r1 < sinh^2 r2, so
  // s_plus + s_minus < 0 at finite gain, approaching 0 only as r2 -> inf.
  for (double r1 : {0.2, 0.6, 1.0, 1.4, 1.8, 2.2}) {
    for (double r2 : {1.0, 2.0, 3.0, 4.5, 6.0, 7.0}) {
      if (r1 >= r2) continue;
      const IdealSqueezing s = ideal_squeezing(r1, r2);
      CHECK(s.s_plus_db + s.s_minus_db <= 1e-12);
      CHECK(s.s_minus_db <= -units::gain_db_from_r(r1) + 1e-12);  // squeezed arm overshoots down
      CHECK(s.s_plus_db >= units::gain_db_from_r(r1) - 1e-12);    // amplified arm overshoots up
    }
  }
  // The asymmetry closes as the readout gain grows.
  const double gap_33 = std::abs(ideal_squeezing(1.2664, units::r_from_gain_db(33.0)).s_plus_db +
                                 ideal_squeezing(1.2664, units::r_from_gain_db(33.0)).s_minus_db);
  const double gap_60 = std::abs(ideal_squeezing(1.2664, units::r_from_gain_db(60.0)).s_plus_db +
                                 ideal_squeezing(1.2664, units::r_from_gain_db(60.0)).s_minus_db);
  CHECK(gap_60 < gap_33);
}

TEST_CASE("phase-jitter averaging follows the closed-form variance mix") {
  // Oracle: 0.1 + 9.9 (1 - e^{-0.02}) / 2 = 0.19801656713156152.
  CHECK(dephased_variance(0.1, 10.0, 0.1) ==
        doctest::Approx(0.19801656713156152).epsilon(1e-12));
  CHECK(dephased_variance(0.25, 4.0, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  // Large jitter fully randomizes the quadrature.
  CHECK(dephased_variance(0.25, 4.0, 50.0) == doctest::Approx((0.25 + 4.0) / 2).epsilon(1e-9));
  CHECK_THROWS_AS(dephased_variance(0.0, 4.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(dephased_variance(0.25, -1.0, 0.1), std::invalid_argument);

  double prev = dephased_variance(0.1, 10.0, 0.0);
  for (double sigma : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    const double v = dephased_variance(0.1, 10.0, sigma);
    CHECK(v > prev);  // strictly worse with more jitter when v_anti > v_sq
    prev = v;
  }
}

TEST_CASE("pump-phase jitter inside the chain matches the analytic average") {
  // The detector photon number is linear in the covariance, so the chain with
  // pump-phase jitter sigma equals a readout of the dephased variances with
  // quadrature-angle jitter sigma/2 (half from the phase-to-frame mapping).
  ChainParams p = clean_params(units::r_from_gain_db(10.6), units::r_from_gain_db(50.0));
  p.eta_coupler = 0.7;
  p.noise_floor = 10.0;
  for (double sigma : {0.02, 0.1, 0.3}) {
    p.sigma_phase = sigma;
    const SqueezingResult s = simulate_chain(p);

    const double vsq = 0.3 + 0.7 * std::exp(-2 * p.r1);
    const double vanti = 0.3 + 0.7 * std::exp(2 * p.r1);
    const double g = std::exp(2 * p.r2);
    const double vq = dephased_variance(vsq, vanti, sigma / 2);
    const double vp = dephased_variance(vanti, vsq, sigma / 2);
    const double expected_minus = (g * vq + vp / g - 2) / 4 + p.noise_floor;
    const double expected_vac = (g + 1 / g - 2) / 4 + p.noise_floor;
    CHECK(s.n_minus == doctest::Approx(expected_minus).epsilon(1e-9));
    CHECK(s.n_vac == doctest::Approx(expected_vac).epsilon(1e-9));
    CHECK(s.s_minus_db ==
          doctest::Approx(10 * std::log10(expected_minus / expected_vac)).epsilon(1e-9));
  }
}

TEST_CASE("required measurement gain matches the independent bisection oracle") {
  // Smallest readout gain keeping the squeezed arm within tolerance of its
  // infinite-gain value; frozen oracles from an external bisection:
  //   r1 = 1.2664,  tol 0.1 dB -> 30.057755926876268 dB
  //   r1 = r(11 dB), tol 0.1 dB -> 30.057961426114975 dB
  CHECK(required_measurement_gain(1.2664, 0.1) ==
        doctest::Approx(30.057755926876268).epsilon(1e-9));
  const double g11 = required_measurement_gain(units::r_from_gain_db(11.0), 0.1);
  CHECK(g11 == doctest::Approx(30.057961426114975).epsilon(1e-9));
  CHECK(g11 <= 33.0);

  // Nothing to resolve at vanishing squeezing.
  CHECK(required_measurement_gain(1e-8, 0.1) < 1.0);
  // Tighter tolerance demands more gain.
  CHECK(required_measurement_gain(1.2664, 0.01) > required_measurement_gain(1.2664, 0.1));
  CHECK_THROWS_AS(required_measurement_gain(-0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(required_measurement_gain(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("the gain requirement is verified against the simulation it predicts") {
  // At the returned gain the deviation is within tolerance; at 1 dB less it is not.
  const double r1 = 1.2664;
  const double tol = 0.1;
  const double gain = required_measurement_gain(r1, tol);
  const double target = -units::gain_db_from_r(r1);
  const double at = ideal_squeezing(r1, units::r_from_gain_db(gain)).s_minus_db;
  CHECK(std::abs(at - target) <= tol * (1 + 1e-6));
  const double below = ideal_squeezing(r1, units::r_from_gain_db(gain - 1.0)).s_minus_db;
  CHECK(std::abs(below - target) > tol);
}

TEST_CASE("detection-loss tolerance is unbounded without a noise floor") {
  ChainParams p = clean_params(1.2664, 5.7565);
  p.noise_floor = 0.0;
  const DetectionLossTolerance t = detection_loss_tolerance(p, 0.1);
  CHECK(t.unbounded);
  CHECK(std::isinf(t.loss_db));
}

TEST_CASE("detection-loss tolerance is finite with a floor and shrinks as the floor grows") {
  ChainParams p = clean_params(1.2664, 5.7565);
  p.noise_floor = 1.0;
  const DetectionLossTolerance t1 = detection_loss_tolerance(p, 0.1);
  CHECK_FALSE(t1.unbounded);
  CHECK(t1.loss_db > 3.0);
  CHECK(t1.loss_db < 30.0);

  p.noise_floor = 2.0;
  const DetectionLossTolerance t2 = detection_loss_tolerance(p, 0.1);
  CHECK(t2.loss_db < t1.loss_db);

  p.noise_floor = 4.0;
  CHECK(detection_loss_tolerance(p, 0.1).loss_db < t2.loss_db);

  // The returned loss actually marks the degradation boundary.
  p.noise_floor = 1.0;
  ChainParams at = p;
  at.eta_det = units::ratio_from_db(-t1.loss_db);
  const double base = simulate_chain(p).s_minus_db;
  CHECK(std::abs(simulate_chain(at).s_minus_db - base) <= 0.1 * (1 + 1e-3));
  ChainParams beyond = p;
  beyond.eta_det = units::ratio_from_db(-(t1.loss_db + 0.5));
  CHECK(std::abs(simulate_chain(beyond).s_minus_db - base) > 0.1);
}

TEST_CASE("parameter validation rejects out-of-range fields") {
  ChainParams p;
  p.eta_coupler = 1.2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ChainParams{};
  p.eta_det = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ChainParams{};
  p.r1 = -0.2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ChainParams{};
  p.noise_floor = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ChainParams{};
  p.pump_leak = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ChainParams{};
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("batch evaluation agrees with the one-shot path") {
  std::vector<ChainParams> points;
  for (int i = 0; i < 32; ++i) {
    ChainParams p;
    p.r1 = 0.05 + 0.07 * i;
    p.sigma_phase = 0.01 * (i % 5);
    points.push_back(p);
  }
  const std::vector<SqueezingResult> batch = simulate_many(points);
  REQUIRE(batch.size() == points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SqueezingResult one = simulate_chain(points[i]);
    CHECK(batch[i].s_minus_db == one.s_minus_db);
    CHECK(batch[i].n_plus == one.n_plus);
  }
}
