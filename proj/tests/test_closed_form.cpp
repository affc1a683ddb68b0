#include <doctest.h>

#include <numbers>

#include "mayleonard/errors.hpp"
#include "support.hpp"

using namespace mayleonard;
using namespace testing;
using namespace std::complex_literals;

namespace {

const ModelParams<Real> kAllOnes(1.0, 1, 1, 1, 1, 1, 1);
const State<Real> kSmoke(0.2, 0.2, 0.2);

// z = -1 on the all-ones couplings: the components sum to -1.
const State<Real> kBlowUpData(-0.25, -0.25, -0.5);

}  // namespace

TEST_CASE("linear forms") {
  const auto e = linear_forms(kAllOnes, kSmoke);
  for (auto v : e) CHECK(v == doctest::Approx(0.6).epsilon(1e-15));
  const ModelParams<Real> generic(1.0, 2, 0.5, 0.5, 2, 2, 0.5);
  CHECK(linear_forms(generic, State<Real>(0, 0, 0)) == std::array<Real, 3>{0, 0, 0});
  CHECK(linear_forms(generic, State<Real>(1, 1, 1)) == std::array<Real, 3>{3.5, 3.5, 3.5});
}

TEST_CASE("make_special") {
  const auto sol = special_of(kAllOnes, kSmoke);
  CHECK(sol.z() == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(sol.eta() == 1.0);

  const ModelParams<Real> bad(1.0, 2, 1, 1, 1, 1, 1);
  const auto r = make_special(bad, State<Real>(1, 1, 1));
  REQUIRE(std::holds_alternative<AdmissibilityReport<Real>>(r));
  const auto& rep = std::get<AdmissibilityReport<Real>>(r);
  CHECK_FALSE(rep.pass);
  CHECK(rep.e_values == std::array<Real, 3>{4, 3, 3});
  CHECK(rep.residuals[0] == 1.0);
  CHECK(rep.residuals[1] == 0.0);
  CHECK_FALSE(rep.z.has_value());

  SUBCASE("tolerance is relative to the form magnitude") {
    const State<Real> x(1e6, 1e6, 1e6 + 1e-4);  // residual 1e-4 against E ~ 3e6
    CHECK(check_admissibility(kAllOnes, x).pass);
    const ModelParams<Real> p(1.0, 1, 1, 1, 1, 1, 1 + 1e-3);
    CHECK_FALSE(check_admissibility(p, x).pass);
  }

  SUBCASE("z is the mean of the three forms") {
    const ModelParams<Real> p(1.0, 1, 1, 1, 1, 1, 1 + 1e-12);
    const auto e = linear_forms(p, kSmoke);
    CHECK(special_of(p, kSmoke).z() == (e[0] + e[1] + e[2]) / 3.0);
  }
}

TEST_CASE("eval_special") {
  const auto sol = special_of(kAllOnes, kSmoke);
  CHECK(eval_special(sol, 0.0) == kSmoke);

  SUBCASE("z = eta stays put") {
    const State<Real> x(0.5, 0.25, 0.25);
    const auto s = special_of(kAllOnes, x);
    REQUIRE(s.z() == 1.0);
    for (double t : {0.1, 1.0, 7.5, 30.0}) {
      const auto xt = eval_special(s, t);
      for (std::size_t n = 0; n < 3; ++n) CHECK(xt[n] == doctest::Approx(x[n]).epsilon(1e-15));
    }
  }

  SUBCASE("long-time limit eta x0 / z") {
    const auto x = eval_special(sol, 40.0);
    for (auto c : x) CHECK(std::abs(c - 1.0 / 3) < 1e-12);
  }

  SUBCASE("pole raises") {
    const auto s = special_of(kAllOnes, kBlowUpData);
    CHECK_THROWS_AS(eval_special(s, std::numbers::ln2), SingularityError);
  }

  SUBCASE("small eta uses the limit 1 + z t") {
    const auto s = special_of(kAllOnes.with_eta(1e-10), kSmoke);
    const auto x = eval_special(s, 5.0);
    for (auto c : x) CHECK(c == doctest::Approx(0.2 / (1 + 0.6 * 5)).epsilon(1e-9));
  }

  SUBCASE("derivative matches central differences") {
    const double h = 1e-6;
    for (double t : {0.0, 0.3, 2.0}) {
      const auto fd = (eval_special(sol, t + h) - eval_special(sol, t - h)) / (2 * h);
      CHECK((fd - eval_special_derivative(sol, t)).norm_inf() < 1e-9);
    }
  }
}

TEST_CASE("ray solution of the transformed system") {
  CHECK(eval_y_special(kSmoke, 0.6, 0.0) == kSmoke);
  CHECK(eval_y_special(State<Real>(1, 1, 1), 3.0, 1.0) == State<Real>(0.25, 0.25, 0.25));
  CHECK_THROWS_AS(eval_y_special(State<Real>(1, 1, 1), -1.0, 1.0), SingularityError);

  SUBCASE("tau-derivative at 0 equals the transformed field") {
    const ModelParams<Real> p(1.0, 2, 0.5, 0.5, 2, 2, 0.5);
    const State<Real> y0(0.3, 0.3, 0.3);
    const double z = special_of(p, y0).z();
    const double h = 1e-6;
    const auto fd = (eval_y_special(y0, z, h) - eval_y_special(y0, z, -h)) / (2 * h);
    CHECK((fd - rhs_transformed(p, y0)).norm_inf() < 1e-6);
  }
}

TEST_CASE("time map") {
  CHECK(tau_of_t(TimeMap<Real>{1.0}, std::numbers::ln2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(tau_of_t(TimeMap<Real>{1e-14}, 5.0) - 5.0) < 1e-12);
  CHECK(tau_of_t(TimeMap<Real>{0.7}, 0.0) == 0.0);
  const Complex tau = tau_of_t(TimeMap<Complex>{1i}, std::numbers::pi);
  CHECK(std::abs(tau - 2.0i) < 1e-15);
  CHECK_THROWS_AS(tau_of_t(TimeMap<Real>{1.0}, 1000.0), OverflowError);

  SUBCASE("no cancellation near zero") {
    const double eta = 1e-3, t = 1e-7;
    const double exact = std::expm1(eta * t) / eta;
    CHECK(tau_of_t(TimeMap<Real>{eta}, t) == doctest::Approx(exact).epsilon(1e-15));
  }
}

TEST_CASE("change of variables") {
  const State<Real> x(2, 4, 6);
  const auto at0 = transform_x_to_y(TimeMap<Real>{1.0}, 0.0, x);
  CHECK(at0.tau == 0.0);
  CHECK(at0.y == x);

  const auto p = transform_x_to_y(TimeMap<Real>{1.0}, std::numbers::ln2, x);
  CHECK(p.tau == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t n = 0; n < 3; ++n) CHECK(p.y[n] == doctest::Approx(n + 1.0).epsilon(1e-15));

  SUBCASE("round trip within 4 ulp for |eta t| <= 10") {
    std::mt19937_64 rng(2);
    std::int64_t worst = 0;
    for (int k = 0; k < 1000; ++k) {
      const double eta = uniform(rng, -5, 5);
      const double t = uniform(rng, 0, 10 / std::abs(eta));
      if (std::abs(eta * t) > 10) continue;
      const auto xs = random_state(rng, 0.1, 10);
      const TimeMap<Real> map{eta};
      const auto back = transform_y_to_x(map, t, transform_x_to_y(map, t, xs).y);
      for (std::size_t n = 0; n < 3; ++n) worst = std::max(worst, ulp_distance(back[n], xs[n]));
    }
    CHECK(worst <= 4);
  }

  SUBCASE("the two closed forms are consistent") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto inst = random_admissible_instance<Real>(seed);
      const auto sol = special_of(inst.params, inst.x0);
      const TimeMap<Real> map{sol.eta()};
      for (double t : {0.0, 0.25, 0.5, 0.9}) {
        const auto x = eval_special(sol, t);
        const auto y = transform_x_to_y(map, t, x);
        const auto y_direct = eval_y_special(sol.x0(), sol.z(), y.tau);
        CHECK((y.y - y_direct).norm_inf() <= 1e-12 * y_direct.norm_inf());
        const auto x_again = transform_y_to_x(map, t, y_direct);
        CHECK((x_again - x).norm_inf() <= 1e-12 * x.norm_inf());
      }
    }
  }
}

TEST_CASE("blow-up time") {
  CHECK_FALSE(blow_up_time(special_of(kAllOnes, kSmoke)).has_value());
  CHECK_FALSE(blow_up_time(special_of(kAllOnes, State<Real>(0.5, 0.25, 0.25))).has_value());

  const auto sol = special_of(kAllOnes, kBlowUpData);
  REQUIRE(sol.z() == -1.0);
  const auto tstar = blow_up_time(sol);
  REQUIRE(tstar.has_value());
  const auto d = [&](double t) { return denominator(sol, t); };
  const double oracle = bisect(d, 0.0, 10.0, 1e-13);
  CHECK(std::abs(*tstar - oracle) < 1e-10);
  CHECK(std::abs(*tstar - std::numbers::ln2) < 1e-15);

  SUBCASE("sign change and bisection agreement on generated data") {
    int with_pole = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      const auto inst = random_admissible_instance<Real>(seed);
      // Negate x0: z changes sign, so every instance now has a pole for eta > 0.
      const auto s = special_of(inst.params, inst.x0 * -1.0);
      const auto t = blow_up_time(s);
      REQUIRE(t.has_value());
      ++with_pole;
      CHECK(denominator(s, *t - 1e-6) * denominator(s, *t + 1e-6) < 0);
      const auto f = [&](double u) { return denominator(s, u); };
      const auto root = first_root(f, 0.0, *t * 2 + 1, 20000, 1e-13);
      REQUIRE(root.has_value());
      CHECK(std::abs(*root - *t) < 1e-10);
    }
    CHECK(with_pole == 500);
  }

  SUBCASE("negative eta") {
    // eta < 0: D = e^{|eta| t} (1 - z/eta) + z/eta vanishes when z/eta > 1.
    const auto s = special_of(kAllOnes.with_eta(-1.0), State<Real>(-0.5, -0.5, -1.0));
    const auto t = blow_up_time(s);
    REQUIRE(t.has_value());
    const auto f = [&](double u) { return denominator(s, u); };
    CHECK(std::abs(bisect(f, 0.0, 10.0, 1e-13) - *t) < 1e-10);
    CHECK_FALSE(blow_up_time(special_of(kAllOnes.with_eta(-1.0), kSmoke)).has_value());
  }
}

TEST_CASE("period") {
  CHECK(*period_of(1i) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-15));
  CHECK(*period_of(-3i) == doctest::Approx(2 * std::numbers::pi / 3).epsilon(1e-15));
  CHECK_FALSE(period_of(Complex(1, 0)).has_value());
  CHECK_FALSE(period_of(Complex(0.1, 1)).has_value());
  CHECK_FALSE(period_of(1.0).has_value());
}

TEST_CASE("verify_special") {
  const auto sol = special_of(kAllOnes, kSmoke);
  const auto grid = linspace(0, 5, 51);
  const auto ok = verify_special(kAllOnes, sol, grid);
  CHECK(ok.pass);
  CHECK(ok.max_residual < 1e-12);
  CHECK(ok.points == 51);

  const auto bad = SpecialSolution<Real>::unchecked(kSmoke, sol.z() + 1e-3, 1.0);
  const auto fail = verify_special(kAllOnes, bad, grid);
  CHECK_FALSE(fail.pass);
  CHECK(fail.max_residual > 1e-5);
  CHECK(fail.max_residual < 1e-2);

  const std::vector<double> origin{0.0};
  const auto single = verify_special(kAllOnes, sol, origin);
  CHECK(single.max_residual < 1e-16);

  const auto pole = special_of(kAllOnes, kBlowUpData);
  const std::vector<double> near{0.1, std::numbers::ln2 - 5e-4};
  CHECK_THROWS_AS(verify_special(kAllOnes, pole, near), SingularityError);
  CHECK_THROWS_AS(verify_special(kAllOnes.with_eta(2.0), sol, grid), std::invalid_argument);
}

TEST_CASE("generated instances satisfy the closed form") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto inst = random_admissible_instance<Real>(seed);
    const auto sol = special_of(inst.params, inst.x0);
    const auto tstar = blow_up_time(sol);
    const double t_end = tstar ? std::min(5.0, *tstar - 0.1) : 5.0;
    const auto grid = linspace(0, t_end, 101);
    CHECK(verify_special(inst.params, sol, grid).pass);

    // ray property
    const auto& x0 = inst.x0;
    for (double t : grid) {
      const auto x = eval_special(sol, t);
      for (std::size_t n = 0; n < 3; ++n)
        for (std::size_t m = 0; m < 3; ++m) {
          if (m == n || x0[m] == 0.0) continue;
          const double r0 = x0[n] / x0[m];
          CHECK(std::abs(x[n] / x[m] - r0) <= 1e-12 * std::abs(r0));
        }
    }

    // long-time limit for converging rays
    if (sol.z() > 0) {
      const double eta = sol.eta();
      const auto limit = x0 * (eta / sol.z());
      CHECK((eval_special(sol, 40.0 / eta) - limit).norm_inf() < 1e-10);
      CHECK(rhs(inst.params, limit).norm_inf() < 1e-10 * (1 + limit.norm_inf()));
    }
  }
}

TEST_CASE("imaginary eta gives periodic rays") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = random_admissible_instance<Complex>(seed);
    const auto sol = special_of(inst.params, inst.x0);
    const double T = *period_of(sol.eta());
    if (min_abs_denominator(sol, 0, T, 4000) < 1e-3) continue;
    ++checked;
    double dev = 0.0;
    for (int k = 0; k < 10; ++k) {
      const double t = T * k / 10;
      dev = std::max(dev, (eval_special(sol, t + T) - eval_special(sol, t)).norm_inf());
    }
    CHECK(dev < 1e-10);
    CHECK(verify_special(inst.params, sol, linspace(0, T, 101)).pass);
  }
  CHECK(checked > 150);
}

TEST_CASE("transverse growth matches the integrated monodromy") {
  StepControl tight;
  tight.rtol = 1e-12;
  tight.atol = 1e-16;
  int stable = 0, unstable = 0;
  for (std::uint64_t seed = 0; seed < 400 && (stable < 3 || unstable < 3); ++seed) {
    const auto inst = random_admissible_instance<Complex>(seed);
    const auto sol = special_of(inst.params, inst.x0);
    const double g = *transverse_growth(inst.params, sol);
    const double T = *period_of(sol.eta());
    if (min_abs_denominator(sol, 0, T, 4000) < 0.1) continue;
    if (g != 1.0 && g < 1e3) continue;
    if (g == 1.0 ? stable >= 3 : unstable >= 3) continue;
    (g == 1.0 ? stable : unstable)++;

    // Perturb along a generic direction and compare after one period.
    const double eps = 1e-9;
    const State<Complex> dx(Complex(0.3, -0.2), Complex(-0.5, 0.1), Complex(0.2, 0.4));
    const std::vector<double> times{0.0, T};
    const auto base = adaptive_45_at(original_field(inst.params), inst.x0, times, tight);
    const auto pert = adaptive_45_at(original_field(inst.params), inst.x0 + dx * Complex(eps),
                                     times, tight);
    REQUIRE(base.terminated == Termination::Completed);
    REQUIRE(pert.terminated == Termination::Completed);
    const double amplification = (pert.states[1] - base.states[1]).norm_inf() / (eps * dx.norm_inf());
    INFO("seed " << seed << " predicted " << g << " measured " << amplification);
    if (g == 1.0) {
      CHECK(amplification < 50.0);
    } else {
      CHECK(amplification > g / 100);
      CHECK(amplification < g * 100);
    }
  }
  CHECK(stable == 3);
  CHECK(unstable == 3);
}
