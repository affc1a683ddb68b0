#include <doctest.h>

#include <numbers>

#include "mayleonard/errors.hpp"
#include "support.hpp"

using namespace mayleonard;
using namespace testing;
using namespace std::complex_literals;

namespace {

const ModelParams<Real> kAllOnes(1.0, 1, 1, 1, 1, 1, 1);
const ModelParams<Real> kDecoupled(1.0, 0, 0, 0, 0, 0, 0);
const State<Real> kSmoke(0.2, 0.2, 0.2);

template <Scalar S>
void check_trajectory_shape(const Trajectory<S>& tr) {
  REQUIRE(tr.times.size() == tr.states.size());
  for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
  for (const auto& x : tr.states) CHECK(x.finite());
  if (tr.terminated != Termination::Completed) CHECK(tr.times.back() < tr.failure_time);
}

}  // namespace

TEST_CASE("step control validation") {
  CHECK_NOTHROW(StepControl{}.validate());
  StepControl c;
  c.h_min = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.rtol = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.norm_cap = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(rk4_fixed(original_field(kAllOnes), kSmoke, 0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rk4_fixed(original_field(kAllOnes), kSmoke, 1.0, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("rk4") {
  SUBCASE("zero state stays zero") {
    const auto tr = rk4_fixed(original_field(kAllOnes), State<Real>(0, 0, 0), 0.0, 3.0, 0.01);
    for (const auto& x : tr.states) CHECK(x == State<Real>(0, 0, 0));
  }

  SUBCASE("decoupled logistic") {
    const auto tr = rk4_fixed(original_field(kDecoupled), State<Real>(0.1, 0.1, 0.1), 0.0, 5.0, 1e-3);
    check_trajectory_shape(tr);
    CHECK(tr.times.back() == 5.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      for (auto c : tr.states[i]) worst = std::max(worst, std::abs(c - logistic(0.1, tr.times[i])));
    CHECK(worst < 1e-8);
  }

  SUBCASE("special-solution data") {
    const auto sol = special_of(kAllOnes, kSmoke);
    const auto tr = rk4_fixed(original_field(kAllOnes), kSmoke, 0.0, 5.0, 1e-3);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      worst = std::max(worst, (tr.states[i] - eval_special(sol, tr.times[i])).norm_inf());
    CHECK(worst < 1e-8);
  }

  SUBCASE("last step lands on t1") {
    const auto tr = rk4_fixed(original_field(kAllOnes), kSmoke, 0.0, 1.0, 0.3);
    CHECK(tr.times == std::vector<double>{0.0, 0.3, 0.6, 0.8999999999999999, 1.0});
    const auto one = rk4_fixed(original_field(kAllOnes), kSmoke, 2.0, 2.0, 0.1);
    CHECK(one.times == std::vector<double>{2.0});
    CHECK(one.states[0] == kSmoke);
  }

  SUBCASE("blow-up") {
    const auto tr = rk4_fixed(original_field(kAllOnes), State<Real>(-0.25, -0.25, -0.5), 0.0, 2.0, 1e-3);
    CHECK(tr.terminated == Termination::BlowUp);
    check_trajectory_shape(tr);
    CHECK(std::abs(tr.failure_time - std::numbers::ln2) < 1e-2);
  }
}

TEST_CASE("adaptive Dormand-Prince") {
  SUBCASE("blow-up near the closed-form pole") {
    const State<Real> x0(-0.25, -0.25, -0.5);
    const auto sol = special_of(kAllOnes, x0);
    REQUIRE(sol.z() == -1.0);
    const auto tr = adaptive_45(original_field(kAllOnes), x0, 0.0, 2.0);
    CHECK(tr.terminated == Termination::BlowUp);
    check_trajectory_shape(tr);
    CHECK(std::abs(tr.failure_time - *blow_up_time(sol)) < 1e-3);
  }

  SUBCASE("step underflow is reported") {
    StepControl c;
    c.norm_cap = 1e300;
    c.h_min = 1e-6;
    const auto tr = adaptive_45(original_field(kAllOnes), State<Real>(-0.25, -0.25, -0.5), 0.0, 2.0, c);
    CHECK(tr.terminated == Termination::StepUnderflow);
    check_trajectory_shape(tr);
    CHECK(tr.failure_time < std::numbers::ln2);
    CHECK(tr.failure_time > std::numbers::ln2 - 1e-2);
  }

  SUBCASE("imaginary eta returns after one period") {
    const ModelParams<Complex> p(1i, {0.5, 0.2}, {1, -0.3}, {0.7, 0.1}, {1.2, 0}, {0.4, 0.4},
                                {0.9, -0.2});
    std::map<SlotId, Complex> known;
    const auto full = to_assignment(p, State<Complex>({0.3, 0.1}, 0, 0));
    for (SlotId s : kAllSlots)
      if (s != SlotId::X2 && s != SlotId::X3) known[s] = full[static_cast<std::size_t>(s)];
    const ProblemInstance<Complex> inst(known, {SlotId::X2, SlotId::X3});
    const auto out = solve_pair(inst);
    REQUIRE(out.kind == SolveKind::Unique);
    const auto x0 = state_of(inst.complete(out.solutions[0].first, out.solutions[0].second));
    const auto sol = special_of(p, x0);
    REQUIRE(min_abs_denominator(sol, 0, 2 * std::numbers::pi, 4000) > 0.1);
    const auto tr = adaptive_45(original_field(p), x0, 0.0, 2 * std::numbers::pi);
    REQUIRE(tr.terminated == Termination::Completed);
    check_trajectory_shape(tr);
    CHECK(tr.times.back() == 2 * std::numbers::pi);
    CHECK((tr.states.back() - x0).norm_inf() < 1e-8);
  }

  SUBCASE("tightening rtol shrinks the error") {
    const auto inst = random_admissible_instance<Real>(3);
    const auto sol = special_of(inst.params, inst.x0);
    const auto exact = eval_special(sol, 1.0);
    auto error_at = [&](double rtol) {
      StepControl c;
      c.rtol = rtol;
      c.atol = rtol * 1e-3;
      const auto tr = adaptive_45(original_field(inst.params), inst.x0, 0.0, 1.0, c);
      return (tr.states.back() - exact).norm_inf();
    };
    const double coarse = error_at(1e-6), fine = error_at(1e-10);
    CHECK(coarse > 0);
    CHECK(coarse / fine >= 1e2);
  }

  SUBCASE("output grid is honoured") {
    const auto grid = linspace(0, 3, 7);
    const auto tr = adaptive_45_at(original_field(kAllOnes), kSmoke, grid);
    CHECK(tr.times == grid);
    const auto sol = special_of(kAllOnes, kSmoke);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK((tr.states[i] - eval_special(sol, grid[i])).norm_inf() < 1e-9);
  }
}

TEST_CASE("convergence order") {
  const auto sol = special_of(kAllOnes, kSmoke);
  const std::array<double, 4> hs{0.1, 0.05, 0.025, 0.0125};
  const auto ref = eval_special(sol, 5.0);
  const double rk4 = estimate_order(original_field(kAllOnes), kSmoke, 5.0, hs, ref);
  CHECK(rk4 == doctest::Approx(4.0).epsilon(0.025));
  const double euler =
      estimate_order(original_field(kAllOnes), kSmoke, 5.0, hs, ref, FixedMethod::Euler);
  CHECK(euler == doctest::Approx(1.0).epsilon(0.1));

  const State<Real> zero(0, 0, 0);
  CHECK_THROWS_AS(estimate_order(original_field(kAllOnes), zero, 5.0, hs, zero),
                  DegenerateErrorSignal);

  SUBCASE("generated instances on smooth windows") {
    // Initial growth rates reach ~5 here, so h = 0.1 is still pre-asymptotic.
    const std::array<double, 4> fine{0.025, 0.0125, 0.00625, 0.003125};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto inst = random_admissible_instance<Real>(seed);
      const auto s = special_of(inst.params, inst.x0);
      const double t1 = 1.0;
      const double order =
          estimate_order(original_field(inst.params), inst.x0, t1, fine, eval_special(s, t1));
      CHECK(order == doctest::Approx(4.0).epsilon(0.025));
    }
  }
}

TEST_CASE("determinism") {
  const auto inst = random_admissible_instance<Real>(12);
  const auto a = adaptive_45(original_field(inst.params), inst.x0, 0.0, 5.0);
  const auto b = adaptive_45(original_field(inst.params), inst.x0, 0.0, 5.0);
  CHECK(a.times == b.times);
  CHECK(a.states == b.states);
  const auto c = rk4_fixed(original_field(inst.params), inst.x0, 0.0, 5.0, 0.01);
  const auto d = rk4_fixed(original_field(inst.params), inst.x0, 0.0, 5.0, 0.01);
  CHECK(c.states == d.states);
}

TEST_CASE("coordinate planes are invariant") {
  std::mt19937_64 rng(6);
  for (std::size_t zeroed = 0; zeroed < 3; ++zeroed) {
    const auto p = random_params(rng, 1.0);
    auto x0 = random_state(rng, 0.1, 1.0);
    x0[zeroed] = 0.0;
    const auto a = adaptive_45(original_field(p), x0, 0.0, 10.0);
    const auto b = rk4_fixed(original_field(p), x0, 0.0, 10.0, 0.01);
    for (const auto& x : a.states) CHECK(std::abs(x[zeroed]) <= 1e-13);
    for (const auto& x : b.states) CHECK(std::abs(x[zeroed]) <= 1e-13);
  }
}

TEST_CASE("integration commutes with the change of variables") {
  std::mt19937_64 rng(13);
  StepControl tight;
  tight.rtol = 1e-11;
  tight.atol = 1e-14;
  for (int k = 0; k < 10; ++k) {
    // Non-special data: the check covers the general flow, not just rays.
    const auto p = random_params(rng, 1.0);
    const auto x0 = random_state(rng, 0.05, 1.0);
    const TimeMap<Real> map{1.0};
    const auto ts = linspace(0, 2, 21);
    std::vector<double> taus;
    for (double t : ts) taus.push_back(tau_of_t(map, t));
    const auto xt = adaptive_45_at(original_field(p), x0, ts, tight);
    const auto yt = adaptive_45_at(transformed_field(p), x0, taus, tight);
    REQUIRE(xt.terminated == Termination::Completed);
    REQUIRE(yt.terminated == Termination::Completed);
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto y = transform_x_to_y(map, ts[i], xt.states[i]).y;
      worst = std::max(worst, (y - yt.states[i]).norm_inf());
    }
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("complex fixed step") {
  const ModelParams<Complex> p(2i, 1, 1, 1, 1, 1, 1);
  const State<Complex> x0(0.1, 0.1, 0.1);
  const auto sol = special_of(p, x0);
  const auto tr = rk4_fixed(original_field(p), x0, 0.0, std::numbers::pi, 1e-3);
  CHECK((tr.states.back() - eval_special(sol, std::numbers::pi)).norm_inf() < 1e-10);
  CHECK((tr.states.back() - x0).norm_inf() < 1e-10);
}
