#include "mayleonard/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mayleonard {

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::Completed: return "Completed";
    case Termination::BlowUp: return "BlowUp";
    case Termination::StepUnderflow: return "StepUnderflow";
  }
  return "?";
}

void StepControl::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("StepControl: rtol, atol must be > 0");
  if (!(h_min > 0.0) || !(h_min <= h_init) || !(h_init <= h_max))
    throw std::invalid_argument("StepControl: need 0 < h_min <= h_init <= h_max");
  if (!(norm_cap > 0.0)) throw std::invalid_argument("StepControl: norm_cap must be > 0");
}

namespace {

bool blown_up(const auto& x, double cap) { return !x.finite() || x.norm_inf() > cap; }

template <Scalar S>
State<S> rk4_step(const VectorField<S>& f, const State<S>& x, double h) {
  const S hh(h);
  const S half(0.5 * h);
  const State<S> k1 = f(x);
  const State<S> k2 = f(x + half * k1);
  const State<S> k3 = f(x + half * k2);
  const State<S> k4 = f(x + hh * k3);
  return x + S(h / 6.0) * (k1 + S(2) * k2 + S(2) * k3 + k4);
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Difference between the 5th-order weights and the embedded 4th-order ones.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

template <Scalar S>
class DormandPrince {
public:
  DormandPrince(const VectorField<S>& f, const State<S>& x0, double t0, const StepControl& ctrl)
      : f_(f), ctrl_(ctrl), t_(t0), x_(x0), h_(ctrl.h_init) {
    ctrl_.validate();
  }

  double time() const { return t_; }
  const State<S>& state() const { return x_; }

  /// Advances to t_end. Calls `on_step` after every accepted step.
  /// Returns Completed, or the failure kind with failure_time_ set.
  template <class OnStep>
  Termination advance_to(double t_end, OnStep&& on_step) {
    if (!have_k1_) {
      if (blown_up(x_, ctrl_.norm_cap)) {
        failure_time_ = t_;
        return Termination::BlowUp;
      }
      k1_ = f_(x_);
      have_k1_ = true;
    }
    while (t_ < t_end) {
      const double remaining = t_end - t_;
      const bool last = h_ >= remaining;
      const double h = last ? remaining : h_;
      if (!last && t_ + h <= t_) {
        // The step no longer moves the clock.
        failure_time_ = std::nextafter(t_, t_end);
        return Termination::StepUnderflow;
      }

      State<S> x_new, k7, err;
      bool ok = attempt(h, x_new, k7, err);
      double en = ok ? error_norm(x_new, err) : 2.0;
      if (!std::isfinite(en)) ok = false, en = 2.0;

      if (ok && en <= 1.0) {
        t_ = last ? t_end : t_ + h;
        if (blown_up(x_new, ctrl_.norm_cap)) {
          failure_time_ = t_;
          return Termination::BlowUp;
        }
        x_ = x_new;
        k1_ = k7;
        const double fac11 = std::pow(std::max(en, 1e-300), kExpo1);
        double fac = fac11 / std::pow(err_old_, kBeta);
        fac = std::clamp(fac / kSafe, 1.0 / kFacMax, 1.0 / kFacMin);
        err_old_ = std::max(en, 1e-4);
        const double h_next = std::min(h / fac, ctrl_.h_max);
        // A step shortened to hit t_end does not shrink the step size.
        h_ = last ? std::max(h_, h_next) : h_next;
        h_ = std::min(h_, ctrl_.h_max);
        on_step(t_, x_);
        continue;
      }

      const double shrink =
          ok ? std::min(1.0 / kFacMin, std::pow(en, kExpo1) / kSafe) : 1.0 / kFacMin;
      h_ = h / shrink;
      if (h_ < ctrl_.h_min) {
        failure_time_ = std::max(t_ + h, std::nextafter(t_, t_end));
        return Termination::StepUnderflow;
      }
    }
    return Termination::Completed;
  }

  double failure_time() const { return failure_time_; }

private:
  static constexpr double kSafe = 0.9;
  static constexpr double kBeta = 0.04;
  static constexpr double kExpo1 = 0.2 - kBeta * 0.75;
  static constexpr double kFacMin = 0.2;  // max growth 5x
  static constexpr double kFacMax = 10.0;  // max shrink 10x

  bool attempt(double h, State<S>& x_new, State<S>& k7, State<S>& err) {
    try {
      const S hs(h);
      const State<S>& k1 = k1_;
      const State<S> k2 = f_(x_ + hs * (S(a21) * k1));
      const State<S> k3 = f_(x_ + hs * (S(a31) * k1 + S(a32) * k2));
      const State<S> k4 = f_(x_ + hs * (S(a41) * k1 + S(a42) * k2 + S(a43) * k3));
      const State<S> k5 =
          f_(x_ + hs * (S(a51) * k1 + S(a52) * k2 + S(a53) * k3 + S(a54) * k4));
      const State<S> k6 = f_(
          x_ + hs * (S(a61) * k1 + S(a62) * k2 + S(a63) * k3 + S(a64) * k4 + S(a65) * k5));
      x_new = x_ + hs * (S(a71) * k1 + S(a73) * k3 + S(a74) * k4 + S(a75) * k5 + S(a76) * k6);
      if (!x_new.finite()) return false;
      k7 = f_(x_new);
      err = hs * (S(e1) * k1 + S(e3) * k3 + S(e4) * k4 + S(e5) * k5 + S(e6) * k6 + S(e7) * k7);
      return err.finite();
    } catch (const OverflowError&) {
      return false;
    }
  }

  double error_norm(const State<S>& x_new, const State<S>& err) const {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double sc =
          ctrl_.atol + ctrl_.rtol * std::max(std::abs(x_[i]), std::abs(x_new[i]));
      const double q = std::abs(err[i]) / sc;
      s += q * q;
    }
    return std::sqrt(s / 3.0);
  }

  const VectorField<S>& f_;
  StepControl ctrl_;
  double t_;
  State<S> x_;
  State<S> k1_;
  bool have_k1_ = false;
  double h_;
  double err_old_ = 1e-4;
  double failure_time_ = 0.0;
};

}  // namespace

template <Scalar S>
Trajectory<S> fixed_step(const VectorField<S>& field, const State<S>& x0, double t0, double t1,
                         double h, FixedMethod method, double norm_cap) {
  if (!(h > 0.0)) throw std::invalid_argument("fixed_step: h must be positive");
  if (!(t1 >= t0)) throw std::invalid_argument("fixed_step: need t1 >= t0");
  Trajectory<S> traj;
  traj.times.push_back(t0);
  traj.states.push_back(x0);
  if (blown_up(x0, norm_cap)) {
    traj.terminated = Termination::BlowUp;
    traj.failure_time = t0;
    return traj;
  }

  const double span = t1 - t0;
  auto n = static_cast<std::size_t>(std::ceil(span / h));
  // Absorb a final sliver produced by rounding of span / h.
  if (n > 0 && t0 + static_cast<double>(n - 1) * h >= t1 - 1e-12 * h) --n;

  State<S> x = x0;
  double t = t0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double t_next = k == n ? t1 : t0 + static_cast<double>(k) * h;
    const double step = t_next - t;
    State<S> x_next;
    try {
      x_next = method == FixedMethod::RK4 ? rk4_step(field, x, step)
                                          : x + S(step) * field(x);
    } catch (const OverflowError&) {
      traj.terminated = Termination::BlowUp;
      traj.failure_time = t_next;
      return traj;
    }
    if (blown_up(x_next, norm_cap)) {
      traj.terminated = Termination::BlowUp;
      traj.failure_time = t_next;
      return traj;
    }
    x = x_next;
    t = t_next;
    traj.times.push_back(t);
    traj.states.push_back(x);
  }
  return traj;
}

template <Scalar S>
Trajectory<S> adaptive_45(const VectorField<S>& field, const State<S>& x0, double t0, double t1,
                          const StepControl& ctrl) {
  if (!(t1 >= t0)) throw std::invalid_argument("adaptive_45: need t1 >= t0");
  Trajectory<S> traj;
  traj.times.push_back(t0);
  traj.states.push_back(x0);
  DormandPrince<S> dp(field, x0, t0, ctrl);
  traj.terminated = dp.advance_to(t1, [&traj](double t, const State<S>& x) {
    traj.times.push_back(t);
    traj.states.push_back(x);
  });
  traj.failure_time = dp.failure_time();
  return traj;
}

template <Scalar S>
Trajectory<S> adaptive_45_at(const VectorField<S>& field, const State<S>& x0,
                             std::span<const double> times, const StepControl& ctrl) {
  if (times.empty()) throw std::invalid_argument("adaptive_45_at: empty output grid");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("adaptive_45_at: output times must increase");
  Trajectory<S> traj;
  traj.times.push_back(times.front());
  traj.states.push_back(x0);
  DormandPrince<S> dp(field, x0, times.front(), ctrl);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const Termination term = dp.advance_to(times[i], [](double, const State<S>&) {});
    if (term != Termination::Completed) {
      traj.terminated = term;
      traj.failure_time = dp.failure_time();
      return traj;
    }
    traj.times.push_back(times[i]);
    traj.states.push_back(dp.state());
  }
  return traj;
}

template <Scalar S>
double estimate_order(const VectorField<S>& field, const State<S>& x0, double t1,
                      std::span<const double> h_list, const State<S>& reference,
                      FixedMethod method) {
  if (h_list.size() < 3) throw std::invalid_argument("estimate_order: need at least 3 step sizes");
  std::vector<double> lx, ly;
  for (double h : h_list) {
    const auto traj = fixed_step(field, x0, 0.0, t1, h, method);
    if (traj.terminated != Termination::Completed)
      throw std::runtime_error("estimate_order: integration did not complete");
    const double err = (traj.states.back() - reference).norm_inf();
    if (!(err >= 1e-14))
      throw DegenerateErrorSignal("estimate_order: error at round-off floor; enlarge h");
    lx.push_back(std::log(h));
    ly.push_back(std::log(err));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

#define MAYLEONARD_INSTANTIATE_INTEGRATOR(S)                                                   \
  template Trajectory<S> fixed_step(const VectorField<S>&, const State<S>&, double, double,    \
                                    double, FixedMethod, double);                              \
  template Trajectory<S> adaptive_45(const VectorField<S>&, const State<S>&, double, double,   \
                                     const StepControl&);                                      \
  template Trajectory<S> adaptive_45_at(const VectorField<S>&, const State<S>&,                \
                                        std::span<const double>, const StepControl&);          \
  template double estimate_order(const VectorField<S>&, const State<S>&, double,               \
                                 std::span<const double>, const State<S>&, FixedMethod);

MAYLEONARD_INSTANTIATE_INTEGRATOR(Real)
MAYLEONARD_INSTANTIATE_INTEGRATOR(Complex)

}  // namespace mayleonard
