#include "mayleonard/closed_form.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace mayleonard {

namespace {

constexpr double kPoleTol = 1e-12;
constexpr double kSmallEta = 1e-8;

}  // namespace

template <Scalar S>
std::array<S, 3> linear_forms(const ModelParams<S>& params, const State<S>& x0) {
  std::array<S, 3> e{};
  for (std::size_t n = 0; n < 3; ++n) {
    S s = params.a(n, 0) * x0[0];
    s += params.a(n, 1) * x0[1];
    s += params.a(n, 2) * x0[2];
    e[n] = check_finite(s, "linear_forms");
  }
  return e;
}

template <Scalar S>
AdmissibilityReport<S> check_admissibility(const ModelParams<S>& params, const State<S>& x0,
                                           double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("admissibility tolerance must be positive");
  AdmissibilityReport<S> rep;
  rep.e_values = linear_forms(params, x0);
  const auto& e = rep.e_values;
  rep.residuals = {e[0] - e[1], e[1] - e[2]};
  rep.max_residual =
      std::max({std::abs(e[0] - e[1]), std::abs(e[1] - e[2]), std::abs(e[0] - e[2])});
  const double scale = std::max({std::abs(e[0]), std::abs(e[1]), std::abs(e[2])});
  rep.tolerance = tol * (1.0 + scale);
  rep.pass = rep.max_residual <= rep.tolerance;
  if (rep.pass) rep.z = (e[0] + e[1] + e[2]) / S(3);
  return rep;
}

template <Scalar S>
std::variant<SpecialSolution<S>, AdmissibilityReport<S>> make_special(
    const ModelParams<S>& params, const State<S>& x0, double tol) {
  auto rep = check_admissibility(params, x0, tol);
  if (!rep.pass) return rep;
  return SpecialSolution<S>(x0, *rep.z, params.eta());
}

template <Scalar S>
S denominator(const SpecialSolution<S>& sol, double t) {
  const S& eta = sol.eta();
  const S& z = sol.z();
  if (std::abs(eta) < kSmallEta) return S(1) + z * t;
  const S w = -eta * t;
  // (z/eta)(1 - e^{-eta t}) == z t (e^w - 1)/w
  return check_finite(S(std::exp(w) + z * t * expm1_ratio(w)), "denominator");
}

template <Scalar S>
State<S> eval_special(const SpecialSolution<S>& sol, double t) {
  const S d = denominator(sol, t);
  if (std::abs(d) < kPoleTol)
    throw SingularityError("eval_special: denominator vanishes at t=" + std::to_string(t));
  State<S> x = sol.x0() / d;
  if (!x.finite()) throw OverflowError("eval_special: non-finite state");
  return x;
}

template <Scalar S>
State<S> eval_special_derivative(const SpecialSolution<S>& sol, double t) {
  const S d = denominator(sol, t);
  if (std::abs(d) < kPoleTol)
    throw SingularityError("eval_special_derivative: denominator vanishes");
  const S dprime = std::abs(sol.eta()) < kSmallEta ? sol.z()
                                                    : (sol.z() - sol.eta()) *
                                                          std::exp(-sol.eta() * t);
  // xdot_n = x_n (-D'/D) = -x0_n D' / D^2
  const S factor = -dprime / (d * d);
  State<S> v = sol.x0() * factor;
  if (!v.finite()) throw OverflowError("eval_special_derivative: non-finite state");
  return v;
}

template <Scalar S>
State<S> eval_y_special(const State<S>& y0, const S& z, const S& tau) {
  const S d = S(1) + z * tau;
  if (std::abs(d) <= kPoleTol) throw SingularityError("eval_y_special: 1 + z tau vanishes");
  State<S> y = y0 / d;
  if (!y.finite()) throw OverflowError("eval_y_special: non-finite state");
  return y;
}

template <Scalar S>
S tau_of_t(const TimeMap<S>& map, double t) {
  const S w = map.eta * t;
  S tau = std::abs(w) < kSmallEta ? S(t) * (S(1) + w / S(2)) : expm1(w) / map.eta;
  return check_finite(tau, "tau_of_t");
}

template <Scalar S>
TransformedPoint<S> transform_x_to_y(const TimeMap<S>& map, double t, const State<S>& x) {
  const S decay = std::exp(-map.eta * t);
  State<S> y = x * decay;
  if (!y.finite()) throw OverflowError("transform_x_to_y: non-finite state");
  return {tau_of_t(map, t), y};
}

template <Scalar S>
State<S> transform_y_to_x(const TimeMap<S>& map, double t, const State<S>& y) {
  State<S> x = y * std::exp(map.eta * t);
  if (!x.finite()) throw OverflowError("transform_y_to_x: non-finite state");
  return x;
}

std::optional<double> blow_up_time(const SpecialSolution<Real>& sol) {
  const double eta = sol.eta();
  const double z = sol.z();
  if (std::abs(eta) < kSmallEta) {
    if (z < 0.0) return -1.0 / z;
    return std::nullopt;
  }
  // D = 0  <=>  e^{-eta t} = z / (z - eta)
  const double gap = z - eta;
  if (gap == 0.0) return std::nullopt;
  if (!(z / gap > 0.0)) return std::nullopt;
  const double t = -std::log1p(eta / gap) / eta;
  if (t > 0.0 && std::isfinite(t)) return t;
  return std::nullopt;
}

std::optional<double> period_of(const Complex& eta) {
  if (eta.real() != 0.0 || eta.imag() == 0.0) return std::nullopt;
  return 2.0 * std::numbers::pi / std::abs(eta.imag());
}

std::optional<double> transverse_growth(const ModelParams<Complex>& params,
                                        const SpecialSolution<Complex>& sol) {
  if (!period_of(sol.eta())) return std::nullopt;
  const Complex z = sol.z();
  const Complex c = z / sol.eta();
  if (!(std::abs(1.0 - c) < std::abs(c))) return 1.0;

  Complex m[3][3];
  for (std::size_t n = 0; n < 3; ++n)
    for (std::size_t k = 0; k < 3; ++k) m[n][k] = sol.x0()[n] * params.a(n, k);
  const Complex trace = m[0][0] + m[1][1] + m[2][2];
  const Complex det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                      m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                      m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  // z is the eigenvalue along x0; the other two solve mu^2 - s mu + p = 0.
  const Complex s = trace - z;
  const Complex p = det / z;
  const Complex d = std::sqrt(s * s - 4.0 * p);
  double growth = 1.0;
  for (const Complex mu : {(s + d) / 2.0, (s - d) / 2.0})
    growth = std::max(growth, std::exp(2.0 * std::numbers::pi * (mu / z).imag()));
  return growth;
}

template <Scalar S>
VerifyReport verify_special(const ModelParams<S>& params, const SpecialSolution<S>& sol,
                            std::span<const double> grid, double tol) {
  if (sol.eta() != params.eta())
    throw std::invalid_argument("verify_special: solution and parameters disagree on eta");

  if constexpr (!is_complex_v<S>) {
    if (const auto tstar = blow_up_time(sol)) {
      for (double t : grid)
        if (std::abs(t - *tstar) < kBlowUpMargin)
          throw SingularityError("verify_special: grid point t=" + std::to_string(t) +
                                 " is within 1e-3 of blow-up time " + std::to_string(*tstar));
    }
  }

  VerifyReport rep;
  rep.tolerance = tol;
  for (double t : grid) {
    const State<S> x = eval_special(sol, t);
    const State<S> r = eval_special_derivative(sol, t) - rhs(params, x);
    const double abs_res = r.norm_inf();
    const double scaled = abs_res / (1.0 + x.norm_inf());
    rep.max_residual = std::max(rep.max_residual, abs_res);
    if (scaled >= rep.max_scaled_residual) {
      rep.max_scaled_residual = scaled;
      rep.worst_time = t;
    }
    ++rep.points;
  }
  rep.pass = rep.max_scaled_residual < tol;
  return rep;
}

#define MAYLEONARD_INSTANTIATE_CLOSED_FORM(S)                                                 \
  template std::array<S, 3> linear_forms(const ModelParams<S>&, const State<S>&);             \
  template AdmissibilityReport<S> check_admissibility(const ModelParams<S>&, const State<S>&, \
                                                      double);                                \
  template std::variant<SpecialSolution<S>, AdmissibilityReport<S>> make_special(             \
      const ModelParams<S>&, const State<S>&, double);                                        \
  template S denominator(const SpecialSolution<S>&, double);                                  \
  template State<S> eval_special(const SpecialSolution<S>&, double);                          \
  template State<S> eval_special_derivative(const SpecialSolution<S>&, double);               \
  template State<S> eval_y_special(const State<S>&, const S&, const S&);                      \
  template S tau_of_t(const TimeMap<S>&, double);                                             \
  template TransformedPoint<S> transform_x_to_y(const TimeMap<S>&, double, const State<S>&);  \
  template State<S> transform_y_to_x(const TimeMap<S>&, double, const State<S>&);             \
  template VerifyReport verify_special(const ModelParams<S>&, const SpecialSolution<S>&,      \
                                       std::span<const double>, double);

MAYLEONARD_INSTANTIATE_CLOSED_FORM(Real)
MAYLEONARD_INSTANTIATE_CLOSED_FORM(Complex)

}  // namespace mayleonard
