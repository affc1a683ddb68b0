#pragma once

#include <optional>
#include <span>
#include <variant>

#include "mayleonard/model.hpp"

namespace mayleonard {

/// Values of the three linear forms E_n = sum_m a_nm x_m(0), their two
/// consecutive differences and the admissibility verdict.
template <Scalar S>
struct AdmissibilityReport {
  std::array<S, 3> e_values{};
  std::array<S, 2> residuals{};  // E1 - E2, E2 - E3
  std::optional<S> z;
  double max_residual = 0.0;
  double tolerance = 0.0;  // absolute bound tol * (1 + max |E_i|)
  bool pass = false;
};

/// An admissible (x(0), z, eta) triple. All components of the solution
/// share the scalar factor 1/D(t):
///
///   x_n(t) = x_n(0) / D(t),  D(t) = e^{-eta t} + (z/eta)(1 - e^{-eta t}).
template <Scalar S>
class SpecialSolution {
public:
  const State<S>& x0() const { return x0_; }
  const S& z() const { return z_; }
  const S& eta() const { return eta_; }

  /// Bypasses the admissibility check. Only for diagnostics that need a
  /// deliberately inconsistent z (e.g. checking that verification fails).
  static SpecialSolution unchecked(const State<S>& x0, S z, S eta) {
    return SpecialSolution(x0, z, eta);
  }

private:
  SpecialSolution(const State<S>& x0, S z, S eta) : x0_(x0), z_(z), eta_(eta) {}

  template <Scalar T>
  friend std::variant<SpecialSolution<T>, AdmissibilityReport<T>> make_special(
      const ModelParams<T>&, const State<T>&, double);

  State<S> x0_;
  S z_;
  S eta_;
};

template <Scalar S>
struct TimeMap {
  S eta;
};

template <Scalar S>
struct TransformedPoint {
  S tau;
  State<S> y;
};

struct VerifyReport {
  double max_residual = 0.0;         // max over grid of max_n |r_n(t)|
  double max_scaled_residual = 0.0;  // max over grid of |r(t)| / (1 + ||x(t)||)
  double worst_time = 0.0;
  double tolerance = 1e-10;
  std::size_t points = 0;
  bool pass = false;
};

inline constexpr double kDefaultAdmissibilityTol = 1e-9;
inline constexpr double kVerifyTol = 1e-10;
inline constexpr double kBlowUpMargin = 1e-3;

template <Scalar S>
std::array<S, 3> linear_forms(const ModelParams<S>& params, const State<S>& x0);

template <Scalar S>
AdmissibilityReport<S> check_admissibility(const ModelParams<S>& params, const State<S>& x0,
                                           double tol = kDefaultAdmissibilityTol);

/// Returns the solution with z = (E1 + E2 + E3)/3, or the failing report.
template <Scalar S>
std::variant<SpecialSolution<S>, AdmissibilityReport<S>> make_special(
    const ModelParams<S>& params, const State<S>& x0, double tol = kDefaultAdmissibilityTol);

/// D(t); uses 1 + z t when |eta| < 1e-8.
template <Scalar S>
S denominator(const SpecialSolution<S>& sol, double t);

/// Throws SingularityError when |D(t)| < 1e-12.
template <Scalar S>
State<S> eval_special(const SpecialSolution<S>& sol, double t);

/// Time derivative of eval_special from the analytic D'(t) = (z - eta) e^{-eta t}.
template <Scalar S>
State<S> eval_special_derivative(const SpecialSolution<S>& sol, double t);

/// y(tau) = y(0) / (1 + z tau); throws SingularityError when |1 + z tau| < 1e-12.
template <Scalar S>
State<S> eval_y_special(const State<S>& y0, const S& z, const S& tau);

/// tau = (e^{eta t} - 1)/eta, with t (1 + eta t / 2) below |eta t| < 1e-8.
template <Scalar S>
S tau_of_t(const TimeMap<S>& map, double t);

/// (tau(t), e^{-eta t} x).
template <Scalar S>
TransformedPoint<S> transform_x_to_y(const TimeMap<S>& map, double t, const State<S>& x);

/// Inverse of transform_x_to_y: e^{eta t} y.
template <Scalar S>
State<S> transform_y_to_x(const TimeMap<S>& map, double t, const State<S>& y);

/// Smallest t* > 0 with D(t*) = 0, if any.
std::optional<double> blow_up_time(const SpecialSolution<Real>& sol);

/// 2 pi / |Im eta| for purely imaginary eta.
std::optional<double> period_of(const Complex& eta);
inline std::optional<double> period_of(Real) { return std::nullopt; }

/// Per-period growth factor of perturbations transverse to a periodic ray.
/// Along the ray the Jacobian is (eta - z f) I - f diag(x0) A with f = 1/D,
/// so the monodromy is exact: each transverse eigenvalue mu of diag(x0) A
/// contributes |exp(-2 pi i mu / z)| when |1 - z/eta| < |z/eta|, and 1
/// otherwise. nullopt unless eta is purely imaginary.
std::optional<double> transverse_growth(const ModelParams<Complex>& params,
                                        const SpecialSolution<Complex>& sol);

/// ODE residual xdot_closed(t) - rhs(x_closed(t)) on `grid`. Real mode
/// rejects grid points within 1e-3 of the blow-up time with SingularityError.
template <Scalar S>
VerifyReport verify_special(const ModelParams<S>& params, const SpecialSolution<S>& sol,
                            std::span<const double> grid, double tol = kVerifyTol);

#define MAYLEONARD_EXTERN_CLOSED_FORM(S)                                                     \
  extern template std::array<S, 3> linear_forms(const ModelParams<S>&, const State<S>&);     \
  extern template AdmissibilityReport<S> check_admissibility(const ModelParams<S>&,          \
                                                             const State<S>&, double);       \
  extern template std::variant<SpecialSolution<S>, AdmissibilityReport<S>> make_special(     \
      const ModelParams<S>&, const State<S>&, double);                                       \
  extern template S denominator(const SpecialSolution<S>&, double);                          \
  extern template State<S> eval_special(const SpecialSolution<S>&, double);                  \
  extern template State<S> eval_special_derivative(const SpecialSolution<S>&, double);       \
  extern template State<S> eval_y_special(const State<S>&, const S&, const S&);              \
  extern template S tau_of_t(const TimeMap<S>&, double);                                     \
  extern template TransformedPoint<S> transform_x_to_y(const TimeMap<S>&, double,            \
                                                       const State<S>&);                     \
  extern template State<S> transform_y_to_x(const TimeMap<S>&, double, const State<S>&);     \
  extern template VerifyReport verify_special(const ModelParams<S>&,                         \
                                              const SpecialSolution<S>&,                     \
                                              std::span<const double>, double);

MAYLEONARD_EXTERN_CLOSED_FORM(Real)
MAYLEONARD_EXTERN_CLOSED_FORM(Complex)
#undef MAYLEONARD_EXTERN_CLOSED_FORM

}  // namespace mayleonard
