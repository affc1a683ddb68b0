#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mayleonard/model.hpp"

namespace mayleonard {

/// Autonomous vector field over the working field.
template <Scalar S>
using VectorField = std::function<State<S>(const State<S>&)>;

template <Scalar S>
VectorField<S> original_field(const ModelParams<S>& params) {
  return [params](const State<S>& x) { return rhs(params, x); };
}

template <Scalar S>
VectorField<S> transformed_field(const ModelParams<S>& params) {
  return [params](const State<S>& y) { return rhs_transformed(params, y); };
}

enum class Termination { Completed, BlowUp, StepUnderflow };
std::string_view termination_name(Termination t);

template <Scalar S>
struct Trajectory {
  std::vector<double> times;
  std::vector<State<S>> states;
  Termination terminated = Termination::Completed;
  double failure_time = 0.0;  // meaningful unless Completed
};

inline constexpr double kDefaultNormCap = 1e12;

struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-14;
  double h_max = 0.5;
  double norm_cap = kDefaultNormCap;

  /// Throws std::invalid_argument when the bounds are inconsistent.
  void validate() const;
};

enum class FixedMethod { RK4, Euler };

/// Fixed-step integration from t0 to t1 (t1 >= t0); the last step is
/// shortened to land on t1. Records every step.
template <Scalar S>
Trajectory<S> fixed_step(const VectorField<S>& field, const State<S>& x0, double t0, double t1,
                         double h, FixedMethod method, double norm_cap = kDefaultNormCap);

template <Scalar S>
Trajectory<S> rk4_fixed(const VectorField<S>& field, const State<S>& x0, double t0, double t1,
                        double h, double norm_cap = kDefaultNormCap) {
  return fixed_step(field, x0, t0, t1, h, FixedMethod::RK4, norm_cap);
}

/// Dormand-Prince 5(4) with PI step-size control. Records every accepted step.
template <Scalar S>
Trajectory<S> adaptive_45(const VectorField<S>& field, const State<S>& x0, double t0, double t1,
                          const StepControl& ctrl = {});

/// Adaptive integration reported at the given increasing output times
/// (the first entry is the start time).
template <Scalar S>
Trajectory<S> adaptive_45_at(const VectorField<S>& field, const State<S>& x0,
                             std::span<const double> times, const StepControl& ctrl = {});

/// Least-squares slope of log(error) against log(h), where error is the
/// max-norm distance of the endpoint from `reference` at t1 (start t = 0).
/// Throws DegenerateErrorSignal when any error is below 1e-14.
template <Scalar S>
double estimate_order(const VectorField<S>& field, const State<S>& x0, double t1,
                      std::span<const double> h_list, const State<S>& reference,
                      FixedMethod method = FixedMethod::RK4);

#define MAYLEONARD_EXTERN_INTEGRATOR(S)                                                      \
  extern template Trajectory<S> fixed_step(const VectorField<S>&, const State<S>&, double,   \
                                           double, double, FixedMethod, double);             \
  extern template Trajectory<S> adaptive_45(const VectorField<S>&, const State<S>&, double,  \
                                            double, const StepControl&);                     \
  extern template Trajectory<S> adaptive_45_at(const VectorField<S>&, const State<S>&,       \
                                               std::span<const double>, const StepControl&); \
  extern template double estimate_order(const VectorField<S>&, const State<S>&, double,      \
                                        std::span<const double>, const State<S>&,            \
                                        FixedMethod);

MAYLEONARD_EXTERN_INTEGRATOR(Real)
MAYLEONARD_EXTERN_INTEGRATOR(Complex)
#undef MAYLEONARD_EXTERN_INTEGRATOR

}  // namespace mayleonard
