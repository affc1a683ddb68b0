#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "mayleonard/closed_form.hpp"
#include "mayleonard/constraint_solver.hpp"
#include "mayleonard/integrator.hpp"
#include "mayleonard/model.hpp"

namespace testing {

using namespace mayleonard;

inline constexpr double kEpsilon = std::numeric_limits<double>::epsilon();

/// Distance in units in the last place between two doubles of equal sign.
inline std::int64_t ulp_distance(double a, double b) {
  if (a == b) return 0;
  if (std::signbit(a) != std::signbit(b)) return std::numeric_limits<std::int64_t>::max();
  std::int64_t ia, ib;
  std::memcpy(&ia, &a, sizeof a);
  std::memcpy(&ib, &b, sizeof b);
  return ia > ib ? ia - ib : ib - ia;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline ModelParams<Real> random_params(std::mt19937_64& rng, double eta, double lo = 0.1,
                                       double hi = 2.0) {
  return ModelParams<Real>(eta, uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi),
                           uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi));
}

inline State<Real> random_state(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

/// 3x3 determinant by cofactor expansion.
template <class S>
S det3(const Matrix3<S>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Cramer's rule for A x = b.
template <class S>
std::array<S, 3> cramer(const Matrix3<S>& a, const std::array<S, 3>& b) {
  const S d = det3(a);
  std::array<S, 3> x{};
  for (std::size_t k = 0; k < 3; ++k) {
    Matrix3<S> ak = a;
    for (std::size_t r = 0; r < 3; ++r) ak[r][k] = b[r];
    x[k] = det3(ak) / d;
  }
  return x;
}

/// Root of a sign change of f on [lo, hi] by bisection.
template <class F>
double bisect(F f, double lo, double hi, double tol) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// First sign change of f on a uniform scan of [lo, hi], refined by bisection.
template <class F>
std::optional<double> first_root(F f, double lo, double hi, int samples, double tol) {
  double prev = lo;
  for (int k = 1; k <= samples; ++k) {
    const double t = lo + (hi - lo) * k / samples;
    if ((f(t) < 0) != (f(prev) < 0)) return bisect(f, prev, t, tol);
    prev = t;
  }
  return std::nullopt;
}

/// Exact logistic solution x' = x (1 - x).
inline double logistic(double x0, double t) {
  return x0 * std::exp(t) / (1.0 + x0 * std::expm1(t));
}

/// The original cyclic field written out by hand, term by term.
inline State<Real> cyclic_field(double alpha, double beta, const State<Real>& x) {
  return {x[0] * (1.0 - x[0] - alpha * x[1] - beta * x[2]),
          x[1] * (1.0 - beta * x[0] - x[1] - alpha * x[2]),
          x[2] * (1.0 - alpha * x[0] - beta * x[1] - x[2])};
}

template <Scalar S>
SpecialSolution<S> special_of(const ModelParams<S>& p, const State<S>& x0) {
  return std::get<SpecialSolution<S>>(make_special(p, x0));
}

/// Smallest |D| on a uniform scan of [t0, t1].
template <Scalar S>
double min_abs_denominator(const SpecialSolution<S>& sol, double t0, double t1, int samples) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= samples; ++k)
    m = std::min(m, std::abs(denominator(sol, t0 + (t1 - t0) * k / samples)));
  return m;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  g.back() = b;
  return g;
}

}  // namespace testing
