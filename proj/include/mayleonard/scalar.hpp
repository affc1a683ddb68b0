#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <string_view>

#include "mayleonard/errors.hpp"

namespace mayleonard {

using Real = double;
using Complex = std::complex<double>;

/// The working field: a run uses either Real or Complex throughout.
template <class S>
concept Scalar = std::same_as<S, Real> || std::same_as<S, Complex>;

template <Scalar S>
inline constexpr bool is_complex_v = std::same_as<S, Complex>;

inline bool is_finite(Real v) { return std::isfinite(v); }
inline bool is_finite(const Complex& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

/// Throws OverflowError when `v` is not finite; `what` names the quantity.
template <Scalar S>
const S& check_finite(const S& v, std::string_view what) {
  if (!is_finite(v)) throw OverflowError(std::string(what) + ": non-finite value");
  return v;
}

/// e^w - 1 without cancellation for small |w|.
inline Real expm1(Real w) { return std::expm1(w); }

inline Complex expm1(const Complex& w) {
  // Re: e^a cos b - 1 = expm1(a) cos b - 2 sin^2(b/2); Im: e^a sin b
  const double a = w.real();
  const double b = w.imag();
  const double s = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

/// (e^w - 1)/w, with the series 1 + w/2 below |w| < 1e-8.
template <Scalar S>
S expm1_ratio(const S& w) {
  if (std::abs(w) < 1e-8) return S(1) + w / S(2);
  return expm1(w) / w;
}

/// Componentwise 3-vector over the working field. Holds x_n or y_n; the
/// coordinate system is tracked by the caller.
template <Scalar S>
class State {
public:
  constexpr State() = default;
  constexpr State(S x1, S x2, S x3) : v_{x1, x2, x3} {}
  constexpr explicit State(const std::array<S, 3>& v) : v_(v) {}

  constexpr S& operator[](std::size_t i) { return v_[i]; }
  constexpr const S& operator[](std::size_t i) const { return v_[i]; }

  constexpr auto begin() { return v_.begin(); }
  constexpr auto end() { return v_.end(); }
  constexpr auto begin() const { return v_.begin(); }
  constexpr auto end() const { return v_.end(); }
  static constexpr std::size_t size() { return 3; }

  const std::array<S, 3>& values() const { return v_; }

  State& operator+=(const State& o) {
    for (std::size_t i = 0; i < 3; ++i) v_[i] += o.v_[i];
    return *this;
  }
  State& operator-=(const State& o) {
    for (std::size_t i = 0; i < 3; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  State& operator*=(const S& k) {
    for (auto& c : v_) c *= k;
    return *this;
  }

  friend State operator+(State a, const State& b) { return a += b; }
  friend State operator-(State a, const State& b) { return a -= b; }
  friend State operator*(const S& k, State a) { return a *= k; }
  friend State operator*(State a, const S& k) { return a *= k; }
  friend State operator/(State a, const S& k) {
    for (auto& c : a.v_) c /= k;
    return a;
  }
  friend bool operator==(const State&, const State&) = default;

  bool finite() const {
    for (const auto& c : v_)
      if (!is_finite(c)) return false;
    return true;
  }

  /// Max-modulus norm.
  double norm_inf() const {
    double m = 0.0;
    for (const auto& c : v_) m = std::max(m, std::abs(c));
    return m;
  }

  double norm2() const {
    double s = 0.0;
    for (const auto& c : v_) s += std::norm(c);
    return std::sqrt(s);
  }

private:
  std::array<S, 3> v_{};
};

template <Scalar S>
using Matrix3 = std::array<std::array<S, 3>, 3>;

}  // namespace mayleonard
