#include "mayleonard/model.hpp"

#include <stdexcept>
#include <utility>

namespace mayleonard {

template <Scalar S>
ModelParams<S>::ModelParams(S eta, S a12, S a13, S a21, S a23, S a31, S a32)
    : eta_(eta), a_{{{S(1), a12, a13}, {a21, S(1), a23}, {a31, a32, S(1)}}} {
  check_finite(eta_, "eta");
  for (const auto& row : a_)
    for (const auto& v : row) check_finite(v, "coupling");
}

template <Scalar S>
ModelParams<S> ModelParams<S>::from_matrix(S eta, const Matrix3<S>& a) {
  for (std::size_t n = 0; n < 3; ++n)
    if (a[n][n] != S(1))
      throw std::invalid_argument("coupling matrix must have unit diagonal");
  return ModelParams(eta, a[0][1], a[0][2], a[1][0], a[1][2], a[2][0], a[2][1]);
}

template <Scalar S>
ModelParams<S> ModelParams<S>::with_eta(S eta) const {
  ModelParams p = *this;
  p.eta_ = check_finite(eta, "eta");
  return p;
}

template <Scalar S>
State<S> rhs(const ModelParams<S>& params, const State<S>& x) {
  State<S> out;
  for (std::size_t n = 0; n < 3; ++n) {
    // Left-to-right subtraction matches the hand-written cyclic field.
    S bracket = params.eta();
    for (std::size_t m = 0; m < 3; ++m) bracket -= params.a(n, m) * x[m];
    out[n] = check_finite(S(x[n] * bracket), "rhs");
  }
  return out;
}

template <Scalar S>
State<S> rhs_transformed(const ModelParams<S>& params, const State<S>& y) {
  State<S> out;
  for (std::size_t n = 0; n < 3; ++n) {
    S sum = params.a(n, 0) * y[0];
    sum += params.a(n, 1) * y[1];
    sum += params.a(n, 2) * y[2];
    out[n] = check_finite(S(-y[n] * sum), "rhs_transformed");
  }
  return out;
}

template <Scalar S>
Matrix3<S> jacobian(const ModelParams<S>& params, const State<S>& x) {
  Matrix3<S> j{};
  for (std::size_t n = 0; n < 3; ++n) {
    for (std::size_t m = 0; m < 3; ++m) {
      if (n == m) {
        S d = params.eta() - S(2) * x[n];
        for (std::size_t k = 0; k < 3; ++k)
          if (k != n) d -= params.a(n, k) * x[k];
        j[n][m] = d;
      } else {
        j[n][m] = -params.a(n, m) * x[n];
      }
      check_finite(j[n][m], "jacobian");
    }
  }
  return j;
}

template <Scalar S>
State<S> interior_equilibrium(const ModelParams<S>& params) {
  Matrix3<S> a = params.couplings();
  std::array<S, 3> b{params.eta(), params.eta(), params.eta()};

  double norm = 0.0;
  for (const auto& row : a) {
    double s = 0.0;
    for (const auto& v : row) s += std::abs(v);
    norm = std::max(norm, s);
  }

  // Gaussian elimination with partial pivoting.
  S det(1);
  for (std::size_t k = 0; k < 3; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < 3; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    if (p != k) {
      std::swap(a[p], a[k]);
      std::swap(b[p], b[k]);
      det = -det;
    }
    det *= a[k][k];
    if (a[k][k] == S(0)) break;
    for (std::size_t i = k + 1; i < 3; ++i) {
      const S f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < 3; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  if (!(std::abs(det) >= 1e-12 * norm * norm * norm))
    throw SingularError("interior_equilibrium: coupling matrix is singular");

  State<S> x;
  for (std::size_t k = 3; k-- > 0;) {
    S s = b[k];
    for (std::size_t j = k + 1; j < 3; ++j) s -= a[k][j] * x[j];
    x[k] = check_finite(S(s / a[k][k]), "interior_equilibrium");
  }
  return x;
}

template <Scalar S>
ModelParams<S> reduce_symmetric(const SymmetricParams<S>& sym) {
  const S& al = sym.alpha;
  const S& be = sym.beta;
  return ModelParams<S>(S(1), al, be, be, al, al, be);
}

template <Scalar S>
RescaledProblem<S> rescale_to_unit_eta(const ModelParams<S>& params, const State<S>& x0) {
  const S eta = params.eta();
  if (std::abs(eta) < 1e-300) throw ZeroEtaError("rescale_to_unit_eta: eta is zero");
  State<S> scaled = x0 / eta;
  if (!scaled.finite()) throw OverflowError("rescale_to_unit_eta: non-finite state");
  return {params.with_eta(S(1)), scaled, eta};
}

#define MAYLEONARD_INSTANTIATE_MODEL(S)                                                \
  template class ModelParams<S>;                                                       \
  template State<S> rhs(const ModelParams<S>&, const State<S>&);                       \
  template State<S> rhs_transformed(const ModelParams<S>&, const State<S>&);           \
  template Matrix3<S> jacobian(const ModelParams<S>&, const State<S>&);                \
  template State<S> interior_equilibrium(const ModelParams<S>&);                       \
  template ModelParams<S> reduce_symmetric(const SymmetricParams<S>&);                 \
  template RescaledProblem<S> rescale_to_unit_eta(const ModelParams<S>&, const State<S>&);

MAYLEONARD_INSTANTIATE_MODEL(Real)
MAYLEONARD_INSTANTIATE_MODEL(Complex)

}  // namespace mayleonard
