#pragma once

#include "mayleonard/scalar.hpp"

namespace mayleonard {

/// Growth rate eta and the 3x3 coupling matrix of the asymmetric
/// May-Leonard system. The diagonal is fixed at 1; only the six
/// off-diagonal couplings are free.
template <Scalar S>
class ModelParams {
public:
  /// Couplings in the order a12, a13, a21, a23, a31, a32.
  ModelParams(S eta, S a12, S a13, S a21, S a23, S a31, S a32);

  /// Full matrix; throws std::invalid_argument unless the diagonal is exactly 1.
  static ModelParams from_matrix(S eta, const Matrix3<S>& a);

  const S& eta() const { return eta_; }
  const Matrix3<S>& couplings() const { return a_; }
  /// Zero-based: a(0, 1) is a12.
  const S& a(std::size_t n, std::size_t m) const { return a_[n][m]; }

  ModelParams with_eta(S eta) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
  S eta_;
  Matrix3<S> a_;
};

/// alpha, beta of the original cyclic May-Leonard model.
template <Scalar S>
struct SymmetricParams {
  S alpha;
  S beta;
};

template <Scalar S>
struct RescaledProblem {
  ModelParams<S> params;  // eta == 1
  State<S> x0;
  S time_scale;
};

/// x_n (eta - sum_m a_nm x_m).
template <Scalar S>
State<S> rhs(const ModelParams<S>& params, const State<S>& x);

/// -y_n sum_m a_nm y_m; eta does not enter.
template <Scalar S>
State<S> rhs_transformed(const ModelParams<S>& params, const State<S>& y);

template <Scalar S>
Matrix3<S> jacobian(const ModelParams<S>& params, const State<S>& x);

/// Solves A x* = eta (1,1,1). Throws SingularError when
/// |det A| < 1e-12 ||A||_inf^3.
template <Scalar S>
State<S> interior_equilibrium(const ModelParams<S>& params);

/// a12 = a23 = a31 = alpha, a13 = a21 = a32 = beta, eta = 1.
template <Scalar S>
ModelParams<S> reduce_symmetric(const SymmetricParams<S>& sym);

/// x(t; params) = eta * x~(eta t; rescaled). Throws ZeroEtaError for |eta| < 1e-300.
template <Scalar S>
RescaledProblem<S> rescale_to_unit_eta(const ModelParams<S>& params, const State<S>& x0);

#define MAYLEONARD_EXTERN_MODEL(S)                                                     \
  extern template class ModelParams<S>;                                                \
  extern template State<S> rhs(const ModelParams<S>&, const State<S>&);                \
  extern template State<S> rhs_transformed(const ModelParams<S>&, const State<S>&);    \
  extern template Matrix3<S> jacobian(const ModelParams<S>&, const State<S>&);         \
  extern template State<S> interior_equilibrium(const ModelParams<S>&);                \
  extern template ModelParams<S> reduce_symmetric(const SymmetricParams<S>&);          \
  extern template RescaledProblem<S> rescale_to_unit_eta(const ModelParams<S>&,        \
                                                         const State<S>&);

MAYLEONARD_EXTERN_MODEL(Real)
MAYLEONARD_EXTERN_MODEL(Complex)
#undef MAYLEONARD_EXTERN_MODEL

}  // namespace mayleonard
