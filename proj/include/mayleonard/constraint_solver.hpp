#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mayleonard/closed_form.hpp"

namespace mayleonard {

/// The nine free quantities of the admissibility relations.
enum class SlotId : std::uint8_t { A12, A13, A21, A23, A31, A32, X1, X2, X3 };

inline constexpr std::array<SlotId, 9> kAllSlots{SlotId::A12, SlotId::A13, SlotId::A21,
                                                 SlotId::A23, SlotId::A31, SlotId::A32,
                                                 SlotId::X1,  SlotId::X2,  SlotId::X3};

std::string_view slot_name(SlotId s);  // "a12", ..., "x3"
std::optional<SlotId> parse_slot(std::string_view name);

/// A full assignment of all nine slots, indexed by SlotId.
template <Scalar S>
using Assignment = std::array<S, 9>;

template <Scalar S>
Assignment<S> to_assignment(const ModelParams<S>& params, const State<S>& x0);
template <Scalar S>
ModelParams<S> params_of(const Assignment<S>& a, S eta);
template <Scalar S>
State<S> state_of(const Assignment<S>& a);

/// Seven known slots and an ordered pair of distinct unknowns.
template <Scalar S>
class ProblemInstance {
public:
  /// Throws std::invalid_argument unless known and unknowns cover the nine
  /// slots exactly once.
  ProblemInstance(std::map<SlotId, S> known, std::pair<SlotId, SlotId> unknowns);

  const std::map<SlotId, S>& known() const { return known_; }
  const std::pair<SlotId, SlotId>& unknowns() const { return unknowns_; }

  /// The full assignment with the unknowns set to (u, v).
  Assignment<S> complete(const S& u, const S& v) const;

private:
  std::map<SlotId, S> known_;
  std::pair<SlotId, SlotId> unknowns_;
};

/// r(u, v) = c0 + cu u + cv v + cuv u v.
template <Scalar S>
struct Bilinear {
  S c0{}, cu{}, cv{}, cuv{};
  S operator()(const S& u, const S& v) const { return c0 + cu * u + cv * v + cuv * u * v; }
};

template <Scalar S>
struct MultiAffineCoeffs {
  std::array<Bilinear<S>, 2> r;
};

enum class SolveKind { Unique, TwoRoots, DegenerateFamily, Inconsistent };
std::string_view kind_name(SolveKind k);

template <Scalar S>
struct SolveOutcome {
  SolveKind kind = SolveKind::Inconsistent;
  std::vector<std::pair<S, S>> solutions;
  /// Human-readable family description (DegenerateFamily only).
  std::string description;
  /// Tangent of the solution set at the representative, when it is a line.
  std::optional<std::pair<S, S>> family_direction;
  /// Roots of the eliminated polynomial that failed back-substitution.
  std::vector<std::pair<S, S>> rejected;
};

inline constexpr double kPivotThreshold = 1e-12;
inline constexpr double kRoundTripTol = 1e-12;

/// (E1 - E2, E2 - E3).
template <Scalar S>
std::array<S, 2> residuals(const Assignment<S>& a);

/// |r1|, |r2| <= 1e-12 (1 + max |E_i|).
template <Scalar S>
bool satisfies_constraints(const Assignment<S>& a, double tol = kRoundTripTol);

template <Scalar S>
MultiAffineCoeffs<S> extract_coeffs(const ProblemInstance<S>& instance);

/// Throws IllConditionedError when a rank decision lands within 10x of
/// the pivot threshold.
template <Scalar S>
SolveOutcome<S> solve_pair(const ProblemInstance<S>& instance);

template <Scalar S>
struct AdmissibleInstance {
  ModelParams<S> params;
  State<S> x0;
  std::pair<SlotId, SlotId> unknowns;
  int attempts;
  /// Unknown pairs drawn on every attempt, the accepted one last.
  std::vector<std::pair<SlotId, SlotId>> tried;
};

/// Deterministic per seed. Real mode draws known slots from [0.1, 2] and eta
/// from {0.5, 1, 2}; complex mode draws real and imaginary parts from
/// [-1, 1] and eta from {i, 2i}. The solved unknowns must fall in the same
/// range, and real instances must not blow up before t = 1. Throws
/// ExhaustionError after 100 attempts.
template <Scalar S>
AdmissibleInstance<S> random_admissible_instance(std::uint64_t seed);

#define MAYLEONARD_EXTERN_SOLVER(S)                                                        \
  extern template Assignment<S> to_assignment(const ModelParams<S>&, const State<S>&);     \
  extern template ModelParams<S> params_of(const Assignment<S>&, S);                       \
  extern template State<S> state_of(const Assignment<S>&);                                 \
  extern template class ProblemInstance<S>;                                                \
  extern template std::array<S, 2> residuals(const Assignment<S>&);                        \
  extern template bool satisfies_constraints(const Assignment<S>&, double);                \
  extern template MultiAffineCoeffs<S> extract_coeffs(const ProblemInstance<S>&);          \
  extern template SolveOutcome<S> solve_pair(const ProblemInstance<S>&);                   \
  extern template AdmissibleInstance<S> random_admissible_instance(std::uint64_t);

MAYLEONARD_EXTERN_SOLVER(Real)
MAYLEONARD_EXTERN_SOLVER(Complex)
#undef MAYLEONARD_EXTERN_SOLVER

}  // namespace mayleonard
