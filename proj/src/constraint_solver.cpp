#include "mayleonard/constraint_solver.hpp"

#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mayleonard {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

constexpr std::array<std::string_view, 9> kSlotNames{"a12", "a13", "a21", "a23", "a31",
                                                     "a32", "x1",  "x2",  "x3"};

constexpr std::size_t idx(SlotId s) { return static_cast<std::size_t>(s); }

Real conj_of(Real v) { return v; }
Complex conj_of(const Complex& v) { return std::conj(v); }

template <Scalar S>
std::string to_text(const S& v) {
  std::ostringstream os;
  os.precision(17);
  if constexpr (is_complex_v<S>)
    os << "(" << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i)";
  else
    os << v;
  return os.str();
}

/// Outcome of comparing a magnitude against the relative pivot threshold.
enum class Rank { Zero, NonZero };

Rank classify(double value, double scale, const char* what) {
  const double thr = kPivotThreshold * scale;
  if (value <= thr / 10.0) return Rank::Zero;
  if (value >= thr * 10.0) return Rank::NonZero;
  std::ostringstream os;
  os << "solve_pair: " << what << " = " << value << " lies within 10x of the pivot threshold "
     << thr;
  throw IllConditionedError(os.str());
}

template <Scalar S>
double coeff_scale(const MultiAffineCoeffs<S>& c) {
  double m = 0.0;
  for (const auto& r : c.r)
    m = std::max({m, std::abs(r.c0), std::abs(r.cu), std::abs(r.cv), std::abs(r.cuv)});
  return m;
}

/// Newton refinement on the 2x2 multi-affine system; leaves (u, v)
/// untouched when the Jacobian is singular.
template <Scalar S>
void polish(const MultiAffineCoeffs<S>& c, S& u, S& v) {
  for (int it = 0; it < 3; ++it) {
    const S f1 = c.r[0](u, v);
    const S f2 = c.r[1](u, v);
    const S j11 = c.r[0].cu + c.r[0].cuv * v;
    const S j12 = c.r[0].cv + c.r[0].cuv * u;
    const S j21 = c.r[1].cu + c.r[1].cuv * v;
    const S j22 = c.r[1].cv + c.r[1].cuv * u;
    const S det = j11 * j22 - j12 * j21;
    const double jn = std::max({std::abs(j11), std::abs(j12), std::abs(j21), std::abs(j22)});
    if (!(std::abs(det) > 1e3 * kEps * jn * jn)) return;
    const S du = (f1 * j22 - j12 * f2) / det;
    const S dv = (j11 * f2 - f1 * j21) / det;
    if (!is_finite(du) || !is_finite(dv)) return;
    u -= du;
    v -= dv;
  }
}

template <Scalar S>
bool verified(const ProblemInstance<S>& inst, const S& u, const S& v) {
  if (!is_finite(u) || !is_finite(v)) return false;
  try {
    return satisfies_constraints(inst.complete(u, v));
  } catch (const OverflowError&) {
    return false;
  }
}

/// Solves r(u, v0) = 0 for u. Returns nullopt when r does not depend on u at
/// v0 and is nonzero there; returns 0 when it vanishes for every u.
template <Scalar S>
std::optional<S> solve_u(const Bilinear<S>& r, const S& v0, double scale) {
  const S den = r.cu + r.cuv * v0;
  const S num = -(r.c0 + r.cv * v0);
  if (std::abs(den) > kPivotThreshold * scale) return num / den;
  if (std::abs(num) <= kPivotThreshold * scale) return S(0);
  return std::nullopt;
}

template <Scalar S>
Bilinear<S> swapped(const Bilinear<S>& r) {
  return {r.c0, r.cv, r.cu, r.cuv};
}

template <Scalar S>
SolveOutcome<S> solve_linear(const ProblemInstance<S>& inst, const MultiAffineCoeffs<S>& c,
                             double scale) {
  const auto& r1 = c.r[0];
  const auto& r2 = c.r[1];
  SolveOutcome<S> out;
  const double n = std::max({std::abs(r1.cu), std::abs(r1.cv), std::abs(r2.cu), std::abs(r2.cv)});
  const double cons_scale = 1.0 + scale;

  if (classify(n, cons_scale, "coefficient matrix norm") == Rank::Zero) {
    const double rest = std::max(std::abs(r1.c0), std::abs(r2.c0));
    if (classify(rest, cons_scale, "constant residual") == Rank::Zero) {
      out.kind = SolveKind::DegenerateFamily;
      out.solutions.push_back({S(0), S(0)});
      out.description = "residuals vanish for every (u, v)";
    } else {
      out.kind = SolveKind::Inconsistent;
    }
    return out;
  }

  const S det = r1.cu * r2.cv - r1.cv * r2.cu;
  if (classify(std::abs(det), n * n, "2x2 determinant") == Rank::NonZero) {
    const S b1 = -r1.c0;
    const S b2 = -r2.c0;
    S u = (b1 * r2.cv - r1.cv * b2) / det;
    S v = (r1.cu * b2 - b1 * r2.cu) / det;
    polish(c, u, v);
    if (verified(inst, u, v)) {
      out.kind = SolveKind::Unique;
      out.solutions.push_back({u, v});
    } else {
      out.kind = SolveKind::Inconsistent;
      out.rejected.push_back({u, v});
    }
    return out;
  }

  // Rank one: the dominant row carries the family, the other row must be
  // a multiple of it (including its constant).
  const bool first = std::max(std::abs(r1.cu), std::abs(r1.cv)) >=
                     std::max(std::abs(r2.cu), std::abs(r2.cv));
  const auto& ri = first ? r1 : r2;
  const auto& rj = first ? r2 : r1;
  const double nn = std::norm(ri.cu) + std::norm(ri.cv);
  const S lambda = (rj.cu * conj_of(ri.cu) + rj.cv * conj_of(ri.cv)) / nn;
  const double mismatch = std::abs(rj.c0 - lambda * ri.c0);
  if (classify(mismatch, cons_scale, "rank-one consistency residual") == Rank::NonZero) {
    out.kind = SolveKind::Inconsistent;
    return out;
  }
  const S u = -ri.c0 * conj_of(ri.cu) / nn;
  const S v = -ri.c0 * conj_of(ri.cv) / nn;
  out.kind = SolveKind::DegenerateFamily;
  out.solutions.push_back({u, v});
  out.family_direction = std::pair<S, S>{-ri.cv, ri.cu};
  out.description = "line " + to_text(ri.cu) + "*" + std::string(slot_name(inst.unknowns().first)) +
                    " + " + to_text(ri.cv) + "*" + std::string(slot_name(inst.unknowns().second)) +
                    " = " + to_text(S(-ri.c0));
  return out;
}

template <Scalar S>
std::vector<S> quadratic_roots(const S& k2, const S& k1, const S& k0) {
  std::vector<S> roots;
  if (k2 == S(0)) {
    if (k1 != S(0)) roots.push_back(-k0 / k1);
    return roots;
  }
  S disc = k1 * k1 - S(4) * k2 * k0;
  if constexpr (!is_complex_v<S>) {
    if (disc < 0.0) {
      // Round-off around a double root.
      if (-disc <= 1e-12 * (k1 * k1 + std::abs(4.0 * k2 * k0)))
        disc = 0.0;
      else
        return roots;  // no real roots
    }
  }
  const S sq = std::sqrt(disc);
  // Pick the sign that avoids cancellation.
  const S q = std::abs(k1 + sq) >= std::abs(k1 - sq) ? S(-0.5) * (k1 + sq) : S(-0.5) * (k1 - sq);
  if (q == S(0)) {
    roots.push_back(S(0));
    return roots;
  }
  roots.push_back(q / k2);
  roots.push_back(k0 / q);
  return roots;
}

template <Scalar S>
bool same_point(const std::pair<S, S>& a, const std::pair<S, S>& b) {
  const double s = 1.0 + std::max({std::abs(a.first), std::abs(a.second)});
  return std::abs(a.first - b.first) <= 1e-9 * s && std::abs(a.second - b.second) <= 1e-9 * s;
}

/// Representative of a one-parameter family where the two residuals are
/// algebraically dependent.
template <Scalar S>
SolveOutcome<S> degenerate_bilinear(const ProblemInstance<S>& inst,
                                    const MultiAffineCoeffs<S>& c, double scale) {
  SolveOutcome<S> out;
  const std::array<S, 5> probes{S(0), S(1), S(-1), S(2), S(0.5)};
  for (int order = 0; order < 2; ++order) {
    for (const S& fixed : probes) {
      for (const auto& r : c.r) {
        const Bilinear<S> eq = order == 0 ? r : swapped(r);
        const auto other = solve_u(eq, fixed, 1.0 + scale);
        if (!other) continue;
        const S u = order == 0 ? *other : fixed;
        const S v = order == 0 ? fixed : *other;
        if (!verified(inst, u, v)) continue;
        out.kind = SolveKind::DegenerateFamily;
        out.solutions.push_back({u, v});
        // Tangent of the zero set of the nontrivial residual at (u, v).
        const auto& nontrivial =
            std::abs(c.r[0].cu) + std::abs(c.r[0].cv) + std::abs(c.r[0].cuv) >=
                    std::abs(c.r[1].cu) + std::abs(c.r[1].cv) + std::abs(c.r[1].cuv)
                ? c.r[0]
                : c.r[1];
        const S gu = nontrivial.cu + nontrivial.cuv * v;
        const S gv = nontrivial.cv + nontrivial.cuv * u;
        if (std::abs(gu) + std::abs(gv) > 0.0) out.family_direction = std::pair<S, S>{-gv, gu};
        out.description = "one-parameter family: the two residuals are dependent";
        return out;
      }
    }
  }
  out.kind = SolveKind::Inconsistent;
  return out;
}

template <Scalar S>
SolveOutcome<S> solve_bilinear(const ProblemInstance<S>& inst, const MultiAffineCoeffs<S>& c,
                               double scale) {
  const auto& r1 = c.r[0];
  const auto& r2 = c.r[1];
  // u = -(c0_1 + cv_1 v)/(cu_1 + cuv_1 v) substituted into r2, times the
  // denominator: a polynomial of degree <= 2 in v.
  const S k2 = r2.cv * r1.cuv - r2.cuv * r1.cv;
  const S k1 = r2.c0 * r1.cuv + r2.cv * r1.cu - r2.cu * r1.cv - r2.cuv * r1.c0;
  const S k0 = r2.c0 * r1.cu - r2.cu * r1.c0;
  const double kmax = std::max({std::abs(k2), std::abs(k1), std::abs(k0)});
  if (classify(kmax, (1.0 + scale) * (1.0 + scale), "eliminant") == Rank::Zero)
    return degenerate_bilinear(inst, c, scale);

  SolveOutcome<S> out;
  for (const S& v0 : quadratic_roots(k2, k1, k0)) {
    if (!is_finite(v0)) continue;
    const double den_scale = 1.0 + scale;
    const S den1 = r1.cu + r1.cuv * v0;
    const S den2 = r2.cu + r2.cuv * v0;
    const auto& pick = std::abs(den1) >= std::abs(den2) ? r1 : r2;
    if (std::max(std::abs(den1), std::abs(den2)) <= kPivotThreshold * den_scale) {
      // Neither residual depends on u at v0: a line v = v0 if both vanish.
      const S n1 = r1.c0 + r1.cv * v0;
      const S n2 = r2.c0 + r2.cv * v0;
      if (std::max(std::abs(n1), std::abs(n2)) <= kPivotThreshold * den_scale &&
          verified(inst, S(0), v0)) {
        SolveOutcome<S> fam;
        fam.kind = SolveKind::DegenerateFamily;
        fam.solutions.push_back({S(0), v0});
        fam.family_direction = std::pair<S, S>{S(1), S(0)};
        fam.description =
            "line " + std::string(slot_name(inst.unknowns().second)) + " = " + to_text(v0);
        return fam;
      }
      out.rejected.push_back({S(0), v0});
      continue;
    }
    S u = -(pick.c0 + pick.cv * v0) / (pick.cu + pick.cuv * v0);
    S v = v0;
    polish(c, u, v);
    const std::pair<S, S> cand{u, v};
    if (!verified(inst, u, v)) {
      out.rejected.push_back(cand);
      continue;
    }
    bool dup = false;
    for (const auto& s : out.solutions) dup = dup || same_point(s, cand);
    if (!dup) out.solutions.push_back(cand);
  }
  switch (out.solutions.size()) {
    case 0: out.kind = SolveKind::Inconsistent; break;
    case 1: out.kind = SolveKind::Unique; break;
    default: out.kind = SolveKind::TwoRoots; break;
  }
  return out;
}

}  // namespace

std::string_view slot_name(SlotId s) { return kSlotNames[idx(s)]; }

std::optional<SlotId> parse_slot(std::string_view name) {
  for (std::size_t i = 0; i < kSlotNames.size(); ++i)
    if (kSlotNames[i] == name) return kAllSlots[i];
  return std::nullopt;
}

std::string_view kind_name(SolveKind k) {
  switch (k) {
    case SolveKind::Unique: return "Unique";
    case SolveKind::TwoRoots: return "TwoRoots";
    case SolveKind::DegenerateFamily: return "DegenerateFamily";
    case SolveKind::Inconsistent: return "Inconsistent";
  }
  return "?";
}

template <Scalar S>
Assignment<S> to_assignment(const ModelParams<S>& p, const State<S>& x0) {
  return {p.a(0, 1), p.a(0, 2), p.a(1, 0), p.a(1, 2), p.a(2, 0), p.a(2, 1), x0[0], x0[1], x0[2]};
}

template <Scalar S>
ModelParams<S> params_of(const Assignment<S>& a, S eta) {
  return ModelParams<S>(eta, a[0], a[1], a[2], a[3], a[4], a[5]);
}

template <Scalar S>
State<S> state_of(const Assignment<S>& a) {
  return State<S>(a[6], a[7], a[8]);
}

template <Scalar S>
ProblemInstance<S>::ProblemInstance(std::map<SlotId, S> known, std::pair<SlotId, SlotId> unknowns)
    : known_(std::move(known)), unknowns_(unknowns) {
  if (unknowns_.first == unknowns_.second)
    throw std::invalid_argument("ProblemInstance: unknown slots must be distinct");
  if (known_.size() != 7)
    throw std::invalid_argument("ProblemInstance: exactly 7 known slots required");
  if (known_.count(unknowns_.first) || known_.count(unknowns_.second))
    throw std::invalid_argument("ProblemInstance: a slot is both known and unknown");
  for (const auto& [slot, value] : known_) check_finite(value, slot_name(slot));
}

template <Scalar S>
Assignment<S> ProblemInstance<S>::complete(const S& u, const S& v) const {
  Assignment<S> a{};
  for (const auto& [slot, value] : known_) a[idx(slot)] = value;
  a[idx(unknowns_.first)] = u;
  a[idx(unknowns_.second)] = v;
  return a;
}

template <Scalar S>
std::array<S, 2> residuals(const Assignment<S>& a) {
  const auto e = linear_forms(params_of(a, S(1)), state_of(a));
  return {check_finite(S(e[0] - e[1]), "residual"), check_finite(S(e[1] - e[2]), "residual")};
}

template <Scalar S>
bool satisfies_constraints(const Assignment<S>& a, double tol) {
  const auto e = linear_forms(params_of(a, S(1)), state_of(a));
  const double bound =
      tol * (1.0 + std::max({std::abs(e[0]), std::abs(e[1]), std::abs(e[2])}));
  return std::abs(e[0] - e[1]) < bound && std::abs(e[1] - e[2]) < bound;
}

template <Scalar S>
MultiAffineCoeffs<S> extract_coeffs(const ProblemInstance<S>& inst) {
  const auto r00 = residuals(inst.complete(S(0), S(0)));
  const auto r10 = residuals(inst.complete(S(1), S(0)));
  const auto r01 = residuals(inst.complete(S(0), S(1)));
  const auto r11 = residuals(inst.complete(S(1), S(1)));
  MultiAffineCoeffs<S> c;
  for (std::size_t i = 0; i < 2; ++i) {
    auto& b = c.r[i];
    b.c0 = r00[i];
    b.cu = r10[i] - r00[i];
    b.cv = r01[i] - r00[i];
    b.cuv = r11[i] - r10[i] - r01[i] + r00[i];
    // A bilinear term below the round-off of the probes is a rounding artefact.
    const double probe = std::max(
        {std::abs(r00[i]), std::abs(r10[i]), std::abs(r01[i]), std::abs(r11[i])});
    if (std::abs(b.cuv) <= 8.0 * kEps * probe) b.cuv = S(0);
  }
  return c;
}

template <Scalar S>
SolveOutcome<S> solve_pair(const ProblemInstance<S>& inst) {
  const auto c = extract_coeffs(inst);
  const double scale = coeff_scale(c);
  if (c.r[0].cuv == S(0) && c.r[1].cuv == S(0)) return solve_linear(inst, c, scale);
  return solve_bilinear(inst, c, scale);
}

template <Scalar S>
AdmissibleInstance<S> random_admissible_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pair_dist(0, 35);
  std::uniform_int_distribution<int> eta_dist(0, is_complex_v<S> ? 1 : 2);

  // Solved unknowns must land in the range the knowns are drawn from.
  auto in_range = [](const S& v) {
    if constexpr (is_complex_v<S>)
      return std::abs(v.real()) <= 1.0 && std::abs(v.imag()) <= 1.0;
    else
      return v >= 0.1 && v <= 2.0;
  };
  auto draw = [&rng]() -> S {
    if constexpr (is_complex_v<S>) {
      std::uniform_real_distribution<double> d(-1.0, 1.0);
      const double re = d(rng);
      return {re, d(rng)};
    } else {
      std::uniform_real_distribution<double> d(0.1, 2.0);
      return d(rng);
    }
  };

  std::vector<std::pair<SlotId, SlotId>> tried;
  for (int attempt = 1; attempt <= 100; ++attempt) {
    // Unordered pairs (i < j) enumerated row by row.
    int k = pair_dist(rng);
    std::size_t i = 0;
    while (k >= static_cast<int>(8 - i)) k -= static_cast<int>(8 - i++);
    const std::size_t j = i + 1 + static_cast<std::size_t>(k);
    const std::pair<SlotId, SlotId> unknowns{kAllSlots[i], kAllSlots[j]};
    tried.push_back(unknowns);

    std::map<SlotId, S> known;
    for (SlotId s : kAllSlots)
      if (s != unknowns.first && s != unknowns.second) known[s] = draw();

    S eta;
    if constexpr (is_complex_v<S>)
      eta = eta_dist(rng) == 0 ? Complex(0, 1) : Complex(0, 2);
    else
      eta = std::array<double, 3>{0.5, 1.0, 2.0}[static_cast<std::size_t>(eta_dist(rng))];

    const ProblemInstance<S> inst(std::move(known), unknowns);
    SolveOutcome<S> out;
    try {
      out = solve_pair(inst);
    } catch (const IllConditionedError&) {
      continue;
    }
    if (out.kind != SolveKind::Unique && out.kind != SolveKind::TwoRoots) continue;
    const auto [u, v] = out.solutions.front();
    if (!in_range(u) || !in_range(v)) continue;

    const Assignment<S> full = inst.complete(u, v);
    const auto params = params_of(full, eta);
    const auto x0 = state_of(full);
    const auto sol = make_special(params, x0, kRoundTripTol);
    const auto* special = std::get_if<SpecialSolution<S>>(&sol);
    if (!special) continue;
    if constexpr (!is_complex_v<S>) {
      // Keep a verification window of at least one time unit before any pole.
      if (const auto tstar = blow_up_time(*special); tstar && *tstar < 1.0) continue;
    }
    return {params, x0, unknowns, attempt, std::move(tried)};
  }
  throw ExhaustionError("random_admissible_instance: no admissible instance after 100 attempts");
}

#define MAYLEONARD_INSTANTIATE_SOLVER(S)                                              \
  template Assignment<S> to_assignment(const ModelParams<S>&, const State<S>&);       \
  template ModelParams<S> params_of(const Assignment<S>&, S);                         \
  template State<S> state_of(const Assignment<S>&);                                   \
  template class ProblemInstance<S>;                                                  \
  template std::array<S, 2> residuals(const Assignment<S>&);                          \
  template bool satisfies_constraints(const Assignment<S>&, double);                  \
  template MultiAffineCoeffs<S> extract_coeffs(const ProblemInstance<S>&);            \
  template SolveOutcome<S> solve_pair(const ProblemInstance<S>&);                     \
  template AdmissibleInstance<S> random_admissible_instance(std::uint64_t);

MAYLEONARD_INSTANTIATE_SOLVER(Real)
MAYLEONARD_INSTANTIATE_SOLVER(Complex)

}  // namespace mayleonard
