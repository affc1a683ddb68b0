#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "mayleonard/constraint_solver.hpp"

namespace mayleonard::cli {

enum class Mode { Real, Complex };
enum class Method { RK4, Adaptive, ClosedForm };
enum class Format { Csv, Json };

std::string_view mode_name(Mode m);
std::string_view method_name(Method m);
std::string_view format_name(Format f);
std::optional<Mode> parse_mode(std::string_view s);
std::optional<Format> parse_format(std::string_view s);

/// a12, a13, a21, a23, a31, a32.
struct Couplings {
  std::array<Complex, 6> values{};
  friend bool operator==(const Couplings&, const Couplings&) = default;
};

struct Symmetric {
  Complex alpha;
  Complex beta;
  friend bool operator==(const Symmetric&, const Symmetric&) = default;
};

/// One run of simulate / special / verify. Scalars are held as complex
/// numbers; in real mode their imaginary parts are zero.
struct RunConfig {
  Mode mode = Mode::Real;
  Complex eta{1.0, 0.0};
  std::variant<Couplings, Symmetric> couplings = Couplings{};
  std::array<Complex, 3> x0{};
  double t0 = 0.0;
  double t1 = 0.0;
  Method method = Method::ClosedForm;
  std::optional<double> step;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::optional<int> grid_points;
  /// Replaces the computed z (diagnostic runs only).
  std::optional<Complex> z_override;
  std::optional<std::string> output_path;
  Format format = Format::Csv;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Seven known slots and two unknowns for the constraint solver.
struct SolveRequest {
  Mode mode = Mode::Real;
  std::map<SlotId, Complex> known;
  std::pair<SlotId, SlotId> unknowns{SlotId::A12, SlotId::A13};

  friend bool operator==(const SolveRequest&, const SolveRequest&) = default;
};

class ConfigError : public std::runtime_error {
public:
  enum class Kind { Malformed, Schema, ModeMismatch };
  ConfigError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

inline constexpr int kDefaultGridPoints = 501;
inline constexpr double kDefaultStep = 1e-3;

/// Strict parse: unknown keys are rejected by name.
RunConfig parse_config(std::string_view text);
nlohmann::json config_to_json(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

SolveRequest parse_solve_request(std::string_view text);
nlohmann::json request_to_json(const SolveRequest& req);

/// Scalar JSON encoding: a number in real mode, [re, im] in complex mode.
nlohmann::json scalar_to_json(const Real& v);
nlohmann::json scalar_to_json(const Complex& v);

template <Scalar S>
S narrow(const Complex& v) {
  if constexpr (is_complex_v<S>)
    return v;
  else
    return v.real();
}

template <Scalar S>
ModelParams<S> params_from(const RunConfig& cfg) {
  const S eta = narrow<S>(cfg.eta);
  if (const auto* sym = std::get_if<Symmetric>(&cfg.couplings)) {
    auto p = reduce_symmetric(SymmetricParams<S>{narrow<S>(sym->alpha), narrow<S>(sym->beta)});
    return p.with_eta(eta);
  }
  const auto& c = std::get<Couplings>(cfg.couplings).values;
  return ModelParams<S>(eta, narrow<S>(c[0]), narrow<S>(c[1]), narrow<S>(c[2]),
                        narrow<S>(c[3]), narrow<S>(c[4]), narrow<S>(c[5]));
}

template <Scalar S>
State<S> x0_from(const RunConfig& cfg) {
  return State<S>(narrow<S>(cfg.x0[0]), narrow<S>(cfg.x0[1]), narrow<S>(cfg.x0[2]));
}

/// Overwrites eta, couplings and x0 with the given instance.
template <Scalar S>
void assign_instance(RunConfig& cfg, const ModelParams<S>& p, const State<S>& x0) {
  cfg.eta = Complex(p.eta());
  Couplings c;
  c.values = {Complex(p.a(0, 1)), Complex(p.a(0, 2)), Complex(p.a(1, 0)),
              Complex(p.a(1, 2)), Complex(p.a(2, 0)), Complex(p.a(2, 1))};
  cfg.couplings = c;
  for (std::size_t i = 0; i < 3; ++i) cfg.x0[i] = Complex(x0[i]);
}

}  // namespace mayleonard::cli
