#include "mayleonard/cli/config.hpp"

#include <cmath>
#include <set>

namespace mayleonard::cli {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 6> kCouplingKeys{"a12", "a13", "a21", "a23", "a31", "a32"};

[[noreturn]] void schema(const std::string& msg) {
  throw ConfigError(ConfigError::Kind::Schema, msg);
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) schema("unknown key '" + key + "' in " + where);
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema("missing required key '" + std::string(key) + "' in " + where);
  return *it;
}

double finite_number(const json& v, const std::string& what) {
  if (!v.is_number()) schema(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema(what + " must be finite");
  return d;
}

Complex scalar_from(const json& v, Mode mode, const std::string& what) {
  if (v.is_number()) return {finite_number(v, what), 0.0};
  if (v.is_array() && v.size() == 2) {
    const Complex c{finite_number(v[0], what + "[0]"), finite_number(v[1], what + "[1]")};
    if (mode == Mode::Real && c.imag() != 0.0)
      throw ConfigError(ConfigError::Kind::ModeMismatch,
                        what + " has an imaginary part but mode is \"real\"");
    return c;
  }
  schema(what + " must be a number or a [re, im] pair");
}

template <class Parse>
auto parse_enum(const json& v, const std::string& what, Parse parse) {
  if (!v.is_string()) schema(what + " must be a string");
  const auto r = parse(v.get<std::string>());
  if (!r) schema(what + ": unrecognised value \"" + v.get<std::string>() + "\"");
  return *r;
}

std::optional<Method> parse_method(std::string_view s) {
  if (s == "rk4") return Method::RK4;
  if (s == "adaptive") return Method::Adaptive;
  if (s == "closed-form") return Method::ClosedForm;
  return std::nullopt;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::Malformed, std::string("malformed JSON: ") + e.what());
  }
}

json scalar_for(const Complex& v, Mode mode) {
  return mode == Mode::Real ? scalar_to_json(v.real()) : scalar_to_json(v);
}

}  // namespace

std::string_view mode_name(Mode m) { return m == Mode::Real ? "real" : "complex"; }

std::string_view method_name(Method m) {
  switch (m) {
    case Method::RK4: return "rk4";
    case Method::Adaptive: return "adaptive";
    case Method::ClosedForm: return "closed-form";
  }
  return "?";
}

std::string_view format_name(Format f) { return f == Format::Csv ? "csv" : "json"; }

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "real") return Mode::Real;
  if (s == "complex") return Mode::Complex;
  return std::nullopt;
}

std::optional<Format> parse_format(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  return std::nullopt;
}

json scalar_to_json(const Real& v) { return v; }
json scalar_to_json(const Complex& v) { return json::array({v.real(), v.imag()}); }

RunConfig parse_config(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) schema("config must be a JSON object");
  reject_unknown(doc,
                 {"mode", "eta", "couplings", "symmetric", "x0", "t_span", "method", "step",
                  "tolerances", "grid_points", "z_override", "output"},
                 "config");

  RunConfig cfg;
  cfg.mode = parse_enum(require(doc, "mode", "config"), "mode", parse_mode);
  cfg.eta = scalar_from(require(doc, "eta", "config"), cfg.mode, "eta");

  const bool has_c = doc.contains("couplings");
  const bool has_s = doc.contains("symmetric");
  if (has_c && has_s) schema("\"couplings\" and \"symmetric\" are mutually exclusive; give one");
  if (!has_c && !has_s) schema("one of \"couplings\" or \"symmetric\" is required");
  if (has_c) {
    const json& c = doc["couplings"];
    if (!c.is_object()) schema("couplings must be an object");
    reject_unknown(c, {"a12", "a13", "a21", "a23", "a31", "a32"}, "couplings");
    Couplings out;
    for (std::size_t i = 0; i < kCouplingKeys.size(); ++i) {
      const std::string key(kCouplingKeys[i]);
      out.values[i] = scalar_from(require(c, key.c_str(), "couplings"), cfg.mode, key);
    }
    cfg.couplings = out;
  } else {
    const json& s = doc["symmetric"];
    if (!s.is_object()) schema("symmetric must be an object");
    reject_unknown(s, {"alpha", "beta"}, "symmetric");
    cfg.couplings = Symmetric{scalar_from(require(s, "alpha", "symmetric"), cfg.mode, "alpha"),
                              scalar_from(require(s, "beta", "symmetric"), cfg.mode, "beta")};
  }

  const json& x0 = require(doc, "x0", "config");
  if (!x0.is_array() || x0.size() != 3) schema("x0 must be an array of 3 scalars");
  for (std::size_t i = 0; i < 3; ++i)
    cfg.x0[i] = scalar_from(x0[i], cfg.mode, "x0[" + std::to_string(i) + "]");

  const json& ts = require(doc, "t_span", "config");
  if (!ts.is_array() || ts.size() != 2) schema("t_span must be [t0, t1]");
  cfg.t0 = finite_number(ts[0], "t_span[0]");
  cfg.t1 = finite_number(ts[1], "t_span[1]");
  if (cfg.t1 < cfg.t0) schema("t_span: t1 must not precede t0");

  cfg.method = parse_enum(require(doc, "method", "config"), "method", parse_method);

  if (doc.contains("step")) {
    cfg.step = finite_number(doc["step"], "step");
    if (*cfg.step <= 0.0) schema("step must be positive");
  }
  if (doc.contains("tolerances")) {
    const json& tol = doc["tolerances"];
    if (!tol.is_object()) schema("tolerances must be an object");
    reject_unknown(tol, {"rtol", "atol"}, "tolerances");
    if (tol.contains("rtol")) cfg.rtol = finite_number(tol["rtol"], "rtol");
    if (tol.contains("atol")) cfg.atol = finite_number(tol["atol"], "atol");
    if ((cfg.rtol && *cfg.rtol <= 0.0) || (cfg.atol && *cfg.atol <= 0.0))
      schema("tolerances must be positive");
  }
  if (doc.contains("grid_points")) {
    const json& g = doc["grid_points"];
    if (!g.is_number_integer() || g.get<long long>() < 1)
      schema("grid_points must be a positive integer");
    cfg.grid_points = g.get<int>();
  }
  if (doc.contains("z_override")) cfg.z_override = scalar_from(doc["z_override"], cfg.mode, "z_override");
  if (doc.contains("output")) {
    const json& o = doc["output"];
    if (!o.is_object()) schema("output must be an object");
    reject_unknown(o, {"path", "format"}, "output");
    if (o.contains("path")) {
      if (!o["path"].is_string()) schema("output.path must be a string");
      cfg.output_path = o["path"].get<std::string>();
    }
    if (o.contains("format")) cfg.format = parse_enum(o["format"], "output.format", parse_format);
  }
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json doc;
  doc["mode"] = mode_name(cfg.mode);
  doc["eta"] = scalar_for(cfg.eta, cfg.mode);
  if (const auto* sym = std::get_if<Symmetric>(&cfg.couplings)) {
    doc["symmetric"] = {{"alpha", scalar_for(sym->alpha, cfg.mode)},
                        {"beta", scalar_for(sym->beta, cfg.mode)}};
  } else {
    json c = json::object();
    const auto& v = std::get<Couplings>(cfg.couplings).values;
    for (std::size_t i = 0; i < 6; ++i) c[std::string(kCouplingKeys[i])] = scalar_for(v[i], cfg.mode);
    doc["couplings"] = c;
  }
  doc["x0"] = json::array();
  for (const auto& v : cfg.x0) doc["x0"].push_back(scalar_for(v, cfg.mode));
  doc["t_span"] = {cfg.t0, cfg.t1};
  doc["method"] = method_name(cfg.method);
  if (cfg.step) doc["step"] = *cfg.step;
  if (cfg.rtol || cfg.atol) {
    json tol = json::object();
    if (cfg.rtol) tol["rtol"] = *cfg.rtol;
    if (cfg.atol) tol["atol"] = *cfg.atol;
    doc["tolerances"] = tol;
  }
  if (cfg.grid_points) doc["grid_points"] = *cfg.grid_points;
  if (cfg.z_override) doc["z_override"] = scalar_for(*cfg.z_override, cfg.mode);
  json out = {{"format", format_name(cfg.format)}};
  if (cfg.output_path) out["path"] = *cfg.output_path;
  doc["output"] = out;
  return doc;
}

std::string serialize_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2); }

SolveRequest parse_solve_request(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) schema("solve request must be a JSON object");
  reject_unknown(doc, {"mode", "known", "unknowns"}, "solve request");

  SolveRequest req;
  req.mode = parse_enum(require(doc, "mode", "solve request"), "mode", parse_mode);

  const json& unk = require(doc, "unknowns", "solve request");
  if (!unk.is_array() || unk.size() != 2) schema("unknowns must be a pair of slot names");
  std::array<SlotId, 2> u{};
  for (std::size_t i = 0; i < 2; ++i) u[i] = parse_enum(unk[i], "unknowns", [](const std::string& s) {
    return parse_slot(s);
  });
  if (u[0] == u[1]) schema("unknowns must be two distinct slots");
  req.unknowns = {u[0], u[1]};

  const json& known = require(doc, "known", "solve request");
  if (!known.is_object()) schema("known must be an object keyed by slot name");
  for (const auto& [key, value] : known.items()) {
    const auto slot = parse_slot(key);
    if (!slot) schema("unknown key '" + key + "' in known");
    if (*slot == u[0] || *slot == u[1]) schema("slot '" + key + "' is both known and unknown");
    req.known[*slot] = scalar_from(value, req.mode, key);
  }
  if (req.known.size() != 7) {
    std::string missing;
    for (SlotId s : kAllSlots)
      if (!req.known.count(s) && s != u[0] && s != u[1]) missing += " " + std::string(slot_name(s));
    schema("known must assign exactly the 7 non-unknown slots; missing:" + missing);
  }
  return req;
}

json request_to_json(const SolveRequest& req) {
  json known = json::object();
  for (const auto& [slot, value] : req.known)
    known[std::string(slot_name(slot))] = scalar_for(value, req.mode);
  return {{"mode", mode_name(req.mode)},
          {"known", known},
          {"unknowns", {slot_name(req.unknowns.first), slot_name(req.unknowns.second)}}};
}

}  // namespace mayleonard::cli
