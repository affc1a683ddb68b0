#include "mayleonard/cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mayleonard/cli/io.hpp"

namespace mayleonard::cli {

using nlohmann::json;

namespace {

constexpr int kVerifyGridPoints = 101;
constexpr double kAgreementTol = 1e-8;
constexpr double kRayTol = 1e-12;
constexpr double kPeriodTolClosed = 1e-10;
constexpr double kPeriodTolIntegrator = 1e-8;
constexpr double kPoleBackoff = 0.1;

void diag(const Streams& io, std::string_view level, const std::string& msg) {
  if (io.color)
    io.err << (level == "error" ? "\x1b[31m" : "\x1b[33m") << level << ":\x1b[0m " << msg << '\n';
  else
    io.err << level << ": " << msg << '\n';
}

template <class F>
decltype(auto) dispatch(Mode mode, F&& f) {
  if (mode == Mode::Real) return f(Real{});
  return f(Complex{});
}

/// Runs `write` against the configured file, or `fallback` when no path is set.
template <class Write>
bool emit(const std::optional<std::string>& path, std::ostream& fallback, const Streams& io,
          Write&& write) {
  if (!path) {
    write(fallback);
    return static_cast<bool>(fallback);
  }
  std::ofstream file(*path);
  if (!file) {
    diag(io, "error", "cannot open output file '" + *path + "'");
    return false;
  }
  write(file);
  file.flush();
  if (!file) {
    diag(io, "error", "failed writing output file '" + *path + "'");
    return false;
  }
  return true;
}

std::vector<double> linspace(double a, double b, int n) {
  if (n <= 1 || b == a) return {a};
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  g.back() = b;
  return g;
}

template <Scalar S>
void warn_positivity(const State<S>& x0, const Streams& io) {
  if (!io.warn_nonpositive) return;
  if constexpr (!is_complex_v<S>) {
    for (std::size_t i = 0; i < 3; ++i)
      if (x0[i] <= 0.0)
        diag(io, "warning", "x0[" + std::to_string(i) + "] = " + format_number(x0[i]) +
                                " is not a positive population");
  }
}

template <Scalar S>
void warn_experimental(const ModelParams<S>& p, const Streams& io) {
  if constexpr (is_complex_v<S>) {
    if (p.eta().real() != 0.0)
      diag(io, "warning",
           "complex eta with nonzero real part is experimental: no periodicity is claimed");
  }
}

template <Scalar S>
json scalars_json(const auto& values) {
  json a = json::array();
  for (const auto& v : values) a.push_back(scalar_to_json(S(v)));
  return a;
}

template <Scalar S>
SpecialSolution<S> solution_for(const RunConfig& cfg, const ModelParams<S>& p, const State<S>& x0,
                                const AdmissibilityReport<S>& rep) {
  const S z = cfg.z_override ? narrow<S>(*cfg.z_override) : *rep.z;
  return SpecialSolution<S>::unchecked(x0, z, p.eta());
}

template <Scalar S>
json admissibility_json(const AdmissibilityReport<S>& rep) {
  json j = {{"admissible", rep.pass},
            {"e_values", scalars_json<S>(rep.e_values)},
            {"residuals", scalars_json<S>(rep.residuals)},
            {"max_residual", rep.max_residual},
            {"tolerance", rep.tolerance}};
  if (rep.z) j["z"] = scalar_to_json(*rep.z);
  return j;
}

StepControl step_control(const RunConfig& cfg, double rtol = StepControl{}.rtol,
                         double atol = StepControl{}.atol) {
  StepControl c;
  c.rtol = cfg.rtol.value_or(rtol);
  c.atol = cfg.atol.value_or(atol);
  return c;
}

// The oracle inside verify runs tighter than a plain simulation so that its
// own error stays well below the agreement threshold.
constexpr double kOracleRtol = 1e-11;
constexpr double kOracleAtol = 1e-14;

template <Scalar S>
int simulate(const RunConfig& cfg, const Streams& io) {
  const auto params = params_from<S>(cfg);
  const auto x0 = x0_from<S>(cfg);
  warn_positivity(x0, io);
  warn_experimental(params, io);
  const auto field = original_field(params);
  const Trajectory<S> traj =
      cfg.method == Method::RK4
          ? rk4_fixed(field, x0, cfg.t0, cfg.t1, cfg.step.value_or(kDefaultStep))
          : adaptive_45(field, x0, cfg.t0, cfg.t1, step_control(cfg));
  const bool ok = emit(cfg.output_path, io.out, io, [&](std::ostream& os) {
    if (cfg.format == Format::Csv)
      write_csv(os, traj);
    else
      os << trajectory_to_json(traj).dump() << '\n';
  });
  if (!ok) return kExitIo;
  if (traj.terminated != Termination::Completed) {
    diag(io, "warning",
         std::string("integration terminated: ") + std::string(termination_name(traj.terminated)) +
             " at t=" + format_number(traj.failure_time));
    return kExitBlowUp;
  }
  return kExitOk;
}

template <Scalar S>
int special(const RunConfig& cfg, const Streams& io) {
  const auto params = params_from<S>(cfg);
  const auto x0 = x0_from<S>(cfg);
  warn_positivity(x0, io);
  warn_experimental(params, io);

  const auto adm = check_admissibility(params, x0);
  if (!adm.pass) {
    io.out << admissibility_json(adm).dump(2) << '\n';
    diag(io, "error", "initial data violate the admissibility relations E1 = E2 = E3");
    return kExitAdmissibility;
  }
  const auto sol = solution_for(cfg, params, x0, adm);

  std::optional<double> tstar;
  if constexpr (!is_complex_v<S>) tstar = blow_up_time(sol);

  Trajectory<S> traj;
  std::vector<double> skipped;
  for (double t : linspace(cfg.t0, cfg.t1, cfg.grid_points.value_or(kDefaultGridPoints))) {
    if (tstar && std::abs(t - *tstar) < kBlowUpMargin) {
      skipped.push_back(t);
      continue;
    }
    if (tstar && t > *tstar) {
      traj.terminated = Termination::BlowUp;
      traj.failure_time = *tstar;
      break;
    }
    try {
      traj.states.push_back(eval_special(sol, t));
      traj.times.push_back(t);
    } catch (const Error&) {
      skipped.push_back(t);
    }
  }

  json report = admissibility_json(adm);
  report["z"] = scalar_to_json(sol.z());
  report["eta"] = scalar_to_json(sol.eta());
  if (tstar) report["blow_up_time"] = *tstar;
  report["skipped"] = skipped;

  bool pass = true;
  try {
    const VerifyReport vr = verify_special(params, sol, traj.times);
    report["ode_residual"] = {{"max", vr.max_residual},
                              {"max_scaled", vr.max_scaled_residual},
                              {"threshold", vr.tolerance},
                              {"points", vr.points},
                              {"pass", vr.pass}};
    pass = vr.pass;
  } catch (const Error& e) {
    report["ode_residual"] = {{"pass", false}, {"error", e.what()}};
    pass = false;
  }

  if constexpr (is_complex_v<S>) {
    if (const auto period = period_of(sol.eta())) {
      json per = {{"period", *period},
                  {"threshold", kPeriodTolClosed},
                  {"transverse_growth", *transverse_growth(params, sol)}};
      try {
        const double dev = (eval_special(sol, *period) - eval_special(sol, 0.0)).norm_inf();
        per["deviation"] = dev;
        per["pass"] = dev < kPeriodTolClosed;
        pass = pass && dev < kPeriodTolClosed;
      } catch (const Error& e) {
        per["pass"] = false;
        per["error"] = e.what();
        pass = false;
      }
      report["periodicity"] = per;
    }
  }
  report["pass"] = pass;

  std::vector<std::string> trailer;
  for (double t : skipped) trailer.push_back("skipped t=" + format_number(t) + " reason=pole");
  trailer.push_back("report=" + report.dump());

  const bool ok = emit(cfg.output_path, io.out, io, [&](std::ostream& os) {
    if (cfg.format == Format::Csv) {
      write_csv(os, traj, trailer);
    } else {
      json doc = trajectory_to_json(traj);
      doc["report"] = report;
      os << doc.dump() << '\n';
    }
  });
  if (!ok) return kExitIo;
  if (cfg.output_path) io.out << report.dump(2) << '\n';
  if (!skipped.empty())
    diag(io, "warning", std::to_string(skipped.size()) + " grid point(s) skipped near the pole");
  if (!pass) return kExitVerification;
  if (traj.terminated != Termination::Completed) return kExitBlowUp;
  return kExitOk;
}

CheckResult make_check(std::string name, double measured, double threshold) {
  return {std::move(name), measured, threshold, measured < threshold, {}};
}

CheckResult failed_check(std::string name, double threshold, std::string note) {
  return {std::move(name), std::numeric_limits<double>::infinity(), threshold, false,
          std::move(note)};
}

template <Scalar S>
std::vector<CheckResult> checks_for(const RunConfig& cfg) {
  std::vector<CheckResult> out;
  const auto params = params_from<S>(cfg);
  const auto x0 = x0_from<S>(cfg);

  const auto adm = check_admissibility(params, x0);
  out.push_back({"admissibility", adm.max_residual, adm.tolerance, adm.pass, {}});
  if (!adm.pass) return out;
  const auto sol = solution_for(cfg, params, x0, adm);

  double t_end = cfg.t1;
  if constexpr (!is_complex_v<S>) {
    if (const auto tstar = blow_up_time(sol); tstar && *tstar > cfg.t0)
      t_end = std::min(t_end, *tstar - kPoleBackoff);
  }
  const auto grid = linspace(cfg.t0, std::max(cfg.t0, t_end), kVerifyGridPoints);

  try {
    const auto vr = verify_special(params, sol, grid);
    out.push_back(make_check("ode_residual", vr.max_scaled_residual, vr.tolerance));
  } catch (const Error& e) {
    out.push_back(failed_check("ode_residual", kVerifyTol, e.what()));
  }

  std::vector<State<S>> closed;
  try {
    for (double t : grid) closed.push_back(eval_special(sol, t));
  } catch (const Error& e) {
    out.push_back(failed_check("integrator_agreement", kAgreementTol, e.what()));
    out.push_back(failed_check("ray_ratio", kRayTol, e.what()));
    return out;
  }

  if (grid.size() > 1) {
    const auto traj = adaptive_45_at(original_field(params), x0, grid, step_control(cfg, kOracleRtol, kOracleAtol));
    if (traj.terminated != Termination::Completed) {
      out.push_back(failed_check("integrator_agreement", kAgreementTol,
                                 "integration terminated: " +
                                     std::string(termination_name(traj.terminated))));
    } else {
      double worst = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double scale = closed[i].norm_inf();
        const double diff = (traj.states[i] - closed[i]).norm_inf();
        worst = std::max(worst, scale > 0.0 ? diff / scale : diff);
      }
      out.push_back(make_check("integrator_agreement", worst, kAgreementTol));
    }
  } else {
    out.push_back(make_check("integrator_agreement", 0.0, kAgreementTol));
  }

  double ray = 0.0;
  for (const auto& x : closed)
    for (std::size_t n = 0; n < 3; ++n)
      for (std::size_t m = 0; m < 3; ++m) {
        if (n == m || x0[m] == S(0)) continue;
        const S r0 = x0[n] / x0[m];
        const double denom = r0 == S(0) ? 1.0 : std::abs(r0);
        ray = std::max(ray, std::abs(x[n] / x[m] - r0) / denom);
      }
  out.push_back(make_check("ray_ratio", ray, kRayTol));

  if constexpr (is_complex_v<S>) {
    if (const auto period = period_of(sol.eta())) {
      const double T = *period;
      std::vector<double> phases;
      for (int k = 0; k < 10; ++k) phases.push_back(cfg.t0 + T * k / 10.0);
      try {
        double dev = 0.0;
        for (double t : phases)
          dev = std::max(dev, (eval_special(sol, t + T) - eval_special(sol, t)).norm_inf());
        out.push_back(make_check("periodicity", dev, kPeriodTolClosed));
      } catch (const Error& e) {
        out.push_back(failed_check("periodicity", kPeriodTolClosed, e.what()));
      }

      std::vector<double> times = phases;
      for (double t : phases) times.push_back(t + T);
      StepControl tight;
      tight.rtol = 1e-12;
      tight.atol = 1e-14;
      const auto traj = adaptive_45_at(original_field(params), x0, times, tight);
      if (traj.terminated != Termination::Completed) {
        out.push_back(failed_check("periodicity_integrator", kPeriodTolIntegrator,
                                   "integration terminated"));
      } else {
        double dev = 0.0;
        for (std::size_t k = 0; k < phases.size(); ++k)
          dev = std::max(dev, (traj.states[k + phases.size()] - traj.states[k]).norm_inf());
        auto check = make_check("periodicity_integrator", dev, kPeriodTolIntegrator);
        if (!check.pass)
          check.note = "transverse growth per period " + format_number(*transverse_growth(params, sol));
        out.push_back(check);
      }
    }
  }
  return out;
}

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path);
  if (!in) {
    ok = false;
    return {};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  ok = static_cast<bool>(in) || in.eof();
  return ss.str();
}

std::string_view config_error_kind(ConfigError::Kind k) {
  switch (k) {
    case ConfigError::Kind::Malformed: return "malformed config";
    case ConfigError::Kind::Schema: return "schema violation";
    case ConfigError::Kind::ModeMismatch: return "mode mismatch";
  }
  return "config error";
}

void check_mode_consistency(const RunConfig& cfg) {
  if (cfg.mode == Mode::Complex) return;
  auto bad = [](const Complex& c) { return c.imag() != 0.0; };
  bool any = bad(cfg.eta) || std::any_of(cfg.x0.begin(), cfg.x0.end(), bad) ||
             (cfg.z_override && bad(*cfg.z_override));
  if (const auto* s = std::get_if<Symmetric>(&cfg.couplings))
    any = any || bad(s->alpha) || bad(s->beta);
  else
    for (const auto& v : std::get<Couplings>(cfg.couplings).values) any = any || bad(v);
  if (any)
    throw ConfigError(ConfigError::Kind::ModeMismatch,
                      "config has imaginary parts but mode is \"real\"");
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, Streams io) {
  if (cfg.method == Method::ClosedForm) {
    diag(io, "error", "simulate needs method \"rk4\" or \"adaptive\"; use 'special' for closed-form");
    return kExitUsage;
  }
  return dispatch(cfg.mode, [&](auto tag) { return simulate<decltype(tag)>(cfg, io); });
}

int cmd_special(const RunConfig& cfg, Streams io) {
  if (cfg.method != Method::ClosedForm) {
    diag(io, "error", "special needs method \"closed-form\"; use 'simulate' for rk4 or adaptive");
    return kExitUsage;
  }
  return dispatch(cfg.mode, [&](auto tag) { return special<decltype(tag)>(cfg, io); });
}

std::vector<CheckResult> run_checks(const RunConfig& cfg) {
  return dispatch(cfg.mode, [&](auto tag) { return checks_for<decltype(tag)>(cfg); });
}

json checks_to_json(const std::vector<CheckResult>& checks) {
  json list = json::array();
  json failing = json::array();
  bool pass = true;
  for (const auto& c : checks) {
    json j = {{"name", c.name}, {"threshold", c.threshold}, {"pass", c.pass}};
    j["measured"] = std::isfinite(c.measured) ? json(c.measured) : json(nullptr);
    if (!c.note.empty()) j["note"] = c.note;
    list.push_back(j);
    if (!c.pass) failing.push_back(c.name);
    pass = pass && c.pass;
  }
  return {{"pass", pass}, {"checks", list}, {"failing", failing}};
}

int cmd_verify(const RunConfig& cfg, Streams io) {
  const auto checks = run_checks(cfg);
  const json report = checks_to_json(checks);
  const bool ok = emit(cfg.output_path, io.out, io,
                       [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  if (!ok) return kExitIo;
  if (!report["pass"].get<bool>()) {
    std::string names;
    for (const auto& n : report["failing"]) names += " " + n.get<std::string>();
    diag(io, "error", "verification failed:" + names);
    return kExitVerification;
  }
  return kExitOk;
}

int cmd_verify_batch(const RunConfig& base, std::uint64_t first_seed, int count, Streams io) {
  struct SeedResult {
    std::vector<CheckResult> checks;
    std::string error;
  };
  auto run_one = [&base](std::uint64_t seed) {
    SeedResult r;
    try {
      RunConfig cfg = base;
      cfg.z_override.reset();
      if (cfg.t1 <= cfg.t0) cfg.t0 = 0.0, cfg.t1 = 5.0;
      dispatch(cfg.mode, [&](auto tag) {
        using S = decltype(tag);
        const auto inst = random_admissible_instance<S>(seed);
        assign_instance(cfg, inst.params, inst.x0);
      });
      r.checks = run_checks(cfg);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  };

  // Seeds are independent; results are collected and printed in seed order.
  std::vector<SeedResult> results(static_cast<std::size_t>(std::max(count, 0)));
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < results.size(); start += workers) {
    std::vector<std::future<SeedResult>> batch;
    for (std::size_t i = start; i < std::min(results.size(), start + workers); ++i)
      batch.push_back(std::async(std::launch::async, run_one, first_seed + i));
    for (std::size_t i = 0; i < batch.size(); ++i) results[start + i] = batch[i].get();
  }

  int passed = 0;
  bool exhausted = false;
  std::ostringstream lines;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    lines << "seed=" << first_seed + i;
    if (!r.error.empty()) {
      lines << " pass=false error=\"" << r.error << "\"\n";
      exhausted = true;
      continue;
    }
    bool pass = true;
    for (const auto& c : r.checks) pass = pass && c.pass;
    passed += pass ? 1 : 0;
    lines << " pass=" << (pass ? "true" : "false");
    for (const auto& c : r.checks) lines << ' ' << c.name << '=' << format_number(c.measured);
    lines << '\n';
  }
  lines << "summary passed=" << passed << '/' << count << '\n';
  const std::string text = lines.str();
  if (!emit(base.output_path, io.out, io, [&](std::ostream& os) { os << text; })) return kExitIo;
  if (exhausted) return kExitSolver;
  return passed == count ? kExitOk : kExitVerification;
}

json solve_report(const SolveRequest& req, int& exit_code) {
  return dispatch(req.mode, [&](auto tag) -> json {
    using S = decltype(tag);
    std::map<SlotId, S> known;
    for (const auto& [slot, v] : req.known) known[slot] = narrow<S>(v);
    const ProblemInstance<S> inst(known, req.unknowns);
    SolveOutcome<S> outcome;
    try {
      outcome = solve_pair(inst);
    } catch (const IllConditionedError& e) {
      exit_code = kExitSolver;
      return {{"error", "ill-conditioned"}, {"diagnostic", e.what()}};
    }
    exit_code = kExitOk;
    json sols = json::array();
    json details = json::array();
    for (const auto& [u, v] : outcome.solutions) {
      sols.push_back({scalar_to_json(u), scalar_to_json(v)});
      const auto full = inst.complete(u, v);
      const auto r = residuals(full);
      json d = {{"residuals", {scalar_to_json(r[0]), scalar_to_json(r[1])}}};
      if (outcome.kind == SolveKind::Unique || outcome.kind == SolveKind::TwoRoots) {
        const auto e = linear_forms(params_of(full, S(1)), state_of(full));
        d["z"] = scalar_to_json(S((e[0] + e[1] + e[2]) / S(3)));
      }
      details.push_back(d);
    }
    json rep = {{"kind", kind_name(outcome.kind)},
                {"unknowns", {slot_name(req.unknowns.first), slot_name(req.unknowns.second)}},
                {"solutions", sols},
                {"details", details}};
    if (!outcome.description.empty()) rep["description"] = outcome.description;
    if (outcome.family_direction)
      rep["family_direction"] = {scalar_to_json(outcome.family_direction->first),
                                 scalar_to_json(outcome.family_direction->second)};
    if (!outcome.rejected.empty()) {
      json rej = json::array();
      for (const auto& [u, v] : outcome.rejected) rej.push_back({scalar_to_json(u), scalar_to_json(v)});
      rep["rejected_roots"] = rej;
    }
    return rep;
  });
}

int cmd_solve(const SolveRequest& req, Streams io, const std::optional<std::string>& output) {
  int code = kExitOk;
  const json rep = solve_report(req, code);
  if (!emit(output, io.out, io, [&](std::ostream& os) { os << rep.dump(2) << '\n'; }))
    return kExitIo;
  if (code == kExitSolver) diag(io, "error", rep.value("diagnostic", "solver diagnostic"));
  return code;
}

int run_cli(int argc, const char* const* argv, Streams io) {
  CLI::App app{"Three-species competition model: ray solutions, integration and admissibility solving"};
  app.require_subcommand(1);

  struct Common {
    std::string path;
    std::optional<std::string> mode, output, format;
    std::optional<std::uint64_t> seed;
    bool warn_nonpositive = false;
  };
  Common simulate_opts, special_opts, verify_opts, solve_opts;
  int batch = 0;

  auto add_common = [](CLI::App* sub, Common& c, bool path_required) {
    auto* opt = sub->add_option("config", c.path, "JSON run configuration");
    if (path_required) opt->required();
    sub->add_option("--mode", c.mode, "real | complex (overrides the file)");
    sub->add_option("--output", c.output, "output path (default: stdout)");
    sub->add_option("--format", c.format, "csv | json");
    sub->add_option("--seed", c.seed, "replace the instance by a generated admissible one");
    sub->add_flag("--warn-nonpositive", c.warn_nonpositive,
                  "warn about non-positive initial populations");
  };
  auto* simulate_cmd = app.add_subcommand("simulate", "integrate the model numerically");
  add_common(simulate_cmd, simulate_opts, true);
  auto* special_cmd = app.add_subcommand("special", "sample and verify the closed-form solution");
  add_common(special_cmd, special_opts, true);
  auto* verify_cmd = app.add_subcommand("verify", "run the full certification battery");
  add_common(verify_cmd, verify_opts, false);
  verify_cmd->add_option("--batch", batch, "verify N generated instances starting at --seed")
      ->check(CLI::PositiveNumber);
  auto* solve_cmd = app.add_subcommand("solve", "solve the admissibility relations for 2 unknowns");
  solve_cmd->add_option("request", solve_opts.path, "JSON solve request")->required();
  solve_cmd->add_option("--mode", solve_opts.mode, "real | complex (overrides the file)");
  solve_cmd->add_option("--output", solve_opts.output, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, io.out, io.err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  auto load = [&](const std::string& path, std::string& text) {
    bool ok = true;
    text = read_file(path, ok);
    if (!ok) diag(io, "error", "cannot read '" + path + "'");
    return ok;
  };

  try {
    if (solve_cmd->parsed()) {
      std::string text;
      if (!load(solve_opts.path, text)) return kExitIo;
      SolveRequest req = parse_solve_request(text);
      if (solve_opts.mode) {
        const auto m = parse_mode(*solve_opts.mode);
        if (!m) throw ConfigError(ConfigError::Kind::Schema, "--mode must be real or complex");
        req.mode = *m;
        if (req.mode == Mode::Real)
          for (const auto& [s, v] : req.known)
            if (v.imag() != 0.0)
              throw ConfigError(ConfigError::Kind::ModeMismatch,
                                "request has imaginary parts but mode is \"real\"");
      }
      return cmd_solve(req, io, solve_opts.output);
    }

    const Common& c = simulate_cmd->parsed() ? simulate_opts
                      : special_cmd->parsed() ? special_opts
                                              : verify_opts;
    RunConfig cfg;
    if (!c.path.empty()) {
      std::string text;
      if (!load(c.path, text)) return kExitIo;
      cfg = parse_config(text);
    } else {
      cfg.t0 = 0.0;
      cfg.t1 = 5.0;
      cfg.method = Method::Adaptive;
      cfg.couplings = Symmetric{1.0, 1.0};
      cfg.x0 = {0.2, 0.2, 0.2};
      if (batch == 0 && !c.seed)
        throw ConfigError(ConfigError::Kind::Schema, "a config file is required without --batch/--seed");
    }
    if (c.mode) {
      const auto m = parse_mode(*c.mode);
      if (!m) throw ConfigError(ConfigError::Kind::Schema, "--mode must be real or complex");
      cfg.mode = *m;
    }
    if (c.output) cfg.output_path = *c.output;
    if (c.format) {
      const auto f = parse_format(*c.format);
      if (!f) throw ConfigError(ConfigError::Kind::Schema, "--format must be csv or json");
      cfg.format = *f;
    }
    Streams sio{io.out, io.err, io.color, c.warn_nonpositive};

    if (verify_cmd->parsed() && batch > 0) {
      check_mode_consistency(cfg);
      return cmd_verify_batch(cfg, c.seed.value_or(0), batch, sio);
    }
    if (c.seed) {
      dispatch(cfg.mode, [&](auto tag) {
        using S = decltype(tag);
        const auto inst = random_admissible_instance<S>(*c.seed);
        assign_instance(cfg, inst.params, inst.x0);
      });
      cfg.z_override.reset();
    }
    check_mode_consistency(cfg);

    if (simulate_cmd->parsed()) return cmd_simulate(cfg, sio);
    if (special_cmd->parsed()) return cmd_special(cfg, sio);
    return cmd_verify(cfg, sio);
  } catch (const ConfigError& e) {
    diag(io, "error", std::string(config_error_kind(e.kind())) + ": " + e.what());
    return kExitUsage;
  } catch (const ExhaustionError& e) {
    diag(io, "error", e.what());
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    diag(io, "error", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    diag(io, "error", e.what());
    return kExitVerification;
  }
}

}  // namespace mayleonard::cli
