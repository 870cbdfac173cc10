#include "avgorbit/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "avgorbit/resonance.hpp"
#include "avgorbit/serialize.hpp"
#include "avgorbit/verify.hpp"

namespace avgorbit::cli {

namespace {

constexpr const char* kValidModels = "nonsmooth-vdp, classical-vdp, piecewise-spring";

/// Config problem detected before any numerics run.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in list '" + text + "'");
    }
  }
  return out;
}

Vec2 parse_point(const std::string& text) {
  const std::vector<double> xs = parse_list(text);
  if (xs.size() != 2 || !std::isfinite(xs[0]) || !std::isfinite(xs[1])) {
    throw ConfigError("point must be written as M,N (got '" + text + "')");
  }
  return {xs[0], xs[1]};
}

ModelSpec model_spec(const RunConfig& cfg) {
  const auto kind = parse_model(cfg.model);
  ModelSpec spec;
  spec.kind = *kind;
  spec.a = cfg.a;
  spec.lambda = cfg.lambda;
  spec.spring = cfg.spring;
  return spec;
}

void validate(const RunConfig& cfg, const std::string& command) {
  if (!parse_model(cfg.model)) {
    throw ConfigError("unknown model '" + cfg.model + "'; valid models: " + kValidModels);
  }
  if (!cfg.format.empty() && cfg.format != "csv" && cfg.format != "json") {
    throw ConfigError("format must be csv or json");
  }
  if (!std::isfinite(cfg.a) || !std::isfinite(cfg.lambda) || cfg.lambda < 0.0) {
    throw ConfigError("a must be finite and lambda finite and >= 0");
  }
  if (command == "resonance" && (cfg.n < 2 || !(cfg.a_min < cfg.a_max))) {
    throw ConfigError("resonance grid needs n >= 2 and a_min < a_max");
  }
  if (command == "verify" && !(cfg.eps > 0.0 && cfg.eps <= 0.5)) {
    throw ConfigError("verify needs eps in (0, 0.5]; eps = 0 makes the return map the identity");
  }
  if (command == "verify" && cfg.branch != "stable" && cfg.branch != "saddle" &&
      cfg.branch != "small") {
    throw ConfigError("branch must be stable, saddle or small");
  }
  if (command == "g0" && cfg.points.empty()) {
    throw ConfigError("g0 needs at least one --point M,N");
  }
  const bool vdp = cfg.model != "piecewise-spring";
  if ((command == "resonance" || command == "critical") && !vdp) {
    throw ConfigError("no closed-form resonance curves or critical values are defined for model '" +
                      cfg.model + "'");
  }
  if ((command == "zeros" || command == "verify") && !vdp && cfg.points.empty()) {
    throw ConfigError("model '" + cfg.model + "' needs a --point guess");
  }
  for (int i = 1; i < static_cast<int>(cfg.eps_list.size()); ++i) {
    if (!(cfg.eps_list[i] < cfg.eps_list[i - 1]) || !(cfg.eps_list[i] > 0.0)) {
      throw ConfigError("eps list must be positive and strictly decreasing");
    }
  }
  try {
    cfg.integrator.validate();
    cfg.spring.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (cfg.quadrature.nodes_per_piece < 1) {
    throw ConfigError("quadrature needs at least one node per piece");
  }
}

std::string row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  return out + '\n';
}

// ---------------------------------------------------------------------------

void cmd_g0(const RunConfig& cfg, std::ostream& os, const std::string& format) {
  const ModelSpec spec = model_spec(cfg);
  const AveragedField field = spec.averaged_field(false, cfg.quadrature);
  const bool has_analytic = spec.kind == ModelKind::nonsmooth_vdp;
  nlohmann::json records = nlohmann::json::array();
  if (format == "csv") {
    os << "M,N,g0_1,g0_2,analytic_1,analytic_2,max_abs_diff,residual\n";
  }
  for (const Vec2& p : cfg.points) {
    const Vec v = p;
    const Vec g = eval_g0_numeric(field, v);
    std::optional<Vec2> an;
    if (has_analytic) {
      an = g0_analytic(p(0), p(1), spec.vdp());
    }
    const double diff = an ? (g - Vec(*an)).cwiseAbs().maxCoeff() : std::nan("");
    if (format == "csv") {
      os << row({format_number(p(0)), format_number(p(1)), format_number(g(0)),
                 format_number(g(1)), an ? format_number((*an)(0)) : "",
                 an ? format_number((*an)(1)) : "", an ? format_number(diff) : "",
                 format_number(g.norm())});
    } else {
      nlohmann::json r{{"M", p(0)}, {"N", p(1)}, {"g0", {g(0), g(1)}}, {"residual", g.norm()}};
      r["analytic"] = an ? nlohmann::json{(*an)(0), (*an)(1)} : nlohmann::json(nullptr);
      r["max_abs_diff"] = an ? nlohmann::json(diff) : nlohmann::json(nullptr);
      records.push_back(r);
    }
  }
  if (format == "json") {
    os << records.dump(2) << '\n';
  }
}

std::vector<Vec> zero_guesses(const RunConfig& cfg, const ModelSpec& spec) {
  std::vector<Vec> guesses;
  for (const Vec2& p : cfg.points) {
    guesses.emplace_back(p);
  }
  if (guesses.empty()) {
    const VdpVariant variant = spec.vdp().variant;
    for (const auto& root : amplitude_roots(cfg.a, cfg.lambda, variant).roots) {
      guesses.emplace_back(reconstruct_zero(root.amplitude, cfg.a, cfg.lambda, variant));
    }
  }
  return guesses;
}

void cmd_zeros(const RunConfig& cfg, std::ostream& os, const std::string& format) {
  const ModelSpec spec = model_spec(cfg);
  const AveragedField field = spec.averaged_field(false, cfg.quadrature);
  nlohmann::json records = nlohmann::json::array();
  if (format == "csv") {
    os << "M,N,A,phi,residual,det,trace,verdict\n";
  }
  for (const Vec& guess : zero_guesses(cfg, spec)) {
    const ZeroReport z = find_zero(field, guess);
    const AmplitudePhase ap = to_amplitude_phase(z.v0(0), z.v0(1));
    if (format == "csv") {
      os << row({format_number(z.v0(0)), format_number(z.v0(1)), format_number(ap.amplitude),
                 format_number(ap.phase), format_number(z.residual), format_number(z.det),
                 format_number(z.trace), to_string(z.verdict)});
    } else {
      nlohmann::json r = to_json(z);
      r["A"] = ap.amplitude;
      r["phi"] = ap.phase;
      records.push_back(r);
    }
  }
  if (format == "json") {
    os << records.dump(2) << '\n';
  }
}

void cmd_resonance(const RunConfig& cfg, std::ostream& os, const std::string& format) {
  const VdpVariant variant = model_spec(cfg).vdp().variant;
  const ResonanceCurve curve = trace_curve(cfg.lambda, cfg.a_min, cfg.a_max, cfg.n, variant);
  if (format == "csv") {
    write_curve_csv(os, curve);
  } else {
    os << to_json(curve).dump(2) << '\n';
  }
}

void cmd_critical(const RunConfig& cfg, std::ostream& os, const std::string& format) {
  const VdpVariant variant = model_spec(cfg).vdp().variant;
  const CriticalValues num = critical_values(variant);
  const CriticalValues ref = critical_values_closed_form(variant);
  struct Quantity {
    const char* name;
    double numeric;
    double closed;
  };
  const Quantity quantities[] = {
      {"lambda_double", num.lambda_double, ref.lambda_double},
      {"amplitude_double", num.amplitude_double, ref.amplitude_double},
      {"lambda_sep", num.lambda_sep, ref.lambda_sep},
      {"a_sep", num.a_sep, ref.a_sep},
      {"amplitude_sep", num.amplitude_sep, ref.amplitude_sep},
  };
  // Two candidate double-point amplitudes for the nonsmooth model (2 pi / 8
  // and 2 / sqrt 3) are reported next to the computed one.
  const double candidate_a = 2.0 * std::numbers::pi / 8.0;
  const double candidate_b = 2.0 / std::sqrt(3.0);

  if (format == "csv") {
    os << "quantity,numeric,closed_form,difference\n";
    for (const auto& q : quantities) {
      os << row({q.name, format_number(q.numeric), format_number(q.closed),
                 format_number(q.numeric - q.closed)});
    }
    return;
  }
  nlohmann::json j;
  j["model"] = cfg.model;
  j["numeric"] = to_json(num);
  j["closed_form"] = to_json(ref);
  nlohmann::json diff;
  for (const auto& q : quantities) {
    diff[q.name] = q.numeric - q.closed;
  }
  j["difference"] = diff;
  if (variant == VdpVariant::nonsmooth) {
    j["double_point_amplitude"] = {
        {"computed", num.amplitude_double},
        {"candidate_2pi_over_8", candidate_a},
        {"candidate_2_over_sqrt3", candidate_b},
        {"difference_from_2pi_over_8", num.amplitude_double - candidate_a},
        {"difference_from_2_over_sqrt3", num.amplitude_double - candidate_b}};
  } else {
    const DetFormCheck check = classical_det_form_check(0.5, 1.3);
    j["determinant_form_check"] = {{"a", check.a},
                                   {"A", check.amplitude},
                                   {"numeric_det_over_pi2", check.numeric},
                                   {"one_plus_a2_form", check.plus_a2},
                                   {"one_minus_a2_form", check.minus_a2},
                                   {"matches", check.matches}};
  }
  os << j.dump(2) << '\n';
}

std::optional<Vec> branch_guess(const RunConfig& cfg, const ModelSpec& spec) {
  if (!cfg.points.empty()) {
    return Vec(cfg.points.front());
  }
  const VdpVariant variant = spec.vdp().variant;
  const auto roots = amplitude_roots(cfg.a, cfg.lambda, variant).roots;
  std::optional<double> chosen;
  for (const auto& root : roots) {
    if (root.multiplicity != 1) continue;
    const StabilityTag tag = stability_tag(root.amplitude, cfg.a, variant);
    if (cfg.branch == "stable" && tag.stable) {
      chosen = root.amplitude;  // roots ascend; keep the largest
    } else if (cfg.branch == "saddle" && tag.det < 0.0 && !chosen) {
      chosen = root.amplitude;
    } else if (cfg.branch == "small" && !chosen) {
      chosen = root.amplitude;
    }
  }
  if (!chosen) {
    return std::nullopt;
  }
  return Vec(reconstruct_zero(*chosen, cfg.a, cfg.lambda, variant));
}

VerifyOptions verify_options(const RunConfig& cfg) {
  VerifyOptions opts;
  opts.integrator = cfg.integrator;
  opts.quadrature = cfg.quadrature;
  return opts;
}

void write_report_csv_header(std::ostream& os) {
  os << "eps,v0_1,v0_2,v_eps_1,v_eps_2,distance,simulated_amplitude,predicted_amplitude,"
        "max_modulus,stability_verdict,classification,agreement\n";
}

void write_report_csv(std::ostream& os, const VerificationReport& r) {
  double max_mod = 0.0;
  for (const auto& z : r.floquet_multipliers) max_mod = std::max(max_mod, std::abs(z));
  os << row({format_number(r.eps), format_number(r.v0(0)), format_number(r.v0(1)),
             format_number(r.v_eps(0)), format_number(r.v_eps(1)), format_number(r.distance),
             format_number(r.simulated_amplitude), format_number(r.predicted_amplitude),
             format_number(max_mod), to_string(r.stability_verdict),
             to_string(r.classification), r.agreement ? "true" : "false"});
}

int cmd_verify(const RunConfig& cfg, std::ostream& os, const std::string& format,
               std::ostream& err) {
  const ModelSpec spec = model_spec(cfg);
  const auto guess = branch_guess(cfg, spec);
  if (!guess) {
    err << "no " << cfg.branch << " branch at a=" << cfg.a << ", lambda=" << cfg.lambda << '\n';
    return kExitNumeric;
  }
  const VerifyOptions opts = verify_options(cfg);
  const bool stable_requested = cfg.branch == "stable";

  if (!cfg.eps_list.empty()) {
    const EpsSweep sweep = eps_sweep(spec, *guess, cfg.eps_list, opts);
    bool ok = true;
    if (format == "csv") {
      write_report_csv_header(os);
    }
    for (const auto& e : sweep.entries) {
      if (!e.report) {
        ok = false;
        continue;
      }
      ok = ok && (!stable_requested || e.report->agreement);
      if (format == "csv") write_report_csv(os, *e.report);
    }
    if (format == "json") os << to_json(sweep).dump(2) << '\n';
    return ok ? kExitOk : kExitNumeric;
  }

  const VerificationReport report = verify_branch(spec, cfg.eps, *guess, opts);
  if (format == "csv") {
    write_report_csv_header(os);
    write_report_csv(os, report);
  } else {
    os << to_json(report).dump(2) << '\n';
  }
  if (stable_requested && !report.agreement) {
    err << "averaging prediction and simulation disagree on the stable branch\n";
    return kExitNumeric;
  }
  return kExitOk;
}

std::string default_format(const std::string& command) {
  return (command == "resonance" || command == "g0" || command == "zeros") ? "csv" : "json";
}

}  // namespace

void apply_json(const nlohmann::json& j, RunConfig& cfg) {
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }
  static const std::set<std::string> known{
      "model", "a",      "lambda", "eps",   "a_min",  "a_max",      "n",         "out",
      "format", "branch", "eps_list", "point", "points", "spring", "integrator", "quadrature"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw std::invalid_argument("unknown config key '" + item.key() + "'");
    }
  }
  auto get = [&](const char* key, auto& target) {
    if (j.contains(key)) {
      j.at(key).get_to(target);
    }
  };
  get("model", cfg.model);
  get("a", cfg.a);
  get("lambda", cfg.lambda);
  get("eps", cfg.eps);
  get("a_min", cfg.a_min);
  get("a_max", cfg.a_max);
  get("n", cfg.n);
  get("out", cfg.out);
  get("format", cfg.format);
  get("branch", cfg.branch);
  get("eps_list", cfg.eps_list);
  if (j.contains("point")) {
    const auto& p = j.at("point");
    cfg.points = {Vec2(p.at(0).get<double>(), p.at(1).get<double>())};
  }
  if (j.contains("points")) {
    cfg.points.clear();
    for (const auto& p : j.at("points")) {
      cfg.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
  }
  if (j.contains("spring")) {
    const auto& s = j.at("spring");
    if (s.contains("damping")) s.at("damping").get_to(cfg.spring.damping);
    if (s.contains("stiffening")) s.at("stiffening").get_to(cfg.spring.stiffening);
    if (s.contains("load")) s.at("load").get_to(cfg.spring.load);
  }
  if (j.contains("integrator")) {
    const auto& s = j.at("integrator");
    if (s.contains("step")) s.at("step").get_to(cfg.integrator.step);
    if (s.contains("event_tol")) s.at("event_tol").get_to(cfg.integrator.event_tol);
    if (s.contains("rtol")) s.at("rtol").get_to(cfg.integrator.rtol);
    if (s.contains("atol")) s.at("atol").get_to(cfg.integrator.atol);
  }
  if (j.contains("quadrature")) {
    const auto& s = j.at("quadrature");
    if (s.contains("nodes_per_piece")) s.at("nodes_per_piece").get_to(cfg.quadrature.nodes_per_piece);
    if (s.contains("split_at_kinks")) s.at("split_at_kinks").get_to(cfg.quadrature.split_at_kinks);
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Periodic orbits of eps-small piecewise-smooth systems by averaging"};
  app.name("avgorbit");
  app.fallthrough();
  app.require_subcommand(1);

  // Flag values; only the ones actually given override the config file.
  RunConfig flags;
  std::vector<std::string> point_texts;
  std::string eps_list_text;
  std::string config_path;
  bool no_kink_split = false;

  std::vector<CLI::Option*> opts;
  auto* o_model = app.add_option("--model", flags.model, std::string("model: ") + kValidModels);
  auto* o_a = app.add_option("--a", flags.a, "detuning a");
  auto* o_lambda = app.add_option("--lambda", flags.lambda, "forcing amplitude lambda");
  auto* o_eps = app.add_option("--eps", flags.eps, "small parameter eps");
  auto* o_amin = app.add_option("--a-min", flags.a_min, "detuning grid start");
  auto* o_amax = app.add_option("--a-max", flags.a_max, "detuning grid end");
  auto* o_n = app.add_option("--n", flags.n, "detuning grid size");
  auto* o_point = app.add_option("--point", point_texts, "state M,N (repeatable)");
  auto* o_out = app.add_option("--out", flags.out, "output path");
  auto* o_format = app.add_option("--format", flags.format, "csv or json");
  auto* o_branch = app.add_option("--branch", flags.branch, "verify branch: stable, saddle, small");
  auto* o_epslist = app.add_option("--eps-list", eps_list_text, "verify sweep, e.g. 0.2,0.1,0.05");
  auto* o_damping = app.add_option("--damping", flags.spring.damping, "spring damping");
  auto* o_stiff = app.add_option("--stiffening", flags.spring.stiffening, "spring stiffening gain");
  auto* o_load = app.add_option("--load", flags.spring.load, "spring constant load");
  auto* o_step = app.add_option("--step", flags.integrator.step, "integrator base step");
  auto* o_evtol = app.add_option("--event-tol", flags.integrator.event_tol, "event time tolerance");
  auto* o_nodes = app.add_option("--nodes", flags.quadrature.nodes_per_piece,
                                 "Gauss nodes per smooth piece");
  auto* o_nosplit = app.add_flag("--no-kink-split", no_kink_split,
                                 "integrate across kinks without splitting");
  app.add_option("--config", config_path, "JSON config file; flags override it");

  const char* commands[][2] = {
      {"g0", "evaluate the averaged field at points"},
      {"zeros", "locate and classify zeros of the averaged field"},
      {"resonance", "emit a resonance curve as CSV"},
      {"critical", "critical forcing amplitudes"},
      {"verify", "check averaging predictions against direct simulation"},
  };
  for (const auto& c : commands) {
    app.add_subcommand(c[0], c[1]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        throw ConfigError("cannot open config file '" + config_path + "'");
      }
      apply_json(nlohmann::json::parse(in), cfg);
    }
    if (o_model->count()) cfg.model = flags.model;
    if (o_a->count()) cfg.a = flags.a;
    if (o_lambda->count()) cfg.lambda = flags.lambda;
    if (o_eps->count()) cfg.eps = flags.eps;
    if (o_amin->count()) cfg.a_min = flags.a_min;
    if (o_amax->count()) cfg.a_max = flags.a_max;
    if (o_n->count()) cfg.n = flags.n;
    if (o_out->count()) cfg.out = flags.out;
    if (o_format->count()) cfg.format = flags.format;
    if (o_branch->count()) cfg.branch = flags.branch;
    if (o_damping->count()) cfg.spring.damping = flags.spring.damping;
    if (o_stiff->count()) cfg.spring.stiffening = flags.spring.stiffening;
    if (o_load->count()) cfg.spring.load = flags.spring.load;
    if (o_step->count()) cfg.integrator.step = flags.integrator.step;
    if (o_evtol->count()) cfg.integrator.event_tol = flags.integrator.event_tol;
    if (o_nodes->count()) cfg.quadrature.nodes_per_piece = flags.quadrature.nodes_per_piece;
    if (o_nosplit->count()) cfg.quadrature.split_at_kinks = !no_kink_split;
    if (o_point->count()) {
      cfg.points.clear();
      for (const auto& p : point_texts) cfg.points.push_back(parse_point(p));
    }
    if (o_epslist->count()) cfg.eps_list = parse_list(eps_list_text);
    validate(cfg, command);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return kExitConfig;
  }

  const std::string format = cfg.format.empty() ? default_format(command) : cfg.format;
  std::filesystem::path target;
  const char* out_dir = std::getenv(kOutDirEnv);
  if (!cfg.out.empty()) {
    target = cfg.out;
    if (target.is_relative() && out_dir && *out_dir) {
      target = std::filesystem::path(out_dir) / target;
    }
  } else if (out_dir && *out_dir) {
    target = std::filesystem::path(out_dir) / (command + "." + format);
  }

  // Results are buffered so a failing command leaves no partial output behind.
  std::ostringstream buffer;
  int code = kExitOk;
  try {
    if (command == "g0") {
      cmd_g0(cfg, buffer, format);
    } else if (command == "zeros") {
      cmd_zeros(cfg, buffer, format);
    } else if (command == "resonance") {
      cmd_resonance(cfg, buffer, format);
    } else if (command == "critical") {
      cmd_critical(cfg, buffer, format);
    } else if (command == "verify") {
      code = cmd_verify(cfg, buffer, format, err);
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::invalid_argument ? kExitConfig : kExitNumeric;
  }

  if (target.empty()) {
    out << buffer.str();
    return code;
  }
  std::ofstream file(target, std::ios::binary);
  if (!(file << buffer.str())) {
    err << "error: cannot write '" << target.string() << "'\n";
    return kExitConfig;
  }
  return code;
}

}  // namespace avgorbit::cli
