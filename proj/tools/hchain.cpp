// hchain: command line driver for the harmonic chain library.
//
//   hchain <command> [--config FILE | --preset NAME] [--seed S] [--out DIR]
//   hchain run --config FILE        (command taken from the config)
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hchain/csv.hpp"
#include "hchain/dynamics.hpp"
#include "hchain/equilibrium.hpp"
#include "hchain/errors.hpp"
#include "hchain/flucthydro.hpp"
#include "hchain/hydro.hpp"
#include "hchain/stats.hpp"
#include "hchain/steady_state.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hchain;

namespace {

enum class Kind { Number, Integer, Boolean, String, NumberArray, StringArray };

const std::map<std::string, std::map<std::string, Kind>>& schema() {
  static const std::map<std::string, std::map<std::string, Kind>> s{
      {"chain",
       {{"n_sites", Kind::Integer},
        {"pinning", Kind::Number},
        {"flip_rate", Kind::Number},
        {"bath_coupling", Kind::Number},
        {"temp_left", Kind::Number},
        {"temp_right", Kind::Number},
        {"model", Kind::String}}},
      {"simulation",
       {{"dt", Kind::Number},
        {"t_burn", Kind::Number},
        {"t_sample", Kind::Number},
        {"sample_stride", Kind::Integer},
        {"seed", Kind::Integer},
        {"replicas", Kind::Integer},
        {"n_batches", Kind::Integer},
        {"allow_large_dt", Kind::Boolean}}},
      {"covariance", {{"sizes", Kind::NumberArray}, {"gap", Kind::Boolean}}},
      {"hydro",
       {{"mesh", Kind::Integer},
        {"gamma", Kind::Number},
        {"temp_left", Kind::Number},
        {"temp_right", Kind::Number},
        {"dt", Kind::Number},
        {"t_final", Kind::Number},
        {"sample_every", Kind::Integer},
        {"u_amplitude", Kind::Number},
        {"eps_amplitude", Kind::Number}}},
      {"flucthydro",
       {{"mesh", Kind::Integer},
        {"gamma", Kind::Number},
        {"temp_left", Kind::Number},
        {"temp_right", Kind::Number},
        {"dt", Kind::Number},
        {"t_burn", Kind::Number},
        {"t_final", Kind::Number},
        {"sample_every", Kind::Integer},
        {"replicas", Kind::Integer},
        {"n_batches", Kind::Integer},
        {"seed", Kind::Integer},
        {"scheme", Kind::String},
        {"r_boundary", Kind::String},
        {"test_functions", Kind::StringArray}}},
      {"compare", {{"lte_resolution", Kind::Integer}, {"monte_carlo", Kind::Boolean}}},
  };
  return s;
}

const std::vector<std::string> kCommands{"simulate",  "covariance", "selfconsistent",
                                         "hydro",     "flucthydro", "compare"};

/// A parsed config plus the raw text, for line-precise diagnostics.
struct Config {
  json doc = json::object();
  std::string raw;
  std::string source = "<defaults>";

  int line_of(const std::string& section, const std::string& key = {}) const {
    std::size_t pos = raw.find('"' + section + '"');
    if (pos == std::string::npos) return 0;
    if (!key.empty()) {
      const std::size_t k = raw.find('"' + key + '"', pos);
      if (k != std::string::npos) pos = k;
    }
    return 1 + static_cast<int>(std::count(raw.begin(), raw.begin() + static_cast<long>(pos), '\n'));
  }

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& msg) const {
    const int line = line_of(section, key);
    throw ConfigError(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + msg);
  }

  json section(const std::string& name) const {
    return doc.contains(name) ? doc.at(name) : json::object();
  }
};

bool matches(const json& v, Kind k) {
  switch (k) {
    case Kind::Number: return v.is_number();
    case Kind::Integer: return v.is_number_integer() || (v.is_number() && std::floor(v.get<double>()) == v.get<double>());
    case Kind::Boolean: return v.is_boolean();
    case Kind::String: return v.is_string();
    case Kind::NumberArray:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
    case Kind::StringArray:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_string(); });
  }
  return false;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Number: return "a number";
    case Kind::Integer: return "an integer";
    case Kind::Boolean: return "a boolean";
    case Kind::String: return "a string";
    case Kind::NumberArray: return "an array of numbers";
    case Kind::StringArray: return "an array of strings";
  }
  return "?";
}

void validate(const Config& c) {
  if (!c.doc.is_object()) c.fail("", "", "config must be a JSON object");
  for (const auto& [name, value] : c.doc.items()) {
    if (name == "command") {
      if (!value.is_string() ||
          std::find(kCommands.begin(), kCommands.end(), value.get<std::string>()) == kCommands.end())
        c.fail("command", "", "\"command\" must be one of simulate, covariance, selfconsistent, "
                              "hydro, flucthydro, compare");
      continue;
    }
    const auto it = schema().find(name);
    if (it == schema().end()) c.fail(name, "", "unknown section \"" + name + "\"");
    if (!value.is_object()) c.fail(name, "", "section \"" + name + "\" must be an object");
    for (const auto& [key, v] : value.items()) {
      const auto k = it->second.find(key);
      if (k == it->second.end()) c.fail(name, key, "unknown key \"" + name + "." + key + "\"");
      if (!matches(v, k->second))
        c.fail(name, key, "\"" + name + "." + key + "\" must be " + kind_name(k->second));
    }
  }
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Config c;
  c.raw = ss.str();
  c.source = path;
  try {
    c.doc = json::parse(c.raw);
  } catch (const json::parse_error& e) {
    const std::size_t at = std::min<std::size_t>(e.byte, c.raw.size());
    const int line = 1 + static_cast<int>(std::count(c.raw.begin(), c.raw.begin() + static_cast<long>(at > 0 ? at - 1 : 0), '\n'));
    throw ConfigError(path + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
  }
  validate(c);
  return c;
}

fs::path preset_dir() {
  if (const char* env = std::getenv("HCHAIN_PRESET_DIR")) return env;
  return HCHAIN_PRESET_DIR;
}

template <typename T>
T get(const json& sec, const char* key, T fallback) {
  return sec.contains(key) ? sec.at(key).get<T>() : fallback;
}

ChainParams chain_params(const Config& c) {
  const json s = c.section("chain");
  ChainParams p;
  p.n_sites = get(s, "n_sites", p.n_sites);
  p.pinning = get(s, "pinning", p.pinning);
  p.flip_rate = get(s, "flip_rate", p.flip_rate);
  p.bath_coupling = get(s, "bath_coupling", p.bath_coupling);
  p.temp_left = get(s, "temp_left", p.temp_left);
  p.temp_right = get(s, "temp_right", p.temp_right);
  try {
    p.model = model_from_string(get<std::string>(s, "model", "velocity_flip"));
    p.validate();
  } catch (const ConfigError& e) {
    c.fail("chain", "", e.what());
  }
  return p;
}

SimConfig sim_config(const Config& c, const ChainParams& p) {
  const json s = c.section("simulation");
  SimConfig cfg;
  cfg.dt = get(s, "dt", cfg.dt);
  cfg.t_burn = get(s, "t_burn", cfg.t_burn);
  cfg.t_sample = get(s, "t_sample", cfg.t_sample);
  cfg.sample_stride = get(s, "sample_stride", cfg.sample_stride);
  cfg.seed = get<std::uint64_t>(s, "seed", cfg.seed);
  cfg.replicas = get(s, "replicas", cfg.replicas);
  cfg.n_batches = get(s, "n_batches", cfg.n_batches);
  cfg.allow_large_dt = get(s, "allow_large_dt", cfg.allow_large_dt);
  try {
    return resolve(cfg, p);
  } catch (const ConfigError& e) {
    c.fail("simulation", "", e.what());
  }
}

/// The resolved configuration written into every output header.
json resolved(const Config& c, const std::string& command) {
  json r = c.doc;
  r["command"] = command;
  const ChainParams p = chain_params(c);
  r["chain"] = {{"n_sites", p.n_sites},         {"pinning", p.pinning},
                {"flip_rate", p.flip_rate},     {"bath_coupling", p.bath_coupling},
                {"temp_left", p.temp_left},     {"temp_right", p.temp_right},
                {"model", std::string(to_string(p.model))}};
  if (command == "simulate" || (command == "compare" && get(c.section("compare"), "monte_carlo", false))) {
    const SimConfig s = sim_config(c, p);
    r["simulation"] = {{"dt", s.dt},           {"t_burn", s.t_burn},
                       {"t_sample", s.t_sample}, {"sample_stride", s.sample_stride},
                       {"seed", s.seed},       {"replicas", s.replicas},
                       {"n_batches", s.n_batches}, {"allow_large_dt", s.allow_large_dt}};
  }
  return r;
}

struct Output {
  fs::path dir;
  json config;

  std::ofstream open(const std::string& name) const {
    fs::create_directories(dir);
    std::ofstream f(dir / name);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    return f;
  }
};

std::vector<double> bath_profile(const ChainParams& p) {
  if (p.model == Model::VelocityFlip) return {};
  return self_consistent_profile(p).profile.temps;
}

void cmd_simulate(const Config& c, const Output& out) {
  const ChainParams p = chain_params(c);
  const SimConfig cfg = sim_config(c, p);
  const std::vector<double> temps = bath_profile(p);
  const auto reps = run_replicas(p, cfg, temps);
  const auto psq = p_sq_estimates(reps);
  const auto en = energy_estimates(reps);
  {
    auto f = out.open("simulate_profile.csv");
    CsvWriter w(f, out.config);
    w.header({"site", "p_sq", "p_sq_err", "energy", "energy_err"});
    for (std::size_t j = 0; j < psq.size(); ++j)
      w.row({double(j + 1), psq[j].value, psq[j].std_error, en[j].value, en[j].std_error});
  }
  std::vector<std::vector<double>> segments;
  long flips = 0;
  for (const auto& r : reps) {
    segments.push_back(r.h_samples);
    flips += r.flip_count;
  }
  const EstimateWithError cur = current_estimate(reps);
  const EstimateWithError s = estimate_s(segments, p.n_sites, cfg.n_batches);
  auto f = out.open("simulate_summary.csv");
  CsvWriter w(f, out.config);
  w.header({"quantity", "value", "std_error"});
  w.row("mean_current", {cur.value, cur.std_error});
  w.row("s", {s.value, s.std_error});
  w.row("flip_count", {double(flips), 0.0});
  for (const auto& warning : s.warnings) std::cerr << "warning: s estimate: " << warning << '\n';
}

void cmd_covariance(const Config& c, const Output& out) {
  const ChainParams p = chain_params(c);
  const json sec = c.section("covariance");
  const std::vector<double> temps = bath_profile(p);
  const SecondMoments m = stationary_covariance(p, temps);
  {
    auto f = out.open("covariance.csv");
    f << "# hchain " << HCHAIN_VERSION << "\n# config: " << out.config.dump() << '\n';
    write_covariance_csv(f, m);
  }
  const SteadySummary s = steady_current_and_s(p, m);
  const bool equilibrium = p.temp_left == p.temp_right;
  {
    auto f = out.open("covariance_summary.csv");
    CsvWriter w(f, out.config);
    w.header({"quantity", "value"});
    w.row("equilibrium", {equilibrium ? 1.0 : 0.0});
    w.row("mean_current", {equilibrium && std::abs(s.mean_current) < 1e-12 ? 0.0 : s.mean_current});
    w.row("mean_energy", {s.mean_energy});
    w.row("s_gaussian", {s.s_gaussian});
    w.row("min_eigenvalue", {m.min_eigenvalue()});
    if (get(sec, "gap", false)) w.row("gap", {spectral_gap(p).rate});
  }
  if (sec.contains("sizes")) {
    auto f = out.open("gap_scaling.csv");
    CsvWriter w(f, out.config);
    w.header({"n_sites", "gap"});
    std::vector<double> lx, ly;
    for (double n : sec.at("sizes").get<std::vector<double>>()) {
      ChainParams q = p;
      q.n_sites = static_cast<int>(n);
      if (q.n_sites < 2 || q.n_sites != n) c.fail("covariance", "sizes", "sizes must be integers >= 2");
      const double rate = spectral_gap(q).rate;
      w.row({n, rate});
      lx.push_back(std::log(n));
      ly.push_back(std::log(rate));
    }
    if (lx.size() >= 2) {
      const LinearFit fit = linear_fit(lx, ly);
      f << "# exponent: " << format_number(fit.slope) << " r_squared: " << format_number(fit.r_squared) << '\n';
    }
  }
}

void cmd_selfconsistent(const Config& c, const Output& out) {
  ChainParams p = chain_params(c);
  p.model = Model::SelfConsistent;
  const SelfConsistentResult r = self_consistent_profile(p);
  auto f = out.open("selfconsistent_profile.csv");
  CsvWriter w(f, out.config);
  w.header({"site", "temperature", "linear"});
  const TemperatureProfile lin = TemperatureProfile::linear(p.n_sites, p.temp_left, p.temp_right);
  for (int j = 0; j < p.n_sites; ++j) w.row({double(j + 1), r.profile.temps[j], lin.temps[j]});
  f << "# residual: " << format_number(r.residual) << '\n';
}

void cmd_hydro(const Config& c, const Output& out) {
  const json s = c.section("hydro");
  const int mesh = get(s, "mesh", 64);
  HydroState h = HydroState::stationary(mesh, get(s, "gamma", 1.0), get(s, "temp_left", 1.0),
                                        get(s, "temp_right", 8.0));
  const double ua = get(s, "u_amplitude", 0.0), ea = get(s, "eps_amplitude", 0.0);
  const double pi = std::numbers::pi;
  for (int i = 0; i <= mesh; ++i) {
    const double x = h.u.x(i);
    h.u.values[i] += ua * std::cos(pi * x);
    h.eps.values[i] += 0.5 * h.u.values[i] * h.u.values[i] + ea * std::sin(pi * x);
  }
  const auto path = hydro_evolve(h, get(s, "t_final", 1.0), get(s, "dt", 1e-3), get(s, "sample_every", 100));
  auto f = out.open("hydro.csv");
  CsvWriter w(f, out.config);
  w.header({"time", "x", "u", "eps", "temperature"});
  for (const auto& st : path)
    for (int i = 0; i <= mesh; ++i)
      w.row({st.time, st.u.x(i), st.u.values[i], st.eps.values[i],
             st.eps.values[i] - 0.5 * st.u.values[i] * st.u.values[i]});
}

GridField named_test_function(const Config& c, const std::string& name, int mesh) {
  const double pi = std::numbers::pi;
  if (name == "one") return GridField::sample(mesh, [](double) { return 1.0; });
  if (name == "sin") return GridField::sample(mesh, [&](double x) { return std::sin(pi * x); });
  if (name == "sin2") return GridField::sample(mesh, [&](double x) { return std::sin(2 * pi * x); });
  if (name == "x") return GridField::sample(mesh, [](double x) { return x; });
  c.fail("flucthydro", "test_functions", "unknown test function \"" + name + "\" (one, sin, sin2, x)");
}

void cmd_flucthydro(const Config& c, const Output& out) {
  const json s = c.section("flucthydro");
  SpdeConfig cfg;
  cfg.mesh = get(s, "mesh", cfg.mesh);
  cfg.gamma = get(s, "gamma", cfg.gamma);
  cfg.dt = get(s, "dt", cfg.dt);
  cfg.t_burn = get(s, "t_burn", cfg.t_burn);
  cfg.t_final = get(s, "t_final", cfg.t_final);
  cfg.sample_every = get(s, "sample_every", cfg.sample_every);
  cfg.replicas = get(s, "replicas", cfg.replicas);
  cfg.n_batches = get(s, "n_batches", cfg.n_batches);
  cfg.seed = get<std::uint64_t>(s, "seed", cfg.seed);
  const std::string scheme = get<std::string>(s, "scheme", "crank_nicolson");
  if (scheme == "euler_maruyama") cfg.scheme = SpdeScheme::EulerMaruyama;
  else if (scheme != "crank_nicolson") c.fail("flucthydro", "scheme", "scheme must be crank_nicolson or euler_maruyama");
  const std::string bc = get<std::string>(s, "r_boundary", "dirichlet");
  if (bc == "neumann") cfg.r_boundary = FieldBoundary::Neumann;
  else if (bc != "dirichlet") c.fail("flucthydro", "r_boundary", "r_boundary must be dirichlet or neumann");
  const double tl = get(s, "temp_left", 1.0), tr = get(s, "temp_right", 8.0);
  const auto names = get<std::vector<std::string>>(s, "test_functions", {"one", "sin"});
  std::vector<GridField> tests;
  for (const auto& n : names) tests.push_back(named_test_function(c, n, cfg.mesh));

  auto f = out.open("flucthydro.csv");
  CsvWriter w(f, out.config);
  w.header({"quantity", "test_function", "closed_form", "estimate", "std_error"});
  const bool simulate = cfg.t_final > 0.0;
  SpdeEstimates e;
  if (simulate) e = spde_simulate(tl, tr, cfg, tests, tests);
  for (std::size_t k = 0; k < tests.size(); ++k) {
    const FieldCovariance cov = ness_field_covariance(tests[k], tests[k], tl, tr);
    auto row = [&](const std::string& q, double exact, const EstimateWithError* est) {
      f << q << ',' << names[k] << ',' << format_number(exact) << ','
        << (est ? format_number(est->value) : "") << ',' << (est ? format_number(est->std_error) : "")
        << '\n';
    };
    row("r_variance", cov.r_variance, simulate ? &e.r_variance[k] : nullptr);
    row("y_variance", cov.y_variance, simulate ? &e.y_variance[k] : nullptr);
    row("cross", cov.cross, simulate ? &e.cross[k] : nullptr);
  }
  f << "# s_inf: " << format_number(s_infinity(tl, tr)) << '\n';
}

void cmd_compare(const Config& c, const Output& out) {
  const ChainParams p = chain_params(c);
  const json sec = c.section("compare");
  const int res = get(sec, "lte_resolution", 400);
  json report;
  report["hchain_version"] = HCHAIN_VERSION;
  report["config"] = out.config;
  report["lte"] = lte_fluctuation_prediction(
      TemperatureProfile::linear(res, p.temp_left, p.temp_right), p.pinning);
  report["lte_limit"] = lte_fluctuation_limit(p.temp_left, p.temp_right, p.pinning, res);
  report["s_inf"] = s_infinity(p.temp_left, p.temp_right);

  ChainParams vf = p;
  vf.model = Model::VelocityFlip;
  const SecondMoments mv = stationary_covariance(vf);
  ChainParams sc = p;
  sc.model = Model::SelfConsistent;
  const SelfConsistentResult prof = self_consistent_profile(sc);
  const SecondMoments ms = stationary_covariance(sc, prof.profile.temps);
  std::vector<double> kinetic(static_cast<std::size_t>(p.n_sites));
  for (int i = 0; i < p.n_sites; ++i) kinetic[static_cast<std::size_t>(i)] = mv.pp()(i, i);
  const SteadySummary sum = steady_current_and_s(vf, mv);
  report["n_sites"] = p.n_sites;
  report["lte_finite_n"] = lte_fluctuation_prediction(TemperatureProfile{kinetic}, p.pinning);
  report["s_self_consistent"] = steady_current_and_s(sc, ms).s_gaussian;
  report["vf_sc_covariance_difference"] = (mv.cov - ms.cov).cwiseAbs().maxCoeff();
  report["mean_current"] = sum.mean_current;
  report["mean_energy_per_site"] = sum.mean_energy / p.n_sites;
  if (get(sec, "monte_carlo", false)) {
    const SimConfig cfg = sim_config(c, vf);
    const auto reps = run_replicas(vf, cfg);
    std::vector<std::vector<double>> segments;
    for (const auto& r : reps) segments.push_back(r.h_samples);
    const EstimateWithError s = estimate_s(segments, p.n_sites, cfg.n_batches);
    report["s_monte_carlo"] = to_json(s);
  }
  {
    auto f = out.open("compare_report.json");
    f << report.dump(2) << '\n';
  }
  auto f = out.open("compare.csv");
  CsvWriter w(f, out.config);
  w.header({"quantity", "value", "std_error"});
  for (const char* k : {"lte", "lte_limit", "s_inf", "lte_finite_n", "s_self_consistent",
                        "vf_sc_covariance_difference", "mean_current", "mean_energy_per_site"})
    w.row(k, {report[k].get<double>(), 0.0});
  if (report.contains("s_monte_carlo"))
    w.row("s_monte_carlo", {report["s_monte_carlo"]["value"].get<double>(),
                            report["s_monte_carlo"]["std_error"].get<double>()});
  std::cout << "lte " << format_number(report["lte"].get<double>()) << "\nlte_limit "
            << format_number(report["lte_limit"].get<double>()) << "\ns_inf "
            << format_number(report["s_inf"].get<double>()) << '\n';
}

int dispatch(const std::string& command, Config c, std::optional<std::uint64_t> seed,
             const std::string& out_dir) {
  if (seed) {
    c.doc["simulation"]["seed"] = *seed;
    c.doc["flucthydro"]["seed"] = *seed;
  }
  Output out;
  out.dir = out_dir;
  out.config = resolved(c, command);
  if (command == "simulate") cmd_simulate(c, out);
  else if (command == "covariance") cmd_covariance(c, out);
  else if (command == "selfconsistent") cmd_selfconsistent(c, out);
  else if (command == "hydro") cmd_hydro(c, out);
  else if (command == "flucthydro") cmd_flucthydro(c, out);
  else if (command == "compare") cmd_compare(c, out);
  else throw ConfigError("unknown command " + command);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hchain: harmonic chain NESS toolkit (" HCHAIN_VERSION ")"};
  app.require_subcommand(1);
  std::string config_path, preset, out_dir;
  std::optional<std::uint64_t> seed;
  if (const char* env = std::getenv("HCHAIN_OUT_DIR")) out_dir = env;
  else out_dir = ".";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", config_path, "JSON config file");
    sub->add_option("--preset,-p", preset, "named preset from the presets directory");
    sub->add_option("--seed", seed, "RNG seed, overrides the config");
    sub->add_option("--out,-o", out_dir, "output directory (default $HCHAIN_OUT_DIR or .)");
  };
  for (const auto& name : kCommands) add_common(app.add_subcommand(name, "run " + name));
  auto* run = app.add_subcommand("run", "run the command named in the config");
  add_common(run);
  auto* list = app.add_subcommand("presets", "list the available presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& entry : fs::directory_iterator(preset_dir()))
        if (entry.path().extension() == ".json") std::cout << entry.path().stem().string() << '\n';
      return 0;
    }
    if (!config_path.empty() && !preset.empty())
      throw ConfigError("--config and --preset are mutually exclusive");
    Config c;
    if (!preset.empty()) c = load_config((preset_dir() / (preset + ".json")).string());
    else if (!config_path.empty()) c = load_config(config_path);

    std::string command = app.get_subcommands().front()->get_name();
    if (command == "run") {
      if (!c.doc.contains("command"))
        throw ConfigError(c.source + ": config has no \"command\"; usage: hchain run --config FILE");
      command = c.doc.at("command").get<std::string>();
    } else if (c.doc.contains("command") && c.doc.at("command").get<std::string>() != command) {
      c.fail("command", "", "config is for \"" + c.doc.at("command").get<std::string>() +
                                "\", not \"" + command + "\"");
    }
    return dispatch(command, c, seed, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
