#include "gm/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "gm/analytics.hpp"
#include "gm/io.hpp"
#include "gm/monte_carlo.hpp"
#include "gm/verification.hpp"
#include "json.hpp"

namespace gm::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  double nu = 0.2;
  double theta = 0.5;
  long steps = 500;
  long trials = 1000;
  std::uint64_t seed = 0;
  std::string y = "prior";
  long bins = 50;
  std::string format = "csv";
  bool export_trajectories = false;
  long grid = 512;
  double margin = 1e-9;
  double tolerance = 1e-10;
  std::string nus = "0.4,0.2,0.1";
  std::string taus = "100,400,1600";
  long lag = 1;
  double sigma = 5.0;
};

// Value of a flag as it appears in canonical arguments.
std::string flag_value(const Options& o, const std::string& name) {
  if (name == "nu") return format_real(o.nu);
  if (name == "theta") return format_real(o.theta);
  if (name == "steps") return std::to_string(o.steps);
  if (name == "trials") return std::to_string(o.trials);
  if (name == "seed") return std::to_string(o.seed);
  if (name == "y") return o.y;
  if (name == "bins") return std::to_string(o.bins);
  if (name == "format") return o.format;
  if (name == "grid") return std::to_string(o.grid);
  if (name == "margin") return format_real(o.margin);
  if (name == "tolerance") return format_real(o.tolerance);
  if (name == "nus") return o.nus;
  if (name == "taus") return o.taus;
  if (name == "lag") return std::to_string(o.lag);
  if (name == "sigma") return format_real(o.sigma);
  throw std::logic_error("flag_value: unknown flag " + name);
}

// A leaf command: its path, its options, the flags it consumes, and its body.
struct Command {
  std::vector<std::string> path;
  Options opts;
  std::vector<std::string> flags;
  CLI::App* app = nullptr;
  std::function<int(const Options&, class Output&, json&)> body;
};

class Output {
 public:
  explicit Output(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) {
        throw IoError("cannot create output directory " + dir_ + ": " + ec.message());
      }
    }
  }

  [[nodiscard]] bool to_files() const { return !dir_.empty(); }
  [[nodiscard]] const std::vector<std::string>& written() const { return written_; }

  /// Streams `writer` into dir/name, or to stdout without an output directory.
  void write(const std::string& name, const std::function<void(std::ostream&)>& writer) {
    if (!to_files()) {
      writer(std::cout);
      std::cout.flush();
      return;
    }
    const fs::path path = fs::path(dir_) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + path.string() + " for writing");
    }
    writer(out);
    out.flush();
    if (!out) {
      throw IoError("failed writing " + path.string());
    }
    written_.push_back(name);
  }

  void write_json(const std::string& name, const json& doc) {
    write(name, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  }

 private:
  std::string dir_;
  std::vector<std::string> written_;
};

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != item.size()) {
      throw std::invalid_argument("malformed number in list: '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<long> parse_int_list(const std::string& text) {
  std::vector<long> out;
  for (double v : parse_real_list(text)) {
    if (v != std::floor(v)) {
      throw std::invalid_argument("expected integers in list: " + text);
    }
    out.push_back(static_cast<long>(v));
  }
  return out;
}

YMode parse_y_mode(const std::string& y) {
  if (y == "prior") return YMode::prior();
  if (y == "0") return YMode::fixed_value(AssetValue::low);
  if (y == "1") return YMode::fixed_value(AssetValue::high);
  throw std::invalid_argument("--y must be 0, 1 or prior");
}

json moments_json(const Moments& m) {
  return {{"mean", m.mean}, {"variance", m.variance}, {"standard_error", m.standard_error}};
}

// -- command bodies ---------------------------------------------------------

int cmd_simulate(const Options& o, Output& out, json& params) {
  SimConfig cfg;
  cfg.params = ModelParams(o.theta, o.nu);
  cfg.horizon = o.steps;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.y_mode = parse_y_mode(o.y);
  cfg.histogram_bins = static_cast<std::size_t>(o.bins);
  params["temperature"] = cfg.params.temperature();
  const EnsembleStats stats = simulate(cfg);
  if (o.format == "json") {
    json steps = json::array();
    for (const StepSummary& s : stats.steps) {
      steps.push_back({{"step", s.step},
                       {"belief", moments_json(s.belief)},
                       {"payoff", moments_json(s.payoff)},
                       {"gain", moments_json(s.gain)}});
    }
    out.write_json("ensemble.json",
                   {{"trials", stats.trials},
                    {"steps", steps},
                    {"histogram",
                     {{"edges", stats.final_gain_histogram.edges},
                      {"counts", stats.final_gain_histogram.counts}}}});
  } else {
    out.write("ensemble.csv", [&](std::ostream& os) { write_ensemble_csv(os, stats); });
    if (out.to_files()) {
      out.write("histogram.csv",
                [&](std::ostream& os) { write_histogram_csv(os, stats.final_gain_histogram); });
    }
  }
  if (o.export_trajectories) {
    const auto trajectories = simulate_trajectories(cfg);
    out.write("trajectories.csv",
              [&](std::ostream& os) { write_trajectories_csv(os, trajectories); });
  }
  return kPass;
}

int cmd_exact(const Options& o, Output& out, json& params) {
  const ModelParams mp(o.theta, o.nu);
  params["temperature"] = mp.temperature();
  const ExactSeries s = exact_series(o.steps, mp);
  const std::vector<std::pair<const char*, const std::vector<double>*>> columns = {
      {"price_mean_y1", &s.price_mean_high}, {"price_var_y1", &s.price_var_high},
      {"price_mean_y0", &s.price_mean_low},  {"price_var_y0", &s.price_var_low},
      {"payoff_mean", &s.payoff_mean},       {"payoff_via_spread", &s.payoff_via_spread},
      {"payoff_var", &s.payoff_var},         {"gain_mean", &s.gain_mean},
      {"cond_entropy", &s.conditional_entropy}, {"mi_direct", &s.mi_direct},
      {"mi_chain", &s.mi_chain},             {"bound", &s.bound}};
  if (o.format == "json") {
    json doc = {{"step", s.step}};
    for (const auto& [name, col] : columns) {
      doc[name] = *col;
    }
    out.write_json("exact.json", doc);
  } else {
    out.write("exact.csv", [&](std::ostream& os) {
      os << "step";
      for (const auto& [name, col] : columns) {
        os << ',' << name;
      }
      os << '\n';
      for (std::size_t r = 0; r < s.size(); ++r) {
        os << s.step[r];
        for (const auto& [name, col] : columns) {
          os << ',' << format_real((*col)[r]);
        }
        os << '\n';
      }
    });
  }
  return kPass;
}

int cmd_inequality(const Options& o, Output& out, json&) {
  ScanGrid grid;
  grid.q_points = o.grid;
  grid.theta_points = o.grid;
  grid.margin = o.margin;
  grid.tolerance = o.tolerance;
  const ScanReport report = scan_entropic_inequality(grid);
  json doc = report;
  doc["worst_on_q_edge"] = report.worst_q_index == 0;
  out.write_json("report.json", doc);
  return report.passed() ? kPass : kCheckFailed;
}

int cmd_bound(const Options& o, Output& out, json&) {
  const ModelParams mp(o.theta, o.nu);
  const TheoremReport report = check_theorem_bound(o.steps, mp, o.tolerance);
  json doc = report;
  bool ok = report.passed();
  if (o.trials > 0) {
    SimConfig cfg;
    cfg.params = mp;
    cfg.horizon = o.steps;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    const auto rows = empirical_bound_check(cfg);
    double worst_z = -std::numeric_limits<double>::infinity();
    for (const BoundRow& r : rows) {
      if (r.gain_standard_error > 0.0) {
        worst_z = std::max(worst_z, (r.mean_gain - r.bound) / r.gain_standard_error);
      } else if (r.mean_gain > r.bound) {
        worst_z = std::numeric_limits<double>::infinity();
      }
    }
    const bool mc_ok = worst_z <= 3.0;
    doc["empirical"] = {{"trials", o.trials},
                        {"seed", o.seed},
                        {"worst_z", worst_z},
                        {"final_mean_gain", rows.back().mean_gain},
                        {"final_violation_fraction", rows.back().violation_fraction},
                        {"passed", mc_ok}};
    ok = ok && mc_ok;
  }
  out.write_json("report.json", doc);
  return ok ? kPass : kCheckFailed;
}

int cmd_corollary(const Options& o, Output& out, json&) {
  const ModelParams mp(o.theta, o.nu);
  const long horizon = o.steps > 0 ? o.steps : horizon_for_entropy_fraction(mp, 1e-3);
  const CorollaryReport report = check_corollary(mp, horizon);
  if (!report.warning.empty()) {
    std::cerr << "warning: " << report.warning << '\n';
  }
  out.write_json("report.json", report);
  return report.passed() ? kPass : kCheckFailed;
}

int cmd_scaling(const Options& o, Output& out, json&) {
  const ScalingFit fit = variance_peak_scaling(parse_real_list(o.nus), o.theta, o.steps);
  json doc = fit;
  const bool ok = std::abs(fit.fit.slope + 2.0) <= o.tolerance;
  doc["target_slope"] = -2.0;
  doc["tolerance"] = o.tolerance;
  doc["passed"] = ok;
  out.write_json("report.json", doc);
  return ok ? kPass : kCheckFailed;
}

int cmd_optimal_nu(const Options& o, Output& out, json&) {
  const std::vector<double> grid =
      o.nus.empty() ? log_spaced(0.005, 0.95, o.grid) : parse_real_list(o.nus);
  const auto report = optimal_frequency_experiment(parse_int_list(o.taus), grid, o.theta);
  json doc = report;
  bool ok = report.samples.size() >= 2 && std::abs(report.fit.slope + 0.5) <= o.tolerance;
  for (const auto& s : report.samples) {
    if (s.at_boundary) {
      std::cerr << "warning: nu* at the grid edge for tau = " << s.tau << '\n';
    }
  }
  doc["target_slope"] = -0.5;
  doc["tolerance"] = o.tolerance;
  doc["passed"] = ok;
  out.write_json("report.json", doc);
  return ok ? kPass : kCheckFailed;
}

int cmd_autocorr(const Options& o, Output& out, json&) {
  SimConfig cfg;
  cfg.params = ModelParams(o.theta, o.nu);
  cfg.horizon = o.steps;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  const AutocorrelationReport report = check_autocorrelation(cfg, o.steps, o.lag);
  const bool ok = std::abs(report.joint_z) <= 3.0 && report.excess_sigma >= o.sigma;
  json doc = report;
  doc["required_sigma"] = o.sigma;
  doc["passed"] = ok;
  out.write_json("report.json", doc);
  return ok ? kPass : kCheckFailed;
}

// -- plumbing ---------------------------------------------------------------

void add_flag(CLI::App* app, Options& o, const std::string& name) {
  const std::string flag = "--" + name;
  if (name == "nu") {
    app->add_option(flag, o.nu, "Informed-trader fraction in [0, 1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  } else if (name == "theta") {
    app->add_option(flag, o.theta, "Prior P(Y = 1) in [0, 1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  } else if (name == "steps") {
    app->add_option(flag, o.steps, "Number of steps (0 = automatic where supported)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  } else if (name == "trials") {
    app->add_option(flag, o.trials, "Number of simulated trajectories")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  } else if (name == "seed") {
    app->add_option(flag, o.seed, "Random seed")->capture_default_str();
  } else if (name == "y") {
    app->add_option(flag, o.y, "Asset value: 0, 1 or prior")
        ->check(CLI::IsMember({"0", "1", "prior"}))
        ->capture_default_str();
  } else if (name == "bins") {
    app->add_option(flag, o.bins, "Final-gain histogram bins")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  } else if (name == "format") {
    app->add_option(flag, o.format, "Series output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  } else if (name == "export-trajectories") {
    app->add_flag(flag, o.export_trajectories, "Also write every trajectory to trajectories.csv");
  } else if (name == "grid") {
    app->add_option(flag, o.grid, "Grid resolution")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  } else if (name == "margin") {
    app->add_option(flag, o.margin, "Distance kept from singular grid edges")
        ->capture_default_str();
  } else if (name == "tolerance") {
    app->add_option(flag, o.tolerance, "Pass/fail tolerance")->capture_default_str();
  } else if (name == "nus") {
    app->add_option(flag, o.nus, "Comma-separated values of nu")->capture_default_str();
  } else if (name == "taus") {
    app->add_option(flag, o.taus, "Comma-separated horizons")->capture_default_str();
  } else if (name == "lag") {
    app->add_option(flag, o.lag, "Lag i of E[mu_n mu_{n-i}]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  } else if (name == "sigma") {
    app->add_option(flag, o.sigma, "Required significance of the variance excess")
        ->capture_default_str();
  } else {
    throw std::logic_error("add_flag: unknown flag " + name);
  }
}

std::vector<std::string> canonical_args(const Command& c) {
  std::vector<std::string> args = c.path;
  for (const std::string& name : c.flags) {
    if (name == "export-trajectories") {
      if (c.opts.export_trajectories) {
        args.push_back("--export-trajectories");
      }
      continue;
    }
    args.push_back("--" + name);
    args.push_back(flag_value(c.opts, name));
  }
  return args;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string s;
  for (const auto& p : parts) {
    if (!s.empty()) s += sep;
    s += p;
  }
  return s;
}

int run_command(Command& c, const std::string& out_dir, int threads) {
  const auto start = std::chrono::steady_clock::now();
  Output out(out_dir);
  json params = json::object();
  for (const std::string& name : c.flags) {
    if (name == "export-trajectories") {
      params[name] = c.opts.export_trajectories;
    } else {
      params[name] = flag_value(c.opts, name);
    }
  }
  int code = kCheckFailed;
  try {
    code = c.body(c.opts, out, params);
  } catch (const IoError&) {
    throw;
  } catch (const std::logic_error&) {
    throw;
  } catch (const std::runtime_error& e) {
    // A check that cannot complete still leaves a report behind.
    std::cerr << "check failed: " << e.what() << '\n';
    out.write_json("report.json", {{"passed", false}, {"error", e.what()}});
  }
  if (out.to_files()) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {{"command", join(c.path, ' ')},
                     {"argv", canonical_args(c)},
                     {"parameters", params},
                     {"seed", c.opts.seed},
                     {"version", kVersion},
                     {"threads", threads},
                     {"out", out_dir},
                     {"outputs", out.written()},
                     {"exit_code", code},
                     {"duration_seconds", seconds}};
    out.write_json("manifest.json", manifest);
  }
  return code;
}

int run_replay(const std::string& manifest_path, const std::string& out_override, int threads) {
  std::ifstream in(manifest_path);
  if (!in) {
    std::cerr << "error: cannot read manifest " << manifest_path << '\n';
    return kIoError;
  }
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    std::cerr << "error: malformed manifest: " << e.what() << '\n';
    return kUsageError;
  }
  if (!manifest.contains("argv") || !manifest["argv"].is_array()) {
    std::cerr << "error: manifest has no argv array\n";
    return kUsageError;
  }
  std::vector<std::string> args = manifest["argv"].get<std::vector<std::string>>();
  const std::string out =
      !out_override.empty() ? out_override : manifest.value("out", std::string());
  if (!out.empty()) {
    args.push_back("--out");
    args.push_back(out);
  }
  if (threads > 0) {
    args.push_back("--threads");
    args.push_back(std::to_string(threads));
  }
  return run(args);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Glosten-Milgrom market model: simulation, exact statistics and bound checks",
               "glosten"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string out_dir;
  int threads = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory (stdout when omitted)");
    sub->add_option("--threads", threads, "Worker threads (0 = OpenMP default)")
        ->check(CLI::NonNegativeNumber);
  };

  std::vector<Command> commands;
  commands.reserve(9);
  auto define = [&](CLI::App* parent, std::vector<std::string> path, const std::string& help,
                    std::vector<std::string> flags, auto body, auto configure) -> Command& {
    Command& c = commands.emplace_back();
    c.path = std::move(path);
    c.flags = std::move(flags);
    configure(c.opts);
    c.body = body;
    c.app = parent->add_subcommand(c.path.back(), help);
    for (const auto& f : c.flags) {
      add_flag(c.app, c.opts, f);
    }
    add_common(c.app);
    return c;
  };
  auto keep = [](Options&) {};

  define(&app, {"simulate"}, "Monte Carlo ensemble of trajectories",
         {"nu", "theta", "steps", "trials", "seed", "y", "bins", "format", "export-trajectories"},
         cmd_simulate, keep);
  define(&app, {"exact"}, "Exact per-step statistics from the buy-count law",
         {"nu", "theta", "steps", "format"}, cmd_exact, keep);

  CLI::App* verify = app.add_subcommand("verify", "Numerical checks; exit 0 iff all pass");
  verify->require_subcommand(1);
  define(verify, {"verify", "inequality"}, "Grid scan of the single-step entropic inequality",
         {"grid", "margin", "tolerance"}, cmd_inequality,
         [](Options& o) { o.tolerance = 1e-12; });
  define(verify, {"verify", "bound"}, "E[G_n] <= T I(Y; X_{1:n}) for every n",
         {"nu", "theta", "steps", "tolerance", "trials", "seed"}, cmd_bound,
         [](Options& o) { o.trials = 0; });
  define(verify, {"verify", "corollary"}, "E[G] <= T H(Y) at a converged horizon",
         {"nu", "theta", "steps"}, cmd_corollary, [](Options& o) { o.steps = 0; });
  define(verify, {"verify", "scaling"}, "Variance-peak time against nu (slope -2)",
         {"nus", "theta", "steps", "tolerance"}, cmd_scaling, [](Options& o) {
           o.steps = 0;
           o.tolerance = 0.3;
         });
  define(verify, {"verify", "optimal-nu"}, "Gain-maximizing nu against the horizon (slope -1/2)",
         {"taus", "nus", "grid", "theta", "tolerance"}, cmd_optimal_nu, [](Options& o) {
           o.nus = "";
           o.grid = 81;
           o.tolerance = 0.15;
         });
  define(verify, {"verify", "autocorr"}, "Payoff autocorrelation: exact joint moment vs MC",
         {"nu", "theta", "steps", "lag", "trials", "seed", "sigma"}, cmd_autocorr,
         [](Options& o) {
           o.steps = 200;
           o.trials = 100000;
         });

  CLI::App* replay = app.add_subcommand("replay", "Re-run a command from its manifest.json");
  std::string manifest_path;
  replay->add_option("manifest", manifest_path, "Path to manifest.json")->required();
  add_common(replay);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("glosten");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) {
    argv.push_back(a.data());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsageError;
  }

  if (threads > 0) {
    omp_set_num_threads(threads);
  }

  try {
    if (replay->parsed()) {
      return run_replay(manifest_path, out_dir, threads);
    }
    for (Command& c : commands) {
      if (c.app->parsed()) {
        return run_command(c, out_dir, threads);
      }
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::runtime_error& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsageError;
}

}  // namespace gm::cli
