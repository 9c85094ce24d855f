#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ddcc/betting.hpp"
#include "ddcc/errors.hpp"
#include "ddcc/moments.hpp"
#include "ddcc/schedules.hpp"

namespace ddcc::cli {

namespace fs = std::filesystem;
using Eigen::VectorXd;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  if (spec.find(':') == std::string::npos) {
    std::vector<double> out;
    for (const auto& part : split(spec, ',')) out.push_back(parse_number(part));
    if (out.empty()) throw InvalidArgument("empty grid");
    return out;
  }
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw InvalidArgument("grid must look like lo:hi:COUNT[log]");
  std::string count_s = parts[2];
  bool log = false;
  if (count_s.size() > 3 && count_s.substr(count_s.size() - 3) == "log") {
    log = true;
    count_s.resize(count_s.size() - 3);
  }
  const double lo = parse_number(parts[0]), hi = parse_number(parts[1]);
  const double count_d = parse_number(count_s);
  if (count_d < 1 || count_d != std::floor(count_d) || count_d > 1e7) {
    throw InvalidArgument("grid count must be a positive integer");
  }
  const int count = static_cast<int>(count_d);
  if (hi < lo) throw InvalidArgument("grid upper end is below its lower end");
  if (log && !(lo > 0)) throw InvalidArgument("log grid needs a positive lower end");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                      : lo + t * (hi - lo));
  }
  // exact endpoints
  out.front() = lo;
  if (count > 1) out.back() = hi;
  return out;
}

namespace {

std::vector<std::int64_t> parse_n_grid(const std::string& spec) {
  std::vector<std::int64_t> out;
  for (double v : parse_grid(spec)) {
    const double r = std::round(v);
    if (r < 1 || r > 9e15) throw InvalidArgument("sample sizes must be positive integers");
    out.push_back(static_cast<std::int64_t>(r));
  }
  return out;
}

struct Globals {
  std::uint64_t seed = 1;
  std::string out_dir;
  std::string config;
  bool full_scale = false;
};

struct BettingFlags {
  double alpha = 0.2;
  double beta = 0.1;
  std::string mode = "loss-beta";

  void add(CLI::App* sub) {
    sub->add_option("--alpha", alpha, "Violation level alpha in (0,1)");
    sub->add_option("--beta", beta, "Loss threshold fraction beta in (0,1)");
    sub->add_option("--mode", mode, "Loss event: loss-beta (a'x < -beta) or literal-paper (a'x < beta)");
  }
  betting::BettingConfig config() const {
    betting::BettingConfig cfg;
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.mode = betting::parse_threshold_mode(mode);
    cfg.validate();
    return cfg;
  }
};

// Writes to <out_dir>/<name> when an output directory was given, else to `out`.
class Sink {
 public:
  Sink(const Globals& g, const std::string& name, std::ostream& fallback) {
    if (g.out_dir.empty()) {
      stream_ = &fallback;
      return;
    }
    fs::create_directories(g.out_dir);
    path_ = (fs::path(g.out_dir) / name).string();
    file_.open(path_);
    if (!file_) throw InvalidArgument("cannot write " + path_);
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }
  const std::string& path() const { return path_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
  std::string path_;
};

std::ofstream open_in(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const std::string path = (fs::path(dir) / name).string();
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path);
  return f;
}

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- schedules -------------------------------------------------------------

ScheduleResult schedule_by_tag(const std::string& tag, std::int64_t n, double alpha) {
  const auto colon = tag.find(':');
  const std::string name = tag.substr(0, colon);
  std::optional<double> p;
  if (colon != std::string::npos) p = parse_number(tag.substr(colon + 1));
  auto need_p = [&] {
    if (!p) throw InvalidArgument("method '" + name + "' needs p, e.g. " + name + ":3");
    return *p;
  };
  auto no_p = [&] {
    if (p) throw InvalidArgument("method '" + name + "' takes no parameter");
  };
  if (name == "thm1") return schedule_thm1(n, alpha, need_p());
  if (name == "prop2") return schedule_prop2(n, alpha, need_p());
  if (name == "prop3") return schedule_prop3(n, alpha, need_p());
  if (name == "cor1") return no_p(), schedule_cor1(n, alpha);
  if (name == "cor2") return no_p(), schedule_cor2(n, alpha);
  if (name == "cor3") return no_p(), schedule_cor3(n, alpha);
  throw InvalidArgument("unknown schedule method '" + tag + "'");
}

struct SchedulesCmd {
  double alpha = 0.1;
  std::string methods = "cor1";
  std::string n_grid = "10:1e8:50log";

  void add(CLI::App* sub) {
    sub->add_option("--alpha", alpha, "Violation level alpha in (0,1)");
    sub->add_option("--methods", methods,
                    "Comma list of cor1, cor2, cor3, thm1:P, prop2:P, prop3:P");
    sub->add_option("--n-grid", n_grid, "Sample sizes: lo:hi:COUNT[log] or a comma list");
  }

  int run(const Globals& g, std::ostream& out) const {
    if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("alpha must lie in (0, 1)");
    const auto grid = parse_n_grid(n_grid);
    const auto tags = split(methods, ',');
    if (tags.empty()) throw InvalidArgument("no methods given");
    for (const auto& t : tags) schedule_by_tag(t, 10, alpha);  // validate before writing
    Sink sink(g, "schedules.csv", out);
    *sink << "method,N,kappa,phi,nu,kappa_sqrt_phi,feasible\n";
    for (const auto& tag : tags) {
      for (auto n : grid) {
        const ScheduleResult s = schedule_by_tag(tag, n, alpha);
        std::optional<double> ksp;
        if (s.kappa) ksp = *s.kappa * std::sqrt(s.phi);
        *sink << tag << ',' << n << ',' << fmt_opt(s.kappa) << ',' << fmt(s.phi) << ','
              << fmt_opt(s.nu) << ',' << fmt_opt(ksp) << ',' << (s.feasible ? 1 : 0) << '\n';
      }
    }
    return kOk;
  }
};

// --- constants -------------------------------------------------------------

struct ConstantsCmd {
  std::string alpha_grid = "0.01:0.5:100";

  void add(CLI::App* sub) {
    sub->add_option("--alpha-grid", alpha_grid, "alpha values: lo:hi:COUNT[log] or a comma list");
  }

  int run(const Globals& g, std::ostream& out) const {
    const auto grid = parse_grid(alpha_grid);
    for (double a : grid) {
      if (!(a > 0 && a < 1)) throw InvalidArgument("alpha values must lie in (0, 1)");
    }
    Sink sink(g, "constants.csv", out);
    *sink << "alpha,general,independent,gaussian\n";
    for (double a : grid) {
      const auto c = comparison_constants(a);
      *sink << fmt(a) << ',' << fmt(c.general) << ',' << fmt(c.independent) << ','
            << fmt(c.gaussian) << '\n';
    }
    return kOk;
  }
};

// --- solve -----------------------------------------------------------------

struct SolveCmd {
  BettingFlags bet;
  std::string method = "cor1";
  std::string samples;
  std::int64_t n = 1000;
  bool dump_program = false;

  void add(CLI::App* sub) {
    bet.add(sub);
    sub->add_option("--method", method, "plugin, cor1, thm1:P, fixed_delta:D or oracle");
    sub->add_option("--samples", samples, "CSV of observed wager outcomes (4 columns)");
    sub->add_option("--n", n, "Number of generated samples when --samples is absent");
    sub->add_flag("--dump-program", dump_program, "Include the surrogate blocks in the output");
  }

  int run(const Globals& g, std::ostream& out) const {
    const auto cfg = bet.config();
    const auto m = betting::Method::parse(method);
    MomentState state(cfg.dim(), MomentMode::Full);
    if (!samples.empty()) {
      std::ifstream in(samples);
      if (!in) throw InvalidArgument("cannot read " + samples);
      state.update_batch(read_samples_csv(in, cfg.dim()));
    } else {
      if (n < 1 || n > 100000000) throw InvalidArgument("--n must lie in [1, 1e8]");
      state.update_batch(betting::sample_batch(cfg, betting::derive_seed(g.seed, "solve", n, 0),
                                               static_cast<int>(n)));
    }
    if (state.count() == 0 && m.kind != betting::MethodKind::Oracle) {
      throw InvalidArgument("no samples");
    }
    const auto ms = betting::solve_method(cfg, m, state);
    if (ms.status == "iteration_limit" || ms.status == "numerical_failure") {
      throw SolverFailure("solver returned " + ms.status);
    }
    nlohmann::json j;
    j["method"] = m.tag();
    j["N"] = state.count();
    j["mode"] = betting::to_string(cfg.mode);
    j["status"] = ms.status;
    j["fallback"] = ms.fallback;
    j["x"] = std::vector<double>(ms.x.data(), ms.x.data() + ms.x.size());
    if (ms.objective) j["objective"] = *ms.objective;
    if (dump_program && !ms.fallback) {
      VectorXd objective;
      j["blocks"] = betting::build_surrogate(cfg, m, state, objective).to_json();
    }
    Sink sink(g, "solve.json", out);
    *sink << j.dump(2) << '\n';
    return kOk;
  }
};

// --- bench -----------------------------------------------------------------

struct BenchCmd {
  BettingFlags bet;
  std::string methods = "plugin,cor1,thm1:2.1,thm1:3,thm1:5,fixed_delta:0.1,oracle";
  std::string n_grid = "50,100,200,1000,10000";
  int trials = 200;
  int test_size = 100000;
  int threads = 0;
  bool no_timing = false;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* test_opt = nullptr;

  void add(CLI::App* sub) {
    bet.add(sub);
    sub->add_option("--methods", methods, "Comma list of plugin, cor1, thm1:P, fixed_delta:D, oracle");
    sub->add_option("--n-grid", n_grid, "Training sizes: comma list or lo:hi:COUNT[log]");
    trials_opt = sub->add_option("--trials", trials, "Training draws per method and N");
    test_opt = sub->add_option("--test-size", test_size, "Shared test set size");
    sub->add_option("--threads", threads, "Worker threads (0: all cores)");
    sub->add_flag("--no-timing", no_timing, "Leave time_ms empty so reruns are byte-identical");
  }

  int run(const Globals& g, std::ostream& out) {
    const auto cfg = bet.config();
    betting::ExperimentConfig exp;
    for (const auto& t : split(methods, ',')) exp.methods.push_back(betting::Method::parse(t));
    if (exp.methods.empty()) throw InvalidArgument("no methods given");
    exp.n_grid = parse_n_grid(n_grid);
    exp.trials_per_n = trials;
    exp.test_size = test_size;
    if (g.full_scale) {
      const auto full = betting::ExperimentConfig::full_scale();
      if (trials_opt->count() == 0) exp.trials_per_n = full.trials_per_n;
      if (test_opt->count() == 0) exp.test_size = full.test_size;
    }
    exp.master_seed = g.seed;
    exp.threads = threads;
    if (exp.trials_per_n < 1 || exp.test_size < 1) {
      throw InvalidArgument("--trials and --test-size must be positive");
    }
    const auto res = betting::run_experiment(cfg, exp);
    const std::string dir = g.out_dir.empty() ? "." : g.out_dir;
    auto trials_csv = open_in(dir, "trials.csv");
    trials_csv << "method,N,trial,seed,status,reward,violation,time_ms,x1,x2,x3,x4\n";
    for (const auto& t : res.trials) {
      trials_csv << t.method << ',' << t.n << ',' << t.trial << ',' << t.seed << ',' << t.status
                 << ',' << fmt(t.reward) << ',' << fmt(t.violation) << ','
                 << (no_timing ? "" : fmt(t.time_ms));
      for (int k = 0; k < t.x.size(); ++k) trials_csv << ',' << fmt(t.x(k));
      trials_csv << '\n';
    }
    auto agg_csv = open_in(dir, "aggregate.csv");
    agg_csv << "method,N,avg_reward,max_violation,feasible_fraction\n";
    for (const auto& a : res.aggregates) {
      agg_csv << a.method << ',' << a.n << ',' << fmt(a.avg_reward) << ','
              << fmt(a.max_violation) << ',' << fmt(a.feasible_fraction) << '\n';
    }
    out << "wrote " << res.trials.size() << " trials to " << (fs::path(dir) / "trials.csv").string()
        << " and " << res.aggregates.size() << " rows to "
        << (fs::path(dir) / "aggregate.csv").string() << '\n';
    return kOk;
  }
};

// --- sequential ------------------------------------------------------------

struct SequentialCmd {
  BettingFlags bet;
  std::string method = "cor1";
  int steps = 100;
  int samples_per_step = 100;

  void add(CLI::App* sub) {
    bet.add(sub);
    sub->add_option("--method", method, "plugin, cor1, thm1:P, fixed_delta:D or oracle");
    sub->add_option("--steps", steps, "Number of time steps (>= 2)");
    sub->add_option("--samples-per-step", samples_per_step, "New samples per step");
  }

  int run(const Globals& g, std::ostream& out) const {
    const auto cfg = bet.config();
    const auto rows = betting::run_sequential(cfg, betting::Method::parse(method), steps,
                                              samples_per_step, g.seed);
    const std::string dir = g.out_dir.empty() ? "." : g.out_dir;
    auto csv = open_in(dir, "sequential.csv");
    csv << "step,count,status,time_ms,x1,x2,x3,x4\n";
    for (const auto& r : rows) {
      csv << r.step << ',' << r.count << ',' << r.status << ',' << fmt(r.time_ms);
      for (int k = 0; k < r.x.size(); ++k) csv << ',' << fmt(r.x(k));
      csv << '\n';
    }
    out << "wrote " << rows.size() << " steps to " << (fs::path(dir) / "sequential.csv").string()
        << '\n';
    return kOk;
  }
};

std::string json_to_arg(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number()) return fmt(v.get<double>());
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : ",") + json_to_arg(e);
    return s;
  }
  throw InvalidArgument("config values must be strings, numbers, booleans or lists");
}

// Fills options not given on the command line from a flat JSON object.
void apply_config(const std::string& path, CLI::App& app, CLI::App* sub) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "config") throw InvalidArgument("config files cannot include other configs");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) opt = app.get_option_no_throw("--" + key);
    if (!opt) throw InvalidArgument("unknown config key '" + key + "'");
    if (opt->count() > 0) continue;  // flags win
    opt->add_result(json_to_arg(value));
    opt->run_callback();
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-driven distributionally robust chance constraints", "ddcc"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--config", g.config, "JSON file of option values; flags win");
  app.add_flag("--full-scale", g.full_scale, "1000 trials and 10^6 test samples for bench");
  app.fallthrough();

  SchedulesCmd schedules;
  ConstantsCmd constants;
  SolveCmd solve;
  BenchCmd bench;
  SequentialCmd sequential;
  CLI::App* s_sched = app.add_subcommand("schedules", "Coefficient schedules over an N grid");
  CLI::App* s_const = app.add_subcommand("constants", "Deterministic-equivalent constants over alpha");
  CLI::App* s_solve = app.add_subcommand("solve", "Solve one betting instance");
  CLI::App* s_bench = app.add_subcommand("bench", "Monte Carlo betting benchmark");
  CLI::App* s_seq = app.add_subcommand("sequential", "Per-step timing with streamed samples");
  schedules.add(s_sched);
  constants.add(s_const);
  solve.add(s_solve);
  bench.add(s_bench);
  sequential.add(s_seq);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!g.config.empty()) apply_config(g.config, app, sub);
    if (sub == s_sched) return schedules.run(g, out);
    if (sub == s_const) return constants.run(g, out);
    if (sub == s_solve) return solve.run(g, out);
    if (sub == s_bench) return bench.run(g, out);
    return sequential.run(g, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SolverFailure& e) {
    err << "error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace ddcc::cli
