#include "ddcc/betting.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <thread>

#include "ddcc/errors.hpp"
#include "ddcc/schedules.hpp"

namespace ddcc::betting {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(ThresholdMode m) {
  return m == ThresholdMode::LossBeta ? "loss-beta" : "literal-paper";
}

ThresholdMode parse_threshold_mode(const std::string& s) {
  if (s == "loss-beta") return ThresholdMode::LossBeta;
  if (s == "literal-paper") return ThresholdMode::LiteralPaper;
  throw InvalidArgument("unknown threshold mode '" + s + "'");
}

void BettingConfig::validate() const {
  if (games < 1 || wagers_per_game < 1) {
    throw InvalidArgument("games and wagers_per_game must be positive");
  }
  if (rho.size() != dim() || abar.size() != dim()) {
    throw InvalidArgument("rho and abar need games * wagers_per_game entries");
  }
  if (!((rho.array() > 0.0).all() && (rho.array() < 1.0).all())) {
    throw InvalidArgument("rho entries must lie in (0, 1)");
  }
  if (!(abar.array() > 0.0).all() || !abar.allFinite()) {
    throw InvalidArgument("abar entries must be positive");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
}

double BettingConfig::offset() const {
  return mode == ThresholdMode::LossBeta ? -beta : beta;
}

ChanceSpec BettingConfig::spec() const {
  ChanceSpec s;
  s.map = -MatrixXd::Identity(dim(), dim());
  s.offset = offset();
  s.alpha = alpha;
  return s;
}

SupportSet BettingConfig::support() const {
  return SupportSet::box(VectorXd::Constant(dim(), -1.0), abar);
}

double wager_outcome(double u, double rho, double abar) {
  if (!(u >= 0.0 && u <= 1.0)) throw InvalidArgument("u must lie in [0, 1]");
  return u >= 1.0 - rho ? abar : -1.0;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform on [0, 1) with 53 random bits.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

MatrixXd sample_batch(const BettingConfig& cfg, std::uint64_t seed, int count) {
  cfg.validate();
  if (count < 1) throw InvalidArgument("count must be positive");
  std::mt19937_64 rng(seed);
  MatrixXd out(count, cfg.dim());
  for (int i = 0; i < count; ++i) {
    for (int g = 0; g < cfg.games; ++g) {
      const double u = unit_uniform(rng);
      for (int w = 0; w < cfg.wagers_per_game; ++w) {
        const int k = g * cfg.wagers_per_game + w;
        out(i, k) = wager_outcome(u, cfg.rho(k), cfg.abar(k));
      }
    }
  }
  return out;
}

TrueMoments true_moments(const BettingConfig& cfg) {
  cfg.validate();
  const int n = cfg.dim();
  TrueMoments tm{VectorXd::Zero(n), MatrixXd::Zero(n, n)};
  MatrixXd second = MatrixXd::Zero(n, n);
  for (int g = 0; g < cfg.games; ++g) {
    const int first = g * cfg.wagers_per_game;
    std::vector<double> cuts = {0.0, 1.0};
    for (int w = 0; w < cfg.wagers_per_game; ++w) cuts.push_back(1.0 - cfg.rho(first + w));
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double len = cuts[s + 1] - cuts[s];
      if (len <= 0.0) continue;
      // outcomes are constant on each interval; its midpoint decides them
      const double mid = 0.5 * (cuts[s] + cuts[s + 1]);
      VectorXd val(cfg.wagers_per_game);
      for (int w = 0; w < cfg.wagers_per_game; ++w) {
        val(w) = wager_outcome(mid, cfg.rho(first + w), cfg.abar(first + w));
      }
      tm.mu.segment(first, cfg.wagers_per_game) += len * val;
      second.block(first, first, cfg.wagers_per_game, cfg.wagers_per_game) +=
          len * val * val.transpose();
    }
  }
  for (int g = 0; g < cfg.games; ++g) {
    const int first = g * cfg.wagers_per_game;
    const VectorXd m = tm.mu.segment(first, cfg.wagers_per_game);
    tm.sigma.block(first, first, cfg.wagers_per_game, cfg.wagers_per_game) =
        second.block(first, first, cfg.wagers_per_game, cfg.wagers_per_game) -
        m * m.transpose();
  }
  return tm;
}

conic::ConicProgram assemble_problem(const BettingConfig& cfg, const SurrogateBlocks& blocks,
                                     const VectorXd& objective_mean) {
  const int n = cfg.dim();
  if (blocks.decision_dim != n || objective_mean.size() != n) {
    throw InvalidArgument("surrogate and objective must be over the wager vector");
  }
  conic::ConicProgram prog = blocks.to_program();
  VectorXd c = VectorXd::Zero(blocks.num_vars());
  c.head(n) = objective_mean;
  prog.set_objective(c, conic::Sense::Maximize);
  VectorXd budget = VectorXd::Zero(blocks.num_vars());
  budget.head(n).setOnes();
  prog.add_linear_le(budget, -1.0);
  for (int i = 0; i < n; ++i) prog.set_lower_bound(i, 0.0);
  return prog;
}

Evaluation evaluate(const VectorXd& x, const MatrixXd& test_samples, const BettingConfig& cfg) {
  if (x.size() != cfg.dim() || test_samples.cols() != cfg.dim()) {
    throw InvalidArgument("decision and samples must have one entry per wager");
  }
  if (test_samples.rows() == 0) throw InvalidArgument("empty test set");
  const VectorXd ret = test_samples * x;
  const double threshold = cfg.mode == ThresholdMode::LossBeta ? -cfg.beta : cfg.beta;
  Evaluation e;
  e.reward = ret.mean();
  e.violation = static_cast<double>((ret.array() < threshold).count()) /
                static_cast<double>(ret.size());
  return e;
}

// ---------------------------------------------------------------------------
// Methods

std::string Method::tag() const {
  char buf[64];
  switch (kind) {
    case MethodKind::Plugin:
      return "plugin";
    case MethodKind::Cor1:
      return "cor1";
    case MethodKind::Oracle:
      return "oracle";
    case MethodKind::Thm1:
      std::snprintf(buf, sizeof buf, "thm1:%g", param);
      return buf;
    case MethodKind::FixedDelta:
      std::snprintf(buf, sizeof buf, "fixed_delta:%g", param);
      return buf;
  }
  return "unknown";
}

Method Method::parse(const std::string& tag) {
  const auto colon = tag.find(':');
  const std::string name = tag.substr(0, colon);
  std::optional<double> param;
  if (colon != std::string::npos) {
    const std::string rest = tag.substr(colon + 1);
    std::size_t used = 0;
    try {
      param = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size()) {
      throw InvalidArgument("bad method parameter in '" + tag + "'");
    }
  }
  auto no_param = [&](MethodKind k) {
    if (param) throw InvalidArgument("method '" + name + "' takes no parameter");
    return Method{k, 0.0};
  };
  if (name == "plugin") return no_param(MethodKind::Plugin);
  if (name == "cor1") return no_param(MethodKind::Cor1);
  if (name == "oracle") return no_param(MethodKind::Oracle);
  if (name == "thm1") {
    if (!param || !(*param > 0.0)) throw InvalidArgument("thm1 needs a positive p, e.g. thm1:3");
    return {MethodKind::Thm1, *param};
  }
  if (name == "fixed_delta") {
    if (!param || !(*param > 0.0 && *param < 1.0)) {
      throw InvalidArgument("fixed_delta needs delta in (0, 1), e.g. fixed_delta:0.1");
    }
    return {MethodKind::FixedDelta, *param};
  }
  throw InvalidArgument("unknown method '" + tag + "'");
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& label, std::int64_t n,
                          std::int64_t trial) {
  // FNV-1a over the label, then splitmix64 mixing of every field
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t v : {h, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial)}) {
    state ^= v + 0x9e3779b97f4a7c15ULL + (out << 6) + (out >> 2);
    out = splitmix64(state);
  }
  return out;
}

SurrogateBlocks build_surrogate(const BettingConfig& cfg, const Method& method,
                                const MomentState& state, VectorXd& objective) {
  const ChanceSpec spec = cfg.spec();
  switch (method.kind) {
    case MethodKind::Oracle: {
      const TrueMoments tm = true_moments(cfg);
      objective = tm.mu;
      return build_known(tm.mu, tm.sigma, spec);
    }
    case MethodKind::Plugin:
      objective = state.mean();
      return build_plugin(state, spec);
    case MethodKind::Cor1:
      objective = state.mean();
      return build_thm1(state, cfg.support(), spec, schedule_cor1(state.count(), cfg.alpha));
    case MethodKind::Thm1:
      objective = state.mean();
      return build_thm1(state, cfg.support(), spec,
                        schedule_thm1(state.count(), cfg.alpha, method.param));
    case MethodKind::FixedDelta:
      objective = state.mean();
      return build_fixed_delta(state, cfg.support(), spec, method.param);
  }
  throw InvalidArgument("unknown method");
}

MethodSolve solve_method(const BettingConfig& cfg, const Method& method,
                         const MomentState& state, const conic::ToleranceSettings& tol) {
  MethodSolve out;
  out.x = VectorXd::Zero(cfg.dim());
  VectorXd objective;
  std::optional<SurrogateBlocks> blocks;
  try {
    blocks = build_surrogate(cfg, method, state, objective);
  } catch (const NotEnoughSamples&) {
    out.status = "not_enough_samples";
    out.fallback = true;
    return out;
  }
  const conic::Solution sol = conic::solve(assemble_problem(cfg, *blocks, objective), tol);
  out.status = conic::to_string(sol.status);
  if (sol.status != conic::Status::Optimal) {
    out.fallback = true;
    return out;
  }
  out.x = sol.x.head(cfg.dim());
  out.objective = sol.objective;
  return out;
}

// ---------------------------------------------------------------------------
// Experiments

ExperimentConfig ExperimentConfig::desk() {
  ExperimentConfig e;
  for (const char* tag :
       {"plugin", "cor1", "thm1:2.1", "thm1:3", "thm1:5", "fixed_delta:0.1", "oracle"}) {
    e.methods.push_back(Method::parse(tag));
  }
  return e;
}

ExperimentConfig ExperimentConfig::full_scale() {
  ExperimentConfig e = desk();
  e.trials_per_n = 1000;
  e.test_size = 1000000;
  return e;
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

ExperimentResult run_experiment(const BettingConfig& cfg, const ExperimentConfig& exp) {
  cfg.validate();
  if (exp.trials_per_n < 1 || exp.test_size < 1) {
    throw InvalidArgument("trials_per_n and test_size must be positive");
  }
  for (auto n : exp.n_grid) {
    if (n < 1 || n > std::numeric_limits<int>::max()) {
      throw InvalidArgument("sample sizes must be positive");
    }
  }
  const MatrixXd test =
      sample_batch(cfg, derive_seed(exp.master_seed, "test-set", 0, 0), exp.test_size);

  struct Job {
    Method method;
    std::int64_t n;
    int trial;
  };
  std::vector<Job> jobs;
  for (const auto& m : exp.methods)
    for (auto n : exp.n_grid)
      for (int t = 0; t < exp.trials_per_n; ++t) jobs.push_back({m, n, t});

  ExperimentResult res;
  res.trials.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      TrialResult& tr = res.trials[i];
      tr.method = job.method.tag();
      tr.n = job.n;
      tr.trial = job.trial;
      tr.seed = derive_seed(exp.master_seed, tr.method, job.n, job.trial);
      const MatrixXd train = sample_batch(cfg, tr.seed, static_cast<int>(job.n));
      const auto start = std::chrono::steady_clock::now();
      MomentState state(cfg.dim(), MomentMode::Full);
      state.update_batch(train);
      const MethodSolve ms = solve_method(cfg, job.method, state);
      tr.time_ms = elapsed_ms(start);
      tr.status = ms.status;
      tr.fallback = ms.fallback;
      tr.x = ms.x;
      const Evaluation ev = evaluate(tr.x, test, cfg);
      tr.reward = ev.reward;
      tr.violation = ev.violation;
    }
  };
  int threads = exp.threads > 0 ? exp.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  res.aggregates = aggregate(res.trials);
  return res;
}

std::vector<Aggregate> aggregate(const std::vector<TrialResult>& trials) {
  std::vector<Aggregate> out;
  std::size_t i = 0;
  while (i < trials.size()) {
    std::size_t j = i;
    while (j < trials.size() && trials[j].method == trials[i].method &&
           trials[j].n == trials[i].n) {
      ++j;
    }
    Aggregate a;
    a.method = trials[i].method;
    a.n = trials[i].n;
    const double count = static_cast<double>(j - i);
    double sum = 0.0, feasible = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      sum += trials[k].reward;
      a.max_violation = std::max(a.max_violation, trials[k].violation);
      if (!trials[k].fallback) feasible += 1.0;
    }
    a.avg_reward = sum / count;
    double ss = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      ss += (trials[k].reward - a.avg_reward) * (trials[k].reward - a.avg_reward);
    }
    a.reward_se = count > 1 ? std::sqrt(ss / (count - 1) / count) : 0.0;
    a.feasible_fraction = feasible / count;
    out.push_back(a);
    i = j;
  }
  return out;
}

std::vector<SequentialStep> run_sequential(const BettingConfig& cfg, const Method& method,
                                           int steps, int samples_per_step,
                                           std::uint64_t master_seed) {
  cfg.validate();
  if (steps < 2 || samples_per_step < 1) {
    throw InvalidArgument("need at least two steps and one sample per step");
  }
  MomentState state(cfg.dim(), MomentMode::Full);
  std::vector<SequentialStep> out;
  for (int s = 1; s <= steps; ++s) {
    const MatrixXd batch = sample_batch(
        cfg, derive_seed(master_seed, "sequential:" + method.tag(), samples_per_step, s),
        samples_per_step);
    const auto start = std::chrono::steady_clock::now();
    state.update_batch(batch);
    const MethodSolve ms = solve_method(cfg, method, state);
    const double ms_taken = elapsed_ms(start);
    out.push_back({s, state.count(), ms.status, ms_taken, ms.x});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid reference

ReferenceResult solve_reference(const BettingConfig& cfg, const Method& method,
                                const Moments& moments, double step) {
  cfg.validate();
  const int n = cfg.dim();
  if (n != 4) throw InvalidArgument("the grid reference is for four wagers");
  if (!(step > 0.0 && step <= 0.5)) throw InvalidArgument("grid step must lie in (0, 0.5]");
  const long steps = std::lround(1.0 / step);
  if (std::abs(steps * step - 1.0) > 1e-9) {
    throw InvalidArgument("grid step must divide 1");
  }
  const ChanceSpec spec = cfg.spec();
  const SupportSet support = cfg.support();

  std::function<double(const VectorXd&)> value;
  switch (method.kind) {
    case MethodKind::Oracle:
    case MethodKind::Plugin:
      value = [&](const VectorXd& x) {
        return displayed::known(moments.mean, moments.covariance, spec, x);
      };
      break;
    case MethodKind::Cor1:
    case MethodKind::Thm1: {
      const ScheduleResult sched =
          method.kind == MethodKind::Cor1
              ? schedule_cor1(moments.count, cfg.alpha)
              : schedule_thm1(moments.count, cfg.alpha, method.param);
      if (!sched.feasible) return {VectorXd::Zero(n), 0.0, false};
      value = [&, sched](const VectorXd& x) {
        return displayed::thm1(moments, support, spec, sched, x);
      };
      break;
    }
    case MethodKind::FixedDelta:
      value = [&](const VectorXd& x) {
        return displayed::fixed_delta(moments, support, spec, method.param, x);
      };
      break;
  }

  ReferenceResult best{VectorXd::Zero(n), -std::numeric_limits<double>::infinity(), false};
  const VectorXd& mu = moments.mean;
  VectorXd x(4);
  auto at = [&](long i, long j, long k, long l) {
    x << i * step, j * step, k * step, l * step;
    return value(x);
  };
  // On each line of the grid along the last coordinate the constraint value
  // is convex and the objective is linear, so the best feasible point of the
  // line is found by locating the minimizer and then the feasible end
  // farthest in the objective's direction.
  for (long i = 0; i <= steps; ++i) {
    for (long j = 0; i + j <= steps; ++j) {
      for (long k = 0; i + j + k <= steps; ++k) {
        const long top = steps - i - j - k;
        const double base = mu(0) * (i * step) + mu(1) * (j * step) + mu(2) * (k * step);
        const double line_best = base + std::max(0.0, mu(3) * (top * step));
        if (!(line_best > best.objective)) continue;
        // smallest minimizer of the convex sequence f(0..top)
        long lo = 0, hi = top;
        while (lo < hi) {
          const long mid = lo + (hi - lo) / 2;
          if (at(i, j, k, mid) <= at(i, j, k, mid + 1)) {
            hi = mid;
          } else {
            lo = mid + 1;
          }
        }
        const long lmin = lo;
        if (!(at(i, j, k, lmin) <= 0.0)) continue;
        long pick = lmin;
        if (mu(3) > 0.0) {
          long a = lmin, b = top;  // f nondecreasing on [lmin, top]
          while (a < b) {
            const long mid = a + (b - a + 1) / 2;
            if (at(i, j, k, mid) <= 0.0) a = mid; else b = mid - 1;
          }
          pick = a;
        } else if (mu(3) < 0.0) {
          long a = 0, b = lmin;  // f nonincreasing on [0, lmin]
          while (a < b) {
            const long mid = a + (b - a) / 2;
            if (at(i, j, k, mid) <= 0.0) b = mid; else a = mid + 1;
          }
          pick = a;
        }
        const double obj = base + mu(3) * (pick * step);
        if (obj > best.objective) {
          x << i * step, j * step, k * step, pick * step;
          best.x = x;
          best.objective = mu.dot(x);
          best.feasible = true;
        }
      }
    }
  }
  if (!best.feasible) best.objective = 0.0;
  return best;
}

}  // namespace ddcc::betting
