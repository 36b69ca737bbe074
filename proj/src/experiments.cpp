#include "sparselds/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>
#include <tuple>

#include "sparselds/errors.hpp"
#include "sparselds/recovery.hpp"

namespace sparselds {
namespace {

constexpr std::uint64_t kSystemStream = 1;
constexpr std::uint64_t kTrialStream = 2;
constexpr std::uint64_t kStandaloneStream = 3;

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

std::vector<int> inclusive(std::array<int, 2> r) {
  std::vector<int> v(static_cast<std::size_t>(r[1] - r[0] + 1));
  std::iota(v.begin(), v.end(), r[0]);
  return v;
}

Matrix gaussian(Philox4x32& rng, int rows, int cols, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix out(rows, cols);
  // Row-major fill so the draw order matches the serialized layout.
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out(i, j) = dist(rng);
  }
  return out;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers; rethrows the
// first failure after all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

struct SystemKey {
  int n, p, index;
};

std::vector<SystemKey> all_systems(const ExperimentConfig& cfg) {
  std::vector<SystemKey> keys;
  for (int n : cfg.n_list) {
    for (int p : inclusive(cfg.p_range)) {
      for (int i = 0; i < cfg.systems_per_cell; ++i) keys.push_back({n, p, i});
    }
  }
  return keys;
}

// Classification (threshold or full) and optional trials for one system
// across the given sparsity levels.
std::vector<SystemOutcome> evaluate_system(const ExperimentConfig& cfg, const SystemKey& key,
                                           const std::vector<int>& s_values, NscMode mode, bool with_trials) {
  const int id = system_id(cfg, key.n, key.p, key.index);
  try {
    const LinearSystem sys = cell_system(cfg, key.n, key.p, key.index);
    const int horizon = cfg.horizon_for(key.n);
    const BlockOperators ops = build_operators(sys, horizon);
    const bool obs = observable(ops, 1e-10);

    NscOptions nopts;
    nopts.tol = cfg.nsc_tol;
    nopts.mode = mode;

    std::vector<SystemOutcome> out;
    for (int s : s_values) {
      SystemOutcome o;
      o.system_id = id;
      o.n = key.n;
      o.m = cfg.m;
      o.p = key.p;
      o.s = s;
      o.horizon = horizon;
      o.observable = obs;
      const Asc delta = Asc::uniform(cfg.m, s);
      o.necessary = necessary_condition(sys, delta, nopts);
      o.sufficient = sufficient_condition(sys, delta, nopts);
      if (with_trials) {
        o.sefati = sefati_sufficient(ops, s, 1e-10);
        for (int t = 0; t < cfg.trials_per_system; ++t) {
          Philox4x32 rng = make_stream(
              cfg.seed, {kTrialStream, static_cast<std::uint64_t>(key.n), static_cast<std::uint64_t>(key.p),
                         static_cast<std::uint64_t>(key.index), static_cast<std::uint64_t>(s),
                         static_cast<std::uint64_t>(t)});
          const Trial trial = gen_trial(rng, sys, s, horizon, cfg.x0_range, cfg.input_amplitude);
          const Vector y = simulate(sys, trial.x0, trial.inputs);
          const RecoveryResult res = solve_d1(ops, y);
          const RecoveryVerdict v = recovery_success(trial.x0, trial.inputs, res, cfg.recovery_tol);
          TrialRecord rec;
          rec.system_id = id;
          rec.n = key.n;
          rec.m = cfg.m;
          rec.p = key.p;
          rec.s = s;
          rec.horizon = horizon;
          rec.trial = t;
          rec.joint_success = v.joint;
          rec.input_success = v.input;
          rec.l1_gap = trial.inputs.lpNorm<1>() - res.l1_value;
          o.trials.push_back(rec);
        }
      }
      out.push_back(std::move(o));
    }
    return out;
  } catch (const SolverError& e) {
    throw SolverError("system " + std::to_string(id) + ": " + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error("system " + std::to_string(id) + ": " + e.what());
  }
}

// Evaluates all systems and returns outcomes ordered by (n, p, s, index).
std::vector<SystemOutcome> sweep(const ExperimentConfig& cfg, NscMode mode, bool with_trials) {
  cfg.validate();
  const std::vector<SystemKey> keys = all_systems(cfg);
  const std::vector<int> s_values = inclusive(cfg.s_range);
  std::vector<std::vector<SystemOutcome>> per_system(keys.size());
  parallel_for(keys.size(), cfg.threads,
               [&](std::size_t i) { per_system[i] = evaluate_system(cfg, keys[i], s_values, mode, with_trials); });

  std::vector<SystemOutcome> out;
  out.reserve(keys.size() * s_values.size());
  const auto per_cell = static_cast<std::size_t>(cfg.systems_per_cell);
  for (std::size_t base = 0; base < keys.size(); base += per_cell) {
    for (std::size_t si = 0; si < s_values.size(); ++si) {
      for (std::size_t i = 0; i < per_cell; ++i) out.push_back(per_system[base + i][si]);
    }
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  require(!n_list.empty(), "n_list", "must be nonempty");
  for (int n : n_list) require(n >= 1, "n_list", "entries must be >= 1");
  require(m >= 1, "m", "must be >= 1");
  require(p_range[0] >= 1 && p_range[0] <= p_range[1], "p_range", "must be [lo, hi] with 1 <= lo <= hi");
  require(s_range[0] >= 0 && s_range[0] <= s_range[1], "s_range", "must be [lo, hi] with 0 <= lo <= hi");
  require(m >= s_range[1], "s_range", "max s exceeds m");
  require(horizon >= 0, "N_policy", "must be \"n\" or a positive integer");
  require(trials_per_system >= 0, "trials_per_system", "must be >= 0");
  require(systems_per_cell >= 1, "systems_per_cell", "must be >= 1");
  require(input_amplitude[0] <= input_amplitude[1], "input_amplitude", "must be [lo, hi] with lo <= hi");
  require(x0_range[0] <= x0_range[1], "x0_range", "must be [lo, hi] with lo <= hi");
  require(nsc_tol >= 0.0 && nsc_tol < 0.5, "nsc_tol", "must lie in [0, 0.5)");
  require(recovery_tol > 0.0, "recovery_tol", "must be positive");
  require(threads >= 0, "threads", "must be >= 0");
}

double spectral_radius(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

LinearSystem gen_system(Philox4x32& rng, int n, int m, int p) {
  if (n < 1 || m < 0 || p < 0) throw DimensionError("gen_system: need n >= 1, m >= 0, p >= 0");
  const double sd = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix a = gaussian(rng, n, n, sd);
  Matrix psi = gaussian(rng, n, m, sd);
  Matrix c = gaussian(rng, p, n, 1.0);
  const double rho = spectral_radius(a);
  if (rho >= 0.9) a *= 0.9 * (1.0 - 1e-6) / rho;
  return LinearSystem(std::move(a), std::move(psi), std::move(c));
}

LinearSystem gen_system(std::uint64_t seed, int n, int m, int p) {
  Philox4x32 rng = make_stream(seed, {kStandaloneStream, static_cast<std::uint64_t>(n),
                                      static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(p)});
  return gen_system(rng, n, m, p);
}

Trial gen_trial(Philox4x32& rng, const LinearSystem& sys, int s, int horizon, std::array<double, 2> x0_range,
                std::array<double, 2> amplitude) {
  const int m = sys.m();
  if (s < 0 || s > m) throw DimensionError("gen_trial: need 0 <= s <= m");
  Trial t;
  std::uniform_real_distribution<double> x0_dist(x0_range[0], x0_range[1]);
  std::uniform_real_distribution<double> amp(amplitude[0], amplitude[1]);
  t.x0.resize(sys.n());
  for (int i = 0; i < sys.n(); ++i) t.x0(i) = x0_dist(rng);
  t.inputs = Vector::Zero(static_cast<Eigen::Index>(horizon) * m);
  std::vector<int> pool(static_cast<std::size_t>(m));
  for (int k = 0; k < horizon; ++k) {
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates: the first s entries are a uniform s-subset.
    for (int j = 0; j < s; ++j) {
      std::uniform_int_distribution<int> pick(j, m - 1);
      std::swap(pool[j], pool[pick(rng)]);
    }
    SupportSet support(std::vector<int>(pool.begin(), pool.begin() + s));
    for (int i : support) t.inputs(k * m + i) = amp(rng);
    t.supports.push_back(std::move(support));
  }
  return t;
}

int SystemOutcome::imperfect_trials() const {
  return static_cast<int>(std::count_if(trials.begin(), trials.end(), [](const TrialRecord& r) { return !r.joint_success; }));
}

int system_id(const ExperimentConfig& cfg, int n, int p, int index) {
  const auto it = std::find(cfg.n_list.begin(), cfg.n_list.end(), n);
  if (it == cfg.n_list.end()) throw ConfigError("n_list", "n=" + std::to_string(n) + " is not configured");
  if (p < cfg.p_range[0] || p > cfg.p_range[1]) throw ConfigError("p_range", "p=" + std::to_string(p) + " out of range");
  const int n_pos = static_cast<int>(it - cfg.n_list.begin());
  const int p_count = cfg.p_range[1] - cfg.p_range[0] + 1;
  return (n_pos * p_count + (p - cfg.p_range[0])) * cfg.systems_per_cell + index;
}

LinearSystem cell_system(const ExperimentConfig& cfg, int n, int p, int index) {
  Philox4x32 rng = make_stream(cfg.seed, {kSystemStream, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p),
                                          static_cast<std::uint64_t>(index)});
  return gen_system(rng, n, cfg.m, p);
}

CellResult run_cell(const ExperimentConfig& cfg, int n, int p, int s) {
  cfg.validate();
  if (s < 0 || s > cfg.m) throw ConfigError("s_range", "s=" + std::to_string(s) + " exceeds m");
  CellResult cell{n, p, s, {}};
  std::vector<std::vector<SystemOutcome>> per(static_cast<std::size_t>(cfg.systems_per_cell));
  parallel_for(per.size(), cfg.threads, [&](std::size_t i) {
    per[i] = evaluate_system(cfg, {n, p, static_cast<int>(i)}, {s}, NscMode::Threshold, true);
  });
  for (auto& v : per) cell.systems.push_back(std::move(v.front()));
  return cell;
}

std::vector<SystemOutcome> run_recovery_sweep(const ExperimentConfig& cfg) {
  return sweep(cfg, NscMode::Threshold, true);
}

std::vector<Table1Cell> tabulate_table1(const std::vector<SystemOutcome>& outcomes) {
  constexpr NscClass kRows[] = {NscClass::Above, NscClass::Near, NscClass::Below};
  constexpr NscClass kCols[] = {NscClass::Below, NscClass::Near, NscClass::Above};
  std::vector<Table1Cell> cells;
  for (NscClass r : kRows) {
    for (NscClass c : kCols) {
      Table1Cell cell{r, c, 0, 0};
      for (const auto& o : outcomes) {
        if (o.sufficient.classification != r || o.necessary.classification != c) continue;
        ++cell.total_systems;
        if (o.imperfect()) ++cell.imperfect_systems;
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<PhaseCell> tabulate_phase(const std::vector<SystemOutcome>& outcomes) {
  std::vector<PhaseCell> cells;
  std::vector<int> counts;
  auto same_cell = [](const PhaseCell& c, const SystemOutcome& o) { return c.n == o.n && c.p == o.p && c.s == o.s; };
  for (const auto& o : outcomes) {
    if (cells.empty() || !same_cell(cells.back(), o)) {
      cells.push_back({o.n, o.p, o.s, 0.0, true, true});
      counts.push_back(0);
    }
    PhaseCell& c = cells.back();
    ++counts.back();
    c.fail_prob += o.imperfect() ? 1.0 : 0.0;
    c.red_region = c.red_region && o.necessary.classification == NscClass::Above;
    c.blue_region = c.blue_region && o.sufficient.classification == NscClass::Below;
  }
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i].fail_prob /= counts[i];
  std::sort(cells.begin(), cells.end(), [](const PhaseCell& a, const PhaseCell& b) {
    return std::tie(a.n, a.p, a.s) < std::tie(b.n, b.p, b.s);
  });
  return cells;
}

SefatiComparison tabulate_sefati(const std::vector<SystemOutcome>& outcomes) {
  SefatiComparison cmp;
  for (const auto& o : outcomes) {
    const bool below = o.observable && o.sufficient.classification == NscClass::Below;
    ++cmp.total;
    cmp.sefati_holds += o.sefati ? 1 : 0;
    cmp.sufficient_below += below ? 1 : 0;
    cmp.both += (o.sefati && below) ? 1 : 0;
  }
  return cmp;
}

std::vector<TrialRecord> collect_trials(const std::vector<SystemOutcome>& outcomes) {
  std::vector<TrialRecord> out;
  for (const auto& o : outcomes) out.insert(out.end(), o.trials.begin(), o.trials.end());
  return out;
}

AggregateStats table1(const ExperimentConfig& cfg) {
  AggregateStats st;
  st.outcomes = run_recovery_sweep(cfg);
  st.trials = collect_trials(st.outcomes);
  st.table1 = tabulate_table1(st.outcomes);
  st.sefati = tabulate_sefati(st.outcomes);
  return st;
}

AggregateStats phase_grid(const ExperimentConfig& cfg) {
  AggregateStats st;
  st.outcomes = run_recovery_sweep(cfg);
  st.trials = collect_trials(st.outcomes);
  st.phase = tabulate_phase(st.outcomes);
  st.sefati = tabulate_sefati(st.outcomes);
  return st;
}

AggregateStats scatter(const ExperimentConfig& cfg) {
  AggregateStats st;
  st.outcomes = sweep(cfg, NscMode::Full, false);
  for (const auto& o : st.outcomes) st.scatter.push_back({o.system_id, o.n, o.m, o.p, o.s, o.necessary, o.sufficient});
  std::sort(st.scatter.begin(), st.scatter.end(), [](const ScatterPoint& a, const ScatterPoint& b) {
    return std::tie(a.system_id, a.s) < std::tie(b.system_id, b.s);
  });
  return st;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {
const char* flag(bool b) { return b ? "true" : "false"; }
}  // namespace

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& trials) {
  os << "system_id,n,m,p,s,N,trial,joint_success,input_success,l1_gap\n";
  for (const auto& r : trials) {
    os << r.system_id << ',' << r.n << ',' << r.m << ',' << r.p << ',' << r.s << ',' << r.horizon << ',' << r.trial
       << ',' << flag(r.joint_success) << ',' << flag(r.input_success) << ',' << format_double(r.l1_gap) << '\n';
  }
}

void write_table1_csv(std::ostream& os, const std::vector<Table1Cell>& cells) {
  os << "row_class,col_class,imperfect_systems,total_systems\n";
  for (const auto& c : cells) {
    os << to_string(c.row_class) << ',' << to_string(c.col_class) << ',' << c.imperfect_systems << ','
       << c.total_systems << '\n';
  }
}

void write_phase_csv(std::ostream& os, const std::vector<PhaseCell>& cells) {
  os << "n,p,s,fail_prob,red_region,blue_region\n";
  for (const auto& c : cells) {
    os << c.n << ',' << c.p << ',' << c.s << ',' << format_double(c.fail_prob) << ',' << flag(c.red_region) << ','
       << flag(c.blue_region) << '\n';
  }
}

void write_scatter_csv(std::ostream& os, const std::vector<ScatterPoint>& points) {
  os << "system_id,n,m,p,s,nsc_cpsi_lo,nsc_cpsi_hi,nsc_pg_lo,nsc_pg_hi\n";
  for (const auto& pt : points) {
    os << pt.system_id << ',' << pt.n << ',' << pt.m << ',' << pt.p << ',' << pt.s << ','
       << format_double(pt.cpsi.lo) << ',' << format_double(pt.cpsi.hi) << ',' << format_double(pt.pg.lo) << ','
       << format_double(pt.pg.hi) << '\n';
  }
}

}  // namespace sparselds
