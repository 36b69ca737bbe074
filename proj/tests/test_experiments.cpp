#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "oracles.hpp"
#include "sparselds/errors.hpp"
#include "sparselds/experiments.hpp"

using namespace sparselds;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.seed = 17;
  cfg.n_list = {3, 4};
  cfg.m = 5;
  cfg.p_range = {1, 3};
  cfg.s_range = {1, 2};
  cfg.trials_per_system = 3;
  cfg.systems_per_cell = 2;
  cfg.threads = 1;
  return cfg;
}

std::string expect_config_error(const ExperimentConfig& cfg) {
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

template <typename Writer, typename Rows>
std::string csv(Writer w, const Rows& rows) {
  std::ostringstream os;
  w(os, rows);
  return os.str();
}

std::string header(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST(GenSystem, DeterministicGivenSeed) {
  const LinearSystem a = gen_system(99, 5, 4, 3);
  const LinearSystem b = gen_system(99, 5, 4, 3);
  const LinearSystem c = gen_system(100, 5, 4, 3);
  EXPECT_EQ(a.A(), b.A());
  EXPECT_EQ(a.Psi(), b.Psi());
  EXPECT_EQ(a.C(), b.C());
  EXPECT_NE(a.A(), c.A());
}

TEST(GenSystem, SpectralRadiusBelowBound) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const LinearSystem sys = gen_system(seed, 1 + static_cast<int>(seed % 12), 3, 2);
    // Independent check with the complex Schur-based solver.
    Eigen::ComplexEigenSolver<Matrix> es(sys.A());
    EXPECT_LT(es.eigenvalues().cwiseAbs().maxCoeff(), 0.9) << "seed " << seed;
  }
}

TEST(GenSystem, PsiColumnNormsConcentrate) {
  // n * ||psi_j||^2 ~ chi^2_n, so the sum over m = 20 columns is chi^2_400.
  const LinearSystem sys = gen_system(3, 20, 20, 20);
  const double stat = 20.0 * sys.Psi().squaredNorm();
  EXPECT_LT(std::abs(stat - 400.0), 3.0 * std::sqrt(800.0));
  for (Eigen::Index j = 0; j < 20; ++j) EXPECT_NEAR(sys.Psi().col(j).norm(), 1.0, 0.6);
  // C entries have unit variance: sum of 400 squares is chi^2_400.
  EXPECT_LT(std::abs(sys.C().squaredNorm() - 400.0), 3.0 * std::sqrt(800.0));
}

TEST(GenTrial, ZeroSparsityGivesZeroInputs) {
  const LinearSystem sys = gen_system(1, 3, 4, 2);
  Philox4x32 rng(1, 1);
  const Trial t = gen_trial(rng, sys, 0, 3);
  EXPECT_EQ(t.inputs, Vector::Zero(12));
  for (const auto& s : t.supports) EXPECT_TRUE(s.empty());
}

TEST(GenTrial, SupportsHaveExactSizeAndRanges) {
  const LinearSystem sys = gen_system(1, 4, 6, 2);
  Philox4x32 rng(2, 2);
  for (int rep = 0; rep < 50; ++rep) {
    const Trial t = gen_trial(rng, sys, 3, 4);
    ASSERT_EQ(t.supports.size(), 4u);
    EXPECT_LE(t.x0.cwiseAbs().maxCoeff(), 5.0);
    for (int k = 0; k < 4; ++k) {
      EXPECT_EQ(t.supports[static_cast<std::size_t>(k)].size(), 3u);
      const Vector u = t.inputs.segment(k * 6, 6);
      EXPECT_LE(u.cwiseAbs().maxCoeff(), 5.0);
      for (int i = 0; i < 6; ++i) {
        const bool in = t.supports[static_cast<std::size_t>(k)].contains(i);
        EXPECT_EQ(u(i) != 0.0, in);
      }
    }
  }
  EXPECT_THROW(gen_trial(rng, sys, 7, 2), DimensionError);
}

TEST(GenTrial, SupportDistributionIsUniform) {
  const LinearSystem sys = gen_system(1, 2, 5, 1);
  Philox4x32 rng(3, 3);
  std::map<SupportSet, int> counts;
  const int draws = 5000;
  for (int i = 0; i < draws; ++i) ++counts[gen_trial(rng, sys, 2, 1).supports[0]];
  ASSERT_EQ(counts.size(), 10u);
  double chi2 = 0.0;
  for (const auto& [s, c] : counts) chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
  // 9 degrees of freedom; 0.999 quantile is 27.88.
  EXPECT_LT(chi2, 27.88);
}

TEST(Config, ValidationNamesTheField) {
  EXPECT_EQ(expect_config_error(tiny_config()), "<none>");
  ExperimentConfig c = tiny_config();
  c.s_range = {1, 6};
  EXPECT_EQ(expect_config_error(c), "s_range");
  c = tiny_config();
  c.n_list.clear();
  EXPECT_EQ(expect_config_error(c), "n_list");
  c = tiny_config();
  c.p_range = {3, 1};
  EXPECT_EQ(expect_config_error(c), "p_range");
  c = tiny_config();
  c.recovery_tol = 0.0;
  EXPECT_EQ(expect_config_error(c), "recovery_tol");
  c = tiny_config();
  c.systems_per_cell = 0;
  EXPECT_EQ(expect_config_error(c), "systems_per_cell");
  c = tiny_config();
  c.horizon = -1;
  EXPECT_EQ(expect_config_error(c), "N_policy");
}

TEST(Sweep, RunCellDeterministicAndWellFormed) {
  const ExperimentConfig cfg = tiny_config();
  const CellResult a = run_cell(cfg, 4, 2, 1);
  const CellResult b = run_cell(cfg, 4, 2, 1);
  ASSERT_EQ(a.systems.size(), 2u);
  for (std::size_t i = 0; i < a.systems.size(); ++i) {
    EXPECT_EQ(a.systems[i].necessary.lo, b.systems[i].necessary.lo);
    ASSERT_EQ(a.systems[i].trials.size(), 3u);
    for (std::size_t t = 0; t < 3; ++t) {
      EXPECT_EQ(a.systems[i].trials[t].l1_gap, b.systems[i].trials[t].l1_gap);
      EXPECT_EQ(a.systems[i].trials[t].horizon, 4);
    }
  }
}

TEST(Sweep, ThreadCountDoesNotChangeOutputs) {
  ExperimentConfig one = tiny_config();
  ExperimentConfig many = tiny_config();
  many.threads = 3;
  const auto a = run_recovery_sweep(one);
  const auto b = run_recovery_sweep(many);
  EXPECT_EQ(csv(write_trials_csv, collect_trials(a)), csv(write_trials_csv, collect_trials(b)));
  EXPECT_EQ(csv(write_table1_csv, tabulate_table1(a)), csv(write_table1_csv, tabulate_table1(b)));
  EXPECT_EQ(csv(write_phase_csv, tabulate_phase(a)), csv(write_phase_csv, tabulate_phase(b)));
  EXPECT_EQ(csv(write_scatter_csv, scatter(one).scatter), csv(write_scatter_csv, scatter(many).scatter));
}

TEST(Sweep, InvariantsHold) {
  const auto outcomes = run_recovery_sweep(tiny_config());
  // 2 n values x 3 p values x 2 systems x 2 s values.
  ASSERT_EQ(outcomes.size(), 24u);
  for (const auto& o : outcomes) {
    for (const auto& t : o.trials) EXPECT_TRUE(!t.joint_success || t.input_success);
    if (o.observable && o.sufficient.classification == NscClass::Below) {
      EXPECT_EQ(o.imperfect_trials(), 0);
    }
    EXPECT_LE(o.necessary.lo, o.sufficient.hi + 1e-9);
  }
  int total = 0;
  for (const auto& c : tabulate_table1(outcomes)) total += c.total_systems;
  EXPECT_EQ(total, 24);
  for (const auto& c : tabulate_phase(outcomes)) {
    EXPECT_GE(c.fail_prob, 0.0);
    EXPECT_LE(c.fail_prob, 1.0);
  }
}

TEST(Sweep, SystemsAreSharedAcrossSparsityLevels) {
  const ExperimentConfig cfg = tiny_config();
  const auto outcomes = run_recovery_sweep(cfg);
  std::map<int, int> per_id;
  for (const auto& o : outcomes) ++per_id[o.system_id];
  EXPECT_EQ(per_id.size(), 12u);
  for (const auto& [id, count] : per_id) EXPECT_EQ(count, 2);
  const LinearSystem a = cell_system(cfg, 3, 2, 1);
  EXPECT_EQ(a.A(), cell_system(cfg, 3, 2, 1).A());
  EXPECT_NE(a.A(), cell_system(cfg, 3, 2, 0).A());
}

TEST(Tabulate, Table1Buckets) {
  std::vector<SystemOutcome> outs(3);
  outs[0].sufficient.classification = NscClass::Below;
  outs[0].necessary.classification = NscClass::Below;
  outs[1].sufficient.classification = NscClass::Above;
  outs[1].necessary.classification = NscClass::Above;
  outs[1].trials.push_back(TrialRecord{});  // a failed trial
  outs[2].sufficient.classification = NscClass::Above;
  outs[2].necessary.classification = NscClass::Near;
  const auto cells = tabulate_table1(outs);
  ASSERT_EQ(cells.size(), 9u);
  EXPECT_EQ(cells[0].row_class, NscClass::Above);
  EXPECT_EQ(cells[0].col_class, NscClass::Below);
  EXPECT_EQ(cells[2].imperfect_systems, 1);
  EXPECT_EQ(cells[2].total_systems, 1);
  EXPECT_EQ(cells[1].total_systems, 1);
  EXPECT_EQ(cells[6].row_class, NscClass::Below);
  EXPECT_EQ(cells[6].total_systems, 1);
  EXPECT_EQ(cells[6].imperfect_systems, 0);
}

TEST(Tabulate, PhaseRegions) {
  std::vector<SystemOutcome> outs(2);
  for (auto& o : outs) {
    o.n = 4;
    o.p = 2;
    o.s = 1;
    o.necessary.classification = NscClass::Above;
    o.sufficient.classification = NscClass::Above;
  }
  outs[1].trials.push_back(TrialRecord{});
  const auto cells = tabulate_phase(outs);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_DOUBLE_EQ(cells[0].fail_prob, 0.5);
  EXPECT_TRUE(cells[0].red_region);
  EXPECT_FALSE(cells[0].blue_region);
}

TEST(Csv, HeadersMatchSchemas) {
  const auto outcomes = run_recovery_sweep(tiny_config());
  EXPECT_EQ(header(csv(write_trials_csv, collect_trials(outcomes))),
            "system_id,n,m,p,s,N,trial,joint_success,input_success,l1_gap");
  EXPECT_EQ(header(csv(write_table1_csv, tabulate_table1(outcomes))),
            "row_class,col_class,imperfect_systems,total_systems");
  EXPECT_EQ(header(csv(write_phase_csv, tabulate_phase(outcomes))), "n,p,s,fail_prob,red_region,blue_region");
  EXPECT_EQ(header(csv(write_scatter_csv, std::vector<ScatterPoint>{})),
            "system_id,n,m,p,s,nsc_cpsi_lo,nsc_cpsi_hi,nsc_pg_lo,nsc_pg_hi");
}

TEST(Csv, RowsHaveHeaderArity) {
  const ExperimentConfig cfg = tiny_config();
  const auto outcomes = run_recovery_sweep(cfg);
  const std::string texts[] = {csv(write_trials_csv, collect_trials(outcomes)),
                               csv(write_table1_csv, tabulate_table1(outcomes)),
                               csv(write_phase_csv, tabulate_phase(outcomes)),
                               csv(write_scatter_csv, scatter(cfg).scatter)};
  for (const auto& text : texts) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    const auto commas = std::count(line.begin(), line.end(), ',');
    int rows = 0;
    while (std::getline(in, line)) {
      EXPECT_EQ(std::count(line.begin(), line.end(), ','), commas) << line;
      ++rows;
    }
    EXPECT_GT(rows, 0);
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.0, 0.1, 1.0 / 3.0, -2.5e-17, 1e300}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}
