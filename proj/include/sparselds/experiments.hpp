#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparselds/certify.hpp"
#include "sparselds/lds.hpp"
#include "sparselds/rng.hpp"

namespace sparselds {

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::vector<int> n_list{6, 8, 10};
  int m = 10;
  std::array<int, 2> p_range{1, 10};  // inclusive
  std::array<int, 2> s_range{1, 3};   // inclusive
  int horizon = 0;                    // 0 means N = n
  int trials_per_system = 30;
  int systems_per_cell = 10;
  std::array<double, 2> input_amplitude{-5.0, 5.0};
  std::array<double, 2> x0_range{-5.0, 5.0};
  double nsc_tol = 0.05;
  double recovery_tol = 1e-4;
  int threads = 0;  // 0 means all available cores

  // Throws ConfigError naming the first bad field.
  void validate() const;
  int horizon_for(int n) const { return horizon > 0 ? horizon : n; }
};

// A ~ N(0, 1/n) rescaled to spectral radius < 0.9, Psi ~ N(0, 1/n), C ~ N(0, 1).
LinearSystem gen_system(Philox4x32& rng, int n, int m, int p);
LinearSystem gen_system(std::uint64_t seed, int n, int m, int p);

double spectral_radius(const Matrix& a);

struct Trial {
  Vector x0;
  Vector inputs;
  std::vector<SupportSet> supports;
};

// x0 uniform on x0_range^n; each u_k uniform on a random size-s support with
// nonzeros uniform on input_amplitude.
Trial gen_trial(Philox4x32& rng, const LinearSystem& sys, int s, int horizon,
                std::array<double, 2> x0_range = {-5.0, 5.0}, std::array<double, 2> amplitude = {-5.0, 5.0});

struct TrialRecord {
  int system_id = 0;
  int n = 0, m = 0, p = 0, s = 0, horizon = 0;
  int trial = 0;
  bool joint_success = false;
  bool input_success = false;
  // ||U_true||_1 - l1_value; positive means the solver found a cheaper input.
  double l1_gap = 0.0;
};

// Everything measured for one (system, s) pair.
struct SystemOutcome {
  int system_id = 0;
  int n = 0, m = 0, p = 0, s = 0, horizon = 0;
  bool observable = false;
  bool sefati = false;
  NscInterval necessary;
  NscInterval sufficient;
  std::vector<TrialRecord> trials;

  int imperfect_trials() const;
  bool imperfect() const { return imperfect_trials() > 0; }
};

struct CellResult {
  int n = 0, p = 0, s = 0;
  std::vector<SystemOutcome> systems;
};

// Systems depend on (seed, n, p, index) only, so every s in a sweep sees the
// same systems. Trials depend additionally on s and the trial index.
LinearSystem cell_system(const ExperimentConfig& cfg, int n, int p, int index);
int system_id(const ExperimentConfig& cfg, int n, int p, int index);

// Threshold-mode classification plus recovery trials for every system of a cell.
CellResult run_cell(const ExperimentConfig& cfg, int n, int p, int s);

struct Table1Cell {
  NscClass row_class;  // sufficient condition
  NscClass col_class;  // necessary condition
  int imperfect_systems = 0;
  int total_systems = 0;
};

struct PhaseCell {
  int n = 0, p = 0, s = 0;
  double fail_prob = 0.0;
  bool red_region = false;   // every system Above on C Psi
  bool blue_region = false;  // every system Below on Pperp_1 Gamma_1
};

struct ScatterPoint {
  int system_id = 0;
  int n = 0, m = 0, p = 0, s = 0;
  NscInterval cpsi;
  NscInterval pg;
};

struct SefatiComparison {
  int total = 0;
  int sefati_holds = 0;
  int sufficient_below = 0;
  int both = 0;
};

struct AggregateStats {
  std::vector<TrialRecord> trials;
  std::vector<SystemOutcome> outcomes;
  std::vector<Table1Cell> table1;
  std::vector<PhaseCell> phase;
  std::vector<ScatterPoint> scatter;
  SefatiComparison sefati;
};

// Runs every (n, p, system, s) of the config through classification and trials.
std::vector<SystemOutcome> run_recovery_sweep(const ExperimentConfig& cfg);

std::vector<Table1Cell> tabulate_table1(const std::vector<SystemOutcome>& outcomes);
std::vector<PhaseCell> tabulate_phase(const std::vector<SystemOutcome>& outcomes);
SefatiComparison tabulate_sefati(const std::vector<SystemOutcome>& outcomes);
std::vector<TrialRecord> collect_trials(const std::vector<SystemOutcome>& outcomes);

AggregateStats table1(const ExperimentConfig& cfg);
AggregateStats phase_grid(const ExperimentConfig& cfg);
// Full-mode nsc of both quantities for every (system, s); no trials.
AggregateStats scatter(const ExperimentConfig& cfg);

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& trials);
void write_table1_csv(std::ostream& os, const std::vector<Table1Cell>& cells);
void write_phase_csv(std::ostream& os, const std::vector<PhaseCell>& cells);
void write_scatter_csv(std::ostream& os, const std::vector<ScatterPoint>& points);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace sparselds
