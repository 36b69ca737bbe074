#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "sparselds/certify.hpp"
#include "sparselds/errors.hpp"
#include "sparselds/experiments.hpp"
#include "sparselds/recovery.hpp"
#include "sparselds/serialize.hpp"
#include "sparselds/version.hpp"

namespace sparselds::cli {
namespace {

namespace fs = std::filesystem;

// Bad flags, unreadable files or malformed documents.
class UsageError : public Error {
 public:
  using Error::Error;
};

constexpr const char* kSeedEnv = "SPARSE_LDS_SEED";

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
  if (!out) throw UsageError("failed writing '" + path + "'");
}

void emit_json(const Json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw UsageError(origin + " must be a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv(kSeedEnv);
  if (v == nullptr) return std::nullopt;
  return parse_seed(v, kSeedEnv);
}

// --seed if given, then the environment. Throws if neither is set.
std::uint64_t required_seed(const std::optional<std::string>& flag) {
  if (flag) return parse_seed(*flag, "--seed");
  if (auto e = env_seed()) return *e;
  throw UsageError(std::string("--seed is required (or set ") + kSeedEnv + ")");
}

LinearSystem load_system(const std::string& path) { return system_from_json(read_json(path)); }

Matrix load_matrix(const std::string& path) {
  const Json j = read_json(path);
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError("matrix", "must be a nonempty array of rows");
  return matrix_from_json(j, static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()), "matrix");
}

// A flat array, an array of per-step arrays, or an object with key "y".
Vector load_outputs(const std::string& path) {
  Json j = read_json(path);
  if (j.is_object()) {
    if (!j.contains("y")) throw ConfigError("y", "missing");
    j = j["y"];
  }
  if (!j.is_array()) throw ConfigError("y", "must be an array");
  if (!j.empty() && j[0].is_array()) {
    Json flat = Json::array();
    for (const Json& row : j) {
      if (!row.is_array()) throw ConfigError("y", "mixes scalars and arrays");
      for (const Json& v : row) flat.push_back(v);
    }
    j = std::move(flat);
  }
  return vector_from_json(j, "y");
}

Asc load_delta(const std::optional<std::string>& asc_path, const std::optional<int>& s, int ambient) {
  if (asc_path) return asc_from_json(read_json(*asc_path), ambient);
  if (!s) throw UsageError("one of --s or --asc is required");
  if (*s < 0 || *s > ambient) throw UsageError("--s must lie in [0, m]");
  return Asc::uniform(ambient, *s);
}

int resolve_horizon(const std::optional<int>& flag, const LinearSystem& sys) {
  const int horizon = flag.value_or(sys.n());
  if (horizon < 1) throw UsageError("--N must be >= 1");
  return horizon;
}

NscMode parse_mode(const std::string& mode) { return mode == "threshold" ? NscMode::Threshold : NscMode::Full; }

Json supports_to_json(const std::vector<SupportSet>& supports) {
  Json out = Json::array();
  for (const auto& s : supports) out.push_back(s.indices());
  return out;
}

struct GenArgs {
  std::optional<std::string> seed;
  int n = 0, m = 0, p = 0;
  std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  if (a.n < 1 || a.m < 0 || a.p < 0) throw UsageError("--n must be >= 1 and --m, --p >= 0");
  const LinearSystem sys = gen_system(required_seed(a.seed), a.n, a.m, a.p);
  emit_json(system_to_json(sys), a.out, out);
  return kOk;
}

struct SimulateArgs {
  std::string system;
  std::optional<std::string> seed;
  int s = 0;
  std::optional<int> horizon;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const std::uint64_t seed = required_seed(a.seed);
  const LinearSystem sys = load_system(a.system);
  const int horizon = resolve_horizon(a.horizon, sys);
  if (a.s < 0 || a.s > sys.m()) throw UsageError("--s must lie in [0, m]");
  Philox4x32 rng = make_stream(seed, {4, static_cast<std::uint64_t>(a.s), static_cast<std::uint64_t>(horizon)});
  const Trial t = gen_trial(rng, sys, a.s, horizon);
  const Json j{{"N", horizon},
               {"x0", vector_to_json(t.x0)},
               {"U", vector_to_json(t.inputs)},
               {"supports", supports_to_json(t.supports)},
               {"y", vector_to_json(simulate(sys, t.x0, t.inputs))}};
  emit_json(j, a.out, out);
  return kOk;
}

struct CertifyArgs {
  std::string system;
  std::optional<int> s;
  std::optional<std::string> asc;
  std::optional<int> horizon;
  double tol = 0.05;
  std::string mode = "full";
  std::string out;
};

int cmd_certify(const CertifyArgs& a, std::ostream& out) {
  const LinearSystem sys = load_system(a.system);
  const Asc delta = load_delta(a.asc, a.s, sys.m());
  const int horizon = resolve_horizon(a.horizon, sys);
  if (!(a.tol >= 0.0)) throw UsageError("--tol must be >= 0");

  NscOptions opts;
  opts.tol = a.tol;
  opts.mode = parse_mode(a.mode);
  const BlockOperators ops = build_operators(sys, horizon);
  const NscInterval nec = necessary_condition(sys, delta, opts);
  const NscInterval suf = sufficient_condition(sys, delta, opts);
  const Json j{{"N", horizon},
               {"observable", observable(ops)},
               {"necessary", nsc_to_json(nec)},
               {"sufficient", nsc_to_json(suf)},
               {"tight_case", to_string(tight_case(sys))},
               {"sefati", sefati_sufficient(ops, delta.max_face_size())}};
  emit_json(j, a.out, out);
  return kOk;
}

struct NscArgs {
  std::string matrix;
  std::optional<int> s;
  std::optional<std::string> asc;
  double tol = 0.05;
  std::string mode = "full";
  std::string out;
};

int cmd_nsc(const NscArgs& a, std::ostream& out) {
  const Matrix theta = load_matrix(a.matrix);
  const Asc delta = load_delta(a.asc, a.s, static_cast<int>(theta.cols()));
  if (!(a.tol >= 0.0)) throw UsageError("--tol must be >= 0");
  NscOptions opts;
  opts.tol = a.tol;
  opts.mode = parse_mode(a.mode);
  emit_json(nsc_to_json(nsc_matrix(theta, delta, opts)), a.out, out);
  return kOk;
}

struct RecoverArgs {
  std::string system;
  std::string y;
  std::optional<int> horizon;
  std::string out;
};

int cmd_recover(const RecoverArgs& a, std::ostream& out, std::ostream& err) {
  const LinearSystem sys = load_system(a.system);
  const Vector y = load_outputs(a.y);
  if (sys.p() == 0 || y.size() % sys.p() != 0 || y.size() / sys.p() < 2) {
    throw UsageError("y must hold (N+1)*p values with N >= 1");
  }
  const int inferred = static_cast<int>(y.size() / sys.p()) - 1;
  if (a.horizon && *a.horizon != inferred) {
    throw UsageError("--N " + std::to_string(*a.horizon) + " does not match y length (N = " +
                     std::to_string(inferred) + ")");
  }
  const RecoveryResult r = solve_d1(build_operators(sys, inferred), y);
  emit_json(recovery_to_json(r), a.out, out);
  if (r.status != LpStatus::Optimal) {
    err << "recovery failed: " << to_string(r.status) << "\n";
    return kRecoveryFailed;
  }
  return kOk;
}

struct ExperimentArgs {
  std::string config;
  std::string out;
  std::optional<std::string> seed;
  std::optional<int> threads;
};

ExperimentConfig load_config(const ExperimentArgs& a) {
  Json j = read_json(a.config);
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  if (a.seed) {
    j["seed"] = parse_seed(*a.seed, "--seed");
  } else if (!j.contains("seed")) {
    if (auto e = env_seed()) j["seed"] = *e;
  }
  ExperimentConfig cfg = config_from_json(j);
  if (a.threads) {
    if (*a.threads < 0) throw UsageError("--threads must be >= 0");
    cfg.threads = *a.threads;
  }
  return cfg;
}

template <typename Writer, typename Rows>
std::string csv_text(Writer write, const Rows& rows) {
  std::ostringstream os;
  write(os, rows);
  return os.str();
}

Json sefati_to_json(const SefatiComparison& c) {
  return Json{{"total", c.total},
              {"sefati_holds", c.sefati_holds},
              {"sufficient_below", c.sufficient_below},
              {"both", c.both}};
}

int cmd_experiment(const std::string& which, const ExperimentArgs& a, std::ostream& out) {
  const ExperimentConfig cfg = load_config(a);
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw UsageError("cannot create output directory '" + a.out + "': " + ec.message());

  // Everything is computed before the first file is written.
  std::vector<std::pair<std::string, std::string>> files;
  const bool recovery = which == "table1" || which == "phase" || which == "all";
  if (recovery) {
    const auto outcomes = run_recovery_sweep(cfg);
    files.emplace_back("trials.csv", csv_text(write_trials_csv, collect_trials(outcomes)));
    if (which != "phase") {
      files.emplace_back("table1.csv", csv_text(write_table1_csv, tabulate_table1(outcomes)));
      files.emplace_back("sefati.json", sefati_to_json(tabulate_sefati(outcomes)).dump(2) + "\n");
    }
    if (which != "table1") files.emplace_back("phase.csv", csv_text(write_phase_csv, tabulate_phase(outcomes)));
  }
  if (which == "scatter" || which == "all") {
    files.emplace_back("scatter.csv", csv_text(write_scatter_csv, scatter(cfg).scatter));
  }

  Json outputs = Json::array();
  for (const auto& [name, text] : files) {
    write_text((fs::path(a.out) / name).string(), text);
    outputs.push_back(name);
  }
  const Json manifest{{"tool", "sparse_lds"},
                      {"version", kVersion},
                      {"command", "experiment " + which},
                      {"seed", cfg.seed},
                      {"config", config_to_json(cfg)},
                      {"outputs", outputs}};
  write_text((fs::path(a.out) / "manifest.json").string(), manifest.dump(2) + "\n");
  out << "wrote " << files.size() + 1 << " files to " << a.out << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recoverability certificates and l1 recovery for sparse-input linear systems", "sparse_lds"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random stable system");
  gen_cmd->add_option("--seed", gen.seed, std::string("Seed (falls back to ") + kSeedEnv + ")");
  gen_cmd->add_option("--n", gen.n, "State dimension")->required();
  gen_cmd->add_option("--m", gen.m, "Input dimension")->required();
  gen_cmd->add_option("--p", gen.p, "Output dimension")->required();
  gen_cmd->add_option("--out", gen.out, "Output file (default stdout)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw a random sparse trial and simulate its outputs");
  sim_cmd->add_option("--system", sim.system, "System JSON file")->required();
  sim_cmd->add_option("--s", sim.s, "Nonzeros per input")->required();
  sim_cmd->add_option("--N", sim.horizon, "Horizon (default n)");
  sim_cmd->add_option("--seed", sim.seed, std::string("Seed (falls back to ") + kSeedEnv + ")");
  sim_cmd->add_option("--out", sim.out, "Output file (default stdout)");

  CertifyArgs cert;
  auto* cert_cmd = app.add_subcommand("certify", "Evaluate the necessary and sufficient recoverability conditions");
  cert_cmd->add_option("--system", cert.system, "System JSON file")->required();
  cert_cmd->add_option("--s", cert.s, "Sparsity level");
  cert_cmd->add_option("--asc", cert.asc, "Support complex JSON file (instead of --s)");
  cert_cmd->add_option("--N", cert.horizon, "Horizon (default n)");
  cert_cmd->add_option("--tol", cert.tol, "Half-width of the band around 1/2")->capture_default_str();
  cert_cmd->add_option("--mode", cert.mode, "full or threshold")
      ->check(CLI::IsMember({"full", "threshold"}))
      ->capture_default_str();
  cert_cmd->add_option("--out", cert.out, "Output file (default stdout)");

  NscArgs nsc;
  auto* nsc_cmd = app.add_subcommand("nsc", "Nullspace constant of a matrix");
  nsc_cmd->add_option("--matrix", nsc.matrix, "Matrix JSON file ([[row], ...])")->required();
  nsc_cmd->add_option("--s", nsc.s, "Sparsity level");
  nsc_cmd->add_option("--asc", nsc.asc, "Support complex JSON file (instead of --s)");
  nsc_cmd->add_option("--tol", nsc.tol, "Half-width of the band around 1/2")->capture_default_str();
  nsc_cmd->add_option("--mode", nsc.mode, "full or threshold")
      ->check(CLI::IsMember({"full", "threshold"}))
      ->capture_default_str();
  nsc_cmd->add_option("--out", nsc.out, "Output file (default stdout)");

  RecoverArgs rec;
  auto* rec_cmd = app.add_subcommand("recover", "Recover x0 and the inputs from outputs by l1 minimization");
  rec_cmd->add_option("--system", rec.system, "System JSON file")->required();
  rec_cmd->add_option("--y", rec.y, "Outputs JSON file")->required();
  rec_cmd->add_option("--N", rec.horizon, "Horizon (checked against the length of y)");
  rec_cmd->add_option("--out", rec.out, "Output file (default stdout)");

  ExperimentArgs exp;
  std::string which;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a seeded experiment sweep");
  exp_cmd->add_option("kind", which, "table1, phase, scatter or all")
      ->required()
      ->check(CLI::IsMember({"table1", "phase", "scatter", "all"}));
  exp_cmd->add_option("--config", exp.config, "Config JSON file")->required();
  exp_cmd->add_option("--out", exp.out, "Output directory")->required();
  exp_cmd->add_option("--seed", exp.seed, "Overrides the config seed");
  exp_cmd->add_option("--threads", exp.threads, "Worker threads (0 = all cores)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*cert_cmd) return cmd_certify(cert, out);
    if (*nsc_cmd) return cmd_nsc(nsc, out);
    if (*rec_cmd) return cmd_recover(rec, out, err);
    if (*exp_cmd) return cmd_experiment(which, exp, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InstanceTooLarge& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kSolverError;
  }
  return kUsage;
}

}  // namespace sparselds::cli
