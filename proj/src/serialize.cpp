#include "sparselds/serialize.hpp"

#include <set>

#include "sparselds/errors.hpp"

namespace sparselds {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ConfigError(key, "document is not a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(key, "missing");
  return *it;
}

int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw ConfigError(key, "must be an integer");
  return v.get<int>();
}

double number(const Json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "must be a number");
  return v.get<double>();
}

template <typename T>
std::array<T, 2> pair_field(const Json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(key, "must be a two-element array [lo, hi]");
  std::array<T, 2> out{};
  for (std::size_t i = 0; i < 2; ++i) {
    if constexpr (std::is_integral_v<T>) {
      if (!v[i].is_number_integer()) throw ConfigError(key, "entries must be integers");
      out[i] = v[i].get<T>();
    } else {
      out[i] = number(v[i], key);
    }
  }
  return out;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols, const std::string& key) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw ConfigError(key, "expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(key, "row " + std::to_string(i) + " must have " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = number(row[static_cast<std::size_t>(c)], key);
  }
  if (!m.allFinite()) throw ConfigError(key, "entries must be finite");
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError(key, "must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], key);
  return v;
}

Json system_to_json(const LinearSystem& sys) {
  return Json{{"n", sys.n()},
              {"m", sys.m()},
              {"p", sys.p()},
              {"A", matrix_to_json(sys.A())},
              {"Psi", matrix_to_json(sys.Psi())},
              {"C", matrix_to_json(sys.C())}};
}

LinearSystem system_from_json(const Json& j) {
  const int n = int_field(j, "n");
  const int m = int_field(j, "m");
  const int p = int_field(j, "p");
  if (n < 1) throw ConfigError("n", "must be >= 1");
  if (m < 0) throw ConfigError("m", "must be >= 0");
  if (p < 0) throw ConfigError("p", "must be >= 0");
  // Zero-sized dimensions serialize as [] or [[], ...].
  auto load = [&](const char* key, int rows, int cols) {
    const Json& v = field(j, key);
    if (rows == 0) return Matrix(0, cols);
    return matrix_from_json(v, rows, cols, key);
  };
  return LinearSystem(load("A", n, n), load("Psi", n, m), load("C", p, n));
}

Asc asc_from_json(const Json& j, int ambient) {
  const Json& kind = field(j, "kind");
  if (kind == "uniform") {
    const int s = int_field(j, "s");
    if (s < 0 || s > ambient) throw ConfigError("s", "must satisfy 0 <= s <= m");
    return Asc::uniform(ambient, s);
  }
  if (kind == "explicit") {
    const Json& faces = field(j, "maximal");
    if (!faces.is_array()) throw ConfigError("maximal", "must be an array of index arrays");
    std::vector<SupportSet> maximal;
    for (const Json& f : faces) {
      if (!f.is_array()) throw ConfigError("maximal", "each face must be an array");
      std::vector<int> idx;
      for (const Json& i : f) {
        if (!i.is_number_integer() || i.get<int>() < 0 || i.get<int>() >= ambient) {
          throw ConfigError("maximal", "indices must be integers in [0, m)");
        }
        idx.push_back(i.get<int>());
      }
      maximal.emplace_back(std::move(idx));
    }
    return Asc::explicit_faces(ambient, std::move(maximal));
  }
  throw ConfigError("kind", "must be \"uniform\" or \"explicit\"");
}

Json asc_to_json(const Asc& a) {
  if (a.is_uniform()) return Json{{"kind", "uniform"}, {"s", a.uniform_s()}};
  Json faces = Json::array();
  for (const auto& f : a.explicit_maximal()) faces.push_back(f.indices());
  return Json{{"kind", "explicit"}, {"maximal", faces}};
}

Json nsc_to_json(const NscInterval& x) {
  Json j{{"lo", x.lo},
         {"hi", x.hi},
         {"classification", to_string(x.classification)},
         {"supports_examined", x.supports_examined}};
  if (x.witness) {
    j["witness_support"] = x.witness->support.indices();
    j["witness_vector"] = vector_to_json(x.witness->h);
  } else {
    j["witness_support"] = nullptr;
    j["witness_vector"] = nullptr;
  }
  return j;
}

Json recovery_to_json(const RecoveryResult& r) {
  return Json{{"status", to_string(r.status)},
              {"x0_hat", vector_to_json(r.x0_hat)},
              {"U_hat", vector_to_json(r.U_hat)},
              {"l1_value", r.l1_value},
              {"residual", r.residual}};
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  static const std::set<std::string> known{"seed",           "n_list",          "m",         "p_range",
                                           "s_range",        "N_policy",        "trials_per_system",
                                           "systems_per_cell", "input_amplitude", "x0_range", "nsc_tol",
                                           "recovery_tol",   "threads"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown field");
  }

  ExperimentConfig cfg;
  if (j.contains("seed")) {
    const Json& v = j["seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError("seed", "must be a non-negative integer");
    }
    cfg.seed = v.get<std::uint64_t>();
  }
  if (j.contains("n_list")) {
    const Json& v = j["n_list"];
    if (!v.is_array() || v.empty()) throw ConfigError("n_list", "must be a nonempty array of integers");
    cfg.n_list.clear();
    for (const Json& n : v) {
      if (!n.is_number_integer()) throw ConfigError("n_list", "entries must be integers");
      cfg.n_list.push_back(n.get<int>());
    }
  }
  if (j.contains("m")) cfg.m = int_field(j, "m");
  if (j.contains("p_range")) cfg.p_range = pair_field<int>(j["p_range"], "p_range");
  if (j.contains("s_range")) cfg.s_range = pair_field<int>(j["s_range"], "s_range");
  if (j.contains("N_policy")) {
    const Json& v = j["N_policy"];
    if (v.is_string() && v == "n") {
      cfg.horizon = 0;
    } else if (v.is_number_integer() && v.get<int>() >= 1) {
      cfg.horizon = v.get<int>();
    } else {
      throw ConfigError("N_policy", "must be \"n\" or a positive integer");
    }
  }
  if (j.contains("trials_per_system")) cfg.trials_per_system = int_field(j, "trials_per_system");
  if (j.contains("systems_per_cell")) cfg.systems_per_cell = int_field(j, "systems_per_cell");
  if (j.contains("input_amplitude")) cfg.input_amplitude = pair_field<double>(j["input_amplitude"], "input_amplitude");
  if (j.contains("x0_range")) cfg.x0_range = pair_field<double>(j["x0_range"], "x0_range");
  if (j.contains("nsc_tol")) cfg.nsc_tol = number(j["nsc_tol"], "nsc_tol");
  if (j.contains("recovery_tol")) cfg.recovery_tol = number(j["recovery_tol"], "recovery_tol");
  if (j.contains("threads")) cfg.threads = int_field(j, "threads");
  cfg.validate();
  return cfg;
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json j{{"seed", cfg.seed},
         {"n_list", cfg.n_list},
         {"m", cfg.m},
         {"p_range", cfg.p_range},
         {"s_range", cfg.s_range},
         {"trials_per_system", cfg.trials_per_system},
         {"systems_per_cell", cfg.systems_per_cell},
         {"input_amplitude", cfg.input_amplitude},
         {"x0_range", cfg.x0_range},
         {"nsc_tol", cfg.nsc_tol},
         {"recovery_tol", cfg.recovery_tol}};
  if (cfg.horizon > 0) {
    j["N_policy"] = cfg.horizon;
  } else {
    j["N_policy"] = "n";
  }
  return j;
}

}  // namespace sparselds
