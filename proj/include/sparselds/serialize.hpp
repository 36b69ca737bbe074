#pragma once

#include <string>

#include "json.hpp"
#include "sparselds/certify.hpp"
#include "sparselds/experiments.hpp"
#include "sparselds/lds.hpp"
#include "sparselds/recovery.hpp"

namespace sparselds {

using Json = nlohmann::json;

// {"n":…, "m":…, "p":…, "A":[[…]], "Psi":[[…]], "C":[[…]]}
Json system_to_json(const LinearSystem& sys);
LinearSystem system_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols, const std::string& field);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& field);

// {"kind":"uniform","s":3} or {"kind":"explicit","maximal":[[0,1],[2,5]]}
Asc asc_from_json(const Json& j, int ambient);
Json asc_to_json(const Asc& a);

// {lo, hi, classification, witness_support, witness_vector, supports_examined}
Json nsc_to_json(const NscInterval& x);

Json recovery_to_json(const RecoveryResult& r);

ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& cfg);

}  // namespace sparselds
