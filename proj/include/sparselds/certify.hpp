#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "sparselds/lds.hpp"
#include "sparselds/lpsolve.hpp"
#include "sparselds/sparsity.hpp"

namespace sparselds {

enum class NscClass { Below, Near, Above };
enum class NscMode { Full, Threshold };
enum class Verdict { True, False, Undetermined };
enum class TightCase { UnobservableTight, FullRankC, Generic };

const char* to_string(NscClass c);
const char* to_string(Verdict v);
const char* to_string(TightCase t);

struct NscOptions {
  // Half-width of the Near band around 1/2.
  double tol = 0.05;
  NscMode mode = NscMode::Full;
  // Relative singular-value cut used for every kernel/rank decision here.
  double rank_tol = 1e-10;
  LpOptions lp;
};

struct NscWitness {
  SupportSet support;
  // Kernel vector with ||h||_1 = 1 and ||h_S||_1 = lo.
  Vector h;
};

// Certified bounds on the nullspace constant
//   nsc(K, Δ) = max_{S in Δ} max_{h in K \ 0} ||h_S||_1 / ||h||_1.
struct NscInterval {
  double lo = 0.0;
  double hi = 0.0;
  NscClass classification = NscClass::Below;
  std::size_t supports_examined = 0;
  std::optional<NscWitness> witness;

  double midpoint() const { return 0.5 * (lo + hi); }
};

NscClass classify(double lo, double hi, double tol);

// max ||h_S||_1 over h in span(basis), ||h||_1 <= 1. Returns the maximizer.
// `basis` must be orthonormal with ambient rows.
std::pair<double, Vector> face_nsc(const Matrix& basis, const SupportSet& s, const LpOptions& lp = {});

NscInterval nsc_interval(const Subspace& k, const Asc& delta, const NscOptions& opts = {});
NscInterval nsc_matrix(const Matrix& theta, const Asc& delta, const NscOptions& opts = {});

// True iff hi < 1/2, False iff lo >= 1/2.
Verdict gnup_holds(const NscInterval& x);

struct InjectivityWitness {
  SupportSet first;
  SupportSet second;
};

struct DeltaInjectivity {
  bool injective = true;
  std::optional<InjectivityWitness> witness;
};

// ker Theta_{S ∪ S'} = 0 for every pair of faces.
DeltaInjectivity delta_injective(const Matrix& theta, const Asc& delta, double rank_tol = 1e-10);

struct InjectivityReport {
  // rank [O Gamma_T] = n + rank Gamma_T for all unions T, and C Psi Δ-injective.
  bool rank_identity = false;
  // ker O = 0 and Pperp Gamma Δ^N-injective.
  bool projected = false;
  std::optional<ProductSupport> rank_identity_violation;
  std::optional<ProductSupport> projected_violation;
  std::size_t unions_checked = 0;

  bool agree() const { return rank_identity == projected; }
};

inline constexpr std::size_t kDefaultCap = 1'000'000;

InjectivityReport joint_injectivity(const LinearSystem& sys, const Asc& delta, int horizon,
                                    double rank_tol = 1e-10, std::size_t cap = kDefaultCap);

// Exhaustive nsc of ker(Pperp_N Gamma_N) over the product complex Δ^N.
NscInterval product_nsc(const BlockOperators& ops, const Asc& delta, const NscOptions& opts = {},
                        std::size_t cap = kDefaultCap);

// observable(sys, N) and Pperp_N Gamma_N satisfies the Δ^N nullspace property.
Verdict joint_recoverability(const LinearSystem& sys, const Asc& delta, int horizon, const NscOptions& opts = {},
                             std::size_t cap = kDefaultCap);

// nsc(C Psi, Δ). Above certifies non-recoverability for every horizon.
NscInterval necessary_condition(const LinearSystem& sys, const Asc& delta, const NscOptions& opts = {});

// ker(Pperp_1 Gamma_1) computed directly.
Subspace one_step_kernel(const LinearSystem& sys, double rank_tol = 1e-10);
// (C Psi)^{-1} C A ker C.
Subspace one_step_kernel_structural(const LinearSystem& sys, double rank_tol = 1e-10);

// nsc(Pperp_1 Gamma_1, Δ). Below certifies recoverability for every horizon.
// Throws Error if the two kernel constructions disagree beyond 1e-8.
NscInterval sufficient_condition(const LinearSystem& sys, const Asc& delta, const NscOptions& opts = {});

TightCase tight_case(const LinearSystem& sys, double tol = 1e-8);

struct Counterexample {
  Vector x0;           // zero
  Vector truth;        // u_{N-1} = h_S, earlier inputs zero
  Vector alternative;  // u'_{N-1} = -h_{S^c}
  double truth_l1 = 0.0;
  double alternative_l1 = 0.0;
};

// Builds an entrywise Δ-sparse input that ℓ1 recovery cannot return, from a
// kernel vector h of C Psi with ||h_S||_1 > ||h_{S^c}||_1. Throws Error if
// the witness does not strictly violate the nullspace property.
Counterexample construct_counterexample(const LinearSystem& sys, const Asc& delta, int horizon,
                                        const NscWitness& witness);

}  // namespace sparselds
