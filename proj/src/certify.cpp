#include "sparselds/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "sparselds/errors.hpp"

namespace sparselds {
namespace {

Matrix columns(const Matrix& m, const SupportSet& s) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(s.size()));
  Eigen::Index c = 0;
  for (int j : s) out.col(c++) = m.col(j);
  return out;
}

bool full_column_rank(const Matrix& m, double rank_tol, double scale = 0.0) {
  return m.cols() == 0 || rank(m, rank_tol, scale) == m.cols();
}

// R = Pperp Gamma can cancel to rounding noise, so its rank cut is scaled by Gamma.
double r_scale(const BlockOperators& ops) { return ops.Gamma.norm(); }

}  // namespace

const char* to_string(NscClass c) {
  switch (c) {
    case NscClass::Below: return "Below";
    case NscClass::Near: return "Near";
    case NscClass::Above: return "Above";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "True";
    case Verdict::False: return "False";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "?";
}

const char* to_string(TightCase t) {
  switch (t) {
    case TightCase::UnobservableTight: return "UnobservableTight";
    case TightCase::FullRankC: return "FullRankC";
    case TightCase::Generic: return "Generic";
  }
  return "?";
}

NscClass classify(double lo, double hi, double tol) {
  if (hi < 0.5 - tol) return NscClass::Below;
  if (lo > 0.5 + tol) return NscClass::Above;
  return NscClass::Near;
}

std::pair<double, Vector> face_nsc(const Matrix& basis, const SupportSet& s, const LpOptions& lp_opts) {
  const Eigen::Index m = basis.rows();
  const Eigen::Index d = basis.cols();
  if (s.empty() || d == 0) return {0.0, d ? Vector(basis.col(0)) : Vector::Zero(m)};

  // Variables [z (free) | p >= 0 | q >= 0] with B z = p - q and sum(p + q) <= 1.
  LinearProgram lp = LinearProgram::nonnegative(d + 2 * m);
  lp.lower.head(d).setConstant(-kInf);
  lp.A_eq.resize(m, d + 2 * m);
  lp.A_eq << basis, -Matrix::Identity(m, m), Matrix::Identity(m, m);
  lp.b_eq = Vector::Zero(m);
  lp.A_ub = Matrix::Zero(1, d + 2 * m);
  lp.A_ub.rightCols(2 * m).setOnes();
  lp.b_ub = Vector::Ones(1);

  const auto& idx = s.indices();
  const std::size_t k = idx.size();
  double best = -1.0;
  Vector best_h = Vector::Zero(m);
  // h -> -h symmetry: fix the sign on the first index.
  const unsigned long long patterns = 1ULL << (k - 1);
  for (unsigned long long mask = 0; mask < patterns; ++mask) {
    lp.c.setZero();
    for (std::size_t t = 0; t < k; ++t) {
      const double sigma = (t > 0 && ((mask >> (t - 1)) & 1ULL)) ? -1.0 : 1.0;
      lp.c(d + idx[t]) = -sigma;
      lp.c(d + m + idx[t]) = sigma;
    }
    const LpSolution sol = solve_lp(lp, lp_opts);
    if (sol.status != LpStatus::Optimal) {
      throw SolverError(std::string("face LP not optimal: ") + to_string(sol.status));
    }
    const Vector h = basis * sol.x.head(d);
    const double total = h.lpNorm<1>();
    const double ratio = total > 1e-14 ? l1_on(h, s) / total : 0.0;
    if (ratio > best) {
      best = ratio;
      best_h = total > 1e-14 ? Vector(h / total) : Vector(basis.col(0) / basis.col(0).lpNorm<1>());
    }
  }
  return {best, best_h};
}

NscInterval nsc_interval(const Subspace& k, const Asc& delta, const NscOptions& opts) {
  if (k.ambient() != delta.ambient()) throw DimensionError("nsc: subspace and complex ambient mismatch");
  NscInterval out;
  if (k.dim() == 0) return out;

  const Matrix& basis = k.basis();
  const std::vector<SupportSet> faces = delta.maximal_faces();
  const bool threshold = opts.mode == NscMode::Threshold;

  // Singleton values bound every face: ||h_S||_1 <= sum_{i in S} nu_i ||h||_1.
  std::vector<double> nu(static_cast<std::size_t>(delta.ambient()), 0.0);
  std::vector<bool> covered(nu.size(), false);
  for (const auto& f : faces) {
    for (int i : f) covered[i] = true;
  }
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (!covered[i]) continue;
    const SupportSet single{static_cast<int>(i)};
    auto [v, h] = face_nsc(basis, single, opts.lp);
    nu[i] = v;
    ++out.supports_examined;
    if (v > out.lo || !out.witness) {
      out.lo = std::max(out.lo, v);
      out.witness = NscWitness{single, std::move(h)};
    }
  }
  auto upper = [&](const SupportSet& f) {
    double acc = 0.0;
    for (int i : f) acc += nu[i];
    return std::min(1.0, acc);
  };
  double global_ub = out.lo;
  for (const auto& f : faces) global_ub = std::max(global_ub, upper(f));

  if (threshold && global_ub < 0.5 - opts.tol) {
    out.hi = global_ub;
    out.classification = NscClass::Below;
    return out;
  }

  double pruned_hi = out.lo;
  for (const auto& f : faces) {
    if (f.size() <= 1) continue;
    const double ub = upper(f);
    if (ub <= out.lo) continue;
    if (threshold && ub < 0.5 - opts.tol) {
      pruned_hi = std::max(pruned_hi, ub);
      continue;
    }
    auto [v, h] = face_nsc(basis, f, opts.lp);
    ++out.supports_examined;
    if (v > out.lo) {
      out.lo = v;
      out.witness = NscWitness{f, std::move(h)};
    }
    if (threshold && out.lo > 0.5 + opts.tol) {
      out.hi = std::max(out.lo, global_ub);
      out.classification = NscClass::Above;
      return out;
    }
  }
  out.hi = threshold ? std::max(out.lo, pruned_hi) : out.lo;
  out.classification = classify(out.lo, out.hi, opts.tol);
  return out;
}

NscInterval nsc_matrix(const Matrix& theta, const Asc& delta, const NscOptions& opts) {
  return nsc_interval(kernel_basis(theta, opts.rank_tol), delta, opts);
}

Verdict gnup_holds(const NscInterval& x) {
  if (x.hi < 0.5) return Verdict::True;
  if (x.lo >= 0.5) return Verdict::False;
  return Verdict::Undetermined;
}

DeltaInjectivity delta_injective(const Matrix& theta, const Asc& delta, double rank_tol) {
  if (theta.cols() != delta.ambient()) throw DimensionError("delta_injective: ambient mismatch");
  const auto faces = delta.maximal_faces();
  std::set<SupportSet> seen;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    for (std::size_t j = i; j < faces.size(); ++j) {
      SupportSet u = set_union(faces[i], faces[j]);
      if (!seen.insert(u).second) continue;
      if (!full_column_rank(columns(theta, u), rank_tol)) {
        return {false, InjectivityWitness{faces[i], faces[j]}};
      }
    }
  }
  return {};
}

InjectivityReport joint_injectivity(const LinearSystem& sys, const Asc& delta, int horizon, double rank_tol,
                                    std::size_t cap) {
  if (delta.ambient() != sys.m()) throw DimensionError("joint_injectivity: complex ambient != m");
  const std::vector<SupportSet> block_unions = delta.maximal_pair_unions();
  double count = 1.0;
  for (int k = 0; k < horizon; ++k) count *= static_cast<double>(block_unions.size());
  if (count > static_cast<double>(cap)) {
    throw InstanceTooLarge("joint_injectivity: " + std::to_string(static_cast<long double>(count)) +
                           " support unions exceed cap " + std::to_string(cap));
  }

  const BlockOperators ops = build_operators(sys, horizon, rank_tol);
  InjectivityReport rep;
  rep.rank_identity = delta_injective(sys.C() * sys.Psi(), delta, rank_tol).injective;
  rep.projected = rank(ops.O, rank_tol) == ops.n;

  const Eigen::Index rows = ops.O.rows();
  for (ProductFaceIterator it(block_unions, horizon); !it.done(); it.advance()) {
    const SupportSet t = flatten(it.current(), ops.m);
    const Matrix gamma_t = columns(ops.Gamma, t);
    ++rep.unions_checked;

    if (!rep.rank_identity_violation) {
      Matrix joint(rows, ops.n + gamma_t.cols());
      joint << ops.O, gamma_t;
      if (rank(joint, rank_tol) != ops.n + rank(gamma_t, rank_tol)) {
        rep.rank_identity = false;
        rep.rank_identity_violation = it.current();
      }
    }
    if (!rep.projected_violation && !full_column_rank(columns(ops.R, t), rank_tol, r_scale(ops))) {
      rep.projected = false;
      rep.projected_violation = it.current();
    }
    if (rep.rank_identity_violation && rep.projected_violation) break;
  }
  return rep;
}

NscInterval product_nsc(const BlockOperators& ops, const Asc& delta, const NscOptions& opts, std::size_t cap) {
  if (delta.ambient() != ops.m) throw DimensionError("product_nsc: complex ambient != m");
  double count = 1.0;
  for (int k = 0; k < ops.horizon; ++k) count *= static_cast<double>(delta.maximal_face_count());
  if (count > static_cast<double>(cap)) {
    throw InstanceTooLarge("product_nsc: product complex has more than " + std::to_string(cap) + " faces");
  }
  return nsc_interval(kernel_basis(ops.R, opts.rank_tol, r_scale(ops)), Asc::product(delta, ops.horizon), opts);
}

Verdict joint_recoverability(const LinearSystem& sys, const Asc& delta, int horizon, const NscOptions& opts,
                             std::size_t cap) {
  const BlockOperators ops = build_operators(sys, horizon, opts.rank_tol);
  if (!observable(ops, opts.rank_tol)) return Verdict::False;
  return gnup_holds(product_nsc(ops, delta, opts, cap));
}

NscInterval necessary_condition(const LinearSystem& sys, const Asc& delta, const NscOptions& opts) {
  return nsc_matrix(sys.C() * sys.Psi(), delta, opts);
}

Subspace one_step_kernel(const LinearSystem& sys, double rank_tol) {
  const BlockOperators ops = build_operators(sys, 1, rank_tol);
  return kernel_basis(ops.R, rank_tol, r_scale(ops));
}

Subspace one_step_kernel_structural(const LinearSystem& sys, double rank_tol) {
  const Subspace ker_c = kernel_basis(sys.C(), rank_tol);
  const Subspace cak = subspace_image(sys.C() * sys.A(), ker_c, rank_tol);
  return subspace_preimage(sys.C() * sys.Psi(), cak, rank_tol);
}

NscInterval sufficient_condition(const LinearSystem& sys, const Asc& delta, const NscOptions& opts) {
  const Subspace direct = one_step_kernel(sys, opts.rank_tol);
  const Subspace structural = one_step_kernel_structural(sys, opts.rank_tol);
  if (!subspace_equal(direct, structural, 1e-8)) {
    throw Error("one-step kernel cross-check failed: dims " + std::to_string(direct.dim()) + " vs " +
                std::to_string(structural.dim()));
  }
  return nsc_interval(direct, delta, opts);
}

TightCase tight_case(const LinearSystem& sys, double tol) {
  if (rank(sys.C(), 1e-10) == sys.n()) return TightCase::FullRankC;
  const Subspace ker_c = kernel_basis(sys.C(), 1e-10);
  const Subspace image = subspace_image(sys.A(), ker_c, 1e-10);
  return subspace_contains(ker_c, image, tol) ? TightCase::UnobservableTight : TightCase::Generic;
}

Counterexample construct_counterexample(const LinearSystem& sys, const Asc& delta, int horizon,
                                        const NscWitness& witness) {
  const int m = sys.m();
  if (horizon < 1) throw DimensionError("counterexample needs horizon >= 1");
  if (witness.h.size() != m) throw DimensionError("witness vector must have length m");
  if (!delta.is_face(witness.support)) throw Error("witness support is not a face of the complex");
  const Vector& h = witness.h;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((sys.C() * sys.Psi() * h).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw Error("witness vector is not in ker(C Psi)");
  }
  const Vector on = restrict(h, witness.support);
  const Vector off = h - on;
  if (!(on.lpNorm<1>() > off.lpNorm<1>())) {
    throw Error("witness does not strictly violate the nullspace property");
  }

  Counterexample ce;
  ce.x0 = Vector::Zero(sys.n());
  ce.truth = Vector::Zero(static_cast<Eigen::Index>(horizon) * m);
  ce.alternative = Vector::Zero(static_cast<Eigen::Index>(horizon) * m);
  ce.truth.tail(m) = on;
  ce.alternative.tail(m) = -off;
  ce.truth_l1 = on.lpNorm<1>();
  ce.alternative_l1 = off.lpNorm<1>();
  return ce;
}

}  // namespace sparselds
