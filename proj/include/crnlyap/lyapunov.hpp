#pragma once

#include "crnlyap/cbp.hpp"
#include "crnlyap/dynamics.hpp"
#include "crnlyap/equilibria.hpp"
#include "crnlyap/network.hpp"
#include "crnlyap/structure.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace crnlyap {

/// Weighted pseudo-Helmholtz candidate
///   f(x) = sum_j d_j (x*_j - x_j - x_j ln(x*_j / x_j)),
/// normalized to vanish at the reference point. Weights are nonnegative;
/// zero weights drop a species from the sum.
class LyapunovCandidate {
public:
  LyapunovCandidate(Eigen::VectorXd weights, Eigen::VectorXd reference);

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;       // d_j ln(x_j / x*_j)
  Eigen::VectorXd hessian_diagonal(const Eigen::VectorXd& x) const;  // d_j / x_j

  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& reference() const { return reference_; }
  std::vector<int> active_set() const;  // indices with weight > 0

private:
  Eigen::VectorXd weights_;
  Eigen::VectorXd reference_;
};

/// Residual of sum_i k_i x^(v_i) (1 - exp{(v'_i - v_i)^T grad f(x)}) at one
/// interior point; the transformed term is evaluated in log space.
double pde_residual(const Network& net, const LyapunovCandidate& c, const Eigen::VectorXd& x);

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Box() = default;
  Box(Eigen::VectorXd lo_, Eigen::VectorXd hi_);
  static Box uniform(int n, double lo, double hi);
};

struct PdeResidualReport {
  Eigen::MatrixXd sample_points;  // one row per sample
  Eigen::VectorXd residuals;
  double max_abs_residual = 0.0;
  double scale = 1.0;  // largest monomial magnitude encountered
  double tolerance = 1e-9;
  bool passed = false;  // max_abs_residual <= tolerance * max(scale, 1)
};

/// Evaluates the residual at `samples` log-uniform points of the box drawn
/// with the given seed.
PdeResidualReport pde_residual_sweep(const Network& net, const LyapunovCandidate& c,
                                     const Box& region, int samples, std::uint64_t seed,
                                     double tol = 1e-9);

/// Partial-sum residuals along a path approaching a boundary point inside its
/// compatibility class: at each path point evaluates
///   sum_{i: v_i in set} k_i x^(v_i)
///     - sum_{i: v'_i in set} k_i x^(v_i) exp{(v'_i - v_i)^T grad f(x)}.
/// `complex_set` holds indices into net.complexes(). Throws PathNotInClass
/// when a path point leaves boundary_point + S by more than 1e-9.
Eigen::VectorXd boundary_residual(const Network& net, const LyapunovCandidate& c,
                                  const Eigen::VectorXd& boundary_point,
                                  const std::vector<int>& complex_set,
                                  const std::vector<Eigen::VectorXd>& path);

struct HessianVerdict {
  bool pass = false;
  double min_eigenvalue = 0.0;  // smallest restricted eigenvalue over all samples
  int samples = 0;
};

/// Checks B^T diag(d_j / x_j) B > 0 at log-uniform samples of the box, where
/// the columns of B span the stoichiometric subspace.
HessianVerdict hessian_check(const LyapunovCandidate& c, const Eigen::MatrixXd& subspace_basis,
                             const Box& region, int samples, std::uint64_t seed);

struct DissipationViolation {
  int sample = 0;
  std::string kind;  // "derivative", "uphill", "stationary-off-equilibrium"
  double amount = 0.0;
};

struct DissipationAudit {
  bool pass = false;
  double max_derivative = 0.0;  // largest grad f . rhs over samples
  double max_uphill = 0.0;      // largest increase between consecutive samples
  int stationary_samples = 0;   // samples with |derivative| below slack
  int samples = 0;
  std::vector<DissipationViolation> violations;
};

/// Along a stored trajectory checks (a) grad f(x)^T rhs(x) <= 1e-10 (1 + |f|)
/// at every sample, (b) sampled values nonincreasing up to 1e-7 (1 + |f|) per
/// step, and (c) near-stationary samples actually satisfy the equilibrium
/// test. Violations are reported, not thrown.
DissipationAudit dissipation_audit(const Network& net, const LyapunovCandidate& c,
                                   const Trajectory& traj);

enum class Verdict { Certified, Refuted, Inconclusive };

const char* verdict_name(Verdict v);

struct BoundarySpec {
  Eigen::VectorXd point;          // nonnegative with at least one zero entry
  std::vector<int> complex_set;   // indices into net.complexes()
  std::vector<Eigen::VectorXd> path;
};

struct BoundaryRecord {
  BoundarySpec spec;
  Eigen::VectorXd residuals;
};

struct CertifyOptions {
  std::optional<Box> region;  // default [0.1, 10]^n
  int samples = 1000;
  std::uint64_t seed = 42;
  double pde_tol = 1e-9;
  double t_end = 50.0;
  IntegrateOptions integrate;
  std::vector<Eigen::VectorXd> initials;  // default: 3 seeded draws from the region
  std::optional<Eigen::VectorXd> x_star_source;   // known equilibrium of the source
  std::optional<Eigen::VectorXd> override_weights;  // replaces the candidate weights (debug)
  std::vector<BoundarySpec> boundary;
};

struct DissipationRecord {
  Eigen::VectorXd initial;
  Eigen::VectorXd final_state;
  double initial_value = 0.0;
  double final_value = 0.0;
  DissipationAudit audit;
  bool integrated = false;
  std::string failure;  // populated when integration failed
};

struct CertificationReport {
  StructureSummary structural;
  ComplexBalanceReport source_balance;
  Eigen::VectorXd x_star_source;
  Eigen::VectorXd reference;  // D^-1 x*
  Eigen::VectorXd weights;
  PdeResidualReport pde;
  std::vector<BoundaryRecord> boundary;
  HessianVerdict hessian;
  std::vector<DissipationRecord> dissipation;
  Verdict verdict = Verdict::Inconclusive;
  Box region;
};

/// Full certification pipeline for the weighted pseudo-Helmholtz candidate.
/// Either `net` is complex balanced itself (no source, unit weights) or
/// (source, d) are given and cbp_generate(source, d) must reproduce `net`
/// canonically. Throws SourceNotComplexBalanced / StructuralMismatch when the
/// preconditions fail; check outcomes land in the report verdict instead.
CertificationReport certify(const Network& net, const std::optional<Network>& source,
                            const std::optional<ProducingMatrix>& d,
                            const CertifyOptions& opts = {});

/// Log-uniform sample of a box, `count` rows; deterministic across platforms
/// for a given seed.
Eigen::MatrixXd log_uniform_samples(const Box& region, int count, std::uint64_t seed);

}  // namespace crnlyap
