#include "crnlyap/lyapunov.hpp"

#include "crnlyap/error.hpp"
#include "crnlyap/parse.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace crnlyap {

namespace {

constexpr double kDerivativeSlack = 1e-10;  // per unit of 1 + |f|
constexpr double kUphillSlack = 1e-7;       // per unit of 1 + |f|
constexpr double kStrictRhsFloor = 1e-8;    // rhs norm above which descent must be strict
constexpr double kPdFloor = 1e-12;          // relative eigenvalue floor for PD verdicts

void require_positive(const Eigen::VectorXd& x, const char* what) {
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (!(x[j] > 0.0))
      throw Error(ErrorCode::NegativeConcentration,
                  std::string(what) + " must be strictly positive");
}

}  // namespace

LyapunovCandidate::LyapunovCandidate(Eigen::VectorXd weights, Eigen::VectorXd reference)
    : weights_(std::move(weights)), reference_(std::move(reference)) {
  if (weights_.size() != reference_.size())
    throw Error(ErrorCode::LengthMismatch, "weights and reference point differ in length");
  for (Eigen::Index j = 0; j < weights_.size(); ++j)
    if (weights_[j] < 0.0)
      throw Error(ErrorCode::NonpositiveEntry, "candidate weights must be nonnegative");
  require_positive(reference_, "reference point");
}

double LyapunovCandidate::value(const Eigen::VectorXd& x) const {
  require_positive(x, "state");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (weights_[j] == 0.0) continue;
    sum += weights_[j] * (reference_[j] - x[j] - x[j] * std::log(reference_[j] / x[j]));
  }
  return sum;
}

Eigen::VectorXd LyapunovCandidate::gradient(const Eigen::VectorXd& x) const {
  require_positive(x, "state");
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j)
    g[j] = weights_[j] == 0.0 ? 0.0 : weights_[j] * std::log(x[j] / reference_[j]);
  return g;
}

Eigen::VectorXd LyapunovCandidate::hessian_diagonal(const Eigen::VectorXd& x) const {
  require_positive(x, "state");
  return weights_.cwiseQuotient(x);
}

std::vector<int> LyapunovCandidate::active_set() const {
  std::vector<int> active;
  for (Eigen::Index j = 0; j < weights_.size(); ++j)
    if (weights_[j] > 0.0) active.push_back(static_cast<int>(j));
  return active;
}

namespace {

struct PdePoint {
  double residual = 0.0;
  double scale = 0.0;
};

PdePoint pde_point(const MassActionSystem& sys, const LyapunovCandidate& c,
                   const Eigen::VectorXd& x) {
  require_positive(x, "state");
  Eigen::VectorXd g = c.gradient(x);
  Eigen::VectorXd lnx = x.array().log();
  Eigen::VectorXd w = sys.gamma().transpose() * g;            // (v' - v)^T grad f
  Eigen::VectorXd lnm = sys.exponents().transpose() * lnx;    // sum_j v_ji ln x_j
  Eigen::VectorXd monomials = sys.rates(x);

  PdePoint out;
  for (Eigen::Index i = 0; i < monomials.size(); ++i) {
    double transformed = std::exp(std::log(sys.rate_constants()[i]) + lnm[i] + w[i]);
    out.residual += monomials[i] - transformed;
    out.scale = std::max({out.scale, monomials[i], transformed});
  }
  return out;
}

}  // namespace

double pde_residual(const Network& net, const LyapunovCandidate& c, const Eigen::VectorXd& x) {
  return pde_point(MassActionSystem(net), c, x).residual;
}

Box::Box(Eigen::VectorXd lo_, Eigen::VectorXd hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size())
    throw Error(ErrorCode::InvalidRegion, "box bounds differ in length");
  for (Eigen::Index j = 0; j < lo.size(); ++j)
    if (!(lo[j] > 0.0) || !(lo[j] < hi[j]))
      throw Error(ErrorCode::InvalidRegion, "box must satisfy 0 < lo < hi componentwise");
}

Box Box::uniform(int n, double lo, double hi) {
  return Box(Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi));
}

Eigen::MatrixXd log_uniform_samples(const Box& region, int count, std::uint64_t seed) {
  const auto n = region.lo.size();
  Eigen::MatrixXd points(count, n);
  std::mt19937_64 rng(seed);
  // uniform in [0,1) from the top 53 bits, identical on every platform
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int s = 0; s < count; ++s)
    for (Eigen::Index j = 0; j < n; ++j) {
      double llo = std::log(region.lo[j]);
      double lhi = std::log(region.hi[j]);
      points(s, j) = std::exp(llo + uniform() * (lhi - llo));
    }
  return points;
}

PdeResidualReport pde_residual_sweep(const Network& net, const LyapunovCandidate& c,
                                     const Box& region, int samples, std::uint64_t seed,
                                     double tol) {
  if (samples < 1) throw Error(ErrorCode::InvalidRegion, "need at least one sample");
  if (region.lo.size() != net.num_species())
    throw Error(ErrorCode::InvalidRegion, "box dimension does not match species count");

  MassActionSystem sys(net);
  PdeResidualReport report;
  report.tolerance = tol;
  report.sample_points = log_uniform_samples(region, samples, seed);
  report.residuals.resize(samples);
  report.scale = 0.0;
  for (int s = 0; s < samples; ++s) {
    PdePoint p = pde_point(sys, c, report.sample_points.row(s));
    report.residuals[s] = p.residual;
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(p.residual));
    report.scale = std::max(report.scale, p.scale);
  }
  report.passed = report.max_abs_residual <= tol * std::max(report.scale, 1.0);
  return report;
}

Eigen::VectorXd boundary_residual(const Network& net, const LyapunovCandidate& c,
                                  const Eigen::VectorXd& boundary_point,
                                  const std::vector<int>& complex_set,
                                  const std::vector<Eigen::VectorXd>& path) {
  bool has_zero = false;
  for (Eigen::Index j = 0; j < boundary_point.size(); ++j) {
    if (boundary_point[j] < 0.0)
      throw Error(ErrorCode::NegativeConcentration, "boundary point must be nonnegative");
    if (boundary_point[j] == 0.0) has_zero = true;
  }
  if (!has_zero)
    throw Error(ErrorCode::InvalidRegion, "boundary point needs at least one zero entry");
  for (int idx : complex_set)
    if (idx < 0 || idx >= net.num_complexes())
      throw Error(ErrorCode::InvalidRegion, "complex index out of range");

  MassActionSystem sys(net);
  StructureSummary s = structure(net);
  Eigen::MatrixXd basis = to_double(s.subspace_basis);
  const bool full_rank = s.stoich_rank == net.num_species();

  std::vector<bool> in_set(net.num_complexes(), false);
  for (int idx : complex_set) in_set[idx] = true;

  Eigen::VectorXd residuals(path.size());
  for (size_t p = 0; p < path.size(); ++p) {
    const Eigen::VectorXd& x = path[p];
    require_positive(x, "path point");
    if (!full_rank) {
      Eigen::VectorXd delta = x - boundary_point;
      Eigen::VectorXd proj = basis * basis.colPivHouseholderQr().solve(delta);
      double off = (delta - proj).lpNorm<Eigen::Infinity>();
      if (off > 1e-9 * (1.0 + delta.lpNorm<Eigen::Infinity>()))
        throw Error(ErrorCode::PathNotInClass,
                    "path point " + std::to_string(p) + " leaves the compatibility class by " +
                        std::to_string(off));
    }

    Eigen::VectorXd g = c.gradient(x);
    Eigen::VectorXd w = sys.gamma().transpose() * g;
    Eigen::VectorXd monomials = sys.rates(x);
    double value = 0.0;
    for (int i = 0; i < net.num_reactions(); ++i) {
      if (in_set[net.reactant_complex(i)]) value += monomials[i];
      if (in_set[net.product_complex(i)]) value -= monomials[i] * std::exp(w[i]);
    }
    residuals[static_cast<Eigen::Index>(p)] = value;
  }
  return residuals;
}

HessianVerdict hessian_check(const LyapunovCandidate& c, const Eigen::MatrixXd& subspace_basis,
                             const Box& region, int samples, std::uint64_t seed) {
  const auto k = subspace_basis.cols();
  if (k > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(subspace_basis);
    if (qr.rank() < k)
      throw Error(ErrorCode::DegenerateBasis, "subspace basis columns are dependent");
  }

  HessianVerdict verdict;
  verdict.samples = samples;
  if (k == 0) {  // nothing to restrict to
    verdict.pass = true;
    verdict.min_eigenvalue = std::numeric_limits<double>::infinity();
    return verdict;
  }

  Eigen::MatrixXd points = log_uniform_samples(region, samples, seed);
  verdict.pass = true;
  verdict.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x = points.row(s);
    Eigen::MatrixXd m =
        subspace_basis.transpose() * c.hessian_diagonal(x).asDiagonal() * subspace_basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(m, Eigen::EigenvaluesOnly);
    double lo = eigs.eigenvalues().minCoeff();
    double hi = eigs.eigenvalues().cwiseAbs().maxCoeff();
    verdict.min_eigenvalue = std::min(verdict.min_eigenvalue, lo);
    if (!(lo > kPdFloor * hi)) verdict.pass = false;
  }
  return verdict;
}

DissipationAudit dissipation_audit(const Network& net, const LyapunovCandidate& c,
                                   const Trajectory& traj) {
  MassActionSystem sys(net);
  DissipationAudit audit;
  audit.samples = static_cast<int>(traj.times.size());
  audit.pass = true;
  audit.max_derivative = -std::numeric_limits<double>::infinity();

  double prev_value = 0.0;
  for (int s = 0; s < audit.samples; ++s) {
    Eigen::VectorXd x = traj.states.row(s);
    double value = c.value(x);
    Eigen::VectorXd f = sys.rhs(x);
    double deriv = c.gradient(x).dot(f);
    double slack = kDerivativeSlack * (1.0 + std::abs(value));
    audit.max_derivative = std::max(audit.max_derivative, deriv);

    if (deriv > slack) {
      audit.violations.push_back({s, "derivative", deriv});
      audit.pass = false;
    }
    double rhs_norm = f.lpNorm<Eigen::Infinity>();
    if (rhs_norm > kStrictRhsFloor && deriv >= 0.0) {
      audit.violations.push_back({s, "nonstrict", deriv});
      audit.pass = false;
    }
    if (std::abs(deriv) <= slack) {
      ++audit.stationary_samples;
      // the derivative is quadratically small in the distance to an
      // equilibrium, so the equilibrium test gets the square-root tolerance
      double eq_tol = std::sqrt(kDerivativeSlack * (1.0 + std::abs(value)));
      if (!verify_equilibrium(net, x, eq_tol).ok) {
        audit.violations.push_back({s, "stationary-off-equilibrium", rhs_norm});
        audit.pass = false;
      }
    }
    if (s > 0) {
      double uphill = value - prev_value;
      audit.max_uphill = std::max(audit.max_uphill, uphill);
      if (uphill > kUphillSlack * (1.0 + std::abs(prev_value))) {
        audit.violations.push_back({s, "uphill", uphill});
        audit.pass = false;
      }
    }
    prev_value = value;
  }
  return audit;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::Refuted: return "refuted";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

CertificationReport certify(const Network& net, const std::optional<Network>& source,
                            const std::optional<ProducingMatrix>& d, const CertifyOptions& opts) {
  const int n = net.num_species();

  CertificationReport report;
  report.structural = structure(net);
  report.region = opts.region.value_or(Box::uniform(n, 0.1, 10.0));
  if (report.region.lo.size() != n)
    throw Error(ErrorCode::InvalidRegion, "region dimension does not match species count");

  // Resolve the generating pair. Without a source the network is treated as
  // its own complex-balanced source with an identity producing matrix.
  const Network& src = source ? *source : net;
  ProducingMatrix producing = d ? *d : ProducingMatrix::identity(n);
  if (source) {
    CbpResult generated = cbp_generate(src, producing, CbpMode::AllowFractional);
    if (print_network(generated.network) != print_network(net))
      throw Error(ErrorCode::StructuralMismatch,
                  "the producing matrix does not map the source onto this network");
  } else if (!producing.is_identity()) {
    throw Error(ErrorCode::StructuralMismatch,
                "a non-identity producing matrix requires a source network");
  }

  Eigen::VectorXd x_star;
  if (opts.x_star_source) {
    x_star = *opts.x_star_source;
  } else {
    auto found = find_complex_balanced(src);
    if (!found)
      throw Error(ErrorCode::SourceNotComplexBalanced,
                  "no complex-balanced equilibrium located for the source network");
    x_star = *found;
  }
  report.source_balance = complex_balance_residuals(src, x_star, 1e-9);
  if (!report.source_balance.balanced)
    throw Error(ErrorCode::SourceNotComplexBalanced,
                "source network is not complex balanced at the reference point");
  report.x_star_source = x_star;

  report.reference = map_equilibrium(x_star, producing, MapDirection::ToCbp);
  report.weights = opts.override_weights.value_or(producing.to_double_vector());
  LyapunovCandidate candidate(report.weights, report.reference);

  report.pde = pde_residual_sweep(net, candidate, report.region, opts.samples, opts.seed,
                                  opts.pde_tol);
  report.hessian = hessian_check(candidate, to_double(report.structural.subspace_basis),
                                 report.region, opts.samples, opts.seed);

  std::vector<Eigen::VectorXd> initials = opts.initials;
  if (initials.empty()) {
    Eigen::MatrixXd draws = log_uniform_samples(report.region, 3, opts.seed ^ 0x9e3779b97f4a7c15ull);
    for (int i = 0; i < draws.rows(); ++i) initials.push_back(draws.row(i));
  }

  IntegrateOptions int_opts = opts.integrate;
  if (int_opts.sample_every <= 0.0) int_opts.sample_every = opts.t_end / 200.0;
  bool incomplete = false;
  for (const Eigen::VectorXd& x0 : initials) {
    DissipationRecord rec;
    rec.initial = x0;
    rec.initial_value = candidate.value(x0);
    try {
      Trajectory traj = integrate(net, x0, opts.t_end, int_opts);
      rec.integrated = true;
      rec.final_state = traj.states.row(traj.states.rows() - 1);
      rec.final_value = candidate.value(rec.final_state);
      rec.audit = dissipation_audit(net, candidate, traj);
    } catch (const Error& e) {
      rec.failure = e.what();
      incomplete = true;
    }
    report.dissipation.push_back(std::move(rec));
  }

  for (const BoundarySpec& spec : opts.boundary) {
    BoundaryRecord rec;
    rec.spec = spec;
    rec.residuals = boundary_residual(net, candidate, spec.point, spec.complex_set, spec.path);
    report.boundary.push_back(std::move(rec));
  }

  bool dissipation_ok = true;
  bool dissipation_failed = false;
  for (const DissipationRecord& rec : report.dissipation) {
    if (!rec.integrated)
      dissipation_ok = false;
    else if (!rec.audit.pass) {
      dissipation_ok = false;
      dissipation_failed = true;
    }
  }

  if (report.pde.passed && report.hessian.pass && dissipation_ok && !incomplete)
    report.verdict = Verdict::Certified;
  else if (!report.pde.passed || !report.hessian.pass || dissipation_failed)
    report.verdict = Verdict::Refuted;
  else
    report.verdict = Verdict::Inconclusive;
  return report;
}

}  // namespace crnlyap
