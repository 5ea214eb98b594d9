#include "crnlyap/equilibria.hpp"

#include "crnlyap/dynamics.hpp"
#include "crnlyap/error.hpp"
#include "crnlyap/structure.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace crnlyap {

ComplexBalanceReport complex_balance_residuals(const Network& net, const Eigen::VectorXd& x_star,
                                               double tol) {
  Eigen::VectorXd rates = rate_vector(net, x_star);
  ComplexBalanceReport report;
  report.per_complex.resize(net.num_complexes());
  for (int c = 0; c < net.num_complexes(); ++c) report.per_complex[c].complex_index = c;
  for (int i = 0; i < net.num_reactions(); ++i) {
    report.per_complex[net.reactant_complex(i)].consumption += rates[i];
    report.per_complex[net.product_complex(i)].production += rates[i];
  }
  double max_rate = rates.size() > 0 ? rates.maxCoeff() : 0.0;
  for (auto& entry : report.per_complex) {
    entry.residual = entry.consumption - entry.production;
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(entry.residual));
  }
  report.balanced = report.max_abs_residual <= tol * std::max(max_rate, 1.0);
  return report;
}

VerifyResult verify_equilibrium(const Network& net, const Eigen::VectorXd& x, double tol) {
  MassActionSystem sys(net);
  Eigen::VectorXd rates = sys.rates(x);
  double residual = (sys.gamma() * rates).lpNorm<Eigen::Infinity>();
  double scale = 1.0 + rates.lpNorm<Eigen::Infinity>();
  return VerifyResult{residual <= tol * scale, residual};
}

ClassEquilibrium class_equilibrium(const Network& net, const Eigen::VectorXd& x_star,
                                   const Eigen::VectorXd& x0, const Eigen::MatrixXd& orth_basis,
                                   const Eigen::VectorXd& weights) {
  for (Eigen::Index j = 0; j < x0.size(); ++j)
    if (!(x0[j] > 0.0))
      throw Error(ErrorCode::NonPositiveInitial, "class anchor must be strictly positive");
  VerifyResult ref = verify_equilibrium(net, x_star, 1e-9);
  if (!ref.ok)
    throw Error(ErrorCode::NotAnEquilibriumReference,
                "reference point has rhs residual " + std::to_string(ref.residual_norm));

  const Eigen::MatrixXd& P = orth_basis;
  ClassEquilibrium result;
  result.class_anchor = x0;
  if (P.cols() == 0) {
    // full-rank stoichiometric subspace: the class is the whole orthant
    result.point = x_star;
    return result;
  }

  const Eigen::VectorXd wx0 = weights.cwiseProduct(x0);
  const Eigen::VectorXd target = P.transpose() * wx0;
  auto potential = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd x = x_star.cwiseProduct((P * y).array().exp().matrix());
    return weights.cwiseProduct(x).sum() - target.dot(y);
  };

  Eigen::VectorXd y = Eigen::VectorXd::Zero(P.cols());
  const double gtol = 1e-12 * (1.0 + x0.lpNorm<Eigen::Infinity>());
  const int max_iterations = 200;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd x = x_star.cwiseProduct((P * y).array().exp().matrix());
    Eigen::VectorXd g = P.transpose() * (weights.cwiseProduct(x) - wx0);
    result.residual_norm = g.lpNorm<Eigen::Infinity>();
    result.newton_iterations = it;
    if (result.residual_norm <= gtol) {
      result.point = x;
      return result;
    }
    Eigen::MatrixXd H = P.transpose() * weights.cwiseProduct(x).asDiagonal() * P;
    // mild regularization keeps the step finite when the iterate wanders into
    // the flat region where all monomials are tiny
    H.diagonal().array() += 1e-14 * (1.0 + H.trace());
    Eigen::VectorXd step = H.llt().solve(-g);
    if (!step.allFinite())
      throw Error(ErrorCode::NewtonDivergence, "singular Newton system at iteration " +
                                                   std::to_string(it));
    // Armijo backtracking on the convex potential; once the Newton decrement
    // drops below the resolution of the potential the full step is taken
    // unguarded (the quadratic phase cannot diverge on a convex objective)
    double phi0 = potential(y);
    double slope = g.dot(step);
    double t = 1.0;
    if (-slope > 1e-10 * (1.0 + std::abs(phi0))) {
      while (t > 1e-14) {
        double phi = potential(y + t * step);
        if (std::isfinite(phi) && phi <= phi0 + 1e-4 * t * slope) break;
        t *= 0.5;
      }
      if (t <= 1e-14)
        throw Error(ErrorCode::NewtonDivergence, "line search stalled at iteration " +
                                                     std::to_string(it));
    }
    y += t * step;
  }
  throw Error(ErrorCode::NewtonDivergence,
              "no convergence in " + std::to_string(max_iterations) + " iterations");
}

ClassEquilibrium class_equilibrium(const Network& net, const Eigen::VectorXd& x_star,
                                   const Eigen::VectorXd& x0) {
  StructureSummary s = structure(net);
  return class_equilibrium(net, x_star, x0, to_double(s.orthogonal_basis),
                           Eigen::VectorXd::Ones(net.num_species()));
}

std::optional<Eigen::VectorXd> find_complex_balanced(const Network& net) {
  const int n = net.num_species();
  const int m = net.num_complexes();

  // Laplacian of the labeled complex graph: column c holds the outflow of
  // complex c, so A * psi = 0 expresses complex balance for the monomial
  // vector psi_c = x^(z_c).
  Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < net.num_reactions(); ++i) {
    int a = net.reactant_complex(i);
    int b = net.product_complex(i);
    double k = net.reactions()[i].rate;
    laplacian(a, a) -= k;
    laplacian(b, a) += k;
  }

  std::vector<int> component(m, -1);
  {
    std::vector<std::vector<int>> neighbors(m);
    for (int i = 0; i < net.num_reactions(); ++i) {
      neighbors[net.reactant_complex(i)].push_back(net.product_complex(i));
      neighbors[net.product_complex(i)].push_back(net.reactant_complex(i));
    }
    int classes = 0;
    for (int c = 0; c < m; ++c) {
      if (component[c] >= 0) continue;
      std::vector<int> stack = {c};
      component[c] = classes;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : neighbors[v])
          if (component[w] < 0) {
            component[w] = classes;
            stack.push_back(w);
          }
      }
      ++classes;
    }
  }
  int num_classes = *std::max_element(component.begin(), component.end()) + 1;

  // one strictly positive kernel vector per linkage class
  Eigen::VectorXd log_psi(m);
  for (int cls = 0; cls < num_classes; ++cls) {
    std::vector<int> members;
    for (int c = 0; c < m; ++c)
      if (component[c] == cls) members.push_back(c);
    const int sz = static_cast<int>(members.size());
    Eigen::MatrixXd block(sz, sz);
    for (int a = 0; a < sz; ++a)
      for (int b = 0; b < sz; ++b) block(a, b) = laplacian(members[a], members[b]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
    lu.setThreshold(1e-12);
    if (lu.dimensionOfKernel() != 1) return std::nullopt;
    Eigen::VectorXd psi = lu.kernel().col(0);
    if (psi.maxCoeff() < -psi.minCoeff()) psi = -psi;
    if (psi.minCoeff() <= 1e-9 * psi.maxCoeff()) return std::nullopt;  // not strictly positive
    for (int a = 0; a < sz; ++a) log_psi[members[a]] = std::log(psi[a]);
  }

  // solve (z_c - z_ref)^T u = log(psi_c / psi_ref) within each class
  std::vector<int> reference(num_classes, -1);
  std::vector<std::pair<int, int>> equations;  // (complex, its class reference)
  for (int c = 0; c < m; ++c) {
    if (reference[component[c]] < 0)
      reference[component[c]] = c;
    else
      equations.emplace_back(c, reference[component[c]]);
  }
  Eigen::MatrixXd coeffs(equations.size(), n);
  Eigen::VectorXd target(equations.size());
  Eigen::MatrixXd complex_matrix(m, n);
  for (int c = 0; c < m; ++c)
    for (int j = 0; j < n; ++j) complex_matrix(c, j) = to_double(net.complexes()[c][j]);
  for (size_t e = 0; e < equations.size(); ++e) {
    auto [c, ref] = equations[e];
    coeffs.row(static_cast<Eigen::Index>(e)) = complex_matrix.row(c) - complex_matrix.row(ref);
    target[static_cast<Eigen::Index>(e)] = log_psi[c] - log_psi[ref];
  }

  Eigen::VectorXd u = coeffs.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(target);
  if ((coeffs * u - target).lpNorm<Eigen::Infinity>() >
      1e-9 * (1.0 + target.lpNorm<Eigen::Infinity>()))
    return std::nullopt;  // kernel ratios not realizable by any concentration

  Eigen::VectorXd x = u.array().exp();
  if (!complex_balance_residuals(net, x, 1e-10).balanced) return std::nullopt;
  return x;
}

std::optional<Eigen::VectorXd> find_interior_equilibrium(const Network& net,
                                                         const Eigen::VectorXd& start) {
  for (Eigen::Index j = 0; j < start.size(); ++j)
    if (!(start[j] > 0.0)) return std::nullopt;
  MassActionSystem sys(net);

  auto settled = [&](const Eigen::VectorXd& x, double tol) {
    return sys.rhs(x).lpNorm<Eigen::Infinity>() <=
           tol * (1.0 + sys.rates(x).lpNorm<Eigen::Infinity>());
  };

  // follow the flow until the vector field is small
  Eigen::VectorXd x = start;
  double horizon = 10.0;
  for (int chunk = 0; chunk < 8 && !settled(x, 1e-8); ++chunk) {
    try {
      Trajectory traj = integrate(net, x, horizon);
      x = traj.states.row(traj.states.rows() - 1);
    } catch (const Error&) {
      return std::nullopt;
    }
    horizon *= 4.0;
  }
  if (!settled(x, 1e-6)) return std::nullopt;

  // Newton polish restricted to the stoichiometric subspace, which keeps the
  // iterate in the compatibility class of the start
  StructureSummary s = structure(net);
  Eigen::MatrixXd basis = to_double(s.subspace_basis);
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd f = sys.rhs(x);
    double scale = 1.0 + sys.rates(x).lpNorm<Eigen::Infinity>();
    if (f.lpNorm<Eigen::Infinity>() <= 1e-14 * scale) break;
    Eigen::MatrixXd h = basis.transpose() * sys.jacobian(x) * basis;
    Eigen::VectorXd g = basis.transpose() * f;
    Eigen::VectorXd step = basis * h.fullPivLu().solve(-g);
    if (!step.allFinite()) break;
    double t = 1.0;
    double f0 = f.squaredNorm();
    while (t > 1e-12) {
      Eigen::VectorXd x_new = x + t * step;
      if ((x_new.array() > 0.0).all() && sys.rhs(x_new).squaredNorm() < f0) {
        x = x_new;
        break;
      }
      t *= 0.5;
    }
    if (t <= 1e-12) break;
  }

  if (!verify_equilibrium(net, x, 1e-12).ok) return std::nullopt;
  return x;
}

}  // namespace crnlyap
