#pragma once

#include "crnlyap/network.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace crnlyap {

struct ComplexBalanceEntry {
  int complex_index = 0;
  std::string complex_text;  // e.g. "2 S1 + S2"
  double consumption = 0.0;  // total rate of reactions consuming the complex
  double production = 0.0;   // total rate of reactions producing it
  double residual = 0.0;     // consumption - production
};

struct ComplexBalanceReport {
  std::vector<ComplexBalanceEntry> per_complex;
  double max_abs_residual = 0.0;
  bool balanced = false;  // all |residual| <= tol * max(max rate, 1)
};

ComplexBalanceReport complex_balance_residuals(const Network& net, const Eigen::VectorXd& x_star,
                                               double tol = 1e-9);

struct VerifyResult {
  bool ok = false;
  double residual_norm = 0.0;  // infinity norm of rhs
};

/// True iff |rhs(x)|_inf <= tol * (1 + |rates(x)|_inf).
VerifyResult verify_equilibrium(const Network& net, const Eigen::VectorXd& x, double tol = 1e-9);

struct ClassEquilibrium {
  Eigen::VectorXd point;
  Eigen::VectorXd class_anchor;
  int newton_iterations = 0;
  double residual_norm = 0.0;
};

/// In-class equilibrium via the parametrization x = x_star .* exp(P y):
/// solves g(y) = P^T W (x_star .* exp(P y) - x0) = 0 by damped Newton with
/// Armijo backtracking on the strictly convex potential whose gradient is g.
/// `orth_basis` P spans the orthogonal complement of the reference network's
/// stoichiometric subspace; `weights` W is all-ones for a complex-balanced
/// network and the producing-matrix diagonal for a network generated from one.
ClassEquilibrium class_equilibrium(const Network& net, const Eigen::VectorXd& x_star,
                                   const Eigen::VectorXd& x0, const Eigen::MatrixXd& orth_basis,
                                   const Eigen::VectorXd& weights);

/// Convenience overload for a complex-balanced network analyzed against its
/// own subspace with unit weights.
ClassEquilibrium class_equilibrium(const Network& net, const Eigen::VectorXd& x_star,
                                   const Eigen::VectorXd& x0);

/// Locates a complex-balanced state, or nullopt when none exists. Uses the
/// graph-theoretic construction: a strictly positive kernel vector of the
/// complex-graph Laplacian per linkage class fixes the complex monomials up
/// to a class constant, and a consistent log-linear solve recovers the
/// concentrations. Everything is verified before returning.
std::optional<Eigen::VectorXd> find_complex_balanced(const Network& net);

/// In-class equilibrium from a positive start for networks whose trajectories
/// settle: integrates in growing chunks until the vector field is small, then
/// polishes with Newton restricted to the stoichiometric subspace (so the
/// result stays in the start's compatibility class). Returns nullopt when the
/// dynamics do not settle within the budget.
std::optional<Eigen::VectorXd> find_interior_equilibrium(const Network& net,
                                                         const Eigen::VectorXd& start);

}  // namespace crnlyap
