#pragma once

#include "crnlyap/network.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace crnlyap {

/// Floating-point view of a network for repeated evaluation: stoichiometric
/// matrix, reactant exponents and rate constants as dense Eigen data.
class MassActionSystem {
public:
  explicit MassActionSystem(const Network& net);

  /// Reaction rates k_i * prod_j x_j^(v_ji). Accepts boundary states
  /// (entries equal to zero) with the convention 0^0 = 1; negative entries
  /// throw NegativeConcentration.
  Eigen::VectorXd rates(const Eigen::VectorXd& x) const;

  /// Species production rates: gamma * rates(x).
  Eigen::VectorXd rhs(const Eigen::VectorXd& x) const;

  /// Analytic Jacobian of rhs; requires a strictly positive state.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  const Eigen::MatrixXd& gamma() const { return gamma_; }
  const Eigen::MatrixXd& exponents() const { return exponents_; }
  const Eigen::VectorXd& rate_constants() const { return k_; }

private:
  Eigen::MatrixXd gamma_;      // n x r
  Eigen::MatrixXd exponents_;  // n x r, reactant coefficients
  Eigen::VectorXd k_;
  Eigen::Matrix<signed char, Eigen::Dynamic, Eigen::Dynamic> int_expo_;  // -1 if fractional
};

Eigen::VectorXd rate_vector(const Network& net, const Eigen::VectorXd& x);
Eigen::VectorXd rhs(const Network& net, const Eigen::VectorXd& x);
Eigen::MatrixXd jacobian(const Network& net, const Eigen::VectorXd& x);

struct IntegrateOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.0;       // 0 = unlimited
  double sample_every = 0.0;   // 0 = record every accepted step
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
};

struct Trajectory {
  std::vector<double> times;   // strictly increasing
  Eigen::MatrixXd states;      // one row per time, strictly positive
  StepStats stats;
};

/// Adaptive Dormand-Prince 5(4) integration on [0, t_end]. A proposed step is
/// halved whenever any state component would leave the positive orthant, so
/// every stored state is strictly positive. Samples are taken at multiples of
/// sample_every (cubic Hermite interpolation on accepted steps) plus t_end.
Trajectory integrate(const Network& net, const Eigen::VectorXd& x0, double t_end,
                     const IntegrateOptions& opts = {});

/// CSV with header "t,<species...>[,<extra_name>]", 17 significant digits.
std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& species,
                           const std::string& extra_name = "",
                           const std::vector<double>& extra_values = {});

}  // namespace crnlyap
