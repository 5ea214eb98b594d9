#include "crnlyap/dynamics.hpp"

#include "crnlyap/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace crnlyap {

namespace {

double int_power(double x, int e) {
  double result = 1.0;
  double base = x;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

}  // namespace

MassActionSystem::MassActionSystem(const Network& net) {
  const int n = net.num_species();
  const int r = net.num_reactions();
  gamma_.resize(n, r);
  exponents_.resize(n, r);
  int_expo_.resize(n, r);
  k_.resize(r);
  for (int i = 0; i < r; ++i) {
    const Reaction& rxn = net.reactions()[i];
    k_[i] = rxn.rate;
    for (int j = 0; j < n; ++j) {
      const Rational& v = rxn.reactant[j];
      gamma_(j, i) = to_double(rxn.product[j] - v);
      exponents_(j, i) = to_double(v);
      int_expo_(j, i) = (v.is_integer() && v.num() >= 0 && v.num() <= 64)
                            ? static_cast<signed char>(v.num())
                            : static_cast<signed char>(-1);
    }
  }
}

Eigen::VectorXd MassActionSystem::rates(const Eigen::VectorXd& x) const {
  const auto n = exponents_.rows();
  const auto r = exponents_.cols();
  for (Eigen::Index j = 0; j < n; ++j)
    if (x[j] < 0.0)
      throw Error(ErrorCode::NegativeConcentration,
                  "state entry " + std::to_string(j) + " is negative");
  Eigen::VectorXd out(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    double m = k_[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      double e = exponents_(j, i);
      if (e == 0.0) continue;  // 0^0 = 1
      int ie = int_expo_(j, i);
      m *= ie >= 0 ? int_power(x[j], ie) : std::pow(x[j], e);
    }
    out[i] = m;
  }
  return out;
}

Eigen::VectorXd MassActionSystem::rhs(const Eigen::VectorXd& x) const {
  return gamma_ * rates(x);
}

Eigen::MatrixXd MassActionSystem::jacobian(const Eigen::VectorXd& x) const {
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (!(x[j] > 0.0))
      throw Error(ErrorCode::NegativeConcentration,
                  "jacobian needs a strictly positive state");
  // d(rhs)_i / dx_j = sum_m gamma_im * v_jm * R_m / x_j
  Eigen::VectorXd r = rates(x);
  return gamma_ * r.asDiagonal() * exponents_.transpose() * x.cwiseInverse().asDiagonal();
}

Eigen::VectorXd rate_vector(const Network& net, const Eigen::VectorXd& x) {
  return MassActionSystem(net).rates(x);
}

Eigen::VectorXd rhs(const Network& net, const Eigen::VectorXd& x) {
  return MassActionSystem(net).rhs(x);
}

Eigen::MatrixXd jacobian(const Network& net, const Eigen::VectorXd& x) {
  return MassActionSystem(net).jacobian(x);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kC[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
// kB5 equals the last tableau row (FSAL); kE = b5 - b4 gives the error estimate.
constexpr double kE[7] = {71.0 / 57600,      0.0,          -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525,   -1.0 / 40};

Eigen::VectorXd hermite(double t0, const Eigen::VectorXd& y0, const Eigen::VectorXd& f0,
                        double t1, const Eigen::VectorXd& y1, const Eigen::VectorXd& f1,
                        double s) {
  double h = t1 - t0;
  double u = (s - t0) / h;
  double u2 = u * u;
  double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * f0 +
         (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * f1;
}

}  // namespace

Trajectory integrate(const Network& net, const Eigen::VectorXd& x0, double t_end,
                     const IntegrateOptions& opts) {
  if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidRegion, "t_end must be positive");
  for (Eigen::Index j = 0; j < x0.size(); ++j)
    if (!(x0[j] > 0.0))
      throw Error(ErrorCode::NonPositiveInitial, "initial state must be strictly positive");

  MassActionSystem sys(net);
  const auto n = x0.size();
  double t = 0.0;
  Eigen::VectorXd y = x0;
  Eigen::VectorXd f = sys.rhs(y);

  std::vector<double> times;
  std::vector<Eigen::VectorXd> rows;
  auto record = [&](double ts, const Eigen::VectorXd& ys) {
    if (!times.empty() && ts <= times.back()) return;
    times.push_back(ts);
    rows.push_back(ys);
  };
  record(0.0, y);
  double next_sample = opts.sample_every > 0 ? opts.sample_every : 0.0;

  const double max_step = opts.max_step > 0 ? opts.max_step : t_end;
  double fn = f.norm();
  double h = std::min({max_step, t_end, fn > 0 ? 0.01 * (1.0 + y.norm()) / fn : t_end / 100});
  const double h_min = 1e-14 * t_end;

  StepStats stats;
  Eigen::MatrixXd k(n, 7);
  k.col(0) = f;

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < h_min)
      throw Error(ErrorCode::StepSizeUnderflow,
                  "step size fell below 1e-14 * t_end at t = " + std::to_string(t));

    bool positive = true;
    for (int s = 1; s < 7 && positive; ++s) {
      Eigen::VectorXd arg = y;
      for (int m = 0; m < s; ++m) arg += h * kA[s][m] * k.col(m);
      if ((arg.array() <= 0.0).any()) {
        positive = false;
        break;
      }
      k.col(s) = sys.rhs(arg);
    }
    // stage 7 argument is the 5th-order solution itself
    Eigen::VectorXd y_new;
    if (positive) {
      y_new = y;
      for (int m = 0; m < 6; ++m) y_new += h * kA[6][m] * k.col(m);
      if ((y_new.array() <= 0.0).any()) positive = false;
    }
    if (!positive) {
      ++stats.rejected;
      h *= 0.5;
      continue;
    }
    k.col(6) = sys.rhs(y_new);

    Eigen::VectorXd err_vec = Eigen::VectorXd::Zero(n);
    for (int m = 0; m < 7; ++m) err_vec += h * kE[m] * k.col(m);
    double err = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[j]), std::abs(y_new[j]));
      double e = err_vec[j] / sc;
      err += e * e;
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (err <= 1.0) {
      ++stats.accepted;
      double t_new = t + h;
      if (opts.sample_every > 0) {
        // record at the nominal sample times so runs with equal sample_every
        // share their time grid exactly
        while (next_sample <= t_new + 1e-12 * t_end && next_sample <= t_end) {
          double at = std::min(next_sample, t_new);
          record(next_sample, hermite(t, y, k.col(0), t_new, y_new, k.col(6), at));
          next_sample += opts.sample_every;
        }
      } else {
        record(t_new, y_new);
      }
      y = y_new;
      k.col(0) = k.col(6);  // FSAL
      t = t_new;
      double factor = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h = std::min(max_step, h * std::clamp(factor, 0.2, 5.0));
    } else {
      ++stats.rejected;
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
    }
  }
  record(t_end, y);

  Trajectory traj;
  traj.times = std::move(times);
  traj.states.resize(static_cast<Eigen::Index>(traj.times.size()), n);
  for (size_t i = 0; i < traj.times.size(); ++i) traj.states.row(static_cast<Eigen::Index>(i)) = rows[i];
  traj.stats = stats;
  return traj;
}

std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& species,
                           const std::string& extra_name,
                           const std::vector<double>& extra_values) {
  std::string out = "t";
  for (const auto& s : species) {
    out += ',';
    out += s;
  }
  if (!extra_name.empty()) {
    out += ',';
    out += extra_name;
  }
  out += '\n';
  char buf[64];
  auto append = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
  };
  for (size_t i = 0; i < traj.times.size(); ++i) {
    append(traj.times[i]);
    for (Eigen::Index j = 0; j < traj.states.cols(); ++j) {
      out += ',';
      append(traj.states(static_cast<Eigen::Index>(i), j));
    }
    if (!extra_name.empty()) {
      out += ',';
      append(extra_values.at(i));
    }
    out += '\n';
  }
  return out;
}

}  // namespace crnlyap
