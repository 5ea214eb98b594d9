#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crnlyap/error.hpp"
#include "crnlyap/lyapunov.hpp"
#include "crnlyap/parse.hpp"

#include "helpers.hpp"

#include <cmath>
#include <random>

using namespace crnlyap;

namespace {

Eigen::Vector2d vec2(double a, double b) { return Eigen::Vector2d(a, b); }

LyapunovCandidate example_candidate() {
  return LyapunovCandidate(vec2(1.0 / 3, 1), vec2(6, 1));
}

}  // namespace

TEST_CASE("candidate value matches the closed form") {
  LyapunovCandidate c = example_candidate();
  CHECK(c.value(vec2(3, 4)) ==
        doctest::Approx(-2.0 + 7.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(c.value(vec2(6, 1)) == 0.0);

  // unit weights give the plain pseudo-Helmholtz sum
  LyapunovCandidate plain(vec2(1, 1), vec2(6, 1));
  Eigen::Vector2d x(3, 4);
  double expected = (6 - 3 - 3 * std::log(6.0 / 3)) + (1 - 4 - 4 * std::log(1.0 / 4));
  CHECK(plain.value(x) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("candidate value is positive away from the reference") {
  std::mt19937_64 rng(3);
  LyapunovCandidate c = example_candidate();
  for (int k = 0; k < 200; ++k) {
    Eigen::Vector2d x(0.05 + 12.0 * static_cast<double>(rng() % 1000) / 1000.0,
                      0.05 + 12.0 * static_cast<double>(rng() % 1000) / 1000.0);
    double v = c.value(x);
    if ((x - vec2(6, 1)).lpNorm<Eigen::Infinity>() > 1e-6)
      CHECK(v > 0.0);
  }
  CHECK(c.gradient(vec2(6, 1)).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("gradient matches the paper display and finite differences") {
  LyapunovCandidate c = example_candidate();
  Eigen::VectorXd g = c.gradient(vec2(3, 4));
  CHECK(g[0] == doctest::Approx(std::log(0.5) / 3).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(std::log(4.0)).epsilon(1e-14));

  std::mt19937_64 rng(9);
  for (int k = 0; k < 100; ++k) {
    Eigen::Vector2d x(0.2 + 8.0 * static_cast<double>(rng() % 1000) / 1000.0,
                      0.2 + 8.0 * static_cast<double>(rng() % 1000) / 1000.0);
    Eigen::VectorXd grad = c.gradient(x);
    Eigen::VectorXd hess = c.hessian_diagonal(x);
    for (int j = 0; j < 2; ++j) {
      double h = 1e-6 * x[j];
      Eigen::Vector2d xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      double fd_grad = (c.value(xp) - c.value(xm)) / (2 * h);
      CHECK(std::abs(grad[j] - fd_grad) <= 1e-6 * std::max(1.0, std::abs(grad[j])));
      double fd_hess = (c.gradient(xp)[j] - c.gradient(xm)[j]) / (2 * h);
      CHECK(std::abs(hess[j] - fd_hess) <= 1e-5 * std::max(1.0, std::abs(hess[j])));
    }
  }
}

TEST_CASE("zero weights deactivate species") {
  LyapunovCandidate c(vec2(0, 2), vec2(6, 1));
  CHECK(c.active_set() == std::vector<int>{1});
  CHECK(c.value(vec2(0.5, 1)) == 0.0);  // inactive coordinate contributes nothing
  CHECK(c.gradient(vec2(0.5, 3))[0] == 0.0);
}

TEST_CASE("pde residual vanishes for the generated candidate") {
  Network cbp = testutil::example_cbp_network();
  LyapunovCandidate c = example_candidate();
  // terms at (3,4) are 6, 1, -7
  CHECK(std::abs(pde_residual(cbp, c, vec2(3, 4))) <= 1e-12);
  CHECK(std::abs(pde_residual(cbp, c, vec2(6, 1))) <= 1e-12);
  CHECK(std::abs(pde_residual(cbp, c, vec2(0.37, 5.11))) <= 1e-12);
}

TEST_CASE("pde residual rejects the unweighted candidate") {
  Network cbp = testutil::example_cbp_network();
  LyapunovCandidate wrong(vec2(1, 1), vec2(6, 1));
  // reaction terms 1.75, -31, 6
  CHECK(pde_residual(cbp, wrong, vec2(3, 4)) == doctest::Approx(-23.25).epsilon(1e-12));
}

TEST_CASE("residual sweep over the standard box") {
  Network cbp = testutil::example_cbp_network();
  PdeResidualReport report =
      pde_residual_sweep(cbp, example_candidate(), Box::uniform(2, 0.1, 10.0), 1000, 42);
  CHECK(report.passed);
  CHECK(report.max_abs_residual <= 1e-9 * std::max(report.scale, 1.0));
  CHECK(report.sample_points.rows() == 1000);
  CHECK(report.scale > 1.0);

  // identical seeds reproduce the sweep exactly
  PdeResidualReport again =
      pde_residual_sweep(cbp, example_candidate(), Box::uniform(2, 0.1, 10.0), 1000, 42);
  CHECK(again.max_abs_residual == report.max_abs_residual);
  CHECK(again.sample_points == report.sample_points);
}

TEST_CASE("refutation honesty: the unweighted candidate fails the sweep") {
  Network cbp = testutil::example_cbp_network();
  LyapunovCandidate wrong(vec2(1, 1), vec2(6, 1));
  PdeResidualReport report =
      pde_residual_sweep(cbp, wrong, Box::uniform(2, 0.1, 10.0), 1000, 42);
  CHECK_FALSE(report.passed);
  CHECK(report.max_abs_residual > 1e-3 * std::max(report.scale, 1.0));
}

TEST_CASE("theorem-3 form: unit weights solve the source network's equation") {
  Network src = testutil::example_network();
  LyapunovCandidate g(vec2(1, 1), vec2(2, 1));
  PdeResidualReport report = pde_residual_sweep(src, g, Box::uniform(2, 0.1, 10.0), 500, 7);
  CHECK(report.passed);
}

TEST_CASE("residual identity on random generated pairs") {
  std::mt19937_64 rng(2025);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = testutil::random_reversible_cycle(rng);
    ProducingMatrix d = testutil::random_valid_dmatrix(rng, inst.net);
    CbpResult gen = cbp_generate(inst.net, d);
    LyapunovCandidate c(d.to_double_vector(),
                        map_equilibrium(inst.x_star, d, MapDirection::ToCbp));
    PdeResidualReport report = pde_residual_sweep(gen.network, c,
                                                  Box::uniform(inst.net.num_species(), 0.1, 10.0),
                                                  200, rng());
    CHECK(report.passed);
  }
}

TEST_CASE("sweep input validation") {
  Network cbp = testutil::example_cbp_network();
  CHECK_THROWS_AS(Box::uniform(2, -1.0, 10.0), Error);
  CHECK_THROWS_AS(Box::uniform(2, 2.0, 1.0), Error);
  CHECK_THROWS_AS(
      pde_residual_sweep(cbp, example_candidate(), Box::uniform(2, 0.1, 10.0), 0, 1), Error);
  CHECK_THROWS_AS(
      pde_residual_sweep(cbp, example_candidate(), Box::uniform(3, 0.1, 10.0), 10, 1), Error);
}

TEST_CASE("boundary residuals fade along the approach path") {
  Network cbp = testutil::example_cbp_network();
  std::vector<int> full_set = {0, 1, 2, 3, 4};
  std::vector<Eigen::VectorXd> path;
  for (int m = 1; m <= 20; ++m) path.push_back(vec2(std::pow(2.0, -m), 1.0));

  Eigen::VectorXd res = boundary_residual(cbp, example_candidate(), vec2(0, 1), full_set, path);
  REQUIRE(res.size() == 20);
  CHECK(std::abs(res[19]) < 1e-10);
  CHECK(res.lpNorm<Eigen::Infinity>() < 1e-10);
  // magnitudes shrink with the leading monomial x1^2: compare the halves
  CHECK(res.tail(10).lpNorm<Eigen::Infinity>() <=
        std::max(res.head(10).lpNorm<Eigen::Infinity>(), 1e-250));
}

TEST_CASE("empty complex set gives identically zero boundary residuals") {
  Network cbp = testutil::example_cbp_network();
  std::vector<Eigen::VectorXd> path = {vec2(0.5, 1), vec2(0.25, 1)};
  Eigen::VectorXd res = boundary_residual(cbp, example_candidate(), vec2(0, 1), {}, path);
  CHECK(res[0] == 0.0);
  CHECK(res[1] == 0.0);
}

TEST_CASE("boundary path must stay inside the compatibility class") {
  // conservation x1 + x2: paths must keep the total fixed at the boundary value
  Network net = parse_network("S1 -> S2 ; k = 1\nS2 -> S1 ; k = 1").network;
  LyapunovCandidate c(vec2(1, 1), vec2(1, 1));
  std::vector<Eigen::VectorXd> good = {vec2(0.25, 0.75), vec2(0.125, 0.875)};
  CHECK_NOTHROW(boundary_residual(net, c, vec2(0, 1), {0, 1}, good));
  std::vector<Eigen::VectorXd> bad = {vec2(0.25, 0.9)};
  CHECK_THROWS_AS(boundary_residual(net, c, vec2(0, 1), {0, 1}, bad), Error);
  CHECK_THROWS_AS(boundary_residual(net, c, vec2(0.5, 1), {0, 1}, good), Error);
}

TEST_CASE("restricted hessian of the example candidate") {
  LyapunovCandidate c = example_candidate();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(2, 2);
  HessianVerdict verdict = hessian_check(c, basis, Box::uniform(2, 0.1, 10.0), 200, 42);
  CHECK(verdict.pass);
  // smallest possible eigenvalue on the box is (1/3) / 10
  CHECK(verdict.min_eigenvalue >= (1.0 / 3) / 10.0 - 1e-12);

  // at the reference itself the restricted hessian is diag(1/18, 1)
  Eigen::MatrixXd m = basis.transpose() * c.hessian_diagonal(vec2(6, 1)).asDiagonal() * basis;
  CHECK(m(0, 0) == doctest::Approx(1.0 / 18).epsilon(1e-14));
  CHECK(m(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero weight along a basis direction fails the hessian check") {
  LyapunovCandidate c(vec2(0, 1), vec2(6, 1));
  Eigen::MatrixXd e1(2, 1);
  e1 << 1, 0;
  HessianVerdict verdict = hessian_check(c, e1, Box::uniform(2, 0.5, 2.0), 50, 1);
  CHECK_FALSE(verdict.pass);
}

TEST_CASE("positive weights pass the hessian check for any full-rank basis") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + static_cast<int>(rng() % 3);
    int k = 1 + static_cast<int>(rng() % n);
    Eigen::MatrixXd basis(n, k);
    Eigen::VectorXd weights(n), reference(n);
    for (int j = 0; j < n; ++j) {
      weights[j] = 0.1 + static_cast<double>(rng() % 100) / 25.0;
      reference[j] = 0.2 + static_cast<double>(rng() % 100) / 20.0;
    }
    do {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < k; ++b)
          basis(a, b) = static_cast<double>(static_cast<int>(rng() % 9)) - 4.0;
    } while (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(basis).rank() < k);
    LyapunovCandidate c(weights, reference);
    CHECK(hessian_check(c, basis, Box::uniform(n, 0.2, 5.0), 40, rng()).pass);
  }
}

TEST_CASE("degenerate basis is rejected") {
  Eigen::MatrixXd basis(2, 2);
  basis << 1, 2, 2, 4;
  CHECK_THROWS_AS(
      hessian_check(example_candidate(), basis, Box::uniform(2, 0.1, 10.0), 10, 1), Error);
}

TEST_CASE("dissipation audit of the paper trajectory") {
  Network cbp = testutil::example_cbp_network();
  LyapunovCandidate c = example_candidate();
  IntegrateOptions opts;
  opts.sample_every = 0.25;
  Trajectory traj = integrate(cbp, vec2(3, 4), 50.0, opts);
  DissipationAudit audit = dissipation_audit(cbp, c, traj);
  CHECK(audit.pass);
  CHECK(audit.violations.empty());
  CHECK(c.value(traj.states.row(0)) ==
        doctest::Approx(-2.0 + 7.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(c.value(traj.states.row(traj.states.rows() - 1)) < 1e-10);
}

TEST_CASE("constant trajectory at the equilibrium is flagged stationary") {
  Network cbp = testutil::example_cbp_network();
  IntegrateOptions opts;
  opts.sample_every = 5.0;
  Trajectory traj = integrate(cbp, vec2(6, 1), 20.0, opts);
  DissipationAudit audit = dissipation_audit(cbp, example_candidate(), traj);
  CHECK(audit.pass);
  CHECK(audit.stationary_samples == audit.samples);
}

TEST_CASE("original trajectory audits identically through the conjugacy") {
  Network original = testutil::example_network();
  Network cbp = testutil::example_cbp_network();
  ProducingMatrix d = testutil::example_dmatrix();
  IntegrateOptions opts;
  opts.sample_every = 0.5;
  Trajectory traj = integrate(original, vec2(1, 4), 50.0, opts);

  // map x(t) through D^-1 and audit against the generated system
  Trajectory mapped = traj;
  for (Eigen::Index i = 0; i < mapped.states.rows(); ++i)
    mapped.states.row(i) =
        map_equilibrium(Eigen::VectorXd(traj.states.row(i)), d, MapDirection::ToCbp);
  DissipationAudit audit = dissipation_audit(cbp, example_candidate(), mapped);
  CHECK(audit.pass);
}

TEST_CASE("certification of the paper pair") {
  CertifyOptions opts;
  opts.initials = {vec2(3, 4)};
  CertificationReport report =
      certify(testutil::example_cbp_network(), testutil::example_network(),
              testutil::example_dmatrix(), opts);
  CHECK(report.verdict == Verdict::Certified);
  CHECK(report.pde.passed);
  CHECK(report.hessian.pass);
  REQUIRE(report.dissipation.size() == 1);
  CHECK(report.dissipation[0].audit.pass);
  CHECK((report.x_star_source - vec2(2, 1)).lpNorm<Eigen::Infinity>() <= 1e-7);
  CHECK((report.reference - vec2(6, 1)).lpNorm<Eigen::Infinity>() <= 1e-6);
  CHECK(report.structural.deficiency == 1);
  CHECK(report.source_balance.balanced);
}

TEST_CASE("certification via the identity path") {
  CertificationReport report = certify(testutil::example_network(), std::nullopt, std::nullopt);
  CHECK(report.verdict == Verdict::Certified);
  CHECK(report.weights == Eigen::VectorXd::Ones(2));
}

TEST_CASE("certification refuses a non-balanced source") {
  Network bad_source = parse_network("2 S1 -> 5 S1 ; k = 1\n3 S1 -> S2 ; k = 1\n"
                                     "2 S1 + S2 -> 2 S1 ; k = 1")
                           .network;
  try {
    certify(bad_source, std::nullopt, std::nullopt);
    FAIL("expected SourceNotComplexBalanced");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SourceNotComplexBalanced);
  }
}

TEST_CASE("certification detects a mismatched pair") {
  ProducingMatrix wrong_d(testutil::rational_state({Rational(1, 2), Rational(1)}));
  try {
    certify(testutil::example_cbp_network(), testutil::example_network(), wrong_d);
    FAIL("expected StructuralMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StructuralMismatch);
  }
}

TEST_CASE("override weights produce a refutation") {
  CertifyOptions opts;
  opts.initials = {vec2(3, 4)};
  opts.override_weights = vec2(1, 1);
  CertificationReport report =
      certify(testutil::example_cbp_network(), testutil::example_network(),
              testutil::example_dmatrix(), opts);
  CHECK(report.verdict == Verdict::Refuted);
  CHECK_FALSE(report.pde.passed);
}
