#pragma once

#include "crnlyap/cbp.hpp"
#include "crnlyap/error.hpp"
#include "crnlyap/network.hpp"
#include "crnlyap/parse.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

namespace testutil {

using namespace crnlyap;

// Three-reaction cycle 2A -> 3A -> 2A+B -> 2A with rates 2, 1, 2; complex
// balanced at (2, 1).
inline Network example_network() {
  return parse_network(
             "2 S1 -> 3 S1 ; k = 2\n"
             "3 S1 -> 2 S1 + S2 ; k = 1\n"
             "2 S1 + S2 -> 2 S1 ; k = 2\n")
      .network;
}

// Image of example_network() under D = diag(1/3, 1); equilibrium (6, 1).
inline Network example_cbp_network() {
  return parse_network(
             "2 S1 -> 5 S1 ; k = 2/9\n"
             "3 S1 -> S2 ; k = 1/27\n"
             "2 S1 + S2 -> 2 S1 ; k = 2/9\n")
      .network;
}

inline ProducingMatrix example_dmatrix() {
  return ProducingMatrix(parse_dmatrix("1/3, 1"));
}

inline RationalVector rational_state(std::initializer_list<Rational> entries) {
  RationalVector v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (const Rational& q : entries) v[i++] = q;
  return v;
}

// A reversible chain of complexes whose backward rates are chosen by detailed
// balance at a prescribed rational state, so the network is complex balanced
// there by construction.
struct RandomBalancedInstance {
  Network net;
  RationalVector x_star_exact;
  Eigen::VectorXd x_star;
};

inline RandomBalancedInstance random_reversible_cycle(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  const int n = pick(1, 4);
  const int m = pick(2, 4);  // complexes in the chain

  // distinct small integer complexes
  std::vector<RationalVector> complexes;
  while (static_cast<int>(complexes.size()) < m) {
    RationalVector z = RationalVector::Zero(n);
    for (int j = 0; j < n; ++j) z[j] = Rational(pick(0, 3));
    bool duplicate = false;
    for (const auto& other : complexes)
      if (other == z) duplicate = true;
    if (!duplicate) complexes.push_back(std::move(z));
  }

  // kept near 1 so detailed-balance rate ratios stay moderate and the
  // dynamics relax within a reasonable horizon
  const Rational state_pool[] = {Rational(2, 3), Rational(1), Rational(3, 2)};
  RationalVector x_star(n);
  for (int j = 0; j < n; ++j) x_star[j] = state_pool[pick(0, 2)];

  auto monomial = [&](const RationalVector& z) {
    Rational value(1);
    for (int j = 0; j < n; ++j) value *= x_star[j].pow(z[j].num());
    return value;
  };

  const Rational rate_pool[] = {Rational(1), Rational(2), Rational(1, 2), Rational(3),
                                Rational(2, 3)};
  struct Edge {
    int a, b;
    Rational forward, backward;
  };
  std::vector<Edge> edges;
  for (int e = 0; e + 1 < m; ++e) {
    Rational forward = rate_pool[pick(0, 4)];
    Rational backward = forward * monomial(complexes[e]) / monomial(complexes[e + 1]);
    // extreme detailed-balance ratios make the dynamics relax on hopeless
    // timescales; rescale the pair (which preserves the balance point) until
    // both constants sit in a moderate band
    while (forward > Rational(256) || backward > Rational(256)) {
      forward = forward / Rational(4);
      backward = backward / Rational(4);
    }
    while (forward < Rational(1, 256) || backward < Rational(1, 256)) {
      forward = forward * Rational(4);
      backward = backward * Rational(4);
    }
    edges.push_back({e, e + 1, forward, backward});
  }

  // The text format cannot express species that never occur, and it orders
  // them by first appearance; normalize the instance the same way so
  // parse(print(net)) reproduces it.
  std::vector<int> order;
  auto note = [&](const RationalVector& z) {
    for (int j = 0; j < n; ++j)
      if (!z[j].is_zero() && std::find(order.begin(), order.end(), j) == order.end())
        order.push_back(j);
  };
  for (const Edge& e : edges) {
    note(complexes[e.a]);
    note(complexes[e.b]);
  }
  if (order.empty()) order.push_back(0);  // degenerate; keeps the network valid

  const int kept = static_cast<int>(order.size());
  auto remap = [&](const RationalVector& z) {
    RationalVector out(kept);
    for (int j = 0; j < kept; ++j) out[j] = z[order[j]];
    return out;
  };

  std::vector<std::string> species;
  for (int j = 0; j < kept; ++j) species.push_back("A" + std::to_string(order[j] + 1));

  std::vector<Reaction> reactions;
  for (const Edge& e : edges) {
    reactions.push_back(make_reaction(remap(complexes[e.a]), remap(complexes[e.b]), e.forward));
    reactions.push_back(make_reaction(remap(complexes[e.b]), remap(complexes[e.a]), e.backward));
  }

  RandomBalancedInstance inst{Network(std::move(species), std::move(reactions)),
                              remap(x_star), Eigen::VectorXd()};
  inst.x_star = to_double(inst.x_star_exact);
  return inst;
}

// Producing matrix whose generated products stay nonnegative integers;
// falls back to the identity when sampling keeps failing.
inline ProducingMatrix random_valid_dmatrix(std::mt19937_64& rng, const Network& src) {
  const int n = src.num_species();
  const Rational pool[] = {Rational(1),    Rational(1, 2), Rational(1, 3), Rational(2),
                           Rational(3),    Rational(1, 4)};
  for (int attempt = 0; attempt < 30; ++attempt) {
    RationalVector diag(n);
    for (int j = 0; j < n; ++j) diag[j] = pool[rng() % 6];
    try {
      ProducingMatrix d(diag);
      cbp_generate(src, d, CbpMode::RequireInteger);
      return d;
    } catch (const Error&) {
      continue;
    }
  }
  return ProducingMatrix::identity(n);
}

}  // namespace testutil
