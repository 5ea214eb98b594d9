#pragma once

#include "crnlyap/network.hpp"

#include <string>
#include <utility>
#include <vector>

namespace crnlyap {

/// Parsed network plus the (line, column) where each reaction starts,
/// for diagnostics.
struct NetworkDocument {
  Network network;
  std::vector<std::pair<int, int>> reaction_spans;
};

/// Text format, one reaction per line:
///
///   2 S1 -> 3 S1 ; k = 2
///   3 S1 -> 2 S1 + S2 ; k = 1/27
///   # comment lines and blank lines are skipped
///
/// Coefficients are integers or fractions "p/q" (default 1), rates are
/// positive decimals or fractions, and "0" denotes the empty complex.
/// Species are collected in first-appearance order.
NetworkDocument parse_network(const std::string& text);

/// Canonical form: one reaction per line in stored order, single spaces,
/// coefficient omitted when 1, fractions as "p/q", rates printed exactly
/// when rational and as shortest round-trip decimals otherwise.
/// parse_network(print_network(net)).network == net.
std::string print_network(const Network& net);

/// Renders one complex the way reaction sides are printed ("2 S1 + S2", "0").
std::string print_complex(const Network& net, const RationalVector& complex);

/// Comma-separated positive rationals/decimals, e.g. "1/3, 1".
RationalVector parse_dmatrix(const std::string& text);

}  // namespace crnlyap
