#pragma once

#include "crnlyap/network.hpp"
#include "crnlyap/rational.hpp"

namespace crnlyap {

/// Structural facts about a network, all computed in exact rational
/// arithmetic so the integer invariants carry no tolerance.
struct StructureSummary {
  RationalMatrix stoich_matrix;   // n x r, column i = product_i - reactant_i
  int stoich_rank = 0;
  RationalMatrix subspace_basis;    // n x rank, columns span the stoichiometric subspace
  RationalMatrix orthogonal_basis;  // n x (n - rank), columns span its orthogonal complement
  int num_complexes = 0;
  int num_linkage_classes = 0;
  int deficiency = 0;  // num_complexes - num_linkage_classes - stoich_rank
  bool weakly_reversible = false;
};

StructureSummary structure(const Network& net);

/// Exact rank via Gaussian elimination with rational pivots.
int rational_rank(RationalMatrix m);

/// Columns spanning the null space of `m` (exact).
RationalMatrix rational_null_space(const RationalMatrix& m);

/// Columns orthogonal to every column of `basis`; together the two spans
/// have full dimension. Exact.
RationalMatrix orthogonal_complement(const RationalMatrix& basis);

}  // namespace crnlyap
