#pragma once

#include "crnlyap/network.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace crnlyap {

/// Positive diagonal matrix D = diag(d_1, ..., d_n) with exact entries.
struct ProducingMatrix {
  RationalVector diag;

  explicit ProducingMatrix(RationalVector entries);
  static ProducingMatrix identity(int n);

  int size() const { return static_cast<int>(diag.size()); }
  bool is_identity() const;
  Eigen::VectorXd to_double_vector() const { return to_double(diag); }
};

enum class CbpMode { RequireInteger, AllowFractional };
enum class Integrality { AllInteger, FractionalAllowed };

struct CbpResult {
  Network network;
  ProducingMatrix producing_matrix;
  Integrality integrality = Integrality::AllInteger;
  std::uint64_t source_fingerprint = 0;
};

/// Builds the network generated from `src` by D: reactants are preserved,
/// product i becomes v_i + D^-1 (v'_i - v_i) in exact rational arithmetic,
/// and rate i becomes k_i * prod_j d_j^(v_ji) (exact whenever k_i is exact
/// and the reactant coefficients are integers). RequireInteger mode rejects
/// fractional product coefficients; negative ones are rejected in both modes.
CbpResult cbp_generate(const Network& src, const ProducingMatrix& d,
                       CbpMode mode = CbpMode::RequireInteger);

struct StructureRelation {
  bool gamma_matches = false;  // generated stoichiometric matrix equals D^-1 * source's, exactly
  bool span_matches = false;   // generated subspace equals D^-1 * source subspace (mutual rank test)
  bool pass() const { return gamma_matches && span_matches; }
};

StructureRelation cbp_structure_relation(const Network& src, const CbpResult& result);

enum class MapDirection { ToCbp, ToSource };

/// Componentwise x_j / d_j (ToCbp) or x_j * d_j (ToSource), multiplying and
/// dividing by the integer numerator and denominator separately so small
/// rational states map exactly even in floating point.
Eigen::VectorXd map_equilibrium(const Eigen::VectorXd& x, const ProducingMatrix& d,
                                MapDirection direction);

/// Same map in exact arithmetic.
RationalVector map_equilibrium_exact(const RationalVector& x, const ProducingMatrix& d,
                                     MapDirection direction);

/// FNV-1a hash of the canonical network text.
std::uint64_t network_fingerprint(const Network& net);

}  // namespace crnlyap
