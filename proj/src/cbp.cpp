#include "crnlyap/cbp.hpp"

#include "crnlyap/error.hpp"
#include "crnlyap/parse.hpp"
#include "crnlyap/structure.hpp"

#include <cmath>

namespace crnlyap {

ProducingMatrix::ProducingMatrix(RationalVector entries) : diag(std::move(entries)) {
  for (Eigen::Index j = 0; j < diag.size(); ++j)
    if (!diag[j].is_positive())
      throw Error(ErrorCode::NonpositiveEntry,
                  "producing matrix entry " + std::to_string(j) + " must be positive");
}

ProducingMatrix ProducingMatrix::identity(int n) {
  RationalVector v(n);
  for (int j = 0; j < n; ++j) v[j] = Rational(1);
  return ProducingMatrix(std::move(v));
}

bool ProducingMatrix::is_identity() const {
  for (Eigen::Index j = 0; j < diag.size(); ++j)
    if (diag[j] != Rational(1)) return false;
  return true;
}

std::uint64_t network_fingerprint(const Network& net) {
  // FNV-1a over the canonical text
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : print_network(net)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

CbpResult cbp_generate(const Network& src, const ProducingMatrix& d, CbpMode mode) {
  const int n = src.num_species();
  if (d.size() != n)
    throw Error(ErrorCode::LengthMismatch,
                "producing matrix has " + std::to_string(d.size()) + " entries for " +
                    std::to_string(n) + " species");

  bool all_integer = true;
  std::vector<Reaction> reactions;
  reactions.reserve(src.reactions().size());
  for (size_t i = 0; i < src.reactions().size(); ++i) {
    const Reaction& rxn = src.reactions()[i];
    Reaction out;
    out.reactant = rxn.reactant;
    out.product.resize(n);
    for (int j = 0; j < n; ++j) {
      Rational delta = rxn.product[j] - rxn.reactant[j];
      out.product[j] = rxn.reactant[j] + delta / d.diag[j];
      if (out.product[j].is_negative())
        throw Error(ErrorCode::NegativeProductCoefficient,
                    "reaction " + std::to_string(i + 1) + ": coefficient of " +
                        src.species()[j] + " becomes " + out.product[j].str());
      if (!out.product[j].is_integer()) {
        if (mode == CbpMode::RequireInteger)
          throw Error(ErrorCode::NonIntegerProduct,
                      "reaction " + std::to_string(i + 1) + ": coefficient of " +
                          src.species()[j] + " becomes " + out.product[j].str());
        all_integer = false;
      }
    }
    if (out.reactant == out.product)
      throw Error(ErrorCode::SelfLoopProduced,
                  "reaction " + std::to_string(i + 1) + " collapses to a self loop");

    // k~_i = k_i * prod_j d_j^(v_ji), exact when possible
    bool exact_ok = rxn.rate_exact.has_value();
    for (int j = 0; exact_ok && j < n; ++j)
      if (!rxn.reactant[j].is_integer()) exact_ok = false;
    if (exact_ok) {
      try {
        Rational factor(1);
        for (int j = 0; j < n; ++j) factor *= d.diag[j].pow(rxn.reactant[j].num());
        out.rate_exact = *rxn.rate_exact * factor;
        out.rate = to_double(*out.rate_exact);
      } catch (const std::overflow_error&) {
        exact_ok = false;
      }
    }
    if (!exact_ok) {
      double log_factor = 0.0;
      for (int j = 0; j < n; ++j)
        log_factor += to_double(rxn.reactant[j]) * std::log(to_double(d.diag[j]));
      out.rate = rxn.rate * std::exp(log_factor);
      out.rate_exact = std::nullopt;
    }
    reactions.push_back(std::move(out));
  }

  CbpResult result{Network(src.species(), std::move(reactions)), d,
                   all_integer ? Integrality::AllInteger : Integrality::FractionalAllowed,
                   network_fingerprint(src)};
  return result;
}

StructureRelation cbp_structure_relation(const Network& src, const CbpResult& result) {
  StructureSummary src_structure = structure(src);
  StructureSummary gen_structure = structure(result.network);

  RationalMatrix mapped = src_structure.stoich_matrix;
  for (Eigen::Index j = 0; j < mapped.rows(); ++j) {
    Rational inv = result.producing_matrix.diag[j].reciprocal();
    for (Eigen::Index i = 0; i < mapped.cols(); ++i) mapped(j, i) *= inv;
  }

  StructureRelation rel;
  rel.gamma_matches = gen_structure.stoich_matrix == mapped;

  // mutual rank test for span equality of the two column spaces
  int rank_gen = gen_structure.stoich_rank;
  int rank_mapped = rational_rank(mapped);
  RationalMatrix joint(mapped.rows(), gen_structure.stoich_matrix.cols() + mapped.cols());
  joint << gen_structure.stoich_matrix, mapped;
  int rank_joint = rational_rank(joint);
  rel.span_matches = rank_gen == rank_mapped && rank_joint == rank_gen;
  return rel;
}

Eigen::VectorXd map_equilibrium(const Eigen::VectorXd& x, const ProducingMatrix& d,
                                MapDirection direction) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double num = static_cast<double>(d.diag[j].num());
    double den = static_cast<double>(d.diag[j].den());
    out[j] = direction == MapDirection::ToCbp ? (x[j] * den) / num : (x[j] * num) / den;
  }
  return out;
}

RationalVector map_equilibrium_exact(const RationalVector& x, const ProducingMatrix& d,
                                     MapDirection direction) {
  RationalVector out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j)
    out[j] = direction == MapDirection::ToCbp ? x[j] / d.diag[j] : x[j] * d.diag[j];
  return out;
}

}  // namespace crnlyap
