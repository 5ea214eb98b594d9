#include "crnlyap/network.hpp"

#include "crnlyap/error.hpp"

#include <set>

namespace crnlyap {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateSpecies: return "DuplicateSpecies";
    case ErrorCode::SelfLoopReaction: return "SelfLoopReaction";
    case ErrorCode::NonpositiveRate: return "NonpositiveRate";
    case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::NonpositiveEntry: return "NonpositiveEntry";
    case ErrorCode::NegativeConcentration: return "NegativeConcentration";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::NonPositiveInitial: return "NonPositiveInitial";
    case ErrorCode::NotAnEquilibriumReference: return "NotAnEquilibriumReference";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::NegativeProductCoefficient: return "NegativeProductCoefficient";
    case ErrorCode::NonIntegerProduct: return "NonIntegerProduct";
    case ErrorCode::SelfLoopProduced: return "SelfLoopProduced";
    case ErrorCode::InvalidRegion: return "InvalidRegion";
    case ErrorCode::PathNotInClass: return "PathNotInClass";
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::SourceNotComplexBalanced: return "SourceNotComplexBalanced";
    case ErrorCode::StructuralMismatch: return "StructuralMismatch";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

Reaction make_reaction(RationalVector reactant, RationalVector product, double rate) {
  return Reaction{std::move(reactant), std::move(product), rate, std::nullopt};
}

Reaction make_reaction(RationalVector reactant, RationalVector product, Rational rate) {
  return Reaction{std::move(reactant), std::move(product), to_double(rate), rate};
}

Network::Network(std::vector<std::string> species, std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  if (species_.empty())
    throw Error(ErrorCode::LengthMismatch, "a network needs at least one species");
  if (reactions_.empty())
    throw Error(ErrorCode::LengthMismatch, "a network needs at least one reaction");

  std::set<std::string> seen;
  for (const auto& name : species_) {
    if (name.empty())
      throw Error(ErrorCode::LengthMismatch, "empty species name");
    if (!seen.insert(name).second)
      throw Error(ErrorCode::DuplicateSpecies, "species '" + name + "' declared twice");
  }

  const auto n = static_cast<Eigen::Index>(species_.size());
  auto check_complex = [&](const RationalVector& v, int reaction, const char* side) {
    if (v.size() != n)
      throw Error(ErrorCode::LengthMismatch,
                  std::string(side) + " complex of reaction " + std::to_string(reaction + 1) +
                      " has " + std::to_string(v.size()) + " coefficients, expected " +
                      std::to_string(n));
    for (Eigen::Index j = 0; j < n; ++j)
      if (v[j].is_negative())
        throw Error(ErrorCode::NegativeCoefficient,
                    "coefficient of " + species_[j] + " in reaction " +
                        std::to_string(reaction + 1) + " is negative");
  };

  auto complex_index = [&](const RationalVector& v) {
    for (size_t c = 0; c < complexes_.size(); ++c)
      if (complexes_[c] == v) return static_cast<int>(c);
    complexes_.push_back(v);
    return static_cast<int>(complexes_.size() - 1);
  };

  for (size_t i = 0; i < reactions_.size(); ++i) {
    Reaction& rxn = reactions_[i];
    check_complex(rxn.reactant, static_cast<int>(i), "reactant");
    check_complex(rxn.product, static_cast<int>(i), "product");
    if (rxn.reactant == rxn.product)
      throw Error(ErrorCode::SelfLoopReaction,
                  "reaction " + std::to_string(i + 1) + " has identical sides");
    if (rxn.rate_exact) {
      if (!rxn.rate_exact->is_positive())
        throw Error(ErrorCode::NonpositiveRate,
                    "rate of reaction " + std::to_string(i + 1) + " must be positive");
      rxn.rate = to_double(*rxn.rate_exact);
    }
    if (!(rxn.rate > 0.0))
      throw Error(ErrorCode::NonpositiveRate,
                  "rate of reaction " + std::to_string(i + 1) + " must be positive");
    reactant_complex_.push_back(complex_index(rxn.reactant));
    product_complex_.push_back(complex_index(rxn.product));
  }
}

bool operator==(const Network& a, const Network& b) {
  if (a.species_ != b.species_) return false;
  if (a.reactions_.size() != b.reactions_.size()) return false;
  for (size_t i = 0; i < a.reactions_.size(); ++i) {
    const Reaction& x = a.reactions_[i];
    const Reaction& y = b.reactions_[i];
    if (x.reactant != y.reactant || x.product != y.product) return false;
    if (x.rate_exact.has_value() != y.rate_exact.has_value()) return false;
    if (x.rate_exact) {
      if (*x.rate_exact != *y.rate_exact) return false;
    } else if (x.rate != y.rate) {
      return false;
    }
  }
  return true;
}

}  // namespace crnlyap
