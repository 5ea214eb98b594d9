#pragma once

#include "crnlyap/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crnlyap {

/// One mass-action reaction. Stoichiometric coefficients are exact rationals;
/// the rate constant is a positive double, with the exact value kept alongside
/// when the input provided one.
struct Reaction {
  RationalVector reactant;
  RationalVector product;
  double rate = 0.0;
  std::optional<Rational> rate_exact;
};

Reaction make_reaction(RationalVector reactant, RationalVector product, double rate);
Reaction make_reaction(RationalVector reactant, RationalVector product, Rational rate);

/// A validated reaction network: species in declaration order, reactions in
/// input order, and the deduplicated complex list derived from them.
/// Immutable after construction.
class Network {
public:
  Network(std::vector<std::string> species, std::vector<Reaction> reactions);

  int num_species() const { return static_cast<int>(species_.size()); }
  int num_reactions() const { return static_cast<int>(reactions_.size()); }
  int num_complexes() const { return static_cast<int>(complexes_.size()); }

  const std::vector<std::string>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }

  /// Distinct complexes in first-appearance order (reactant before product,
  /// reaction by reaction).
  const std::vector<RationalVector>& complexes() const { return complexes_; }

  int reactant_complex(int reaction) const { return reactant_complex_[reaction]; }
  int product_complex(int reaction) const { return product_complex_[reaction]; }

  friend bool operator==(const Network& a, const Network& b);
  friend bool operator!=(const Network& a, const Network& b) { return !(a == b); }

private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  std::vector<RationalVector> complexes_;
  std::vector<int> reactant_complex_;
  std::vector<int> product_complex_;
};

}  // namespace crnlyap
