#pragma once

#include "cenn/common.hpp"

#include <string>
#include <vector>

namespace cenn {

/// Finite group given by its multiplication table: mul(g, h) = g·h.
class FiniteGroup {
 public:
  /// Checks closure, identity, inverses and associativity; throws Error(not_a_group) with a witness.
  FiniteGroup(std::vector<std::string> names, std::vector<std::vector<std::size_t>> table);

  static FiniteGroup cyclic(std::size_t n);
  /// Permutations of {0..n-1} in lexicographic order, named by one-line notation ("012", "021", …).
  static FiniteGroup symmetric(std::size_t n);
  static FiniteGroup trivial() { return cyclic(1); }

  std::size_t order() const noexcept { return names_.size(); }
  const std::string& name(std::size_t g) const { return names_.at(g); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t find(std::string_view name) const;
  std::size_t mul(std::size_t g, std::size_t h) const { return table_[g][h]; }
  std::size_t identity() const noexcept { return identity_; }
  std::size_t inverse(std::size_t g) const { return inverse_[g]; }
  const std::vector<std::vector<std::size_t>>& table() const noexcept { return table_; }

  /// Only set for symmetric groups: the permutation of each element.
  const std::vector<std::vector<std::size_t>>& permutations() const noexcept { return perms_; }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::size_t>> table_;
  std::size_t identity_ = 0;
  std::vector<std::size_t> inverse_;
  std::vector<std::vector<std::size_t>> perms_;
};

/// Left action on a finite point set: act[g][y] = g·y.
struct GroupAction {
  std::vector<std::string> points;
  std::vector<std::vector<std::size_t>> act;

  /// Throws Error(not_an_action) unless e·y = y and (gh)·y = g·(h·y).
  void validate(const FiniteGroup& g) const;

  static GroupAction trivial(const FiniteGroup& g, std::vector<std::string> points = {"*"});
  /// G acting on itself by left multiplication.
  static GroupAction regular(const FiniteGroup& g);
  /// S_n on {0..n-1}, or C_n rotating {0..n-1}.
  static GroupAction natural(const FiniteGroup& g, std::size_t n);
  /// C2 exchanging two points {p, q}.
  static GroupAction swap(const FiniteGroup& c2);
};

/// Matrices ρ(g) indexed by element.
using Representation = std::vector<Matrix>;

/// Throws Error(not_a_homomorphism) naming an offending element (or pair).
void validate_representation(const FiniteGroup& g, const Representation& rho, double tol = 1e-12);

Representation trivial_rep(const FiniteGroup& g, std::size_t dim = 1);
/// ±1 character: permutation sign for symmetric groups, (-1)^k for r^k in even cyclic groups;
/// odd cyclic groups have no nontrivial ±1 character and get the trivial one.
Representation sign_rep(const FiniteGroup& g);
/// ρ(g) e_h = e_{gh}.
Representation regular_rep(const FiniteGroup& g);
/// Block-diagonal direct sum.
Representation direct_sum(const Representation& a, const Representation& b);

}  // namespace cenn
