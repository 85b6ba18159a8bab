#pragma once

#include "cenn/complex.hpp"
#include "cenn/functor.hpp"
#include "cenn/group.hpp"

namespace cenn {

struct GroupCategory {
  CategoryPtr category;
  FunctorPtr x;
  FunctorPtr y;
};

/// One object "*", one arrow per element (ids = element names), g∘h = gh, counting weights.
/// Functors use τ_g(y) = g^{-1}·y, π_g(y) = g·y, L_g = ρ(g^{-1}).
GroupCategory build_group_category(const FiniteGroup& g, const GroupAction& action, const Representation& rho_x,
                                   const Representation& rho_y);
CategoryPtr group_category(const FiniteGroup& g);
FunctorPtr group_functor(const CategoryPtr& cat, const FiniteGroup& g, const GroupAction& action,
                         const Representation& rho);

struct ActionGroupoid {
  CategoryPtr category;
  std::vector<std::pair<std::size_t, std::size_t>> arrow_data;  // (g, y) per arrow index
};

/// Objects Ω, arrows (g, y): y → g·y with ids "g|y", (h, g·y)∘(g, y) = (hg, y).
ActionGroupoid build_action_groupoid(const FiniteGroup& g, const GroupAction& action);
/// Pointwise functor with L_{(g,y)} = ρ(g^{-1}).
FunctorPtr action_groupoid_functor(const ActionGroupoid& ag, const FiniteGroup& g, const Representation& rho);

/// Thin category of the reflexive-transitive closure; arrow ids "d<=a". Throws Error(cycle).
CategoryPtr build_poset_category(const std::vector<std::string>& elements,
                                 const std::vector<std::pair<std::string, std::string>>& relation);
CategoryPtr chain_poset(std::size_t n);
/// {bot, a, b, top} with bot ≤ a, b ≤ top.
CategoryPtr diamond_lattice();

inline constexpr const char* bottom_object = "bottom";

/// Face poset of the complex, optionally with a bottom object below every cell.
CategoryPtr build_face_category(const CWComplex& k, bool include_bottom);

/// Pointwise functor with the given fiber dims and identity-on-shared-coordinates transports
/// (L_u = the n(src) x n(tgt) matrix with ones on the diagonal).
FunctorPtr constant_functor(const CategoryPtr& cat, const ObjectMap<std::size_t>& dims);

struct NeighbourhoodGroupoid {
  CategoryPtr category;
  std::vector<RootedPatch> patches;   // per cell index = object index
  std::vector<PatchMap> arrow_maps;   // per arrow τ→σ: σ-ball positions → τ-ball positions
};

/// Objects are the cells; an arrow τ→σ is a rooted isomorphism (B_k(σ), σ) → (B_k(τ), τ).
NeighbourhoodGroupoid build_neighbourhood_groupoid(const CWComplex& k, std::size_t radius);

struct NeighbourhoodFunctors {
  FunctorPtr x;  // stacked stalks over the patch, dim |V_k(τ)|·d_X
  FunctorPtr y;  // R^{d_Y}, identity transports
};

NeighbourhoodFunctors build_neighbourhood_functors(const NeighbourhoodGroupoid& ng, std::size_t d_x,
                                                   std::size_t d_y);

/// Stacks a global cell signal (one row of width d per cell) over the patch of τ.
Vector gather_patch(const NeighbourhoodGroupoid& ng, std::size_t cell, const Matrix& signal);

}  // namespace cenn
