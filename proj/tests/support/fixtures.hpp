#pragma once

#include <cenn/builders.hpp>
#include <cenn/compilation.hpp>
#include <cenn/constraints.hpp>
#include <cenn/equivariance.hpp>
#include <cenn/layers.hpp>

namespace fx {

using namespace cenn;

inline CategoryPtr make(const CategorySpec& s) {
  return std::make_shared<const FiniteCategory>(FiniteCategory::from_spec(s));
}

/// C2 as a raw one-object category spec with arrows e, g.
inline CategorySpec c2_spec() {
  CategorySpec s;
  s.objects = {"*"};
  s.arrows = {{"e", "*", "*"}, {"g", "*", "*"}};
  s.identities = {{"*", "e"}};
  s.composition = {{"e", "e", "e"}, {"e", "g", "g"}, {"g", "e", "g"}, {"g", "g", "e"}};
  return s;
}

inline FiniteGroup c2() { return FiniteGroup::cyclic(2); }

inline GroupCategory c2_setting(const Representation& x, const Representation& y) {
  const auto g = c2();
  return build_group_category(g, GroupAction::trivial(g), x, y);
}

inline GroupCategory c2_sign_sign() {
  const auto g = c2();
  return c2_setting(sign_rep(g), sign_rep(g));
}

/// Feature at a one-point base from a list of fiber values.
inline Matrix row(std::initializer_list<double> v) {
  Matrix m(1, Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

inline ObjectMap<std::size_t> dims(const FiniteCategory& c, std::size_t n) {
  return ObjectMap<std::size_t>(c.object_count(), n);
}

/// Kernel with every K(u, y) set from a per-arrow-id table of 1x1 values.
inline CategoryKernel scalar_kernel(FunctorPtr z, FunctorPtr zp, const std::map<std::string, double>& values,
                                    Regime regime) {
  CategoryKernel k(z, zp, regime);
  const auto& c = k.category();
  for (const auto& [id, v] : values) {
    const auto u = c.arrow_index(id);
    for (std::size_t y = 0; y < zp->base_size(c.tgt(u)); ++y) k.set_entry(u, y, Matrix::Constant(1, 1, v));
  }
  return k;
}

}  // namespace fx
