#pragma once

#include "cenn/common.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cenn {

struct Arrow {
  std::string id;
  ObjectIndex src;
  ObjectIndex tgt;
};

/// Name-level description of a finite category, as read from a category document.
struct CategorySpec {
  struct ArrowSpec {
    std::string id;
    std::string src;
    std::string tgt;
  };
  struct CompositionEntry {
    std::string f;
    std::string g;
    std::string composite;  // f∘g
  };

  std::vector<std::string> objects;
  std::vector<ArrowSpec> arrows;
  std::map<std::string, std::string> identities;
  std::vector<CompositionEntry> composition;
  std::map<std::string, double> weights;  // missing arrows default to 1 (counting measure)
};

/// A finite category with atomic per-arrow measure weights.
///
/// Arrows are stored in lexicographic order of their ids; objects keep the order in which
/// they were declared. Immutable once built.
class FiniteCategory {
 public:
  /// Resolves names and builds the tables. Throws Error(malformed_input) for unknown names,
  /// duplicate ids, missing identities or conflicting composition entries. Axiom violations
  /// are not errors here; see validate_category.
  static FiniteCategory from_spec(const CategorySpec& spec);

  CategorySpec to_spec() const;

  std::size_t object_count() const noexcept { return objects_.size(); }
  std::size_t arrow_count() const noexcept { return arrows_.size(); }
  auto objects() const { return object_range(objects_.size()); }
  auto arrows() const { return arrow_range(arrows_.size()); }

  const std::string& object_name(ObjectIndex a) const { return objects_.at(idx(a)); }
  std::optional<ObjectIndex> find_object(std::string_view name) const;
  ObjectIndex object(std::string_view name) const;

  const Arrow& arrow(ArrowIndex u) const { return arrows_.at(idx(u)); }
  const std::string& arrow_id(ArrowIndex u) const { return arrows_.at(idx(u)).id; }
  ObjectIndex src(ArrowIndex u) const { return arrows_.at(idx(u)).src; }
  ObjectIndex tgt(ArrowIndex u) const { return arrows_.at(idx(u)).tgt; }
  std::optional<ArrowIndex> find_arrow(std::string_view id) const;
  ArrowIndex arrow_index(std::string_view id) const;

  ArrowIndex identity(ObjectIndex a) const { return identities_[a]; }
  bool is_identity(ArrowIndex u) const { return identity(src(u)) == u && src(u) == tgt(u); }

  /// f∘g when present in the composition table.
  std::optional<ArrowIndex> compose(ArrowIndex f, ArrowIndex g) const;
  /// f∘g for a composable pair; throws Error(malformed_input) when the table has no entry.
  ArrowIndex composite(ArrowIndex f, ArrowIndex g) const;

  double weight(ArrowIndex u) const { return weights_[u]; }
  const ArrowMap<double>& weights() const noexcept { return weights_; }

  /// I(a): the arrows with target a, in canonical order.
  std::span<const ArrowIndex> incoming(ObjectIndex a) const { return incoming_[a]; }
  /// Position of u inside incoming(tgt(u)).
  std::size_t incoming_position(ArrowIndex u) const { return incoming_position_[u]; }
  /// Hom(b, a) in canonical order.
  std::vector<ArrowIndex> hom(ObjectIndex b, ObjectIndex a) const;

  /// A copy with replaced weights (same arrow order).
  FiniteCategory with_weights(ArrowMap<double> weights) const;

  /// Two-sided inverse of u if one exists in the composition table.
  std::optional<ArrowIndex> inverse(ArrowIndex u) const;
  bool is_groupoid() const;
  /// At most one arrow between any ordered pair of objects.
  bool is_thin() const;

  friend bool operator==(const FiniteCategory& a, const FiniteCategory& b);

 private:
  std::vector<std::string> objects_;
  std::map<std::string, std::size_t, std::less<>> object_lookup_;
  std::vector<Arrow> arrows_;
  std::map<std::string, std::size_t, std::less<>> arrow_lookup_;
  ObjectMap<ArrowIndex> identities_;
  std::vector<std::optional<ArrowIndex>> composition_;  // row f, column g
  ArrowMap<double> weights_;
  ObjectMap<std::vector<ArrowIndex>> incoming_;
  ArrowMap<std::size_t> incoming_position_;
};

using CategoryPtr = std::shared_ptr<const FiniteCategory>;

/// Scans every category axiom: identity laws, associativity, typing of composites and
/// completeness of the composition table, weights finite and nonnegative.
ValidationReport validate_category(const FiniteCategory& cat);

/// I(a) by object name; throws Error(unknown_object) for unknown names.
std::vector<ArrowIndex> incoming_arrows(const FiniteCategory& cat, std::string_view object);

enum class MeasureMode { nsp, left_coherent, bi_coherent };

MeasureMode measure_mode_from_string(std::string_view s);

/// Null-set preservation and pushforward-coherence diagnostics (absolute tolerance 1e-12).
ValidationReport check_measure_properties(const FiniteCategory& cat, MeasureMode mode,
                                          double tol = 1e-12);

}  // namespace cenn
