#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <ranges>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cenn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Index of an object in a FiniteCategory's canonical object order.
enum class ObjectIndex : std::size_t {};
/// Index of an arrow in a FiniteCategory's canonical (lexicographic by id) arrow order.
enum class ArrowIndex : std::size_t {};

constexpr std::size_t idx(ObjectIndex a) noexcept { return static_cast<std::size_t>(a); }
constexpr std::size_t idx(ArrowIndex u) noexcept { return static_cast<std::size_t>(u); }

/// Dense storage keyed by a strong index type.
template <class Key, class T>
class KeyedVector {
 public:
  KeyedVector() = default;
  explicit KeyedVector(std::size_t n, const T& value = T{}) : data_(n, value) {}
  explicit KeyedVector(std::vector<T> data) : data_(std::move(data)) {}

  T& operator[](Key k) { return data_[static_cast<std::size_t>(k)]; }
  const T& operator[](Key k) const { return data_[static_cast<std::size_t>(k)]; }
  T& at(Key k) { return data_.at(static_cast<std::size_t>(k)); }
  const T& at(Key k) const { return data_.at(static_cast<std::size_t>(k)); }

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  void resize(std::size_t n, const T& value = T{}) { data_.resize(n, value); }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  const std::vector<T>& raw() const noexcept { return data_; }
  std::vector<T>& raw() noexcept { return data_; }

  friend bool operator==(const KeyedVector&, const KeyedVector&) = default;

 private:
  std::vector<T> data_;
};

template <class T>
using ObjectMap = KeyedVector<ObjectIndex, T>;
template <class T>
using ArrowMap = KeyedVector<ArrowIndex, T>;

inline auto object_range(std::size_t n) {
  return std::views::iota(std::size_t{0}, n) |
         std::views::transform([](std::size_t i) { return ObjectIndex{i}; });
}
inline auto arrow_range(std::size_t n) {
  return std::views::iota(std::size_t{0}, n) |
         std::views::transform([](std::size_t i) { return ArrowIndex{i}; });
}

enum class ErrorKind {
  malformed_input,
  unknown_object,
  unknown_arrow,
  shape_mismatch,
  not_a_group,
  not_an_action,
  not_a_homomorphism,
  not_a_groupoid,
  not_thin,
  cycle,
  invalid_complex,
  regime_mismatch,
  unsupported,
  no_retraction,
  empty_unknowns,
  zero_weight,
  type_mismatch,
};

std::string to_string(ErrorKind kind);

/// Engine error: carries the module that raised it and a machine-readable witness.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message,
        nlohmann::json witness = nullptr)
      : std::runtime_error(message),
        kind_(kind),
        module_(std::move(module)),
        witness_(std::move(witness)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const nlohmann::json& witness() const noexcept { return witness_; }

  nlohmann::json to_json() const;

 private:
  ErrorKind kind_;
  std::string module_;
  nlohmann::json witness_;
};

struct Violation {
  std::string kind;
  std::vector<std::string> witness;
  double residual = 0.0;
  std::string detail;
};

/// Ordered list of axiom/law violations. Empty means the checked structure is valid.
struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  void add(std::string kind, std::vector<std::string> witness, double residual = 0.0,
           std::string detail = {});
  std::size_t count(std::string_view kind) const;
  double max_residual() const;
  nlohmann::json to_json() const;
};

/// max |entry|; the sup-norm of a feature stored as |Ω| x n.
double sup_norm(const Matrix& m);
/// Operator norm induced by the l-infinity vector norm (max absolute row sum).
double operator_norm(const Matrix& m);

/// Point-major, fiber-minor flattening of a |Ω| x n feature.
Vector flatten(const Matrix& feature);
Matrix unflatten(const Vector& v, Eigen::Index points, Eigen::Index fiber);

}  // namespace cenn
