#include "cenn/common.hpp"

#include <algorithm>
#include <cmath>

namespace cenn {

std::string to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_input: return "malformed_input";
    case ErrorKind::unknown_object: return "unknown_object";
    case ErrorKind::unknown_arrow: return "unknown_arrow";
    case ErrorKind::shape_mismatch: return "shape_mismatch";
    case ErrorKind::not_a_group: return "not_a_group";
    case ErrorKind::not_an_action: return "not_an_action";
    case ErrorKind::not_a_homomorphism: return "not_a_homomorphism";
    case ErrorKind::not_a_groupoid: return "not_a_groupoid";
    case ErrorKind::not_thin: return "not_thin";
    case ErrorKind::cycle: return "cycle";
    case ErrorKind::invalid_complex: return "invalid_complex";
    case ErrorKind::regime_mismatch: return "regime_mismatch";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::no_retraction: return "no_retraction";
    case ErrorKind::empty_unknowns: return "empty_unknowns";
    case ErrorKind::zero_weight: return "zero_weight";
    case ErrorKind::type_mismatch: return "type_mismatch";
  }
  return "unknown";
}

nlohmann::json Error::to_json() const {
  return {{"error",
           {{"kind", to_string(kind_)},
            {"module", module_},
            {"message", what()},
            {"witness", witness_}}}};
}

void ValidationReport::add(std::string kind, std::vector<std::string> witness, double residual,
                           std::string detail) {
  violations.push_back({std::move(kind), std::move(witness), residual, std::move(detail)});
}

std::size_t ValidationReport::count(std::string_view kind) const {
  return static_cast<std::size_t>(std::ranges::count_if(
      violations, [&](const Violation& v) { return v.kind == kind; }));
}

double ValidationReport::max_residual() const {
  double r = 0.0;
  for (const auto& v : violations) r = std::max(r, v.residual);
  return r;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : violations) {
    nlohmann::json j = {{"kind", v.kind}, {"witness", v.witness}, {"residual", v.residual}};
    if (!v.detail.empty()) j["detail"] = v.detail;
    out.push_back(std::move(j));
  }
  return {{"valid", ok()}, {"violations", std::move(out)}};
}

double sup_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double operator_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

Vector flatten(const Matrix& feature) {
  Vector v(feature.size());
  Eigen::Index k = 0;
  for (Eigen::Index p = 0; p < feature.rows(); ++p)
    for (Eigen::Index i = 0; i < feature.cols(); ++i) v(k++) = feature(p, i);
  return v;
}

Matrix unflatten(const Vector& v, Eigen::Index points, Eigen::Index fiber) {
  if (v.size() != points * fiber)
    throw Error(ErrorKind::shape_mismatch, "functors", "flattened length does not match |Ω|·n");
  Matrix m(points, fiber);
  Eigen::Index k = 0;
  for (Eigen::Index p = 0; p < points; ++p)
    for (Eigen::Index i = 0; i < fiber; ++i) m(p, i) = v(k++);
  return m;
}

}  // namespace cenn
