#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace ammlab {

/// Outcome of one property check. A failing report always carries a witness;
/// a passing one may carry diagnostic data or be null.
struct AuditReport {
  std::string property;
  bool passed = true;
  nlohmann::json witness;  // null when absent

  static AuditReport pass(std::string property, nlohmann::json detail = nullptr) {
    return AuditReport{std::move(property), true, std::move(detail)};
  }
  static AuditReport fail(std::string property, nlohmann::json witness) {
    if (witness.is_null()) witness = nlohmann::json::object();
    return AuditReport{std::move(property), false, std::move(witness)};
  }
};

}  // namespace ammlab
