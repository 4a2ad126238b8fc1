#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ammlab/audit_report.hpp"
#include "ammlab/mechanisms.hpp"
#include "ammlab/orders.hpp"
#include "ammlab/scenarios.hpp"

namespace ammlab {

using json = nlohmann::json;

/// Rates travel as numbers, infinity as the string "inf".
json to_json(const ExtRate& r);
ExtRate rate_from_json(const json& j, std::string_view where);

/// {"type": "buy_x", "rate": 2 | "inf", "qty": 30, "aux": 1}; aux optional.
json to_json(const Order& o);
/// Throws ParameterError naming the offending field.
Order order_from_json(const json& j, std::string_view where);

json to_json(const Outcome& o);
json to_json(const PoolState& p);
json to_json(const BatchResult& r);
json to_json(const ClearingSolution& s);
json to_json(const AuditReport& r);
json to_json(const TrilemmaCertificate& c);

/// Rounds to `digits` significant digits through the decimal form, so the
/// value prints identically everywhere.
double round_significant(double v, int digits = 12);

/// Copy with every float rounded to 12 significant digits and non-finite
/// numbers replaced by "inf" / "-inf" / "nan".
json canonical(const json& j);

/// canonical(j) printed with sorted keys and two-space indentation.
std::string dump_canonical(const json& j);

}  // namespace ammlab
