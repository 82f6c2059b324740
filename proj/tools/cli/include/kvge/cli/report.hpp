#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>

#include "kvge/certify.hpp"
#include "kvge/grid_function.hpp"
#include "kvge/solve.hpp"

namespace kvge::cli {

/// Version of the JSON report layout. Bump on any field change.
inline constexpr int kReportSchemaVersion = 1;

/// Finite numbers as JSON numbers, inf and NaN as null.
nlohmann::json number_json(double value);

/// Exact form of `value` when it is a small rational r = a/b (b <= 1000) or
/// r * sqrt(k) for squarefree k <= 100, within 1e-12 relative.
std::optional<std::string> closed_form(double value);

/// "3/32 = 0.09375" when a closed form exists, otherwise the float alone.
std::string describe_number(double value);

nlohmann::json bounds_json(const RhoBounds& bounds);
nlohmann::json certificate_json(const Certificate& certificate);
nlohmann::json profile_json(const SolutionProfile& profile);
nlohmann::json outer_json(const OuterResult& result);

void print_certificate(std::ostream& out, const Certificate& certificate);
void print_outer(std::ostream& out, const OuterResult& result);

/// Header `t,u`, one row per node, 17 significant digits.
void write_csv(std::ostream& out, const GridFunction& u);
void write_csv_file(const std::string& path, const GridFunction& u);

/// `path` for index 0, otherwise the stem suffixed with `_<index>`.
std::string indexed_path(const std::string& path, std::size_t index);

}  // namespace kvge::cli
