#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace reebpinch::detail {

using json = nlohmann::ordered_json;

/// Serializes like json::dump(2) but writes every floating-point number with
/// 17 significant digits. Non-finite numbers become null.
std::string dump17(const json& j, int indent = 2);

/// Parses `text`, turning parse errors into std::runtime_error messages of the
/// form "<what>:<line>:<column>: <reason>".
json parse_json(std::string_view text, std::string_view what);

/// Fetches a required member, with a path-qualified error if missing.
const json& require(const json& j, std::string_view key, std::string_view path);
double require_number(const json& j, std::string_view key, std::string_view path);

}  // namespace reebpinch::detail
