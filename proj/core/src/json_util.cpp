#include "json_util.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace reebpinch::detail {

namespace {

void write(const json& j, int indent, int depth, std::string& out) {
  const auto pad = [&](int d) {
    if (indent >= 0) {
      out += '\n';
      out.append(static_cast<std::size_t>(d * indent), ' ');
    }
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        pad(depth + 1);
        out += json(it.key()).dump();
        out += indent >= 0 ? ": " : ":";
        write(it.value(), indent, depth + 1, out);
      }
      pad(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        pad(depth + 1);
        write(v, indent, depth + 1, out);
      }
      pad(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
      } else {
        out += fmt::format("{:.17g}", v);
      }
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump17(const json& j, int indent) {
  std::string out;
  write(j, indent, 0, out);
  return out;
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string reason = e.what();
    if (auto pos = reason.find(": "); pos != std::string::npos) {
      reason = reason.substr(pos + 2);
    }
    throw std::runtime_error(fmt::format("{}:{}:{}: {}", what, line, col, reason));
  }
}

const json& require(const json& j, std::string_view key, std::string_view path) {
  if (!j.is_object()) {
    throw std::runtime_error(fmt::format("{}: expected an object", path));
  }
  auto it = j.find(std::string(key));
  if (it == j.end()) {
    throw std::runtime_error(fmt::format("{}: missing field '{}'", path, key));
  }
  return *it;
}

double require_number(const json& j, std::string_view key, std::string_view path) {
  const json& v = require(j, key, path);
  if (!v.is_number()) {
    throw std::runtime_error(
        fmt::format("{}.{}: expected a number", path, key));
  }
  return v.get<double>();
}

}  // namespace reebpinch::detail
