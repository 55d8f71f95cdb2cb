#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "json_util.hpp"
#include "reebpinch/numerics.hpp"
#include "reebpinch/radial_profile.hpp"

namespace reebpinch::profile {

using detail::json;

std::string profile_to_json(const RadialProfile& p) {
  const auto& core = p.core();
  const auto& sh = p.shape();
  json doc;
  doc["version"] = kProfileFormatVersion;
  doc["kind"] = p.kind() == ProfileKind::base ? "base" : "rescaled";
  doc["core"] = {{"R0", core.R0}, {"A", core.A}, {"c", core.c}, {"B", core.B()}};
  doc["shape"] = {{"eps", sh.eps},   {"delta", sh.delta}, {"delta_bar", sh.delta_bar},
                  {"C", sh.C},       {"D", sh.D},         {"r_flat", sh.r_flat},
                  {"h0", sh.h0},     {"h_inf", sh.h_inf}};
  json knots = json::array();
  for (double r : p.knots()) {
    const auto v = p.eval(r);
    knots.push_back({{"r", r}, {"h", v.h}, {"dh", v.dh}, {"ddh", v.ddh}});
  }
  doc["knots"] = knots;
  json pieces = json::array();
  for (std::size_t i = 0; i < p.pieces().size(); ++i) {
    const auto& pc = p.pieces()[i];
    json range = json::array({pc.r_lo, nullptr});
    if (std::isfinite(pc.r_hi)) range[1] = pc.r_hi;
    pieces.push_back({{"kind", std::string(to_string(pc.kind))},
                      {"range", range},
                      {"coeffs", json::array({pc.coeffs[0], pc.coeffs[1],
                                              pc.coeffs[2], pc.coeffs[3]})},
                      {"h_lo", p.anchors()[i]}});
  }
  doc["pieces"] = pieces;
  return detail::dump17(doc);
}

RadialProfile profile_from_json(std::string_view text) {
  try {
    const json doc = detail::parse_json(text, "profile");
    const int version = detail::require(doc, "version", "profile").get<int>();
    if (version != kProfileFormatVersion) {
      throw ProfileError(fmt::format(
          "profile: unsupported format version {} (expected {})", version,
          kProfileFormatVersion));
    }
    const json& jc = detail::require(doc, "core", "profile");
    CoreParams core{detail::require_number(jc, "R0", "profile.core"),
                    detail::require_number(jc, "A", "profile.core"),
                    detail::require_number(jc, "c", "profile.core")};
    const json& js = detail::require(doc, "shape", "profile");
    ShapeParams sh;
    sh.eps = detail::require_number(js, "eps", "profile.shape");
    sh.delta = detail::require_number(js, "delta", "profile.shape");
    sh.delta_bar = detail::require_number(js, "delta_bar", "profile.shape");
    sh.C = detail::require_number(js, "C", "profile.shape");
    sh.D = detail::require_number(js, "D", "profile.shape");
    sh.r_flat = detail::require_number(js, "r_flat", "profile.shape");
    sh.h0 = detail::require_number(js, "h0", "profile.shape");
    sh.h_inf = detail::require_number(js, "h_inf", "profile.shape");

    std::vector<Piece> pieces;
    std::vector<double> anchors;
    const json& jp = detail::require(doc, "pieces", "profile");
    if (!jp.is_array()) throw ProfileError("profile.pieces: expected an array");
    for (std::size_t i = 0; i < jp.size(); ++i) {
      const std::string path = fmt::format("profile.pieces[{}]", i);
      const json& e = jp[i];
      Piece pc;
      pc.kind = piece_kind_from_string(
          detail::require(e, "kind", path).get<std::string>());
      const json& range = detail::require(e, "range", path);
      if (!range.is_array() || range.size() != 2) {
        throw ProfileError(path + ".range: expected [lo, hi]");
      }
      pc.r_lo = range[0].get<double>();
      pc.r_hi = range[1].is_null() ? std::numeric_limits<double>::infinity()
                                   : range[1].get<double>();
      const json& co = detail::require(e, "coeffs", path);
      if (!co.is_array() || co.size() != 4) {
        throw ProfileError(path + ".coeffs: expected 4 numbers");
      }
      for (int k = 0; k < 4; ++k) pc.coeffs[k] = co[k].get<double>();
      pieces.push_back(pc);
      anchors.push_back(detail::require_number(e, "h_lo", path));
    }
    auto p = RadialProfile::from_pieces(core, sh, std::move(pieces),
                                        std::move(anchors));
    const auto kind = detail::require(doc, "kind", "profile").get<std::string>();
    if (kind == "rescaled") return p.rescaled_copy();
    if (kind != "base") throw ProfileError("profile.kind: expected base or rescaled");
    return p;
  } catch (const ProfileError&) {
    throw;
  } catch (const std::exception& e) {
    throw ProfileError(e.what());
  }
}

std::string profile_curve_csv(const RadialProfile& p, int points) {
  const auto& sh = p.shape();
  const double k = p.scale();
  const double lo = std::log(k * sh.delta_bar / 4.0);
  const double hi = std::log(k * std::max(sh.r_flat, p.core().B()) * 2.0);
  std::string out = "r,h,dh,ddh\n";
  out += fmt::format("{},{},{},{}\n", 0, numerics::format_double(p.h(0.0)), 0, 0);
  for (int i = 0; i < points; ++i) {
    const double r = std::exp(lo + (hi - lo) * i / std::max(1, points - 1));
    const auto v = p.eval(r);
    out += fmt::format("{},{},{},{}\n", numerics::format_double(r),
                       numerics::format_double(v.h), numerics::format_double(v.dh),
                       numerics::format_double(v.ddh));
  }
  return out;
}

}  // namespace reebpinch::profile
