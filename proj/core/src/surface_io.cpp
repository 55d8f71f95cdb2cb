#include <fmt/format.h>

#include "json_util.hpp"
#include "reebpinch/contact_dynamics.hpp"

namespace reebpinch::contact {

using detail::json;

StarshapedSurface surface_from_json(std::string_view text) {
  try {
    const json doc = detail::parse_json(text, "surface");
    const int n = detail::require(doc, "n", "surface").get<int>();
    if (n < 1 || 2 * n > kMaxAmbientDim) {
      throw ContactError(fmt::format("surface.n: {} outside [1, {}]", n, kMaxAmbientDim / 2));
    }
    Vec center = Vec::Zero(2 * n);
    if (auto it = doc.find("center"); it != doc.end() && !it->is_null()) {
      if (!it->is_array() || static_cast<int>(it->size()) != 2 * n) {
        throw ContactError(fmt::format("surface.center: expected {} numbers", 2 * n));
      }
      for (int i = 0; i < 2 * n; ++i) center[i] = (*it)[i].get<double>();
    }
    const auto kind = detail::require(doc, "kind", "surface").get<std::string>();
    const json& params = detail::require(doc, "params", "surface");
    if (kind == "sphere") {
      return StarshapedSurface::sphere(n, detail::require_number(params, "R", "surface.params"),
                                       center);
    }
    if (kind == "ellipsoid") {
      const auto radii =
          detail::require(params, "radii", "surface.params").get<std::vector<double>>();
      if (static_cast<int>(radii.size()) != n) {
        throw ContactError(fmt::format("surface.params.radii: expected {} radii", n));
      }
      return StarshapedSurface::ellipsoid(radii, center);
    }
    if (kind == "radial_series") {
      std::vector<SeriesTerm> terms;
      const json& jt = detail::require(params, "terms", "surface.params");
      for (std::size_t i = 0; i < jt.size(); ++i) {
        const std::string path = fmt::format("surface.params.terms[{}]", i);
        terms.push_back({detail::require_number(jt[i], "coef", path),
                         detail::require(jt[i], "exponents", path).get<std::vector<int>>()});
      }
      return StarshapedSurface::radial_series(
          n, detail::require_number(params, "R", "surface.params"), std::move(terms), center);
    }
    throw ContactError(fmt::format(
        "surface.kind: unknown kind '{}' (expected sphere, ellipsoid or radial_series)", kind));
  } catch (const ContactError&) {
    throw;
  } catch (const std::exception& e) {
    throw ContactError(e.what());
  }
}

std::string surface_to_json(const StarshapedSurface& S) {
  json doc;
  doc["n"] = S.n();
  json center = json::array();
  for (int i = 0; i < S.dim(); ++i) center.push_back(S.center()[i]);
  doc["center"] = center;
  doc["kind"] = std::string(to_string(S.kind()));
  switch (S.kind()) {
    case SurfaceKind::sphere:
      doc["params"] = {{"R", S.R()}};
      break;
    case SurfaceKind::ellipsoid:
      doc["params"] = {{"radii", S.radii()}};
      break;
    case SurfaceKind::radial_series: {
      json terms = json::array();
      for (const auto& t : S.terms()) {
        terms.push_back({{"coef", t.coef}, {"exponents", t.exponents}});
      }
      doc["params"] = {{"R", S.R()}, {"terms", terms}};
      break;
    }
    case SurfaceKind::custom:
      throw ContactError("custom surfaces cannot be serialized");
  }
  return detail::dump17(doc);
}

std::string orbit_csv(const ReebOrbit& o) {
  std::string out = "t";
  const Eigen::Index d = o.points.empty() ? 0 : o.points.front().size();
  for (Eigen::Index i = 1; i <= d; ++i) out += fmt::format(",x_{}", i);
  out += '\n';
  const double N = static_cast<double>(o.points.size());
  for (std::size_t k = 0; k < o.points.size(); ++k) {
    out += numerics::format_double(o.period * static_cast<double>(k) / N);
    for (Eigen::Index i = 0; i < d; ++i) {
      out += ',';
      out += numerics::format_double(o.points[k][i]);
    }
    out += '\n';
  }
  return out;
}

std::string orbit_summary_json(const ReebOrbit& o) {
  json doc = {{"T", o.period},
              {"action", o.action},
              {"residual", o.closure_residual},
              {"multiplicity", o.multiplicity}};
  return detail::dump17(doc);
}

}  // namespace reebpinch::contact
