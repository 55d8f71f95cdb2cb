#include "reebpinch/cli_report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "json_util.hpp"
#include "reebpinch/connecting_ode.hpp"
#include "reebpinch/contact_dynamics.hpp"
#include "reebpinch/orbit_search.hpp"
#include "reebpinch/radial_profile.hpp"

namespace reebpinch::cli {

using detail::json;
namespace fs = std::filesystem;

#ifndef REEBPINCH_VERSION
#define REEBPINCH_VERSION "0.0.0"
#endif

std::string_view version() { return REEBPINCH_VERSION; }

namespace {

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::profile_check, "profile-check"},
    {Command::profile_build, "profile-build"},
    {Command::ode_connect, "ode-connect"},
    {Command::ode_probe, "ode-probe"},
    {Command::surface_orbits, "surface-orbits"},
    {Command::verify_pinch, "verify-pinch"},
    {Command::verify_ellipsoid, "verify-ellipsoid"},
    {Command::report, "report"},
};

Command command_from_string(std::string_view s) {
  for (const auto& [c, name] : kCommands) {
    if (name == s) return c;
  }
  throw std::invalid_argument(fmt::format("unknown command '{}'", s));
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& p, std::string_view content) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write failed for {}", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error(fmt::format("cannot move {} into place", p.string()));
  }
}

contact::StarshapedSurface load_surface(const fs::path& p) {
  try {
    return contact::surface_from_json(read_file(p));
  } catch (const contact::ContactError& e) {
    throw std::runtime_error(fmt::format("{}: {}", p.string(), e.what()));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(fmt::format("{}: {}", p.string(), e.what()));
  }
}

double tol_or(const RunConfig& cfg, double fallback) { return cfg.tol.value_or(fallback); }

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

void RunConfig::validate() const {
  if (!(R0 > 0.0) || !(A > 0.0) || !(c > 0.0)) {
    throw std::invalid_argument("R0, A and c must be positive numbers");
  }
  if (tol && !(*tol > 0.0)) throw std::invalid_argument("--tol must be positive");
  if (seeds == 0) throw std::invalid_argument("--seeds must be positive");
  if (window && !(window->first > 0.0 && window->first < window->second)) {
    throw std::invalid_argument("--window must satisfy 0 < lo < hi");
  }
  auto need_file = [](const std::optional<fs::path>& p, std::string_view flag) {
    if (!p) throw std::invalid_argument(fmt::format("{} is required for this command", flag));
    if (!fs::is_regular_file(*p)) {
      throw std::invalid_argument(fmt::format("{} {}: no such file", flag, p->string()));
    }
  };
  switch (command) {
    case Command::surface_orbits:
    case Command::verify_pinch:
      need_file(surface, "--surface");
      break;
    case Command::report:
      need_file(input, "--input");
      break;
    case Command::verify_ellipsoid:
      if (radii.empty()) throw std::invalid_argument("--radii is required for verify-ellipsoid");
      for (double r : radii) {
        if (!(r > 0.0)) throw std::invalid_argument("--radii entries must be positive");
      }
      break;
    default:
      break;
  }
  if (fs::exists(out) && !fs::is_directory(out)) {
    throw std::invalid_argument(fmt::format("--out {} is not a directory", out.string()));
  }
}

std::string canonical_config(const RunConfig& cfg) {
  json doc;
  doc["command"] = std::string(to_string(cfg.command));
  doc["R0"] = cfg.R0;
  doc["A"] = cfg.A;
  doc["c"] = cfg.c;
  doc["surface"] = cfg.surface ? json::parse(contact::surface_to_json(load_surface(*cfg.surface)))
                               : json(nullptr);
  doc["input"] = cfg.input ? json(numerics::fnv1a(read_file(*cfg.input))) : json(nullptr);
  doc["radii"] = cfg.radii;
  doc["window"] = cfg.window ? json::array({cfg.window->first, cfg.window->second}) : json(nullptr);
  doc["seeds"] = cfg.seeds;
  doc["tol"] = cfg.tol ? json(*cfg.tol) : json(nullptr);
  doc["rng_seed"] = cfg.rng_seed;
  return detail::dump17(doc, -1);
}

std::uint64_t config_hash(const RunConfig& cfg) { return numerics::fnv1a(canonical_config(cfg)); }

std::string config_tag(const RunConfig& cfg) { return fmt::format("{:016x}", config_hash(cfg)); }

namespace {

constexpr const char* kHelpFooter = R"(Artifacts (written to --out, stem <command>-<config hash>):
  <stem>.json             main report (numbers at 17 significant digits)
  <stem>.manifest.json    tool version, config hash, artifact list, wall time
  <stem>-profile.csv      r,h,dh,ddh              (profile-build)
  <stem>-trajectory.csv   s,F,G,rho,margin        (ode-connect)
  <stem>-spectrum.csv     action,period,multiplicity  (verify-pinch, verify-ellipsoid)
  <stem>-orbit-<i>.csv    t,x_1,...,x_2n          (surface-orbits)

Exit status: 0 pass, 1 usage or I/O error, 2 verification failed,
3 not applicable (pinching or starshape hypothesis unmet).
REEBPINCH_THREADS caps the number of search workers.)";

std::pair<double, double> parse_window(const std::vector<double>& v) {
  if (v.size() != 2) throw std::invalid_argument("--window expects lo,hi");
  return {v[0], v[1]};
}

void apply_config_file(RunConfig& cfg, const fs::path& path, std::string& command) {
  const json doc = detail::parse_json(read_file(path), path.string());
  if (!doc.is_object()) throw std::invalid_argument(path.string() + ": config must be an object");
  const fs::path base = path.parent_path();
  for (const auto& [key, val] : doc.items()) {
    const std::string where = fmt::format("{}: key '{}'", path.string(), key);
    try {
      if (key == "command") {
        command = val.get<std::string>();
      } else if (key == "R0") {
        cfg.R0 = val.get<double>();
      } else if (key == "A") {
        cfg.A = val.get<double>();
      } else if (key == "c") {
        cfg.c = val.get<double>();
      } else if (key == "surface") {
        cfg.surface = base / val.get<std::string>();
      } else if (key == "input") {
        cfg.input = base / val.get<std::string>();
      } else if (key == "radii") {
        cfg.radii = val.get<std::vector<double>>();
      } else if (key == "window") {
        cfg.window = parse_window(val.get<std::vector<double>>());
      } else if (key == "seeds") {
        cfg.seeds = val.get<std::size_t>();
      } else if (key == "tol") {
        cfg.tol = val.get<double>();
      } else if (key == "rng_seed") {
        cfg.rng_seed = val.get<std::uint64_t>();
      } else if (key == "out") {
        cfg.out = base / val.get<std::string>();
      } else {
        throw std::invalid_argument(where + ": unknown key");
      }
    } catch (const json::exception& e) {
      throw std::invalid_argument(fmt::format("{}: {}", where, e.what()));
    }
  }
}

}  // namespace

std::optional<RunConfig> parse_args(int argc, const char* const* argv) {
  CLI::App app{"Reeb orbit and Floer-profile toolkit", "reebpinch"};
  app.footer(kHelpFooter);
  app.set_version_flag("--version", std::string(version()));

  std::string command, config, surface, input, out;
  double R0 = 0, A = 0, c = 0, tol = 0;
  std::vector<double> radii, window;
  std::size_t seeds = 0;
  std::uint64_t rng_seed = 0;
  bool json_out = false;

  std::string names;
  for (const auto& [cmd, name] : kCommands) names += fmt::format("{}{}", names.empty() ? "" : ", ", name);
  app.add_option("command", command, "one of: " + names);
  app.add_option("--config", config, "JSON config file; flags override its values");
  auto* oR0 = app.add_option("--R0", R0, "profile parameter R0 (default 1.5)");
  auto* oA = app.add_option("--A", A, "profile parameter A (default 0.5)");
  auto* oc = app.add_option("--c", c, "profile parameter c (default 0.8)");
  auto* osurf = app.add_option("--surface", surface, "surface JSON file");
  auto* oin = app.add_option("--input", input, "report JSON file (report command)");
  auto* oradii = app.add_option("--radii", radii, "ellipsoid radii, comma separated")->delimiter(',');
  auto* owin = app.add_option("--window", window, "action window lo,hi")->delimiter(',');
  auto* oseeds = app.add_option("--seeds", seeds, "search seeds (default 96)");
  auto* otol = app.add_option("--tol", tol, "tolerance (ODE or orbit closure)");
  auto* orng = app.add_option("--rng-seed", rng_seed, "seed of the start-point sequence");
  auto* oout = app.add_option("--out", out, "output directory (default .)");
  app.add_flag("--json", json_out, "print the main report JSON to stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return std::nullopt;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }

  RunConfig cfg;
  std::string file_command;
  if (!config.empty()) apply_config_file(cfg, config, file_command);
  if (command.empty()) command = file_command;
  if (command.empty()) throw std::invalid_argument("no command given (try --help)");
  cfg.command = command_from_string(command);
  if (oR0->count()) cfg.R0 = R0;
  if (oA->count()) cfg.A = A;
  if (oc->count()) cfg.c = c;
  if (osurf->count()) cfg.surface = surface;
  if (oin->count()) cfg.input = input;
  if (oradii->count()) cfg.radii = radii;
  if (owin->count()) cfg.window = parse_window(window);
  if (oseeds->count()) cfg.seeds = seeds;
  if (otol->count()) cfg.tol = tol;
  if (orng->count()) cfg.rng_seed = rng_seed;
  if (oout->count()) cfg.out = out;
  cfg.json = json_out;
  cfg.validate();
  return cfg;
}

namespace {

struct Outcome {
  int status = kExitPass;
  std::string main;  // main report JSON
  std::vector<std::pair<std::string, std::string>> extra;  // suffix, content
  std::string summary;  // one human-readable line
};

json core_json(const profile::CoreParams& core) {
  return {{"R0", core.R0}, {"A", core.A}, {"c", core.c}};
}

Outcome do_profile_check(const RunConfig& cfg) {
  const auto rep = profile::validate_core(cfg.R0, cfg.A, cfg.c);
  json doc;
  doc["core"] = {{"R0", cfg.R0}, {"A", cfg.A}, {"c", cfg.c}};
  json checks = json::array();
  for (const auto& ch : rep.checks) {
    checks.push_back({{"name", ch.name}, {"slack", ch.slack}, {"ok", ch.ok}});
  }
  doc["checks"] = checks;
  doc["B"] = rep.B ? json(*rep.B) : json(nullptr);
  doc["window"] = rep.window_width ? json::array({cfg.A, cfg.A + *rep.window_width}) : json(nullptr);
  doc["pass"] = rep.pass;
  doc["diagnostic"] = rep.diagnostic;
  Outcome o;
  o.status = rep.pass ? kExitPass : kExitFail;
  o.main = detail::dump17(doc);
  o.summary = rep.pass ? fmt::format("core parameters valid: B = {:.9g}, action window [{:.9g}, {:.9g}]",
                                     *rep.B, cfg.A, cfg.A + *rep.window_width)
                       : fmt::format("core parameters invalid: {}", rep.diagnostic);
  return o;
}

Outcome do_profile_build(const RunConfig& cfg) {
  const auto core = profile::make_core(cfg.R0, cfg.A, cfg.c);
  const auto p = profile::build_profile(core);
  const auto rep = profile::verify_profile(p);
  json doc;
  doc["core"] = core_json(core);
  json bullets = json::array();
  for (const auto& b : rep.bullets) {
    bullets.push_back({{"id", b.id}, {"name", b.name}, {"margin", b.margin}, {"pass", b.pass}});
  }
  doc["bullets"] = bullets;
  doc["min_hessian_margin"] = rep.min_hessian_margin;
  doc["max_slope"] = rep.max_slope;
  doc["grid_points"] = rep.grid_points;
  doc["pass"] = rep.pass;
  Outcome o;
  o.status = rep.pass ? kExitPass : kExitFail;
  o.main = detail::dump17(doc);
  o.extra.emplace_back("-profile.json", profile::profile_to_json(p));
  o.extra.emplace_back("-profile.csv", profile::profile_curve_csv(p));
  std::size_t passed = 0;
  for (const auto& b : rep.bullets) passed += b.pass ? 1 : 0;
  o.summary = fmt::format("profile: {}/{} properties hold, min(1 - |r h''|) = {:.6g}", passed,
                          rep.bullets.size(), rep.min_hessian_margin);
  return o;
}

std::shared_ptr<const profile::MonotoneHomotopy> make_homotopy(const RunConfig& cfg) {
  const auto core = profile::make_core(cfg.R0, cfg.A, cfg.c);
  return std::make_shared<const profile::MonotoneHomotopy>(
      profile::certify(profile::build_profile(core)));
}

Outcome do_ode_connect(const RunConfig& cfg) {
  const auto H = make_homotopy(cfg);
  const double tol = tol_or(cfg, 1e-10);
  const auto traj = ode::integrate_connecting(H, 50.0, tol);
  const auto barrier = ode::barrier_curve(*H);
  const double gap = ode::verify_gap(traj, barrier);
  const double target = cfg.R0 * H->base().core().B();
  const double F_end = traj.F.back();
  json doc;
  doc["core"] = core_json(H->base().core());
  doc["tol"] = tol;
  doc["target"] = target;
  doc["F_end"] = F_end;
  doc["s_stop"] = traj.s_stop;
  doc["converged"] = traj.converged;
  doc["gap_margin"] = gap;
  doc["ode_residual"] = ode::ode_residual(traj);
  doc["steps"] = {{"accepted", traj.step_stats.accepted}, {"rejected", traj.step_stats.rejected}};
  const bool pass = traj.converged && gap > 0.0;
  doc["pass"] = pass;
  Outcome o;
  o.status = pass ? kExitPass : kExitFail;
  o.main = detail::dump17(doc);
  o.extra.emplace_back("-trajectory.csv", ode::trajectory_csv(traj, &barrier));
  o.summary = fmt::format("connecting orbit: F -> {:.9g} (target {:.9g}), gap margin {:.3g}", F_end,
                          target, gap);
  return o;
}

Outcome do_ode_probe(const RunConfig& cfg) {
  const auto H = make_homotopy(cfg);
  const double A = H->base().core().A;
  json probes = json::array();
  bool pass = true;
  for (double d : {1e-3, -1e-3}) {
    const auto r = ode::uniqueness_probe(*H, -5.0, A + d, -15.0);
    probes.push_back({{"F0", r.F0},
                      {"F_back", r.F_back},
                      {"ratio", r.ratio},
                      {"blow_up", r.blow_up},
                      {"diverged", r.diverged()}});
    pass = pass && r.diverged();
  }
  const auto traj = ode::integrate_connecting(H, 50.0, tol_or(cfg, 1e-10));
  const auto barrier = ode::barrier_curve(*H);
  const auto adj = ode::radial_adjoint_profile(traj, barrier);
  double dlog_err = 0.0;
  for (std::size_t k = 0; k < adj.s.size() && adj.s[k] <= -1.0; ++k) {
    dlog_err = std::max(dlog_err, std::abs(adj.dlog[k] + 1.0));
  }
  const double z2 = ode::zeta2_coefficient(traj, -1.0);
  pass = pass && z2 == H->base().core().c && dlog_err < 1e-9;
  json doc;
  doc["core"] = core_json(H->base().core());
  doc["probes"] = probes;
  doc["zeta2_at_minus1"] = z2;
  doc["adjoint_dlog_error"] = dlog_err;
  doc["pass"] = pass;
  Outcome o;
  o.status = pass ? kExitPass : kExitFail;
  o.main = detail::dump17(doc);
  o.summary = fmt::format("uniqueness probe: growth ratios {:.3g} / {:.3g}, zeta2 = {}",
                          probes[0]["ratio"].get<double>(), probes[1]["ratio"].get<double>(), z2);
  return o;
}

search::SearchConfig search_config(const RunConfig& cfg) {
  search::SearchConfig sc;
  sc.seeds = cfg.seeds;
  sc.window = cfg.window;
  sc.rng_seed = cfg.rng_seed;
  if (cfg.tol) sc.closure_tol = *cfg.tol;
  return sc;
}

Outcome do_surface_orbits(const RunConfig& cfg) {
  const auto S = load_surface(*cfg.surface);
  const auto sc = search_config(cfg);
  const auto pr = contact::pinch_radii(S);
  const auto window =
      cfg.window.value_or(std::make_pair(std::numbers::pi * pr.R1 * pr.R1, std::numbers::pi * pr.R2 * pr.R2));
  const auto found = search::find_closed_orbits(S, sc, window);
  const auto dd = search::deduplicate(found.orbits, sc.dedupe_tol);
  json doc;
  doc["surface"] = S.label();
  doc["window"] = {window.first, window.second};
  json orbits = json::array();
  Outcome o;
  for (std::size_t i = 0; i < dd.orbits.size(); ++i) {
    const auto& d = dd.orbits[i];
    orbits.push_back(json::parse(contact::orbit_summary_json(d.orbit)));
    orbits.back()["iterates"] = d.iterates;
    orbits.back()["degenerate_family"] = d.degenerate_family;
    o.extra.emplace_back(fmt::format("-orbit-{}.csv", i), contact::orbit_csv(d.orbit));
  }
  doc["orbits"] = orbits;
  doc["search"] = {{"seeds", found.stats.seeds},
                   {"trials", found.stats.trials},
                   {"converged", found.stats.converged},
                   {"outside_window", found.stats.outside_window},
                   {"failed", found.stats.failed}};
  o.main = detail::dump17(doc);
  o.summary = fmt::format("{} closed orbits with period in [{:.9g}, {:.9g}]", dd.orbits.size(),
                          window.first, window.second);
  return o;
}

int verdict_status(search::Verdict v) {
  switch (v) {
    case search::Verdict::pass:
      return kExitPass;
    case search::Verdict::fail:
      return kExitFail;
    case search::Verdict::not_applicable:
      return kExitNotApplicable;
  }
  return kExitFail;
}

std::string verdict_line(const search::SpectrumReport& rep) {
  std::string actions;
  for (const auto& o : rep.orbits) {
    actions += fmt::format("{}{:.9g}pi", actions.empty() ? "" : ", ", o.orbit.action / std::numbers::pi);
  }
  return fmt::format("{}: {} distinct orbits (need {}) [{}] -> {}", rep.surface, rep.distinct_count,
                     rep.cuplength_bound, actions, search::to_string(rep.verdict));
}

Outcome do_verify_pinch(const RunConfig& cfg) {
  const auto S = load_surface(*cfg.surface);
  const auto rep = search::verify_pinching_theorem(S, search_config(cfg));
  json doc = json::parse(search::report_to_json(rep));
  int status = verdict_status(rep.verdict);
  if (rep.verdict != search::Verdict::not_applicable) {
    std::vector<contact::ReebOrbit> orbits;
    for (const auto& o : rep.orbits) orbits.push_back(o.orbit);
    const auto bound = search::verify_period_bound(S, orbits, rep.R1);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& e : bound.entries) worst = std::min(worst, e.slack);
    doc["period_bound"] = {{"bound", bound.bound},
                           {"asserted", bound.asserted},
                           {"pass", bound.pass},
                           {"min_slack", bound.entries.empty() ? json(nullptr) : json(worst)}};
    if (!bound.pass && status == kExitPass) status = kExitFail;
  }
  Outcome o;
  o.status = status;
  o.main = detail::dump17(doc);
  o.extra.emplace_back("-spectrum.csv", search::spectrum_csv(rep));
  o.summary = verdict_line(rep);
  return o;
}

Outcome do_verify_ellipsoid(const RunConfig& cfg) {
  const auto S = contact::StarshapedSurface::ellipsoid(cfg.radii);
  const auto rep = search::verify_pinching_theorem(S, search_config(cfg));
  json doc = json::parse(search::report_to_json(rep));
  int status = verdict_status(rep.verdict);
  if (rep.verdict != search::Verdict::not_applicable) {
    const auto oracle = search::ellipsoid_oracle(cfg.radii, rep.window.second * (1 + 1e-9));
    json expected = json::array();
    std::vector<double> simple;
    for (const auto& e : oracle.orbits) {
      expected.push_back({{"j", e.j}, {"k", e.k}, {"action", e.action}, {"resonant", e.resonant}});
      if (e.k == 1 && e.action >= rep.window.first * (1 - 1e-9)) simple.push_back(e.action);
    }
    bool match = !oracle.resonance && simple.size() == rep.orbits.size();
    for (std::size_t i = 0; match && i < simple.size(); ++i) {
      match = std::abs(rep.orbits[i].orbit.action - simple[i]) <= 1e-6 * simple[i];
    }
    doc["oracle"] = {{"orbits", expected}, {"resonance", oracle.resonance}, {"match", match}};
    if (oracle.resonance) {
      doc["notes"].push_back("resonant radii: oracle comparison skipped, orbits form families");
    } else if (!match && status == kExitPass) {
      status = kExitFail;
    }
  }
  Outcome o;
  o.status = status;
  o.main = detail::dump17(doc);
  o.extra.emplace_back("-spectrum.csv", search::spectrum_csv(rep));
  o.summary = verdict_line(rep);
  return o;
}

Outcome do_report(const RunConfig& cfg) {
  const auto s = search::summarize_report_json(read_file(*cfg.input));
  Outcome o;
  o.main = search::summary_to_json(s);
  if (!s.consistent) {
    o.status = kExitFail;
  } else if (s.verdict == "not-applicable") {
    o.status = kExitNotApplicable;
  } else {
    o.status = s.verdict == "pass" ? kExitPass : kExitFail;
  }
  o.summary = fmt::format("{}: {} distinct orbits (need {}) -> {}{}", s.surface, s.distinct_count,
                          s.cuplength_bound, s.verdict, s.consistent ? "" : " (stored verdict disagrees)");
  return o;
}

Outcome dispatch(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::profile_check:
      return do_profile_check(cfg);
    case Command::profile_build:
      return do_profile_build(cfg);
    case Command::ode_connect:
      return do_ode_connect(cfg);
    case Command::ode_probe:
      return do_ode_probe(cfg);
    case Command::surface_orbits:
      return do_surface_orbits(cfg);
    case Command::verify_pinch:
      return do_verify_pinch(cfg);
    case Command::verify_ellipsoid:
      return do_verify_ellipsoid(cfg);
    case Command::report:
      return do_report(cfg);
  }
  throw std::logic_error("unhandled command");
}

}  // namespace

int run(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = dispatch(cfg);
  } catch (const contact::HypothesisError& e) {
    std::cerr << "not applicable: " << e.what() << '\n';
    return kExitNotApplicable;
  } catch (const profile::ProfileError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kExitFail;
  } catch (const ode::OdeError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kExitFail;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string stem = fmt::format("{}-{}", to_string(cfg.command), config_tag(cfg));
  fs::create_directories(cfg.out);
  std::vector<std::string> files{stem + ".json"};
  write_atomic(cfg.out / files.front(), o.main);
  for (const auto& [suffix, content] : o.extra) {
    files.push_back(stem + suffix);
    write_atomic(cfg.out / files.back(), content);
  }
  json manifest;
  manifest["tool"] = "reebpinch";
  manifest["version"] = std::string(version());
  manifest["command"] = std::string(to_string(cfg.command));
  manifest["config_hash"] = config_tag(cfg);
  manifest["config"] = json::parse(canonical_config(cfg));
  manifest["artifacts"] = files;
  manifest["exit_status"] = o.status;
  manifest["wall_time_s"] = wall;
  write_atomic(cfg.out / (stem + ".manifest.json"), detail::dump17(manifest));

  if (cfg.json) {
    std::cout << o.main << '\n';
  } else {
    std::cout << o.summary << '\n' << "wrote " << (cfg.out / files.front()).string() << '\n';
  }
  return o.status;
}

int main_entry(int argc, const char* const* argv) {
  try {
    const auto cfg = parse_args(argc, argv);
    if (!cfg) return kExitPass;
    return run(*cfg);
  } catch (const std::exception& e) {
    std::cerr << "reebpinch: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace reebpinch::cli
