#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "symtomo/errors.hpp"
#include "symtomo/evolution.hpp"
#include "symtomo/field_io.hpp"
#include "symtomo/marginal_field.hpp"
#include "symtomo/state_catalog.hpp"
#include "symtomo/suites.hpp"
#include "symtomo/tomography.hpp"
#include "symtomo/verify.hpp"

namespace symtomo {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

inline nlohmann::json to_json(const CheckResult& c) {
  nlohmann::json ctx = nlohmann::json::object();
  for (const auto& [k, v] : c.context) ctx[k] = v;
  return {{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"threshold", c.threshold}, {"context", ctx}};
}

inline nlohmann::json to_json(const ComparisonReport& r) {
  return {{"max_abs", r.max_abs},
          {"l2", r.l2},
          {"axes", r.axes},
          {"argmax_location", r.argmax_location},
          {"n_points", r.n_points}};
}

inline nlohmann::json report_json(const std::string& suite, const std::vector<CheckResult>& checks) {
  auto arr = nlohmann::json::array();
  std::size_t failed = 0;
  for (const auto& c : checks) {
    arr.push_back(to_json(c));
    failed += c.passed ? 0 : 1;
  }
  return {{"suite", suite}, {"passed", failed == 0}, {"n_checks", checks.size()}, {"n_failed", failed}, {"checks", arr}};
}

/// Grid and solver defaults; `--config FILE` (JSON) overrides any subset.
struct CliDefaults {
  double phase_half_width = kDefaultPhaseHalfWidth;
  std::size_t phase_points = kDefaultPhasePoints;
  double x_half_width = kDefaultXHalfWidth;
  std::size_t x_points = kDefaultXPoints;
  FieldGrid field{};
  double ab_half_width = 12.0;
  std::size_t ab_points = 49;
  double out_half_width = 4.0;
  std::size_t out_points = 129;
  double density_half_width = 6.0;
  std::size_t density_points = 121;
  ReconstructionConfig reconstruction{};
  double dt = 0.01;

  static CliDefaults from_json(const nlohmann::json& j) {
    CliDefaults d;
    auto num = [](const nlohmann::json& o, const char* key, auto& target) {
      if (auto it = o.find(key); it != o.end()) target = it->get<std::decay_t<decltype(target)>>();
    };
    auto section = [&](const char* name) -> const nlohmann::json& {
      static const nlohmann::json empty = nlohmann::json::object();
      auto it = j.find(name);
      if (it == j.end()) return empty;
      if (!it->is_object()) throw DomainError(std::string("config section '") + name + "' must be an object");
      return *it;
    };
    static const char* known[] = {"phase_grid", "x_grid", "field_grid", "inversion", "density", "solver"};
    for (const auto& [k, v] : j.items())
      if (std::find(std::begin(known), std::end(known), k) == std::end(known))
        throw DomainError("unknown config section '" + k + "'");
    try {
      num(section("phase_grid"), "half_width", d.phase_half_width);
      num(section("phase_grid"), "points", d.phase_points);
      num(section("x_grid"), "half_width", d.x_half_width);
      num(section("x_grid"), "points", d.x_points);
      double box = d.field.mu.stop(), fx = d.field.x.stop();
      std::size_t fn = d.field.mu.size(), fxn = d.field.x.size();
      const auto& fg = section("field_grid");
      num(fg, "half_width", box);
      num(fg, "points", fn);
      num(fg, "x_half_width", fx);
      num(fg, "x_points", fxn);
      num(fg, "rho_min", d.field.rho_min);
      d.field.mu = d.field.nu = UniformGrid::symmetric(box, fn);
      d.field.x = UniformGrid::symmetric(fx, fxn);
      const auto& inv = section("inversion");
      num(inv, "ab_half_width", d.ab_half_width);
      num(inv, "ab_points", d.ab_points);
      num(inv, "q_half_width", d.out_half_width);
      num(inv, "q_points", d.out_points);
      const auto& den = section("density");
      num(den, "q_half_width", d.density_half_width);
      num(den, "q_points", d.density_points);
      num(den, "mu_range", d.reconstruction.mu_range);
      num(den, "mu_samples", d.reconstruction.mu_samples);
      num(den, "y_range", d.reconstruction.y_range);
      num(den, "y_samples", d.reconstruction.y_samples);
      num(section("solver"), "dt", d.dt);
    } catch (const nlohmann::json::exception& e) {
      throw DomainError(std::string("config value has the wrong type: ") + e.what());
    }
    return d;
  }
};

namespace cli_detail {

struct StateArgs {
  std::string kind = "ground";
  double q0 = 0.0;
  double p0 = 0.0;
  double t = 0.0;
  std::string dyn = "static";

  StateSpec state() const {
    StateSpec s{parse_state_kind(kind), q0, p0};
    s.validate();
    return s;
  }
  nlohmann::json provenance() const { return {{"state", kind}, {"q0", q0}, {"p0", p0}, {"t", t}, {"dynamics", dyn}}; }
};

inline void add_state_options(CLI::App* cmd, StateArgs& a, bool with_time) {
  cmd->add_option("--state", a.kind, "ground | excited1 | coherent | oddcat")->required();
  cmd->add_option("--q0", a.q0, "position displacement (coherent, oddcat)");
  cmd->add_option("--p0", a.p0, "momentum displacement (coherent, oddcat)");
  if (with_time) {
    cmd->add_option("--t", a.t, "time");
    cmd->add_option("--dyn", a.dyn, "static | free | harmonic");
  }
}

// "free" | "harmonic" | "linear:c1"
inline PotentialSpec parse_evolution_dynamics(const std::string& s) {
  if (s == "free") return PotentialSpec::free();
  if (s == "harmonic") return PotentialSpec::harmonic();
  if (s.rfind("linear:", 0) == 0) {
    const std::string v = s.substr(7);
    std::size_t used = 0;
    double c1 = 0.0;
    try {
      c1 = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(c1)) throw DomainError("bad linear coefficient in '" + s + "'");
    return PotentialSpec::linear(c1);
  }
  throw DomainError("unknown dynamics '" + s + "' (free | harmonic | linear:c1)");
}

inline void emit_field(const std::string& path, std::ostream& out, const AnyField& f, const nlohmann::json& prov) {
  if (path.empty() || path == "-") {
    write_field(out, f, prov);
  } else {
    write_field_file(path, f, prov);
  }
}

template <class T>
T load_as(const std::string& path, const char* command) {
  FieldFile file = read_field_file(path);
  if (auto* f = std::get_if<T>(&file.field)) return std::move(*f);
  throw DomainError(std::string(command) + ": input '" + path + "' holds a " + std::string(field_kind(file.field)) +
                    " field");
}

inline void warn_all(std::ostream& err, const Diagnostics& d) {
  for (const auto& w : d.warnings) err << "warning: " << w << '\n';
}

// Returns the value following --config, if any.
inline std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

}  // namespace cli_detail

/// Runs one command line (without the program name). Output files go where
/// --out/--report point, or to `out` when omitted.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;

  CliDefaults def;
  if (auto path = find_config(args)) {
    try {
      std::ifstream in(*path);
      if (!in) throw DomainError("cannot open config '" + *path + "'");
      def = CliDefaults::from_json(nlohmann::json::parse(in));
    } catch (const std::exception& e) {
      err << "error: config: " << e.what() << '\n';
      return kExitUsage;
    }
  }

  CLI::App app{"symplectic tomography toolkit: Wigner functions, marginals, evolution, reconstruction", "symtomo"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file presetting grid and solver defaults");

  // state-wigner
  StateArgs sw;
  std::string sw_out;
  double sw_hw = def.phase_half_width;
  std::size_t sw_n = def.phase_points;
  auto* cmd_sw = app.add_subcommand("state-wigner", "sample a catalog Wigner function on a phase-space grid");
  add_state_options(cmd_sw, sw, true);
  cmd_sw->add_option("--half-width", sw_hw, "grid spans [-w, w] in q and p");
  cmd_sw->add_option("--points", sw_n, "points per axis");
  cmd_sw->add_option("--out", sw_out, "output file (stdout if omitted)");

  // marginal
  StateArgs mg;
  double m_mu = 1.0, m_nu = 0.0, m_delta = 0.0;
  double m_hw = def.x_half_width;
  std::size_t m_n = def.x_points;
  bool m_field = false;
  std::string m_out;
  auto* cmd_m = app.add_subcommand("marginal", "sample a catalog marginal: one slice or a full (mu,nu,X) field");
  add_state_options(cmd_m, mg, true);
  cmd_m->add_option("--mu", m_mu, "position weight");
  cmd_m->add_option("--nu", m_nu, "momentum weight");
  cmd_m->add_option("--delta", m_delta, "shift");
  cmd_m->add_option("--x-half-width", m_hw, "slice X grid spans [-w, w]");
  cmd_m->add_option("--x-points", m_n, "slice X points");
  cmd_m->add_flag("--field", m_field, "write a marginal_field on the configured (mu,nu,X) grid instead of one slice");
  cmd_m->add_option("--out", m_out, "output file (stdout if omitted)");

  // evolve
  std::string ev_in, ev_dyn, ev_solver = "char", ev_scheme = "semi-lagrangian", ev_out;
  double ev_t = 0.0, ev_dt = def.dt;
  auto* cmd_ev = app.add_subcommand("evolve", "advance a marginal_field in time");
  cmd_ev->add_option("--in", ev_in, "marginal_field file")->required();
  cmd_ev->add_option("--dyn", ev_dyn, "free | harmonic | linear:c1")->required();
  cmd_ev->add_option("--t", ev_t, "elapsed time")->required();
  cmd_ev->add_option("--solver", ev_solver, "char (exact characteristics) | pde")
      ->check(CLI::IsMember({"char", "pde"}));
  cmd_ev->add_option("--dt", ev_dt, "pde time step");
  cmd_ev->add_option("--scheme", ev_scheme, "pde scheme")->check(CLI::IsMember({"semi-lagrangian", "upwind"}));
  cmd_ev->add_option("--out", ev_out, "output file (stdout if omitted)");

  // invert
  std::string inv_in, inv_out, inv_chi_out;
  double inv_ab = def.ab_half_width, inv_q = def.out_half_width;
  std::size_t inv_abn = def.ab_points, inv_qn = def.out_points;
  auto* cmd_inv = app.add_subcommand("invert", "marginal_field -> characteristic function -> Wigner function");
  cmd_inv->add_option("--in", inv_in, "marginal_field file")->required();
  cmd_inv->add_option("--out", inv_out, "Wigner output file (stdout if omitted)");
  cmd_inv->add_option("--chi-out", inv_chi_out, "also write the characteristic grid");
  cmd_inv->add_option("--ab-half-width", inv_ab, "(a,b) grid spans [-w, w]");
  cmd_inv->add_option("--ab-points", inv_abn, "(a,b) points per axis");
  cmd_inv->add_option("--q-half-width", inv_q, "output grid spans [-w, w]");
  cmd_inv->add_option("--q-points", inv_qn, "output points per axis");

  // density-matrix
  std::string dm_in, dm_out;
  double dm_s = def.reconstruction.s, dm_q = def.density_half_width;
  std::size_t dm_qn = def.density_points;
  auto* cmd_dm = app.add_subcommand("density-matrix", "marginal_field -> position density matrix");
  cmd_dm->add_option("--in", dm_in, "marginal_field file")->required();
  cmd_dm->add_option("--s", dm_s, "kernel parameter s (result is s-independent)");
  cmd_dm->add_option("--q-half-width", dm_q, "q grid spans [-w, w]");
  cmd_dm->add_option("--q-points", dm_qn, "q points");
  cmd_dm->add_option("--out", dm_out, "output file (stdout if omitted)");

  // reduce
  std::string red_pot;
  auto* cmd_red = app.add_subcommand("reduce", "print the marginal evolution equation for V(q) = c0 + c1 q + c2 q^2");
  cmd_red->add_option("--potential", red_pot, "comma-separated coefficients c0,c1,c2")->required();

  // check
  std::string ck_suite, ck_report;
  StateArgs ck_state;
  auto* cmd_ck = app.add_subcommand("check", "run a verification suite and write a JSON report");
  cmd_ck->add_option("--suite", ck_suite, "roundtrip | evolution | paper-examples")
      ->required()
      ->check(CLI::IsMember({"roundtrip", "evolution", "paper-examples"}));
  cmd_ck->add_option("--state", ck_state.kind, "restrict to one catalog state");
  cmd_ck->add_option("--q0", ck_state.q0, "position displacement");
  cmd_ck->add_option("--p0", ck_state.p0, "momentum displacement");
  cmd_ck->add_option("--report", ck_report, "report file (stdout if omitted)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cmd_sw) {
      const auto field = sample_wigner_field(sw.state(), UniformGrid::symmetric(sw_hw, sw_n),
                                             UniformGrid::symmetric(sw_hw, sw_n), sw.t, parse_dynamics(sw.dyn));
      warn_all(err, field.diagnostics);
      emit_field(sw_out, out, field, sw.provenance());
    } else if (*cmd_m) {
      const auto source = marginal_source(mg.state(), mg.t, parse_dynamics(mg.dyn));
      if (m_field) {
        const auto field = make_marginal_field(source, def.field);
        warn_all(err, field.diagnostics);
        emit_field(m_out, out, field, mg.provenance());
      } else {
        auto slice = sample_marginal_slice(source, {m_mu, m_nu, m_delta}, UniformGrid::symmetric(m_hw, m_n));
        emit_field(m_out, out, slice, mg.provenance());
      }
    } else if (*cmd_ev) {
      const auto V = parse_evolution_dynamics(ev_dyn);
      const auto coeffs = reduce_equation(V);
      FieldFile in = read_field_file(ev_in);
      auto* field = std::get_if<MarginalField>(&in.field);
      if (!field) throw DomainError("evolve: input holds a " + std::string(field_kind(in.field)) + " field");
      nlohmann::json prov{{"input", ev_in}, {"input_provenance", in.meta.value("provenance", nlohmann::json::object())},
                          {"dynamics", ev_dyn}, {"t", ev_t}, {"solver", ev_solver}};
      MarginalField result;
      if (ev_solver == "char") {
        const MarginalField& initial = *field;
        const auto exact = evolve_characteristics([&initial](double X, const TomographyParams& m) { return initial(X, m); },
                                                  V, ev_t);
        result = make_marginal_field(exact, initial.geometry());
      } else {
        prov["dt"] = ev_dt;
        prov["scheme"] = ev_scheme;
        const Scheme scheme = ev_scheme == "upwind" ? Scheme::Upwind : Scheme::SemiLagrangian;
        result = evolve_pde(*field, coeffs, {ev_dt, ev_t, scheme});
      }
      warn_all(err, result.diagnostics);
      emit_field(ev_out, out, result, prov);
    } else if (*cmd_inv) {
      const auto field = load_as<MarginalField>(inv_in, "invert");
      const auto ab = UniformGrid::symmetric(inv_ab, inv_abn);
      const auto chi = characteristic_from_marginal(field, ab, ab);
      if (!inv_chi_out.empty()) write_field_file(inv_chi_out, chi, {{"input", inv_in}});
      const auto q = UniformGrid::symmetric(inv_q, inv_qn);
      const auto w = wigner_from_characteristic(chi, q, q);
      warn_all(err, w.diagnostics);
      emit_field(inv_out, out, w, {{"input", inv_in}});
    } else if (*cmd_dm) {
      const auto field = load_as<MarginalField>(dm_in, "density-matrix");
      ReconstructionConfig cfg = def.reconstruction;
      cfg.s = dm_s;
      const auto rho = density_matrix_from_marginal(field, UniformGrid::symmetric(dm_q, dm_qn), cfg);
      warn_all(err, rho.diagnostics);
      emit_field(dm_out, out, rho, {{"input", dm_in}, {"s", dm_s}});
    } else if (*cmd_red) {
      out << reduce_equation(PotentialSpec::parse(red_pot)).describe() << '\n';
    } else if (*cmd_ck) {
      std::vector<StateSpec> states = catalog_states();
      if (cmd_ck->count("--state")) states = {ck_state.state()};
      std::vector<CheckResult> checks;
      if (ck_suite == "roundtrip") checks = roundtrip_suite(states);
      if (ck_suite == "evolution") checks = evolution_suite(states);
      if (ck_suite == "paper-examples") checks = paper_examples_suite();
      const auto report = report_json(ck_suite, checks);
      if (ck_report.empty() || ck_report == "-") {
        out << report.dump(2) << '\n';
      } else {
        std::ofstream f(ck_report);
        if (!f) throw Error("cannot open '" + ck_report + "' for writing");
        f << report.dump(2) << '\n';
      }
      for (const auto& c : checks)
        if (!c.passed) err << "FAILED " << c.name << ": measured " << c.measured << ", threshold " << c.threshold << '\n';
      return all_passed(checks) ? kExitOk : kExitFailure;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace symtomo
