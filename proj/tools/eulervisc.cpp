// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eulervisc/runner.hpp"

namespace ev = eulervisc;

namespace {

struct RunArgs {
  std::string config;
  std::string out;
  int snapshot_every = -1;
  bool override_unsafe = false;
  bool quiet = false;
};

ev::RunConfig load_config(const RunArgs& a, ev::ModelKind expect) {
  std::ifstream is(a.config);
  if (!is) throw ev::Error("cannot open config " + a.config);
  std::ostringstream ss;
  ss << is.rdbuf();
  std::string text = ss.str();
  if (a.override_unsafe) text += "\n[output]\noverride_unsafe = 1\n";
  ev::RunConfig cfg = ev::parse_config(text);
  if (cfg.model != expect)
    throw ev::Error("config selects the other model; use the matching subcommand");
  if (!a.out.empty()) cfg.out_dir = a.out;
  if (a.snapshot_every >= 0) cfg.snapshot_every = a.snapshot_every;
  if (a.quiet) cfg.quiet = true;
  return cfg;
}

int do_run(const RunArgs& a, ev::ModelKind kind) {
  try {
    const ev::RunConfig cfg = load_config(a, kind);
    const ev::RunResult r = ev::run(cfg);
    return r.ok ? 0 : 1;
  } catch (const ev::ValidationError& e) {
    std::cerr << e.what() << '\n';
    for (const auto& v : e.violations()) std::cerr << "  - " << v << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

int do_audit(const std::string& csv_path) {
  std::ifstream is(csv_path);
  if (!is) {
    std::cerr << "error: cannot open " << csv_path << '\n';
    return 2;
  }
  std::string line;
  if (!std::getline(is, line)) {
    std::cerr << "error: empty csv\n";
    return 2;
  }
  // locate the slack and budget columns from the header
  std::vector<std::string> cols;
  {
    std::istringstream hs(line);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  int i_slack = -1, i_budget = -1, i_mass = -1, i_minrho = -1;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "inequality_slack") i_slack = int(i);
    if (cols[i] == "slack_budget") i_budget = int(i);
    if (cols[i] == "mass") i_mass = int(i);
    if (cols[i] == "min_rho") i_minrho = int(i);
  }
  if (i_slack < 0 || i_budget < 0) {
    std::cerr << "error: csv lacks slack columns\n";
    return 2;
  }
  int rows = 0, violations = 0;
  double max_slack = 0.0, mass0 = 0.0, mass_drift = 0.0, min_rho = HUGE_VAL;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string c;
    std::vector<double> v;
    while (std::getline(ls, c, ',')) v.push_back(std::stod(c));
    if (v.size() != cols.size()) continue;
    ++rows;
    max_slack = std::max(max_slack, v[i_slack]);
    if (v[i_slack] > v[i_budget]) ++violations;
    if (i_mass >= 0) {
      if (rows == 1) mass0 = v[i_mass];
      mass_drift = std::max(mass_drift, std::abs(v[i_mass] - mass0));
    }
    if (i_minrho >= 0) min_rho = std::min(min_rho, v[i_minrho]);
  }
  std::cout << "rows=" << rows << "\nmax_slack=" << max_slack
            << "\nslack_violations=" << violations
            << "\nmass_drift_abs=" << mass_drift << "\nmin_rho=" << min_rho
            << "\nverdict=" << (violations == 0 ? "PASS" : "FAIL") << '\n';
  return violations == 0 ? 0 : 1;
}

int do_convexity(const std::string& material, double K, double G, double G_MR,
                 double pw, double f_box, double j_lo, double j_hi, int samples) {
  try {
    auto mat = ev::make_polyconvex(material, K, G, G_MR, -1.0, "log", 2.0, 1.0,
                                   2.0, pw);
    const ev::ConvexityReport rep =
        ev::convexity_probe(*mat, f_box, j_lo, j_hi, samples);
    std::cout << (rep.pass ? "PASS" : "FAIL") << ": min eigenvalue "
              << rep.min_eig << " (scale " << rep.min_eig_scale << ") over "
              << rep.samples << " samples\n";
    if (!rep.pass) {
      std::cout << "witness J = " << rep.witness_J << ", F =";
      for (double e : rep.witness_F.e) std::cout << ' ' << e;
      std::cout << '\n';
    }
    return rep.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

int do_convergence(const RunArgs& a, const std::string& taus_csv) {
  try {
    std::ifstream is(a.config);
    if (!is) throw ev::Error("cannot open config " + a.config);
    std::ostringstream ss;
    ss << is.rdbuf();
    ev::RunConfig cfg = ev::parse_config(ss.str());
    cfg.quiet = true;
    std::vector<double> taus;
    std::istringstream ts(taus_csv);
    std::string t;
    while (std::getline(ts, t, ',')) taus.push_back(std::stod(t));
    const auto res = ev::convergence_study(
        taus, [&](double tau) { return ev::run_final_state(cfg, tau); });
    std::cout << "taus:";
    for (double x : res.taus) std::cout << ' ' << x;
    std::cout << "\nerrors (vs finest):";
    for (double x : res.errors) std::cout << ' ' << x;
    std::cout << "\nobserved orders:";
    for (double x : res.orders) std::cout << ' ' << x;
    std::cout << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eulervisc: implicit Eulerian visco-elastodynamics"};
  app.require_subcommand(1);

  RunArgs rs, rl, rc;
  auto add_run_opts = [](CLI::App* cmd, RunArgs& a) {
    cmd->add_option("--config", a.config, "run configuration file")->required();
    cmd->add_option("--out", a.out, "output directory");
    cmd->add_option("--snapshot-every", a.snapshot_every,
                    "emit a snapshot every N steps");
    cmd->add_flag("--override-unsafe", a.override_unsafe,
                  "run despite violated model hypotheses");
    cmd->add_flag("--quiet", a.quiet, "suppress console output");
  };

  CLI::App* run_small = app.add_subcommand("run-small", "run the linearized convective model");
  add_run_opts(run_small, rs);
  CLI::App* run_large = app.add_subcommand("run-large", "run the finite-strain model");
  add_run_opts(run_large, rl);

  std::string audit_csv;
  CLI::App* audit = app.add_subcommand("audit", "re-check an emitted audit CSV");
  audit->add_option("csv", audit_csv, "audit csv path")->required();

  std::string cx_material = "neo-hookean";
  double cx_K = 1.0, cx_G = 1.0, cx_GMR = 0.5, cx_pw = 2.0 / 3.0;
  double cx_fbox = 2.0, cx_jlo = 0.5, cx_jhi = 2.0;
  int cx_samples = 2000;
  CLI::App* cx = app.add_subcommand("convexity-check",
                                    "Hessian-sampling convexity probe of a material");
  cx->add_option("material", cx_material,
                 "neo-hookean | mooney-rivlin | referential-neo-hookean | "
                 "barotropic | fj-power");
  cx->add_option("--K", cx_K, "bulk modulus");
  cx->add_option("--G", cx_G, "shear modulus");
  cx->add_option("--G-MR", cx_GMR, "second shear modulus");
  cx->add_option("--p", cx_pw, "fj-power exponent");
  cx->add_option("--f-box", cx_fbox, "F sampling box");
  cx->add_option("--j-lo", cx_jlo, "J lower bound");
  cx->add_option("--j-hi", cx_jhi, "J upper bound");
  cx->add_option("--samples", cx_samples, "number of Hessian samples");

  std::string conv_taus = "4e-3,2e-3,1e-3";
  CLI::App* conv = app.add_subcommand("convergence", "self-convergence order study");
  conv->add_option("--config", rc.config, "run configuration file")->required();
  conv->add_option("--taus", conv_taus, "comma-separated tau list, finest last");

  CLI11_PARSE(app, argc, argv);

  if (run_small->parsed()) return do_run(rs, ev::ModelKind::Small);
  if (run_large->parsed()) return do_run(rl, ev::ModelKind::Large);
  if (audit->parsed()) return do_audit(audit_csv);
  if (cx->parsed())
    return do_convexity(cx_material, cx_K, cx_G, cx_GMR, cx_pw, cx_fbox, cx_jlo,
                        cx_jhi, cx_samples);
  if (conv->parsed()) return do_convergence(rc, conv_taus);
  return 2;
}
