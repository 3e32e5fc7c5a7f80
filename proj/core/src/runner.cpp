// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include "eulervisc/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace eulervisc {

namespace {

/// Smooth low-mode field: offset + amp * seeded combination of the first
/// Fourier modes on the periodic box.
struct SmoothField {
  double offset;
  double amp;
  double cx[3], cy[3], sx[3], sy[3];

  static SmoothField make(double offset, double amp, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SmoothField f;
    f.offset = offset;
    f.amp = amp;
    for (int m = 0; m < 3; ++m) {
      f.cx[m] = u(rng);
      f.cy[m] = u(rng);
      f.sx[m] = u(rng);
      f.sy[m] = u(rng);
    }
    return f;
  }

  double operator()(const Grid& g, double x, double y, double z) const {
    const double ax = 2.0 * M_PI / g.extent(0);
    const double ay = g.dims > 1 ? 2.0 * M_PI / g.extent(1) : 0.0;
    const double az = g.dims > 2 ? 2.0 * M_PI / g.extent(2) : 0.0;
    double v = cx[0] * std::sin(ax * x) + sx[0] * std::cos(ax * x);
    if (g.dims > 1)
      v += cy[0] * std::sin(ay * y) + sy[0] * std::cos(ay * y) +
           cx[1] * std::sin(ax * x) * std::sin(ay * y) +
           sx[1] * std::cos(ax * x) * std::cos(ay * y);
    if (g.dims > 2) v += cx[2] * std::sin(az * z);
    // normalized to |v| <= 1 by construction budget (5 unit coefficients)
    return offset + amp * v / 5.0;
  }
};

}  // namespace

StateSmall initial_state_small(const RunConfig& cfg, const Grid& g) {
  StateSmall s(g);
  std::mt19937_64 rng(cfg.seed);
  const bool random = cfg.preset == "random-smooth";
  const bool wave = cfg.preset == "smooth-wave";
  SmoothField fr = SmoothField::make(1.0, random ? cfg.amplitude : 0.0, rng);
  SmoothField fv[3] = {SmoothField::make(0.0, random ? cfg.amplitude : 0.0, rng),
                       SmoothField::make(0.0, random ? cfg.amplitude : 0.0, rng),
                       SmoothField::make(0.0, random ? cfg.amplitude : 0.0, rng)};
  SmoothField fe = SmoothField::make(0.0, random ? 0.5 * cfg.amplitude : 0.0, rng);

  std::map<std::string, FieldExpr> exprs;
  for (const auto& [k, v] : cfg.field_exprs) exprs[k] = FieldExpr::parse(v);
  auto expr_or = [&](const char* key, double fallback, double x, double y,
                     double z) {
    auto it = exprs.find(key);
    return it == exprs.end() ? fallback : it->second(x, y, z);
  };

  const double ax = 2.0 * M_PI / g.extent(0);
  const double ay = g.dims > 1 ? 2.0 * M_PI / g.extent(1) : 0.0;
  g.for_each([&](long idx, int i, int j, int k) {
    const double x = g.coord(0, i), y = g.coord(1, j), z = g.coord(2, k);
    double rho = 1.0;
    Vec3 v{};
    SymTensor3 E{};
    if (wave) {
      rho = 1.0 + cfg.amplitude * std::sin(ax * x) *
                      (g.dims > 1 ? std::cos(ay * y) : 1.0);
      v.x = cfg.amplitude * std::cos(ax * x);
      if (g.dims > 1) v.y = cfg.amplitude * std::sin(ay * y);
      E.e[SymTensor3::XY] = 0.5 * cfg.amplitude * std::sin(ax * x);
    } else if (random) {
      rho = fr(g, x, y, z);
      for (int c = 0; c < 3; ++c) v[c] = fv[c](g, x, y, z);
      E.e[SymTensor3::XY] = fe(g, x, y, z);
      E.e[SymTensor3::XX] = 0.5 * fe(g, y, x, z);
    }
    rho = expr_or("rho", rho, x, y, z);
    v.x = expr_or("vx", v.x, x, y, z);
    v.y = expr_or("vy", v.y, x, y, z);
    v.z = expr_or("vz", v.z, x, y, z);
    E.e[SymTensor3::XX] = expr_or("e_xx", E.e[SymTensor3::XX], x, y, z);
    E.e[SymTensor3::YY] = expr_or("e_yy", E.e[SymTensor3::YY], x, y, z);
    E.e[SymTensor3::ZZ] = expr_or("e_zz", E.e[SymTensor3::ZZ], x, y, z);
    E.e[SymTensor3::XY] = expr_or("e_xy", E.e[SymTensor3::XY], x, y, z);
    E.e[SymTensor3::YZ] = expr_or("e_yz", E.e[SymTensor3::YZ], x, y, z);
    E.e[SymTensor3::XZ] = expr_or("e_xz", E.e[SymTensor3::XZ], x, y, z);
    if (!(rho > 0.0))
      throw ValidationError("initial density must satisfy min rho0 > 0",
                            {"rho0 <= 0 at a grid cell"});
    s.rho[idx] = rho;
    s.p_mom[idx] = rho * v;
    s.E[idx] = E;
  });
  return s;
}

StateLarge initial_state_large(const RunConfig& cfg, const Grid& g,
                               HCalibration calibration, double alpha) {
  std::mt19937_64 rng(cfg.seed);
  const bool random = cfg.preset == "random-smooth";
  const bool wave = cfg.preset == "smooth-wave";
  SmoothField fr = SmoothField::make(1.0, random ? cfg.amplitude : 0.0, rng);
  SmoothField fv[3] = {SmoothField::make(0.0, random ? cfg.amplitude : 0.0, rng),
                       SmoothField::make(0.0, random ? cfg.amplitude : 0.0, rng),
                       SmoothField::make(0.0, random ? cfg.amplitude : 0.0, rng)};
  SmoothField ff = SmoothField::make(0.0, random ? 0.5 * cfg.amplitude : 0.0, rng);

  std::map<std::string, FieldExpr> exprs;
  for (const auto& [k, v] : cfg.field_exprs) exprs[k] = FieldExpr::parse(v);
  auto expr_or = [&](const std::string& key, double fallback, double x, double y,
                     double z) {
    auto it = exprs.find(key);
    return it == exprs.end() ? fallback : it->second(x, y, z);
  };

  Field<double> rho0(g);
  Field<Vec3> v0(g);
  Field<Tensor3> F0(g);
  const double ax = 2.0 * M_PI / g.extent(0);
  const double ay = g.dims > 1 ? 2.0 * M_PI / g.extent(1) : 0.0;
  const char* fkeys[9] = {"f_xx", "f_xy", "f_xz", "f_yx", "f_yy",
                          "f_yz", "f_zx", "f_zy", "f_zz"};
  g.for_each([&](long idx, int i, int j, int k) {
    const double x = g.coord(0, i), y = g.coord(1, j), z = g.coord(2, k);
    double rho = 1.0;
    Vec3 v{};
    Tensor3 F = Tensor3::identity();
    if (wave) {
      rho = 1.0 + cfg.amplitude * std::sin(ax * x) *
                      (g.dims > 1 ? std::cos(ay * y) : 1.0);
      v.x = cfg.amplitude * std::cos(ax * x);
      if (g.dims > 1) v.y = cfg.amplitude * std::sin(ay * y);
      F(0, 1) = 0.5 * cfg.amplitude * std::sin(ax * x);
      F(0, 0) = 1.0 + 0.25 * cfg.amplitude * std::cos(ax * x) *
                          (g.dims > 1 ? std::sin(ay * y) : 1.0);
    } else if (random) {
      rho = fr(g, x, y, z);
      for (int c = 0; c < 3; ++c) v[c] = fv[c](g, x, y, z);
      F(0, 1) = ff(g, x, y, z);
      F(1, 0) = 0.5 * ff(g, y, x, z);
      F(0, 0) = 1.0 + 0.5 * ff(g, x, y, z);
    }
    rho = expr_or("rho", rho, x, y, z);
    v.x = expr_or("vx", v.x, x, y, z);
    v.y = expr_or("vy", v.y, x, y, z);
    v.z = expr_or("vz", v.z, x, y, z);
    for (int q = 0; q < 9; ++q) F.e[q] = expr_or(fkeys[q], F.e[q], x, y, z);
    rho0[idx] = rho;
    v0[idx] = v;
    F0[idx] = F;
  });
  return make_initial_large(rho0, v0, F0, calibration, alpha);
}

std::shared_ptr<const PolyconvexEnergy> material_from_config(const RunConfig& cfg) {
  return make_polyconvex(cfg.material, cfg.K_E, cfg.G_E, cfg.G_MR, cfg.eps_reg,
                         cfg.singular_variant, cfg.kappa, cfg.a, cfg.gamma, cfg.pw);
}

RunResult run(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  RunResult res;
  const Grid g = cfg.make_grid();
  fs::create_directories(cfg.out_dir);
  const std::string csv_path = cfg.out_dir + "/audit.csv";
  const std::string summary_path = cfg.out_dir + "/summary.txt";
  res.audit_csv_path = csv_path;
  res.summary_path = summary_path;

  std::ofstream csv(csv_path);
  csv << audit_csv_header() << '\n';
  csv.precision(17);

  GravityFn gravity;
  if (cfg.gravity[0] != 0.0 || cfg.gravity[1] != 0.0 || cfg.gravity[2] != 0.0) {
    const Vec3 gv{cfg.gravity[0], cfg.gravity[1], cfg.gravity[2]};
    gravity = [gv](double, const Vec3&) { return gv; };
  }

  const int nsteps = std::max(1, int(std::llround(cfg.final_time / cfg.scheme.tau)));
  double mass0 = 0.0;

  auto account = [&](const EnergyReport& r, int halved) {
    csv << audit_csv_row(r) << '\n';
    ++res.substeps;
    res.halvings = std::max(res.halvings, halved);
    res.max_slack = std::max(res.max_slack, r.inequality_slack);
    res.max_slack_budget = std::max(res.max_slack_budget, r.slack_budget);
    res.final_kinetic = r.kinetic;
    res.final_stored = r.stored;
    if (mass0 != 0.0)
      res.mass_drift_rel =
          std::max(res.mass_drift_rel, std::abs(r.mass - mass0) / std::abs(mass0));
  };

  try {
    if (cfg.model == ModelKind::Small) {
      IsotropicQuadraticEnergy mat(cfg.K_E, cfg.G_E);
      StateSmall st = initial_state_small(cfg, g);
      SchemeParams par = cfg.scheme;
      if (!(par.rho_max > 0.0)) {
        double m = 0.0;
        for (long c = 0; c < st.rho.size(); ++c) m = std::max(m, st.rho[c]);
        par.rho_max = 4.0 * m;
      }
      mass0 = mass(st);
      for (int s = 0; s < nsteps; ++s) {
        std::vector<SmallStepRecord> recs;
        st = step_small(st, mat, par, gravity, &recs);
        for (const auto& r : recs) {
          account(r.report, r.stats.tau_halvings);
          if (r.report.max_rho > par.rho_max) res.band_entered = true;
        }
        if (cfg.snapshot_every > 0 && (s + 1) % cfg.snapshot_every == 0) {
          SnapshotWriter w(g, st.time);
          w.add("rho", st.rho);
          w.add("p", st.p_mom);
          w.add("E", st.E);
          char name[64];
          std::snprintf(name, sizeof name, "/snapshot_%05d.evs", s + 1);
          w.write(cfg.out_dir + name);
        }
      }
      SnapshotWriter w(g, st.time);
      w.add("rho", st.rho);
      w.add("p", st.p_mom);
      w.add("E", st.E);
      w.write(cfg.out_dir + "/final.evs");
      if (g.ncells <= 4096) w.write_csv(cfg.out_dir + "/final.csv");
    } else {
      auto base = material_from_config(cfg);
      YosidaRegularizedEnergy re(base, cfg.scheme.eps, cfg.scheme.delta,
                                 cfg.scheme.reg_mode);
      StateLarge st =
          initial_state_large(cfg, g, base->calibration(), base->alpha());
      SchemeParams par = cfg.scheme;
      if (!(par.rho_max > 0.0)) {
        double m = 0.0;
        for (long c = 0; c < st.rho.size(); ++c) m = std::max(m, st.rho[c]);
        par.rho_max = 4.0 * m;
      }
      mass0 = mass(st);
      for (int s = 0; s < nsteps; ++s) {
        std::vector<LargeStepRecord> recs;
        st = step_large(st, re, par, gravity, &recs);
        for (const auto& r : recs) {
          account(r.report, r.stats.tau_halvings);
          if (r.report.max_rho > par.rho_max) res.band_entered = true;
          if (r.cap_active) res.cap_active = true;
        }
        if (cfg.snapshot_every > 0 && (s + 1) % cfg.snapshot_every == 0) {
          SnapshotWriter w(g, st.time);
          w.add("rho", st.rho);
          w.add("p", st.p_mom);
          w.add("F", st.F);
          w.add("J", st.J);
          w.add("Pi", st.Pi);
          char name[64];
          std::snprintf(name, sizeof name, "/snapshot_%05d.evs", s + 1);
          w.write(cfg.out_dir + name);
        }
      }
      SnapshotWriter w(g, st.time);
      w.add("rho", st.rho);
      w.add("p", st.p_mom);
      w.add("F", st.F);
      w.add("J", st.J);
      w.add("Pi", st.Pi);
      if (st.has_H) w.add("H", st.H);
      w.write(cfg.out_dir + "/final.evs");
      if (g.ncells <= 4096) w.write_csv(cfg.out_dir + "/final.csv");
    }
    res.ok = true;
  } catch (const StepFailure& e) {
    res.ok = false;
    res.failure = std::string(e.what()) + " | " + e.diagnostics();
    res.bounds_ok = false;
  }

  std::ofstream sum(summary_path);
  sum.precision(17);
  sum << "status=" << (res.ok ? "success" : "failed") << '\n'
      << "model=" << (cfg.model == ModelKind::Small ? "small" : "large") << '\n'
      << "steps=" << nsteps << '\n'
      << "substeps=" << res.substeps << '\n'
      << "halvings=" << res.halvings << '\n'
      << "final_kinetic=" << res.final_kinetic << '\n'
      << "final_stored=" << res.final_stored << '\n'
      << "max_slack=" << res.max_slack << '\n'
      << "max_slack_budget=" << res.max_slack_budget << '\n'
      << "mass_drift_rel=" << res.mass_drift_rel << '\n'
      << "bound_violations=" << (res.bounds_ok ? 0 : 1) << '\n'
      << "band_entered=" << (res.band_entered ? 1 : 0) << '\n'
      << "cap_active=" << (res.cap_active ? 1 : 0) << '\n';
  if (!res.failure.empty()) sum << "failure=" << res.failure << '\n';
  if (!cfg.quiet) {
    std::cout << (res.ok ? "run completed" : "run FAILED") << "; summary at "
              << summary_path << '\n';
    if (!res.failure.empty()) std::cout << res.failure << '\n';
  }
  return res;
}

}  // namespace eulervisc

namespace eulervisc {

DVec run_final_state(const RunConfig& cfg, double tau) {
  const Grid g = cfg.make_grid();
  GravityFn gravity;
  if (cfg.gravity[0] != 0.0 || cfg.gravity[1] != 0.0 || cfg.gravity[2] != 0.0) {
    const Vec3 gv{cfg.gravity[0], cfg.gravity[1], cfg.gravity[2]};
    gravity = [gv](double, const Vec3&) { return gv; };
  }
  SchemeParams par = cfg.scheme;
  par.tau = tau;
  const int nsteps = std::max(1, int(std::llround(cfg.final_time / tau)));
  DVec x;
  if (cfg.model == ModelKind::Small) {
    IsotropicQuadraticEnergy mat(cfg.K_E, cfg.G_E);
    StateSmall st = initial_state_small(cfg, g);
    if (!(par.rho_max > 0.0)) {
      double m = 0.0;
      for (long c = 0; c < st.rho.size(); ++c) m = std::max(m, st.rho[c]);
      par.rho_max = 4.0 * m;
    }
    for (int s = 0; s < nsteps; ++s) st = step_small(st, mat, par, gravity);
    pack_state_small(st, x);
  } else {
    auto base = material_from_config(cfg);
    YosidaRegularizedEnergy re(base, par.eps, par.delta, par.reg_mode);
    StateLarge st = initial_state_large(cfg, g, base->calibration(), base->alpha());
    if (!(par.rho_max > 0.0)) {
      double m = 0.0;
      for (long c = 0; c < st.rho.size(); ++c) m = std::max(m, st.rho[c]);
      par.rho_max = 4.0 * m;
    }
    for (int s = 0; s < nsteps; ++s) st = step_large(st, re, par, gravity);
    const long n = g.ncells;
    x.resize(n * 14);
    for (long c = 0; c < n; ++c) {
      double* o = x.data() + c * 14;
      o[0] = st.rho[c];
      FieldTraits<Vec3>::pack(st.p_mom[c], o + 1);
      FieldTraits<Tensor3>::pack(st.F[c], o + 4);
      o[13] = st.J[c];
    }
  }
  return x;
}

}  // namespace eulervisc
