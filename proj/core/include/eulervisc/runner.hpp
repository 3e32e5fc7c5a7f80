// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include "eulervisc/audit.hpp"
#include "eulervisc/config.hpp"
#include "eulervisc/snapshot.hpp"

namespace eulervisc {

/// Initial states from the config presets (equilibrium | smooth-wave |
/// random-smooth) plus per-field expression overrides.
StateSmall initial_state_small(const RunConfig& cfg, const Grid& g);
StateLarge initial_state_large(const RunConfig& cfg, const Grid& g,
                               HCalibration calibration, double alpha);

std::shared_ptr<const PolyconvexEnergy> material_from_config(const RunConfig& cfg);

struct RunResult {
  bool ok = false;
  int steps = 0;
  int substeps = 0;
  int halvings = 0;
  double max_slack = 0.0;
  double max_slack_budget = 0.0;
  double mass_drift_rel = 0.0;
  bool bounds_ok = true;
  bool band_entered = false;   // density entered the cut-off band
  bool cap_active = false;     // simplified-cap modified an evaluation
  double final_kinetic = 0.0;
  double final_stored = 0.0;
  std::string failure;
  std::string audit_csv_path;
  std::string summary_path;
};

/// Integrates the configured problem at the given tau to the final time and
/// returns the packed final state (the self-convergence harness).
DVec run_final_state(const RunConfig& cfg, double tau);

/// Executes the configured run: steps to the final time, emits snapshots at
/// the configured cadence, the audit CSV, and a machine-readable key=value
/// summary.  Success requires zero bound violations.
RunResult run(const RunConfig& cfg);

}  // namespace eulervisc
