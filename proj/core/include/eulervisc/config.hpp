// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <map>
#include <memory>
#include <string>

#include "eulervisc/scheme.hpp"
#include "eulervisc/grid.hpp"

namespace eulervisc {

/// Compiled arithmetic expression in x, y, z with sin/cos/exp/sqrt/abs and the
/// constant pi; the grammar behind per-field initial conditions.
class FieldExpr {
 public:
  FieldExpr() = default;
  static FieldExpr parse(const std::string& text);
  double operator()(double x, double y, double z) const;
  bool empty() const { return root_ == nullptr; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
};

enum class ModelKind { Small, Large };

/// Validated run description parsed from the structured-text config
/// ([model], [grid], [material], [scheme], [initial], [gravity], [output]).
struct RunConfig {
  ModelKind model = ModelKind::Small;

  int dims = 2;
  std::array<int, 3> n{32, 32, 1};
  std::array<double, 3> extent{1.0, 1.0, 1.0};
  Topology topology = Topology::Periodic;

  // material card
  std::string material = "isotropic-quadratic";
  double K_E = 1.0, G_E = 1.0, G_MR = 0.0;
  double eps_reg = -1.0;  // < 0: default 1e-3 K_E
  std::string singular_variant = "log";
  double kappa = 2.0;
  double a = 1.0, gamma = 2.0;  // barotropic
  double pw = 2.0 / 3.0;        // fj-power

  SchemeParams scheme;

  // initial conditions: preset plus optional per-field expression overrides
  std::string preset = "equilibrium";
  double amplitude = 0.1;
  unsigned seed = 1;
  std::map<std::string, std::string> field_exprs;  // rho, vx, vy, vz, e_xx, ..., f_xx, ...

  std::array<double, 3> gravity{0.0, 0.0, 0.0};

  double final_time = 0.01;
  int snapshot_every = 0;  // 0 = only final
  std::string out_dir = ".";
  bool quiet = false;

  Grid make_grid() const;
};

/// Parses and validates; throws ParseError (with line/column) on malformed
/// text and ValidationError listing every violated model hypothesis.
RunConfig parse_config(const std::string& text);

RunConfig parse_config_file(const std::string& path);

}  // namespace eulervisc
