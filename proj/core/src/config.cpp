// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include "eulervisc/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace eulervisc {

// ---------------------------------------------------------------------------
// Expression grammar:  expr := term (('+'|'-') term)* ; term := factor
// (('*'|'/') factor)* ; factor := unary ('^' factor)? ; unary := '-'* primary ;
// primary := number | const | var | func '(' expr ')' | '(' expr ')'.

struct FieldExpr::Node {
  enum Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt, Abs } op;
  double value = 0.0;
  int var = 0;  // 0=x 1=y 2=z
  std::shared_ptr<const Node> a, b;

  double eval(double x, double y, double z) const {
    switch (op) {
      case Num: return value;
      case Var: return var == 0 ? x : (var == 1 ? y : z);
      case Add: return a->eval(x, y, z) + b->eval(x, y, z);
      case Sub: return a->eval(x, y, z) - b->eval(x, y, z);
      case Mul: return a->eval(x, y, z) * b->eval(x, y, z);
      case Div: return a->eval(x, y, z) / b->eval(x, y, z);
      case Pow: return std::pow(a->eval(x, y, z), b->eval(x, y, z));
      case Neg: return -a->eval(x, y, z);
      case Sin: return std::sin(a->eval(x, y, z));
      case Cos: return std::cos(a->eval(x, y, z));
      case Exp: return std::exp(a->eval(x, y, z));
      case Sqrt: return std::sqrt(a->eval(x, y, z));
      case Abs: return std::abs(a->eval(x, y, z));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const FieldExpr::Node>;
using N = FieldExpr::Node;

struct ExprParser {
  const std::string& s;
  std::size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression: " + what + " near position " +
                         std::to_string(pos) + " in '" + s + "'",
                     1, int(pos) + 1);
  }

  NodePtr make(N::Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<N>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = make(N::Add, lhs, term());
      else if (eat('-'))
        lhs = make(N::Sub, lhs, term());
      else
        return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (eat('*'))
        lhs = make(N::Mul, lhs, factor());
      else if (eat('/'))
        lhs = make(N::Div, lhs, factor());
      else
        return lhs;
    }
  }
  NodePtr factor() {
    NodePtr base = unary();
    if (eat('^')) return make(N::Pow, base, factor());
    return base;
  }
  NodePtr unary() {
    if (eat('-')) return make(N::Neg, unary());
    return primary();
  }
  NodePtr primary() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(s.substr(pos), &used);
      pos += used;
      auto n = std::make_shared<N>();
      n->op = N::Num;
      n->value = v;
      return n;
    }
    if (c == '(') {
      ++pos;
      NodePtr inner = expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                                s[pos] == '_'))
        ++pos;
      const std::string id = s.substr(start, pos - start);
      if (id == "pi") {
        auto n = std::make_shared<N>();
        n->op = N::Num;
        n->value = M_PI;
        return n;
      }
      if (id == "x" || id == "y" || id == "z") {
        auto n = std::make_shared<N>();
        n->op = N::Var;
        n->var = id == "x" ? 0 : (id == "y" ? 1 : 2);
        return n;
      }
      N::Op fop;
      if (id == "sin") fop = N::Sin;
      else if (id == "cos") fop = N::Cos;
      else if (id == "exp") fop = N::Exp;
      else if (id == "sqrt") fop = N::Sqrt;
      else if (id == "abs") fop = N::Abs;
      else fail("unknown identifier '" + id + "'");
      if (!eat('(')) fail("expected '(' after function name");
      NodePtr arg = expr();
      if (!eat(')')) fail("missing ')'");
      return make(fop, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

FieldExpr FieldExpr::parse(const std::string& text) {
  ExprParser p{text};
  FieldExpr e;
  NodePtr root = p.expr();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  e.root_ = root;
  return e;
}

double FieldExpr::operator()(double x, double y, double z) const {
  if (!root_) return 0.0;
  return root_->eval(x, y, z);
}

// ---------------------------------------------------------------------------
// INI-style config

Grid RunConfig::make_grid() const {
  std::array<double, 3> h;
  for (int d = 0; d < 3; ++d) h[d] = extent[d] / std::max(1, n[d]);
  return Grid::make(dims, n, h, topology);
}

namespace {

struct IniEntry {
  std::string value;
  int line;
};
using IniSection = std::map<std::string, IniEntry>;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::map<std::string, IniSection> parse_ini(const std::string& text) {
  std::map<std::string, IniSection> out;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("config: unterminated section header", lineno,
                         int(line.size()));
      section = trim(line.substr(1, line.size() - 2));
      out[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config: expected 'key = value'", lineno, 1);
    if (section.empty())
      throw ParseError("config: key outside any [section]", lineno, 1);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("config: empty key", lineno, 1);
    out[section][key] = {value, lineno};
  }
  return out;
}

double to_double(const IniEntry& e, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("config: key '" + key + "' is not a number: '" + e.value + "'",
                     e.line, 1);
  }
}

int to_int(const IniEntry& e, const std::string& key) {
  const double v = to_double(e, key);
  return int(std::lround(v));
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  const auto ini = parse_ini(text);
  RunConfig cfg;
  std::vector<std::string> violations;

  auto get = [&](const std::string& sec, const std::string& key) -> const IniEntry* {
    auto s = ini.find(sec);
    if (s == ini.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };
  auto num = [&](const std::string& sec, const std::string& key, double& dst) {
    if (const IniEntry* e = get(sec, key)) dst = to_double(*e, key);
  };
  auto inum = [&](const std::string& sec, const std::string& key, int& dst) {
    if (const IniEntry* e = get(sec, key)) dst = to_int(*e, key);
  };
  auto str = [&](const std::string& sec, const std::string& key, std::string& dst) {
    if (const IniEntry* e = get(sec, key)) dst = e->value;
  };

  std::string model = "small";
  str("model", "kind", model);
  if (model == "small")
    cfg.model = ModelKind::Small;
  else if (model == "large")
    cfg.model = ModelKind::Large;
  else
    violations.push_back("[model] kind must be 'small' or 'large'");

  inum("grid", "dims", cfg.dims);
  int nx = cfg.n[0], ny = cfg.n[1], nz = cfg.n[2];
  inum("grid", "nx", nx);
  inum("grid", "ny", ny);
  inum("grid", "nz", nz);
  cfg.n = {nx, ny, nz};
  num("grid", "lx", cfg.extent[0]);
  num("grid", "ly", cfg.extent[1]);
  num("grid", "lz", cfg.extent[2]);
  std::string topo = "periodic";
  str("grid", "topology", topo);
  if (topo == "periodic")
    cfg.topology = Topology::Periodic;
  else if (topo == "box")
    cfg.topology = Topology::Box;
  else
    violations.push_back("[grid] topology must be 'periodic' or 'box'");

  str("material", "name", cfg.material);
  num("material", "K_E", cfg.K_E);
  num("material", "G_E", cfg.G_E);
  num("material", "G_MR", cfg.G_MR);
  num("material", "eps_reg", cfg.eps_reg);
  str("material", "singular", cfg.singular_variant);
  num("material", "kappa", cfg.kappa);
  num("material", "a", cfg.a);
  num("material", "gamma", cfg.gamma);
  num("material", "pw", cfg.pw);

  SchemeParams& sp = cfg.scheme;
  num("scheme", "tau", sp.tau);
  num("scheme", "eps", sp.eps);
  num("scheme", "delta", sp.delta);
  num("scheme", "mu", sp.mu);
  num("scheme", "p_exp", sp.p_exp);
  num("scheme", "q_exp", sp.q_exp);
  num("scheme", "r_exp", sp.r_exp);
  num("scheme", "rho_max", sp.rho_max);
  num("scheme", "K_V", sp.K_V);
  num("scheme", "G_V", sp.G_V);
  num("scheme", "R", sp.R);
  num("scheme", "nu", sp.nu);
  num("scheme", "newton_tol_rel", sp.newton_tol_rel);
  num("scheme", "newton_tol_abs", sp.newton_tol_abs);
  inum("scheme", "newton_max_iter", sp.newton_max_iter);
  std::string mode = "full-prox";
  str("scheme", "yosida", mode);
  if (mode == "full-prox")
    sp.reg_mode = RegularizationMode::FullProx;
  else if (mode == "simple-cap")
    sp.reg_mode = RegularizationMode::SimpleCap;
  else if (mode == "direct")
    sp.reg_mode = RegularizationMode::Direct;
  else
    violations.push_back("[scheme] yosida must be full-prox | simple-cap | direct");

  str("initial", "preset", cfg.preset);
  num("initial", "amplitude", cfg.amplitude);
  double seed = cfg.seed;
  num("initial", "seed", seed);
  cfg.seed = unsigned(seed);
  if (auto s = ini.find("initial"); s != ini.end()) {
    for (const auto& [key, entry] : s->second) {
      if (key == "preset" || key == "amplitude" || key == "seed") continue;
      FieldExpr::parse(entry.value);  // surface syntax errors with line info
      cfg.field_exprs[key] = entry.value;
    }
  }

  num("gravity", "gx", cfg.gravity[0]);
  num("gravity", "gy", cfg.gravity[1]);
  num("gravity", "gz", cfg.gravity[2]);

  num("output", "T", cfg.final_time);
  inum("output", "snapshot_every", cfg.snapshot_every);
  str("output", "dir", cfg.out_dir);
  int ov = 0, quiet = 0;
  inum("output", "override_unsafe", ov);
  inum("output", "quiet", quiet);
  sp.unsafe_override = ov != 0;
  cfg.quiet = quiet != 0;

  // hypothesis validation (collect everything, then throw once)
  for (const std::string& v : cfg.scheme.validate(cfg.model == ModelKind::Large))
    violations.push_back(v);
  if (cfg.dims < 1 || cfg.dims > 3) violations.push_back("[grid] dims must be 1..3");
  for (int d = 0; d < cfg.dims; ++d) {
    if (cfg.n[d] < 4) violations.push_back("[grid] n must be >= 4 per resolved dim");
    if (!(cfg.extent[d] > 0.0)) violations.push_back("[grid] extent must be > 0");
  }
  if (!(cfg.final_time > 0.0)) violations.push_back("[output] T must be > 0");
  if (cfg.model == ModelKind::Large &&
      cfg.scheme.reg_mode == RegularizationMode::FullProx && !(cfg.scheme.eps > 0.0))
    violations.push_back("full-prox Yosida regularization requires eps > 0");

  // discrete analogue of the data qualification: evaluate the initial density
  // and check min rho0 > 0 (and finiteness)
  if (violations.empty()) {
    const Grid g = cfg.make_grid();
    FieldExpr rho_expr;
    const bool has_rho = cfg.field_exprs.count("rho") > 0;
    if (has_rho) rho_expr = FieldExpr::parse(cfg.field_exprs.at("rho"));
    double rmin = HUGE_VAL;
    bool finite = true;
    g.for_each([&](long, int i, int j, int k) {
      const double x = g.coord(0, i), y = g.coord(1, j), z = g.coord(2, k);
      const double r = has_rho ? rho_expr(x, y, z) : 1.0;
      if (!std::isfinite(r)) finite = false;
      rmin = std::min(rmin, r);
    });
    if (!finite) violations.push_back("[initial] rho expression is not finite");
    if (!(rmin > 0.0))
      violations.push_back(
          "initial density violates the data qualification min rho0 > 0");
  }

  if (!violations.empty() && !cfg.scheme.unsafe_override)
    throw ValidationError("config validation failed", violations);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("config: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace eulervisc
