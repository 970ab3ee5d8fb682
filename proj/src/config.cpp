#include "gmcf/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace gmcf {
namespace {

constexpr double kTwoPi = 6.283185307179586;

struct Raw {
  std::string text;
  int line = 0;    // 0 for command-line overrides
  int column = 0;  // 1-based column of the first character of `text`
};

using RawMap = std::map<std::string, Raw>;

const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s{
      {"problem", {"kind"}},
      {"grid", {"dim", "resolution", "period", "sigma"}},
      {"data", {"h", "g", "f", "phi"}},
      {"domain", {"lower", "upper", "profile_lower", "profile_upper"}},
      {"initial", {"u"}},
      {"integrator", {"cfl", "tol", "t_max", "stride", "max_steps", "dt"}},
      {"output", {"dir"}},
      {"slice", {"r0", "t_end", "dt", "n"}},
  };
  return s;
}

bool known_key(const std::string& section, const std::string& key) {
  const auto it = schema().find(section);
  if (it == schema().end()) return false;
  for (const auto& k : it->second)
    if (k == key) return true;
  return false;
}

std::string_view trim(std::string_view s, std::size_t* lead = nullptr) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  if (lead) *lead = b;
  return s.substr(b, e - b);
}

[[noreturn]] void fail_at(const Raw& raw, const std::string& key, const std::string& message,
                          int offset = 0) {
  if (raw.line == 0) throw ConfigError("override " + key + ": " + message);
  throw ConfigError(key + ": " + message, raw.line, raw.column + offset);
}

RawMap read_raw(std::string_view text) {
  RawMap out;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                          : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    std::size_t lead = 0;
    const std::string_view body = trim(line, &lead);
    if (body.empty()) continue;
    const int col = static_cast<int>(lead) + 1;

    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("unterminated section header", line_no, col);
      section = std::string(trim(body.substr(1, body.size() - 2)));
      if (!schema().count(section))
        throw ConfigError("unknown section [" + section + "]", line_no, col);
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no, col);
    const std::string key(trim(body.substr(0, eq)));
    if (key.empty()) throw ConfigError("missing key before '='", line_no, col);
    if (section.empty()) throw ConfigError("entry before any section header", line_no, col);
    if (!known_key(section, key))
      throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no, col);
    const std::string full = section + "." + key;
    if (out.count(full)) throw ConfigError("duplicate key " + full, line_no, col);

    std::size_t value_lead = 0;
    const std::string_view rest = body.substr(eq + 1);
    const std::string_view value = trim(rest, &value_lead);
    if (value.empty()) throw ConfigError("missing value for " + full, line_no, col);
    out[full] = Raw{std::string(value),
                    line_no, col + static_cast<int>(eq + 1 + value_lead)};
  }
  return out;
}

void apply_overrides(RawMap& raw, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const std::size_t eq = o.find('=');
    const std::size_t dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + o + "' is not of the form section.key=value");
    const std::string section(trim(std::string_view(o).substr(0, dot)));
    const std::string key(trim(std::string_view(o).substr(dot + 1, eq - dot - 1)));
    if (!known_key(section, key)) throw ConfigError("override names unknown key " + section + "." + key);
    const std::string value(trim(std::string_view(o).substr(eq + 1)));
    if (value.empty()) throw ConfigError("override " + section + "." + key + " has no value");
    raw[section + "." + key] = Raw{value, 0, 0};
  }
}

std::vector<double> numbers(const Raw& raw, const std::string& key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = raw.text.find(',', start);
    const std::size_t end = comma == std::string::npos ? raw.text.size() : comma;
    std::size_t lead = 0;
    const std::string_view piece = trim(std::string_view(raw.text).substr(start, end - start), &lead);
    const int offset = static_cast<int>(start + lead);
    if (piece.empty()) fail_at(raw, key, "empty list entry", offset);
    if (piece.front() == '"') fail_at(raw, key, "expected a number, not a quoted string", offset);
    Expr e;
    try {
      e = parse_expr(piece);
    } catch (const ParseError& pe) {
      fail_at(raw, key, pe.bare_message(), offset + pe.column() - 1);
    }
    if (e.depends_on(Var::x1) || e.depends_on(Var::x2) || e.depends_on(Var::u))
      fail_at(raw, key, "numeric value must not mention x1, x2 or u", offset);
    double v = 0.0;
    try {
      v = e.eval(0.0);
    } catch (const EvalError& ee) {
      fail_at(raw, key, ee.what(), offset);
    }
    if (!std::isfinite(v)) fail_at(raw, key, "value is not finite", offset);
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double number(const Raw& raw, const std::string& key) {
  const auto v = numbers(raw, key);
  if (v.size() != 1) fail_at(raw, key, "expected a single number");
  return v.front();
}

std::size_t count(double v, const Raw& raw, const std::string& key) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
    fail_at(raw, key, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::string quoted(const Raw& raw, const std::string& key) {
  const std::string& t = raw.text;
  if (t.size() < 2 || t.front() != '"' || t.back() != '"')
    fail_at(raw, key, "expression values must be enclosed in double quotes");
  const std::string inner = t.substr(1, t.size() - 2);
  if (inner.find('"') != std::string::npos) fail_at(raw, key, "stray double quote");
  std::size_t lead = 0;
  const std::string body(trim(inner, &lead));
  if (body.empty()) fail_at(raw, key, "empty expression", 1);
  try {
    parse_expr(body);
  } catch (const ParseError& pe) {
    fail_at(raw, key, pe.bare_message(), 1 + static_cast<int>(lead) + pe.column() - 1);
  }
  return body;
}

struct Locator {
  const RawMap* raw = nullptr;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    if (raw) {
      const auto it = raw->find(key);
      if (it != raw->end()) fail_at(it->second, key, message);
    }
    throw ConfigError(key + ": " + message);
  }
};

void check_vars(const std::string& source, const std::string& key, bool allow_x, bool allow_u,
                int dim, const Locator& at) {
  if (source.empty()) return;
  const Expr e = parse_data(source, key);
  if (!allow_x && (e.depends_on(Var::x1) || e.depends_on(Var::x2)))
    at.fail(key, "must not depend on x1 or x2");
  if (allow_x && dim == 1 && e.depends_on(Var::x2))
    at.fail(key, "x2 is not available on a one-dimensional grid");
  if (!allow_u && e.depends_on(Var::u)) at.fail(key, "must not depend on u");
}

void validate_impl(const RunConfig& c, const Locator& at) {
  try {
    c.make_grid();
  } catch (const GridError& e) {
    at.fail("grid.dim", e.what());
  }
  const int n = c.grid.dim;
  check_vars(c.h, "data.h", true, true, n, at);
  check_vars(c.g, "data.g", true, true, n, at);
  check_vars(c.f, "data.f", true, true, n, at);
  check_vars(c.phi, "data.phi", false, true, n, at);
  check_vars(c.initial, "initial.u", true, false, n, at);

  const auto need = [&](bool present, const std::string& key) {
    if (!present)
      throw ConfigError("missing " + key + " required by problem kind " + to_string(c.kind));
  };
  const auto need_slab = [&] {
    need(c.lower.has_value(), "domain.lower");
    need(c.upper.has_value(), "domain.upper");
    if (!(*c.lower < *c.upper)) at.fail("domain.upper", "needs domain.lower < domain.upper");
  };

  switch (c.kind) {
    case ProblemKind::product_flow:
      need(!c.h.empty(), "data.h");
      need(!c.g.empty(), "data.g");
      need_slab();
      need(!c.initial.empty(), "initial.u");
      break;
    case ProblemKind::prescribed_mc:
      need(!c.f.empty(), "data.f");
      need(!c.phi.empty(), "data.phi");
      need_slab();
      need(!c.initial.empty(), "initial.u");
      break;
    case ProblemKind::weighted_mcf:
      need(!c.phi.empty(), "data.phi");
      need_slab();
      need(!c.initial.empty(), "initial.u");
      break;
    case ProblemKind::slice_ode:
      need(!c.phi.empty(), "data.phi");
      need(c.slice.r0.has_value(), "slice.r0");
      need(c.slice.t_end.has_value(), "slice.t_end");
      need(c.slice.dt.has_value(), "slice.dt");
      need(c.lower.has_value() || c.profile_lower.has_value(), "domain.lower");
      need(c.upper.has_value() || c.profile_upper.has_value(), "domain.upper");
      if (!(*c.slice.dt > 0.0)) at.fail("slice.dt", "must be positive");
      if (!(*c.slice.t_end >= 0.0)) at.fail("slice.t_end", "must be nonnegative");
      if (c.slice.n && !(*c.slice.n == 1 || *c.slice.n == 2)) at.fail("slice.n", "must be 1 or 2");
      break;
  }
  if (c.profile_lower || c.profile_upper) {
    if (!(c.domain_lower() < c.domain_upper()))
      at.fail("domain.profile_upper", "needs profile_lower < profile_upper");
    if (c.lower && c.upper && (*c.lower < c.domain_lower() || *c.upper > c.domain_upper()))
      at.fail("domain.profile_lower", "profile domain must contain [lower, upper]");
  }
  if (!(c.cfl > 0.0)) at.fail("integrator.cfl", "must be positive");
  if (!(c.tol > 0.0)) at.fail("integrator.tol", "must be positive");
  if (!(c.t_max > 0.0)) at.fail("integrator.t_max", "must be positive");
  if (c.stride == 0) at.fail("integrator.stride", "must be at least 1");
  if (c.dt && !(*c.dt > 0.0)) at.fail("integrator.dt", "must be positive");
  if (c.output_dir.empty()) at.fail("output.dir", "must not be empty");
}

RunConfig interpret(const RawMap& raw) {
  RunConfig c;
  const auto get = [&](const std::string& key) -> const Raw* {
    const auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };

  if (const Raw* r = get("problem.kind")) {
    const std::string& k = r->text;
    if (k == "product_flow") c.kind = ProblemKind::product_flow;
    else if (k == "prescribed_mc") c.kind = ProblemKind::prescribed_mc;
    else if (k == "weighted_mcf") c.kind = ProblemKind::weighted_mcf;
    else if (k == "slice_ode") c.kind = ProblemKind::slice_ode;
    else fail_at(*r, "problem.kind",
                 "unknown kind '" + k + "' (product_flow, prescribed_mc, weighted_mcf, slice_ode)");
  } else {
    throw ConfigError("missing problem.kind");
  }

  if (const Raw* r = get("grid.dim")) {
    const double d = number(*r, "grid.dim");
    if (d != 1.0 && d != 2.0) fail_at(*r, "grid.dim", "must be 1 or 2");
    c.grid.dim = static_cast<int>(d);
  }
  const std::size_t n = static_cast<std::size_t>(c.grid.dim);
  const auto per_axis = [&](const Raw& r, const std::string& key) {
    auto v = numbers(r, key);
    if (v.size() == 1 && n == 2) v.push_back(v.front());
    if (v.size() != n) fail_at(r, key, "expected " + std::to_string(n) + " entries");
    return v;
  };
  c.grid.resolution.assign(n, 128);
  if (const Raw* r = get("grid.resolution")) {
    const auto v = per_axis(*r, "grid.resolution");
    for (std::size_t i = 0; i < n; ++i) c.grid.resolution[i] = count(v[i], *r, "grid.resolution");
  }
  c.grid.period.assign(n, kTwoPi);
  if (const Raw* r = get("grid.period")) c.grid.period = per_axis(*r, "grid.period");
  c.grid.sigma = n == 1 ? std::vector<double>{1.0} : std::vector<double>{1.0, 0.0, 0.0, 1.0};
  if (const Raw* r = get("grid.sigma")) {
    c.grid.sigma = numbers(*r, "grid.sigma");
    if (c.grid.sigma.size() != n * n)
      fail_at(*r, "grid.sigma", "expected " + std::to_string(n * n) + " entries");
  }

  if (const Raw* r = get("data.h")) c.h = quoted(*r, "data.h");
  if (const Raw* r = get("data.g")) c.g = quoted(*r, "data.g");
  if (const Raw* r = get("data.f")) c.f = quoted(*r, "data.f");
  if (const Raw* r = get("data.phi")) c.phi = quoted(*r, "data.phi");
  if (const Raw* r = get("initial.u")) c.initial = quoted(*r, "initial.u");
  if (c.kind == ProblemKind::product_flow) {
    if (c.h.empty()) c.h = "0";
    if (c.g.empty()) c.g = "0";
  }

  if (const Raw* r = get("domain.lower")) c.lower = number(*r, "domain.lower");
  if (const Raw* r = get("domain.upper")) c.upper = number(*r, "domain.upper");
  if (const Raw* r = get("domain.profile_lower"))
    c.profile_lower = number(*r, "domain.profile_lower");
  if (const Raw* r = get("domain.profile_upper"))
    c.profile_upper = number(*r, "domain.profile_upper");

  if (const Raw* r = get("integrator.cfl")) c.cfl = number(*r, "integrator.cfl");
  if (const Raw* r = get("integrator.tol")) c.tol = number(*r, "integrator.tol");
  if (const Raw* r = get("integrator.t_max")) c.t_max = number(*r, "integrator.t_max");
  if (const Raw* r = get("integrator.stride"))
    c.stride = count(number(*r, "integrator.stride"), *r, "integrator.stride");
  if (const Raw* r = get("integrator.max_steps"))
    c.max_steps = count(number(*r, "integrator.max_steps"), *r, "integrator.max_steps");
  if (const Raw* r = get("integrator.dt")) c.dt = number(*r, "integrator.dt");

  if (const Raw* r = get("output.dir")) {
    std::string d = r->text;
    if (d.size() >= 2 && d.front() == '"' && d.back() == '"') d = d.substr(1, d.size() - 2);
    c.output_dir = d;
  }

  if (const Raw* r = get("slice.r0")) c.slice.r0 = number(*r, "slice.r0");
  if (const Raw* r = get("slice.t_end")) c.slice.t_end = number(*r, "slice.t_end");
  if (const Raw* r = get("slice.dt")) c.slice.dt = number(*r, "slice.dt");
  if (const Raw* r = get("slice.n")) {
    const double v = number(*r, "slice.n");
    if (v != 1.0 && v != 2.0) fail_at(*r, "slice.n", "must be 1 or 2");
    c.slice.n = static_cast<int>(v);
  }
  return c;
}

std::string num(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

template <class T>
std::string list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_integral_v<T>) out += std::to_string(v[i]);
    else out += num(v[i]);
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + message
                                  : message),
      line_(line),
      column_(column) {}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::product_flow: return "product_flow";
    case ProblemKind::prescribed_mc: return "prescribed_mc";
    case ProblemKind::weighted_mcf: return "weighted_mcf";
    case ProblemKind::slice_ode: return "slice_ode";
  }
  return "unknown";
}

PeriodicGrid RunConfig::make_grid() const {
  return PeriodicGrid(grid.resolution, grid.period, grid.sigma);
}

IntegratorSettings RunConfig::integrator() const {
  IntegratorSettings s;
  s.cfl = cfl;
  s.tol = tol;
  s.t_max = t_max;
  s.stride = stride;
  if (max_steps) s.max_steps = *max_steps;
  s.dt = dt;
  return s;
}

double RunConfig::domain_lower() const {
  if (profile_lower) return *profile_lower;
  if (lower && upper) return *lower - 0.25 * (*upper - *lower);
  return lower.value_or(0.0);
}

double RunConfig::domain_upper() const {
  if (profile_upper) return *profile_upper;
  if (lower && upper) return *upper + 0.25 * (*upper - *lower);
  return upper.value_or(0.0);
}

Expr parse_data(const std::string& source, const std::string& key) {
  try {
    return parse_expr(source);
  } catch (const ParseError& pe) {
    throw ConfigError(key + ": " + pe.bare_message() + " at column " + std::to_string(pe.column()) +
                      " of \"" + source + "\"");
  }
}

void validate(const RunConfig& config) { validate_impl(config, Locator{}); }

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  RawMap raw = read_raw(text);
  apply_overrides(raw, overrides);
  RunConfig c = interpret(raw);
  validate_impl(c, Locator{&raw});
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[problem]\nkind = " << to_string(c.kind) << "\n";
  out << "\n[grid]\ndim = " << c.grid.dim << "\nresolution = " << list(c.grid.resolution)
      << "\nperiod = " << list(c.grid.period) << "\nsigma = " << list(c.grid.sigma) << "\n";

  if (!c.h.empty() || !c.g.empty() || !c.f.empty() || !c.phi.empty()) {
    out << "\n[data]\n";
    if (!c.h.empty()) out << "h = \"" << c.h << "\"\n";
    if (!c.g.empty()) out << "g = \"" << c.g << "\"\n";
    if (!c.f.empty()) out << "f = \"" << c.f << "\"\n";
    if (!c.phi.empty()) out << "phi = \"" << c.phi << "\"\n";
  }
  if (c.lower || c.upper || c.profile_lower || c.profile_upper) {
    out << "\n[domain]\n";
    if (c.lower) out << "lower = " << num(*c.lower) << "\n";
    if (c.upper) out << "upper = " << num(*c.upper) << "\n";
    if (c.profile_lower) out << "profile_lower = " << num(*c.profile_lower) << "\n";
    if (c.profile_upper) out << "profile_upper = " << num(*c.profile_upper) << "\n";
  }
  if (!c.initial.empty()) out << "\n[initial]\nu = \"" << c.initial << "\"\n";

  out << "\n[integrator]\ncfl = " << num(c.cfl) << "\ntol = " << num(c.tol)
      << "\nt_max = " << num(c.t_max) << "\nstride = " << c.stride << "\n";
  if (c.max_steps) out << "max_steps = " << *c.max_steps << "\n";
  if (c.dt) out << "dt = " << num(*c.dt) << "\n";

  out << "\n[output]\ndir = \"" << c.output_dir << "\"\n";

  if (c.slice.r0 || c.slice.t_end || c.slice.dt || c.slice.n) {
    out << "\n[slice]\n";
    if (c.slice.r0) out << "r0 = " << num(*c.slice.r0) << "\n";
    if (c.slice.t_end) out << "t_end = " << num(*c.slice.t_end) << "\n";
    if (c.slice.dt) out << "dt = " << num(*c.slice.dt) << "\n";
    if (c.slice.n) out << "n = " << *c.slice.n << "\n";
  }
  return out.str();
}

}  // namespace gmcf
