#include "qcsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qcsim/output.hpp"

namespace qcsim {

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Splits on '+' outside parentheses.
std::vector<std::string> split_terms(const std::string& s)
{
  std::vector<std::string> out(1);
  int depth = 0;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == '+' && depth == 0)
      out.emplace_back();
    else
      out.back() += ch;
  }
  for (auto& t : out) t = trim(t);
  return out;
}

bool parse_number(const std::string& s, double& v)
{
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && ptr == e;
}

bool parse_integer(const std::string& s, int& v)
{
  const char* b = s.data();
  const char* e = b + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && ptr == e;
}

std::string join_numbers(const std::vector<double>& v)
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_double(v[i]);
  }
  return s;
}

}  // namespace

std::string format_double(double v)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

bool Profile::uses_file() const
{
  return std::any_of(terms.begin(), terms.end(), [](const ProfileTerm& t) { return t.kind == ProfileTerm::Kind::file; });
}

Profile parse_profile(const std::string& text)
{
  Profile p;
  const std::string all = trim(text);
  if (all.empty()) throw std::invalid_argument("empty profile");
  for (const std::string& raw : split_terms(all)) {
    const std::string t = trim(raw);
    if (t == "zero") {
      p.terms.push_back({ProfileTerm::Kind::zero, {}, {}});
      continue;
    }
    const auto open = t.find('(');
    if (open == std::string::npos || t.back() != ')') throw std::invalid_argument("malformed profile term '" + t + "'");
    const std::string name = trim(t.substr(0, open));
    const std::string inner = t.substr(open + 1, t.size() - open - 2);
    ProfileTerm term;
    if (name == "file") {
      term.kind = ProfileTerm::Kind::file;
      term.path = trim(inner);
      if (term.path.empty()) throw std::invalid_argument("file() needs a path");
      p.terms.push_back(term);
      continue;
    }
    std::size_t arity = 0;
    if (name == "constant") {
      term.kind = ProfileTerm::Kind::constant;
      arity = 3;
    } else if (name == "mode") {
      term.kind = ProfileTerm::Kind::mode;
      arity = 6;
    } else if (name == "affine") {
      term.kind = ProfileTerm::Kind::affine;
      arity = 12;
    } else {
      throw std::invalid_argument("unknown profile '" + name + "'");
    }
    for (const std::string& a : split(inner, ',')) {
      double v;
      if (!parse_number(a, v)) throw std::invalid_argument("profile argument '" + a + "' is not a number");
      term.args.push_back(v);
    }
    if (term.args.size() != arity)
      throw std::invalid_argument(name + "() takes " + std::to_string(arity) + " arguments");
    p.terms.push_back(term);
  }
  return p;
}

std::string to_string(const Profile& p)
{
  if (p.terms.empty()) return "zero";
  std::string s;
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    if (i) s += " + ";
    const ProfileTerm& t = p.terms[i];
    switch (t.kind) {
      case ProfileTerm::Kind::zero: s += "zero"; break;
      case ProfileTerm::Kind::constant: s += "constant(" + join_numbers(t.args) + ")"; break;
      case ProfileTerm::Kind::mode: s += "mode(" + join_numbers(t.args) + ")"; break;
      case ProfileTerm::Kind::affine: s += "affine(" + join_numbers(t.args) + ")"; break;
      case ProfileTerm::Kind::file: s += "file(" + t.path + ")"; break;
    }
  }
  return s;
}

ConfigError::ConfigError(int line, const std::string& key, const std::string& what)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) : std::string("override")) +
                         (key.empty() ? std::string() : ": key '" + key + "'") + ": " + what),
      line_(line),
      key_(key)
{
}

const std::vector<std::pair<std::string, std::string>>& config_keys()
{
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"material.lambda", ""},
      {"material.mu", ""},
      {"material.k0", ""},
      {"material.k1", ""},
      {"material.k2", ""},
      {"material.k2p", ""},
      {"material.k3", ""},
      {"material.k3p", ""},
      {"material.rho", "1"},
      {"material.varsigma", "1"},
      {"material.ell", "0"},
      {"material.eps_visc", "0"},
      {"material.delta_visc", "0"},
      {"grid.dim", ""},
      {"grid.n", ""},
      {"grid.extent", "1"},
      {"grid.bc_u", "zero"},
      {"grid.bc_nu", "zero"},
      {"initial.u0", "zero"},
      {"initial.dot_u0", "zero"},
      {"initial.nu0", "zero"},
      {"solver.dt", ""},
      {"solver.t_end", ""},
      {"solver.picard_tol", "1e-10"},
      {"solver.picard_max", "50"},
      {"solver.krylov_tol", "1e-10"},
      {"solver.krylov_max", "2000"},
      {"solver.deterministic", "true"},
      {"solver.record_every", "1"},
      {"solver.linear_solver", "krylov"},
      {"run.model", ""},
      {"run.gate", "theorem"},
      {"run.study", "none"},
      {"study.ladder", "0.1:0.1,0.05:0.05,0.025:0.025"},
      {"study.levels", "7,15,31"},
      {"study.mms_t_end", "0.5"},
      {"study.dt_over_h", "0.5"},
      {"study.perturbation", "zero"},
      {"output.directory", "run"},
      {"output.snapshots", "true"},
  };
  return keys;
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  const Entry& entry(const std::string& key) const { return entries_.at(key); }

  double number(const std::string& key) const
  {
    const Entry& e = entry(key);
    double v;
    if (!parse_number(e.value, v)) throw ConfigError(e.line, key, "expected a number, got '" + e.value + "'");
    return v;
  }

  int integer(const std::string& key) const
  {
    const Entry& e = entry(key);
    int v;
    if (!parse_integer(e.value, v)) throw ConfigError(e.line, key, "expected an integer, got '" + e.value + "'");
    return v;
  }

  bool boolean(const std::string& key) const
  {
    const Entry& e = entry(key);
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ConfigError(e.line, key, "expected true or false, got '" + e.value + "'");
  }

  std::string choice(const std::string& key, std::initializer_list<const char*> options) const
  {
    const Entry& e = entry(key);
    std::string list;
    for (const char* o : options) {
      if (e.value == o) return e.value;
      list += list.empty() ? o : std::string("|") + o;
    }
    throw ConfigError(e.line, key, "expected one of " + list + ", got '" + e.value + "'");
  }

  Profile profile(const std::string& key) const
  {
    const Entry& e = entry(key);
    try {
      return parse_profile(e.value);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(e.line, key, ex.what());
    }
  }

  std::vector<double> numbers(const std::string& key) const
  {
    const Entry& e = entry(key);
    std::vector<double> out;
    for (const std::string& s : split(e.value, ',')) {
      double v;
      if (!parse_number(s, v)) throw ConfigError(e.line, key, "expected a comma-separated list of numbers");
      out.push_back(v);
    }
    return out;
  }

  std::vector<int> integers(const std::string& key) const
  {
    const Entry& e = entry(key);
    std::vector<int> out;
    for (const std::string& s : split(e.value, ',')) {
      int v;
      if (!parse_integer(s, v)) throw ConfigError(e.line, key, "expected a comma-separated list of integers");
      out.push_back(v);
    }
    return out;
  }

 private:
  std::map<std::string, Entry> entries_;
};

bool known_key(const std::string& key)
{
  const auto& keys = config_keys();
  return std::any_of(keys.begin(), keys.end(), [&](const auto& k) { return k.first == key; });
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::pair<std::string, std::string>>& overrides)
{
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "", "expected 'section.key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_key(key)) throw ConfigError(line_no, key, "unknown key");
    if (value.empty()) throw ConfigError(line_no, key, "missing value");
    if (entries.count(key)) throw ConfigError(line_no, key, "duplicate key (first set on line " +
                                                                std::to_string(entries[key].line) + ")");
    entries[key] = {value, line_no};
  }
  for (const auto& [key, value] : overrides) {
    if (!known_key(key)) throw ConfigError(0, key, "unknown key");
    if (trim(value).empty()) throw ConfigError(0, key, "missing value");
    entries[key] = {trim(value), 0};
  }
  for (const auto& [key, def] : config_keys()) {
    if (entries.count(key)) continue;
    if (def.empty()) throw ConfigError(line_no + 1, key, "missing required key");
    entries[key] = {def, 0};
  }

  const Reader r(std::move(entries));
  RunConfig c;
  MaterialParams& m = c.material;
  m.lambda = r.number("material.lambda");
  m.mu = r.number("material.mu");
  m.k0 = r.number("material.k0");
  m.k1 = r.number("material.k1");
  m.k2 = r.number("material.k2");
  m.k2p = r.number("material.k2p");
  m.k3 = r.number("material.k3");
  m.k3p = r.number("material.k3p");
  m.rho = r.number("material.rho");
  m.varsigma = r.number("material.varsigma");
  m.ell = r.number("material.ell");
  m.eps_visc = r.number("material.eps_visc");
  m.delta_visc = r.number("material.delta_visc");

  c.dim = r.integer("grid.dim");
  if (c.dim != 2 && c.dim != 3) throw ConfigError(r.entry("grid.dim").line, "grid.dim", "must be 2 or 3");
  {
    const std::vector<int> n = r.integers("grid.n");
    const int line = r.entry("grid.n").line;
    if (n.size() != 1 && n.size() != static_cast<std::size_t>(c.dim))
      throw ConfigError(line, "grid.n", "expected 1 or " + std::to_string(c.dim) + " values");
    for (int a = 0; a < c.dim; ++a) {
      c.n[a] = n.size() == 1 ? n[0] : n[a];
      if (c.n[a] < 3) throw ConfigError(line, "grid.n", "needs at least 3 interior nodes per axis");
    }
    c.n[2] = c.dim == 3 ? c.n[2] : 1;
    const std::vector<double> e = r.numbers("grid.extent");
    const int eline = r.entry("grid.extent").line;
    if (e.size() != 1 && e.size() != static_cast<std::size_t>(c.dim))
      throw ConfigError(eline, "grid.extent", "expected 1 or " + std::to_string(c.dim) + " values");
    for (int a = 0; a < c.dim; ++a) {
      c.extent[a] = e.size() == 1 ? e[0] : e[a];
      if (!(c.extent[a] > 0.0)) throw ConfigError(eline, "grid.extent", "must be positive");
    }
    c.extent[2] = c.dim == 3 ? c.extent[2] : 1.0;
  }
  c.bc_u = r.profile("grid.bc_u");
  c.bc_nu = r.profile("grid.bc_nu");
  if (c.bc_u.uses_file() || c.bc_nu.uses_file())
    throw ConfigError(r.entry(c.bc_u.uses_file() ? "grid.bc_u" : "grid.bc_nu").line,
                      c.bc_u.uses_file() ? "grid.bc_u" : "grid.bc_nu", "boundary data cannot come from a file");
  c.u0 = r.profile("initial.u0");
  c.dot_u0 = r.profile("initial.dot_u0");
  c.nu0 = r.profile("initial.nu0");

  SolverConfig& s = c.solver;
  s.dt = r.number("solver.dt");
  if (!(s.dt > 0.0)) throw ConfigError(r.entry("solver.dt").line, "solver.dt", "must be positive");
  s.t_end = r.number("solver.t_end");
  if (!(s.t_end >= 0.0)) throw ConfigError(r.entry("solver.t_end").line, "solver.t_end", "must be nonnegative");
  s.picard_tol = r.number("solver.picard_tol");
  s.picard_max = r.integer("solver.picard_max");
  s.krylov_tol = r.number("solver.krylov_tol");
  s.krylov_max = r.integer("solver.krylov_max");
  for (const char* k : {"solver.picard_tol", "solver.krylov_tol"})
    if (!(r.number(k) > 0.0)) throw ConfigError(r.entry(k).line, k, "must be positive");
  for (const char* k : {"solver.picard_max", "solver.krylov_max", "solver.record_every"})
    if (r.integer(k) < 1) throw ConfigError(r.entry(k).line, k, "must be at least 1");
  s.deterministic = r.boolean("solver.deterministic");
  s.record_every = r.integer("solver.record_every");
  s.linear_solver = r.choice("solver.linear_solver", {"krylov", "dense"}) == "dense" ? LinearSolverKind::dense
                                                                                      : LinearSolverKind::krylov;

  c.model = r.choice("run.model", {"linear", "gyro"}) == "gyro" ? Model::gyro : Model::linear;
  c.gate = r.choice("run.gate", {"theorem", "energy"}) == "energy" ? GateMode::energy : GateMode::theorem;
  const std::string study = r.choice("run.study", {"none", "viscosity_ladder", "mms", "uniqueness"});
  c.study = study == "viscosity_ladder" ? Study::viscosity_ladder
            : study == "mms"            ? Study::mms
            : study == "uniqueness"     ? Study::uniqueness
                                        : Study::none;

  {
    const Entry& e = r.entry("study.ladder");
    c.ladder.clear();
    for (const std::string& rung : split(e.value, ',')) {
      const auto colon = rung.find(':');
      double eps, delta;
      if (colon == std::string::npos || !parse_number(trim(rung.substr(0, colon)), eps) ||
          !parse_number(trim(rung.substr(colon + 1)), delta))
        throw ConfigError(e.line, "study.ladder", "expected a list of eps:delta pairs");
      if (eps < 0.0 || delta < 0.0) throw ConfigError(e.line, "study.ladder", "viscosities must be nonnegative");
      c.ladder.emplace_back(eps, delta);
    }
  }
  c.mms_levels = r.integers("study.levels");
  for (int n : c.mms_levels)
    if (n < 3) throw ConfigError(r.entry("study.levels").line, "study.levels", "levels need at least 3 nodes");
  c.mms_t_end = r.number("study.mms_t_end");
  c.mms_dt_over_h = r.number("study.dt_over_h");
  c.perturbation = r.profile("study.perturbation");

  c.output_directory = r.entry("output.directory").value;
  c.write_snapshots = r.boolean("output.snapshots");
  return c;
}

std::string emit_config(const RunConfig& c)
{
  std::ostringstream o;
  const MaterialParams& m = c.material;
  auto num = [&](const char* key, double v) { o << key << " = " << format_double(v) << "\n"; };
  num("material.lambda", m.lambda);
  num("material.mu", m.mu);
  num("material.k0", m.k0);
  num("material.k1", m.k1);
  num("material.k2", m.k2);
  num("material.k2p", m.k2p);
  num("material.k3", m.k3);
  num("material.k3p", m.k3p);
  num("material.rho", m.rho);
  num("material.varsigma", m.varsigma);
  num("material.ell", m.ell);
  num("material.eps_visc", m.eps_visc);
  num("material.delta_visc", m.delta_visc);

  o << "grid.dim = " << c.dim << "\n";
  o << "grid.n = ";
  for (int a = 0; a < c.dim; ++a) o << (a ? "," : "") << c.n[a];
  o << "\ngrid.extent = ";
  for (int a = 0; a < c.dim; ++a) o << (a ? "," : "") << format_double(c.extent[a]);
  o << "\n";
  o << "grid.bc_u = " << to_string(c.bc_u) << "\n";
  o << "grid.bc_nu = " << to_string(c.bc_nu) << "\n";
  o << "initial.u0 = " << to_string(c.u0) << "\n";
  o << "initial.dot_u0 = " << to_string(c.dot_u0) << "\n";
  o << "initial.nu0 = " << to_string(c.nu0) << "\n";

  const SolverConfig& s = c.solver;
  num("solver.dt", s.dt);
  num("solver.t_end", s.t_end);
  num("solver.picard_tol", s.picard_tol);
  o << "solver.picard_max = " << s.picard_max << "\n";
  num("solver.krylov_tol", s.krylov_tol);
  o << "solver.krylov_max = " << s.krylov_max << "\n";
  o << "solver.deterministic = " << (s.deterministic ? "true" : "false") << "\n";
  o << "solver.record_every = " << s.record_every << "\n";
  o << "solver.linear_solver = " << (s.linear_solver == LinearSolverKind::dense ? "dense" : "krylov") << "\n";

  o << "run.model = " << (c.model == Model::gyro ? "gyro" : "linear") << "\n";
  o << "run.gate = " << (c.gate == GateMode::energy ? "energy" : "theorem") << "\n";
  const char* study = c.study == Study::viscosity_ladder ? "viscosity_ladder"
                      : c.study == Study::mms            ? "mms"
                      : c.study == Study::uniqueness     ? "uniqueness"
                                                         : "none";
  o << "run.study = " << study << "\n";

  o << "study.ladder = ";
  for (std::size_t i = 0; i < c.ladder.size(); ++i)
    o << (i ? "," : "") << format_double(c.ladder[i].first) << ":" << format_double(c.ladder[i].second);
  o << "\nstudy.levels = ";
  for (std::size_t i = 0; i < c.mms_levels.size(); ++i) o << (i ? "," : "") << c.mms_levels[i];
  o << "\n";
  num("study.mms_t_end", c.mms_t_end);
  num("study.dt_over_h", c.mms_dt_over_h);
  o << "study.perturbation = " << to_string(c.perturbation) << "\n";
  o << "output.directory = " << c.output_directory << "\n";
  o << "output.snapshots = " << (c.write_snapshots ? "true" : "false") << "\n";
  return o.str();
}

namespace {

Vec3 eval_term(const ProfileTerm& t, const Vec3& x, int dim, const std::array<double, 3>& extent)
{
  switch (t.kind) {
    case ProfileTerm::Kind::zero: return zero_vec();
    case ProfileTerm::Kind::constant: return {t.args[0], t.args[1], t.args[2]};
    case ProfileTerm::Kind::mode: {
      double phi = 1.0;
      for (int a = 0; a < dim; ++a) phi *= std::sin(t.args[a] * std::numbers::pi * x[a] / extent[a]);
      return {phi * t.args[3], phi * t.args[4], phi * t.args[5]};
    }
    case ProfileTerm::Kind::affine: {
      Vec3 r{t.args[0], t.args[1], t.args[2]};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i] += t.args[3 + 3 * i + j] * x[j];
      return r;
    }
    case ProfileTerm::Kind::file: break;
  }
  throw std::logic_error("file profiles are not pointwise functions");
}

FieldFunction profile_function(const Profile& p, int dim, const std::array<double, 3>& extent)
{
  return [p, dim, extent](const Vec3& x) {
    Vec3 v = zero_vec();
    for (const ProfileTerm& t : p.terms) v += eval_term(t, x, dim, extent);
    return v;
  };
}

enum class SnapshotColumn { u, ut, nu };

VectorField profile_field(const Profile& p, GridPtr grid, SnapshotColumn column)
{
  VectorField f(grid);
  for (const ProfileTerm& t : p.terms) {
    if (t.kind != ProfileTerm::Kind::file) {
      f += VectorField::sample(grid, profile_function(Profile{{t}}, grid->dim(), grid->extent()));
      continue;
    }
    std::ifstream in(t.path);
    if (!in) throw std::runtime_error("cannot open profile file '" + t.path + "'");
    const FieldState s = read_snapshot(in, grid);
    f += column == SnapshotColumn::u ? s.u : column == SnapshotColumn::ut ? s.ut : s.nu;
  }
  return f;
}

}  // namespace

GridPtr build_grid(const RunConfig& cfg)
{
  return make_grid(cfg.dim, cfg.n, cfg.extent, profile_function(cfg.bc_u, cfg.dim, cfg.extent),
                   profile_function(cfg.bc_nu, cfg.dim, cfg.extent));
}

FieldState build_initial_state(const RunConfig& cfg, GridPtr grid)
{
  return project_initial_data(grid, profile_field(cfg.u0, grid, SnapshotColumn::u),
                              profile_field(cfg.dot_u0, grid, SnapshotColumn::ut),
                              profile_field(cfg.nu0, grid, SnapshotColumn::nu));
}

FieldState build_perturbed_state(const RunConfig& cfg, GridPtr grid)
{
  return project_initial_data(grid, profile_field(cfg.u0, grid, SnapshotColumn::u),
                              profile_field(cfg.dot_u0, grid, SnapshotColumn::ut),
                              profile_field(cfg.nu0, grid, SnapshotColumn::nu) +
                                  profile_field(cfg.perturbation, grid, SnapshotColumn::nu));
}

}  // namespace qcsim
