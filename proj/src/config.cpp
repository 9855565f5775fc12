#include "pberg/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pberg/error.hpp"
#include "pberg/report.hpp"

namespace pberg {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  fail(ErrorCode::Config, "config key '" + key + "': " + what);
}

double parse_double(const std::string& key, const std::string& text) {
  const char* b = text.c_str();
  char* e = nullptr;
  errno = 0;
  const double v = std::strtod(b, &e);
  if (e == b || *e != '\0' || errno == ERANGE) bad(key, "'" + text + "' is not a number");
  return v;
}

double as_double(const std::string& key, const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(key, j.get<std::string>());
  bad(key, "expected a number");
}

long long as_integer(const std::string& key, const json& j) {
  const double v = as_double(key, j);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) bad(key, "expected an integer");
  return static_cast<long long>(v);
}

int as_int(const std::string& key, const json& j) {
  const long long v = as_integer(key, j);
  if (v < -2147483647LL || v > 2147483647LL) bad(key, "integer out of range");
  return static_cast<int>(v);
}

bool as_bool(const std::string& key, const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
  }
  bad(key, "expected true or false");
}

std::string as_string(const std::string& key, const json& j) {
  if (!j.is_string()) bad(key, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur.erase(0, cur.find_first_not_of(" \t"));
    cur.erase(cur.find_last_not_of(" \t") + 1);
    out.push_back(cur);
  }
  return out;
}

/// Array, scalar or comma-separated string.
std::vector<json> as_list(const std::string& key, const json& j) {
  std::vector<json> out;
  if (j.is_array()) {
    for (const auto& x : j) out.push_back(x);
  } else if (j.is_string()) {
    for (const auto& s : split(j.get<std::string>(), ',')) {
      if (s.empty()) bad(key, "empty list element");
      out.emplace_back(s);
    }
  } else {
    out.push_back(j);
  }
  return out;
}

std::vector<double> as_doubles(const std::string& key, const json& j) {
  std::vector<double> v;
  for (const auto& x : as_list(key, j)) v.push_back(as_double(key, x));
  return v;
}

cplx as_complex(const std::string& key, const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2) return {as_double(key, j[0]), as_double(key, j[1])};
  if (j.is_string()) {
    try {
      return parse_complex(j.get<std::string>());
    } catch (const Error& e) {
      bad(key, e.what());
    }
  }
  bad(key, "expected a complex number");
}

std::vector<cplx> as_complexes(const std::string& key, const json& j) {
  // A bare [re, im] pair is one number, not two.
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {as_complex(key, j)};
  std::vector<cplx> v;
  for (const auto& x : as_list(key, j)) v.push_back(as_complex(key, x));
  return v;
}

json complex_list_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (cplx z : v) a.push_back(json::array({z.real(), z.imag()}));
  return a;
}

void flatten_into(const json& j, const std::string& prefix, ConfigEntries& out) {
  if (j.is_object() && !(prefix.size() && j.empty())) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten_into(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    return;
  }
  if (prefix.empty()) fail(ErrorCode::Config, "config file must hold a JSON object");
  out[prefix] = j;
}

void apply(RunConfig& c, const std::string& key, const json& v) {
  if (key == "domain.kind") c.domain_kind = as_string(key, v);
  else if (key == "domain.r_in") c.r_in = as_double(key, v);
  else if (key == "domain.R") c.R = as_double(key, v);
  else if (key == "quad.n_r") c.n_r = as_int(key, v);
  else if (key == "quad.n_theta") c.n_theta = as_int(key, v);
  else if (key == "quad.m_boundary") c.m_boundary = as_int(key, v);
  else if (key == "quad.grading") c.grading = as_int(key, v);
  else if (key == "basis.N") c.N = as_int(key, v);
  else if (key == "solver.tol") c.tol = as_double(key, v);
  else if (key == "solver.max_iter") c.max_iter = as_int(key, v);
  else if (key == "solver.eps_floor") c.eps_floor = as_double(key, v);
  else if (key == "seed") {
    const long long s = as_integer(key, v);
    if (s < 0) bad(key, "seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  else if (key == "output.dir") c.out_dir = as_string(key, v);
  else if (key == "output.format") c.format = as_string(key, v);
  else if (key == "quick") c.quick = as_bool(key, v);
  else if (key == "run.p") c.p = as_doubles(key, v);
  else if (key == "run.z") c.z = as_complexes(key, v);
  else if (key == "run.zeta") c.zeta = as_complexes(key, v);
  else if (key == "run.X") c.X = as_complexes(key, v);
  else if (key == "run.region") c.region = as_string(key, v);
  else if (key == "run.eps") c.eps = as_doubles(key, v);
  else if (key == "run.s") c.s = as_doubles(key, v);
  else if (key == "run.radii") c.radii = as_doubles(key, v);
  else if (key == "run.coeffs") c.coeffs = as_complexes(key, v);
  else if (key == "run.oracle") c.oracle = as_string(key, v);
  else if (key == "run.candidates") c.candidates = as_int(key, v);
  else if (key == "run.multistarts") c.multistarts = as_int(key, v);
  else if (key == "run.levels") c.levels = as_int(key, v);
  else if (key == "run.h") c.h = as_double(key, v);
  else if (key == "run.criteria") {
    c.criteria.clear();
    for (double x : as_doubles(key, v)) c.criteria.push_back(as_int(key, x));
  }
  else fail(ErrorCode::Config, "unknown config key '" + key + "'");
}

void validate(const RunConfig& c) {
  auto check = [](bool ok, const std::string& key, const std::string& what) {
    if (!ok) bad(key, what);
  };
  check(c.domain_kind == "disc" || c.domain_kind == "annulus" || c.domain_kind == "punctured",
        "domain.kind", "expected disc, annulus or punctured");
  check(c.r_in > 0 && c.r_in < 1, "domain.r_in", "must lie in (0, 1)");
  check(c.R > 0 && std::isfinite(c.R), "domain.R", "must be positive");
  check(c.R == 1.0 || c.domain_kind == "disc", "domain.R", "only the disc takes a radius");
  check(c.n_r >= 2 && c.n_r <= 4096, "quad.n_r", "must lie in [2, 4096]");
  check(c.n_theta >= 8 && c.n_theta <= 1 << 16, "quad.n_theta", "must lie in [8, 65536]");
  check(c.m_boundary >= 8, "quad.m_boundary", "must be >= 8");
  check(c.grading >= 0 && c.grading <= 16, "quad.grading", "must lie in [0, 16] (0 = automatic)");
  check(c.N >= 2 && c.N <= 400, "basis.N", "must lie in [2, 400]");
  check(c.tol > 0 && c.tol < 1, "solver.tol", "must lie in (0, 1)");
  check(c.max_iter >= 1, "solver.max_iter", "must be >= 1");
  check(c.eps_floor > 0 && c.eps_floor < 1, "solver.eps_floor", "must lie in (0, 1)");
  check(c.format == "csv" || c.format == "json" || c.format == "both", "output.format",
        "expected csv, json or both");
  check(!c.out_dir.empty(), "output.dir", "must not be empty");
  for (double p : c.p) check(p > 0 && std::isfinite(p), "run.p", "exponents must be positive");
  for (double e : c.eps) check(e > 0 && e < 1, "run.eps", "values must lie in (0, 1)");
  for (double r : c.radii) check(r > 0 && r < 1, "run.radii", "values must lie in (0, 1)");
  for (double s : c.s) check(std::isfinite(s), "run.s", "values must be finite");
  check(c.candidates >= 0, "run.candidates", "must be >= 0");
  check(c.multistarts >= 1, "run.multistarts", "must be >= 1");
  check(c.levels >= 1 && c.levels <= 40, "run.levels", "must lie in [1, 40]");
  check(c.h >= 0 && c.h < 0.1, "run.h", "must lie in [0, 0.1)");
  for (int id : c.criteria) check(id >= 1 && id <= 15, "run.criteria", "ids must lie in 1..15");
  try {
    parse_region(c.region);
  } catch (const Error& e) {
    bad("run.region", e.what());
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> k{
      "domain.kind", "domain.r_in", "domain.R", "quad.n_r", "quad.n_theta", "quad.m_boundary",
      "quad.grading", "basis.N", "solver.tol", "solver.max_iter", "solver.eps_floor", "seed",
      "output.dir", "output.format", "quick", "run.p", "run.z", "run.zeta", "run.X", "run.region",
      "run.eps", "run.s", "run.radii", "run.coeffs", "run.oracle", "run.candidates",
      "run.multistarts", "run.levels", "run.h", "run.criteria"};
  return k;
}

ConfigEntries flatten_config(const json& j) {
  ConfigEntries out;
  flatten_into(j, "", out);
  return out;
}

ConfigEntries load_config_file(const std::string& path) {
  std::ifstream f(path);
  require(static_cast<bool>(f), ErrorCode::Io, "cannot open config file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Config, "config file " + path + ": " + e.what());
  }
  return flatten_config(j);
}

RunConfig make_config(const std::string& command, const ConfigEntries& file, const ConfigEntries& flags) {
  RunConfig c;
  c.command = command;
  ConfigEntries merged = file;
  for (const auto& [k, v] : flags) merged[k] = v;
  for (const auto& [k, v] : merged) apply(c, k, v);
  validate(c);
  return c;
}

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ' && ch != '\t') s += ch;
  require(!s.empty(), ErrorCode::Config, "empty complex number");
  if (s.back() != 'i' && s.back() != 'j') return parse_double("complex", s);
  s.pop_back();
  // Split at the last sign that is not leading and not part of an exponent.
  std::size_t cut = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  const std::string re = cut == std::string::npos ? "" : s.substr(0, cut);
  std::string im = cut == std::string::npos ? s : s.substr(cut);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return {re.empty() ? 0.0 : parse_double("complex", re), parse_double("complex", im)};
}

RegionPtr parse_region(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "complement") return Region::complement(parse_region(rest));
  if (head == "union") {
    const auto bar = rest.find('|');
    require(bar != std::string::npos, ErrorCode::Config, "union needs two regions separated by '|'");
    return Region::union_of(parse_region(rest.substr(0, bar)), parse_region(rest.substr(bar + 1)));
  }
  const auto args = split(rest, ':');
  if (head == "subdisc" && args.size() == 1) return Region::sub_disc(parse_double("region", args[0]));
  if (head == "band" && args.size() == 2)
    return Region::annular_band(parse_double("region", args[0]), parse_double("region", args[1]));
  fail(ErrorCode::Config, "unrecognized region '" + spec + "'");
}

Domain RunConfig::domain() const {
  if (domain_kind == "annulus") return Domain::annulus(r_in);
  if (domain_kind == "punctured") return Domain::punctured_disc();
  return R == 1.0 ? Domain::unit_disc() : Domain::disc(R);
}

LabConfig RunConfig::lab() const {
  LabConfig l;
  l.N = N;
  l.n_r = n_r;
  l.n_theta = n_theta;
  l.grading = grading;
  l.solver.tol = tol;
  l.solver.max_iter = max_iter;
  l.solver.eps_floor = eps_floor;
  if (h > 0) l.fd_step = h;
  return l;
}

SchwarzOptions RunConfig::schwarz() const {
  SchwarzOptions o;
  o.N = N;
  o.n_r = n_r;
  o.n_theta = n_theta;
  o.multistarts = multistarts;
  o.seed = seed;
  return o;
}

json RunConfig::canonical() const {
  json j;
  j["domain"] = {{"kind", domain_kind}, {"r_in", r_in}, {"R", R}};
  j["quad"] = {{"n_r", n_r}, {"n_theta", n_theta}, {"m_boundary", m_boundary}, {"grading", grading}};
  j["basis"] = {{"N", N}};
  j["solver"] = {{"tol", tol}, {"max_iter", max_iter}, {"eps_floor", eps_floor}};
  j["seed"] = seed;
  j["quick"] = quick;
  j["run"] = {{"p", p},
              {"z", complex_list_json(z)},
              {"zeta", complex_list_json(zeta)},
              {"X", complex_list_json(X)},
              {"region", region},
              {"eps", eps},
              {"s", s},
              {"radii", radii},
              {"coeffs", complex_list_json(coeffs)},
              {"oracle", oracle},
              {"candidates", candidates},
              {"multistarts", multistarts},
              {"levels", levels},
              {"h", h},
              {"criteria", criteria}};
  return j;
}

std::string RunConfig::hash() const {
  return hex64(fnv1a64(command + "\n" + canonical().dump()));
}

}  // namespace pberg
