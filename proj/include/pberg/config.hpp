#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pberg/domain.hpp"
#include "pberg/kernels.hpp"
#include "pberg/schwarz.hpp"

namespace pberg {

/// Dotted key -> value, e.g. "domain.kind" -> "annulus".
using ConfigEntries = std::map<std::string, nlohmann::json>;

/// Validated settings for one CLI run.
struct RunConfig {
  std::string command;

  std::string domain_kind = "disc";  // disc | annulus | punctured
  double r_in = 0.5;
  double R = 1.0;

  int n_r = 32;
  int n_theta = 64;
  int m_boundary = 256;
  int grading = 0;
  int N = 24;

  double tol = 1e-11;
  int max_iter = 300;
  double eps_floor = 1e-8;

  std::uint64_t seed = 42;
  std::string out_dir = "pberg-out";
  std::string format = "both";  // csv | json | both
  bool quick = false;

  // Subcommand parameters; empty lists select per-command defaults.
  std::vector<double> p;
  std::vector<cplx> z;
  std::vector<cplx> zeta;
  std::vector<cplx> X;
  std::string region = "subdisc:0.5";
  std::vector<double> eps;
  std::vector<double> s;
  std::vector<double> radii;
  std::vector<cplx> coeffs;
  std::string oracle = "disc-diag";
  int candidates = 100;
  int multistarts = 8;
  int levels = 12;
  double h = 0.0;  // 0 selects LabConfig::fd_step
  std::vector<int> criteria;

  Domain domain() const;
  LabConfig lab() const;
  SchwarzOptions schwarz() const;

  /// Canonical JSON of every field that affects results (output settings excluded).
  nlohmann::json canonical() const;
  /// FNV-1a of the command and canonical(), as 16 hex digits.
  std::string hash() const;
};

/// All accepted dotted keys.
const std::vector<std::string>& config_keys();

/// Nested objects become dotted keys; arrays and scalars are leaves.
ConfigEntries flatten_config(const nlohmann::json& j);
ConfigEntries load_config_file(const std::string& path);

/// Applies `file` then `flags` (flags win) over the defaults. Rejects
/// unknown keys and invalid values with Config errors before any computation.
RunConfig make_config(const std::string& command, const ConfigEntries& file, const ConfigEntries& flags);

/// "0.3", "-0.2i", "0.3+0.2i", "1e-3-2e-2i", "i".
cplx parse_complex(const std::string& text);

/// "subdisc:r", "band:a:b", "complement:<spec>", "union:<spec>|<spec>".
RegionPtr parse_region(const std::string& spec);

}  // namespace pberg
