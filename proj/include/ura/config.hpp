#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ura/model.hpp"
#include "ura/tree_code.hpp"

namespace ura {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Execution options read from the reserved "harness" section.
struct HarnessOptions {
  int64_t trials = 1;
  int parallelism = 1;
  bool fresh_dict_per_trial = false;
  double support_threshold = 0.5;
  ParityAllocation allocation = ParityAllocation::uniform_tail;
  int64_t list_cap = int64_t{1} << 16;
  std::string out_dir = ".";
  std::string format = "csv";
};

// Grid axes read from the reserved "sweep" section; empty axes are held at
// the base configuration's value.  Cells are the cartesian product, ordered
// row-major over the axes in declaration order below.
struct SweepSpec {
  std::vector<double> eb_n0_db;
  std::vector<int64_t> K_a;
  std::vector<int> J;
  std::vector<int64_t> L;
  std::vector<int64_t> n;
  std::vector<double> r_out;  // realized as B = round(r_out L J)
};

struct LoadedConfig {
  SystemConfig system;
  HarnessOptions harness;
  SweepSpec sweep;
  bool has_eb_n0_db = false;  // P was given as an Eb/N0 in dB
  double eb_n0_db = 0.0;
};

// One sweep cell: a fully resolved configuration plus its Eb/N0 in dB
// (always derivable: Eb = n P / B per data bit).
struct CellSpec {
  SystemConfig config;
  double eb_n0_db = 0.0;
};

// Parse a JSON or TOML document.  Top-level keys must match SystemConfig
// field names exactly ("eb_n0_db" is accepted in place of "P"); "harness" and
// "sweep" are reserved sections.  Unknown keys anywhere are an error.
LoadedConfig parse_config_json(const std::string& text);
LoadedConfig parse_config_toml(const std::string& text);
LoadedConfig load_config_file(const std::string& path);

// Power from an Eb/N0 given in dB, with Eb counted per data bit:
// Eb/N0 = n P / (B N0)  =>  P = 10^(db/10) · B · 2 N0_half / n.
double power_from_eb_n0_db(double eb_n0_db, int64_t n, int64_t B,
                           double N0_half);
double eb_n0_db_from_power(const SystemConfig& config);

// Expand the sweep grid against the base system config; every cell is
// validated.  A config without sweep axes yields exactly one cell.
std::vector<CellSpec> expand_sweep(const LoadedConfig& loaded);

}  // namespace ura
