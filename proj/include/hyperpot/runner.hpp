#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperpot/unfold.hpp"

namespace hyperpot {

inline constexpr const char* kVersion = "0.1.0";

// Malformed or semantically invalid configuration; the CLI maps it to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value configuration with [section] headers. Keys before the
// first header live in the unnamed section "". '#' starts a comment.
// Duplicate keys within a section are rejected rather than silently
// overwritten, so configs diff cleanly.
class Config {
 public:
  static Config parse_text(const std::string& text, const std::string& origin = "<config>");
  static Config parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  long long integer(const std::string& section, const std::string& key) const;
  long long integer_or(const std::string& section, const std::string& key,
                       long long fallback) const;

  // normalized "section.key = value" lines in sorted order; the input hash
  // recorded in reports is taken over this text, so formatting-only edits
  // to a config do not change its identity
  std::string canonical() const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return data_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
  std::string origin_;
};

std::uint64_t fnv1a(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

// deterministic probe pairs for uniformity checks: axis and diagonal
// extremes of the sample plus the deepest interior point
std::vector<std::pair<int, int>> canonical_pairs(const DomainSample& ds);

// One stop transfer audit: builds the Dirichlet operator of the sample,
// pushes it onto the unfolding in the given dimension, solves a boundary
// value problem to measure how far transferred harmonics are from harmonic,
// and compares the spectral bottoms of the two congruent pencils.
struct TransferCheck {
  double n_dim = 2.0;
  double max_v_dsq = 0.0;
  bool v_bounded = true;
  double harmonic_residual = 0.0;
  double lambda_base = 0.0;      // hardy constant of the base operator
  double lambda_unfolded = 0.0;  // bottom of the unfolded pencil
  double rel_gap = 0.0;
};
TransferCheck transfer_check(const DomainSample& ds, double n_dim, double tol = 1e-9);

struct RunOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
};

// Executes the pipeline named by the top-level `pipeline` key and writes
// <pipeline>.json into out_dir. Returns 0 when every hard assertion holds
// and 3 when a check fails numerically (the report is still written, with
// the failures listed). Unknown pipelines and missing keys raise ConfigError.
int run_config(const Config& cfg, const RunOptions& opt, std::string* report_path = nullptr);

}  // namespace hyperpot
