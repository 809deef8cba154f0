#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vanet/sim.hpp"

namespace vanet::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One `key = value` per line, `#` starts a comment, later keys override
// earlier ones. Unknown keys and unparsable values throw ConfigError with
// the offending key in the message. Every key has a default, so the empty
// string parses to the stock configuration.
sim::SimConfig parse_config(std::string_view text);
sim::SimConfig load_config(const std::string& path);

// The stock configuration as a config file; parses back to SimConfig{}.
std::string default_config_text();

// "3:false_info,5:modify_aggregate" -> behavior overrides by node id.
std::map<uint64_t, sim::Behavior> parse_adversaries(std::string_view spec);

// Capacity table over the four packet budgets and three digests.
std::string render_sizing_csv();

// Sampled-verification coverage: rows (k, n, p, P_at_least_two).
// Requires 2 <= n_lo <= n_hi <= 200 and every k >= 1.
std::string render_prob_csv(const std::vector<int>& ks, int n_lo, int n_hi);

// Mean number of checked signatures per aggregate size, measured by
// replaying the index-selection step many times.
struct VerifyCountRow {
  int n = 0;
  uint64_t trials = 0;
  double mean_checked = 0;
  double expected = 0;
};
std::vector<VerifyCountRow> verify_count_rows(const std::vector<int>& sizes, uint64_t seed,
                                              uint64_t trials);
std::string render_verify_count_csv(const std::vector<VerifyCountRow>& rows);

// Flat key,value dump of one run's metrics; key order is fixed.
std::string render_metrics_csv(const sim::Metrics& m);

struct SweepParams {
  std::vector<int> node_counts{10, 20, 30, 40};
  int runs = 100;
  bool per_run = false;  // emit one row per (node_count, seed, scheme) instead
  // Behavior overrides per swept node count; defaults to the base config's
  // adversaries with out-of-range ids dropped.
  std::function<std::map<uint64_t, sim::Behavior>(int node_count)> behaviors_for;
};

// Runs every (node_count, seed) pair under both schemes and reports
// per-node-count means and standard deviations, rows sorted by node count.
std::string run_sweep_csv(const sim::SimConfig& base, const SweepParams& params);

}  // namespace vanet::config
