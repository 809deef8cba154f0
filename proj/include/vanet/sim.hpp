#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vanet/protocol.hpp"

namespace vanet::sim {

enum class Behavior : uint8_t {
  Honest = 0,
  FalseInfo,             // fabricates an event and pushes a self-signed warning
  ModifyAggregate,       // relays stored warnings with the content altered
  DiscardAggregate,      // holds warnings but never passes them on
  FalseTrustIncrease,    // signs support for groups it never witnessed
  LeaderFalseSignature,  // pads its own aggregates with a forged record
  Collusion,             // joint fabrication with every other colluder
};

const char* behavior_name(Behavior b);
std::optional<Behavior> parse_behavior(std::string_view name);

struct SimConfig {
  uint64_t seed = 1;
  int node_count = 20;
  double strip_length_m = 1'000;  // vehicles loop around this strip
  int64_t duration_ms = 1'000'000;
  int64_t check_interval_ms = 1'000;
  int64_t latency_ms = 100;
  int64_t retransmit_start_ms = 40'000;
  int64_t retransmit_interval_ms = 10'000;
  double tx_range_m = 100;  // radio reach, at most 300
  double loss = 0.0;        // per-delivery drop probability

  // One scripted event: it appears at the first check tick after the lead
  // vehicle of the affected direction has driven this far, provided at
  // least event_min_vehicles share its cell within half the danger radius.
  double event_trigger_distance_m = 800;
  uint8_t event_type = packets::kTrafficJam;
  uint8_t event_direction = 0;
  int event_min_vehicles = 3;

  int64_t attack_start_ms = 60'000;  // when fabrication behaviors fire

  bool aggregation = true;  // false runs the one-warning-per-source baseline
  bool record_trace = true;
  protocol::ProtocolConfig protocol{};
  std::map<uint64_t, Behavior> behaviors;  // node id -> behavior, default honest
};

// Throws std::invalid_argument naming the offending field.
void validate(const SimConfig& cfg);

struct AttackStats {
  uint64_t injected = 0;
  uint64_t detected = 0;
  uint64_t succeeded = 0;
};

struct Metrics {
  uint64_t sent_w = 0, sent_r = 0, sent_s = 0, sent_a = 0;
  uint64_t total_sends = 0;
  uint64_t total_bytes = 0;
  uint64_t deliveries = 0, losses = 0;

  int events_formed = 0;
  int64_t event_onset_ms = -1;
  uint64_t aggregates_emitted = 0;
  uint64_t group_size_total = 0;
  double mean_group_size = 0;

  uint64_t prob_verifications = 0;
  uint64_t signatures_checked = 0;
  double mean_checked = 0;
  uint64_t baseline_verifications = 0;

  std::map<std::string, uint64_t> receipts;  // receipt name -> count
  uint64_t accepts_direct = 0, accepts_reliable = 0, accepts_combined = 0;
  uint64_t baseline_accepts = 0;
  uint64_t false_reliable = 0;  // attack content that some node stored
  uint64_t marks = 0;
  uint64_t expirations = 0;

  // Dissemination of the real event's warning.
  int covered = 0;
  int eligible = 0;  // came within radio reach of a holder early enough
  bool all_reachable_covered = true;
  int64_t full_coverage_ms = -1;
  std::vector<std::pair<int64_t, int>> coverage_timeline;

  std::map<Behavior, AttackStats> attacks;
};

struct RunResult {
  Metrics metrics;
  std::string trace;
};

RunResult run(const SimConfig& cfg);

}  // namespace vanet::sim
