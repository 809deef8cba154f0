#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vanet/crypto.hpp"
#include "vanet/geo.hpp"
#include "vanet/packets.hpp"
#include "vanet/rng.hpp"
#include "vanet/verify.hpp"

namespace vanet::protocol {

struct RoadInfo {
  uint32_t road_id = 1;
  geo::RoadProfile profile{3, 120.0, geo::RoadClass::Conventional, 0.0};
};

struct ProtocolConfig {
  crypto::DigestAlgo algo = crypto::DigestAlgo::Sha1Class;
  packets::PacketBudget budget{512};
  std::size_t max_signers = 0;  // 0 derives the cap from budget and algo
  verify::VerifyPolicy policy{};
  int64_t group_window_ms = 2'000;
  // After a group closes, how long its members wait for the aggregate to
  // arrive before a fresh observation may open a new group.
  int64_t regroup_holdoff_ms = 3'000;
  int64_t agreement_window_ms = 60'000;
  double position_tolerance_m = 25.0;
  geo::ZoneRadii zones{100.0, 500.0, 2000.0};
  RoadInfo road{};
  // Base storage time per event type; road class scales it.
  std::map<uint8_t, int64_t> event_basic_time_ms{{packets::kTrafficJam, 300'000},
                                                 {packets::kFreeParking, 90'000}};
  double conventional_factor = 2.0;
  double highway_factor = 1.0;

  std::size_t effective_max_signers() const;
};

// How long a warning stays relevant: base time for the event type scaled by
// the road class factor. Unknown event types have no defined lifetime.
int64_t storage_time_ms(const ProtocolConfig& cfg, uint8_t event_type, geo::RoadClass rc);

struct ObservedEvent {
  geo::Position pos;
  uint8_t event_type = packets::kTrafficJam;
  uint8_t direction = 0;
  int64_t observed_at_ms = 0;  // perceived onset, not the sampling instant
};

class EventSensor {
 public:
  virtual ~EventSensor() = default;
  virtual std::vector<ObservedEvent> observe(crypto::NodeId id, const geo::Position& pos,
                                             int64_t now_ms) = 0;
};

// Distance and coordinate hooks let a world with wrapped coordinates present
// ring-correct geometry without the protocol knowing about the wrap.
using Metric = std::function<double(const geo::Position&, const geo::Position&)>;
using Rebase = std::function<geo::Position(const geo::Position& p, const geo::Position& anchor)>;

struct Env {
  const crypto::Directory* directory = nullptr;
  EventSensor* sensor = nullptr;
  ProtocolConfig cfg{};
  Metric metric = [](const geo::Position& a, const geo::Position& b) {
    return geo::planar_distance(a, b);
  };
  Rebase rebase = [](const geo::Position& p, const geo::Position&) { return p; };
};

// Canonical form shared by everyone who observed the same event: the source
// field is zeroed so that byte equality does not depend on who spoke first.
packets::EventReport canonical_report(const ObservedEvent& obs, const ProtocolConfig& cfg);

// Store and group keys are the canonical report bytes themselves.
using EventKey = std::string;
EventKey event_key(const packets::EventReport& report);

bool matches_observation(const ObservedEvent& obs, const packets::EventReport& report,
                         const Env& env);

// Signed payloads. Aggregate-ready signatures cover the canonical report
// alone; the request and support wrappers bind their envelope fields.
std::vector<uint8_t> w_payload(const packets::EventReport& report, crypto::NodeId sender);
std::vector<uint8_t> r_payload(const packets::PacketR& r);

packets::PacketW make_w(const crypto::KeyPair& kp, const packets::EventReport& report,
                        crypto::DigestAlgo algo);
packets::PacketR make_r(const crypto::KeyPair& kp, const packets::EventReport& report,
                        const geo::Position& pos, int64_t request_ts_ms, crypto::DigestAlgo algo);
packets::PacketS make_s(const crypto::KeyPair& kp, const packets::EventReport& report,
                        const geo::Position& pos, int64_t ts_ms, crypto::DigestAlgo algo);
packets::SignerRecord make_record(const crypto::KeyPair& kp, const packets::EventReport& report,
                                  const geo::Position& pos, crypto::DigestAlgo algo);

struct Candidate {
  crypto::NodeId id;
  geo::Position pos;
  int64_t request_ts_ms = 0;
};

// Election order: oldest request first, then closest to the cell center,
// then smallest id. Total, so every witness set agrees on the winner.
bool outranks(const Candidate& a, const Candidate& b, const geo::CellGrid& grid,
              const geo::CellId& cell);

enum class AReceipt : uint8_t {
  DirectStored,       // danger zone, matches own observation
  Reliable,           // uncertainty zone, sampled verification passed
  CombinedStored,     // security zone, corroborated by a second group
  NotEnoughRetained,  // security zone, valid but still a single group
  Duplicate,
  OutOfScope,
  Expired,
  DirectRejected,   // danger zone, contradicts own observation
  NotReliable,      // a checked signature failed
  NotEnoughDropped, // too few signatures to ever trust
  CellInconsistent, // signers scattered over several cells
  Malformed,
  FromMarked,  // leader already caught lying
};

const char* receipt_name(AReceipt r);
bool receipt_accepts(AReceipt r);  // did the packet enter the store

struct StoredWarning {
  packets::PacketA packet;
  std::vector<uint8_t> bytes;  // encoded form, reused for diffing and relay
  int64_t stored_at_ms = 0;
  int64_t expires_at_ms = 0;
  AReceipt how = AReceipt::DirectStored;
};

struct PendingGroup {
  enum class State : uint8_t { Open, Closed };

  packets::EventReport report;  // canonical
  std::vector<uint8_t> report_bytes;
  geo::CellGrid grid;
  int64_t created_ms = 0;
  int64_t deadline_ms = 0;
  int64_t holdoff_until_ms = 0;
  State state = State::Open;

  bool witness = false;
  int64_t my_request_ts_ms = 0;
  bool w_sent = false;
  bool r_sent = false;
  bool s_sent = false;
  geo::CellId my_cell{};
  geo::Position my_nomination_pos{};

  std::optional<Candidate> best;                       // best candidate for my cell
  std::map<uint64_t, packets::SignerRecord> collected;  // support for my cell, by id
};

struct NodeCounters {
  uint64_t w_sent = 0;
  uint64_t r_sent = 0;
  uint64_t s_sent = 0;
  uint64_t a_emitted = 0;
  uint64_t groups_won = 0;
  uint64_t groups_lost = 0;
  uint64_t groups_suppressed = 0;  // store already had the warning
  uint64_t groups_thin = 0;        // won but below the signature floor
  uint64_t marks = 0;
  uint64_t store_expired = 0;
  uint64_t prob_verifications = 0;  // sampled-verification passes over aggregates
  uint64_t signatures_checked = 0;  // total signature checks across them
};

class Node {
 public:
  Node(const crypto::KeyPair& kp, uint8_t direction, const Env* env);

  crypto::NodeId id() const { return kp_.node; }
  uint8_t direction() const { return direction_; }

  // Sensor reading delivered at a check tick. Opens a group and returns the
  // warning request that seeds it when the event is new.
  std::optional<packets::PacketW> on_observation(const ObservedEvent& obs, int64_t now_ms,
                                                 const geo::Position& self);

  // Deadline pass, once per check tick: finalizes due groups (returning any
  // aggregate this node gets to emit as the elected leader) and forgets
  // closed groups whose holdoff ran out.
  std::vector<packets::PacketA> on_tick(int64_t now_ms, const geo::Position& self);

  std::optional<packets::PacketR> on_packet_w(const packets::PacketW& w, int64_t now_ms,
                                              const geo::Position& self);
  std::optional<packets::PacketS> on_packet_r(const packets::PacketR& r, int64_t now_ms,
                                              const geo::Position& self);
  void on_packet_s(const packets::PacketS& s, int64_t now_ms, const geo::Position& self);

  AReceipt on_packet_a(const packets::PacketA& a, int64_t now_ms, const geo::Position& self,
                       Rng& rng);

  std::size_t expire(int64_t now_ms);  // purge due store and evidence entries

  const std::map<EventKey, StoredWarning>& store() const { return store_; }
  const std::map<EventKey, PendingGroup>& groups() const { return groups_; }
  bool marked_malicious(crypto::NodeId id) const { return marked_.count(id.value) > 0; }
  std::size_t marked_count() const { return marked_.size(); }
  const NodeCounters& counters() const { return counters_; }

 private:
  std::optional<ObservedEvent> matching_observation(const packets::EventReport& report,
                                                    int64_t now_ms, const geo::Position& self);
  bool witness_eligible(const packets::EventReport& report, const geo::Position& self) const;
  AReceipt judge_direct(const packets::PacketA& a, const EventKey& key, int64_t now_ms,
                        const geo::Position& self, bool matches);
  AReceipt accept(const packets::PacketA& a, const EventKey& key, int64_t now_ms, AReceipt how);

  crypto::KeyPair kp_;
  uint8_t direction_;
  const Env* env_;

  std::map<EventKey, StoredWarning> store_;
  std::map<EventKey, PendingGroup> groups_;
  std::map<EventKey, std::map<geo::CellId, packets::PacketA>> evidence_;
  std::set<std::string> poisoned_;  // packet bytes already judged bad
  std::set<uint64_t> marked_;       // nodes caught signing false reports
  NodeCounters counters_;
};

}  // namespace vanet::protocol
