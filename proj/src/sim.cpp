#include "vanet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <variant>

#include "vanet/rng.hpp"

namespace vanet::sim {

const char* behavior_name(Behavior b) {
  switch (b) {
    case Behavior::Honest: return "honest";
    case Behavior::FalseInfo: return "false_info";
    case Behavior::ModifyAggregate: return "modify_aggregate";
    case Behavior::DiscardAggregate: return "discard_aggregate";
    case Behavior::FalseTrustIncrease: return "false_trust_increase";
    case Behavior::LeaderFalseSignature: return "leader_false_signature";
    case Behavior::Collusion: return "collusion";
  }
  return "unknown";
}

std::optional<Behavior> parse_behavior(std::string_view name) {
  for (Behavior b : {Behavior::Honest, Behavior::FalseInfo, Behavior::ModifyAggregate,
                     Behavior::DiscardAggregate, Behavior::FalseTrustIncrease,
                     Behavior::LeaderFalseSignature, Behavior::Collusion})
    if (name == behavior_name(b)) return b;
  return std::nullopt;
}

void validate(const SimConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (cfg.node_count < 1 || cfg.node_count > 10'000) fail("node_count must be in [1, 10000]");
  if (!(cfg.strip_length_m > 0)) fail("strip_length_m must be positive");
  if (cfg.duration_ms < 0) fail("duration_ms must not be negative");
  if (cfg.check_interval_ms < 1) fail("check_interval_ms must be at least 1 ms");
  if (cfg.latency_ms < 1) fail("latency_ms must be at least 1 ms");
  if (cfg.retransmit_start_ms < 0) fail("retransmit_start_ms must not be negative");
  if (cfg.retransmit_interval_ms < 1) fail("retransmit_interval_ms must be at least 1 ms");
  if (!(cfg.tx_range_m > 0) || cfg.tx_range_m > 300) fail("tx_range_m must be in (0, 300]");
  if (cfg.loss < 0 || cfg.loss >= 1) fail("loss must be in [0, 1)");
  if (cfg.event_trigger_distance_m < 0) fail("event_trigger_distance_m must not be negative");
  if (cfg.event_direction > 1) fail("event_direction must be 0 or 1");
  if (cfg.event_min_vehicles < 1) fail("event_min_vehicles must be at least 1");
  if (cfg.attack_start_ms < 0) fail("attack_start_ms must not be negative");
  if (!cfg.protocol.zones.valid())
    fail("zones must satisfy 0 < danger < uncertainty < security");
  if (cfg.protocol.zones.danger_m >= cfg.strip_length_m / 2)
    fail("danger radius must be smaller than half the strip");
  if (cfg.protocol.event_basic_time_ms.find(cfg.event_type) ==
      cfg.protocol.event_basic_time_ms.end())
    fail("event_type has no storage time entry");
  if (cfg.protocol.road.profile.lanes < 1) fail("lanes must be at least 1");
  if (cfg.protocol.road.profile.speed_limit_kmh <= 0) fail("speed_limit_kmh must be positive");
  for (const auto& [id, b] : cfg.behaviors) {
    (void)b;
    if (id < 1 || id > static_cast<uint64_t>(cfg.node_count))
      fail("behavior assigned to unknown node id " + std::to_string(id));
  }
}

namespace {

using Bytes = std::shared_ptr<const std::vector<uint8_t>>;

struct Vehicle {
  crypto::KeyPair kp;
  uint8_t direction = 0;
  int lane = 0;
  double x0 = 0;
  double speed_ms = 0;
  Behavior behavior = Behavior::Honest;
  std::unique_ptr<protocol::Node> node;

  // baseline scheme: one warning per source, trusted on a valid signature
  std::map<std::string, int64_t> baseline_store;  // packet bytes -> expiry

  int64_t covered_at = -1;
  int64_t reachable_at = -1;
};

struct Ev {
  int64_t due = 0;
  uint64_t seq = 0;
  enum Kind : uint8_t { Deliver, Check, Retransmit } kind = Deliver;
  int sender = -1;
  Bytes bytes;
  std::vector<int> recipients;  // fixed at send time
};

struct EvAfter {
  bool operator()(const Ev& a, const Ev& b) const {
    if (a.due != b.due) return a.due > b.due;
    return a.seq > b.seq;
  }
};

struct CraftedAttack {
  Bytes bytes;
  int sender;
  int64_t expires_ms;
};

class World : protocol::EventSensor {
 public:
  explicit World(const SimConfig& cfg)
      : cfg_(cfg), rng_(mix_seed({cfg.seed, 0x76616e6574ULL})) {
    env_.directory = &dir_;
    env_.sensor = this;
    env_.cfg = cfg_.protocol;
    env_.metric = [this](const geo::Position& a, const geo::Position& b) {
      return ring_dist(a, b);
    };
    env_.rebase = [this](const geo::Position& p, const geo::Position& anchor) {
      return rebase(p, anchor);
    };

    const geo::RoadProfile& road = cfg_.protocol.road.profile;
    double limit_ms = road.speed_limit_kmh / 3.6;
    vehicles_.reserve(cfg_.node_count);
    for (int i = 0; i < cfg_.node_count; ++i) {
      Vehicle v;
      v.kp = crypto::make_keypair({static_cast<uint64_t>(i) + 1}, cfg_.seed);
      dir_.enroll(v.kp);
      v.direction = static_cast<uint8_t>(i % 2);
      v.x0 = rng_.uniform(0.0, cfg_.strip_length_m);
      v.lane = static_cast<int>(rng_.below(static_cast<uint64_t>(road.lanes)));
      v.speed_ms = rng_.uniform(0.5, 1.0) * limit_ms;
      auto it = cfg_.behaviors.find(v.kp.node.value);
      if (it != cfg_.behaviors.end()) v.behavior = it->second;
      vehicles_.push_back(std::move(v));
    }
    for (Vehicle& v : vehicles_)
      v.node = std::make_unique<protocol::Node>(v.kp, v.direction, &env_);

    for (int i = 0; i < cfg_.node_count; ++i)
      if (vehicles_[i].direction == cfg_.event_direction) {
        lead_ = i;
        break;
      }
  }

  // Real perception: the one scripted event, seen by co-directional
  // vehicles inside its danger radius. The hazard clears when its warning
  // lifetime ends. Liars never get extra sight here; their packets are
  // crafted directly.
  std::vector<protocol::ObservedEvent> observe(crypto::NodeId id, const geo::Position& pos,
                                               int64_t now) override {
    std::vector<protocol::ObservedEvent> out;
    if (!event_spawned_ || now >= real_expiry_ms_) return out;
    const Vehicle& v = vehicles_[id.value - 1];
    if (v.direction != cfg_.event_direction) return out;
    if (ring_dist(pos, event_pos_) <= cfg_.protocol.zones.danger_m)
      out.push_back({event_pos_, cfg_.event_type, cfg_.event_direction, event_onset_ms_});
    return out;
  }

  RunResult go() {
    if (cfg_.check_interval_ms <= cfg_.duration_ms)
      push(Ev{cfg_.check_interval_ms, seq_++, Ev::Check, -1, {}, {}});
    if (cfg_.retransmit_start_ms <= cfg_.duration_ms)
      push(Ev{cfg_.retransmit_start_ms, seq_++, Ev::Retransmit, -1, {}, {}});

    while (!queue_.empty()) {
      Ev ev = queue_.top();
      queue_.pop();
      switch (ev.kind) {
        case Ev::Deliver: deliver(ev); break;
        case Ev::Check: check(ev.due); break;
        case Ev::Retransmit: retransmit(ev.due); break;
      }
    }
    finalize();
    return {std::move(metrics_), std::move(trace_)};
  }

 private:
  double ring_delta(double dx) const {
    double len = cfg_.strip_length_m;
    return dx - len * std::floor(dx / len + 0.5);
  }
  double ring_dist(const geo::Position& a, const geo::Position& b) const {
    return std::hypot(ring_delta(a.x - b.x), a.y - b.y);
  }
  geo::Position rebase(const geo::Position& p, const geo::Position& anchor) const {
    return {anchor.x + ring_delta(p.x - anchor.x), p.y, p.z};
  }
  geo::Position pos_of(int i, int64_t t_ms) const {
    const Vehicle& v = vehicles_[i];
    double len = cfg_.strip_length_m;
    double sign = v.direction == 0 ? 1.0 : -1.0;
    double x = std::fmod(v.x0 + sign * v.speed_ms * (static_cast<double>(t_ms) / 1000.0), len);
    if (x < 0) x += len;
    double y = v.direction == 0 ? 2.0 + 4.0 * v.lane : -2.0 - 4.0 * v.lane;
    return {x, y, 0};
  }

  void push(Ev ev) { queue_.push(std::move(ev)); }

  void trace_line(int64_t t, const char* kind, uint64_t node, const std::string& tail) {
    if (!cfg_.record_trace) return;
    trace_ += std::to_string(t);
    trace_ += '\t';
    trace_ += kind;
    trace_ += '\t';
    trace_ += std::to_string(node);
    trace_ += '\t';
    trace_ += tail;
    trace_ += '\n';
  }

  static const char* kind_of(uint8_t tag) {
    switch (tag) {
      case packets::kTagW: return "send_w";
      case packets::kTagR: return "send_r";
      case packets::kTagS: return "send_s";
      case packets::kTagA: return "send_a";
    }
    return "send";
  }

  void count_send(const std::vector<uint8_t>& bytes) {
    switch (bytes.empty() ? 0 : bytes[0]) {
      case packets::kTagW: ++metrics_.sent_w; break;
      case packets::kTagR: ++metrics_.sent_r; break;
      case packets::kTagS: ++metrics_.sent_s; break;
      case packets::kTagA: ++metrics_.sent_a; break;
      default: break;
    }
    ++metrics_.total_sends;
    metrics_.total_bytes += bytes.size();
  }

  void broadcast(int64_t now, int sender, Bytes bytes, bool include_self) {
    geo::Position from = pos_of(sender, now);
    Ev ev{now + cfg_.latency_ms, seq_++, Ev::Deliver, sender, bytes, {}};
    for (int j = 0; j < cfg_.node_count; ++j) {
      if (j == sender && !include_self) continue;
      if (ring_dist(from, pos_of(j, now)) <= cfg_.tx_range_m) ev.recipients.push_back(j);
    }
    count_send(*bytes);
    trace_line(now, kind_of((*bytes)[0]), vehicles_[sender].kp.node.value,
               packets::to_hex(*bytes));
    push(std::move(ev));
  }

  void unicast(int64_t now, int sender, int recipient, Bytes bytes) {
    count_send(*bytes);
    trace_line(now, "sync", vehicles_[sender].kp.node.value,
               std::to_string(vehicles_[recipient].kp.node.value));
    push(Ev{now + cfg_.latency_ms, seq_++, Ev::Deliver, sender, bytes, {recipient}});
  }

  static Bytes wrap(std::vector<uint8_t> bytes) {
    return std::make_shared<const std::vector<uint8_t>>(std::move(bytes));
  }

  // --- delivery ---

  void deliver(const Ev& ev) {
    packets::Packet p;
    try {
      p = packets::decode(*ev.bytes);
    } catch (const packets::DecodeError&) {
      metrics_.receipts["malformed"] += ev.recipients.size();
      return;
    }
    for (int j : ev.recipients) {
      if (j != ev.sender && cfg_.loss > 0 && rng_.unit() < cfg_.loss) {
        ++metrics_.losses;
        continue;
      }
      ++metrics_.deliveries;
      geo::Position at = pos_of(j, ev.due);
      if (!cfg_.aggregation) {
        if (const auto* w = std::get_if<packets::PacketW>(&p))
          baseline_receive(j, *w, *ev.bytes, ev.due);
        continue;
      }
      Vehicle& v = vehicles_[j];
      if (const auto* w = std::get_if<packets::PacketW>(&p)) {
        if (auto r = v.node->on_packet_w(*w, ev.due, at))
          broadcast(ev.due, j, wrap(packets::encode(packets::Packet{*r})), true);
      } else if (const auto* r = std::get_if<packets::PacketR>(&p)) {
        auto s = v.node->on_packet_r(*r, ev.due, at);
        if (s) {
          broadcast(ev.due, j, wrap(packets::encode(packets::Packet{*s})), true);
        } else if (v.behavior == Behavior::FalseTrustIncrease) {
          forge_support(j, *r, ev.due);
        }
      } else if (const auto* s = std::get_if<packets::PacketS>(&p)) {
        v.node->on_packet_s(*s, ev.due, at);
      } else if (const auto* a = std::get_if<packets::PacketA>(&p)) {
        receive_a(j, *a, ev.bytes, ev.due, at);
      }
    }
  }

  void receive_a(int j, const packets::PacketA& a, const Bytes& bytes, int64_t now,
                 const geo::Position& at) {
    Vehicle& v = vehicles_[j];
    protocol::AReceipt rec = v.node->on_packet_a(a, now, at, rng_);
    ++metrics_.receipts[protocol::receipt_name(rec)];

    switch (rec) {
      case protocol::AReceipt::DirectStored: ++metrics_.accepts_direct; break;
      case protocol::AReceipt::Reliable: ++metrics_.accepts_reliable; break;
      case protocol::AReceipt::CombinedStored: ++metrics_.accepts_combined; break;
      default: break;
    }

    std::string body(bytes->begin(), bytes->end());
    auto attack = attack_packets_.find(body);
    if (attack != attack_packets_.end()) {
      AttackStats& st = metrics_.attacks[attack->second];
      if (protocol::receipt_accepts(rec)) {
        ++st.succeeded;
        if (attack->second == Behavior::FalseInfo || attack->second == Behavior::Collusion ||
            attack->second == Behavior::ModifyAggregate)
          ++metrics_.false_reliable;
      } else if (rec == protocol::AReceipt::NotReliable ||
                 rec == protocol::AReceipt::DirectRejected ||
                 rec == protocol::AReceipt::CellInconsistent ||
                 rec == protocol::AReceipt::NotEnoughDropped) {
        ++st.detected;
      }
    }

    if (protocol::receipt_accepts(rec)) {
      protocol::EventKey key = protocol::event_key(a.report);
      auto forged = forged_support_.find(key);
      if (forged != forged_support_.end())
        for (const packets::SignerRecord& r : a.signers)
          if (forged->second.count(r.id.value))
            ++metrics_.attacks[Behavior::FalseTrustIncrease].succeeded;
      if (event_spawned_ && key == real_key_ && v.covered_at < 0) {
        v.covered_at = now;
        note_coverage(now);
      }
      trace_line(now, "store", v.kp.node.value, protocol::receipt_name(rec));
    }

    if (protocol::receipt_accepts(rec) || rec == protocol::AReceipt::NotEnoughRetained)
      relay(j, bytes, now);
  }

  // A freshly convinced node passes the warning on once; behaviors bend this.
  void relay(int j, const Bytes& bytes, int64_t now) {
    Vehicle& v = vehicles_[j];
    if (v.behavior == Behavior::DiscardAggregate) {
      ++metrics_.attacks[Behavior::DiscardAggregate].injected;
      return;
    }
    if (v.behavior == Behavior::ModifyAggregate) {
      tampered_relay(j, bytes, now);
      return;
    }
    broadcast(now, j, bytes, true);
  }

  void tampered_relay(int j, const Bytes& bytes, int64_t now) {
    packets::Packet p = packets::decode(*bytes);
    auto* a = std::get_if<packets::PacketA>(&p);
    if (!a) {
      broadcast(now, j, bytes, true);
      return;
    }
    a->report.pos.x_mm += 50'000;  // drag the claim 50 m down the road
    Bytes evil = wrap(packets::encode(p));
    std::string body(evil->begin(), evil->end());
    if (attack_packets_.emplace(body, Behavior::ModifyAggregate).second)
      ++metrics_.attacks[Behavior::ModifyAggregate].injected;
    broadcast(now, j, evil, false);
  }

  void forge_support(int j, const packets::PacketR& r, int64_t now) {
    Vehicle& v = vehicles_[j];
    protocol::EventKey key = protocol::event_key(r.report);
    auto& set = forged_support_[key];
    if (!set.insert(v.kp.node.value).second) return;
    ++metrics_.attacks[Behavior::FalseTrustIncrease].injected;
    // Claims the leader's own spot: always inside the right cell.
    packets::PacketS s = protocol::make_s(v.kp, r.report, r.leader_pos.to_position(), now,
                                          cfg_.protocol.algo);
    broadcast(now, j, wrap(packets::encode(packets::Packet{s})), false);
  }

  // --- baseline scheme ---

  void baseline_self_warn(int i, const protocol::ObservedEvent& obs, int64_t now) {
    Vehicle& v = vehicles_[i];
    packets::EventReport report = protocol::canonical_report(obs, cfg_.protocol);
    report.source = v.kp.node;
    packets::PacketW w = protocol::make_w(v.kp, report, cfg_.protocol.algo);
    std::vector<uint8_t> bytes = packets::encode(packets::Packet{w});
    std::string body(bytes.begin(), bytes.end());
    if (v.baseline_store.count(body)) return;
    int64_t expires = report.timestamp_ms +
                      protocol::storage_time_ms(cfg_.protocol, report.event_type,
                                                static_cast<geo::RoadClass>(report.road_class));
    if (now >= expires) return;
    v.baseline_store.emplace(std::move(body), expires);
    ++metrics_.baseline_accepts;
    if (event_spawned_ && v.covered_at < 0 && baseline_matches_event(report)) {
      v.covered_at = now;
      note_coverage(now);
    }
    broadcast(now, i, wrap(std::move(bytes)), false);
  }

  bool baseline_matches_event(const packets::EventReport& report) const {
    return report.timestamp_ms == event_onset_ms_ &&
           report.event_type == cfg_.event_type &&
           report.pos == packets::FixedPos::from_position(event_pos_);
  }

  void baseline_receive(int j, const packets::PacketW& w, const std::vector<uint8_t>& bytes,
                        int64_t now) {
    Vehicle& v = vehicles_[j];
    std::string body(bytes.begin(), bytes.end());
    if (v.baseline_store.count(body)) return;
    int64_t expires;
    try {
      expires = w.report.timestamp_ms +
                protocol::storage_time_ms(cfg_.protocol, w.report.event_type,
                                          static_cast<geo::RoadClass>(w.report.road_class));
    } catch (const std::domain_error&) {
      return;
    }
    if (now >= expires) return;
    ++metrics_.baseline_verifications;
    if (crypto::verify(dir_, protocol::w_payload(w.report, w.sender), {w.sender, w.sig},
                       w.algo) != crypto::VerifyStatus::Ok)
      return;
    v.baseline_store.emplace(body, expires);
    ++metrics_.baseline_accepts;
    if (event_spawned_ && v.covered_at < 0 && baseline_matches_event(w.report)) {
      v.covered_at = now;
      note_coverage(now);
    }
    trace_line(now, "store", v.kp.node.value, "baseline");
    Bytes shared = wrap(std::vector<uint8_t>(bytes));
    relay_baseline(j, shared, now);
  }

  void relay_baseline(int j, const Bytes& bytes, int64_t now) {
    if (vehicles_[j].behavior == Behavior::DiscardAggregate) {
      ++metrics_.attacks[Behavior::DiscardAggregate].injected;
      return;
    }
    broadcast(now, j, bytes, false);
  }

  // --- periodic machinery ---

  void check(int64_t now) {
    maybe_spawn_event(now);

    if (cfg_.aggregation) {
      for (int i = 0; i < cfg_.node_count; ++i) {
        Vehicle& v = vehicles_[i];
        for (packets::PacketA& a : v.node->on_tick(now, pos_of(i, now))) {
          ++metrics_.aggregates_emitted;
          metrics_.group_size_total += a.signers.size();
          if (v.behavior == Behavior::LeaderFalseSignature)
            emit_padded(i, a, now);
          else
            broadcast(now, i, wrap(packets::encode(packets::Packet{a})), true);
        }
      }
    }

    for (int i = 0; i < cfg_.node_count; ++i) {
      geo::Position at = pos_of(i, now);
      for (const protocol::ObservedEvent& obs :
           observe(vehicles_[i].kp.node, at, now)) {
        if (cfg_.aggregation) {
          if (auto w = vehicles_[i].node->on_observation(obs, now, at))
            broadcast(now, i, wrap(packets::encode(packets::Packet{*w})), true);
        } else {
          baseline_self_warn(i, obs, now);
        }
      }
    }

    if (!attack_fired_ && now >= cfg_.attack_start_ms && cfg_.aggregation) {
      attack_fired_ = true;
      fire_fabrications(now);
    }

    diff_sync(now);

    for (int i = 0; i < cfg_.node_count; ++i) {
      metrics_.expirations += vehicles_[i].node->expire(now);
      auto& bs = vehicles_[i].baseline_store;
      for (auto it = bs.begin(); it != bs.end();) {
        if (now >= it->second) {
          it = bs.erase(it);
          ++metrics_.expirations;
        } else {
          ++it;
        }
      }
    }

    note_reachability(now);

    int64_t next = now + cfg_.check_interval_ms;
    if (next <= cfg_.duration_ms) push(Ev{next, seq_++, Ev::Check, -1, {}, {}});
  }

  void maybe_spawn_event(int64_t now) {
    if (event_spawned_ || lead_ < 0) return;
    const Vehicle& lv = vehicles_[lead_];
    if (lv.speed_ms * (static_cast<double>(now) / 1000.0) < cfg_.event_trigger_distance_m)
      return;
    geo::Position lp = pos_of(lead_, now);
    protocol::ObservedEvent probe{lp, cfg_.event_type, cfg_.event_direction, now};
    geo::CellGrid grid =
        packets::grid_for(protocol::canonical_report(probe, cfg_.protocol));
    int nearby = 0;
    for (int i = 0; i < cfg_.node_count; ++i) {
      if (vehicles_[i].direction != cfg_.event_direction) continue;
      geo::Position p = pos_of(i, now);
      if (ring_dist(p, lp) > cfg_.protocol.zones.danger_m / 2) continue;
      if (geo::cell_of(grid, rebase(p, lp)) == geo::CellId{0, 0}) ++nearby;
    }
    if (nearby < cfg_.event_min_vehicles) return;

    event_spawned_ = true;
    event_pos_ = lp;
    event_onset_ms_ = now;
    metrics_.events_formed = 1;
    metrics_.event_onset_ms = now;
    protocol::ObservedEvent obs{event_pos_, cfg_.event_type, cfg_.event_direction, now};
    real_key_ = protocol::event_key(protocol::canonical_report(obs, cfg_.protocol));
    real_expiry_ms_ = now + protocol::storage_time_ms(
                                cfg_.protocol, cfg_.event_type,
                                cfg_.protocol.road.profile.road_class);
    trace_line(now, "spawn", lv.kp.node.value, std::to_string(nearby));
  }

  void emit_padded(int i, const packets::PacketA& a, int64_t now) {
    packets::PacketA evil = a;
    std::set<uint64_t> present;
    for (const packets::SignerRecord& r : a.signers) present.insert(r.id.value);
    uint64_t victim = 0;
    for (int j = 0; j < cfg_.node_count; ++j) {
      uint64_t id = vehicles_[j].kp.node.value;
      if (!present.count(id)) {
        victim = id;
        break;
      }
    }
    if (victim == 0) {  // nobody left to frame, send the honest thing
      broadcast(now, i, wrap(packets::encode(packets::Packet{a})), true);
      return;
    }
    packets::SignerRecord forged;
    forged.id = {victim};
    forged.pos = a.signers.front().pos;
    forged.sig.resize(crypto::digest_size(a.algo));
    for (auto& b : forged.sig) b = static_cast<uint8_t>(rng_.below(256));
    evil.signers.push_back(std::move(forged));
    Bytes bytes = wrap(packets::encode(packets::Packet{evil}));
    std::string body(bytes->begin(), bytes->end());
    if (attack_packets_.emplace(body, Behavior::LeaderFalseSignature).second)
      ++metrics_.attacks[Behavior::LeaderFalseSignature].injected;
    broadcast(now, i, bytes, false);
  }

  void fire_fabrications(int64_t now) {
    for (int i = 0; i < cfg_.node_count; ++i)
      if (vehicles_[i].behavior == Behavior::FalseInfo) craft_fabrication(now, {i});
    std::vector<int> colluders;
    for (int i = 0; i < cfg_.node_count; ++i)
      if (vehicles_[i].behavior == Behavior::Collusion) colluders.push_back(i);
    if (!colluders.empty()) craft_fabrication(now, colluders);
  }

  void craft_fabrication(int64_t now, const std::vector<int>& members) {
    Behavior behavior = members.size() == 1 ? Behavior::FalseInfo : Behavior::Collusion;
    int leader = members.front();
    geo::Position fake_pos = pos_of(leader, now);
    protocol::ObservedEvent fake{fake_pos, cfg_.event_type, vehicles_[leader].direction, now};
    packets::EventReport report = protocol::canonical_report(fake, cfg_.protocol);

    packets::PacketW w = protocol::make_w(vehicles_[leader].kp, report, cfg_.protocol.algo);
    broadcast(now, leader, wrap(packets::encode(packets::Packet{w})), false);

    packets::PacketA a;
    a.report = report;
    a.algo = cfg_.protocol.algo;
    for (std::size_t k = 0; k < members.size(); ++k) {
      geo::Position claimed{fake_pos.x + 2.0 * static_cast<double>(k), fake_pos.y, 0};
      a.signers.push_back(protocol::make_record(vehicles_[members[k]].kp, report,
                                                rebase(claimed, fake_pos), cfg_.protocol.algo));
    }
    a.leader = a.signers.front().id;
    Bytes bytes = wrap(packets::encode(packets::Packet{a}));
    std::string body(bytes->begin(), bytes->end());
    attack_packets_.emplace(body, behavior);
    int64_t expires = now + protocol::storage_time_ms(
                                cfg_.protocol, cfg_.event_type,
                                cfg_.protocol.road.profile.road_class);
    crafted_.push_back({bytes, leader, expires});
    ++metrics_.attacks[behavior].injected;
    broadcast(now, leader, bytes, false);
  }

  void diff_sync(int64_t now) {
    std::vector<geo::Position> at(cfg_.node_count);
    for (int i = 0; i < cfg_.node_count; ++i) at[i] = pos_of(i, now);
    for (int i = 0; i < cfg_.node_count; ++i) {
      Vehicle& vi = vehicles_[i];
      bool discard = vi.behavior == Behavior::DiscardAggregate;
      for (int j = 0; j < cfg_.node_count; ++j) {
        if (i == j || ring_dist(at[i], at[j]) > cfg_.tx_range_m) continue;
        if (cfg_.aggregation) {
          for (const auto& [key, sw] : vi.node->store()) {
            if (vehicles_[j].node->store().count(key)) continue;
            if (discard) {
              ++metrics_.attacks[Behavior::DiscardAggregate].injected;
              continue;
            }
            if (vi.behavior == Behavior::ModifyAggregate)
              tampered_relay(i, wrap(std::vector<uint8_t>(sw.bytes)), now);
            else
              unicast(now, i, j, wrap(std::vector<uint8_t>(sw.bytes)));
          }
        } else {
          for (const auto& [body, expires] : vi.baseline_store) {
            (void)expires;
            if (vehicles_[j].baseline_store.count(body)) continue;
            if (discard) {
              ++metrics_.attacks[Behavior::DiscardAggregate].injected;
              continue;
            }
            unicast(now, i, j, wrap(std::vector<uint8_t>(body.begin(), body.end())));
          }
        }
      }
    }
  }

  void retransmit(int64_t now) {
    for (int i = 0; i < cfg_.node_count; ++i) {
      Vehicle& v = vehicles_[i];
      if (cfg_.aggregation) {
        for (const auto& [key, sw] : v.node->store()) {
          (void)key;
          if (v.behavior == Behavior::DiscardAggregate) {
            ++metrics_.attacks[Behavior::DiscardAggregate].injected;
            continue;
          }
          if (v.behavior == Behavior::ModifyAggregate)
            tampered_relay(i, wrap(std::vector<uint8_t>(sw.bytes)), now);
          else
            broadcast(now, i, wrap(std::vector<uint8_t>(sw.bytes)), false);
        }
      } else {
        for (const auto& [body, expires] : v.baseline_store) {
          (void)expires;
          if (v.behavior == Behavior::DiscardAggregate) {
            ++metrics_.attacks[Behavior::DiscardAggregate].injected;
            continue;
          }
          broadcast(now, i, wrap(std::vector<uint8_t>(body.begin(), body.end())), false);
        }
      }
    }
    for (const CraftedAttack& c : crafted_)
      if (now < c.expires_ms) broadcast(now, c.sender, c.bytes, false);

    int64_t next = now + cfg_.retransmit_interval_ms;
    if (next <= cfg_.duration_ms) push(Ev{next, seq_++, Ev::Retransmit, -1, {}, {}});
  }

  bool holds_warning(int i) const {
    if (cfg_.aggregation) return vehicles_[i].node->store().count(real_key_) > 0;
    for (const auto& [body, expires] : vehicles_[i].baseline_store) {
      (void)expires;
      try {
        auto p = packets::decode(
            std::vector<uint8_t>(body.begin(), body.end()));
        if (const auto* w = std::get_if<packets::PacketW>(&p))
          if (baseline_matches_event(w->report)) return true;
      } catch (const packets::DecodeError&) {
      }
    }
    return false;
  }

  void note_reachability(int64_t now) {
    if (!event_spawned_) return;
    std::vector<int> holders;
    for (int i = 0; i < cfg_.node_count; ++i)
      if (vehicles_[i].behavior != Behavior::DiscardAggregate && holds_warning(i))
        holders.push_back(i);
    if (holders.empty()) return;
    for (int u = 0; u < cfg_.node_count; ++u) {
      if (vehicles_[u].reachable_at >= 0) continue;
      geo::Position pu = pos_of(u, now);
      for (int h : holders) {
        if (h == u) {
          vehicles_[u].reachable_at = now;
          break;
        }
        if (ring_dist(pu, pos_of(h, now)) <= cfg_.tx_range_m) {
          vehicles_[u].reachable_at = now;
          break;
        }
      }
    }
  }

  void note_coverage(int64_t now) {
    int n = 0;
    for (const Vehicle& v : vehicles_)
      if (v.covered_at >= 0) ++n;
    metrics_.coverage_timeline.emplace_back(now, n);
  }

  void finalize() {
    for (const Vehicle& v : vehicles_) {
      metrics_.marks += v.node->counters().marks;
      metrics_.prob_verifications += v.node->counters().prob_verifications;
      metrics_.signatures_checked += v.node->counters().signatures_checked;
    }
    if (metrics_.prob_verifications > 0)
      metrics_.mean_checked = static_cast<double>(metrics_.signatures_checked) /
                              static_cast<double>(metrics_.prob_verifications);
    if (metrics_.aggregates_emitted > 0)
      metrics_.mean_group_size = static_cast<double>(metrics_.group_size_total) /
                                 static_cast<double>(metrics_.aggregates_emitted);

    if (event_spawned_) {
      int64_t margin = cfg_.check_interval_ms;
      int64_t last = -1;
      for (const Vehicle& v : vehicles_) {
        if (v.covered_at >= 0) ++metrics_.covered;
        bool eligible = v.reachable_at >= 0 && v.reachable_at + margin <= real_expiry_ms_;
        if (!eligible) continue;
        ++metrics_.eligible;
        if (v.covered_at < 0)
          metrics_.all_reachable_covered = false;
        else
          last = std::max(last, v.covered_at);
      }
      metrics_.full_coverage_ms = metrics_.all_reachable_covered ? last : -1;
    }
  }

  SimConfig cfg_;
  Rng rng_;
  crypto::Directory dir_;
  protocol::Env env_;
  std::vector<Vehicle> vehicles_;
  int lead_ = -1;

  std::priority_queue<Ev, std::vector<Ev>, EvAfter> queue_;
  uint64_t seq_ = 0;

  bool event_spawned_ = false;
  geo::Position event_pos_{};
  int64_t event_onset_ms_ = -1;
  int64_t real_expiry_ms_ = -1;
  protocol::EventKey real_key_;

  bool attack_fired_ = false;
  std::unordered_map<std::string, Behavior> attack_packets_;
  std::map<protocol::EventKey, std::set<uint64_t>> forged_support_;
  std::vector<CraftedAttack> crafted_;

  Metrics metrics_;
  std::string trace_;
};

}  // namespace

RunResult run(const SimConfig& cfg) {
  validate(cfg);
  World world(cfg);
  return world.go();
}

}  // namespace vanet::sim
