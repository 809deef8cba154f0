#include "vanet/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vanet::protocol {

namespace {

void put_be64(std::vector<uint8_t>& out, uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<uint8_t>((v >> shift) & 0xff));
}

std::vector<uint8_t> aggregate_payload(const packets::EventReport& report) {
  return packets::encode_report(report);
}

// Fields a grid or zone computation would choke on.
bool report_sane(const packets::EventReport& r) {
  return packets::zone_radii(r).valid() && r.direction <= 1 && r.lanes >= 1 &&
         r.speed_limit_kmh > 0;
}

}  // namespace

std::size_t ProtocolConfig::effective_max_signers() const {
  if (max_signers > 0) return max_signers;
  int practical = packets::max_signers_practical(budget, algo);
  return practical < 1 ? 1 : static_cast<std::size_t>(practical);
}

int64_t storage_time_ms(const ProtocolConfig& cfg, uint8_t event_type, geo::RoadClass rc) {
  auto it = cfg.event_basic_time_ms.find(event_type);
  if (it == cfg.event_basic_time_ms.end())
    throw std::domain_error("no storage time defined for event type " +
                            std::to_string(static_cast<int>(event_type)));
  double factor =
      rc == geo::RoadClass::Conventional ? cfg.conventional_factor : cfg.highway_factor;
  return static_cast<int64_t>(std::llround(static_cast<double>(it->second) * factor));
}

packets::EventReport canonical_report(const ObservedEvent& obs, const ProtocolConfig& cfg) {
  packets::EventReport r;
  r.pos = packets::FixedPos::from_position(obs.pos);
  r.event_type = obs.event_type;
  r.direction = obs.direction;
  r.road_id = cfg.road.road_id;
  r.road_class = static_cast<uint8_t>(cfg.road.profile.road_class);
  r.speed_limit_kmh = static_cast<uint16_t>(cfg.road.profile.speed_limit_kmh);
  r.lanes = static_cast<uint8_t>(cfg.road.profile.lanes);
  r.timestamp_ms = obs.observed_at_ms;
  r.source = {0};  // canonical form carries no originator
  r.danger_radius_m = static_cast<uint32_t>(cfg.zones.danger_m);
  r.uncertainty_radius_m = static_cast<uint32_t>(cfg.zones.uncertainty_m);
  r.security_radius_m = static_cast<uint32_t>(cfg.zones.security_m);
  return r;
}

EventKey event_key(const packets::EventReport& report) {
  auto bytes = packets::encode_report(report);
  return EventKey(bytes.begin(), bytes.end());
}

bool matches_observation(const ObservedEvent& obs, const packets::EventReport& report,
                         const Env& env) {
  if (obs.event_type != report.event_type) return false;
  if (obs.direction != report.direction) return false;
  if (std::llabs(obs.observed_at_ms - report.timestamp_ms) > env.cfg.agreement_window_ms)
    return false;
  return env.metric(obs.pos, report.pos.to_position()) <= env.cfg.position_tolerance_m;
}

std::vector<uint8_t> w_payload(const packets::EventReport& report, crypto::NodeId sender) {
  auto out = packets::encode_report(report);
  put_be64(out, sender.value);
  return out;
}

std::vector<uint8_t> r_payload(const packets::PacketR& r) {
  auto out = packets::encode_report(r.report);
  put_be64(out, r.leader.value);
  put_be64(out, static_cast<uint64_t>(r.leader_pos.x_mm));
  put_be64(out, static_cast<uint64_t>(r.leader_pos.y_mm));
  put_be64(out, static_cast<uint64_t>(r.leader_pos.z_mm));
  put_be64(out, static_cast<uint64_t>(r.request_timestamp_ms));
  return out;
}

packets::PacketW make_w(const crypto::KeyPair& kp, const packets::EventReport& report,
                        crypto::DigestAlgo algo) {
  return {report, kp.node, algo, crypto::sign(kp, w_payload(report, kp.node), algo).bytes};
}

packets::PacketR make_r(const crypto::KeyPair& kp, const packets::EventReport& report,
                        const geo::Position& pos, int64_t request_ts_ms,
                        crypto::DigestAlgo algo) {
  packets::PacketR r{report, kp.node, packets::FixedPos::from_position(pos), request_ts_ms,
                     algo, {}};
  r.sig = crypto::sign(kp, r_payload(r), algo).bytes;
  return r;
}

packets::PacketS make_s(const crypto::KeyPair& kp, const packets::EventReport& report,
                        const geo::Position& pos, int64_t ts_ms, crypto::DigestAlgo algo) {
  return {report,  kp.node, packets::FixedPos::from_position(pos), ts_ms, algo,
          crypto::sign(kp, aggregate_payload(report), algo).bytes};
}

packets::SignerRecord make_record(const crypto::KeyPair& kp, const packets::EventReport& report,
                                  const geo::Position& pos, crypto::DigestAlgo algo) {
  return {kp.node, packets::SignerPos::from_position(pos),
          crypto::sign(kp, aggregate_payload(report), algo).bytes};
}

bool outranks(const Candidate& a, const Candidate& b, const geo::CellGrid& grid,
              const geo::CellId& cell) {
  if (a.request_ts_ms != b.request_ts_ms) return a.request_ts_ms < b.request_ts_ms;
  geo::Position center = geo::cell_center(grid, cell);
  double da = geo::planar_distance(a.pos, center);
  double db = geo::planar_distance(b.pos, center);
  if (da != db) return da < db;
  return a.id.value < b.id.value;
}

const char* receipt_name(AReceipt r) {
  switch (r) {
    case AReceipt::DirectStored: return "direct_stored";
    case AReceipt::Reliable: return "reliable";
    case AReceipt::CombinedStored: return "combined_stored";
    case AReceipt::NotEnoughRetained: return "not_enough_retained";
    case AReceipt::Duplicate: return "duplicate";
    case AReceipt::OutOfScope: return "out_of_scope";
    case AReceipt::Expired: return "expired";
    case AReceipt::DirectRejected: return "direct_rejected";
    case AReceipt::NotReliable: return "not_reliable";
    case AReceipt::NotEnoughDropped: return "not_enough_dropped";
    case AReceipt::CellInconsistent: return "cell_inconsistent";
    case AReceipt::Malformed: return "malformed";
    case AReceipt::FromMarked: return "from_marked";
  }
  return "unknown";
}

bool receipt_accepts(AReceipt r) {
  return r == AReceipt::DirectStored || r == AReceipt::Reliable ||
         r == AReceipt::CombinedStored;
}

Node::Node(const crypto::KeyPair& kp, uint8_t direction, const Env* env)
    : kp_(kp), direction_(direction), env_(env) {}

std::optional<ObservedEvent> Node::matching_observation(const packets::EventReport& report,
                                                        int64_t now_ms,
                                                        const geo::Position& self) {
  for (const ObservedEvent& obs : env_->sensor->observe(kp_.node, self, now_ms))
    if (matches_observation(obs, report, *env_)) return obs;
  return std::nullopt;
}

bool Node::witness_eligible(const packets::EventReport& report, const geo::Position& self) const {
  if (report.direction != direction_) return false;
  return env_->metric(self, report.pos.to_position()) <=
         static_cast<double>(report.danger_radius_m);
}

std::optional<packets::PacketW> Node::on_observation(const ObservedEvent& obs, int64_t now_ms,
                                                     const geo::Position& self) {
  if (obs.direction != direction_) return std::nullopt;
  packets::EventReport report = canonical_report(obs, env_->cfg);
  EventKey key = event_key(report);
  if (store_.count(key)) return std::nullopt;
  if (groups_.count(key)) return std::nullopt;

  PendingGroup g;
  g.report = report;
  g.report_bytes = packets::encode_report(report);
  g.grid = packets::grid_for(report);
  g.created_ms = now_ms;
  g.deadline_ms = now_ms + env_->cfg.group_window_ms;
  g.witness = true;
  g.my_request_ts_ms = now_ms;
  g.w_sent = true;
  groups_.emplace(std::move(key), std::move(g));

  ++counters_.w_sent;
  (void)self;
  return make_w(kp_, report, env_->cfg.algo);
}

std::optional<packets::PacketR> Node::on_packet_w(const packets::PacketW& w, int64_t now_ms,
                                                  const geo::Position& self) {
  if (marked_.count(w.sender.value)) return std::nullopt;
  auto status = crypto::verify(*env_->directory, w_payload(w.report, w.sender),
                               {w.sender, w.sig}, w.algo);
  if (status != crypto::VerifyStatus::Ok) return std::nullopt;
  if (!report_sane(w.report)) return std::nullopt;

  // Only vehicles that can see for themselves take part or pass judgment.
  if (w.report.direction != direction_) return std::nullopt;
  if (env_->metric(self, w.report.pos.to_position()) >
      static_cast<double>(w.report.danger_radius_m))
    return std::nullopt;

  if (!matching_observation(w.report, now_ms, self)) {
    // A co-located vehicle saw no such event: the signed claim is false.
    if (marked_.insert(w.sender.value).second) ++counters_.marks;
    return std::nullopt;
  }

  EventKey key = event_key(w.report);
  auto it = groups_.find(key);
  if (it == groups_.end()) {
    PendingGroup g;
    g.report = w.report;
    g.report_bytes = packets::encode_report(w.report);
    g.grid = packets::grid_for(w.report);
    g.created_ms = now_ms;
    g.deadline_ms = now_ms + env_->cfg.group_window_ms;
    g.witness = true;
    g.my_request_ts_ms = now_ms;
    it = groups_.emplace(std::move(key), std::move(g)).first;
  }
  PendingGroup& g = it->second;
  if (g.state == PendingGroup::State::Closed || g.r_sent) return std::nullopt;

  g.r_sent = true;
  g.my_nomination_pos = env_->rebase(self, g.report.pos.to_position());
  g.my_cell = geo::cell_of(g.grid, g.my_nomination_pos);
  ++counters_.r_sent;
  return make_r(kp_, g.report, g.my_nomination_pos, g.my_request_ts_ms, env_->cfg.algo);
}

std::optional<packets::PacketS> Node::on_packet_r(const packets::PacketR& r, int64_t now_ms,
                                                  const geo::Position& self) {
  if (marked_.count(r.leader.value)) return std::nullopt;
  auto it = groups_.find(event_key(r.report));
  if (it == groups_.end()) return std::nullopt;
  PendingGroup& g = it->second;
  if (!g.witness || g.state == PendingGroup::State::Closed || !g.r_sent) return std::nullopt;

  if (crypto::verify(*env_->directory, r_payload(r), {r.leader, r.sig}, r.algo) !=
      crypto::VerifyStatus::Ok)
    return std::nullopt;

  geo::Position pos = r.leader_pos.to_position();
  // Candidates must stand inside the danger zone and in this node's cell.
  if (geo::planar_distance(pos, g.report.pos.to_position()) >
      static_cast<double>(g.report.danger_radius_m))
    return std::nullopt;
  if (geo::cell_of(g.grid, pos) != g.my_cell) return std::nullopt;

  Candidate c{r.leader, pos, r.request_timestamp_ms};
  if (!g.best || outranks(c, *g.best, g.grid, g.my_cell)) g.best = c;

  if (g.s_sent) return std::nullopt;
  g.s_sent = true;
  ++counters_.s_sent;
  return make_s(kp_, g.report, env_->rebase(self, g.report.pos.to_position()), now_ms,
                env_->cfg.algo);
}

void Node::on_packet_s(const packets::PacketS& s, int64_t now_ms, const geo::Position& self) {
  (void)now_ms;
  (void)self;
  if (marked_.count(s.member.value)) return;
  if (s.algo != env_->cfg.algo) return;  // records must fit the group digest
  auto it = groups_.find(event_key(s.report));
  if (it == groups_.end()) return;
  PendingGroup& g = it->second;
  if (!g.witness || !g.r_sent || g.state == PendingGroup::State::Closed) return;

  if (crypto::verify(*env_->directory, aggregate_payload(s.report), {s.member, s.sig},
                     s.algo) != crypto::VerifyStatus::Ok)
    return;

  geo::Position pos = s.member_pos.to_position();
  if (geo::cell_of(g.grid, pos) != g.my_cell) return;
  packets::SignerRecord rec{s.member, {}, s.sig};
  try {
    rec.pos = packets::SignerPos::from_position(pos);
  } catch (const std::domain_error&) {
    return;
  }
  g.collected.emplace(s.member.value, std::move(rec));
}

std::vector<packets::PacketA> Node::on_tick(int64_t now_ms, const geo::Position& self) {
  (void)self;
  std::vector<packets::PacketA> out;
  for (auto it = groups_.begin(); it != groups_.end();) {
    PendingGroup& g = it->second;
    if (g.state == PendingGroup::State::Open && now_ms >= g.deadline_ms) {
      g.state = PendingGroup::State::Closed;
      g.holdoff_until_ms = now_ms + env_->cfg.regroup_holdoff_ms;
      if (g.witness && g.r_sent && g.best && g.best->id == kp_.node) {
        ++counters_.groups_won;
        g.collected.emplace(
            kp_.node.value,
            make_record(kp_, g.report, g.my_nomination_pos, env_->cfg.algo));
        if (g.collected.size() < env_->cfg.policy.min_signatures) {
          ++counters_.groups_thin;
        } else if (store_.count(it->first)) {
          ++counters_.groups_suppressed;
        } else {
          packets::PacketA a;
          a.report = g.report;
          a.leader = kp_.node;
          a.algo = env_->cfg.algo;
          a.signers.push_back(g.collected.at(kp_.node.value));
          std::size_t cap = env_->cfg.effective_max_signers();
          for (const auto& [id, rec] : g.collected) {
            if (a.signers.size() >= cap) break;
            if (id == kp_.node.value) continue;
            a.signers.push_back(rec);
          }
          ++counters_.a_emitted;
          out.push_back(std::move(a));
        }
      } else if (g.witness && g.r_sent) {
        ++counters_.groups_lost;
      }
    }
    if (g.state == PendingGroup::State::Closed && now_ms >= g.holdoff_until_ms)
      it = groups_.erase(it);
    else
      ++it;
  }
  return out;
}

AReceipt Node::accept(const packets::PacketA& a, const EventKey& key, int64_t now_ms,
                      AReceipt how) {
  int64_t expires = a.report.timestamp_ms +
                    storage_time_ms(env_->cfg, a.report.event_type,
                                    static_cast<geo::RoadClass>(a.report.road_class));
  store_[key] = StoredWarning{a, packets::encode(packets::Packet{a}), now_ms, expires, how};
  evidence_.erase(key);
  return how;
}

AReceipt Node::on_packet_a(const packets::PacketA& a, int64_t now_ms, const geo::Position& self,
                           Rng& rng) {
  if (a.signers.empty() || a.leader != a.signers.front().id) return AReceipt::Malformed;
  std::size_t ds = crypto::digest_size(a.algo);
  std::set<uint64_t> seen_ids;
  for (const packets::SignerRecord& rec : a.signers) {
    if (rec.sig.size() != ds) return AReceipt::Malformed;
    if (!seen_ids.insert(rec.id.value).second) return AReceipt::Malformed;
  }
  if (!report_sane(a.report)) return AReceipt::Malformed;
  geo::ZoneRadii radii = packets::zone_radii(a.report);
  int64_t expires;
  try {
    expires = a.report.timestamp_ms +
              storage_time_ms(env_->cfg, a.report.event_type,
                              static_cast<geo::RoadClass>(a.report.road_class));
  } catch (const std::domain_error&) {
    return AReceipt::Malformed;
  }

  if (marked_.count(a.leader.value)) return AReceipt::FromMarked;

  std::vector<uint8_t> bytes = packets::encode(packets::Packet{a});
  std::string body(bytes.begin(), bytes.end());
  if (poisoned_.count(body)) return AReceipt::Duplicate;

  double dist = env_->metric(self, a.report.pos.to_position());
  geo::Zone zone = geo::classify_zone(dist, radii);
  if (zone == geo::Zone::OutOfScope) return AReceipt::OutOfScope;
  if (now_ms >= expires) return AReceipt::Expired;

  EventKey key = event_key(a.report);
  if (store_.count(key)) return AReceipt::Duplicate;

  if (zone == geo::Zone::Danger && a.report.direction == direction_) {
    bool matches = matching_observation(a.report, now_ms, self).has_value();
    return judge_direct(a, key, now_ms, self, matches);
  }

  if (zone == geo::Zone::Danger || zone == geo::Zone::Uncertainty) {
    // Danger-zone vehicles on the other carriageway cannot see for
    // themselves, so they fall back to sampled verification too.
    verify::Outcome out = verify::verify_aggregate(*env_->directory, a, env_->cfg.policy, rng);
    ++counters_.prob_verifications;
    counters_.signatures_checked += out.checked;
    switch (out.verdict) {
      case verify::Verdict::NotEnoughSignatures:
        return AReceipt::NotEnoughDropped;
      case verify::Verdict::NotReliable:
        poisoned_.insert(std::move(body));
        return AReceipt::NotReliable;
      case verify::Verdict::Reliable:
        return accept(a, key, now_ms, AReceipt::Reliable);
    }
    return AReceipt::Malformed;
  }

  // Security zone: there is time to check everything and to wait for a
  // second group before trusting the warning.
  verify::Outcome out = verify::verify_every_signature(*env_->directory, a, env_->cfg.policy);
  if (out.verdict == verify::Verdict::NotEnoughSignatures) return AReceipt::NotEnoughDropped;
  if (out.verdict == verify::Verdict::NotReliable) {
    poisoned_.insert(std::move(body));
    return AReceipt::NotReliable;
  }
  auto cell = verify::common_cell(packets::grid_for(a.report), a);
  if (!cell) {
    poisoned_.insert(std::move(body));
    return AReceipt::CellInconsistent;
  }
  auto& cells = evidence_[key];
  if (!cells.count(*cell)) cells.emplace(*cell, a);
  if (cells.size() >= 2) return accept(a, key, now_ms, AReceipt::CombinedStored);
  return AReceipt::NotEnoughRetained;
}

AReceipt Node::judge_direct(const packets::PacketA& a, const EventKey& key, int64_t now_ms,
                            const geo::Position& self, bool matches) {
  (void)self;
  auto leader_sig = crypto::verify(*env_->directory, aggregate_payload(a.report),
                                   {a.leader, a.signers.front().sig}, a.algo);
  std::vector<uint8_t> bytes = packets::encode(packets::Packet{a});
  std::string body(bytes.begin(), bytes.end());
  if (leader_sig != crypto::VerifyStatus::Ok) {
    // Unattributable: the content may have been swapped under a real header.
    poisoned_.insert(std::move(body));
    return AReceipt::NotReliable;
  }
  if (matches) return accept(a, key, now_ms, AReceipt::DirectStored);
  if (marked_.insert(a.leader.value).second) ++counters_.marks;
  poisoned_.insert(std::move(body));
  return AReceipt::DirectRejected;
}

std::size_t Node::expire(int64_t now_ms) {
  std::size_t erased = 0;
  for (auto it = store_.begin(); it != store_.end();) {
    if (now_ms >= it->second.expires_at_ms) {
      it = store_.erase(it);
      ++erased;
    } else {
      ++it;
    }
  }
  for (auto it = evidence_.begin(); it != evidence_.end();) {
    const packets::EventReport& r = it->second.begin()->second.report;
    int64_t expires = r.timestamp_ms + storage_time_ms(env_->cfg, r.event_type,
                                                       static_cast<geo::RoadClass>(r.road_class));
    if (now_ms >= expires) {
      erased += it->second.size();
      it = evidence_.erase(it);
    } else {
      ++it;
    }
  }
  counters_.store_expired += erased;
  return erased;
}

}  // namespace vanet::protocol
