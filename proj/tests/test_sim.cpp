#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "vanet/sim.hpp"

using namespace vanet;
using sim::Behavior;
using sim::SimConfig;

namespace {

SimConfig small() {
  SimConfig cfg;
  cfg.seed = 7;
  cfg.node_count = 20;
  cfg.duration_ms = 300'000;
  return cfg;
}

uint64_t receipt(const sim::Metrics& m, const char* name) {
  auto it = m.receipts.find(name);
  return it == m.receipts.end() ? 0 : it->second;
}

}  // namespace

TEST_CASE("config validation names the offending field") {
  SimConfig cfg;

  cfg.node_count = 0;
  CHECK_THROWS_WITH_AS(sim::validate(cfg), "node_count must be in [1, 10000]",
                       std::invalid_argument);
  cfg = SimConfig{};

  cfg.tx_range_m = 301;
  CHECK_THROWS_AS(sim::validate(cfg), std::invalid_argument);
  cfg = SimConfig{};

  cfg.loss = 1.0;
  CHECK_THROWS_AS(sim::validate(cfg), std::invalid_argument);
  cfg = SimConfig{};

  cfg.protocol.zones.danger_m = 600;  // half the default strip
  CHECK_THROWS_AS(sim::validate(cfg), std::invalid_argument);
  cfg = SimConfig{};

  cfg.event_type = packets::kAccident;  // no storage time configured
  CHECK_THROWS_AS(sim::validate(cfg), std::invalid_argument);
  cfg = SimConfig{};

  cfg.behaviors[99] = Behavior::FalseInfo;  // only 20 nodes exist
  CHECK_THROWS_AS(sim::validate(cfg), std::invalid_argument);
  cfg = SimConfig{};

  CHECK_NOTHROW(sim::validate(cfg));
}

TEST_CASE("behavior names round trip") {
  for (Behavior b : {Behavior::Honest, Behavior::FalseInfo, Behavior::ModifyAggregate,
                     Behavior::DiscardAggregate, Behavior::FalseTrustIncrease,
                     Behavior::LeaderFalseSignature, Behavior::Collusion})
    CHECK(sim::parse_behavior(sim::behavior_name(b)) == b);
  CHECK_FALSE(sim::parse_behavior("parked").has_value());
}

TEST_CASE("identical seeds replay byte for byte") {
  SimConfig cfg = small();
  sim::RunResult a = sim::run(cfg);
  sim::RunResult b = sim::run(cfg);
  CHECK(a.trace == b.trace);
  CHECK(a.metrics.total_sends == b.metrics.total_sends);
  CHECK(a.metrics.total_bytes == b.metrics.total_bytes);
  CHECK(a.metrics.deliveries == b.metrics.deliveries);
  CHECK(a.metrics.receipts == b.metrics.receipts);
  CHECK(a.metrics.signatures_checked == b.metrics.signatures_checked);

  SimConfig other = cfg;
  other.seed = 8;
  sim::RunResult c = sim::run(other);
  CHECK(a.trace != c.trace);
}

TEST_CASE("an honest strip forms one group and convinces everyone") {
  SimConfig cfg;
  cfg.seed = 3;
  sim::RunResult r = sim::run(cfg);
  const sim::Metrics& m = r.metrics;

  REQUIRE(m.events_formed == 1);
  CHECK(m.event_onset_ms > 0);
  CHECK(m.aggregates_emitted >= 1);
  CHECK(m.mean_group_size >= 3.0);
  CHECK(m.mean_group_size <= 10.0);  // 512-byte budget, 20-byte records

  CHECK(m.accepts_direct >= 1);    // witnesses confirm with their own eyes
  CHECK(m.accepts_reliable >= 1);  // everyone else samples signatures
  CHECK(m.prob_verifications >= 1);
  CHECK(m.mean_checked > 0.0);
  CHECK(m.mean_checked <= 10.5);

  CHECK(receipt(m, "not_reliable") == 0);
  CHECK(receipt(m, "direct_rejected") == 0);
  CHECK(receipt(m, "cell_inconsistent") == 0);
  CHECK(receipt(m, "malformed") == 0);
  CHECK(m.false_reliable == 0);
  CHECK(m.marks == 0);

  CHECK(m.covered >= m.eligible);
  CHECK(m.eligible >= 10);  // a 1000 m ring with 100 m radio reaches everyone
  CHECK(m.all_reachable_covered);
  CHECK(m.full_coverage_ms > m.event_onset_ms);
  CHECK(m.full_coverage_ms < m.event_onset_ms + 600'000);

  // warnings die with their storage time
  CHECK(m.expirations >= 1);
}

TEST_CASE("coverage only ever grows") {
  SimConfig cfg;
  cfg.seed = 5;
  cfg.record_trace = false;
  sim::RunResult r = sim::run(cfg);
  REQUIRE(r.metrics.events_formed == 1);
  REQUIRE_FALSE(r.metrics.coverage_timeline.empty());
  for (std::size_t i = 1; i < r.metrics.coverage_timeline.size(); ++i) {
    CHECK(r.metrics.coverage_timeline[i - 1].first <= r.metrics.coverage_timeline[i].first);
    CHECK(r.metrics.coverage_timeline[i - 1].second < r.metrics.coverage_timeline[i].second);
  }
  CHECK(r.metrics.coverage_timeline.back().second == r.metrics.covered);
  CHECK(r.trace.empty());
}

TEST_CASE("aggregation spends far less airtime than per-source warnings") {
  SimConfig agg;
  agg.seed = 11;
  agg.record_trace = false;
  sim::RunResult with = sim::run(agg);

  SimConfig flat = agg;
  flat.aggregation = false;
  sim::RunResult without = sim::run(flat);

  REQUIRE(with.metrics.events_formed == 1);
  REQUIRE(without.metrics.events_formed == 1);
  CHECK(without.metrics.baseline_accepts > 0);
  CHECK(without.metrics.all_reachable_covered);

  CHECK(with.metrics.total_sends < without.metrics.total_sends);
  CHECK(with.metrics.total_bytes < without.metrics.total_bytes);
  // sampling also checks fewer signatures than verify-everything flooding
  CHECK(with.metrics.signatures_checked < without.metrics.baseline_verifications);
}

TEST_CASE("a lone fabricator changes no store and gets marked") {
  SimConfig cfg;
  cfg.seed = 13;
  cfg.record_trace = false;
  cfg.behaviors[2] = Behavior::FalseInfo;  // id 2 drives the other direction
  sim::RunResult r = sim::run(cfg);
  const sim::Metrics& m = r.metrics;

  const sim::AttackStats& st = m.attacks.at(Behavior::FalseInfo);
  CHECK(st.injected >= 1);
  CHECK(st.succeeded == 0);
  CHECK(st.detected >= 1);
  CHECK(m.false_reliable == 0);
  // a single signature can never reach the verification floor
  CHECK(receipt(m, "not_enough_dropped") >= 1);
  CHECK(m.marks >= 1);

  // the real event still spreads
  REQUIRE(m.events_formed == 1);
  CHECK(m.all_reachable_covered);
}

TEST_CASE("enough colluders defeat sampling but not local witnesses") {
  SimConfig cfg;
  cfg.seed = 17;
  cfg.record_trace = false;
  cfg.behaviors[2] = Behavior::Collusion;
  cfg.behaviors[4] = Behavior::Collusion;
  cfg.behaviors[6] = Behavior::Collusion;
  sim::RunResult r = sim::run(cfg);
  const sim::Metrics& m = r.metrics;

  const sim::AttackStats& st = m.attacks.at(Behavior::Collusion);
  CHECK(st.injected >= 1);
  CHECK(st.succeeded >= 1);  // three valid signatures pass any sample
  CHECK(m.false_reliable >= 1);
  CHECK(st.detected >= 1);  // witnesses at the claimed spot still refute it
  CHECK(m.marks >= 1);
}

TEST_CASE("tampered relays convince nobody") {
  SimConfig cfg;
  cfg.seed = 19;
  cfg.record_trace = false;
  cfg.behaviors[3] = Behavior::ModifyAggregate;  // id 3 shares the event direction
  sim::RunResult r = sim::run(cfg);
  const sim::Metrics& m = r.metrics;

  REQUIRE(m.events_formed == 1);
  const sim::AttackStats& st = m.attacks.at(Behavior::ModifyAggregate);
  CHECK(st.injected >= 1);
  CHECK(st.succeeded == 0);
  CHECK(st.detected >= 1);
  CHECK(m.false_reliable == 0);
  // altering the report breaks every signature, so nobody can be framed
  CHECK(m.marks == 0);
  CHECK(m.all_reachable_covered);
}

TEST_CASE("silent carriers only slow the spread") {
  SimConfig cfg;
  cfg.seed = 23;
  cfg.record_trace = false;
  for (uint64_t id : {4ULL, 8ULL, 12ULL, 16ULL, 20ULL})
    cfg.behaviors[id] = Behavior::DiscardAggregate;
  sim::RunResult r = sim::run(cfg);
  const sim::Metrics& m = r.metrics;

  REQUIRE(m.events_formed == 1);
  CHECK(m.attacks.at(Behavior::DiscardAggregate).injected >= 1);
  CHECK(m.covered >= 10);
  CHECK(m.all_reachable_covered);
}

TEST_CASE("an insider can vouch for a group it never saw") {
  SimConfig cfg;
  cfg.seed = 2;
  cfg.record_trace = false;
  cfg.behaviors[2] = Behavior::FalseTrustIncrease;
  sim::RunResult r = sim::run(cfg);
  const sim::Metrics& m = r.metrics;

  REQUIRE(m.events_formed == 1);
  const sim::AttackStats& st = m.attacks.at(Behavior::FalseTrustIncrease);
  CHECK(st.injected >= 1);
  // the forged support is indistinguishable from a real one, so it rides along
  CHECK(st.succeeded >= 1);
  CHECK(m.false_reliable == 0);  // the warning itself is true
}

TEST_CASE("a padded signer list is caught by sampling, not by witnesses") {
  SimConfig cfg;
  cfg.seed = 31;
  cfg.record_trace = false;
  for (uint64_t id = 1; id <= 19; id += 2)  // every vehicle on the event side
    cfg.behaviors[id] = Behavior::LeaderFalseSignature;
  sim::RunResult r = sim::run(cfg);
  const sim::Metrics& m = r.metrics;

  REQUIRE(m.events_formed == 1);
  const sim::AttackStats& st = m.attacks.at(Behavior::LeaderFalseSignature);
  CHECK(st.injected >= 1);
  CHECK(st.detected >= 1);  // some sample hits the forged record
  CHECK(m.false_reliable == 0);
  CHECK(receipt(m, "not_reliable") >= 1);
}
