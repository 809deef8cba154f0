#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "vanet/config.hpp"
#include "vanet/packets.hpp"

using namespace vanet;
using config::ConfigError;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("the default config text parses back to the stock configuration") {
  sim::SimConfig parsed = config::parse_config(config::default_config_text());
  sim::SimConfig stock;

  CHECK(parsed.seed == stock.seed);
  CHECK(parsed.node_count == stock.node_count);
  CHECK(parsed.strip_length_m == stock.strip_length_m);
  CHECK(parsed.duration_ms == stock.duration_ms);
  CHECK(parsed.check_interval_ms == stock.check_interval_ms);
  CHECK(parsed.latency_ms == stock.latency_ms);
  CHECK(parsed.retransmit_start_ms == stock.retransmit_start_ms);
  CHECK(parsed.retransmit_interval_ms == stock.retransmit_interval_ms);
  CHECK(parsed.tx_range_m == stock.tx_range_m);
  CHECK(parsed.loss == stock.loss);
  CHECK(parsed.event_trigger_distance_m == stock.event_trigger_distance_m);
  CHECK(parsed.event_type == stock.event_type);
  CHECK(parsed.event_direction == stock.event_direction);
  CHECK(parsed.event_min_vehicles == stock.event_min_vehicles);
  CHECK(parsed.attack_start_ms == stock.attack_start_ms);
  CHECK(parsed.aggregation == stock.aggregation);
  CHECK(parsed.record_trace == stock.record_trace);
  CHECK(parsed.behaviors.empty());

  CHECK(parsed.protocol.algo == stock.protocol.algo);
  CHECK(parsed.protocol.budget.packet_size() == stock.protocol.budget.packet_size());
  CHECK(parsed.protocol.max_signers == stock.protocol.max_signers);
  CHECK(parsed.protocol.policy.check_target == stock.protocol.policy.check_target);
  CHECK(parsed.protocol.policy.min_signatures == stock.protocol.policy.min_signatures);
  CHECK(parsed.protocol.group_window_ms == stock.protocol.group_window_ms);
  CHECK(parsed.protocol.regroup_holdoff_ms == stock.protocol.regroup_holdoff_ms);
  CHECK(parsed.protocol.agreement_window_ms == stock.protocol.agreement_window_ms);
  CHECK(parsed.protocol.position_tolerance_m == stock.protocol.position_tolerance_m);
  CHECK(parsed.protocol.zones.danger_m == stock.protocol.zones.danger_m);
  CHECK(parsed.protocol.zones.uncertainty_m == stock.protocol.zones.uncertainty_m);
  CHECK(parsed.protocol.zones.security_m == stock.protocol.zones.security_m);
  CHECK(parsed.protocol.road.road_id == stock.protocol.road.road_id);
  CHECK(parsed.protocol.road.profile.lanes == stock.protocol.road.profile.lanes);
  CHECK(parsed.protocol.road.profile.speed_limit_kmh ==
        stock.protocol.road.profile.speed_limit_kmh);
  CHECK(parsed.protocol.road.profile.road_class == stock.protocol.road.profile.road_class);
  CHECK(parsed.protocol.event_basic_time_ms == stock.protocol.event_basic_time_ms);
  CHECK(parsed.protocol.conventional_factor == stock.protocol.conventional_factor);
  CHECK(parsed.protocol.highway_factor == stock.protocol.highway_factor);

  CHECK_NOTHROW(sim::validate(parsed));
}

TEST_CASE("overrides, comments and duplicate keys") {
  sim::SimConfig cfg = config::parse_config(
      "# tuned run\n"
      "node_count = 40   # denser strip\n"
      "loss = 0.25\n"
      "digest = SHA-256\n"
      "packet_size = 1024\n"
      "road_class = highway\n"
      "event_type = free_parking\n"
      "t_parking_s = 120\n"
      "aggregation = off\n"
      "seed = 5\n"
      "seed = 9\n"
      "adversaries = 3:false_info, 5:modify_aggregate\n");
  CHECK(cfg.node_count == 40);
  CHECK(cfg.loss == 0.25);
  CHECK(cfg.protocol.algo == crypto::DigestAlgo::Sha256Class);
  CHECK(cfg.protocol.budget.packet_size() == 1024);
  CHECK(cfg.protocol.road.profile.road_class == geo::RoadClass::Highway);
  CHECK(cfg.event_type == packets::kFreeParking);
  CHECK(cfg.protocol.event_basic_time_ms.at(packets::kFreeParking) == 120'000);
  CHECK_FALSE(cfg.aggregation);
  CHECK(cfg.seed == 9);  // later assignment wins
  REQUIRE(cfg.behaviors.size() == 2);
  CHECK(cfg.behaviors.at(3) == sim::Behavior::FalseInfo);
  CHECK(cfg.behaviors.at(5) == sim::Behavior::ModifyAggregate);
}

TEST_CASE("config errors name the offender") {
  std::string msg = message_of([] { (void)config::parse_config("nodecount = 4\n"); });
  CHECK(msg.find("unknown config key \"nodecount\"") != std::string::npos);
  CHECK(msg.find("known keys:") != std::string::npos);
  CHECK(msg.find("node_count") != std::string::npos);

  msg = message_of([] { (void)config::parse_config("loss = lots\n"); });
  CHECK(msg.find("bad value for config key \"loss\"") != std::string::npos);
  CHECK(msg.find("\"lots\"") != std::string::npos);

  msg = message_of([] { (void)config::parse_config("\n\njust chatter\n"); });
  CHECK(msg.find("line 3") != std::string::npos);

  CHECK_THROWS_AS((void)config::parse_config("packet_size = 700\n"), ConfigError);
  CHECK_THROWS_AS((void)config::parse_config("event_direction = 2\n"), ConfigError);
  CHECK_THROWS_AS((void)config::parse_config("digest = rot13\n"), ConfigError);
  CHECK_THROWS_AS((void)config::parse_config("lanes = 0\n"), ConfigError);
  CHECK_THROWS_AS((void)config::parse_config("event_type = meteor\n"), ConfigError);
}

TEST_CASE("adversary specs") {
  CHECK(config::parse_adversaries("").empty());
  CHECK(config::parse_adversaries("   ").empty());

  auto both = config::parse_adversaries("2:collusion,4:collusion");
  CHECK(both.size() == 2);
  CHECK(both.at(2) == sim::Behavior::Collusion);

  CHECK_THROWS_AS(config::parse_adversaries("7"), ConfigError);
  CHECK_THROWS_AS(config::parse_adversaries("0:false_info"), ConfigError);
  CHECK_THROWS_AS(config::parse_adversaries("3:naps"), ConfigError);
  CHECK_THROWS_AS(config::parse_adversaries("3:false_info,3:collusion"), ConfigError);

  std::string msg =
      message_of([] { (void)config::parse_adversaries("3:naps"); });
  CHECK(msg.find("\"naps\"") != std::string::npos);
}

TEST_CASE("a missing config file suggests the defaults") {
  std::string msg =
      message_of([] { (void)config::load_config("/nonexistent/vanet.conf"); });
  CHECK(msg.find("cannot read config file") != std::string::npos);
  CHECK(msg.find("node_count = 20") != std::string::npos);
}

TEST_CASE("capacity table lists all twelve digest and budget pairs") {
  std::string csv = config::render_sizing_csv();
  std::vector<std::string> rows = lines_of(csv);
  REQUIRE(rows.size() == 14);  // schema + header + 12 rows
  CHECK(rows[0] == "# schema: sizing_v1");
  CHECK(rows[1] == "algo,packet_size,signature_area,max_signatures,max_signers_practical");
  CHECK(rows[2] == "MD5,256,156,9,4");
  CHECK(rows[5] == "MD5,512,412,25,11");
  CHECK(rows[6] == "SHA-1,512,412,20,10");
  CHECK(rows[10] == "SHA-256,1024,924,28,17");
  CHECK(rows[13] == "SHA-256,1500,1400,43,26");
}

TEST_CASE("verification coverage table") {
  std::string csv = config::render_prob_csv({6, 10}, 2, 70);
  std::vector<std::string> rows = lines_of(csv);
  REQUIRE(rows.size() == 2 + 2 * 69);
  CHECK(rows[1] == "k,n,p,p_at_least_two");
  // k=10, n=10: every signature is checked, two checks are certain
  CHECK(rows[2 + 69 + 8] == "10,10,1,1");
  bool found = false;
  for (const std::string& row : rows)
    if (row.rfind("10,20,", 0) == 0 && row.find("0.9999799728") != std::string::npos)
      found = true;
  CHECK(found);

  CHECK_THROWS_AS((void)config::render_prob_csv({10}, 1, 70), std::invalid_argument);
  CHECK_THROWS_AS((void)config::render_prob_csv({10}, 2, 201), std::invalid_argument);
  CHECK_THROWS_AS((void)config::render_prob_csv({}, 2, 70), std::invalid_argument);
  CHECK_THROWS_AS((void)config::render_prob_csv({0}, 2, 70), std::invalid_argument);
}

TEST_CASE("mean checked signatures track min(n, k)") {
  auto rows = config::verify_count_rows({4, 7, 9, 20, 46, 70}, 42, 20'000);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].mean_checked == 4.0);  // below k everything is checked
  CHECK(rows[1].mean_checked == 7.0);
  CHECK(rows[2].mean_checked == 9.0);
  for (const auto& row : rows) {
    CHECK(row.expected == doctest::Approx(std::min(row.n, 10)));
    CHECK(row.mean_checked == doctest::Approx(row.expected).epsilon(0.02));
  }
  std::string csv = config::render_verify_count_csv(rows);
  CHECK(lines_of(csv).size() == 8);
  CHECK(csv.find("# schema: verify_count_v1") == 0);
}

TEST_CASE("metrics dump is stable and complete") {
  sim::SimConfig cfg;
  cfg.node_count = 8;
  cfg.duration_ms = 120'000;
  cfg.record_trace = false;
  cfg.seed = 4;
  sim::RunResult r = sim::run(cfg);
  std::string csv = config::render_metrics_csv(r.metrics);
  CHECK(csv.rfind("# schema: metrics_v1\nkey,value\n", 0) == 0);
  CHECK(csv.find("total_sends,") != std::string::npos);
  CHECK(csv.find("mean_checked,") != std::string::npos);
  CHECK(csv.find("all_reachable_covered,") != std::string::npos);
  CHECK(csv == config::render_metrics_csv(sim::run(cfg).metrics));
}

TEST_CASE("sweeps aggregate both schemes per node count") {
  sim::SimConfig base;
  base.seed = 3;
  base.duration_ms = 300'000;

  config::SweepParams params;
  params.node_counts = {20};
  params.runs = 3;

  std::string csv = config::run_sweep_csv(base, params);
  std::vector<std::string> rows = lines_of(csv);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "# schema: sweep_v1");
  CHECK(rows[2].rfind("20,3,", 0) == 0);

  // events formed on every seed, and aggregation cuts the packet count
  std::istringstream row(rows[2]);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(row, field, ',')) fields.push_back(field);
  REQUIRE(fields.size() >= 8);
  CHECK(fields[2] == "3");
  double agg = std::stod(fields[3]);
  double base_packets = std::stod(fields[5]);
  CHECK(agg < base_packets);
  double ratio = std::stod(fields[7]);
  CHECK(ratio == doctest::Approx(agg / base_packets).epsilon(0.01));
}

TEST_CASE("per-run sweep rows match a plain run") {
  sim::SimConfig base;
  base.seed = 11;
  base.duration_ms = 200'000;

  config::SweepParams params;
  params.node_counts = {10};
  params.runs = 1;
  params.per_run = true;

  std::vector<std::string> rows = lines_of(config::run_sweep_csv(base, params));
  REQUIRE(rows.size() == 4);  // schema + header + aggregated row + baseline row
  CHECK(rows[2].rfind("10,11,aggregated,", 0) == 0);
  CHECK(rows[3].rfind("10,11,baseline,", 0) == 0);

  sim::SimConfig solo = base;
  solo.node_count = 10;
  solo.record_trace = false;
  sim::RunResult direct = sim::run(solo);
  std::string expect = "10,11,aggregated," + std::to_string(direct.metrics.events_formed) +
                       ',' + std::to_string(direct.metrics.total_sends) + ',' +
                       std::to_string(direct.metrics.total_bytes) + ',';
  CHECK(rows[2].rfind(expect, 0) == 0);
}

TEST_CASE("sweep drops adversary ids beyond the node count") {
  sim::SimConfig base;
  base.seed = 2;
  base.duration_ms = 120'000;
  base.behaviors[9] = sim::Behavior::FalseInfo;   // survives a 10-node sweep
  base.behaviors[15] = sim::Behavior::Collusion;  // dropped at 10 nodes

  config::SweepParams params;
  params.node_counts = {10};
  params.runs = 1;
  CHECK_NOTHROW((void)config::run_sweep_csv(base, params));
}
