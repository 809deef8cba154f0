#include "vanet/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vanet/packets.hpp"
#include "vanet/rng.hpp"
#include "vanet/verify.hpp"

namespace vanet::config {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    out += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("bad value for config key \"" + std::string(key) + "\": \"" +
                    std::string(value) + "\"");
}

int64_t to_i64(std::string_view key, std::string_view v) {
  int64_t out{};
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size()) bad_value(key, v);
  return out;
}

uint64_t to_u64(std::string_view key, std::string_view v) {
  uint64_t out{};
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size()) bad_value(key, v);
  return out;
}

int to_int(std::string_view key, std::string_view v) {
  int64_t wide = to_i64(key, v);
  if (wide < INT32_MIN || wide > INT32_MAX) bad_value(key, v);
  return static_cast<int>(wide);
}

double to_double(std::string_view key, std::string_view v) {
  double out{};
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size()) bad_value(key, v);
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  std::string low = lower(v);
  if (low == "true" || low == "1" || low == "yes" || low == "on") return true;
  if (low == "false" || low == "0" || low == "no" || low == "off") return false;
  bad_value(key, v);
}

uint8_t to_event_type(std::string_view key, std::string_view v) {
  std::string low = lower(v);
  if (low == "traffic_jam") return packets::kTrafficJam;
  if (low == "free_parking") return packets::kFreeParking;
  if (low == "accident") return packets::kAccident;
  if (low == "obstacle") return packets::kObstacle;
  bad_value(key, v);
}

using Handler = void (*)(sim::SimConfig&, std::string_view key, std::string_view value);

struct KeyEntry {
  std::string_view key;
  Handler apply;
};

// clang-format off
constexpr KeyEntry kKeys[] = {
    {"seed", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.seed = to_u64(k, v); }},
    {"node_count", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.node_count = to_int(k, v); }},
    {"strip_length_m", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.strip_length_m = to_double(k, v); }},
    {"duration_ms", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.duration_ms = to_i64(k, v); }},
    {"check_interval_ms", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.check_interval_ms = to_i64(k, v); }},
    {"latency_ms", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.latency_ms = to_i64(k, v); }},
    {"retransmit_start_ms", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.retransmit_start_ms = to_i64(k, v); }},
    {"retransmit_interval_ms", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.retransmit_interval_ms = to_i64(k, v); }},
    {"tx_range_m", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.tx_range_m = to_double(k, v); }},
    {"loss", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.loss = to_double(k, v); }},
    {"event_trigger_distance_m", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.event_trigger_distance_m = to_double(k, v); }},
    {"event_type", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.event_type = to_event_type(k, v); }},
    {"event_direction", [](sim::SimConfig& c, std::string_view k, std::string_view v) {
       int d = to_int(k, v);
       if (d != 0 && d != 1) bad_value(k, v);
       c.event_direction = static_cast<uint8_t>(d);
     }},
    {"event_min_vehicles", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.event_min_vehicles = to_int(k, v); }},
    {"attack_start_ms", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.attack_start_ms = to_i64(k, v); }},
    {"aggregation", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.aggregation = to_bool(k, v); }},
    {"record_trace", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.record_trace = to_bool(k, v); }},
    {"adversaries", [](sim::SimConfig& c, std::string_view, std::string_view v) { c.behaviors = parse_adversaries(v); }},
    {"road_id", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.road.road_id = static_cast<uint32_t>(to_u64(k, v)); }},
    {"lanes", [](sim::SimConfig& c, std::string_view k, std::string_view v) {
       int lanes = to_int(k, v);
       if (lanes < 1 || lanes > 255) bad_value(k, v);
       c.protocol.road.profile.lanes = static_cast<uint8_t>(lanes);
     }},
    {"speed_limit_kmh", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.road.profile.speed_limit_kmh = to_double(k, v); }},
    {"road_class", [](sim::SimConfig& c, std::string_view k, std::string_view v) {
       std::string low = lower(v);
       if (low == "conventional") c.protocol.road.profile.road_class = geo::RoadClass::Conventional;
       else if (low == "highway") c.protocol.road.profile.road_class = geo::RoadClass::Highway;
       else bad_value(k, v);
     }},
    {"danger_radius_m", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.zones.danger_m = to_double(k, v); }},
    {"uncertainty_radius_m", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.zones.uncertainty_m = to_double(k, v); }},
    {"security_radius_m", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.zones.security_m = to_double(k, v); }},
    {"digest", [](sim::SimConfig& c, std::string_view k, std::string_view v) {
       auto algo = crypto::parse_algo(v);
       if (!algo) bad_value(k, v);
       c.protocol.algo = *algo;
     }},
    {"packet_size", [](sim::SimConfig& c, std::string_view k, std::string_view v) {
       try {
         c.protocol.budget = packets::PacketBudget(to_int(k, v));
       } catch (const std::domain_error&) {
         bad_value(k, v);
       }
     }},
    {"max_signers", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.max_signers = static_cast<std::size_t>(to_u64(k, v)); }},
    {"k", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.policy.check_target = static_cast<std::size_t>(to_u64(k, v)); }},
    {"min_signatures", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.policy.min_signatures = static_cast<std::size_t>(to_u64(k, v)); }},
    {"group_window_ms", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.group_window_ms = to_i64(k, v); }},
    {"regroup_holdoff_ms", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.regroup_holdoff_ms = to_i64(k, v); }},
    {"agreement_window_ms", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.agreement_window_ms = to_i64(k, v); }},
    {"position_tolerance_m", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.position_tolerance_m = to_double(k, v); }},
    {"t_jam_s", [](sim::SimConfig& c, std::string_view k, std::string_view v) {
       c.protocol.event_basic_time_ms[packets::kTrafficJam] = static_cast<int64_t>(std::llround(to_double(k, v) * 1000.0));
     }},
    {"t_parking_s", [](sim::SimConfig& c, std::string_view k, std::string_view v) {
       c.protocol.event_basic_time_ms[packets::kFreeParking] = static_cast<int64_t>(std::llround(to_double(k, v) * 1000.0));
     }},
    {"f_conventional", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.conventional_factor = to_double(k, v); }},
    {"f_highway", [](sim::SimConfig& c, std::string_view k, std::string_view v) { c.protocol.highway_factor = to_double(k, v); }},
};
// clang-format on

std::string known_keys() {
  std::string out;
  for (const KeyEntry& e : kKeys) {
    if (!out.empty()) out += ", ";
    out += e.key;
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt10(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Stat {
  std::vector<double> vals;
  void add(double v) { vals.push_back(v); }
  bool empty() const { return vals.empty(); }
  double mean() const {
    double s = 0;
    for (double v : vals) s += v;
    return vals.empty() ? 0.0 : s / static_cast<double>(vals.size());
  }
  double stddev() const {
    if (vals.size() < 2) return 0.0;
    double m = mean(), s = 0;
    for (double v : vals) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(vals.size() - 1));
  }
};

}  // namespace

std::map<uint64_t, sim::Behavior> parse_adversaries(std::string_view spec) {
  std::map<uint64_t, sim::Behavior> out;
  std::string_view rest = trim(spec);
  if (rest.empty()) return out;
  while (!rest.empty()) {
    std::size_t comma = rest.find(',');
    std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    std::size_t colon = item.find(':');
    if (colon == std::string_view::npos)
      throw ConfigError("adversaries entries look like id:behavior, got \"" +
                        std::string(item) + "\"");
    uint64_t id = to_u64("adversaries", trim(item.substr(0, colon)));
    if (id == 0) throw ConfigError("adversary node ids start at 1");
    std::string_view name = trim(item.substr(colon + 1));
    auto behavior = sim::parse_behavior(name);
    if (!behavior)
      throw ConfigError("unknown behavior \"" + std::string(name) + "\" in adversaries");
    if (!out.emplace(id, *behavior).second)
      throw ConfigError("duplicate adversary id " + std::to_string(id));
  }
  return out;
}

sim::SimConfig parse_config(std::string_view text) {
  sim::SimConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                          : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    const KeyEntry* entry = nullptr;
    for (const KeyEntry& e : kKeys)
      if (e.key == key) {
        entry = &e;
        break;
      }
    if (!entry)
      throw ConfigError("unknown config key \"" + std::string(key) + "\" (line " +
                        std::to_string(line_no) + "); known keys: " + known_keys());
    entry->apply(cfg, key, value);
  }
  return cfg;
}

sim::SimConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot read config file \"" + path +
                      "\"; a complete config with the defaults looks like:\n" +
                      default_config_text());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string default_config_text() {
  return
      "# world\n"
      "seed = 1\n"
      "node_count = 20\n"
      "strip_length_m = 1000\n"
      "duration_ms = 1000000\n"
      "check_interval_ms = 1000\n"
      "latency_ms = 100\n"
      "retransmit_start_ms = 40000\n"
      "retransmit_interval_ms = 10000\n"
      "tx_range_m = 100\n"
      "loss = 0\n"
      "\n"
      "# the scripted event\n"
      "event_trigger_distance_m = 800\n"
      "event_type = traffic_jam\n"
      "event_direction = 0\n"
      "event_min_vehicles = 3\n"
      "attack_start_ms = 60000\n"
      "\n"
      "# schemes; adversaries is a comma list like 3:false_info,5:modify_aggregate\n"
      "aggregation = true\n"
      "record_trace = true\n"
      "adversaries =\n"
      "\n"
      "# road\n"
      "road_id = 1\n"
      "lanes = 3\n"
      "speed_limit_kmh = 120\n"
      "road_class = conventional\n"
      "\n"
      "# zones around an event\n"
      "danger_radius_m = 100\n"
      "uncertainty_radius_m = 500\n"
      "security_radius_m = 2000\n"
      "\n"
      "# aggregation protocol\n"
      "digest = sha1\n"
      "packet_size = 512\n"
      "max_signers = 0\n"
      "k = 10\n"
      "min_signatures = 3\n"
      "group_window_ms = 2000\n"
      "regroup_holdoff_ms = 3000\n"
      "agreement_window_ms = 60000\n"
      "position_tolerance_m = 25\n"
      "\n"
      "# warning lifetimes: basic seconds per event type, scaled per road class\n"
      "t_jam_s = 300\n"
      "t_parking_s = 90\n"
      "f_conventional = 2\n"
      "f_highway = 1\n";
}

std::string render_sizing_csv() {
  std::string out = "# schema: sizing_v1\n";
  out += "algo,packet_size,signature_area,max_signatures,max_signers_practical\n";
  for (const packets::SizingRow& row : packets::sizing_table()) {
    packets::PacketBudget budget(row.packet_size);
    out += crypto::algo_name(row.algo);
    out += ',' + std::to_string(row.packet_size);
    out += ',' + std::to_string(row.signature_area);
    out += ',' + std::to_string(row.max_signatures);
    out += ',' + std::to_string(packets::max_signers_practical(budget, row.algo));
    out += '\n';
  }
  return out;
}

std::string render_prob_csv(const std::vector<int>& ks, int n_lo, int n_hi) {
  if (ks.empty()) throw std::invalid_argument("at least one k is required");
  for (int k : ks)
    if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (n_lo < 2 || n_hi > 200 || n_lo > n_hi)
    throw std::invalid_argument("n range must lie within [2, 200]");
  std::string out = "# schema: prob_v1\n";
  out += "k,n,p,p_at_least_two\n";
  for (int k : ks) {
    for (int n = n_lo; n <= n_hi; ++n) {
      double p = verify::verification_probability(static_cast<std::size_t>(n),
                                                  static_cast<std::size_t>(k));
      double at_least_two = verify::prob_at_least_two(static_cast<std::size_t>(n), p);
      out += std::to_string(k) + ',' + std::to_string(n) + ',' + fmt10(p) + ',' +
             fmt10(at_least_two) + '\n';
    }
  }
  return out;
}

std::vector<VerifyCountRow> verify_count_rows(const std::vector<int>& sizes, uint64_t seed,
                                              uint64_t trials) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  verify::VerifyPolicy policy;
  std::vector<VerifyCountRow> rows;
  rows.reserve(sizes.size());
  for (int n : sizes) {
    if (n < 1) throw std::invalid_argument("aggregate sizes must be at least 1");
    Rng rng(mix_seed({seed, static_cast<uint64_t>(n), 0xC0DEULL}));
    uint64_t total = 0;
    for (uint64_t t = 0; t < trials; ++t)
      total += verify::select_check_indices(static_cast<std::size_t>(n), policy.check_target,
                                            rng)
                   .size();
    VerifyCountRow row;
    row.n = n;
    row.trials = trials;
    row.mean_checked = static_cast<double>(total) / static_cast<double>(trials);
    row.expected = static_cast<double>(std::min<std::size_t>(
        static_cast<std::size_t>(n), policy.check_target));
    rows.push_back(row);
  }
  return rows;
}

std::string render_verify_count_csv(const std::vector<VerifyCountRow>& rows) {
  std::string out = "# schema: verify_count_v1\n";
  out += "n,trials,mean_checked,expected\n";
  for (const VerifyCountRow& r : rows)
    out += std::to_string(r.n) + ',' + std::to_string(r.trials) + ',' + fmt(r.mean_checked) +
           ',' + fmt(r.expected) + '\n';
  return out;
}

std::string render_metrics_csv(const sim::Metrics& m) {
  std::string out = "# schema: metrics_v1\n";
  out += "key,value\n";
  auto put = [&out](std::string_view key, const std::string& value) {
    out += key;
    out += ',';
    out += value;
    out += '\n';
  };
  put("events_formed", std::to_string(m.events_formed));
  put("event_onset_ms", std::to_string(m.event_onset_ms));
  put("sent_w", std::to_string(m.sent_w));
  put("sent_r", std::to_string(m.sent_r));
  put("sent_s", std::to_string(m.sent_s));
  put("sent_a", std::to_string(m.sent_a));
  put("total_sends", std::to_string(m.total_sends));
  put("total_bytes", std::to_string(m.total_bytes));
  put("deliveries", std::to_string(m.deliveries));
  put("losses", std::to_string(m.losses));
  put("aggregates_emitted", std::to_string(m.aggregates_emitted));
  put("mean_group_size", fmt(m.mean_group_size));
  put("prob_verifications", std::to_string(m.prob_verifications));
  put("signatures_checked", std::to_string(m.signatures_checked));
  put("mean_checked", fmt(m.mean_checked));
  put("baseline_verifications", std::to_string(m.baseline_verifications));
  put("baseline_accepts", std::to_string(m.baseline_accepts));
  put("accepts_direct", std::to_string(m.accepts_direct));
  put("accepts_reliable", std::to_string(m.accepts_reliable));
  put("accepts_combined", std::to_string(m.accepts_combined));
  put("false_reliable", std::to_string(m.false_reliable));
  put("marks", std::to_string(m.marks));
  put("expirations", std::to_string(m.expirations));
  put("covered", std::to_string(m.covered));
  put("eligible", std::to_string(m.eligible));
  put("all_reachable_covered", m.all_reachable_covered ? "1" : "0");
  put("full_coverage_ms", std::to_string(m.full_coverage_ms));
  for (const auto& [name, count] : m.receipts)
    put("receipt_" + name, std::to_string(count));
  for (const auto& [behavior, st] : m.attacks) {
    std::string prefix = std::string("attack_") + sim::behavior_name(behavior);
    put(prefix + "_injected", std::to_string(st.injected));
    put(prefix + "_detected", std::to_string(st.detected));
    put(prefix + "_succeeded", std::to_string(st.succeeded));
  }
  return out;
}

std::string run_sweep_csv(const sim::SimConfig& base, const SweepParams& params) {
  if (params.node_counts.empty())
    throw std::invalid_argument("at least one node count is required");
  if (params.runs < 1) throw std::invalid_argument("runs must be at least 1");

  std::string out;
  if (params.per_run) {
    out += "# schema: sweep_runs_v1\n";
    out += "node_count,seed,scheme,events_formed,total_sends,total_bytes,coverage_ms,"
           "mean_checked,covered,eligible,attack_injected,attack_detected,attack_succeeded\n";
  } else {
    out += "# schema: sweep_v1\n";
    out += "node_count,runs,events_formed,packets_agg_mean,packets_agg_std,packets_base_mean,"
           "packets_base_std,packets_ratio,bytes_agg_mean,bytes_base_mean,coverage_ms_mean,"
           "coverage_ms_std,checked_mean,checked_std,detect_rate_mean,detect_rate_std\n";
  }

  for (int nodes : params.node_counts) {
    std::map<uint64_t, sim::Behavior> behaviors =
        params.behaviors_for ? params.behaviors_for(nodes) : base.behaviors;
    for (auto it = behaviors.begin(); it != behaviors.end();)
      it = it->first > static_cast<uint64_t>(nodes) ? behaviors.erase(it) : std::next(it);

    Stat pk_agg, pk_base, by_agg, by_base, cover, checked, detect;
    int formed = 0;
    for (int r = 0; r < params.runs; ++r) {
      sim::SimConfig cfg = base;
      cfg.node_count = nodes;
      cfg.seed = base.seed + static_cast<uint64_t>(r);
      cfg.record_trace = false;
      cfg.behaviors = behaviors;

      cfg.aggregation = true;
      sim::RunResult agg = sim::run(cfg);
      cfg.aggregation = false;
      sim::RunResult flat = sim::run(cfg);

      const sim::Metrics& ma = agg.metrics;
      const sim::Metrics& mb = flat.metrics;
      formed += ma.events_formed;
      pk_agg.add(static_cast<double>(ma.total_sends));
      pk_base.add(static_cast<double>(mb.total_sends));
      by_agg.add(static_cast<double>(ma.total_bytes));
      by_base.add(static_cast<double>(mb.total_bytes));
      if (ma.events_formed && ma.all_reachable_covered && ma.full_coverage_ms >= 0)
        cover.add(static_cast<double>(ma.full_coverage_ms - ma.event_onset_ms));
      if (ma.prob_verifications > 0) checked.add(ma.mean_checked);
      uint64_t detected = 0, succeeded = 0, injected = 0;
      for (const auto& [b, st] : ma.attacks) {
        (void)b;
        detected += st.detected;
        succeeded += st.succeeded;
        injected += st.injected;
      }
      if (detected + succeeded > 0)
        detect.add(static_cast<double>(detected) /
                   static_cast<double>(detected + succeeded));

      if (params.per_run) {
        auto row = [&](const sim::Metrics& m, const char* scheme) {
          int64_t cov_ms = (m.events_formed && m.all_reachable_covered &&
                            m.full_coverage_ms >= 0)
                               ? m.full_coverage_ms - m.event_onset_ms
                               : -1;
          uint64_t det = 0, suc = 0, inj = 0;
          for (const auto& [b, st] : m.attacks) {
            (void)b;
            det += st.detected;
            suc += st.succeeded;
            inj += st.injected;
          }
          out += std::to_string(nodes) + ',' + std::to_string(cfg.seed) + ',' + scheme + ',' +
                 std::to_string(m.events_formed) + ',' + std::to_string(m.total_sends) + ',' +
                 std::to_string(m.total_bytes) + ',' + std::to_string(cov_ms) + ',' +
                 fmt(m.mean_checked) + ',' + std::to_string(m.covered) + ',' +
                 std::to_string(m.eligible) + ',' + std::to_string(inj) + ',' +
                 std::to_string(det) + ',' + std::to_string(suc) + '\n';
        };
        row(ma, "aggregated");
        row(mb, "baseline");
      }
    }

    if (!params.per_run) {
      double ratio = pk_base.mean() > 0 ? pk_agg.mean() / pk_base.mean() : 0.0;
      out += std::to_string(nodes) + ',' + std::to_string(params.runs) + ',' +
             std::to_string(formed) + ',' + fmt(pk_agg.mean()) + ',' + fmt(pk_agg.stddev()) +
             ',' + fmt(pk_base.mean()) + ',' + fmt(pk_base.stddev()) + ',' + fmt(ratio) + ',' +
             fmt(by_agg.mean()) + ',' + fmt(by_base.mean()) + ',' +
             (cover.empty() ? std::string() : fmt(cover.mean())) + ',' +
             (cover.empty() ? std::string() : fmt(cover.stddev())) + ',' +
             (checked.empty() ? std::string() : fmt(checked.mean())) + ',' +
             (checked.empty() ? std::string() : fmt(checked.stddev())) + ',' +
             (detect.empty() ? std::string() : fmt(detect.mean())) + ',' +
             (detect.empty() ? std::string() : fmt(detect.stddev())) + '\n';
    }
  }
  return out;
}

}  // namespace vanet::config
