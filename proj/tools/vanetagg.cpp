#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "vanet/config.hpp"

namespace {

// "6,10" -> {6, 10}
bool parse_int_list(const std::string& text, std::vector<int>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
    pos = comma == std::string::npos ? text.size() + 1 : comma + 1;
    if (item.empty()) return false;
    try {
      std::size_t used = 0;
      int value = std::stoi(item, &used);
      if (used != item.size()) return false;
      out.push_back(value);
    } catch (const std::exception&) {
      return false;
    }
  }
  return !out.empty();
}

// "2..70" -> lo=2, hi=70
bool parse_range(const std::string& text, int& lo, int& hi) {
  std::size_t dots = text.find("..");
  if (dots == std::string::npos) return false;
  std::vector<int> one;
  if (!parse_int_list(text.substr(0, dots), one) || one.size() != 1) return false;
  lo = one[0];
  if (!parse_int_list(text.substr(dots + 2), one) || one.size() != 1) return false;
  hi = one[0];
  return true;
}

// "10..40" with a step, or a plain comma list
bool parse_counts(const std::string& text, int step, std::vector<int>& out) {
  int lo = 0, hi = 0;
  if (parse_range(text, lo, hi)) {
    if (step < 1 || lo < 1 || hi < lo) return false;
    out.clear();
    for (int n = lo; n <= hi; n += step) out.push_back(n);
    return true;
  }
  return parse_int_list(text, out);
}

int write_out(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write \"" << path << "\"\n";
    return 4;
  }
  return 0;
}

constexpr int kUsage = 2;
constexpr int kConfig = 3;
constexpr int kRuntime = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"warning aggregation analytics and strip simulator"};
  app.require_subcommand(1);

  std::string out_path;
  std::string config_path;

  CLI::App* analyze = app.add_subcommand("analyze", "emit analytic tables as CSV");
  analyze->require_subcommand(1);

  std::string k_list = "6,10";
  std::string n_range = "2..70";
  CLI::App* prob = analyze->add_subcommand(
      "prob", "chance that sampling checks at least two of n signatures");
  prob->add_option("--k", k_list, "comma list of check targets")->capture_default_str();
  prob->add_option("--n", n_range, "signature count range lo..hi")->capture_default_str();
  prob->add_option("-o,--output", out_path, "write CSV to a file instead of stdout");

  CLI::App* sizing =
      analyze->add_subcommand("sizing", "signature capacity per packet budget and digest");
  sizing->add_option("-o,--output", out_path, "write CSV to a file instead of stdout");

  CLI::App* simcmd = app.add_subcommand("sim", "seeded strip simulations");
  simcmd->require_subcommand(1);

  uint64_t seed_override = 0;
  std::string trace_path;
  CLI::App* run = simcmd->add_subcommand("run", "one run, metrics as key,value CSV");
  run->add_option("--config", config_path, "key = value config file");
  CLI::Option* seed_opt = run->add_option("--seed", seed_override, "override the config seed");
  run->add_option("--trace", trace_path, "also write the event trace here");
  run->add_option("-o,--output", out_path, "write CSV to a file instead of stdout");

  std::string nodes_spec = "10..40";
  int step = 10;
  int runs = 100;
  std::string preset;
  bool per_run = false;
  CLI::App* sweep = simcmd->add_subcommand("sweep", "averaged runs over node counts");
  sweep->add_option("--config", config_path, "key = value config file");
  sweep->add_option("--nodes", nodes_spec, "node counts, lo..hi or comma list")
      ->capture_default_str();
  sweep->add_option("--step", step, "stride for a lo..hi node range")->capture_default_str();
  sweep->add_option("--runs", runs, "seeds per node count")->capture_default_str();
  sweep->add_option("--preset", preset, "fig12, fig13 or table2")
      ->check(CLI::IsMember({"fig12", "fig13", "table2"}));
  sweep->add_flag("--per-run", per_run, "one row per run instead of means");
  sweep->add_option("-o,--output", out_path, "write CSV to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (prob->parsed()) {
      std::vector<int> ks;
      int lo = 0, hi = 0;
      if (!parse_int_list(k_list, ks)) {
        std::cerr << "usage error: --k wants a comma list like 6,10\n";
        return kUsage;
      }
      if (!parse_range(n_range, lo, hi)) {
        std::cerr << "usage error: --n wants a range like 2..70\n";
        return kUsage;
      }
      std::string csv;
      try {
        csv = vanet::config::render_prob_csv(ks, lo, hi);
      } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
      }
      return write_out(csv, out_path);
    }

    if (sizing->parsed()) return write_out(vanet::config::render_sizing_csv(), out_path);

    if (run->parsed()) {
      vanet::sim::SimConfig cfg;
      try {
        if (!config_path.empty()) cfg = vanet::config::load_config(config_path);
        if (seed_opt->count() > 0) cfg.seed = seed_override;
        if (!trace_path.empty()) cfg.record_trace = true;
        vanet::sim::validate(cfg);
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
      }
      vanet::sim::RunResult result = vanet::sim::run(cfg);
      if (!trace_path.empty()) {
        int rc = write_out(result.trace, trace_path);
        if (rc != 0) return rc;
      }
      return write_out(vanet::config::render_metrics_csv(result.metrics), out_path);
    }

    if (sweep->parsed()) {
      vanet::config::SweepParams params;
      params.runs = runs;
      params.per_run = per_run;
      if (runs < 1) {
        std::cerr << "usage error: --runs must be at least 1\n";
        return kUsage;
      }
      if (!parse_counts(nodes_spec, step, params.node_counts) || params.node_counts.empty()) {
        std::cerr << "usage error: --nodes wants lo..hi or a comma list\n";
        return kUsage;
      }

      vanet::sim::SimConfig base;
      try {
        if (!config_path.empty()) base = vanet::config::load_config(config_path);
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
      }

      if (preset == "table2") {
        auto rows = vanet::config::verify_count_rows({4, 7, 9, 20, 46, 70}, base.seed, 20'000);
        return write_out(vanet::config::render_verify_count_csv(rows), out_path);
      }
      if (preset == "fig12") {
        base.behaviors.clear();  // the packet-count comparison is honest-only
      } else if (preset == "fig13") {
        // every fourth vehicle re-broadcasts tampered copies
        params.behaviors_for = [](int node_count) {
          std::map<uint64_t, vanet::sim::Behavior> out;
          for (uint64_t id = 4; id <= static_cast<uint64_t>(node_count); id += 4)
            out[id] = vanet::sim::Behavior::ModifyAggregate;
          return out;
        };
      }

      std::string csv;
      try {
        csv = vanet::config::run_sweep_csv(base, params);
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
      }
      return write_out(csv, out_path);
    }
  } catch (const vanet::config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return 0;
}
