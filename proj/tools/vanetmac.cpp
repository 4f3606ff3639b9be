#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vanetmac/config.hpp"
#include "vanetmac/engine.hpp"
#include "vanetmac/sweep.hpp"

#ifndef VANETMAC_CONFIG_DIR
#define VANETMAC_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using namespace vanetmac;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kConfig = 3, kRuntime = 4 };

struct Options {
  std::string config = "table2_defaults";
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::size_t seeds = 1;
  std::optional<std::string> protocol;
  double scale = 1.0;
  std::optional<double> mobility_tick;
  bool quiet = false;
  std::string preset;
  std::string vehicle_trace;
  std::string slot_trace;
};

// A bare name refers to a shipped scenario file.
fs::path resolve_config(const std::string& name) {
  const fs::path direct(name);
  if (fs::exists(direct)) return direct;
  if (!direct.has_extension() && !direct.has_parent_path()) {
    for (const fs::path dir : {fs::path("configs"), fs::path(VANETMAC_CONFIG_DIR)}) {
      const auto candidate = dir / (name + ".cfg");
      if (fs::exists(candidate)) return candidate;
    }
  }
  return direct;
}

ScenarioConfig load_scenario(const Options& o) {
  ScenarioConfig cfg = load_config_file(resolve_config(o.config));
  if (o.protocol) cfg.mac_protocol = parse_protocol(*o.protocol);
  if (o.mobility_tick) cfg.mobility_tick = *o.mobility_tick;
  if (o.scale != 1.0) cfg = scaled(cfg, o.scale);
  validate(cfg);
  return cfg;
}

void apply_overrides(std::vector<Cell>& cells, const Options& o) {
  for (auto& c : cells) {
    if (o.mobility_tick) c.config.mobility_tick = *o.mobility_tick;
    validate(c.config);
  }
}

Progress reporter(const Options& o, std::size_t total) {
  if (o.quiet) return {};
  auto count = std::make_shared<std::size_t>(0);
  return [count, total](const Cell& cell, std::uint64_t seed) {
    std::cerr << '[' << ++*count << '/' << total << "] " << cell.name << " seed " << seed << '\n';
  };
}

int cmd_run(const Options& o) {
  const auto cfg = load_scenario(o);
  const auto seeds = seed_range(o.seed.value_or(cfg.rng_seed), o.seeds);
  std::ofstream vehicle_trace, slot_trace;
  RunOptions ro;
  if (!o.vehicle_trace.empty()) {
    vehicle_trace.open(o.vehicle_trace);
    if (!vehicle_trace) throw std::runtime_error("cannot write '" + o.vehicle_trace + "'");
    vehicle_trace << "time_s,id,lane,position_m\n";
    ro.vehicle_trace = &vehicle_trace;
  }
  if (!o.slot_trace.empty()) {
    slot_trace.open(o.slot_trace);
    if (!slot_trace) throw std::runtime_error("cannot write '" + o.slot_trace + "'");
    slot_trace << "frame,node,slot,action\n";
    ro.slot_trace = &slot_trace;
  }
  std::vector<MetricsReport> runs;
  for (auto seed : seeds) {
    if (!o.quiet) std::cerr << "run seed " << seed << '\n';
    runs.push_back(run(cfg, seed, ro));
  }
  export_csv(runs, o.out);
  return kOk;
}

int cmd_sweep(const Options& o) {
  const auto base = load_scenario(o);
  const auto cells = grid(base, base.mac_protocol, "", false);
  const auto seeds = seed_range(o.seed.value_or(base.rng_seed), o.seeds);
  const auto results = run_cells(cells, seeds, 0, reporter(o, cells.size() * seeds.size()));
  write_sweep(cells, results, o.out);
  return kOk;
}

int cmd_reproduce(const Options& o) {
  auto cells = preset_cells(o.preset, o.scale);
  apply_overrides(cells, o);
  const auto seeds = seed_range(o.seed.value_or(1), o.seeds);
  const auto results = run_cells(cells, seeds, 0, reporter(o, cells.size() * seeds.size()));
  write_sweep(cells, results, o.out);
  return kOk;
}

int fail(int code, std::string_view kind, std::string_view message) {
  std::cerr << "vanetmac: error[" << kind << "]: " << message << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Highway V2V MAC simulator: 802.11p CSMA/CA versus self-organizing TDMA."};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool reproduce) {
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "First master seed (defaults to the config's rng_seed, or 1)");
    sub->add_option("--seeds", o.seeds, "Number of consecutive seeds to run and average")
        ->check(CLI::PositiveNumber)
        ->default_str(reproduce ? "5" : "1");
    sub->add_option("--scale", o.scale, "Road length and duration multiplier")
        ->check(CLI::PositiveNumber)
        ->default_str(reproduce ? "0.25" : "1");
    sub->add_option("--mobility-tick", o.mobility_tick, "Mobility and neighbour refresh period in ms")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", o.quiet, "Suppress progress output");
    if (!reproduce) {
      sub->add_option("--config", o.config, "Config file, or the name of a shipped config")->capture_default_str();
      sub->add_option("--protocol", o.protocol, "MAC protocol override")->check(CLI::IsMember({"csma", "stdma"}));
    }
  };

  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and write its CSVs");
  common(run_cmd, false);
  run_cmd->add_option("--vehicle-trace", o.vehicle_trace, "Write vehicle positions once per second to this CSV");
  run_cmd->add_option("--slot-trace", o.slot_trace, "Write STDMA slot use (frame,node,slot,action) to this CSV");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the packet length x rate x range grid around a config");
  common(sweep_cmd, false);

  auto* repro_cmd = app.add_subcommand("reproduce", "Run the scenario grid behind a published table or figure");
  common(repro_cmd, true);
  repro_cmd->add_option("preset", o.preset, "Preset name")->required()->check(CLI::IsMember(preset_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }
  if (repro_cmd->parsed() && repro_cmd->count("--scale") == 0) o.scale = 0.25;
  if (repro_cmd->parsed() && repro_cmd->count("--seeds") == 0) o.seeds = 5;

  const auto started = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    if (run_cmd->parsed()) code = cmd_run(o);
    else if (sweep_cmd->parsed()) code = cmd_sweep(o);
    else code = cmd_reproduce(o);
  } catch (const ConfigError& e) {
    return fail(kConfig, "config", e.what());
  } catch (const std::exception& e) {
    return fail(kRuntime, "runtime", e.what());
  }
  if (!o.quiet) {
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - started;
    std::cerr << "done in " << wall.count() << " s, output in " << o.out << '\n';
  }
  return code;
}
