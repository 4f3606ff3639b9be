#include "vanetmac/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "vanetmac/engine.hpp"

namespace vanetmac {

ScenarioConfig cell_config(const ScenarioConfig& base, MacProtocol protocol, int length, double rate_hz, double range_m) {
  ScenarioConfig c = base;
  c.mac_protocol = protocol;
  c.packet_length_mix = {{length, 1.0}};
  c.heartbeat_rate = rate_hz;
  c.sensing_range = range_m;
  return c;
}

std::string cell_name(std::string_view prefix, int length, double rate_hz, double range_m) {
  std::string name(prefix);
  if (!name.empty()) name += '_';
  name += std::to_string(length) + "B_" + std::to_string(static_cast<int>(rate_hz)) + "Hz_" +
          std::to_string(static_cast<int>(range_m)) + "m";
  return name;
}

std::vector<Cell> grid(const ScenarioConfig& base, MacProtocol protocol, std::string_view prefix, bool skip_idle_cells) {
  std::vector<Cell> cells;
  for (int length : kGridLengths) {
    for (double rate : kGridRates) {
      if (skip_idle_cells && length == 100 && rate == 5.0) continue;
      for (double range : kGridRanges) {
        cells.push_back({cell_name(prefix, length, rate, range), cell_config(base, protocol, length, rate, range)});
      }
    }
  }
  return cells;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"table4", "table5", "fig12", "fig13", "fig15", "fig16", "fig17", "fig18"};
  return names;
}

std::vector<Cell> preset_cells(std::string_view preset, double scale) {
  const ScenarioConfig base = scaled(ScenarioConfig{}, scale);
  auto one = [&](std::string_view prefix, MacProtocol p, int length, double rate, double range) {
    return Cell{cell_name(prefix, length, rate, range), cell_config(base, p, length, rate, range)};
  };
  const auto csma = MacProtocol::Csma;
  const auto stdma = MacProtocol::Stdma;
  if (preset == "table4") return grid(base, csma, "table4", true);
  if (preset == "table5") return grid(base, stdma, "table5", false);
  if (preset == "fig12") return {one("table4", csma, 500, 10, 1000)};
  if (preset == "fig13") return {one("table4", csma, 500, 10, 500)};
  if (preset == "fig15") return {one("table4", csma, 500, 10, 500), one("table4", csma, 500, 10, 1000)};
  if (preset == "fig16") return {one("table5", stdma, 500, 10, 1000)};
  if (preset == "fig17") {
    return {one("table5", stdma, 100, 10, 1000), one("table5", stdma, 300, 10, 1000), one("table5", stdma, 500, 10, 1000)};
  }
  if (preset == "fig18") return {one("table4", csma, 500, 10, 1000)};
  throw std::invalid_argument("unknown preset '" + std::string(preset) + "'");
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = first + i;
  return seeds;
}

std::vector<std::vector<MetricsReport>> run_cells(std::span<const Cell> cells, std::span<const std::uint64_t> seeds,
                                                  unsigned threads, const Progress& done) {
  std::vector<std::vector<MetricsReport>> results(cells.size(), std::vector<MetricsReport>(seeds.size()));
  const std::size_t jobs = cells.size() * seeds.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const auto job = next.fetch_add(1);
      if (job >= jobs) return;
      const auto c = job / seeds.size();
      const auto s = job % seeds.size();
      try {
        results[c][s] = run(cells[c].config, seeds[s]);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
        return;
      }
      if (done) {
        std::lock_guard lock(mu);
        done(cells[c], seeds[s]);
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

void write_sweep(std::span<const Cell> cells, std::span<const std::vector<MetricsReport>> results,
                 const std::filesystem::path& directory) {
  if (cells.size() != results.size()) throw std::invalid_argument("cells and results differ in size");
  std::filesystem::create_directories(directory);
  std::vector<DropRow> drops;
  std::vector<ReuseRow> reuse;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    export_csv(results[i], directory / cells[i].name);
    drops.push_back(drop_row(results[i]));
    if (cells[i].config.mac_protocol == MacProtocol::Stdma) reuse.push_back(reuse_row(results[i]));
  }
  write_drops_table(drops, directory / "drops_table.csv");
  write_slot_reuse_table(reuse, directory / "slot_reuse.csv");
}

}  // namespace vanetmac
