#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vanetmac/config.hpp"
#include "vanetmac/metrics.hpp"

namespace vanetmac {

struct Cell {
  std::string name;
  ScenarioConfig config;
};

inline constexpr int kGridLengths[] = {100, 300, 500};
inline constexpr double kGridRates[] = {5.0, 10.0};
inline constexpr double kGridRanges[] = {500.0, 1000.0};

/// `base` specialised to one packet length, heartbeat rate and range.
ScenarioConfig cell_config(const ScenarioConfig& base, MacProtocol protocol, int length, double rate_hz, double range_m);
std::string cell_name(std::string_view prefix, int length, double rate_hz, double range_m);

/// Length x rate x range grid. The drop-rate table leaves out the 100 B / 5 Hz
/// cells, which never contend.
std::vector<Cell> grid(const ScenarioConfig& base, MacProtocol protocol, std::string_view prefix, bool skip_idle_cells);

const std::vector<std::string>& preset_names();
/// Cells behind one reproduction preset, built from the default scenario
/// shrunk by `scale`. Throws std::invalid_argument for unknown names.
std::vector<Cell> preset_cells(std::string_view preset, double scale);

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count);

using Progress = std::function<void(const Cell&, std::uint64_t seed)>;

/// Runs every (cell, seed) pair on up to `threads` workers. Result order is
/// [cell][seed] regardless of scheduling.
std::vector<std::vector<MetricsReport>> run_cells(std::span<const Cell> cells, std::span<const std::uint64_t> seeds,
                                                  unsigned threads = 0, const Progress& done = {});

/// One sub-directory of CSVs per cell plus the seed-averaged tables at the top.
void write_sweep(std::span<const Cell> cells, std::span<const std::vector<MetricsReport>> results,
                 const std::filesystem::path& directory);

}  // namespace vanetmac
