#include "vanetmac/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace vanetmac {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_double(const std::string& key, std::string_view text) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ConfigError(key, "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, std::string_view text) {
  Int v{};
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ConfigError(key, "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string fmt_us(Nanos t) { return fmt(to_us(t)); }

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

std::string_view to_string(MacProtocol p) { return p == MacProtocol::Csma ? "csma" : "stdma"; }

MacProtocol parse_protocol(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "csma") return MacProtocol::Csma;
  if (lower == "stdma") return MacProtocol::Stdma;
  throw ConfigError("mac_protocol", "unknown protocol '" + std::string(name) + "' (expected csma or stdma)");
}

double kmh_to_ms(double kmh) { return kmh / 3.6; }

Nanos packet_airtime(int length_bytes, double rate_bps) {
  if (length_bytes <= 0) throw std::invalid_argument("packet length must be positive");
  if (!(rate_bps > 0.0)) throw std::invalid_argument("transfer rate must be positive");
  return Nanos{static_cast<Nanos::rep>(std::llround(8.0 * length_bytes * 1e9 / rate_bps))};
}

Nanos transmit_duration_csma(int length_bytes, const TimingParams& t) {
  return t.preamble + packet_airtime(length_bytes, t.transfer_rate);
}

Nanos csma_tx_time(int length_bytes, const TimingParams& t) {
  return t.aifs + transmit_duration_csma(length_bytes, t);
}

Nanos stdma_tx_time(int length_bytes, const TimingParams& t) {
  return 2 * t.guard_time + 2 * t.sifs + t.preamble + packet_airtime(length_bytes, t.transfer_rate);
}

Nanos stdma_slot_duration(int length_bytes, const TimingParams& t) {
  const auto tx = stdma_tx_time(length_bytes, t).count();
  constexpr Nanos::rep us = 1000;
  return Nanos{(tx + us - 1) / us * us};
}

std::int64_t slots_per_frame(Nanos frame, Nanos slot_duration) {
  if (slot_duration.count() <= 0 || frame < slot_duration) {
    throw std::invalid_argument("frame must hold at least one slot");
  }
  return frame.count() / slot_duration.count();
}

int longest_packet(const ScenarioConfig& cfg) {
  int longest = 0;
  for (const auto& s : cfg.packet_length_mix) longest = std::max(longest, s.bytes);
  return longest;
}

Nanos effective_warmup(const ScenarioConfig& cfg) {
  if (cfg.warmup) return from_s(*cfg.warmup);
  const double slowest = *std::min_element(cfg.lane_mean_speeds.begin(), cfg.lane_mean_speeds.end());
  return from_s(cfg.road_length / kmh_to_ms(slowest));
}

int report_rate(const ScenarioConfig& cfg) {
  return static_cast<int>(std::llround(cfg.heartbeat_rate * cfg.stdma_frame_duration));
}

ScenarioConfig scaled(ScenarioConfig cfg, double factor) {
  if (!(factor > 0.0)) throw ConfigError("scale", "scale factor must be positive");
  cfg.road_length *= factor;
  cfg.sim_duration *= factor;
  if (cfg.warmup) *cfg.warmup *= factor;
  return cfg;
}

void validate(const ScenarioConfig& c) {
  const auto& t = c.timing;
  require(t.slot_time.count() > 0, "slot_time", "must be positive");
  require(t.sifs.count() > 0, "sifs", "must be positive");
  require(t.aifs.count() > 0, "aifs", "must be positive");
  require(t.guard_time.count() > 0, "guard_time", "must be positive");
  require(t.preamble.count() > 0, "preamble", "must be positive");
  require(t.transfer_rate > 0.0, "transfer_rate", "must be positive");
  require(t.cw_min >= 0, "cw_min", "must be non-negative");

  require(c.road_length > 0.0, "road_length", "must be positive");
  require(c.lanes_per_direction >= 1, "lanes_per_direction", "must be at least 1");
  require(c.directions == 1 || c.directions == 2, "directions", "must be 1 or 2");
  require(c.mean_interarrival > 0.0, "mean_interarrival", "must be positive");
  require(static_cast<int>(c.lane_mean_speeds.size()) == c.lanes_per_direction, "lane_mean_speeds",
          "needs exactly lanes_per_direction entries");
  for (double v : c.lane_mean_speeds) require(v > 0.0, "lane_mean_speeds", "speeds must be positive");
  require(c.speed_stddev >= 0.0, "speed_stddev", "must be non-negative");
  require(c.lane_width >= 0.0, "lane_width", "must be non-negative");
  require(c.sensing_range > 0.0, "sensing_range", "must be positive");
  require(c.heartbeat_rate > 0.0, "heartbeat_rate", "must be positive");

  require(!c.packet_length_mix.empty(), "packet_length_mix", "must not be empty");
  double total = 0.0;
  for (const auto& s : c.packet_length_mix) {
    require(s.bytes > 0, "packet_length_mix", "byte counts must be positive");
    require(s.fraction >= 0.0, "packet_length_mix", "fractions must be non-negative");
    total += s.fraction;
  }
  require(std::abs(total - 1.0) <= 1e-9, "packet_length_mix", "fractions must sum to 1 (got " + fmt(total) + ")");

  require(c.stdma_frame_duration > 0.0, "stdma_frame_duration", "must be positive");
  require(c.sim_duration > 0.0, "sim_duration", "must be positive");
  if (c.warmup) require(*c.warmup >= 0.0, "warmup", "must be non-negative");
  require(c.stats_region.start >= 0.0 && c.stats_region.start < c.stats_region.end && c.stats_region.end <= 1.0,
          "stats_region", "needs 0 <= start < end <= 1");
  require(c.initial_tx_delay_max >= 0.0, "initial_tx_delay_max", "must be non-negative");
  require(c.mobility_tick > 0.0, "mobility_tick", "must be positive");
  require(c.mobility_tick <= c.sim_duration * 1e3, "mobility_tick", "must not exceed sim_duration");
  require(c.decode_time >= 0.0, "decode_time", "must be non-negative");
  require(c.min_packets_for_extremes >= 1, "min_packets_for_extremes", "must be at least 1");

  if (c.mac_protocol == MacProtocol::Stdma) {
    const double rr = c.heartbeat_rate * c.stdma_frame_duration;
    require(std::abs(rr - std::round(rr)) < 1e-9 && rr >= 1.0, "heartbeat_rate",
            "heartbeat_rate * stdma_frame_duration must be a positive integer report rate");
    const auto frame = from_s(c.stdma_frame_duration);
    const auto slot = stdma_slot_duration(longest_packet(c), c.timing);
    require(frame >= slot, "stdma_frame_duration", "shorter than one slot");
    require(report_rate(c) <= slots_per_frame(frame, slot), "heartbeat_rate", "report rate exceeds slots per frame");
  }
}

ScenarioConfig load_config(std::string_view document) {
  ScenarioConfig c;
  std::map<std::string, bool> seen;
  std::size_t line_no = 0;
  for (auto line : split(document, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(key, "missing value");
    if (seen[key]) throw ConfigError(key, "duplicate key");
    seen[key] = true;

    auto num = [&] { return parse_double(key, value); };
    if (key == "road_length") c.road_length = num();
    else if (key == "lanes_per_direction") c.lanes_per_direction = parse_int<int>(key, value);
    else if (key == "directions") c.directions = parse_int<int>(key, value);
    else if (key == "mean_interarrival") c.mean_interarrival = num();
    else if (key == "lane_mean_speeds") {
      c.lane_mean_speeds.clear();
      for (auto item : split(value, ',')) c.lane_mean_speeds.push_back(parse_double(key, item));
    } else if (key == "speed_stddev") c.speed_stddev = num();
    else if (key == "lane_width") c.lane_width = num();
    else if (key == "sensing_range") c.sensing_range = num();
    else if (key == "heartbeat_rate") c.heartbeat_rate = num();
    else if (key == "packet_length_mix") {
      c.packet_length_mix.clear();
      for (auto item : split(value, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
          c.packet_length_mix.push_back({parse_int<int>(key, parts[0]), 1.0});
        } else if (parts.size() == 2) {
          c.packet_length_mix.push_back({parse_int<int>(key, parts[0]), parse_double(key, parts[1])});
        } else {
          throw ConfigError(key, "expected bytes:fraction, got '" + std::string(item) + "'");
        }
      }
    } else if (key == "mac_protocol") c.mac_protocol = parse_protocol(value);
    else if (key == "stdma_frame_duration") c.stdma_frame_duration = num();
    else if (key == "sim_duration") c.sim_duration = num();
    else if (key == "warmup") c.warmup = num();
    else if (key == "stats_region") {
      const auto parts = split(value, ',');
      if (parts.size() != 2) throw ConfigError(key, "expected start, end");
      c.stats_region = {parse_double(key, parts[0]), parse_double(key, parts[1])};
    } else if (key == "initial_tx_delay_max") c.initial_tx_delay_max = num();
    else if (key == "mobility_tick") c.mobility_tick = num();
    else if (key == "decode_time") c.decode_time = num();
    else if (key == "min_packets_for_extremes") c.min_packets_for_extremes = parse_int<int>(key, value);
    else if (key == "rng_seed") c.rng_seed = parse_int<std::uint64_t>(key, value);
    else if (key == "slot_time") c.timing.slot_time = from_us(num());
    else if (key == "sifs") c.timing.sifs = from_us(num());
    else if (key == "aifs") c.timing.aifs = from_us(num());
    else if (key == "guard_time") c.timing.guard_time = from_us(num());
    else if (key == "preamble") c.timing.preamble = from_us(num());
    else if (key == "transfer_rate") c.timing.transfer_rate = num();
    else if (key == "cw_min") c.timing.cw_min = parse_int<int>(key, value);
    else throw ConfigError(key, "unknown key");
  }
  validate(c);
  return c;
}

ScenarioConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return load_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.key(), path.string() + ": " + (e.key().empty() ? e.what() : std::string(e.what()).substr(e.key().size() + 2)));
  }
}

std::string to_document(const ScenarioConfig& c) {
  std::ostringstream out;
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
  };
  out << "road_length = " << fmt(c.road_length) << '\n'
      << "lanes_per_direction = " << c.lanes_per_direction << '\n'
      << "directions = " << c.directions << '\n'
      << "mean_interarrival = " << fmt(c.mean_interarrival) << '\n'
      << "lane_mean_speeds = " << list(c.lane_mean_speeds) << '\n'
      << "speed_stddev = " << fmt(c.speed_stddev) << '\n'
      << "lane_width = " << fmt(c.lane_width) << '\n'
      << "sensing_range = " << fmt(c.sensing_range) << '\n'
      << "heartbeat_rate = " << fmt(c.heartbeat_rate) << '\n'
      << "packet_length_mix = ";
  for (std::size_t i = 0; i < c.packet_length_mix.size(); ++i) {
    out << (i ? ", " : "") << c.packet_length_mix[i].bytes << ':' << fmt(c.packet_length_mix[i].fraction);
  }
  out << '\n'
      << "mac_protocol = " << to_string(c.mac_protocol) << '\n'
      << "stdma_frame_duration = " << fmt(c.stdma_frame_duration) << '\n'
      << "sim_duration = " << fmt(c.sim_duration) << '\n';
  if (c.warmup) out << "warmup = " << fmt(*c.warmup) << '\n';
  out << "stats_region = " << fmt(c.stats_region.start) << ", " << fmt(c.stats_region.end) << '\n'
      << "initial_tx_delay_max = " << fmt(c.initial_tx_delay_max) << '\n'
      << "mobility_tick = " << fmt(c.mobility_tick) << '\n'
      << "decode_time = " << fmt(c.decode_time) << '\n'
      << "min_packets_for_extremes = " << c.min_packets_for_extremes << '\n'
      << "rng_seed = " << c.rng_seed << '\n'
      << "slot_time = " << fmt_us(c.timing.slot_time) << '\n'
      << "sifs = " << fmt_us(c.timing.sifs) << '\n'
      << "aifs = " << fmt_us(c.timing.aifs) << '\n'
      << "guard_time = " << fmt_us(c.timing.guard_time) << '\n'
      << "preamble = " << fmt_us(c.timing.preamble) << '\n'
      << "transfer_rate = " << fmt(c.timing.transfer_rate) << '\n'
      << "cw_min = " << c.timing.cw_min << '\n';
  return out.str();
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_document(cfg)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace vanetmac
