#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "almcluster/scenario.hpp"
#include "almcluster/serial.hpp"

namespace almcluster {

/// Writes a file atomically: the content lands in a sibling temp file that
/// is renamed over the target only once fully written.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

inline constexpr char kScenarioMagic[4] = {'S', 'C', 'E', 'N'};
inline constexpr std::uint32_t kScenarioFormatVersion = 1;

/// Flat binary layout: magic "SCEN", format version, N, T, K, seed, then
/// N*T*K little-endian doubles in [scenario][period][indicator] order.
inline std::vector<std::uint8_t> encode_scenarios(const ScenarioSet& set) {
  std::vector<std::uint8_t> out;
  out.reserve(32 + set.data.size() * 8);
  for (char c : kScenarioMagic) out.push_back(static_cast<std::uint8_t>(c));
  serial::put_u32(out, kScenarioFormatVersion);
  serial::put_u64(out, set.count);
  serial::put_u64(out, set.period_count);
  serial::put_u64(out, set.indicator_count);
  serial::put_u64(out, set.seed);
  for (double v : set.data) serial::put_f64(out, v);
  return out;
}

/// Digest over the scenario payload (header fields + data bits); what
/// `generate` prints and what a reload must reproduce.
inline std::uint64_t data_digest(const ScenarioSet& set) {
  serial::Fnv1a h;
  h.update_u64(set.count);
  h.update_u64(set.period_count);
  h.update_u64(set.indicator_count);
  h.update_u64(set.seed);
  for (double v : set.data) h.update_f64(v);
  return h.digest();
}

inline ScenarioSet decode_scenarios(std::span<const std::uint8_t> bytes) {
  serial::Reader r(bytes);
  auto magic = r.raw(4);
  for (int i = 0; i < 4; ++i)
    if (magic[i] != static_cast<std::uint8_t>(kScenarioMagic[i]))
      throw IoError("not a scenario file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kScenarioFormatVersion)
    throw IoError("unsupported scenario file version " + std::to_string(version));
  ScenarioSet set;
  set.count = r.u64();
  set.period_count = static_cast<std::uint32_t>(r.u64());
  set.indicator_count = static_cast<std::uint32_t>(r.u64());
  set.seed = r.u64();
  const std::uint64_t n = set.count * set.period_count * set.indicator_count;
  if (r.remaining() != n * 8) throw IoError("scenario file truncated or oversized");
  set.data.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) set.data.push_back(r.f64());
  set.config_digest = data_digest(set);
  return set;
}

inline void save_scenarios(const ScenarioSet& set, const std::string& path) {
  auto bytes = encode_scenarios(set);
  write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

inline ScenarioSet load_scenarios(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_scenarios(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(content.data()), content.size()));
}

/// Human-readable dump: one row per (scenario, period) with indicator columns.
inline std::string scenarios_csv(const ScenarioSet& set) {
  std::ostringstream out;
  out.precision(17);
  out << "scenario,period";
  for (std::uint32_t k = 0; k < set.indicator_count; ++k) out << ",indicator" << k;
  out << "\n";
  for (std::uint64_t n = 0; n < set.count; ++n) {
    const auto view = set.scenario(n);
    for (std::uint32_t t = 0; t < set.period_count; ++t) {
      out << (set.first_index + n) << "," << t;
      for (std::uint32_t k = 0; k < set.indicator_count; ++k) out << "," << view.level(t, k);
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace almcluster
