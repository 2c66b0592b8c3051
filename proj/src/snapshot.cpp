#include "regcrit/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "regcrit/config.hpp"
#include "regcrit/errors.hpp"

namespace regcrit {
namespace {

void put_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) {
    out.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

double get_le(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(p[b]);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string encode_snapshot(const VelocityField& u, double time) {
  const Grid& grid = u.grid();
  // Built by hand so the decimal fields keep all 17 digits.
  std::string out = "{\"n\":" + std::to_string(grid.n()) +
                    ",\"length\":" + format_double(grid.length()) +
                    ",\"time\":" + format_double(time) + ",\"components\":\"u1,u2,u3\"}\n";
  out.reserve(out.size() + 3 * grid.size() * 8);
  for (const auto& c : u.components()) {
    for (double v : c.values()) put_le(out, v);
  }
  return out;
}

Snapshot decode_snapshot(const std::string& bytes, const std::string& source) {
  const auto newline = bytes.find('\n');
  if (newline == std::string::npos) throw Error(source + ": snapshot header missing");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, newline));
  } catch (const nlohmann::json::exception& e) {
    throw Error(source + ": bad snapshot header: " + e.what());
  }
  int n = 0;
  double length = 0.0;
  double time = 0.0;
  try {
    n = header.at("n").get<int>();
    length = header.at("length").get<double>();
    time = header.at("time").get<double>();
    if (header.at("components").get<std::string>() != "u1,u2,u3") {
      throw Error(source + ": unexpected components field");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(source + ": bad snapshot header: " + e.what());
  }
  const Grid grid(n, length);
  const std::size_t count = grid.size();
  if (bytes.size() - newline - 1 != 3 * count * 8) {
    throw Error(source + ": snapshot payload has wrong size");
  }
  const char* p = bytes.data() + newline + 1;
  std::array<std::vector<double>, 3> comps;
  for (auto& c : comps) {
    c.resize(count);
    for (auto& v : c) {
      v = get_le(p);
      p += 8;
    }
  }
  return Snapshot{time, VelocityField(grid, std::move(comps[0]), std::move(comps[1]),
                                      std::move(comps[2]))};
}

void write_snapshot(const std::filesystem::path& path, const VelocityField& u, double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write snapshot '" + path.string() + "'");
  const auto bytes = encode_snapshot(u, time);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to '" + path.string() + "'");
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return decode_snapshot(buffer.str(), path.string());
}

std::string snapshot_name(long step_index) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "snap_%06ld.bin", step_index);
  return buffer;
}

}  // namespace regcrit
