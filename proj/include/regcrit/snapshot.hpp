#pragma once

#include <filesystem>
#include <string>

#include "regcrit/spectral_field.hpp"

namespace regcrit {

/// Physical-space velocity at one time, as stored on disk.
struct Snapshot {
  double time = 0.0;
  VelocityField u;
};

/// One text header line {"n":..,"length":..,"time":..,"components":"u1,u2,u3"}
/// followed by 3 n^3 little-endian doubles, component-major, x fastest.
std::string encode_snapshot(const VelocityField& u, double time);
Snapshot decode_snapshot(const std::string& bytes, const std::string& source = "<bytes>");

void write_snapshot(const std::filesystem::path& path, const VelocityField& u, double time);
Snapshot read_snapshot(const std::filesystem::path& path);

/// "snap_000100.bin" for step 100.
std::string snapshot_name(long step_index);

}  // namespace regcrit
