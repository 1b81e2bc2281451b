#pragma once

// CPTF field snapshots. Layout (little-endian, no padding):
//
//   offset  size  field
//        0     4  magic "CPTF"
//        4     4  version, u32 = 1
//        8     8  nx, u64
//       16     8  ny, u64
//       24     8  dx [cm], f64
//       32     8  dy [cm], f64
//       40     8  z [cm], f64
//       48     1  field id, u8 (1 = probe, 2 = control)
//       49        nx*ny samples of (re f64, im f64), row-major
//
// Decoding failures throw FormatError whose offset is the start of the
// offending header field, or 49 for a payload of the wrong length.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cptclone/grid.hpp"

namespace cptclone {

enum class FieldId : std::uint8_t { probe = 1, control = 2 };

inline constexpr std::uint32_t kFieldFileVersion = 1;
inline constexpr std::size_t kFieldHeaderSize = 49;

struct FieldRecord {
  ComplexField field;
  double z = 0.0;
  FieldId id = FieldId::probe;
};

std::vector<std::uint8_t> encode_field(const FieldRecord& record);
FieldRecord decode_field(std::span<const std::uint8_t> bytes);

void write_field(const std::filesystem::path& path, const FieldRecord& record);
FieldRecord read_field(const std::filesystem::path& path);

/// Whole-file helpers shared by the readers and writers.
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace cptclone
