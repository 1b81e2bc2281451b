#include "cptclone/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "cptclone/error.hpp"

namespace cptclone {

namespace {

constexpr std::uint8_t kMagic[4] = {'C', 'P', 'T', 'F'};
constexpr std::uint64_t kMaxSide = std::uint64_t{1} << 24;

template <typename U>
void put(std::vector<std::uint8_t>& out, U value) {
  for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<std::uint8_t>(value >> (8 * b)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }

template <typename U>
U get(std::span<const std::uint8_t> bytes, std::size_t offset, const char* what) {
  if (bytes.size() < offset + sizeof(U))
    throw FormatError(offset, std::string("truncated header: missing ") + what);
  U value = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) value |= static_cast<U>(bytes[offset + b]) << (8 * b);
  return value;
}

double get_f64(std::span<const std::uint8_t> bytes, std::size_t offset, const char* what) {
  return std::bit_cast<double>(get<std::uint64_t>(bytes, offset, what));
}

}  // namespace

std::vector<std::uint8_t> encode_field(const FieldRecord& r) {
  const auto& g = r.field.grid;
  if (r.field.values.size() != g.size()) throw Error(Errc::invalid_argument, "field size does not match grid");
  if (r.id != FieldId::probe && r.id != FieldId::control) throw Error(Errc::invalid_argument, "bad field id");
  std::vector<std::uint8_t> out;
  out.reserve(kFieldHeaderSize + 16 * g.size());
  for (const auto byte : kMagic) out.push_back(byte);
  put(out, kFieldFileVersion);
  put(out, static_cast<std::uint64_t>(g.nx));
  put(out, static_cast<std::uint64_t>(g.ny));
  put_f64(out, g.dx);
  put_f64(out, g.dy);
  put_f64(out, r.z);
  out.push_back(static_cast<std::uint8_t>(r.id));
  for (const auto& v : r.field.values) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  return out;
}

FieldRecord decode_field(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError(0, "bad magic, expected \"CPTF\"");
  const auto version = get<std::uint32_t>(bytes, 4, "version");
  if (version != kFieldFileVersion) throw FormatError(4, "unsupported version " + std::to_string(version));

  auto side = [&](std::size_t offset, const char* what) {
    const auto n = get<std::uint64_t>(bytes, offset, what);
    if (n == 0 || n > kMaxSide || (n & (n - 1)) != 0)
      throw FormatError(offset, std::string(what) + " must be a power of two, got " + std::to_string(n));
    return static_cast<std::size_t>(n);
  };
  auto spacing = [&](std::size_t offset, const char* what) {
    const double d = get_f64(bytes, offset, what);
    if (!(d > 0.0) || !std::isfinite(d)) throw FormatError(offset, std::string(what) + " must be positive");
    return d;
  };

  FieldRecord r;
  TransverseGrid grid;
  grid.nx = side(8, "nx");
  grid.ny = side(16, "ny");
  grid.dx = spacing(24, "dx");
  grid.dy = spacing(32, "dy");
  r.z = get_f64(bytes, 40, "z");
  if (!std::isfinite(r.z)) throw FormatError(40, "z is not finite");
  const auto id = get<std::uint8_t>(bytes, 48, "field id");
  if (id != 1 && id != 2) throw FormatError(48, "field id must be 1 or 2, got " + std::to_string(id));
  r.id = static_cast<FieldId>(id);

  const std::size_t expected = 16 * grid.size();
  if (bytes.size() - kFieldHeaderSize != expected)
    throw FormatError(kFieldHeaderSize, "payload length mismatch: expected " + std::to_string(expected) +
                                            " bytes, found " + std::to_string(bytes.size() - kFieldHeaderSize));
  r.field = ComplexField(grid);
  std::size_t at = kFieldHeaderSize;
  for (auto& v : r.field.values) {
    const double re = get_f64(bytes, at, "sample");
    const double im = get_f64(bytes, at + 8, "sample");
    v = {re, im};
    at += 16;
  }
  return r;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::io, "read failed for '" + path.string() + "'");
  return bytes;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(Errc::io, "write failed for '" + path.string() + "'");
}

void write_field(const std::filesystem::path& path, const FieldRecord& record) {
  write_bytes(path, encode_field(record));
}

FieldRecord read_field(const std::filesystem::path& path) { return decode_field(read_bytes(path)); }

}  // namespace cptclone
