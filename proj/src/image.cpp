#include "cptclone/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "cptclone/error.hpp"

namespace cptclone {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1ull << 32)) throw FormatError(start, std::string("PGM ") + what + " too large");
      ++pos_;
    }
    if (pos_ == start) throw FormatError(start, std::string("PGM header: expected ") + what);
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }
  bool at_space() const { return pos_ < bytes_.size() && std::isspace(bytes_[pos_]); }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw FormatError(0, "not a binary PGM (missing P5 magic)");
  HeaderReader header(bytes);
  GrayImage image;
  image.width = header.read_uint("width");
  image.height = header.read_uint("height");
  const auto maxval_offset = header.pos();
  const auto maxval = header.read_uint("maxval");
  if (maxval == 0 || maxval > 65535) throw FormatError(maxval_offset, "PGM maxval out of range");
  image.maxval = static_cast<std::uint32_t>(maxval);
  if (!header.at_space()) throw FormatError(header.pos(), "PGM header: missing separator");
  header.advance();
  if (image.width == 0 || image.height == 0) throw FormatError(3, "PGM image is empty");

  const std::size_t bytes_per_sample = maxval < 256 ? 1 : 2;
  const std::size_t count = image.width * image.height;
  const std::size_t offset = header.pos();
  if (bytes.size() - offset < count * bytes_per_sample)
    throw FormatError(bytes.size(), "PGM raster truncated");
  image.pixels.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (bytes_per_sample == 1) {
      image.pixels[k] = bytes[offset + k];
    } else {
      image.pixels[k] = static_cast<std::uint16_t>((bytes[offset + 2 * k] << 8) |
                                                   bytes[offset + 2 * k + 1]);
    }
    if (image.pixels[k] > maxval)
      throw FormatError(offset + k * bytes_per_sample, "PGM sample exceeds maxval");
  }
  return image;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open image '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_pgm(bytes);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n" + std::to_string(image.maxval) +
                             "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const bool wide = image.maxval >= 256;
  out.reserve(out.size() + image.pixels.size() * (wide ? 2 : 1));
  for (auto p : image.pixels) {
    if (wide) out.push_back(static_cast<std::uint8_t>(p >> 8));
    out.push_back(static_cast<std::uint8_t>(p & 0xff));
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  const auto bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io, "write failed for '" + path.string() + "'");
}

}  // namespace cptclone
