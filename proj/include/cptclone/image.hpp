#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cptclone {

/// Single-channel raster, row-major, row 0 at the top.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint32_t maxval = 255;
  std::vector<std::uint16_t> pixels;

  std::uint16_t at(std::size_t col, std::size_t row) const { return pixels[row * width + col]; }
};

/// Binary PGM (P5), 8- or 16-bit samples (16-bit is big-endian).
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

}  // namespace cptclone
