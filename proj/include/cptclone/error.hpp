#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cptclone {

enum class Errc {
  invalid_argument,
  no_field,
  non_unique_steady_state,
  non_finite,
  parse,
  io,
  format,
  not_localized,
  zero_power,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Configuration error tied to a line of the source text (1-based, 0 = none).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& key, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

/// Malformed binary file; offset is the byte position where decoding failed.
class FormatError : public Error {
 public:
  FormatError(std::uint64_t offset, const std::string& message);
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace cptclone
