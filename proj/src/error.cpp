#include "cptclone/error.hpp"

namespace cptclone {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::no_field: return "no field";
    case Errc::non_unique_steady_state: return "non-unique steady state";
    case Errc::non_finite: return "non-finite value";
    case Errc::parse: return "parse error";
    case Errc::io: return "i/o error";
    case Errc::format: return "format error";
    case Errc::not_localized: return "beam not localized";
    case Errc::zero_power: return "zero power";
  }
  return "unknown error";
}

namespace {

std::string located(std::size_t line, const std::string& message) {
  return line ? "line " + std::to_string(line) + ": " + message : message;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& key, const std::string& message)
    : Error(Errc::parse, located(line, message)), line_(line), key_(key) {}

FormatError::FormatError(std::uint64_t offset, const std::string& message)
    : Error(Errc::format, message + " (byte offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

}  // namespace cptclone
