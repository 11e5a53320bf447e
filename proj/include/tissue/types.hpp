#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tissue {

/// Virtual or wall-clock time in microseconds since session start.
using Micros = std::int64_t;

/// A syscall number; the antigen value carried through the tissue.
using Syscall = std::int32_t;

using CellId = std::uint32_t;
using ChannelId = std::uint32_t;

inline constexpr Micros kMicrosPerSecond = 1'000'000;

/// Raised for malformed text input (parameter files, traces, run logs).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Raised when a value is well-formed but violates a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace tissue
