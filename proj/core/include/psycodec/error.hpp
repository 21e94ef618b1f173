#pragma once

#include <stdexcept>
#include <string>

namespace psycodec {

/// Broad error classes. The CLI maps each to a distinct exit code.
enum class ErrorKind {
  InvalidArgument = 1,
  Numerical,
  Format,
  Io,
  Protocol,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Container parse failures are distinguished further so callers can tell
/// a truncated file from a corrupted one.
class FormatError : public Error {
 public:
  enum class Reason { BadMagic, UnknownVersion, Truncated, CrcMismatch, Malformed, Unsupported };

  FormatError(Reason reason, const std::string& what)
      : Error(ErrorKind::Format, what), reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace psycodec
