#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace samgs {

enum class ErrorKind {
  DimensionMismatch,
  InvalidArgument,
  ZeroNorm,
  NonFinite,
  ProblemUnavailable,
  Config,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-checkable kind in
/// addition to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace samgs
