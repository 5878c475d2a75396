#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ims {

enum class Errc {
  MalformedUri,
  EnumNotFound,
  UnknownPublicId,
  MalformedMessage,
  AlreadyCompressed,
  NotCompressed,
  InvalidDiameter,
  UnknownSubscriber,
  Barred,
  NoPcscfConfigured,
  AuthFailed,
  Timeout,
  NoEligibleScscf,
  UnknownToken,
  NotOwner,
  UnknownAs,
  UnmappableKind,
  UnsupportedCodec,
  UnknownConference,
  InvalidTransition,
  UnknownNode,
  TickBudgetExceeded,
  ParseError,
  UnresolvedReference,
};

std::string_view to_string(Errc code);

/// Error raised by every fallible operation in the core library. `line()` is
/// non-zero only for parse errors that can point at an input line.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, int line = 0)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        line_(line) {}

  Errc code() const noexcept { return code_; }
  int line() const noexcept { return line_; }

 private:
  Errc code_;
  int line_;
};

}  // namespace ims
