#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ab3 {

enum class ErrorKind {
  kEncodingOverflow,
  kShapeMismatch,
  kScaleMismatch,
  kInvalidArgument,
  kTimeout,
  kHandshake,
  kFraming,
  kConnection,
  kProtocolDesync,
  kIntegrity,
  kDegenerateClass,
  kParse,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and tests)
// can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace ab3
