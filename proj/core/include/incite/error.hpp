#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace incite {

enum class ErrorKind {
  NotInCitation,
  EmptyCue,
  BadYear,
  AuthFailed,
  RateLimited,
  Transport,
  MalformedResponse,
  NotFound,
  NoAuthors,
  DuplicateKey,
  StaleFile,
  Io,
  NoBibTarget,
  EmptyResults,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `reset_at` is set only for
/// RateLimited (epoch seconds from the X-RateLimit-Reset header).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::int64_t> reset_at = std::nullopt)
      : std::runtime_error(message), kind_(kind), reset_at_(reset_at) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::int64_t> reset_at() const noexcept { return reset_at_; }

 private:
  ErrorKind kind_;
  std::optional<std::int64_t> reset_at_;
};

}  // namespace incite
