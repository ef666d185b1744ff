#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "incite/error.hpp"
#include "incite/resolver.hpp"

namespace incite {

namespace rpc {
inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;
inline constexpr int kInternalError = -32603;
inline constexpr int kNotInCitation = -32001;
inline constexpr int kAuthFailed = -32002;
inline constexpr int kRateLimited = -32003;
inline constexpr int kEmptyResults = -32004;
inline constexpr int kStaleFile = -32005;
inline constexpr int kNoBibTarget = -32006;
inline constexpr int kNotFound = -32007;
inline constexpr int kTransport = -32008;
inline constexpr int kIo = -32009;

int error_code(ErrorKind kind);
}  // namespace rpc

/// Line-delimited JSON-RPC 2.0 over a pair of streams. Requests are
/// handled strictly in arrival order; each carries the full document text,
/// so no state survives between requests except the engine config.
///
/// Methods: overcite/resolve, overcite/select, overcite/scan, overcite/config.
class Session {
 public:
  explicit Session(Engine& engine);

  /// Response for one decoded message (or batch); nullopt for notifications.
  std::optional<nlohmann::json> handle(const nlohmann::json& message);

  /// Decodes one frame; malformed JSON yields a -32700 response.
  std::optional<std::string> handle_line(std::string_view line);

  /// Runs until end of input.
  void serve(std::istream& in, std::ostream& out);

 private:
  nlohmann::json handle_one(const nlohmann::json& message, bool& is_notification);
  nlohmann::json dispatch(const std::string& method, const nlohmann::json& params);
  nlohmann::json resolve(const nlohmann::json& params);
  nlohmann::json select(const nlohmann::json& params);
  nlohmann::json scan(const nlohmann::json& params);
  nlohmann::json configure(const nlohmann::json& params);

  Engine& engine_;
};

}  // namespace incite
