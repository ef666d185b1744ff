#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "incite/text.hpp"

namespace incite {

struct HeaderLess {
  bool operator()(const std::string& a, const std::string& b) const {
    return text::to_lower_ascii(a) < text::to_lower_ascii(b);
  }
};
using HeaderMap = std::map<std::string, std::string, HeaderLess>;

struct HttpRequest {
  std::string method;  // "GET" or "POST"
  std::string path;    // e.g. "/v1/search/query"
  std::vector<std::pair<std::string, std::string>> params;
  std::string body;
  HeaderMap headers;
};

struct HttpResponse {
  int status = 0;
  HeaderMap headers;
  std::string body;
};

/// Moves one request to the API. Implementations throw Error{Transport} when
/// no response could be obtained at all.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
  /// False for transports where repeating a failed request cannot help.
  virtual bool retryable() const { return true; }
};

/// Live HTTP(S) transport. `base_url` is scheme://host[:port][/prefix].
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::string base_url, int timeout_seconds = 20);
  HttpResponse send(const HttpRequest& request) override;

 private:
  std::string origin_;
  std::string prefix_;
  int timeout_seconds_;
};

/// Stable string identifying a request for fixture lookup: method, path and
/// the sorted query parameters (or the canonical JSON body for POST).
std::string canonical_request(const HttpRequest& request);

/// Fixture file name (without directory) for a request.
std::string fixture_name(const HttpRequest& request);

/// Serves responses recorded by RecordingTransport. Never touches the network.
class ReplayTransport final : public Transport {
 public:
  explicit ReplayTransport(std::filesystem::path dir);
  HttpResponse send(const HttpRequest& request) override;
  bool retryable() const override { return false; }

 private:
  std::filesystem::path dir_;
};

/// Forwards to another transport and stores every exchange as a fixture.
/// Request headers (and so the token) are never written.
class RecordingTransport final : public Transport {
 public:
  RecordingTransport(std::shared_ptr<Transport> inner, std::filesystem::path dir);
  HttpResponse send(const HttpRequest& request) override;
  bool retryable() const override { return inner_->retryable(); }

 private:
  std::shared_ptr<Transport> inner_;
  std::filesystem::path dir_;
  std::mutex write_mu_;
};

}  // namespace incite
