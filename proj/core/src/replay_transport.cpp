#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "incite/error.hpp"
#include "incite/transport.hpp"

namespace incite {

using nlohmann::json;

namespace {

// Rate headers are the only response headers worth keeping in a fixture.
constexpr const char* kKeptHeaders[] = {"Content-Type", "X-RateLimit-Limit",
                                        "X-RateLimit-Remaining", "X-RateLimit-Reset"};

std::string canonical_params(const HttpRequest& request) {
  auto params = request.params;
  std::sort(params.begin(), params.end());
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += '&';
    out += k + '=' + v;
  }
  return out;
}

std::string canonical_body(const std::string& body) {
  try {
    return json::parse(body).dump();
  } catch (const json::exception&) {
    return body;
  }
}

}  // namespace

std::string canonical_request(const HttpRequest& request) {
  std::string out = request.method + ' ' + request.path + '?' + canonical_params(request);
  if (!request.body.empty()) out += '\n' + canonical_body(request.body);
  return out;
}

std::string fixture_name(const HttpRequest& request) {
  return text::fnv1a_hex(canonical_request(request)) + ".json";
}

ReplayTransport::ReplayTransport(std::filesystem::path dir) : dir_(std::move(dir)) {}

HttpResponse ReplayTransport::send(const HttpRequest& request) {
  const auto path = dir_ / fixture_name(request);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Transport,
                "no replay fixture for " + canonical_request(request) + " (" + path.string() + ")");
  }
  try {
    const json fixture = json::parse(in);
    const json& r = fixture.at("response");
    HttpResponse out;
    out.status = r.at("status").get<int>();
    if (r.contains("headers")) {
      for (const auto& [k, v] : r["headers"].items()) out.headers[k] = v.get<std::string>();
    }
    const json& body = r.at("body");
    out.body = body.is_string() ? body.get<std::string>() : body.dump();
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Transport, "corrupt replay fixture " + path.string() + ": " + e.what());
  }
}

RecordingTransport::RecordingTransport(std::shared_ptr<Transport> inner, std::filesystem::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

HttpResponse RecordingTransport::send(const HttpRequest& request) {
  HttpResponse response = inner_->send(request);

  json headers = json::object();
  for (const char* name : kKeptHeaders) {
    if (auto it = response.headers.find(name); it != response.headers.end()) {
      headers[name] = it->second;
    }
  }
  json body;
  try {
    body = json::parse(response.body);
  } catch (const json::exception&) {
    body = response.body;
  }
  json request_json = {{"method", request.method}, {"path", request.path},
                       {"query", canonical_params(request)}};
  if (!request.body.empty()) request_json["body"] = canonical_body(request.body);
  const json fixture = {
      {"request", request_json},
      {"response", {{"status", response.status}, {"headers", headers}, {"body", body}}}};

  std::lock_guard lock(write_mu_);
  std::filesystem::create_directories(dir_);
  std::ofstream out(dir_ / fixture_name(request), std::ios::binary | std::ios::trunc);
  out << fixture.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "cannot write fixture in " + dir_.string());
  return response;
}

}  // namespace incite
