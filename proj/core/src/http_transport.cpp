#include <httplib.h>

#include "incite/error.hpp"
#include "incite/transport.hpp"

namespace incite {

HttpTransport::HttpTransport(std::string base_url, int timeout_seconds)
    : timeout_seconds_(timeout_seconds) {
  const std::size_t scheme = base_url.find("://");
  const std::size_t path_start =
      base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) {
    origin_ = std::move(base_url);
  } else {
    origin_ = base_url.substr(0, path_start);
    prefix_ = base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
}

HttpResponse HttpTransport::send(const HttpRequest& request) {
  httplib::Client client(origin_);
  if (!client.is_valid()) {
    throw Error(ErrorKind::Transport, "unsupported API base URL '" + origin_ + "'");
  }
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);

  httplib::Headers headers;
  for (const auto& [name, value] : request.headers) headers.emplace(name, value);

  const std::string path = prefix_ + request.path;
  httplib::Result result;
  if (request.method == "GET") {
    httplib::Params params;
    for (const auto& [name, value] : request.params) params.emplace(name, value);
    result = client.Get(path, params, headers);
  } else if (request.method == "POST") {
    const auto ct = request.headers.find("Content-Type");
    result = client.Post(path, headers, request.body,
                         ct == request.headers.end() ? "application/json" : ct->second);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unsupported HTTP method " + request.method);
  }
  if (!result) {
    throw Error(ErrorKind::Transport, "HTTP request failed: " + httplib::to_string(result.error()));
  }
  HttpResponse out;
  out.status = result->status;
  out.body = result->body;
  for (const auto& [name, value] : result->headers) out.headers[name] = value;
  return out;
}

}  // namespace incite
