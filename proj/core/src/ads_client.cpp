#include "incite/ads_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "incite/error.hpp"

namespace incite {

using nlohmann::json;

namespace {

std::optional<std::string> optional_string(const json& doc, const char* field) {
  const auto it = doc.find(field);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (it->is_array()) {
    if (it->empty() || !it->front().is_string()) return std::nullopt;
    return it->front().get<std::string>();
  }
  if (it->is_string()) return it->get<std::string>();
  return std::nullopt;
}

std::optional<std::int64_t> header_int(const HttpResponse& r, const char* name) {
  const auto it = r.headers.find(name);
  if (it == r.headers.end()) return std::nullopt;
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(it->second, &used);
    if (used != text::trim(it->second).size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string server_message(const HttpResponse& r) {
  try {
    const json body = json::parse(r.body);
    for (const char* field : {"error", "msg", "message"}) {
      if (body.contains(field) && body[field].is_string()) return body[field].get<std::string>();
    }
  } catch (const json::exception&) {
  }
  return "HTTP " + std::to_string(r.status);
}

std::string url_encode_ampersand(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') {
      out += "%26";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

AdsRecord record_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::MalformedResponse, "record is not a JSON object");
  AdsRecord rec;
  const auto bibcode = optional_string(doc, "bibcode");
  if (!bibcode || bibcode->empty()) {
    throw Error(ErrorKind::MalformedResponse, "record without bibcode");
  }
  rec.bibcode = *bibcode;
  rec.title = optional_string(doc, "title").value_or("");
  if (auto it = doc.find("author"); it != doc.end() && it->is_array()) {
    for (const auto& a : *it) {
      if (a.is_string()) rec.authors.push_back(a.get<std::string>());
    }
  }
  if (auto it = doc.find("year"); it != doc.end()) {
    if (it->is_number_integer()) {
      rec.year = it->get<int>();
    } else if (it->is_string()) {
      try {
        rec.year = std::stoi(it->get<std::string>());
      } catch (const std::exception&) {
        rec.year = 0;
      }
    }
  }
  if (auto it = doc.find("citation_count"); it != doc.end() && it->is_number_integer()) {
    rec.citation_count = std::max<std::int64_t>(0, it->get<std::int64_t>());
  }
  rec.abstract = optional_string(doc, "abstract");
  rec.pub = optional_string(doc, "pub");
  rec.doi = optional_string(doc, "doi");
  return rec;
}

json record_to_ads_doc(const AdsRecord& r) {
  json doc = {{"bibcode", r.bibcode},
              {"title", json::array({r.title})},
              {"author", r.authors},
              {"year", std::to_string(r.year)},
              {"citation_count", r.citation_count}};
  if (r.abstract) doc["abstract"] = *r.abstract;
  if (r.pub) doc["pub"] = *r.pub;
  if (r.doi) doc["doi"] = json::array({*r.doi});
  return doc;
}

AdsClient::AdsClient(std::shared_ptr<Transport> transport, std::string token,
                     ClientOptions options)
    : transport_(std::move(transport)), token_(std::move(token)), options_(std::move(options)) {
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (!options_.warn) {
    options_.warn = [](const std::string& msg) { std::cerr << "incite: warning: " << msg << '\n'; };
  }
}

std::optional<RateBudget> AdsClient::budget() const {
  std::lock_guard lock(budget_mu_);
  return budget_;
}

void AdsClient::update_budget(const HttpResponse& response) {
  const auto limit = header_int(response, "X-RateLimit-Limit");
  const auto remaining = header_int(response, "X-RateLimit-Remaining");
  const auto reset = header_int(response, "X-RateLimit-Reset");
  if (!limit || !remaining || !reset) return;

  RateBudget next{*limit, std::clamp<std::int64_t>(*remaining, 0, *limit), *reset};
  std::optional<std::int64_t> warn_at;
  {
    std::lock_guard lock(budget_mu_);
    if (budget_ && budget_->reset_at == next.reset_at) {
      next.remaining = std::min(next.remaining, budget_->remaining);
    }
    budget_ = next;
    if (next.remaining < options_.warn_below) warn_at = next.remaining;
  }
  if (warn_at) {
    options_.warn("ADS request budget low: " + std::to_string(*warn_at) + " of " +
                  std::to_string(next.limit) + " requests left until reset");
  }
}

HttpResponse AdsClient::send(HttpRequest request) {
  if (token_.empty()) throw Error(ErrorKind::AuthFailed, "no ADS API token configured");
  request.headers["Authorization"] = "Bearer " + token_;

  const int attempts = transport_->retryable() ? options_.max_retries + 1 : 1;
  std::string last_failure;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) options_.sleep(options_.backoff * (1 << (attempt - 1)));
    HttpResponse response;
    {
      in_flight_.acquire();
      try {
        response = transport_->send(request);
      } catch (const Error& e) {
        in_flight_.release();
        if (e.kind() != ErrorKind::Transport) throw;
        last_failure = e.what();
        continue;
      } catch (...) {
        in_flight_.release();
        throw;
      }
      in_flight_.release();
    }
    update_budget(response);
    if (response.status == 401 || response.status == 403) {
      throw Error(ErrorKind::AuthFailed, "ADS rejected the API token (" + server_message(response) + ")");
    }
    if (response.status == 429) {
      const auto reset = header_int(response, "X-RateLimit-Reset");
      {
        std::lock_guard lock(budget_mu_);
        if (budget_) budget_->remaining = 0;
      }
      throw Error(ErrorKind::RateLimited, "ADS rate limit exhausted", reset.value_or(0));
    }
    if (response.status >= 500) {
      last_failure = server_message(response);
      continue;
    }
    return response;
  }
  throw Error(ErrorKind::Transport, "request to " + request.path + " failed: " + last_failure);
}

SearchResult AdsClient::search(const AdsQuery& query) {
  if (query.rows < 1 || query.rows > kMaxRows) {
    throw Error(ErrorKind::InvalidArgument, "rows must be in [1, 200]");
  }
  std::string fl;
  for (const auto& f : query.fields) {
    if (!fl.empty()) fl += ',';
    fl += f;
  }
  HttpRequest req;
  req.method = "GET";
  req.path = "/v1/search/query";
  req.params = {{"q", query.q},
                {"fl", fl},
                {"rows", std::to_string(query.rows)},
                {"sort", std::string(to_string(query.sort))}};

  const HttpResponse response = send(std::move(req));
  if (response.status == 400) {
    throw Error(ErrorKind::InvalidArgument, "ADS rejected the query: " + server_message(response));
  }
  if (response.status != 200) {
    throw Error(ErrorKind::MalformedResponse, "unexpected search status " + std::to_string(response.status));
  }

  SearchResult result;
  try {
    const json body = json::parse(response.body);
    const json& docs = body.at("response").at("docs");
    if (!docs.is_array()) throw Error(ErrorKind::MalformedResponse, "response.docs is not an array");
    for (const auto& doc : docs) {
      AdsRecord rec = record_from_json(doc);
      const bool seen = std::any_of(result.records.begin(), result.records.end(),
                                    [&](const AdsRecord& r) { return r.bibcode == rec.bibcode; });
      if (!seen) result.records.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedResponse, std::string("unparseable search response: ") + e.what());
  }
  result.budget = budget();
  return result;
}

std::string AdsClient::export_bibtex(std::span<const std::string> bibcodes) {
  if (bibcodes.empty() || bibcodes.size() > kMaxExportBibcodes) {
    throw Error(ErrorKind::InvalidArgument, "export needs between 1 and 100 bibcodes");
  }
  HttpRequest req;
  req.method = "POST";
  req.path = "/v1/export/bibtex";
  req.headers["Content-Type"] = "application/json";
  req.body = json{{"bibcode", std::vector<std::string>(bibcodes.begin(), bibcodes.end())}}.dump();

  const HttpResponse response = send(std::move(req));
  if (response.status == 404) {
    std::string names;
    for (const auto& b : bibcodes) names += (names.empty() ? "" : ", ") + b;
    throw Error(ErrorKind::NotFound, "unknown bibcode(s): " + names);
  }
  if (response.status != 200) {
    throw Error(ErrorKind::MalformedResponse, "unexpected export status " + std::to_string(response.status));
  }
  std::string exported;
  try {
    exported = json::parse(response.body).at("export").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedResponse, std::string("unparseable export response: ") + e.what());
  }
  std::string missing;
  for (const auto& b : bibcodes) {
    if (exported.find(b) == std::string::npos &&
        exported.find(url_encode_ampersand(b)) == std::string::npos) {
      missing += (missing.empty() ? "" : ", ") + b;
    }
  }
  if (!missing.empty()) throw Error(ErrorKind::NotFound, "unknown bibcode(s): " + missing);
  return exported;
}

std::optional<std::string> resolve_token(const std::optional<std::string>& explicit_token) {
  if (explicit_token && !explicit_token->empty()) return explicit_token;
  if (const char* env = std::getenv(kTokenEnvVar); env != nullptr && *env != '\0') {
    return std::string(env);
  }
  return std::nullopt;
}

}  // namespace incite
