#include "incite/mock_server.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "incite/error.hpp"
#include "incite/text.hpp"

namespace incite {

using nlohmann::json;

namespace {

struct Clause {
  std::string field;  // empty for a bare term
  std::string value;  // quotes stripped
};

[[noreturn]] void unsupported(const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, "unsupported query syntax: " + what);
}

std::vector<Clause> parse_clauses(std::string_view q) {
  std::vector<Clause> clauses;
  std::size_t i = 0;
  while (i < q.size()) {
    while (i < q.size() && text::is_ascii_space(q[i])) ++i;
    if (i >= q.size()) break;
    const std::size_t start = i;
    bool in_quote = false;
    int bracket = 0;
    while (i < q.size()) {
      const char c = q[i];
      if (c == '\\' && in_quote && i + 1 < q.size()) {
        i += 2;
        continue;
      }
      if (c == '"') in_quote = !in_quote;
      if (!in_quote && c == '[') ++bracket;
      if (!in_quote && c == ']') --bracket;
      if (!in_quote && bracket == 0 && text::is_ascii_space(c)) break;
      ++i;
    }
    if (in_quote || bracket != 0) unsupported("unbalanced quote or bracket");
    const std::string_view token = q.substr(start, i - start);
    if (token == "AND") continue;
    if (token == "OR" || token == "NOT") unsupported(std::string(token));

    Clause clause;
    const std::size_t colon = token.find(':');
    const std::size_t quote = token.find('"');
    std::string_view value = token;
    if (colon != std::string_view::npos && (quote == std::string_view::npos || colon < quote)) {
      clause.field = text::to_lower_ascii(token.substr(0, colon));
      value = token.substr(colon + 1);
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      std::string unescaped;
      for (std::size_t k = 1; k + 1 < value.size(); ++k) {
        if (value[k] == '\\' && k + 2 < value.size()) ++k;
        unescaped.push_back(value[k]);
      }
      clause.value = std::move(unescaped);
    } else {
      clause.value = std::string(value);
    }
    clauses.push_back(std::move(clause));
  }
  return clauses;
}

bool author_matches(const std::vector<std::string>& authors, std::string_view query) {
  bool first_only = false;
  if (!query.empty() && query.front() == '^') {
    first_only = true;
    query.remove_prefix(1);
  }
  const std::size_t qcomma = query.find(',');
  const std::string qlast = text::fold_for_match(text::trim(query.substr(0, qcomma)));
  const std::string qfirst =
      qcomma == std::string_view::npos ? "" : text::fold_for_match(text::trim(query.substr(qcomma + 1)));
  const std::size_t n = first_only ? std::min<std::size_t>(1, authors.size()) : authors.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string_view a = authors[i];
    const std::size_t comma = a.find(',');
    if (text::fold_for_match(text::trim(a.substr(0, comma))) != qlast) continue;
    if (qfirst.empty()) return true;
    const std::string first =
        comma == std::string_view::npos ? "" : text::fold_for_match(text::trim(a.substr(comma + 1)));
    if (first.starts_with(qfirst)) return true;
  }
  return false;
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    unsupported("'" + s + "' is not a year");
  }
  if (used != s.size()) unsupported("'" + s + "' is not a year");
  return v;
}

bool year_matches(int year, const std::string& value) {
  if (!value.empty() && value.front() == '[') {
    const std::size_t to = value.find(" TO ");
    if (to == std::string::npos || value.back() != ']') unsupported("year range " + value);
    const int lo = parse_int(std::string(text::trim(std::string_view(value).substr(1, to - 1))));
    const int hi = parse_int(std::string(text::trim(
        std::string_view(value).substr(to + 4, value.size() - to - 5))));
    return year >= lo && year <= hi;
  }
  return year == parse_int(value);
}

std::string searchable(const AdsRecord& r) {
  std::string s = r.title;
  if (r.abstract) s += ' ' + *r.abstract;
  return text::fold_for_match(s);
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
  if (needle.empty()) return 0;
  std::size_t n = 0;
  for (std::size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + needle.size())) ++n;
  return n;
}

json filter_fields(json doc, const std::string& fl) {
  if (fl.empty()) return doc;
  std::vector<std::string> wanted;
  std::stringstream ss(fl);
  for (std::string f; std::getline(ss, f, ',');) wanted.emplace_back(text::trim(f));
  json out = json::object();
  for (const auto& f : wanted) {
    if (doc.contains(f)) out[f] = doc[f];
  }
  return out;
}

}  // namespace

std::vector<CorpusEntry> parse_corpus(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("corpus is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, "corpus must be a JSON array");
  std::vector<CorpusEntry> corpus;
  for (const auto& item : j) {
    CorpusEntry entry;
    try {
      entry.record = record_from_json(item);
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidArgument, std::string("corpus record: ") + e.what());
    }
    if (item.contains("bibtex") && item["bibtex"].is_string()) entry.bibtex = item["bibtex"].get<std::string>();
    const bool dup = std::any_of(corpus.begin(), corpus.end(), [&](const CorpusEntry& c) {
      return c.record.bibcode == entry.record.bibcode;
    });
    if (dup) throw Error(ErrorKind::InvalidArgument, "duplicate bibcode in corpus: " + entry.record.bibcode);
    corpus.push_back(std::move(entry));
  }
  return corpus;
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read corpus " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str());
}

MockQueryResult evaluate_query(const std::vector<CorpusEntry>& corpus, std::string_view q,
                               SortOrder sort, int rows) {
  const auto clauses = parse_clauses(q);
  if (clauses.empty()) unsupported("empty query");

  struct Hit {
    const AdsRecord* record;
    std::size_t relevance;
  };
  std::vector<Hit> hits;
  for (const auto& entry : corpus) {
    const AdsRecord& r = entry.record;
    const std::string hay = searchable(r);
    std::size_t relevance = 0;
    bool ok = true;
    for (const auto& c : clauses) {
      if (c.field.empty() || c.field == "title" || c.field == "abstract") {
        const std::string needle = text::fold_for_match(c.value);
        std::string scope = hay;
        if (c.field == "title") scope = text::fold_for_match(r.title);
        if (c.field == "abstract") scope = text::fold_for_match(r.abstract.value_or(""));
        const std::size_t n = count_occurrences(scope, needle);
        ok = n > 0;
        relevance += n;
      } else if (c.field == "author") {
        ok = author_matches(r.authors, c.value);
      } else if (c.field == "year") {
        ok = year_matches(r.year, c.value);
      } else if (c.field == "bibcode") {
        ok = r.bibcode == c.value;
      } else if (c.field == "doi") {
        ok = r.doi && text::iequals_ascii(*r.doi, c.value);
      } else {
        unsupported("field '" + c.field + "'");
      }
      if (!ok) break;
    }
    if (ok) hits.push_back({&r, relevance});
  }

  std::stable_sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
    if (sort == SortOrder::Relevance && a.relevance != b.relevance) return a.relevance > b.relevance;
    if (a.record->citation_count != b.record->citation_count) {
      return a.record->citation_count > b.record->citation_count;
    }
    return a.record->bibcode < b.record->bibcode;
  });

  MockQueryResult result;
  result.num_found = hits.size();
  for (std::size_t i = 0; i < hits.size() && i < static_cast<std::size_t>(std::max(rows, 0)); ++i) {
    result.records.push_back(*hits[i].record);
  }
  return result;
}

MockScixServer::MockScixServer(std::vector<CorpusEntry> corpus, MockOptions options)
    : corpus_(std::move(corpus)), options_(std::move(options)), remaining_(options_.limit) {
  if (options_.reset_at == 0) {
    using namespace std::chrono;
    options_.reset_at = duration_cast<seconds>(system_clock::now().time_since_epoch()).count() + 86400;
  }
}

MockScixServer::~MockScixServer() { stop(); }

std::int64_t MockScixServer::remaining() const {
  std::lock_guard lock(budget_mu_);
  return remaining_;
}

std::string MockScixServer::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

void MockScixServer::install_routes() {
  server_ = std::make_unique<httplib::Server>();
  server_->new_task_queue = [] { return new httplib::ThreadPool(1); };

  // Authenticates, charges one request and stamps the rate headers. Returns
  // false when the response has already been filled in.
  auto admit = [this](const httplib::Request& req, httplib::Response& res) {
    ++served_;
    const std::string auth = req.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    const bool has_token = auth.size() > prefix.size() && auth.compare(0, prefix.size(), prefix) == 0;
    if (!has_token || (options_.token && auth.substr(prefix.size()) != *options_.token)) {
      res.status = 401;
      res.set_content(R"({"error":"Unauthorized"})", "application/json");
      return false;
    }
    std::int64_t left = 0;
    bool exhausted = false;
    {
      std::lock_guard lock(budget_mu_);
      if (remaining_ <= 0) {
        exhausted = true;
      } else {
        --remaining_;
      }
      left = remaining_;
    }
    res.set_header("X-RateLimit-Limit", std::to_string(options_.limit));
    res.set_header("X-RateLimit-Remaining", std::to_string(left));
    res.set_header("X-RateLimit-Reset", std::to_string(options_.reset_at));
    if (exhausted) {
      res.status = 429;
      res.set_content(R"({"error":"Too many requests"})", "application/json");
      return false;
    }
    return true;
  };

  server_->Get("/v1/search/query", [this, admit](const httplib::Request& req, httplib::Response& res) {
    if (!admit(req, res)) return;
    const std::string q = req.get_param_value("q");
    const auto sort = parse_sort_order(req.get_param_value("sort"));
    int rows = 10;
    if (req.has_param("rows")) {
      try {
        rows = std::stoi(req.get_param_value("rows"));
      } catch (const std::exception&) {
        rows = -1;
      }
    }
    if (!sort || rows < 0 || rows > 2000) {
      res.status = 400;
      res.set_content(R"({"error":"bad sort or rows"})", "application/json");
      return;
    }
    try {
      const auto result = evaluate_query(corpus_, q, *sort, rows);
      json docs = json::array();
      for (const auto& r : result.records) {
        docs.push_back(filter_fields(record_to_ads_doc(r), req.get_param_value("fl")));
      }
      const json body = {
          {"responseHeader", {{"status", 0}, {"params", {{"q", q}, {"rows", std::to_string(rows)}}}}},
          {"response", {{"numFound", result.num_found}, {"start", 0}, {"docs", docs}}}};
      res.set_content(body.dump(), "application/json");
    } catch (const Error& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });

  server_->Post("/v1/export/bibtex", [this, admit](const httplib::Request& req, httplib::Response& res) {
    if (!admit(req, res)) return;
    std::vector<std::string> wanted;
    try {
      wanted = json::parse(req.body).at("bibcode").get<std::vector<std::string>>();
    } catch (const json::exception&) {
      res.status = 400;
      res.set_content(R"({"error":"body must be {\"bibcode\": [...]}"})", "application/json");
      return;
    }
    std::string exported;
    std::size_t found = 0;
    for (const auto& b : wanted) {
      for (const auto& entry : corpus_) {
        if (entry.record.bibcode != b) continue;
        exported += std::string(text::trim(entry.bibtex)) + "\n\n";
        ++found;
        break;
      }
    }
    if (found == 0) {
      res.status = 404;
      res.set_content(R"({"error":"no result from solr"})", "application/json");
      return;
    }
    const json body = {
        {"msg", "Retrieved " + std::to_string(found) + " abstracts, starting with number 1."},
        {"export", exported}};
    res.set_content(body.dump(), "application/json");
  });
}

int MockScixServer::start(const std::string& host, int port) {
  stop();
  install_routes();
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw Error(ErrorKind::Io, "cannot bind mock server to " + host);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockScixServer::run(const std::string& host, int port) {
  install_routes();
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port)) throw Error(ErrorKind::Io, "cannot listen on " + base_url());
}

void MockScixServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace incite
