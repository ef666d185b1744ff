#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "incite/ads_record.hpp"
#include "incite/query_builder.hpp"

namespace httplib {
class Server;
}

namespace incite {

struct CorpusEntry {
  AdsRecord record;
  std::string bibtex;
};

/// Corpus file: a JSON array of records, each with an embedded "bibtex"
/// string. Throws Error{InvalidArgument} on duplicate bibcodes.
std::vector<CorpusEntry> parse_corpus(std::string_view json_text);
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& file);

struct MockQueryResult {
  std::vector<AdsRecord> records;  // at most `rows`
  std::size_t num_found = 0;
};

/// The evaluator behind /v1/search/query. Supports author:"Last[, F]"
/// (a leading ^ anchors to the first author), year:N, year:[A TO B],
/// title:"...", abstract:"...", bibcode:, doi:, and bare terms matched
/// against title + abstract, all AND-ed. Throws Error{InvalidArgument} for
/// anything else.
MockQueryResult evaluate_query(const std::vector<CorpusEntry>& corpus, std::string_view q,
                               SortOrder sort, int rows);

struct MockOptions {
  std::int64_t limit = 5000;
  /// Value for X-RateLimit-Reset; 0 means one day after start.
  std::int64_t reset_at = 0;
  /// When set, only this bearer token is accepted; otherwise any non-empty one.
  std::optional<std::string> token;
};

/// Local stand-in for the search and export endpoints. Serves one request
/// at a time.
class MockScixServer {
 public:
  MockScixServer(std::vector<CorpusEntry> corpus, MockOptions options = {});
  ~MockScixServer();

  MockScixServer(const MockScixServer&) = delete;
  MockScixServer& operator=(const MockScixServer&) = delete;

  /// Binds (port 0 picks a free port), serves on a background thread and
  /// returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop() is called elsewhere.
  void run(const std::string& host, int port);
  void stop();

  int port() const { return port_; }
  std::string base_url() const;
  std::int64_t remaining() const;
  std::int64_t requests_served() const { return served_.load(); }

 private:
  void install_routes();

  std::vector<CorpusEntry> corpus_;
  MockOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = 0;
  mutable std::mutex budget_mu_;
  std::int64_t remaining_ = 0;
  std::atomic<std::int64_t> served_{0};
};

}  // namespace incite
