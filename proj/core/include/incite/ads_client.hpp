#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

#include "incite/ads_record.hpp"
#include "incite/query_builder.hpp"
#include "incite/transport.hpp"

namespace incite {

inline constexpr char kDefaultApiBase[] = "https://api.adsabs.harvard.edu";
inline constexpr char kTokenEnvVar[] = "ADS_API_TOKEN";
inline constexpr std::size_t kMaxExportBibcodes = 100;

struct ClientOptions {
  int max_retries = 2;
  std::chrono::milliseconds backoff{250};
  /// Soft warning threshold on RateBudget::remaining.
  std::int64_t warn_below = 100;
  std::function<void(std::chrono::milliseconds)> sleep;
  std::function<void(const std::string&)> warn;
};

struct SearchResult {
  std::vector<AdsRecord> records;
  std::optional<RateBudget> budget;
};

/// Authenticated access to the search and BibTeX export endpoints.
///
/// Safe to share between threads: the budget is guarded, and at most two
/// requests are in flight at once.
class AdsClient {
 public:
  AdsClient(std::shared_ptr<Transport> transport, std::string token, ClientOptions options = {});

  AdsClient(const AdsClient&) = delete;
  AdsClient& operator=(const AdsClient&) = delete;

  SearchResult search(const AdsQuery& query);

  /// Concatenated BibTeX for 1..100 bibcodes, server keys untouched. Throws
  /// Error{NotFound} naming any bibcode missing from the export.
  std::string export_bibtex(std::span<const std::string> bibcodes);

  std::optional<RateBudget> budget() const;

 private:
  HttpResponse send(HttpRequest request);
  void update_budget(const HttpResponse& response);

  std::shared_ptr<Transport> transport_;
  std::string token_;
  ClientOptions options_;
  mutable std::mutex budget_mu_;
  std::optional<RateBudget> budget_;
  std::counting_semaphore<2> in_flight_{2};
};

/// Explicit value if non-empty, else $ADS_API_TOKEN, else nullopt.
std::optional<std::string> resolve_token(const std::optional<std::string>& explicit_token);

}  // namespace incite
