#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace incite {

/// One candidate paper. Authors are "Last, F." strings in byline order.
struct AdsRecord {
  std::string bibcode;
  std::string title;
  std::vector<std::string> authors;
  int year = 0;
  std::int64_t citation_count = 0;
  std::optional<std::string> abstract;
  std::optional<std::string> pub;
  std::optional<std::string> doi;

  friend bool operator==(const AdsRecord&, const AdsRecord&) = default;
};

/// Daily request budget reported by the X-RateLimit-* headers.
struct RateBudget {
  std::int64_t limit = 0;
  std::int64_t remaining = 0;
  std::int64_t reset_at = 0;  // epoch seconds

  friend bool operator==(const RateBudget&, const RateBudget&) = default;
};

/// Reads one document as returned by /v1/search/query (title and doi as
/// arrays, year as a string) or the plainer corpus form. Throws
/// Error{MalformedResponse} when the bibcode is missing.
AdsRecord record_from_json(const nlohmann::json& doc);

/// Serializes in the search-endpoint document shape.
nlohmann::json record_to_ads_doc(const AdsRecord& record);

}  // namespace incite
