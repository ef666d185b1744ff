#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "incite/cue_grammar.hpp"

namespace incite {

enum class SortOrder { Relevance, CitationCountDesc };

/// ADS sort clause: "score desc" or "citation_count desc".
std::string_view to_string(SortOrder sort);
std::optional<SortOrder> parse_sort_order(std::string_view clause);

/// One search request against /v1/search/query. `rows` is in [1, 200].
struct AdsQuery {
  std::string q;
  SortOrder sort = SortOrder::Relevance;
  int rows = 50;
  std::vector<std::string> fields;

  friend bool operator==(const AdsQuery&, const AdsQuery&) = default;
};

inline constexpr int kDefaultRows = 50;
inline constexpr int kMaxRows = 200;
inline constexpr int kMaxWidenAttempts = 3;

/// bibcode, author, year, title, abstract, citation_count, pub, doi.
const std::vector<std::string>& default_fields();

/// Sentence context never enters `q`; it is applied by the ranker.
AdsQuery build_query(const CitationCue& cue);

/// Fallback ladder for empty results: 1 widens the year to +/-1, 2 drops the
/// year, 3 also drops the initial. Returns nullopt past the ladder and for
/// verbatim ADS queries.
std::optional<AdsQuery> widen_query(const AdsQuery& prev, const CitationCue& cue, int attempt);

/// Exact lookup of one record, used when a selection arrives as a bare bibcode.
AdsQuery bibcode_query(std::string_view bibcode);

}  // namespace incite
