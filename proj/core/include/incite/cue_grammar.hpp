#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace incite {

enum class SearchMode { Contextual, Simple, AdsQuery };

/// Wire names: "contextual", "simple", "ads".
std::string_view to_string(SearchMode mode);
std::optional<SearchMode> parse_search_mode(std::string_view name);

/// Structured reading of a placeholder key such as "SmithJ25".
///
/// mode == AdsQuery iff ads_query is set iff surname is unset. An initial
/// implies a surname. `year_digits` keeps the digits exactly as typed so the
/// raw key can be reconstructed.
struct CitationCue {
  std::string raw;
  SearchMode mode = SearchMode::Contextual;
  std::optional<std::string> surname;
  std::optional<char> initial;
  std::optional<int> year;
  std::string year_digits;
  bool is_collaboration = false;
  std::optional<std::string> ads_query;

  friend bool operator==(const CitationCue&, const CitationCue&) = default;
};

inline constexpr int kEarliestYear = 1800;

/// Current calendar year (UTC).
int current_year();

/// "1975" -> 1975; "25" -> 2025 while 2025 <= current_year + 1, else 1925.
/// Throws Error{BadYear} unless `digits` is exactly 2 or 4 decimal digits.
int expand_year(std::string_view digits, int current_year = incite::current_year());

/// True when the text uses ADS field syntax (`title:`, `author:`, ...) or
/// contains a double-quoted phrase.
bool has_ads_syntax(std::string_view raw);

/// Throws Error{EmptyCue} for empty or all-whitespace input; total otherwise.
CitationCue parse_cue(std::string_view raw, SearchMode requested_mode,
                      int current_year = incite::current_year());

}  // namespace incite
