#include "incite/cue_grammar.hpp"

#include <array>
#include <chrono>

#include "incite/error.hpp"
#include "incite/text.hpp"

namespace incite {

namespace {

constexpr std::array<std::string_view, 8> kAdsFields{
    "author", "title", "abstract", "year", "bibcode", "doi", "full", "first_author"};

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_field_char(char c) { return text::is_ascii_alnum(c) || c == '_'; }

}  // namespace

std::string_view to_string(SearchMode mode) {
  switch (mode) {
    case SearchMode::Contextual: return "contextual";
    case SearchMode::Simple: return "simple";
    case SearchMode::AdsQuery: return "ads";
  }
  return "contextual";
}

std::optional<SearchMode> parse_search_mode(std::string_view name) {
  if (name == "contextual") return SearchMode::Contextual;
  if (name == "simple") return SearchMode::Simple;
  if (name == "ads") return SearchMode::AdsQuery;
  return std::nullopt;
}

int current_year() {
  using namespace std::chrono;
  const year_month_day ymd{floor<days>(system_clock::now())};
  return static_cast<int>(ymd.year());
}

int expand_year(std::string_view digits, int current_year) {
  if (digits.size() != 2 && digits.size() != 4) {
    throw Error(ErrorKind::BadYear, "year must have 2 or 4 digits: '" + std::string(digits) + "'");
  }
  int value = 0;
  for (char c : digits) {
    if (!is_digit(c)) {
      throw Error(ErrorKind::BadYear, "year must be decimal digits: '" + std::string(digits) + "'");
    }
    value = value * 10 + (c - '0');
  }
  if (digits.size() == 4) return value;
  return 2000 + value <= current_year + 1 ? 2000 + value : 1900 + value;
}

bool has_ads_syntax(std::string_view raw) {
  const std::size_t first_quote = raw.find('"');
  if (first_quote != std::string_view::npos &&
      raw.find('"', first_quote + 1) != std::string_view::npos) {
    return true;
  }
  for (std::size_t colon = raw.find(':'); colon != std::string_view::npos;
       colon = raw.find(':', colon + 1)) {
    std::size_t b = colon;
    while (b > 0 && is_field_char(raw[b - 1])) --b;
    const std::string_view field = raw.substr(b, colon - b);
    for (auto known : kAdsFields) {
      if (text::iequals_ascii(field, known)) return true;
    }
  }
  return false;
}

CitationCue parse_cue(std::string_view raw, SearchMode requested_mode, int current_year) {
  const std::string_view trimmed = text::trim(raw);
  if (trimmed.empty()) throw Error(ErrorKind::EmptyCue, "citation key is empty");

  CitationCue cue;
  cue.raw = std::string(trimmed);

  if (requested_mode == SearchMode::AdsQuery || has_ads_syntax(trimmed)) {
    cue.mode = SearchMode::AdsQuery;
    cue.ads_query = std::string(trimmed);
    return cue;
  }
  cue.mode = requested_mode;

  std::string_view name = trimmed;
  std::size_t digits = 0;
  while (digits < name.size() && is_digit(name[name.size() - 1 - digits])) ++digits;
  if ((digits == 2 || digits == 4) && digits < name.size()) {
    const std::string_view year_text = name.substr(name.size() - digits);
    const int year = expand_year(year_text, current_year);
    const std::string_view rest = text::trim(name.substr(0, name.size() - digits));
    if (year >= kEarliestYear && year <= current_year + 1 && !rest.empty()) {
      cue.year = year;
      cue.year_digits = std::string(year_text);
      name = rest;
    }
  }

  const bool single_word = name.find_first_of(" \t\r\n") == std::string_view::npos;
  if (single_word && name.size() >= 2) {
    const char last = name.back();
    const auto prev = static_cast<unsigned char>(name[name.size() - 2]);
    if (last >= 'A' && last <= 'Z' && ((prev >= 'a' && prev <= 'z') || prev >= 0x80)) {
      cue.initial = last;
      name.remove_suffix(1);
    }
  }

  cue.surname = std::string(name);
  const std::size_t last_space = name.find_last_of(" \t\r\n");
  const std::string_view last_word =
      last_space == std::string_view::npos ? name : name.substr(last_space + 1);
  cue.is_collaboration = text::iequals_ascii(last_word, "Collaboration");
  return cue;
}

}  // namespace incite
