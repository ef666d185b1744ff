#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "incite/ads_record.hpp"
#include "incite/tex_scanner.hpp"

namespace incite {

enum class KeyStyle { AuthorYear, LowerAuthorYear, AuthorColonYear, Bibcode };

/// "AuthorYear", "authoryear", "Author:Year", "Bibcode". Parsing is
/// case-sensitive because two of the names differ only by case.
std::string_view to_string(KeyStyle style);
std::optional<KeyStyle> parse_key_style(std::string_view name);

enum class OrderPolicy { Append, AlphaByKey, YearThenAuthor };

std::string_view to_string(OrderPolicy policy);
std::optional<OrderPolicy> parse_order_policy(std::string_view name);

struct BibEntry {
  std::string key;
  std::string entry_type;  // lowercased
  std::vector<std::pair<std::string, std::string>> fields;  // lowercased names, delimiters stripped
  std::string raw;
  std::optional<std::string> bibcode;
  ByteRange span;  // position in the parsed text; not part of equality

  std::optional<std::string> field(std::string_view name) const;

  friend bool operator==(const BibEntry& a, const BibEntry& b) {
    return a.key == b.key && a.entry_type == b.entry_type && a.fields == b.fields &&
           a.raw == b.raw && a.bibcode == b.bibcode;
  }
};

/// @comment, @preamble and @string blocks, kept verbatim.
struct BibBlock {
  std::string kind;
  std::string raw;
  ByteRange span;
};

struct BibDiagnostic {
  std::size_t offset = 0;
  std::string message;
};

struct BibFile {
  std::vector<BibEntry> entries;
  std::vector<BibBlock> passthrough;
  std::vector<BibDiagnostic> diagnostics;
};

/// Tolerant parse; malformed entries are skipped with a diagnostic.
BibFile parse_bib_file(std::string_view text);
std::vector<BibEntry> parse_bib(std::string_view text);

/// Throws Error{NoAuthors} for author-based styles on an empty byline.
std::string generate_key(const AdsRecord& record, KeyStyle style);

/// First of key, key+"a" ... key+"z", key+"aa" ... not already used.
/// Comparison is case-insensitive, as BibTeX treats keys.
std::string resolve_collision(std::string_view key, const std::set<std::string>& existing);

/// Matches by bibcode, then DOI, then normalized title plus year.
std::optional<BibEntry> find_duplicate(std::span<const BibEntry> entries, const AdsRecord& record);

/// Lowercase ASCII alphanumerics only.
std::string normalize_title(std::string_view title);

/// Returns the new file text. Bytes outside the insertion point are kept
/// verbatim. Throws Error{DuplicateKey} if `key` is already defined.
std::string insert_entry(std::string_view file_text, std::string_view entry_text,
                         std::string_view key, OrderPolicy policy);

/// Replaces the key between the entry's opening delimiter and first comma.
std::string rekey_entry(std::string_view entry_text, std::string_view new_key);

/// Allowed key characters: [A-Za-z0-9:_.-], plus '&' for bibcode keys.
bool is_valid_key(std::string_view key, KeyStyle style);

}  // namespace incite
