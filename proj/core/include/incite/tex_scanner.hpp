#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace incite {

/// Half-open byte range [begin, end) into a UTF-8 document snapshot.
struct ByteRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t offset) const { return offset >= begin && offset < end; }
  friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

struct SourceDocument {
  std::string uri;
  std::string text;
};

struct CitationKey {
  std::string raw;
  ByteRange span;
  friend bool operator==(const CitationKey&, const CitationKey&) = default;
};

/// One `\cite`-family command. Key spans are disjoint, ordered and inside
/// `span`; `keys` is never empty.
struct CitationSite {
  std::string command;
  ByteRange span;
  std::vector<CitationKey> keys;
  std::size_t active_index = 0;

  const CitationKey& active_key() const { return keys.at(active_index); }
  friend bool operator==(const CitationSite&, const CitationSite&) = default;
};

struct SentenceContext {
  std::string raw;
  ByteRange span;
  std::vector<std::string> terms;
};

struct ScanOptions {
  /// Macro names recognized in addition to the built-in cite family.
  std::vector<std::string> extra_commands;
};

inline constexpr std::size_t kMaxContextTerms = 25;

const std::vector<std::string>& builtin_cite_commands();
const std::vector<std::string>& sentence_abbreviations();
bool is_stopword(std::string_view lowercase_word);

std::vector<CitationSite> scan_document(const SourceDocument& doc, const ScanOptions& options = {});

/// Throws Error{NotInCitation} when no site spans `offset`.
CitationSite site_at_position(const SourceDocument& doc, std::size_t offset,
                              const ScanOptions& options = {});

SentenceContext extract_context(const SourceDocument& doc, const CitationSite& site,
                                const ScanOptions& options = {});

/// Content words of a LaTeX snippet after stripping citations, math and
/// macros. Exposed separately so rankers and tests can reuse the pipeline.
std::vector<std::string> context_terms(std::string_view latex, const ScanOptions& options = {});

std::vector<std::string> list_bib_targets(const SourceDocument& doc);

}  // namespace incite
