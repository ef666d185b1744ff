#include "incite/tex_scanner.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <unordered_set>

#include "incite/error.hpp"
#include "incite/text.hpp"

namespace incite {

namespace {

using text::is_ascii_alpha;
using text::is_ascii_space;

constexpr std::size_t npos = std::string_view::npos;

bool is_escaped(std::string_view s, std::size_t pos) {
  std::size_t backslashes = 0;
  while (pos > backslashes && s[pos - backslashes - 1] == '\\') ++backslashes;
  return backslashes % 2 == 1;
}

std::size_t end_of_line(std::string_view s, std::size_t pos) {
  const std::size_t nl = s.find('\n', pos);
  return nl == npos ? s.size() : nl;
}

// Walks `s`, skipping comments and escaped characters, and calls `on_command`
// with (name, backslash position, position after the name) for every
// alphabetic macro. The callback returns where scanning resumes.
template <typename F>
void for_each_command(std::string_view s, F&& on_command) {
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '%') {
      i = end_of_line(s, i);
      continue;
    }
    if (c == '\\') {
      if (i + 1 < s.size() && is_ascii_alpha(s[i + 1])) {
        std::size_t j = i + 1;
        while (j < s.size() && is_ascii_alpha(s[j])) ++j;
        const std::size_t next = on_command(s.substr(i + 1, j - i - 1), i, j);
        i = std::max(next, j);
      } else {
        i += 2;
      }
      continue;
    }
    ++i;
  }
}

std::size_t skip_space(std::string_view s, std::size_t p) {
  while (p < s.size() && is_ascii_space(s[p])) ++p;
  return p;
}

// Position of the `]` closing the optional argument opened at `open`.
std::optional<std::size_t> match_bracket(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t p = open + 1; p < s.size(); ++p) {
    const char c = s[p];
    if (c == '\\') {
      ++p;
      continue;
    }
    if (c == '{') ++depth;
    if (c == '}') {
      if (depth == 0) return std::nullopt;
      --depth;
    }
    if (c == ']' && depth == 0) return p;
  }
  return std::nullopt;
}

std::optional<std::size_t> match_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t p = open; p < s.size(); ++p) {
    const char c = s[p];
    if (c == '\\') {
      ++p;
      continue;
    }
    if (c == '{') ++depth;
    if (c == '}' && --depth == 0) return p;
  }
  return std::nullopt;
}

// Skips a `*` and any `[...]` optional arguments; returns the position of the
// mandatory `{`, if there is one.
std::optional<std::size_t> find_mandatory_arg(std::string_view s, std::size_t p) {
  if (p < s.size() && s[p] == '*') ++p;
  while (true) {
    p = skip_space(s, p);
    if (p >= s.size()) return std::nullopt;
    if (s[p] == '[') {
      const auto close = match_bracket(s, p);
      if (!close) return std::nullopt;
      p = *close + 1;
      continue;
    }
    if (s[p] == '{') return p;
    return std::nullopt;
  }
}

std::optional<CitationSite> parse_cite(std::string_view s, std::string_view name,
                                       std::size_t backslash, std::size_t name_end) {
  const auto open = find_mandatory_arg(s, name_end);
  if (!open) return std::nullopt;

  CitationSite site;
  site.command = std::string(name);
  std::size_t key_begin = npos;
  std::size_t key_end = npos;
  bool frozen = false;
  for (std::size_t q = *open + 1; q < s.size(); ++q) {
    const char ch = s[q];
    if (ch == '%' && !is_escaped(s, q)) {
      frozen = true;
      q = end_of_line(s, q);
      if (q == s.size()) break;
      continue;
    }
    if (ch == '{') return std::nullopt;
    if (ch == ',' || ch == '}') {
      if (key_begin != npos) {
        site.keys.push_back(
            {std::string(s.substr(key_begin, key_end - key_begin)), {key_begin, key_end}});
      }
      key_begin = key_end = npos;
      frozen = false;
      if (ch == '}') {
        if (site.keys.empty()) return std::nullopt;
        site.span = {backslash, q + 1};
        return site;
      }
      continue;
    }
    if (!is_ascii_space(ch) && !frozen) {
      if (key_begin == npos) key_begin = q;
      key_end = q + 1;
    }
  }
  return std::nullopt;
}

bool is_cite_command(std::string_view name, const ScanOptions& options) {
  const auto& builtin = builtin_cite_commands();
  if (std::find(builtin.begin(), builtin.end(), name) != builtin.end()) return true;
  return std::find(options.extra_commands.begin(), options.extra_commands.end(), name) !=
         options.extra_commands.end();
}

std::vector<CitationSite> scan_text(std::string_view s, const ScanOptions& options) {
  std::vector<CitationSite> sites;
  for_each_command(s, [&](std::string_view name, std::size_t at, std::size_t name_end) {
    if (!is_cite_command(name, options)) return name_end;
    auto site = parse_cite(s, name, at, name_end);
    if (!site) return name_end;
    const std::size_t next = site->span.end;
    sites.push_back(std::move(*site));
    return next;
  });
  return sites;
}

bool ends_with_abbreviation(std::string_view s, std::size_t dot) {
  for (const auto& abbr : sentence_abbreviations()) {
    const std::size_t len = abbr.size();
    if (dot + 1 < len) continue;
    const std::size_t start = dot + 1 - len;
    if (s.substr(start, len) != abbr) continue;
    if (start == 0 || !is_ascii_alpha(s[start - 1])) return true;
  }
  return false;
}

struct Boundary {
  std::size_t prev_end;    // one past the last byte of the earlier sentence
  std::size_t next_start;  // first byte of the following sentence
};

std::vector<Boundary> sentence_boundaries(std::string_view s) {
  std::vector<Boundary> out;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const char c = s[k];
    if ((c == '.' || c == '!' || c == '?') && k + 1 < s.size() && is_ascii_space(s[k + 1])) {
      if (c == '.' && ends_with_abbreviation(s, k)) continue;
      out.push_back({k + 1, k + 1});
    } else if (c == '\n') {
      std::size_t p = k + 1;
      while (p < s.size() && (s[p] == ' ' || s[p] == '\t' || s[p] == '\r')) ++p;
      if (p < s.size() && s[p] == '\n') {
        out.push_back({k, p + 1});
        k = p - 1;
      }
    }
  }
  return out;
}

// Macros whose braced argument is a label, path or URL rather than prose.
const std::unordered_set<std::string_view>& reference_macros() {
  static const std::unordered_set<std::string_view> set{
      "label", "ref", "eqref", "cref", "Cref", "autoref", "pageref", "url", "input", "include"};
  return set;
}

std::string strip_latex(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '%') {
      i = end_of_line(s, i);
      continue;
    }
    if (c == '$') {
      const bool display = i + 1 < s.size() && s[i + 1] == '$';
      const std::string_view closer = display ? "$$" : "$";
      std::size_t close = i + closer.size();
      while (true) {
        close = s.find(closer, close);
        if (close == npos || !is_escaped(s, close)) break;
        ++close;
      }
      if (close == npos) {
        ++i;
        continue;
      }
      out.push_back(' ');
      i = close + closer.size();
      continue;
    }
    if (c == '\\') {
      if (i + 1 < s.size() && is_ascii_alpha(s[i + 1])) {
        std::size_t j = i + 1;
        while (j < s.size() && is_ascii_alpha(s[j])) ++j;
        const std::string_view name = s.substr(i + 1, j - i - 1);
        // Text-argument macros (\emph, \textbf, ...) lose only their name;
        // the braces around the argument act as token separators.
        out.push_back(' ');
        i = j;
        if (reference_macros().contains(name)) {
          if (auto open = find_mandatory_arg(s, j)) {
            if (auto close = match_brace(s, *open)) i = *close + 1;
          }
        }
      } else {
        out.push_back(' ');
        i += 2;
      }
      continue;
    }
    out.push_back(c == '~' ? ' ' : c);
    ++i;
  }
  return out;
}

}  // namespace

const std::vector<std::string>& builtin_cite_commands() {
  static const std::vector<std::string> commands{"cite",     "citep",      "citet",   "citealt",
                                                 "citealp",  "citeauthor", "citeyear"};
  return commands;
}

const std::vector<std::string>& sentence_abbreviations() {
  static const std::vector<std::string> abbrs{"e.g.", "i.e.", "et al.", "cf.", "vs.",
                                              "Fig.", "Eq.",  "Sec.",   "Tab.", "No."};
  return abbrs;
}

bool is_stopword(std::string_view w) {
  // Standard English stopwords plus tokens left behind by LaTeX markup.
  static const std::unordered_set<std::string_view> words{
      "a", "about", "above", "after", "again", "against", "ain", "all", "am", "an", "and", "any",
      "are", "aren", "as", "at", "be", "because", "been", "before", "being", "below", "between",
      "both", "but", "by", "can", "couldn", "d", "did", "didn", "do", "does", "doesn", "doing",
      "don", "down", "during", "each", "few", "for", "from", "further", "had", "hadn", "has",
      "hasn", "have", "haven", "having", "he", "her", "here", "hers", "herself", "him",
      "himself", "his", "how", "i", "if", "in", "into", "is", "isn", "it", "its", "itself",
      "just", "ll", "m", "ma", "me", "mightn", "more", "most", "mustn", "my", "myself", "needn",
      "no", "nor", "not", "now", "o", "of", "off", "on", "once", "only", "or", "other", "our",
      "ours", "ourselves", "out", "over", "own", "re", "s", "same", "shan", "she", "should",
      "shouldn", "so", "some", "such", "t", "than", "that", "the", "their", "theirs", "them",
      "themselves", "then", "there", "these", "they", "this", "those", "through", "to", "too",
      "under", "until", "up", "ve", "very", "was", "wasn", "we", "were", "weren", "what",
      "when", "where", "which", "while", "who", "whom", "why", "will", "with", "won", "wouldn",
      "y", "you", "your", "yours", "yourself", "yourselves",
      "citep", "citet", "label", "ref"};
  return words.contains(w);
}

std::vector<CitationSite> scan_document(const SourceDocument& doc, const ScanOptions& options) {
  return scan_text(doc.text, options);
}

CitationSite site_at_position(const SourceDocument& doc, std::size_t offset,
                              const ScanOptions& options) {
  if (offset > doc.text.size()) {
    throw Error(ErrorKind::InvalidArgument, "offset beyond end of document");
  }
  for (auto& site : scan_text(doc.text, options)) {
    if (!site.span.contains(offset)) continue;
    site.active_index = 0;
    for (std::size_t k = 0; k < site.keys.size(); ++k) {
      if (site.keys[k].span.begin <= offset) site.active_index = k;
    }
    return site;
  }
  throw Error(ErrorKind::NotInCitation, "not inside a citation command");
}

SentenceContext extract_context(const SourceDocument& doc, const CitationSite& site,
                                const ScanOptions& options) {
  const std::string_view s = doc.text;
  std::size_t start = 0;
  std::size_t end = s.size();
  for (const auto& b : sentence_boundaries(s)) {
    if (b.next_start <= site.span.begin) start = b.next_start;
    if (b.prev_end >= site.span.end) {
      end = b.prev_end;
      break;
    }
  }
  while (start < site.span.begin && is_ascii_space(s[start])) ++start;
  while (end > site.span.end && is_ascii_space(s[end - 1])) --end;

  SentenceContext ctx;
  ctx.span = {start, end};
  ctx.raw = std::string(s.substr(start, end - start));
  ctx.terms = context_terms(ctx.raw, options);
  return ctx;
}

std::vector<std::string> context_terms(std::string_view latex, const ScanOptions& options) {
  std::string without_cites;
  std::size_t cursor = 0;
  for (const auto& site : scan_text(latex, options)) {
    without_cites.append(latex.substr(cursor, site.span.begin - cursor));
    without_cites.push_back(' ');
    cursor = site.span.end;
  }
  without_cites.append(latex.substr(cursor));

  std::vector<std::string> terms;
  for (auto& token : text::word_tokens(strip_latex(without_cites))) {
    if (text::utf8_length(token) < 3 || is_stopword(token)) continue;
    terms.push_back(std::move(token));
    if (terms.size() == kMaxContextTerms) break;
  }
  return terms;
}

std::vector<std::string> list_bib_targets(const SourceDocument& doc) {
  const std::string_view s = doc.text;
  std::vector<std::string> targets;
  auto add = [&](std::string_view name) {
    name = text::trim(name);
    if (name.empty()) return;
    std::string path(name);
    if (path.size() < 4 || path.compare(path.size() - 4, 4, ".bib") != 0) path += ".bib";
    targets.push_back(std::move(path));
  };
  for_each_command(s, [&](std::string_view name, std::size_t, std::size_t name_end) {
    if (name != "bibliography" && name != "addbibresource") return name_end;
    const auto open = find_mandatory_arg(s, name_end);
    if (!open) return name_end;
    const auto close = match_brace(s, *open);
    if (!close) return name_end;
    const std::string_view arg = s.substr(*open + 1, *close - *open - 1);
    if (name == "addbibresource") {
      add(arg);
    } else {
      std::size_t from = 0;
      while (from <= arg.size()) {
        const std::size_t comma = arg.find(',', from);
        add(arg.substr(from, comma == npos ? npos : comma - from));
        if (comma == npos) break;
        from = comma + 1;
      }
    }
    return *close + 1;
  });
  return targets;
}

}  // namespace incite
