#include "incite/bib_store.hpp"

#include <algorithm>
#include <climits>
#include <tuple>

#include "incite/error.hpp"
#include "incite/text.hpp"

namespace incite {

namespace {

using text::is_ascii_space;
constexpr std::size_t npos = std::string_view::npos;

bool is_ident_char(char c) {
  return text::is_ascii_alnum(c) || c == '_' || c == '-' || c == ':' || c == '.' || c == '+';
}

bool is_key_char(char c) {
  return !is_ascii_space(c) && c != ',' && c != '{' && c != '}' && c != '(' && c != ')' &&
         c != '"' && c != '=' && c != '#' && c != '%';
}

std::size_t skip_space(std::string_view s, std::size_t p) {
  while (p < s.size() && is_ascii_space(s[p])) ++p;
  return p;
}

// Index of the brace closing the group opened at `open`, or npos.
std::size_t close_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t p = open; p < s.size(); ++p) {
    if (s[p] == '{') ++depth;
    if (s[p] == '}' && --depth == 0) return p;
  }
  return npos;
}

std::size_t close_paren(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t p = open + 1; p < s.size(); ++p) {
    if (s[p] == '{') ++depth;
    if (s[p] == '}') --depth;
    if (s[p] == ')' && depth == 0) return p;
  }
  return npos;
}

std::size_t close_quote(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t p = open + 1; p < s.size(); ++p) {
    if (s[p] == '{') ++depth;
    if (s[p] == '}') --depth;
    if (s[p] == '"' && depth == 0) return p;
  }
  return npos;
}

struct Failure {
  std::size_t offset;
  std::string message;
};

std::optional<std::string> bibcode_from_adsurl(std::string_view url) {
  const std::size_t abs = url.find("/abs/");
  if (abs == npos) return std::nullopt;
  std::string_view rest = url.substr(abs + 5);
  rest = rest.substr(0, rest.find('/'));
  std::string out;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (rest.substr(i, 3) == "%26") {
      out.push_back('&');
      i += 2;
    } else {
      out.push_back(rest[i]);
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

bool looks_like_bibcode(std::string_view key) {
  if (key.size() != 19) return false;
  return std::all_of(key.begin(), key.begin() + 4, [](char c) { return c >= '0' && c <= '9'; });
}

// Parses the field list of a regular entry. `p` points just past the key's
// comma; returns the position of the closing delimiter.
std::size_t parse_fields(std::string_view s, std::size_t p, char closer, BibEntry& entry) {
  while (true) {
    p = skip_space(s, p);
    if (p >= s.size()) throw Failure{p, "unterminated entry"};
    if (s[p] == closer) return p;
    const std::size_t name_start = p;
    while (p < s.size() && is_ident_char(s[p])) ++p;
    if (p == name_start) throw Failure{p, "expected a field name"};
    std::string name = text::to_lower_ascii(s.substr(name_start, p - name_start));
    p = skip_space(s, p);
    if (p >= s.size() || s[p] != '=') throw Failure{p, "expected '=' after field '" + name + "'"};
    p = skip_space(s, p + 1);

    const std::size_t value_start = p;
    std::string value;
    int pieces = 0;
    while (true) {
      if (p >= s.size()) throw Failure{p, "unterminated value for field '" + name + "'"};
      std::size_t end = npos;
      if (s[p] == '{') {
        end = close_brace(s, p);
        if (end == npos) throw Failure{p, "unbalanced braces in field '" + name + "'"};
        value = std::string(s.substr(p + 1, end - p - 1));
        p = end + 1;
      } else if (s[p] == '"') {
        end = close_quote(s, p);
        if (end == npos) throw Failure{p, "unterminated quote in field '" + name + "'"};
        value = std::string(s.substr(p + 1, end - p - 1));
        p = end + 1;
      } else {
        const std::size_t b = p;
        while (p < s.size() && is_ident_char(s[p])) ++p;
        if (p == b) throw Failure{p, "expected a value for field '" + name + "'"};
        value = std::string(s.substr(b, p - b));
      }
      ++pieces;
      p = skip_space(s, p);
      if (p < s.size() && s[p] == '#') {
        p = skip_space(s, p + 1);
        continue;
      }
      break;
    }
    if (pieces > 1) {
      std::size_t e = p;
      while (e > value_start && is_ascii_space(s[e - 1])) --e;
      value = std::string(s.substr(value_start, e - value_start));
    }
    entry.fields.emplace_back(std::move(name), std::move(value));

    if (p < s.size() && s[p] == ',') {
      ++p;
      continue;
    }
    if (p < s.size() && s[p] == closer) return p;
    throw Failure{p, "expected ',' or end of entry after field"};
  }
}

std::optional<int> leading_year(std::optional<std::string> value) {
  if (!value) return std::nullopt;
  const std::string_view v = text::trim(*value);
  int year = 0;
  std::size_t digits = 0;
  while (digits < v.size() && v[digits] >= '0' && v[digits] <= '9' && digits < 4) {
    year = year * 10 + (v[digits] - '0');
    ++digits;
  }
  if (digits == 0) return std::nullopt;
  return year;
}

std::string strip_braces(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != '{' && c != '}') out.push_back(c);
  }
  return out;
}

std::string first_author_surname(const BibEntry& entry) {
  const auto author = entry.field("author");
  if (!author) return {};
  const std::string_view a = *author;
  int depth = 0;
  std::size_t end = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == '{') ++depth;
    if (a[i] == '}') --depth;
    if (depth == 0 && i + 5 <= a.size() && text::iequals_ascii(a.substr(i, 5), " and ")) {
      end = i;
      break;
    }
  }
  const std::string first = strip_braces(text::trim(a.substr(0, end)));
  const std::string_view f = first;
  const std::size_t comma = f.find(',');
  std::string_view last;
  if (comma != npos) {
    last = text::trim(f.substr(0, comma));
  } else {
    const std::size_t space = f.find_last_of(' ');
    last = space == npos ? f : f.substr(space + 1);
  }
  return text::fold_for_match(last);
}

std::string normalize_doi(std::string_view doi) {
  std::string d = text::to_lower_ascii(text::trim(doi));
  for (std::string_view prefix : {"https://doi.org/", "http://doi.org/", "http://dx.doi.org/", "doi:"}) {
    if (d.starts_with(prefix)) {
      d.erase(0, prefix.size());
      break;
    }
  }
  return d;
}

std::string suffix_for(std::size_t n) {
  // Bijective base 26: 1 -> "a", 26 -> "z", 27 -> "aa".
  std::string out;
  while (n > 0) {
    --n;
    out.insert(out.begin(), static_cast<char>('a' + n % 26));
    n /= 26;
  }
  return out;
}

std::string normalized_entry(std::string_view entry_text) {
  return std::string(text::trim(entry_text)) + "\n";
}

std::string insert_at(std::string_view file, std::size_t pos, std::string_view entry) {
  std::string out(file.substr(0, pos));
  if (pos > 0 && file[pos - 1] != '\n') out += '\n';
  out += entry;
  out += '\n';
  out += file.substr(pos);
  return out;
}

}  // namespace

std::string_view to_string(KeyStyle style) {
  switch (style) {
    case KeyStyle::AuthorYear: return "AuthorYear";
    case KeyStyle::LowerAuthorYear: return "authoryear";
    case KeyStyle::AuthorColonYear: return "Author:Year";
    case KeyStyle::Bibcode: return "Bibcode";
  }
  return "AuthorYear";
}

std::optional<KeyStyle> parse_key_style(std::string_view name) {
  for (auto style : {KeyStyle::AuthorYear, KeyStyle::LowerAuthorYear, KeyStyle::AuthorColonYear,
                     KeyStyle::Bibcode}) {
    if (name == to_string(style)) return style;
  }
  return std::nullopt;
}

std::string_view to_string(OrderPolicy policy) {
  switch (policy) {
    case OrderPolicy::Append: return "Append";
    case OrderPolicy::AlphaByKey: return "AlphaByKey";
    case OrderPolicy::YearThenAuthor: return "YearThenAuthor";
  }
  return "Append";
}

std::optional<OrderPolicy> parse_order_policy(std::string_view name) {
  for (auto policy : {OrderPolicy::Append, OrderPolicy::AlphaByKey, OrderPolicy::YearThenAuthor}) {
    if (text::iequals_ascii(name, to_string(policy))) return policy;
  }
  return std::nullopt;
}

std::optional<std::string> BibEntry::field(std::string_view name) const {
  for (const auto& [k, v] : fields) {
    if (k == name) return v;
  }
  return std::nullopt;
}

BibFile parse_bib_file(std::string_view s) {
  BibFile file;
  std::size_t i = 0;
  while ((i = s.find('@', i)) != npos) {
    const std::size_t at = i;
    std::size_t p = skip_space(s, at + 1);
    const std::size_t type_start = p;
    while (p < s.size() && text::is_ascii_alpha(s[p])) ++p;
    if (p == type_start) {
      i = at + 1;
      continue;
    }
    const std::string type = text::to_lower_ascii(s.substr(type_start, p - type_start));
    p = skip_space(s, p);
    if (p >= s.size() || (s[p] != '{' && s[p] != '(')) {
      i = at + 1;
      continue;
    }
    const char opener = s[p];
    const char closer = opener == '{' ? '}' : ')';

    if (type == "comment" || type == "preamble" || type == "string") {
      const std::size_t end = opener == '{' ? close_brace(s, p) : close_paren(s, p);
      if (end == npos) {
        file.diagnostics.push_back({at, "unterminated @" + type + " block"});
        i = at + 1;
        continue;
      }
      file.passthrough.push_back({type, std::string(s.substr(at, end + 1 - at)), {at, end + 1}});
      i = end + 1;
      continue;
    }

    try {
      BibEntry entry;
      entry.entry_type = type;
      p = skip_space(s, p + 1);
      const std::size_t key_start = p;
      while (p < s.size() && is_key_char(s[p])) ++p;
      if (p == key_start) throw Failure{p, "entry without a key"};
      entry.key = std::string(s.substr(key_start, p - key_start));
      p = skip_space(s, p);
      std::size_t end = npos;
      if (p < s.size() && s[p] == closer) {
        end = p;
      } else if (p < s.size() && s[p] == ',') {
        end = parse_fields(s, p + 1, closer, entry);
      } else {
        throw Failure{p, "expected ',' after key '" + entry.key + "'"};
      }
      entry.raw = std::string(s.substr(at, end + 1 - at));
      entry.span = {at, end + 1};
      if (auto url = entry.field("adsurl")) entry.bibcode = bibcode_from_adsurl(*url);
      if (!entry.bibcode) entry.bibcode = entry.field("bibcode");
      if (!entry.bibcode && looks_like_bibcode(entry.key)) entry.bibcode = entry.key;
      file.entries.push_back(std::move(entry));
      i = end + 1;
    } catch (const Failure& f) {
      file.diagnostics.push_back({f.offset, "malformed @" + type + " entry: " + f.message});
      i = at + 1;
    }
  }
  return file;
}

std::vector<BibEntry> parse_bib(std::string_view text) { return parse_bib_file(text).entries; }

std::string generate_key(const AdsRecord& record, KeyStyle style) {
  if (style == KeyStyle::Bibcode) return record.bibcode;
  if (record.authors.empty()) {
    throw Error(ErrorKind::NoAuthors, "record " + record.bibcode + " has no authors");
  }
  const std::string_view first = record.authors.front();
  const std::string folded = text::fold_diacritics(text::trim(first.substr(0, first.find(','))));
  std::string surname;
  for (char c : folded) {
    if (text::is_ascii_alnum(c) || c == '-') surname.push_back(c);
  }
  if (surname.empty()) {
    throw Error(ErrorKind::NoAuthors, "cannot derive a key from author '" + std::string(first) + "'");
  }
  std::string year = std::to_string(record.year);
  if (year.size() < 4) year.insert(0, 4 - year.size(), '0');
  switch (style) {
    case KeyStyle::LowerAuthorYear: return text::to_lower_ascii(surname) + year;
    case KeyStyle::AuthorColonYear: return surname + ":" + year;
    default: return surname + year;
  }
}

std::string resolve_collision(std::string_view key, const std::set<std::string>& existing) {
  std::set<std::string> taken;
  for (const auto& k : existing) taken.insert(text::to_lower_ascii(k));
  const std::string base(key);
  std::string candidate = base;
  for (std::size_t n = 1; taken.contains(text::to_lower_ascii(candidate)); ++n) {
    candidate = base + suffix_for(n);
  }
  return candidate;
}

std::string normalize_title(std::string_view title) {
  std::string out;
  for (char c : text::fold_diacritics(title)) {
    if (text::is_ascii_alnum(c)) out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

std::optional<BibEntry> find_duplicate(std::span<const BibEntry> entries, const AdsRecord& record) {
  for (const auto& e : entries) {
    if (e.bibcode && *e.bibcode == record.bibcode) return e;
  }
  if (record.doi && !record.doi->empty()) {
    const std::string want = normalize_doi(*record.doi);
    for (const auto& e : entries) {
      if (auto doi = e.field("doi"); doi && normalize_doi(*doi) == want) return e;
    }
  }
  const std::string title = normalize_title(record.title);
  if (!title.empty()) {
    for (const auto& e : entries) {
      const auto t = e.field("title");
      if (t && normalize_title(*t) == title && leading_year(e.field("year")) == record.year) return e;
    }
  }
  return std::nullopt;
}

std::string insert_entry(std::string_view file_text, std::string_view entry_text,
                         std::string_view key, OrderPolicy policy) {
  const auto existing = parse_bib(file_text);
  for (const auto& e : existing) {
    if (text::iequals_ascii(e.key, key)) {
      throw Error(ErrorKind::DuplicateKey, "key '" + std::string(key) + "' already in bibliography");
    }
  }
  const std::string entry = normalized_entry(entry_text);

  const BibEntry* anchor = nullptr;
  if (policy == OrderPolicy::AlphaByKey) {
    const std::string want = text::to_lower_ascii(key);
    for (const auto& e : existing) {
      if (text::to_lower_ascii(e.key) > want) {
        anchor = &e;
        break;
      }
    }
  } else if (policy == OrderPolicy::YearThenAuthor) {
    const auto parsed = parse_bib(entry);
    if (!parsed.empty()) {
      auto order_key = [](const BibEntry& e) {
        return std::make_tuple(leading_year(e.field("year")).value_or(INT_MAX), first_author_surname(e));
      };
      const auto want = order_key(parsed.front());
      for (const auto& e : existing) {
        if (order_key(e) > want) {
          anchor = &e;
          break;
        }
      }
    }
  }
  if (anchor != nullptr) return insert_at(file_text, anchor->span.begin, entry);

  if (file_text.empty()) return entry;
  std::string out(file_text);
  if (!out.ends_with('\n')) out += '\n';
  if (!out.ends_with("\n\n")) out += '\n';
  out += entry;
  return out;
}

std::string rekey_entry(std::string_view entry_text, std::string_view new_key) {
  const std::size_t at = entry_text.find('@');
  const std::size_t open = entry_text.find_first_of("{(", at == npos ? 0 : at);
  const std::size_t comma = open == npos ? npos : entry_text.find(',', open);
  if (at == npos || open == npos || comma == npos) {
    throw Error(ErrorKind::MalformedResponse, "BibTeX entry has no key to replace");
  }
  std::string out(entry_text.substr(0, open + 1));
  out += new_key;
  out += entry_text.substr(comma);
  return out;
}

bool is_valid_key(std::string_view key, KeyStyle style) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [&](char c) {
    return text::is_ascii_alnum(c) || c == ':' || c == '_' || c == '.' || c == '-' ||
           (style == KeyStyle::Bibcode && c == '&');
  });
}

}  // namespace incite
