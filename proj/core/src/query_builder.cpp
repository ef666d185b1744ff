#include "incite/query_builder.hpp"

#include "incite/error.hpp"

namespace incite {

namespace {

std::string quoted(std::string_view value) {
  std::string out = "\"";
  for (char c : value) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

enum class YearClause { Exact, Range, None };

std::string author_year_q(const CitationCue& cue, YearClause year_clause, bool with_initial) {
  std::string name = cue.surname.value_or("");
  if (with_initial && cue.initial && !cue.is_collaboration) {
    name += ", ";
    name.push_back(*cue.initial);
  }
  std::string q = "author:" + quoted(name);
  if (cue.year) {
    const int y = *cue.year;
    if (year_clause == YearClause::Exact) {
      q += " year:" + std::to_string(y);
    } else if (year_clause == YearClause::Range) {
      q += " year:[" + std::to_string(y - 1) + " TO " + std::to_string(y + 1) + "]";
    }
  }
  return q;
}

}  // namespace

std::string_view to_string(SortOrder sort) {
  return sort == SortOrder::CitationCountDesc ? "citation_count desc" : "score desc";
}

std::optional<SortOrder> parse_sort_order(std::string_view clause) {
  if (clause.empty() || clause == "score desc") return SortOrder::Relevance;
  if (clause == "citation_count desc") return SortOrder::CitationCountDesc;
  return std::nullopt;
}

const std::vector<std::string>& default_fields() {
  static const std::vector<std::string> fields{"bibcode", "author",         "year", "title",
                                               "abstract", "citation_count", "pub",  "doi"};
  return fields;
}

AdsQuery build_query(const CitationCue& cue) {
  AdsQuery query;
  query.rows = kDefaultRows;
  query.fields = default_fields();
  if (cue.mode == SearchMode::AdsQuery) {
    query.q = cue.ads_query.value_or(cue.raw);
    query.sort = SortOrder::Relevance;
    return query;
  }
  query.q = author_year_q(cue, YearClause::Exact, true);
  query.sort = cue.mode == SearchMode::Simple ? SortOrder::CitationCountDesc : SortOrder::Relevance;
  return query;
}

std::optional<AdsQuery> widen_query(const AdsQuery& prev, const CitationCue& cue, int attempt) {
  if (attempt < 1) throw Error(ErrorKind::InvalidArgument, "widen attempt must be >= 1");
  if (cue.mode == SearchMode::AdsQuery || attempt > kMaxWidenAttempts) return std::nullopt;
  AdsQuery wider = prev;
  switch (attempt) {
    case 1: wider.q = author_year_q(cue, YearClause::Range, true); break;
    case 2: wider.q = author_year_q(cue, YearClause::None, true); break;
    default: wider.q = author_year_q(cue, YearClause::None, false); break;
  }
  return wider;
}

AdsQuery bibcode_query(std::string_view bibcode) {
  AdsQuery query;
  query.q = "bibcode:" + quoted(bibcode);
  query.rows = 1;
  query.fields = default_fields();
  return query;
}

}  // namespace incite
