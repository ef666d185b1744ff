#include "incite/wire.hpp"

namespace incite::wire {

using nlohmann::json;

namespace {

template <typename T>
json nullable(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json cue(const CitationCue& c) {
  return {{"raw", c.raw},
          {"mode", to_string(c.mode)},
          {"surname", nullable(c.surname)},
          {"initial", c.initial ? json(std::string(1, *c.initial)) : json(nullptr)},
          {"year", nullable(c.year)},
          {"is_collaboration", c.is_collaboration},
          {"ads_query", nullable(c.ads_query)}};
}

json site(const CitationSite& s) {
  json keys = json::array();
  for (const auto& k : s.keys) {
    keys.push_back({{"key", k.raw}, {"start", k.span.begin}, {"end", k.span.end}});
  }
  return {{"command", s.command},
          {"start", s.span.begin},
          {"end", s.span.end},
          {"keys", keys},
          {"active_index", s.active_index}};
}

json candidate(const ScoredCandidate& c) {
  const auto& r = c.record;
  json authors = json::array();
  for (std::size_t i = 0; i < r.authors.size() && i < 3; ++i) authors.push_back(r.authors[i]);
  if (r.authors.size() > 3) authors.push_back("et al.");
  return {{"bibcode", r.bibcode},
          {"title", r.title},
          {"authors", authors},
          {"year", r.year},
          {"pub", nullable(r.pub)},
          {"citation_count", r.citation_count},
          {"score_total", c.total},
          {"score_components",
           {{"author", c.s_author},
            {"year", c.s_year},
            {"initial", c.s_initial},
            {"context", c.s_context},
            {"popularity", c.s_popularity}}}};
}

json resolve_result(const ResolveOutcome& o) {
  json candidates = json::array();
  for (const auto& c : o.candidates) candidates.push_back(candidate(c));
  return {{"cue", cue(o.cue)},
          {"candidates", candidates},
          {"widened", o.widened},
          {"query", o.query.q},
          {"site", site(o.site)}};
}

json tex_edit(const TexEdit& e) {
  return {{"uri", e.uri}, {"start", e.range.begin}, {"end", e.range.end}, {"replacement", e.replacement}};
}

json workspace_edit(const WorkspaceEdit& e) {
  json bib = nullptr;
  if (e.bib_edit) bib = {{"path", e.bib_edit->path}, {"text", e.bib_edit->new_text}};
  return {{"tex_edit", tex_edit(e.tex_edit)},
          {"bib_edit", bib},
          {"final_key", e.final_key},
          {"reused_existing", e.reused_existing}};
}

json scan_result(const ScanOutcome& o) {
  json sites = json::array();
  for (const auto& s : o.sites) sites.push_back(site(s));
  return {{"sites", sites}, {"unresolved", o.unresolved}, {"bib_files", o.bib_files}};
}

}  // namespace incite::wire
