#include "incite/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "incite/text.hpp"

namespace incite {

namespace {

struct AuthorName {
  std::string last;
  std::optional<char> initial;
};

std::string compact(std::string s) {
  std::erase(s, ' ');
  return s;
}

AuthorName split_author(std::string_view author) {
  AuthorName name;
  const std::size_t comma = author.find(',');
  name.last = text::fold_for_match(text::trim(author.substr(0, comma)));
  if (comma != std::string_view::npos) {
    const std::string first = text::fold_diacritics(text::trim(author.substr(comma + 1)));
    if (!first.empty() && text::is_ascii_alpha(first.front())) {
      char c = first.front();
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      name.initial = c;
    }
  }
  return name;
}

bool surname_matches(const CitationCue& cue, const std::string& folded_cue, std::string_view author,
                     const AuthorName& name) {
  if (cue.is_collaboration) {
    return text::fold_for_match(author).find(folded_cue) != std::string::npos;
  }
  return compact(name.last) == compact(folded_cue);
}

bool better(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.total != b.total) return a.total > b.total;
  if (a.record.citation_count != b.record.citation_count) {
    return a.record.citation_count > b.record.citation_count;
  }
  return a.record.bibcode < b.record.bibcode;
}

bool more_cited(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.record.citation_count != b.record.citation_count) {
    return a.record.citation_count > b.record.citation_count;
  }
  return a.record.bibcode < b.record.bibcode;
}

bool any_author_with_initial(const CitationCue& cue, std::span<const std::string> authors) {
  const std::string folded_cue = text::fold_for_match(*cue.surname);
  return std::any_of(authors.begin(), authors.end(), [&](const std::string& author) {
    const AuthorName name = split_author(author);
    return surname_matches(cue, folded_cue, author, name) && name.initial == cue.initial;
  });
}

}  // namespace

std::optional<AuthorMatch> match_author(const CitationCue& cue, std::span<const std::string> authors,
                                        const ScoreWeights& weights) {
  if (!cue.surname || cue.surname->empty()) return std::nullopt;
  const std::string folded_cue = text::fold_for_match(*cue.surname);
  std::optional<AuthorMatch> best;
  double best_points = -1.0;
  for (std::size_t i = 0; i < authors.size(); ++i) {
    const AuthorName name = split_author(authors[i]);
    if (!surname_matches(cue, folded_cue, authors[i], name)) continue;
    const bool initial_ok = cue.initial && name.initial && *name.initial == *cue.initial;
    const double points =
        (i == 0 ? weights.first_author : weights.later_author) + (initial_ok ? weights.initial : 0.0);
    if (points > best_points) {
      best_points = points;
      best = AuthorMatch{i, initial_ok};
    }
  }
  return best;
}

double context_overlap(std::span<const std::string> context_terms, const AdsRecord& record) {
  const std::unordered_set<std::string> wanted(context_terms.begin(), context_terms.end());
  if (wanted.empty()) return 0.0;
  std::string haystack = record.title;
  if (record.abstract) {
    haystack += ' ';
    haystack += *record.abstract;
  }
  const auto tokens = text::word_tokens(haystack);
  const std::unordered_set<std::string> present(tokens.begin(), tokens.end());
  std::size_t hits = 0;
  for (const auto& term : wanted) {
    if (present.contains(term)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(wanted.size());
}

double context_overlap(const SentenceContext& ctx, const AdsRecord& record) {
  return context_overlap(ctx.terms, record);
}

std::vector<ScoredCandidate> rank(const CitationCue& cue, const SentenceContext* ctx,
                                  std::span<const AdsRecord> candidates, const ScoreWeights& weights) {
  std::vector<ScoredCandidate> out;
  out.reserve(candidates.size());

  if (cue.mode == SearchMode::AdsQuery) {
    for (const auto& rec : candidates) out.push_back(ScoredCandidate{.record = rec});
    return out;
  }

  const bool use_context = cue.mode == SearchMode::Contextual && ctx != nullptr;
  for (const auto& rec : candidates) {
    ScoredCandidate c{.record = rec};
    const auto match = match_author(cue, rec.authors, weights);
    if (match) {
      c.s_author = match->position == 0 ? weights.first_author : weights.later_author;
      c.s_initial = match->initial_matches ? weights.initial : 0.0;
    }
    if (!cue.year) {
      c.s_year = weights.year_exact;
    } else if (rec.year == *cue.year) {
      c.s_year = weights.year_exact;
    } else if (std::abs(rec.year - *cue.year) == 1) {
      c.s_year = weights.year_adjacent;
    }
    c.s_context = use_context ? weights.context * context_overlap(*ctx, rec) : 0.0;
    c.s_popularity =
        std::min(weights.popularity_cap, std::log10(1.0 + static_cast<double>(rec.citation_count)));
    c.total = c.s_author + c.s_year + c.s_initial + c.s_context + c.s_popularity;

    if (cue.mode == SearchMode::Simple) {
      if (!match) continue;
      if (cue.initial && !any_author_with_initial(cue, rec.authors)) continue;
      if (cue.year && rec.year != *cue.year) continue;
    }
    out.push_back(std::move(c));
  }

  std::stable_sort(out.begin(), out.end(), cue.mode == SearchMode::Simple ? more_cited : better);
  return out;
}

}  // namespace incite
