#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "incite/ads_record.hpp"
#include "incite/cue_grammar.hpp"
#include "incite/tex_scanner.hpp"

namespace incite {

/// Point values for the contextual score. Defaults are frozen by the tests.
struct ScoreWeights {
  double first_author = 40.0;
  double later_author = 10.0;
  double year_exact = 20.0;
  double year_adjacent = 12.0;
  double initial = 8.0;
  double context = 20.0;
  double popularity_cap = 5.0;
};

struct ScoredCandidate {
  AdsRecord record;
  double s_author = 0.0;
  double s_year = 0.0;
  double s_initial = 0.0;
  double s_context = 0.0;
  double s_popularity = 0.0;
  double total = 0.0;  // exactly the sum of the five components, in that order
};

/// Where the cue's surname matched in a byline.
struct AuthorMatch {
  std::size_t position = 0;  // 0 = first author
  bool initial_matches = false;
};

/// Best-scoring byline position for the cue: a first-author match beats a
/// later one, and an initial match breaks ties between equal positions.
std::optional<AuthorMatch> match_author(const CitationCue& cue, std::span<const std::string> authors,
                                        const ScoreWeights& weights = {});

/// |distinct context terms found in title + abstract| / max(1, |distinct context terms|).
double context_overlap(std::span<const std::string> context_terms, const AdsRecord& record);
double context_overlap(const SentenceContext& ctx, const AdsRecord& record);

/// Orders candidates for the popup. `ctx` may be null (and is ignored
/// outside contextual mode).
///
/// - Contextual: every candidate is scored; total desc, citations desc,
///   bibcode asc.
/// - Simple: only records matching surname (any position), initial and
///   exact year survive; citations desc, bibcode asc.
/// - AdsQuery: server order, zero scores.
std::vector<ScoredCandidate> rank(const CitationCue& cue, const SentenceContext* ctx,
                                  std::span<const AdsRecord> candidates,
                                  const ScoreWeights& weights = {});

}  // namespace incite
