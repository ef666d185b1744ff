#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "incite/ads_client.hpp"
#include "incite/config.hpp"
#include "incite/cue_grammar.hpp"
#include "incite/edit_engine.hpp"
#include "incite/query_builder.hpp"
#include "incite/ranker.hpp"
#include "incite/tex_scanner.hpp"

namespace incite {

inline constexpr std::size_t kDefaultMaxResults = 8;

struct ResolveOptions {
  std::optional<SearchMode> mode;  // falls back to Config::default_mode
  std::size_t max_results = kDefaultMaxResults;
};

struct ResolveOutcome {
  CitationSite site;
  CitationCue cue;
  std::optional<SentenceContext> context;
  std::vector<ScoredCandidate> candidates;
  AdsQuery query;  // the query that produced the candidates
  bool widened = false;
};

struct SelectOptions {
  std::optional<KeyStyle> key_style;
  std::optional<OrderPolicy> order_policy;
  std::optional<std::string> target_bib;
  ApplyMode apply_mode = ApplyMode::WriteBoth;
  bool dry_run = false;
};

struct SelectOutcome {
  WorkspaceEdit edit;
  std::optional<ApplyReport> report;  // absent on dry runs
};

struct ScanOutcome {
  std::vector<CitationSite> sites;
  std::vector<std::string> unresolved;  // distinct keys, first-occurrence order
  std::vector<std::string> bib_files;
};

/// The end-to-end pipeline shared by the command line and the editor
/// protocol. Relative bibliography paths from `\bibliography` resolve
/// against the document's directory (when its uri is a path), explicit and
/// configured targets against `root`.
class Engine {
 public:
  Engine(std::shared_ptr<AdsClient> client, Config config, std::filesystem::path root);

  /// site -> cue -> context -> query (+ widening) -> search -> rank -> truncate.
  ResolveOutcome resolve(const SourceDocument& doc, std::size_t offset,
                         const ResolveOptions& options = {}) const;

  /// Looks the record up by bibcode first; a stateless selection.
  SelectOutcome select(const SourceDocument& doc, std::size_t offset, std::string_view bibcode,
                       const SelectOptions& options = {}) const;
  SelectOutcome select_record(const SourceDocument& doc, std::size_t offset,
                              const AdsRecord& record, const SelectOptions& options = {}) const;

  ScanOutcome scan(const SourceDocument& doc) const;

  /// Request value, then config, then the first `\bibliography` target.
  /// Throws Error{NoBibTarget} when all three are absent.
  std::filesystem::path target_bib_path(const SourceDocument& doc,
                                        const std::optional<std::string>& explicit_target) const;

  const Config& config() const { return config_; }
  Config& config() { return config_; }
  const std::filesystem::path& root() const { return root_; }

 private:
  AdsClient& client() const;
  ScanOptions scan_options() const;
  std::filesystem::path document_dir(const SourceDocument& doc) const;

  std::shared_ptr<AdsClient> client_;
  Config config_;
  std::filesystem::path root_;
};

}  // namespace incite
