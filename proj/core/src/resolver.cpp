#include "incite/resolver.hpp"

#include <set>

#include "incite/error.hpp"
#include "incite/text.hpp"

namespace incite {

namespace fs = std::filesystem;

Engine::Engine(std::shared_ptr<AdsClient> client, Config config, fs::path root)
    : client_(std::move(client)), config_(std::move(config)), root_(std::move(root)) {}

AdsClient& Engine::client() const {
  if (!client_) throw Error(ErrorKind::AuthFailed, "no ADS API token configured");
  return *client_;
}

ScanOptions Engine::scan_options() const { return ScanOptions{config_.cite_commands}; }

fs::path Engine::document_dir(const SourceDocument& doc) const {
  if (doc.uri.empty() || doc.uri.find("://") != std::string::npos) return root_;
  const fs::path parent = fs::path(doc.uri).parent_path();
  return parent.empty() ? root_ : (parent.is_absolute() ? parent : root_ / parent);
}

fs::path Engine::target_bib_path(const SourceDocument& doc,
                                 const std::optional<std::string>& explicit_target) const {
  if (explicit_target && !explicit_target->empty()) return root_ / *explicit_target;
  if (config_.target_bib && !config_.target_bib->empty()) return root_ / *config_.target_bib;
  const auto targets = list_bib_targets(doc);
  if (targets.empty()) {
    throw Error(ErrorKind::NoBibTarget,
                "no target bibliography: pass one explicitly, set target_bib, or add \\bibliography");
  }
  return document_dir(doc) / targets.front();
}

ResolveOutcome Engine::resolve(const SourceDocument& doc, std::size_t offset,
                               const ResolveOptions& options) const {
  ResolveOutcome out;
  out.site = site_at_position(doc, offset, scan_options());
  out.cue = parse_cue(out.site.active_key().raw, options.mode.value_or(config_.default_mode));
  if (out.cue.mode == SearchMode::Contextual) {
    out.context = extract_context(doc, out.site, scan_options());
  }

  const AdsQuery base = build_query(out.cue);
  out.query = base;
  // In simple mode the ranker re-applies the cue as a filter, so it has to
  // be relaxed in step with the query.
  CitationCue filter_cue = out.cue;
  auto records = client().search(base).records;
  auto ranked = rank(filter_cue, out.context ? &*out.context : nullptr, records, config_.weights);

  std::set<std::string> tried{base.q};
  for (int attempt = 1; ranked.empty(); ++attempt) {
    const auto wider = widen_query(base, out.cue, attempt);
    if (!wider) break;
    if (out.cue.mode == SearchMode::Simple) {
      filter_cue.year.reset();
      if (attempt >= 3) filter_cue.initial.reset();
    }
    if (!tried.insert(wider->q).second) continue;
    out.query = *wider;
    out.widened = true;
    records = client().search(*wider).records;
    ranked = rank(filter_cue, out.context ? &*out.context : nullptr, records, config_.weights);
  }
  if (ranked.empty()) {
    throw Error(ErrorKind::EmptyResults, "no ADS records match '" + out.cue.raw + "'");
  }
  if (ranked.size() > options.max_results) ranked.resize(options.max_results);
  out.candidates = std::move(ranked);
  return out;
}

SelectOutcome Engine::select(const SourceDocument& doc, std::size_t offset, std::string_view bibcode,
                             const SelectOptions& options) const {
  // Validate the position before spending a request.
  (void)site_at_position(doc, offset, scan_options());
  const auto result = client().search(bibcode_query(bibcode));
  for (const auto& rec : result.records) {
    if (rec.bibcode == bibcode) return select_record(doc, offset, rec, options);
  }
  throw Error(ErrorKind::NotFound, "unknown bibcode: " + std::string(bibcode));
}

SelectOutcome Engine::select_record(const SourceDocument& doc, std::size_t offset,
                                    const AdsRecord& record, const SelectOptions& options) const {
  const CitationSite site = site_at_position(doc, offset, scan_options());
  const fs::path bib_path = target_bib_path(doc, options.target_bib);
  const std::string bib_text = real_file_ops().read(bib_path).value_or("");

  std::string bibtex;
  if (!find_duplicate(parse_bib(bib_text), record)) {
    const std::vector<std::string> bibcodes{record.bibcode};
    bibtex = client().export_bibtex(bibcodes);
  }

  SelectOutcome out;
  out.edit = plan_edits(doc, site, record, bibtex, bib_text,
                        options.key_style.value_or(config_.key_style),
                        options.order_policy.value_or(config_.order_policy), bib_path.string());
  if (!options.dry_run) out.report = apply_edits(out.edit, options.apply_mode);
  return out;
}

ScanOutcome Engine::scan(const SourceDocument& doc) const {
  ScanOutcome out;
  out.sites = scan_document(doc, scan_options());

  std::vector<fs::path> bibs;
  if (config_.target_bib && !config_.target_bib->empty()) {
    bibs.push_back(root_ / *config_.target_bib);
  } else {
    for (const auto& t : list_bib_targets(doc)) bibs.push_back(document_dir(doc) / t);
  }
  std::set<std::string> known;
  for (const auto& path : bibs) {
    out.bib_files.push_back(path.string());
    for (const auto& e : parse_bib(real_file_ops().read(path).value_or(""))) {
      known.insert(text::to_lower_ascii(e.key));
    }
  }
  std::set<std::string> reported;
  for (const auto& site : out.sites) {
    for (const auto& key : site.keys) {
      if (known.contains(text::to_lower_ascii(key.raw))) continue;
      if (reported.insert(key.raw).second) out.unresolved.push_back(key.raw);
    }
  }
  return out;
}

}  // namespace incite
