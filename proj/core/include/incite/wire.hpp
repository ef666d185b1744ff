#pragma once

#include <nlohmann/json.hpp>

#include "incite/edit_engine.hpp"
#include "incite/resolver.hpp"

// JSON shapes shared by the protocol server and `--json` CLI output.
namespace incite::wire {

nlohmann::json cue(const CitationCue& cue);
nlohmann::json site(const CitationSite& site);
/// Popup row: first three authors plus "et al.", score breakdown.
nlohmann::json candidate(const ScoredCandidate& candidate);
nlohmann::json resolve_result(const ResolveOutcome& outcome);
nlohmann::json tex_edit(const TexEdit& edit);
nlohmann::json workspace_edit(const WorkspaceEdit& edit);
nlohmann::json scan_result(const ScanOutcome& outcome);

}  // namespace incite::wire
