#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "incite/ads_record.hpp"
#include "incite/bib_store.hpp"
#include "incite/tex_scanner.hpp"

namespace incite {

struct TexEdit {
  std::string uri;
  ByteRange range;  // the active key's span
  std::string replacement;
  friend bool operator==(const TexEdit&, const TexEdit&) = default;
};

struct BibEdit {
  std::string path;
  std::string new_text;
  friend bool operator==(const BibEdit&, const BibEdit&) = default;
};

/// Result of a selection. `bib_edit` is absent exactly when an existing
/// entry was reused; `tex_edit.replacement` always equals `final_key`.
/// The hashes fingerprint the inputs the plan was computed from.
struct WorkspaceEdit {
  TexEdit tex_edit;
  std::optional<BibEdit> bib_edit;
  std::string final_key;
  bool reused_existing = false;
  std::string tex_hash;
  std::string bib_path;
  std::string bib_hash;
};

WorkspaceEdit plan_edits(const SourceDocument& doc, const CitationSite& site, const AdsRecord& record,
                         std::string_view bibtex, std::string_view bib_text, KeyStyle style,
                         OrderPolicy policy, const std::string& bib_path);

std::string apply_text_edit(std::string_view text, const TexEdit& edit);

/// Full-file content fingerprint used for staleness checks.
std::string content_hash(std::string_view content);

/// Filesystem primitives used by apply_edits; tests substitute a
/// fault-injecting implementation.
class FileOps {
 public:
  virtual ~FileOps() = default;
  /// nullopt when the file does not exist.
  virtual std::optional<std::string> read(const std::filesystem::path& path) = 0;
  virtual void write(const std::filesystem::path& path, std::string_view content) = 0;
  virtual void rename(const std::filesystem::path& from, const std::filesystem::path& to) = 0;
  virtual void remove(const std::filesystem::path& path) = 0;
};

FileOps& real_file_ops();

enum class ApplyMode {
  WriteBoth,  // command line: bib and tex written to disk
  ReturnTex,  // editor protocol: bib written, tex edit handed back
};

struct ApplyReport {
  std::vector<std::string> touched;
  std::string final_key;
  std::optional<TexEdit> pending_tex_edit;
};

/// Writes through temp files and renames. Throws Error{StaleFile} if a
/// target changed since planning, Error{Io} on filesystem failure; in both
/// cases every target is left byte-identical to its state before the call.
ApplyReport apply_edits(const WorkspaceEdit& edit, ApplyMode mode, FileOps& fs = real_file_ops());

}  // namespace incite
