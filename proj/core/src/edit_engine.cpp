#include "incite/edit_engine.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "incite/bib_store.hpp"
#include "incite/error.hpp"
#include "incite/text.hpp"

namespace incite {

namespace fs = std::filesystem;

namespace {

class RealFileOps final : public FileOps {
 public:
  std::optional<std::string> read(const fs::path& path) override {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::error_code ec;
      if (!fs::exists(path, ec)) return std::nullopt;
      throw Error(ErrorKind::Io, "cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const fs::path& path, std::string_view content) override {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  }

  void rename(const fs::path& from, const fs::path& to) override {
    std::error_code ec;
    fs::rename(from, to, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot rename " + from.string() + ": " + ec.message());
  }

  void remove(const fs::path& path) override {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

// One mutex per target path, held for the duration of an apply.
std::mutex& path_mutex(const std::string& key) {
  static std::mutex registry_mu;
  static std::map<std::string, std::unique_ptr<std::mutex>> registry;
  std::lock_guard lock(registry_mu);
  auto& slot = registry[key];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::string lock_key(const std::string& path) {
  std::error_code ec;
  const fs::path abs = fs::weakly_canonical(fs::path(path), ec);
  return ec ? path : abs.string();
}

fs::path temp_path(const fs::path& target) {
  fs::path tmp = target;
  tmp += ".incite-tmp";
  return tmp;
}

struct Target {
  fs::path path;
  std::optional<std::string> original;
  std::string next;
  bool staged = false;
  bool committed = false;
};

void roll_back(std::vector<Target>& targets, FileOps& files) {
  for (auto& t : targets) {
    try {
      if (t.committed) {
        if (t.original) {
          files.write(temp_path(t.path), *t.original);
          files.rename(temp_path(t.path), t.path);
        } else {
          files.remove(t.path);
        }
      } else if (t.staged) {
        files.remove(temp_path(t.path));
      }
    } catch (const Error&) {
    }
  }
}

}  // namespace

FileOps& real_file_ops() {
  static RealFileOps ops;
  return ops;
}

std::string content_hash(std::string_view content) { return text::fnv1a_hex(content); }

std::string apply_text_edit(std::string_view text, const TexEdit& edit) {
  if (edit.range.begin > edit.range.end || edit.range.end > text.size()) {
    throw Error(ErrorKind::StaleFile, "edit range outside document");
  }
  std::string out(text.substr(0, edit.range.begin));
  out += edit.replacement;
  out += text.substr(edit.range.end);
  return out;
}

WorkspaceEdit plan_edits(const SourceDocument& doc, const CitationSite& site, const AdsRecord& record,
                         std::string_view bibtex, std::string_view bib_text, KeyStyle style,
                         OrderPolicy policy, const std::string& bib_path) {
  if (site.active_index >= site.keys.size()) {
    throw Error(ErrorKind::InvalidArgument, "citation site has no active key");
  }
  WorkspaceEdit edit;
  edit.tex_hash = content_hash(doc.text);
  edit.bib_path = bib_path;
  edit.bib_hash = content_hash(bib_text);

  const auto entries = parse_bib(bib_text);
  if (auto dup = find_duplicate(entries, record)) {
    edit.final_key = dup->key;
    edit.reused_existing = true;
  } else {
    std::set<std::string> keys;
    for (const auto& e : entries) keys.insert(e.key);
    edit.final_key = resolve_collision(generate_key(record, style), keys);

    const auto exported = parse_bib(bibtex);
    if (exported.empty()) {
      throw Error(ErrorKind::MalformedResponse, "export for " + record.bibcode + " has no BibTeX entry");
    }
    const std::string entry = rekey_entry(exported.front().raw, edit.final_key);
    edit.bib_edit = BibEdit{bib_path, insert_entry(bib_text, entry, edit.final_key, policy)};
  }
  edit.tex_edit = TexEdit{doc.uri, site.active_key().span, edit.final_key};
  return edit;
}

ApplyReport apply_edits(const WorkspaceEdit& edit, ApplyMode mode, FileOps& files) {
  std::vector<Target> targets;
  std::vector<std::string> lock_keys;
  if (edit.bib_edit) lock_keys.push_back(lock_key(edit.bib_edit->path));
  if (mode == ApplyMode::WriteBoth) lock_keys.push_back(lock_key(edit.tex_edit.uri));
  std::sort(lock_keys.begin(), lock_keys.end());
  lock_keys.erase(std::unique(lock_keys.begin(), lock_keys.end()), lock_keys.end());
  std::vector<std::unique_lock<std::mutex>> locks;
  for (const auto& k : lock_keys) locks.emplace_back(path_mutex(k));

  if (edit.bib_edit) {
    Target t{fs::path(edit.bib_edit->path), files.read(edit.bib_edit->path), edit.bib_edit->new_text};
    if (content_hash(t.original.value_or("")) != edit.bib_hash) {
      throw Error(ErrorKind::StaleFile, edit.bib_edit->path + " changed since the edit was planned");
    }
    targets.push_back(std::move(t));
  }
  if (mode == ApplyMode::WriteBoth) {
    Target t{fs::path(edit.tex_edit.uri), files.read(edit.tex_edit.uri), {}};
    if (!t.original || content_hash(*t.original) != edit.tex_hash) {
      throw Error(ErrorKind::StaleFile, edit.tex_edit.uri + " changed since the edit was planned");
    }
    t.next = apply_text_edit(*t.original, edit.tex_edit);
    targets.push_back(std::move(t));
  }

  try {
    for (auto& t : targets) {
      t.staged = true;
      files.write(temp_path(t.path), t.next);
    }
    for (auto& t : targets) {
      files.rename(temp_path(t.path), t.path);
      t.committed = true;
    }
  } catch (const Error&) {
    roll_back(targets, files);
    throw;
  } catch (const std::exception& e) {
    roll_back(targets, files);
    throw Error(ErrorKind::Io, e.what());
  }

  ApplyReport report;
  report.final_key = edit.final_key;
  for (const auto& t : targets) report.touched.push_back(t.path.string());
  if (mode == ApplyMode::ReturnTex) report.pending_tex_edit = edit.tex_edit;
  return report;
}

}  // namespace incite
