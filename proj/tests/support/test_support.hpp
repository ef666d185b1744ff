#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "incite/edit_engine.hpp"
#include "incite/mock_server.hpp"

namespace incite::testing {

std::filesystem::path fixture_dir();

std::string slurp(const std::filesystem::path& path);
void spit(const std::filesystem::path& path, std::string_view content);

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Recursively copies a fixture project into `to`.
void copy_tree(const std::filesystem::path& from, const std::filesystem::path& to);

/// Real filesystem operations that throw Error{Io} on the Nth mutating call
/// (write, rename or remove), counting from 1. 0 never fails.
class FaultyFileOps : public FileOps {
 public:
  explicit FaultyFileOps(int fail_at) : fail_at_(fail_at) {}
  std::optional<std::string> read(const std::filesystem::path& path) override;
  void write(const std::filesystem::path& path, std::string_view content) override;
  void rename(const std::filesystem::path& from, const std::filesystem::path& to) override;
  void remove(const std::filesystem::path& path) override;
  int mutations() const { return count_; }

 private:
  void step(const char* what);
  int fail_at_;
  int count_ = 0;
};

/// Files under `dir` whose names contain `needle`.
std::vector<std::filesystem::path> files_containing(const std::filesystem::path& dir, std::string_view needle);

/// Byte offset of the first occurrence of `needle` plus `delta`.
std::size_t offset_of(std::string_view text, std::string_view needle, std::size_t delta = 0);

/// Loads tests/fixtures/corpus.json.
std::vector<CorpusEntry> fixture_corpus();

}  // namespace incite::testing
