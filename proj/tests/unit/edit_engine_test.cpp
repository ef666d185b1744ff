#include <gtest/gtest.h>

#include <thread>

#include "criteria.hpp"
#include "incite/edit_engine.hpp"
#include "incite/error.hpp"
#include "incite/tex_scanner.hpp"
#include "test_support.hpp"

namespace incite {
namespace {

using testing::slurp;
using testing::spit;
using testing::TempDir;

const CorpusEntry& shariat() {
  static const auto corpus = testing::fixture_corpus();
  for (const auto& e : corpus) {
    if (e.record.bibcode == "2025ApJ...990..101S") return e;
  }
  throw std::runtime_error("fixture record missing");
}

struct Planned {
  SourceDocument doc;
  WorkspaceEdit edit;
};

Planned plan(const std::string& tex_path, const std::string& text, std::string_view at, const std::string& bib_text,
             const std::string& bib_path, KeyStyle style = KeyStyle::AuthorYear) {
  SourceDocument doc{tex_path, text};
  const auto site = site_at_position(doc, text.find(at));
  return {doc, plan_edits(doc, site, shariat().record, shariat().bibtex, bib_text, style, OrderPolicy::Append,
                          bib_path)};
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

TEST(PlanEdits, RekeysAndInsertsOneEntry) {
  const std::string text = "Wide binaries \\citep{Shariat25}.";
  const auto p = plan("paper.tex", text, "Shariat25", "", "refs.bib");
  EXPECT_EQ(p.edit.final_key, "Shariat2025");
  EXPECT_EQ(p.edit.tex_edit.replacement, "Shariat2025");
  EXPECT_EQ(text.substr(p.edit.tex_edit.range.begin, p.edit.tex_edit.range.size()), "Shariat25");
  ASSERT_TRUE(p.edit.bib_edit);
  EXPECT_FALSE(p.edit.reused_existing);
  const auto entries = parse_bib(p.edit.bib_edit->new_text);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].key, "Shariat2025");
  EXPECT_EQ(entries[0].bibcode, "2025ApJ...990..101S");
  EXPECT_EQ(apply_text_edit(text, p.edit.tex_edit), "Wide binaries \\citep{Shariat2025}.");
}

TEST(PlanEdits, ReusesExistingEntry) {
  const std::string bib =
      "@article{shariat_triples,\n  adsurl = {https://ui.adsabs.harvard.edu/abs/2025ApJ...990..101S}\n}\n";
  const auto p = plan("paper.tex", "\\citep{Shariat25}", "Shariat25", bib, "refs.bib");
  EXPECT_EQ(p.edit.final_key, "shariat_triples");
  EXPECT_TRUE(p.edit.reused_existing);
  EXPECT_FALSE(p.edit.bib_edit);
}

TEST(PlanEdits, OnlyActiveKeyReplaced) {
  const std::string text = "\\citep{Abbott, Hawking1975}";
  const auto p = plan("paper.tex", text, "Abbott", "", "refs.bib");
  const std::string out = apply_text_edit(text, p.edit.tex_edit);
  EXPECT_EQ(out, "\\citep{Shariat2025, Hawking1975}");
}

TEST(PlanEdits, CollidingKeyGetsSuffix) {
  const auto p = plan("paper.tex", "\\citep{Shariat25}", "Shariat25", "@misc{Shariat2025, note = {other}}\n", "refs.bib");
  EXPECT_EQ(p.edit.final_key, "Shariat2025a");
  EXPECT_EQ(p.edit.tex_edit.replacement, p.edit.final_key);
}

TEST(PlanEdits, KeyStyleApplies) {
  EXPECT_EQ(plan("p.tex", "\\cite{x}", "x", "", "r.bib", KeyStyle::LowerAuthorYear).edit.final_key, "shariat2025");
  EXPECT_EQ(plan("p.tex", "\\cite{x}", "x", "", "r.bib", KeyStyle::Bibcode).edit.final_key, "2025ApJ...990..101S");
}

TEST(ApplyEdits, WriteBothUpdatesFiles) {
  TempDir dir;
  const std::string text = "See \\citep{Shariat25}.\n";
  spit(dir / "paper.tex", text);
  const auto p = plan((dir / "paper.tex").string(), text, "Shariat25", "", (dir / "refs.bib").string());
  const auto report = apply_edits(p.edit, ApplyMode::WriteBoth);
  EXPECT_EQ(report.touched.size(), 2u);
  EXPECT_EQ(report.final_key, "Shariat2025");
  EXPECT_FALSE(report.pending_tex_edit);
  EXPECT_EQ(slurp(dir / "paper.tex"), "See \\citep{Shariat2025}.\n");
  EXPECT_EQ(slurp(dir / "refs.bib"), p.edit.bib_edit->new_text);
}

TEST(ApplyEdits, ReturnTexLeavesTexAlone) {
  TempDir dir;
  const std::string text = "See \\citep{Shariat25}.\n";
  spit(dir / "paper.tex", text);
  const auto p = plan((dir / "paper.tex").string(), text, "Shariat25", "", (dir / "refs.bib").string());
  const auto report = apply_edits(p.edit, ApplyMode::ReturnTex);
  ASSERT_TRUE(report.pending_tex_edit);
  EXPECT_EQ(*report.pending_tex_edit, p.edit.tex_edit);
  EXPECT_EQ(slurp(dir / "paper.tex"), text);
  EXPECT_TRUE(std::filesystem::exists(dir / "refs.bib"));
}

TEST(ApplyEdits, StaleBibRejectedAndNothingWritten) {
  TempDir dir;
  const std::string text = "See \\citep{Shariat25}.\n";
  spit(dir / "paper.tex", text);
  spit(dir / "refs.bib", "@misc{a,}\n");
  const auto p = plan((dir / "paper.tex").string(), text, "Shariat25", "@misc{a,}\n", (dir / "refs.bib").string());
  spit(dir / "refs.bib", "@misc{a,}\n@misc{b,}\n");
  EXPECT_EQ(kind_of([&] { apply_edits(p.edit, ApplyMode::WriteBoth); }), ErrorKind::StaleFile);
  EXPECT_EQ(slurp(dir / "paper.tex"), text);
  EXPECT_EQ(slurp(dir / "refs.bib"), "@misc{a,}\n@misc{b,}\n");
}

TEST(ApplyEdits, StaleTexRejected) {
  TempDir dir;
  const std::string text = "See \\citep{Shariat25}.\n";
  spit(dir / "paper.tex", text);
  const auto p = plan((dir / "paper.tex").string(), text, "Shariat25", "", (dir / "refs.bib").string());
  spit(dir / "paper.tex", "edited\n");
  EXPECT_EQ(kind_of([&] { apply_edits(p.edit, ApplyMode::WriteBoth); }), ErrorKind::StaleFile);
  EXPECT_FALSE(std::filesystem::exists(dir / "refs.bib"));
}

TEST(ApplyEdits, ReselectionReusesAndKeepsBibBytes) {
  TempDir dir;
  const std::string text = "A \\citep{Shariat25} and B \\citep{Shariat25}.\n";
  spit(dir / "paper.tex", text);
  const auto first = plan((dir / "paper.tex").string(), text, "Shariat25", "", (dir / "refs.bib").string());
  apply_edits(first.edit, ApplyMode::WriteBoth);
  const std::string bib = slurp(dir / "refs.bib");
  const std::string text2 = slurp(dir / "paper.tex");
  const auto second = plan((dir / "paper.tex").string(), text2, "Shariat25", bib, (dir / "refs.bib").string());
  EXPECT_TRUE(second.edit.reused_existing);
  apply_edits(second.edit, ApplyMode::WriteBoth);
  EXPECT_EQ(slurp(dir / "refs.bib"), bib);
  EXPECT_EQ(slurp(dir / "paper.tex"), "A \\citep{Shariat2025} and B \\citep{Shariat2025}.\n");
}

TEST(ApplyEdits, ConcurrentAppliesToOneBibSerialize) {
  TempDir dir;
  spit(dir / "refs.bib", "");
  std::vector<std::thread> threads;
  std::atomic<int> stale{0}, ok{0};
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      const std::string name = "p" + std::to_string(i) + ".tex";
      const std::string text = "\\cite{K" + std::to_string(i) + "}";
      spit(dir / name, text);
      const auto p = plan((dir / name).string(), text, "K", "", (dir / "refs.bib").string());
      try {
        apply_edits(p.edit, ApplyMode::WriteBoth);
        ++ok;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::StaleFile) ++stale;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok + stale, 8);
  EXPECT_GE(ok.load(), 1);
  EXPECT_EQ(parse_bib(slurp(dir / "refs.bib")).size(), 1u);
}

TEST(Atomicity, InjectedFailuresLeaveFilesIntact) {
  const auto r = testing::check_atomicity(3, 5);
  EXPECT_TRUE(r.passed()) << (r.notes.empty() ? "" : r.notes.front());
}

}  // namespace
}  // namespace incite
