#include <gtest/gtest.h>

#include "criteria.hpp"
#include "incite/bib_store.hpp"
#include "incite/error.hpp"

namespace incite {
namespace {

AdsRecord record(std::vector<std::string> authors, int year, std::string bibcode = "2025ApJ...990..101S") {
  AdsRecord r;
  r.authors = std::move(authors);
  r.year = year;
  r.bibcode = std::move(bibcode);
  return r;
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

TEST(ParseBib, MinimalEntry) {
  const auto entries = parse_bib("@ARTICLE{Shariat2025, title={X}}");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].key, "Shariat2025");
  EXPECT_EQ(entries[0].entry_type, "article");
  EXPECT_EQ(entries[0].field("title"), "X");
}

TEST(ParseBib, EmptyFile) {
  EXPECT_TRUE(parse_bib("").empty());
  EXPECT_TRUE(parse_bib_file("   \n% only a comment\n").entries.empty());
}

TEST(ParseBib, MalformedEntrySkippedWithDiagnostic) {
  const auto file = parse_bib_file("@article{broken, title = {unclosed\n\n@misc{good, note = \"ok\"}\n");
  ASSERT_EQ(file.entries.size(), 1u);
  EXPECT_EQ(file.entries[0].key, "good");
  EXPECT_EQ(file.diagnostics.size(), 1u);
}

TEST(ParseBib, PassthroughBlocksAndValueForms) {
  const std::string text =
      "@string{apj = \"ApJ\"}\n@comment{anything {goes} here}\n@preamble{\"\\newcommand{\\x}{y}\"}\n"
      "@Book(key:1,\n  title = {Nested {Braces} kept},\n  journal = apj,\n  year = 1999,\n  note = \"q\" # apj\n)\n";
  const auto file = parse_bib_file(text);
  ASSERT_EQ(file.entries.size(), 1u);
  EXPECT_EQ(file.passthrough.size(), 3u);
  const auto& e = file.entries[0];
  EXPECT_EQ(e.key, "key:1");
  EXPECT_EQ(e.entry_type, "book");
  EXPECT_EQ(e.field("title"), "Nested {Braces} kept");
  EXPECT_EQ(e.field("year"), "1999");
  EXPECT_EQ(e.raw, text.substr(e.span.begin, e.span.size()));
}

TEST(ParseBib, BibcodeFromAdsurl) {
  const auto entries = parse_bib(
      "@ARTICLE{x, adsurl = {https://ui.adsabs.harvard.edu/abs/2016PhRvL.116f1102A}}\n");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].bibcode, "2016PhRvL.116f1102A");
}

TEST(GenerateKey, Styles) {
  const auto r = record({"Shariat, C."}, 2025);
  EXPECT_EQ(generate_key(r, KeyStyle::AuthorYear), "Shariat2025");
  EXPECT_EQ(generate_key(r, KeyStyle::LowerAuthorYear), "shariat2025");
  EXPECT_EQ(generate_key(r, KeyStyle::AuthorColonYear), "Shariat:2025");
  EXPECT_EQ(generate_key(r, KeyStyle::Bibcode), "2025ApJ...990..101S");
  EXPECT_EQ(generate_key(record({"Gaia Collaboration"}, 2021), KeyStyle::AuthorYear), "GaiaCollaboration2021");
  EXPECT_EQ(generate_key(record({"García, Lucía"}, 2020), KeyStyle::AuthorYear), "Garcia2020");
  EXPECT_EQ(generate_key(record({"Foreman-Mackey, D."}, 2013), KeyStyle::AuthorYear), "Foreman-Mackey2013");
}

TEST(GenerateKey, NoAuthors) {
  const auto r = record({}, 2025);
  EXPECT_EQ(kind_of([&] { generate_key(r, KeyStyle::AuthorYear); }), ErrorKind::NoAuthors);
  EXPECT_EQ(generate_key(r, KeyStyle::Bibcode), r.bibcode);
}

TEST(GenerateKey, OutputSatisfiesKeyCharset) {
  for (const char* author : {"O'Brien, P.", "van der Berg, K.", "Ångström, A.", "{de} Sitter, W."}) {
    const auto key = generate_key(record({author}, 2001), KeyStyle::AuthorYear);
    EXPECT_TRUE(is_valid_key(key, KeyStyle::AuthorYear)) << key;
    EXPECT_TRUE(is_valid_key(resolve_collision(key, {key}), KeyStyle::AuthorYear));
  }
  EXPECT_TRUE(is_valid_key("2016A&A...595A...1G", KeyStyle::Bibcode));
  EXPECT_FALSE(is_valid_key("2016A&A...595A...1G", KeyStyle::AuthorYear));
}

TEST(ResolveCollision, Suffixes) {
  EXPECT_EQ(resolve_collision("Shariat2025", {}), "Shariat2025");
  EXPECT_EQ(resolve_collision("Shariat2025", {"Shariat2025"}), "Shariat2025a");
  EXPECT_EQ(resolve_collision("Smith2025", {"Smith2025", "Smith2025a"}), "Smith2025b");
  EXPECT_EQ(resolve_collision("Smith2025", {"smith2025"}), "Smith2025a");
  std::set<std::string> all{"K"};
  for (char c = 'a'; c <= 'z'; ++c) all.insert(std::string("K") + c);
  EXPECT_EQ(resolve_collision("K", all), "Kaa");
}

TEST(FindDuplicate, Rules) {
  const auto entries = parse_bib(
      "@article{byurl, adsurl = {https://ui.adsabs.harvard.edu/abs/2025ApJ...990..101S}}\n"
      "@article{bydoi, doi = {10.1/ABC}}\n"
      "@article{bytitle, title = {Eccentric {W}ide Binaries!}, year = 2025}\n");
  auto r = record({"Shariat, C."}, 2025);
  EXPECT_EQ(find_duplicate(entries, r)->key, "byurl");

  r.bibcode = "2099XXX.....1....Z";
  r.doi = "10.1/abc";
  EXPECT_EQ(find_duplicate(entries, r)->key, "bydoi");

  r.doi.reset();
  r.title = "Eccentric wide binaries";
  EXPECT_EQ(find_duplicate(entries, r)->key, "bytitle");
  r.year = 2024;
  EXPECT_FALSE(find_duplicate(entries, r));
  EXPECT_FALSE(find_duplicate({}, r));
}

TEST(InsertEntry, AppendIntoEmptyFileIsTheEntry) {
  const std::string entry = "@misc{A1,\n  note = {x}\n}\n";
  EXPECT_EQ(insert_entry("", entry, "A1", OrderPolicy::Append), entry);
}

TEST(InsertEntry, AppendAddsOneBlankSeparator) {
  const std::string out = insert_entry("@misc{A,\n}\n", "@misc{B,\n}\n", "B", OrderPolicy::Append);
  EXPECT_EQ(out, "@misc{A,\n}\n\n@misc{B,\n}\n");
}

TEST(InsertEntry, AlphaByKeyGoesBetween) {
  const std::string file = "@misc{Aaa2019, year = 2019}\n\n@misc{Zzz2021, year = 2021}\n";
  const auto out = insert_entry(file, "@misc{Mmm2020, year = 2020}\n", "Mmm2020", OrderPolicy::AlphaByKey);
  const auto keys = parse_bib(out);
  ASSERT_EQ(keys.size(), 3u);
  EXPECT_EQ(keys[0].key, "Aaa2019");
  EXPECT_EQ(keys[1].key, "Mmm2020");
  EXPECT_EQ(keys[2].key, "Zzz2021");
}

TEST(InsertEntry, YearThenAuthor) {
  const std::string file =
      "@misc{b, author = {{Lee}, K.}, year = 2019}\n\n@misc{c, author = {{Zed}, A.}, year = 2020}\n";
  const auto out = insert_entry(file, "@misc{a, author = {{Kim}, J.}, year = {2020}}\n", "a",
                                OrderPolicy::YearThenAuthor);
  const auto e = parse_bib(out);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[1].key, "a");
}

TEST(InsertEntry, DuplicateKeyIsCaseInsensitive) {
  EXPECT_EQ(kind_of([] { insert_entry("@misc{Smith2025,}\n", "@misc{smith2025,}\n", "smith2025", OrderPolicy::Append); }),
            ErrorKind::DuplicateKey);
}

TEST(RekeyEntry, OnlyTheKeyChanges) {
  const std::string in = "@ARTICLE{2025ApJ...990..101S,\n  title = {a, b}\n}\n";
  EXPECT_EQ(rekey_entry(in, "Shariat2025"), "@ARTICLE{Shariat2025,\n  title = {a, b}\n}\n");
  EXPECT_EQ(rekey_entry("@misc( old ,x=1)", "new"), "@misc(new,x=1)");
}

TEST(Policies, NamesRoundTrip) {
  for (auto s : {KeyStyle::AuthorYear, KeyStyle::LowerAuthorYear, KeyStyle::AuthorColonYear, KeyStyle::Bibcode}) {
    EXPECT_EQ(parse_key_style(to_string(s)), s);
  }
  for (auto p : {OrderPolicy::Append, OrderPolicy::AlphaByKey, OrderPolicy::YearThenAuthor}) {
    EXPECT_EQ(parse_order_policy(to_string(p)), p);
  }
  EXPECT_FALSE(parse_key_style("Authoryear"));
  EXPECT_FALSE(parse_order_policy("random"));
}

TEST(BibRoundTrip, SmallFuzz) {
  const auto r = testing::check_bib_roundtrip(100, 11);
  EXPECT_TRUE(r.passed()) << (r.notes.empty() ? "" : r.notes.front());
}

}  // namespace
}  // namespace incite
