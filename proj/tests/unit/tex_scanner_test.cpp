#include <gtest/gtest.h>

#include <random>

#include "incite/error.hpp"
#include "incite/tex_scanner.hpp"
#include "test_support.hpp"

namespace incite {
namespace {

using testing::offset_of;

SourceDocument doc(std::string text) { return SourceDocument{"mem.tex", std::move(text)}; }

TEST(ScanDocument, SingleCitep) {
  const auto d = doc("as shown \\citep{Shariat25}.");
  const auto sites = scan_document(d);
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].command, "citep");
  ASSERT_EQ(sites[0].keys.size(), 1u);
  EXPECT_EQ(sites[0].keys[0].raw, "Shariat25");
  const std::size_t at = d.text.find("Shariat25");
  EXPECT_EQ(sites[0].keys[0].span, (ByteRange{at, at + 9}));
  EXPECT_EQ(sites[0].span, (ByteRange{9, d.text.size() - 1}));
}

TEST(ScanDocument, EmptyKeyListIsSkipped) { EXPECT_TRUE(scan_document(doc("\\citep{}")).empty()); }

TEST(ScanDocument, OptionalArgumentsAndKeyList) {
  const auto d = doc("\\citep[e.g.][]{Abbott, Hawking1975}");
  const auto sites = scan_document(d);
  ASSERT_EQ(sites.size(), 1u);
  ASSERT_EQ(sites[0].keys.size(), 2u);
  EXPECT_EQ(sites[0].keys[0].raw, "Abbott");
  EXPECT_EQ(sites[0].keys[1].raw, "Hawking1975");
  EXPECT_EQ(sites[0].active_index, 0u);
  EXPECT_EQ(d.text.substr(sites[0].keys[1].span.begin, sites[0].keys[1].span.size()), "Hawking1975");
}

TEST(ScanDocument, RecognizesFamilyAndStar) {
  const auto d = doc("\\cite{a} \\citet*{b} \\citealt{c} \\citealp{d} \\citeauthor{e} \\citeyear{f} \\citex{g}");
  const auto sites = scan_document(d);
  ASSERT_EQ(sites.size(), 6u);
  EXPECT_EQ(sites[1].command, "citet");
  EXPECT_EQ(sites[5].keys[0].raw, "f");
}

TEST(ScanDocument, ExtraCommandsFromConfig) {
  ScanOptions opts;
  opts.extra_commands = {"parencite"};
  EXPECT_EQ(scan_document(doc("\\parencite{x}"), opts).size(), 1u);
  EXPECT_TRUE(scan_document(doc("\\parencite{x}")).empty());
}

TEST(ScanDocument, SkipsComments) {
  const auto d = doc("% \\citep{Hidden}\ntext \\citep{Shown} 50\\% \\citet{AlsoShown} % \\cite{Gone}\n");
  const auto sites = scan_document(d);
  ASSERT_EQ(sites.size(), 2u);
  EXPECT_EQ(sites[0].keys[0].raw, "Shown");
  EXPECT_EQ(sites[1].keys[0].raw, "AlsoShown");
}

TEST(ScanDocument, NestedBraceAbortsSite) {
  EXPECT_TRUE(scan_document(doc("\\citep{a{b}}")).empty());
  EXPECT_TRUE(scan_document(doc("\\citep{unclosed")).empty());
}

TEST(ScanDocument, MultiWordKeyKeepsInnerSpace) {
  const auto sites = scan_document(doc("\\citep{Astropy Collaboration}"));
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].keys[0].raw, "Astropy Collaboration");
}

TEST(SiteAtPosition, OnYearDigit) {
  const auto d = doc("\\citep{Hawking1975}");
  const auto site = site_at_position(d, offset_of(d.text, "1975"));
  EXPECT_EQ(site.active_index, 0u);
  EXPECT_EQ(site.active_key().raw, "Hawking1975");
}

TEST(SiteAtPosition, PlainTextThrows) {
  try {
    site_at_position(doc("plain text"), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInCitation);
  }
}

TEST(SiteAtPosition, CommaPicksPrecedingKey) {
  const auto d = doc("\\citep{Abbott, Smith25}");
  EXPECT_EQ(site_at_position(d, offset_of(d.text, ",")).active_index, 0u);
  EXPECT_EQ(site_at_position(d, offset_of(d.text, "Smith25", 2)).active_index, 1u);
  EXPECT_EQ(site_at_position(d, offset_of(d.text, "Smith25", -1)).active_index, 0u);
}

TEST(SiteAtPosition, PastEndIsInvalid) {
  try {
    site_at_position(doc("x"), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(ExtractContext, FirstSentenceTerms) {
  const auto d = doc("Triples drive mergers \\citep{Shariat25}. Next sentence.");
  const auto site = scan_document(d).front();
  const auto ctx = extract_context(d, site);
  EXPECT_EQ(ctx.raw, "Triples drive mergers \\citep{Shariat25}.");
  EXPECT_EQ(ctx.terms, (std::vector<std::string>{"triples", "drive", "mergers"}));
}

TEST(ExtractContext, OneSentenceDocument) {
  const auto d = doc("no boundary here \\cite{x} at all");
  const auto ctx = extract_context(d, scan_document(d).front());
  EXPECT_EQ(ctx.raw, d.text);
}

TEST(ExtractContext, AbbreviationsDoNotSplit) {
  const auto d = doc("Intro. dust maps, e.g., \\citep{Schlegel98}, are used. Done.");
  const auto ctx = extract_context(d, scan_document(d).front());
  EXPECT_EQ(ctx.raw, "dust maps, e.g., \\citep{Schlegel98}, are used.");
}

TEST(ExtractContext, BlankLineBoundsSentence) {
  const auto d = doc("heading words\n\nbody text \\cite{x} continues");
  const auto ctx = extract_context(d, scan_document(d).front());
  EXPECT_EQ(ctx.raw, "body text \\cite{x} continues");
}

TEST(ExtractContext, StripsMarkupMathAndShortWords) {
  const auto terms = context_terms(
      "We \\emph{measure} $M_\\odot$ in \\textbf{wide} binaries of Fig.~\\ref{fig:orbit} \\citep{X} an ox");
  EXPECT_EQ(terms, (std::vector<std::string>{"measure", "wide", "binaries", "fig"}));
}

TEST(ExtractContext, AtMostTwentyFiveTerms) {
  std::string text;
  for (int i = 0; i < 40; ++i) text += "word" + std::to_string(i) + " ";
  text += "\\cite{k}.";
  const auto d = doc(text);
  const auto ctx = extract_context(d, scan_document(d).front());
  ASSERT_EQ(ctx.terms.size(), kMaxContextTerms);
  EXPECT_EQ(ctx.terms.front(), "word0");
}

TEST(ListBibTargets, Forms) {
  EXPECT_EQ(list_bib_targets(doc("\\bibliography{refs}")), std::vector<std::string>{"refs.bib"});
  EXPECT_TRUE(list_bib_targets(doc("nothing")).empty());
  EXPECT_EQ(list_bib_targets(doc("\\bibliography{main,extra.bib}")),
            (std::vector<std::string>{"main.bib", "extra.bib"}));
  EXPECT_EQ(list_bib_targets(doc("\\addbibresource{lib/a.bib}\n\\bibliography{b}")),
            (std::vector<std::string>{"lib/a.bib", "b.bib"}));
}

// Property checks over generated documents.
TEST(ScannerProperties, RoundTripPurityAndComments) {
  std::mt19937_64 rng(20251015);
  const std::vector<std::string> pieces{"text ", "more words. ", "\\citep{Smith25}", "\\cite{a, b}",
                                        "\\citet[p.~3]{Abbott}", "% \\cite{commented}\n", "\n\n",
                                        "\\citep{}", "\\cite{x{y}}", "50\\% ", "\\textbf{bold} "};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const int n = std::uniform_int_distribution<int>(0, 20)(rng);
    for (int i = 0; i < n; ++i) text += pieces[std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(rng)];
    const auto d = doc(text);
    const auto sites = scan_document(d);
    EXPECT_EQ(sites, scan_document(d));
    for (const auto& site : sites) {
      ASSERT_FALSE(site.keys.empty());
      std::size_t prev_end = site.span.begin;
      for (const auto& key : site.keys) {
        EXPECT_EQ(d.text.substr(key.span.begin, key.span.size()), key.raw);
        EXPECT_GE(key.span.begin, prev_end);
        EXPECT_LE(key.span.end, site.span.end);
        prev_end = key.span.end;
        EXPECT_NE(key.raw, "commented");
      }
    }
    for (std::size_t o = 0; o <= d.text.size(); ++o) {
      bool inside = false;
      for (const auto& s : sites) inside = inside || s.span.contains(o);
      bool found = true;
      try {
        site_at_position(d, o);
      } catch (const Error&) {
        found = false;
      }
      ASSERT_EQ(found, inside) << "offset " << o << " in: " << text;
    }
  }
}

}  // namespace
}  // namespace incite
