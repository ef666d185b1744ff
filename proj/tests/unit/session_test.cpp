#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "incite/session.hpp"
#include "incite/transport.hpp"
#include "test_support.hpp"

namespace incite {
namespace {

using nlohmann::json;
using testing::fixture_dir;
using testing::slurp;
using testing::TempDir;

class SessionTest : public ::testing::Test {
 protected:
  SessionTest()
      : client_(std::make_shared<AdsClient>(std::make_shared<ReplayTransport>(fixture_dir() / "replay"), "replay")),
        engine_(client_, Config{}, dir_.path()),
        session_(engine_) {
    testing::copy_tree(fixture_dir() / "walkthrough" / "project", dir_.path());
    text_ = slurp(dir_ / "paper.tex");
  }

  json call(const std::string& method, json params, json id = 1) {
    const auto out = session_.handle({{"jsonrpc", "2.0"}, {"id", id}, {"method", method}, {"params", params}});
    EXPECT_TRUE(out);
    return out ? *out : json();
  }
  std::size_t cursor() const { return text_.find("Shariat25") + 3; }

  TempDir dir_;
  std::shared_ptr<AdsClient> client_;
  Engine engine_;
  Session session_;
  std::string text_;
};

TEST_F(SessionTest, ResolveReturnsFixturePaperFirst) {
  const json r = call("overcite/resolve", {{"uri", "paper.tex"}, {"text", text_}, {"offset", cursor()}});
  ASSERT_TRUE(r.contains("result")) << r.dump();
  const auto& cands = r["result"]["candidates"];
  ASSERT_FALSE(cands.empty());
  EXPECT_EQ(cands[0]["bibcode"], "2025ApJ...990..101S");
  EXPECT_EQ(r["result"]["widened"], false);
  EXPECT_EQ(r["result"]["cue"]["surname"], "Shariat");
  for (const auto& c : cands) {
    EXPECT_TRUE(c.contains("score_total"));
    EXPECT_TRUE(c.contains("score_components"));
    EXPECT_LE(c["authors"].size(), 4u);
  }
}

TEST_F(SessionTest, SelectReturnsTexEditAndWritesBib) {
  const json r = call("overcite/select", {{"uri", "paper.tex"},
                                          {"text", text_},
                                          {"offset", cursor()},
                                          {"bibcode", "2025ApJ...990..101S"},
                                          {"target_bib", "fresh.bib"}});
  ASSERT_TRUE(r.contains("result")) << r.dump();
  EXPECT_EQ(r["result"]["final_key"], "Shariat2025");
  const auto& tex = r["result"]["edits"]["tex_edit"];
  EXPECT_EQ(tex["replacement"], "Shariat2025");
  EXPECT_EQ(tex["start"], text_.find("Shariat25"));
  EXPECT_EQ(tex["end"], text_.find("Shariat25") + 9);
  EXPECT_EQ(slurp(dir_ / "paper.tex"), text_);
  EXPECT_EQ(parse_bib(slurp(dir_ / "fresh.bib")).size(), 1u);

  const json again = call("overcite/select", {{"uri", "paper.tex"},
                                              {"text", text_},
                                              {"offset", cursor()},
                                              {"bibcode", "2025ApJ...990..101S"},
                                              {"target_bib", "fresh.bib"}});
  EXPECT_EQ(again["result"]["edits"]["reused_existing"], true);
}

TEST_F(SessionTest, DomainErrorsMapToCodes) {
  const json plain = call("overcite/resolve", {{"text", text_}, {"offset", 0}});
  EXPECT_EQ(plain["error"]["code"], rpc::kNotInCitation);
  const json nobib = call("overcite/select", {{"text", "\\citep{Shariat25}"}, {"offset", 8}, {"bibcode", "2025ApJ...990..101S"}});
  EXPECT_EQ(nobib["error"]["code"], rpc::kNoBibTarget);
  const json bad_offset = call("overcite/resolve", {{"text", "x"}, {"offset", 5}});
  EXPECT_EQ(bad_offset["error"]["code"], rpc::kInvalidParams);
  const json bad_mode = call("overcite/resolve", {{"text", text_}, {"offset", cursor()}, {"mode", "fast"}});
  EXPECT_EQ(bad_mode["error"]["code"], rpc::kInvalidParams);
  EXPECT_EQ(call("overcite/nope", json::object())["error"]["code"], rpc::kMethodNotFound);

  Engine offline(nullptr, Config{}, dir_.path());
  Session s(offline);
  const auto r = s.handle({{"jsonrpc", "2.0"}, {"id", 9}, {"method", "overcite/resolve"},
                           {"params", {{"text", text_}, {"offset", cursor()}}}});
  EXPECT_EQ((*r)["error"]["code"], rpc::kAuthFailed);
}

TEST_F(SessionTest, ScanExamples) {
  const json r = call("overcite/scan", {{"uri", "paper.tex"}, {"text", text_}});
  EXPECT_EQ(r["result"]["unresolved"], json::array({"Shariat25"}));
  EXPECT_EQ(r["result"]["sites"].size(), 2u);
  const json empty = call("overcite/scan", {{"text", ""}});
  EXPECT_TRUE(empty["result"]["sites"].empty());
  EXPECT_TRUE(empty["result"]["unresolved"].empty());
  const json nobib = call("overcite/scan", {{"text", "\\cite{a} \\cite{b}"}});
  EXPECT_EQ(nobib["result"]["unresolved"].size(), 2u);
}

TEST_F(SessionTest, ConfigGetSet) {
  const json got = call("overcite/config", json::object());
  EXPECT_EQ(got["result"]["key_style"], "AuthorYear");
  const json set = call("overcite/config", {{"key_style", "authoryear"}, {"target_bib", "fresh.bib"}});
  EXPECT_EQ(set["result"]["key_style"], "authoryear");
  const json sel = call("overcite/select", {{"uri", "paper.tex"}, {"text", text_}, {"offset", cursor()},
                                            {"bibcode", "2025ApJ...990..101S"}});
  EXPECT_EQ(sel["result"]["final_key"], "shariat2025");
  EXPECT_EQ(call("overcite/config", {{"key_style", "nope"}})["error"]["code"], rpc::kInvalidParams);
  EXPECT_EQ(call("overcite/config", {{"api_base", "http://x"}})["error"]["code"], rpc::kInvalidParams);
}

TEST_F(SessionTest, FramingErrors) {
  const auto parse_err = json::parse(*session_.handle_line("{not json"));
  EXPECT_EQ(parse_err["error"]["code"], rpc::kParseError);
  EXPECT_TRUE(parse_err["id"].is_null());

  const auto invalid = json::parse(*session_.handle_line(R"({"jsonrpc":"1.0","id":4,"method":"x"})"));
  EXPECT_EQ(invalid["error"]["code"], rpc::kInvalidRequest);
  EXPECT_EQ(invalid["id"], 4);

  EXPECT_FALSE(session_.handle_line(R"({"jsonrpc":"2.0","method":"overcite/config"})"));

  const auto batch = json::parse(*session_.handle_line(
      R"([{"jsonrpc":"2.0","id":"a","method":"overcite/config"},{"jsonrpc":"2.0","id":"b","method":"zzz"}])"));
  ASSERT_EQ(batch.size(), 2u);
  EXPECT_EQ(batch[0]["id"], "a");
  EXPECT_EQ(batch[1]["id"], "b");
  EXPECT_EQ(json::parse(*session_.handle_line("[]"))["error"]["code"], rpc::kInvalidRequest);
}

TEST_F(SessionTest, ServeAnswersInOrderWithMatchingIds) {
  std::ostringstream in_text;
  for (int i = 0; i < 5; ++i) {
    in_text << json{{"jsonrpc", "2.0"}, {"id", i}, {"method", "overcite/scan"}, {"params", {{"text", text_}}}}.dump()
            << "\n";
  }
  in_text << "\n";
  std::istringstream in(in_text.str());
  std::ostringstream out;
  session_.serve(in, out);
  std::istringstream lines(out.str());
  std::string line;
  int expect = 0;
  while (std::getline(lines, line)) EXPECT_EQ(json::parse(line)["id"], expect++);
  EXPECT_EQ(expect, 5);
}

TEST_F(SessionTest, MalformedFrameFuzz) {
  std::mt19937_64 rng(17);
  const std::string good = json{{"jsonrpc", "2.0"}, {"id", 1}, {"method", "overcite/scan"}, {"params", {{"text", "x"}}}}.dump();
  const std::string alphabet = "{}[]\":,0123456789abcdefjsonrpcidmethod \\\x01\xff";
  for (int trial = 0; trial < 2000; ++trial) {
    std::string frame = good;
    const int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits && !frame.empty(); ++e) {
      const std::size_t pos = rng() % frame.size();
      switch (rng() % 3) {
        case 0: frame.erase(pos, 1); break;
        case 1: frame.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
        default: frame[pos] = alphabet[rng() % alphabet.size()]; break;
      }
    }
    std::optional<std::string> out;
    ASSERT_NO_THROW(out = session_.handle_line(frame)) << frame;
    if (!out) continue;  // a mutation may still be a valid notification
    json reply;
    ASSERT_NO_THROW(reply = json::parse(*out)) << *out;
    const auto check = [&](const json& r) {
      EXPECT_EQ(r["jsonrpc"], "2.0");
      EXPECT_NE(r.contains("result"), r.contains("error")) << r.dump();
      if (r.contains("error")) {
        EXPECT_TRUE(r["error"]["code"].is_number_integer());
      }
    };
    if (reply.is_array()) {
      for (const auto& r : reply) check(r);
    } else {
      check(reply);
      json request;
      try {
        request = json::parse(frame);
      } catch (const json::exception&) {
        EXPECT_EQ(reply["error"]["code"], rpc::kParseError);
        continue;
      }
      if (request.is_object() && request.contains("id") &&
          (request["id"].is_number_integer() || request["id"].is_string()) && reply.contains("result")) {
        EXPECT_EQ(reply["id"], request["id"]);
      }
    }
  }
}

}  // namespace
}  // namespace incite
