#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "promptrl/pipeline.hpp"
#include "promptrl/rewards.hpp"

using namespace promptrl;

namespace {

class RecordingChat final : public ChatClient {
 public:
  std::string complete(TemplateId id, std::string_view known, std::string_view instruction) override {
    calls.emplace_back(id, std::string(known), std::string(instruction));
    return "chat output";
  }
  std::vector<std::tuple<TemplateId, std::string, std::string>> calls;
};

class TableRewriter final : public RewriterClient {
 public:
  std::map<std::string, std::string> table;
  std::string rewrite(std::string_view p) override { return table.at(std::string(p)); }
};

class FailingRewriter final : public RewriterClient {
 public:
  std::string rewrite(std::string_view p) override {
    if (p.find("boom") != std::string_view::npos) throw std::runtime_error("rewriter down");
    return std::string(p);
  }
};

std::filesystem::path scratch(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("keyword retention") {
  const auto& nlp = default_engine();
  CHECK(retention(nlp, "a red cat on a hill", "a red cat on a hill") == 1.0);
  CHECK(retention(nlp, "a red cat", "blue dog") == 0.0);
  CHECK(retention(nlp, "a red cat on a green hill", "a red cat with a green hat") == 0.75);
  CHECK(retention(nlp, "", "anything") == 0.0);
}

TEST_CASE("template choice") {
  const auto& nlp = default_engine();
  // y side keeps 1.0, x side 0.5
  CHECK(choose_template(nlp, "red cat", "red dog", "blue cat", "blue cat, 4k") == TemplateId::TA);
  CHECK(choose_template(nlp, "blue cat", "blue cat, 4k", "red cat", "red dog") == TemplateId::TB);
  CHECK(choose_template(nlp, "red cat", "red cat", "blue cat", "blue cat") == TemplateId::TB);
  CHECK(to_string(TemplateId::TA) == "T_A");
}

TEST_CASE("triplet construction routes through the chosen template") {
  const auto& nlp = default_engine();
  IdentityRewriter id;
  EchoChatClient echo;
  const RawRecord rec{"a cat", "add a hat", "a cat with a hat"};
  echo.remember(rec.x_o, rec.i, rec.y_o);
  const auto t = build_triplet(nlp, rec, id, echo);
  CHECK(t.x == rec.x_o);
  CHECK(t.y == rec.y_o);
  CHECK(t.x_o == rec.x_o);
  CHECK(t.y_o == rec.y_o);

  TableRewriter rw;
  rw.table = {{"red cat", "red dog"}, {"blue cat", "blue cat, 4k"}};
  RecordingChat chat;
  const auto a = build_triplet(nlp, {"red cat", "make it blue", "blue cat"}, rw, chat);
  REQUIRE(chat.calls.size() == 1);
  CHECK(std::get<0>(chat.calls[0]) == TemplateId::TA);
  CHECK(std::get<1>(chat.calls[0]) == "blue cat, 4k");
  CHECK(std::get<2>(chat.calls[0]) == "make it blue");
  CHECK(a.x == "chat output");
  CHECK(a.y == "blue cat, 4k");

  rw.table = {{"blue cat", "red dog"}, {"red cat", "red cat, 4k"}};
  const auto b = build_triplet(nlp, {"red cat", "make it blue", "blue cat"}, rw, chat);
  CHECK(std::get<0>(chat.calls[1]) == TemplateId::TB);
  CHECK(b.x == "red cat, 4k");
  CHECK(b.y == "chat output");

  EchoChatClient memo;
  memo.remember("a cat, 4k", "add a hat", "a cat with a hat, 4k");
  CHECK(memo.complete(TemplateId::TB, "a cat, 4k", "add a hat") == "a cat with a hat, 4k");
  CHECK(memo.complete(TemplateId::TA, "a cat with a hat, 4k", "add a hat") == "a cat, 4k");
  CHECK(memo.complete(TemplateId::TA, "unknown", "add a hat") == "unknown");
}

TEST_CASE("failing clients skip records") {
  const auto& nlp = default_engine();
  FailingRewriter rw;
  EchoChatClient chat;
  const std::vector<RawRecord> recs{{"a cat", "add a hat", "a cat with a hat"}, {"boom", "x", "y"}, {"a", "b", "c"}};
  std::size_t skipped = 0;
  const auto out = build_corpus(nlp, recs, rw, chat, &skipped);
  CHECK(out.size() == 2);
  CHECK(skipped == 1);
}

TEST_CASE("offline clients") {
  const auto& nlp = default_engine();
  RuleBeautifier b;
  const auto once = b.rewrite("a red cat");
  CHECK(once == b.rewrite("a red cat"));
  CHECK(once.starts_with("a red cat, "));
  CHECK(score_aesthetic_proxy(once) > 0.0);
  CHECK(b.rewrite("") == "");

  KeywordMergeChatClient km(nlp);
  CHECK(km.complete(TemplateId::TB, "a cat, 4k", "add a hat") == "a cat, 4k, hat");
  CHECK(km.complete(TemplateId::TA, "a cat with a hat, 4k", "add a hat") == "a cat with a, 4k");

  const auto tpl = ChatTemplates::load(default_resource_dir());
  const auto rendered = tpl.render(TemplateId::TB, "a cat", "add a hat");
  CHECK(rendered.find("a cat") != std::string::npos);
  CHECK(rendered.find("add a hat") != std::string::npos);
  CHECK(rendered.find("{known}") == std::string::npos);
}

TEST_CASE("external chat client over a pipe") {
  const std::string script =
      "import sys, json\n"
      "for line in sys.stdin:\n"
      "    r = json.loads(line)\n"
      "    assert r['known'] in r['prompt']\n"
      "    print(json.dumps({'id': r['id'], 'text': r['template'] + ':' + r['known']}), flush=True)\n";
  ExternalChatClient chat({"python3", "-c", script}, ChatTemplates::load(default_resource_dir()));
  CHECK(chat.complete(TemplateId::TA, "a cat", "add a hat") == "T_A:a cat");
  CHECK(chat.complete(TemplateId::TB, "a dog", "add a hat") == "T_B:a dog");
}

TEST_CASE("filtering") {
  const auto& nlp = default_engine();
  const auto none = filter_triplets(nlp, {}, {}, default_nsfw_list());
  CHECK(none.first.empty());
  CHECK(none.second.input_count == 0);
  CHECK(none.second.kept + none.second.dropped_low_score + none.second.dropped_non_english + none.second.dropped_nsfw == 0);

  std::vector<PromptTriplet> ts{
      {"a cat, highly detailed", "add a hat", "a cat with a hat, highly detailed", {}, {}, {}},
      {"ein kätzchen", "füge hüte hinzü", "ëin kätzchën mït hüt", {}, {}, {}},
      {"a cat, highly detailed", "add a hat", "a cat with a hat, highly detailed, nude", {}, {}, {}},
      // raw CI 0.3 against ten reference keywords
      {"x", "y", "cat dog horse, highly detailed", "x", "cat dog horse ship house tree river castle car flower", {}},
  };
  const auto [kept, rep] = filter_triplets(nlp, ts, {}, default_nsfw_list());
  CHECK(rep.input_count == 4);
  CHECK(rep.kept == 1);
  CHECK(rep.dropped_non_english == 1);
  CHECK(rep.dropped_nsfw == 1);
  CHECK(rep.dropped_low_score == 1);
  CHECK(kept.front() == ts.front());
  CHECK(non_ascii_letter_share("abcd") == 0.0);
  CHECK(non_ascii_letter_share("ééab") == 0.5);
}

TEST_CASE("synthetic corpus") {
  const auto& nlp = default_engine();
  CHECK(generate_synthetic_corpus(1, 7) == generate_synthetic_corpus(1, 7));
  const auto corpus = generate_synthetic_corpus(1000, 3);
  REQUIRE(corpus.size() == 1000);
  const auto [kept, rep] = filter_triplets(nlp, corpus, {}, default_nsfw_list());
  CHECK(rep.kept == 1000);
  int adds = 0;
  for (const auto& t : corpus) {
    CHECK_NOTHROW(validate(t));
    CHECK(oracle::ci_raw(nlp, *t.x_o, t.i, *t.y_o, t.y) >= 0.7);
    if (t.i.starts_with("add ")) {
      const auto obj = t.i.substr(t.i.rfind(' ') + 1);
      CHECK(nlp.extract_keywords(*t.y_o).contains(obj));
      ++adds;
    }
  }
  CHECK(adds > 0);
  const auto raw = generate_raw_records(50, 3);
  IdentityRewriter id;
  EchoChatClient echo;
  for (const auto& r : raw) echo.remember(r.x_o, r.i, r.y_o);
  for (const auto& r : raw) {
    const auto t = build_triplet(nlp, r, id, echo);
    CHECK(ci_score(nlp, build_context(nlp, r.x_o, r.i, r.y_o), t.y).raw >= 0.7);
  }
}

TEST_CASE("jsonl round trip") {
  auto ts = generate_synthetic_corpus(100, 1);
  ts[0].x = "ünïcödé 猫 prompt";
  ts[1].meta = R"({"source":"test"})";
  ts[2].x_o.reset();
  const auto p = scratch("promptrl_roundtrip.jsonl");
  write_jsonl(p, ts);
  CHECK(read_jsonl(p) == ts);

  {
    std::ofstream out(p, std::ios::trunc);
    out << R"({"x":"a","i":"b","y":"c"})" << "\n" << R"({"x":"a","y":"c"})" << "\n";
  }
  try {
    read_jsonl(p);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2:") != std::string::npos);
    CHECK(msg.find("'i'") != std::string::npos);
  }
  {
    std::ofstream out(p, std::ios::trunc);
    out << "{not json\n";
  }
  CHECK_THROWS_WITH(read_jsonl(p), doctest::Contains(":1:"));
  std::filesystem::remove(p);
}
