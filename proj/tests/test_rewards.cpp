#include "doctest.h"

#include <cmath>

#include "promptrl/rewards.hpp"

using namespace promptrl;

namespace {

class ConstScorer final : public Scorer {
 public:
  explicit ConstScorer(double v) : v_(v) {}
  std::string name() const override { return "const"; }
  double score(const ScoreQuery&) const override { return v_; }

 private:
  double v_;
};

Trajectory three_steps() {
  Trajectory t;
  t.tokens = {4, 5, 6};
  t.logprobs = {-1.0, -0.5, -2.0};
  t.ref_logprobs = {-2.0, -0.5, -1.0};
  t.values = {0.0, 0.0, 0.0};
  return t;
}

}  // namespace

TEST_CASE("aesthetic proxy") {
  const std::vector<std::string> mods{"highly detailed", "4k",       "masterpiece", "trending on artstation",
                                      "sharp focus",     "8k",       "intricate",   "octane render",
                                      "concept art",     "cinematic", "studio lighting", "unreal engine"};
  CHECK(score_aesthetic_proxy("", mods) == 0.0);
  std::string all;
  for (const auto& m : mods) all += m + ", ";
  CHECK(score_aesthetic_proxy(all, mods) == doctest::Approx(1.0));
  const double three = score_aesthetic_proxy("a cat, highly detailed, 4k, masterpiece", mods);
  CHECK(three == doctest::Approx((1 - std::exp(-1.0)) / (1 - std::exp(-4.0))).epsilon(1e-12));
  CHECK(three == doctest::Approx(0.64392).epsilon(1e-5));
  // phrases match on whole tokens only
  CHECK(score_aesthetic_proxy("a 4kx photo, highly-detailed", mods) == 0.0);
  CHECK(score_aesthetic_proxy("a cat, Highly Detailed", mods) > 0.0);
  CHECK(default_quality_modifiers().size() >= 12);
}

TEST_CASE("preference proxy") {
  const auto& nlp = default_engine();
  for (const char* a : {"a red cat", "", "a castle on a hill at sunset, highly detailed"}) {
    CHECK(score_preference_proxy(nlp, a, a) == 0.5);
  }
  CHECK(score_preference_proxy(nlp, "a red cat with a tall hat", "a red cat") > 0.5);
  CHECK(score_preference_proxy(nlp, "", "a red cat") < 0.5);
  CHECK(length_regularity(30) == 0.0);
  CHECK(length_regularity(15) == -0.5);
  CHECK(length_regularity(90) == -1.0);
}

TEST_CASE("ci reward thresholding") {
  const auto& nlp = default_engine();
  const auto ten = build_context(nlp, "x", "y", "cat dog horse ship house tree river castle car flower");
  CHECK(ci_reward(nlp, ten, "cat dog horse ship house tree") == 0.0);
  CHECK(ci_reward(nlp, ten, "cat dog horse ship house tree river") == doctest::Approx(0.7));
  CHECK(ci_reward(nlp, ten, "cat dog horse ship house tree river castle car flower") == 1.0);
  const CiRewardScorer scorer(nlp);
  CHECK_THROWS(scorer.score({"cat", "x", nullptr}));
}

TEST_CASE("kl penalty") {
  const std::vector<double> a{-1.0, -0.3}, b{-2.0, -0.3};
  CHECK(kl_penalty(a, a, 0.05) == std::vector<double>{0.0, 0.0});
  CHECK(kl_penalty(a, b, 0.0) == std::vector<double>{0.0, 0.0});
  CHECK(kl_penalty(a, b, 0.05)[0] == doctest::Approx(0.05));
  CHECK_THROWS_AS(kl_penalty(a, std::vector<double>{1.0}, 0.05), std::invalid_argument);
}

TEST_CASE("reward placement") {
  auto zero = ScorerSet::equal({std::make_shared<ConstScorer>(0.8)}, 0.0);
  zero.weights = {0.0};
  auto t = three_steps();
  assign_rewards(t, {"p", "b", nullptr}, zero);
  CHECK(t.per_step_rewards == std::vector<double>{0.0, 0.0, 0.0});

  const auto& nlp = default_engine();
  const auto ctx = build_context(nlp, "a cat", "add a hat", "a cat with a hat");
  ScorerSet ci{{std::make_shared<CiRewardScorer>(nlp)}, {1.0}, 0.0};
  t = three_steps();
  assign_rewards(t, {"a cat in a hat", "a cat", &ctx}, ci);
  CHECK(t.terminal_reward == 1.0);
  CHECK(t.per_step_rewards == std::vector<double>{0.0, 0.0, 1.0});

  const auto std_set = ScorerSet::standard(nlp);
  t = three_steps();
  const std::string y = "a cat in a hat, highly detailed";
  assign_rewards(t, {y, "a cat", &ctx}, std_set);
  const double expected = (score_aesthetic_proxy(y) + score_preference_proxy(nlp, y, "a cat") + 1.0) / 3.0;
  CHECK(t.terminal_reward == doctest::Approx(expected).epsilon(1e-12));
  const auto kl = kl_penalty(t.logprobs, t.ref_logprobs, std_set.kl_coef);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) CHECK(t.per_step_rewards[k] + kl[k] == 0.0);
  CHECK(t.per_step_rewards.back() == doctest::Approx(t.terminal_reward - kl.back()));
}

TEST_CASE("scorer set validation") {
  ScorerSet s{{std::make_shared<ConstScorer>(1.0)}, {0.5, 0.5}, 0.05};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.weights = {1.0};
  s.kl_coef = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("external scorer over a pipe") {
  const std::string script =
      "import sys, json\n"
      "for line in sys.stdin:\n"
      "    r = json.loads(line)\n"
      "    print(json.dumps({'id': r['id'], 'score': min(1.0, len(r['prompt']) / 100.0)}), flush=True)\n";
  ExternalScorer ext("len", {"python3", "-c", script});
  CHECK(ext.name() == "len");
  CHECK(ext.score({"abcde", "", nullptr}) == doctest::Approx(0.05));
  CHECK(ext.score({std::string(300, 'a'), "x", nullptr}) == 1.0);

  const std::string wrong_id =
      "import sys, json\n"
      "for line in sys.stdin:\n"
      "    print(json.dumps({'id': -1, 'score': 0.5}), flush=True)\n";
  ExternalScorer bad("bad", {"python3", "-c", wrong_id});
  CHECK_THROWS(bad.score({"a", "", nullptr}));

  const std::string out_of_range =
      "import sys, json\n"
      "for line in sys.stdin:\n"
      "    r = json.loads(line)\n"
      "    print(json.dumps({'id': r['id'], 'score': 7.0}), flush=True)\n";
  ExternalScorer wide("wide", {"python3", "-c", out_of_range});
  CHECK_THROWS(wide.score({"a", "", nullptr}));
}
