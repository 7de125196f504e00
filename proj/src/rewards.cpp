#include "promptrl/rewards.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace promptrl {

std::vector<std::string> load_phrase_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open phrase list " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty() && t[0] != '#') out.push_back(std::move(t));
  }
  return out;
}

const std::vector<std::string>& default_quality_modifiers() {
  static const auto list = load_phrase_list(default_resource_dir() / "quality_modifiers.txt");
  return list;
}

namespace {

bool contains_phrase(std::span<const std::string> hay, std::span<const std::string> needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  for (std::size_t k = 0; k + needle.size() <= hay.size(); ++k) {
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(k))) return true;
  }
  return false;
}

}  // namespace

double score_aesthetic_proxy(std::string_view prompt, std::span<const std::string> modifiers) {
  if (modifiers.empty()) return 0.0;
  const auto toks = split_tokens(prompt);
  std::size_t hits = 0;
  for (const auto& m : modifiers) hits += contains_phrase(toks, split_tokens(m)) ? 1 : 0;
  const double f = static_cast<double>(hits) / static_cast<double>(modifiers.size());
  return (1.0 - std::exp(-4.0 * f)) / (1.0 - std::exp(-4.0));
}

double score_aesthetic_proxy(std::string_view prompt) { return score_aesthetic_proxy(prompt, default_quality_modifiers()); }

double length_regularity(std::size_t n_words) {
  const double d = std::abs(static_cast<double>(n_words) - 30.0) / 30.0;
  return -std::min(d, 1.0);
}

double score_preference_proxy(const NlpEngine& nlp, std::string_view prompt, std::string_view baseline) {
  const auto kp = nlp.extract_keywords(prompt);
  const auto kb = nlp.extract_keywords(baseline);
  std::size_t gained = 0, lost = 0, common = 0;
  for (const auto& k : kp) {
    if (kb.contains(k)) {
      ++common;
    } else {
      ++gained;
    }
  }
  for (const auto& k : kb) lost += kp.contains(k) ? 0 : 1;
  const double uni = static_cast<double>(std::max<std::size_t>(1, gained + lost + common));
  const double g = (static_cast<double>(gained) - static_cast<double>(lost)) / uni +
                   0.1 * (length_regularity(NlpEngine::split_words(prompt).size()) -
                          length_regularity(NlpEngine::split_words(baseline).size()));
  return 0.5 + 0.5 * std::tanh(g);
}

double ci_reward(const NlpEngine& nlp, const CiContext& ctx, std::string_view y, const CiOptions& options) {
  return ci_score(nlp, ctx, y, options).thresholded;
}

double CiRewardScorer::score(const ScoreQuery& q) const {
  if (q.ctx == nullptr) throw std::invalid_argument("ci scorer needs a content-integrity context");
  return ci_reward(*nlp_, *q.ctx, q.prompt, options_);
}

ExternalScorer::ExternalScorer(std::string name, std::vector<std::string> argv, std::pair<double, double> bounds)
    : name_(std::move(name)), bounds_(bounds), process_(std::move(argv)) {}

double ExternalScorer::score(const ScoreQuery& q) const {
  nlohmann::json req{{"id", next_id_}, {"prompt", std::string(q.prompt)}};
  if (!q.baseline.empty()) req["baseline"] = std::string(q.baseline);
  const auto line = process_.request(req.dump());
  nlohmann::json resp;
  try {
    resp = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("scorer '" + name_ + "': malformed response: " + e.what());
  }
  if (!resp.contains("id") || resp["id"] != next_id_) throw std::runtime_error("scorer '" + name_ + "': response id mismatch");
  if (!resp.contains("score") || !resp["score"].is_number()) {
    throw std::runtime_error("scorer '" + name_ + "': response has no numeric score");
  }
  ++next_id_;
  const double s = resp["score"].get<double>();
  if (!std::isfinite(s) || s < bounds_.first || s > bounds_.second) {
    throw std::runtime_error("scorer '" + name_ + "': score out of declared range");
  }
  return s;
}

ScorerSet ScorerSet::equal(std::vector<std::shared_ptr<const Scorer>> scorers, double kl_coef) {
  ScorerSet set;
  const double w = scorers.empty() ? 0.0 : 1.0 / static_cast<double>(scorers.size());
  set.weights.assign(scorers.size(), w);
  set.scorers = std::move(scorers);
  set.kl_coef = kl_coef;
  return set;
}

ScorerSet ScorerSet::standard(const NlpEngine& nlp, double kl_coef) {
  return equal({std::make_shared<AestheticProxy>(), std::make_shared<PreferenceProxy>(nlp),
                std::make_shared<CiRewardScorer>(nlp)},
               kl_coef);
}

void ScorerSet::validate() const {
  if (weights.size() != scorers.size()) throw std::invalid_argument("scorer set: one weight per scorer required");
  if (!(kl_coef >= 0.0)) throw std::invalid_argument("scorer set: kl_coef must be non-negative");
  for (const auto& s : scorers) {
    if (!s) throw std::invalid_argument("scorer set: null scorer");
  }
}

std::vector<double> kl_penalty(std::span<const double> logprobs, std::span<const double> ref_logprobs, double kl_coef) {
  if (logprobs.size() != ref_logprobs.size()) throw std::invalid_argument("kl_penalty: length mismatch");
  std::vector<double> out(logprobs.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = kl_coef * (logprobs[t] - ref_logprobs[t]);
  return out;
}

std::vector<double> score_components(const ScoreQuery& query, const ScorerSet& set) {
  set.validate();
  std::vector<double> out;
  out.reserve(set.scorers.size());
  for (const auto& s : set.scorers) out.push_back(s->score(query));
  return out;
}

double terminal_reward(const ScoreQuery& query, const ScorerSet& set) {
  const auto parts = score_components(query, set);
  double r = 0.0;
  for (std::size_t k = 0; k < parts.size(); ++k) r += set.weights[k] * parts[k];
  return r;
}

void assign_rewards(Trajectory& traj, const ScoreQuery& query, const ScorerSet& set) {
  if (traj.tokens.empty()) throw std::invalid_argument("assign_rewards: empty trajectory");
  const auto kl = kl_penalty(traj.logprobs, traj.ref_logprobs, set.kl_coef);
  traj.terminal_reward = terminal_reward(query, set);
  traj.per_step_rewards.resize(kl.size());
  for (std::size_t t = 0; t < kl.size(); ++t) traj.per_step_rewards[t] = -kl[t];
  traj.per_step_rewards.back() = traj.terminal_reward - kl.back();
}

}  // namespace promptrl
