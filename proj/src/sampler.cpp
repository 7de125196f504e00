#include "promptrl/sampler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace promptrl {

std::string_view to_string(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::Vanilla: return "vanilla";
    case SamplingMode::AdmPositive: return "adm_positive";
    case SamplingMode::AdmNegative: return "adm_negative";
  }
  return "vanilla";
}

SamplingMode parse_sampling_mode(std::string_view name) {
  if (name == "vanilla") return SamplingMode::Vanilla;
  if (name == "adm_positive") return SamplingMode::AdmPositive;
  if (name == "adm_negative") return SamplingMode::AdmNegative;
  throw std::invalid_argument("unknown sampling mode: " + std::string(name));
}

std::string_view to_string(Perturbation::Kind kind) {
  switch (kind) {
    case Perturbation::Kind::None: return "none";
    case Perturbation::Kind::Removed: return "removed";
    case Perturbation::Kind::Modified: return "modified";
  }
  return "none";
}

void SamplingConfig::validate() const {
  auto prob = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string("sampling.") + name + " must be in [0, 1]");
  };
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("sampling.p must be in (0, 1]");
  prob(neg_prompt_prob, "neg_prompt_prob");
  prob(neg_remove_prob, "neg_remove_prob");
  if (max_new_tokens < 1) throw std::invalid_argument("sampling.max_new_tokens must be positive");
  if (!(temperature > 0.0)) throw std::invalid_argument("sampling.temperature must be positive");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(seed ^ splitmix64(stream + 1))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  const auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return std::min(k, n - 1);
}

std::vector<TokenId> typical_set(std::span<const double> dist, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("typical_set: p must be in (0, 1]");
  if (dist.empty()) throw std::invalid_argument("typical_set: empty distribution");
  double total = 0.0;
  double entropy = 0.0;
  for (double q : dist) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw std::invalid_argument("typical_set: invalid probability");
    total += q;
    if (q > 0.0) entropy -= q * std::log(q);
  }
  if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument("typical_set: distribution does not sum to 1");

  std::vector<TokenId> order;
  std::vector<double> gap(dist.size());
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (dist[k] <= 0.0) continue;
    order.push_back(static_cast<TokenId>(k));
    gap[k] = std::abs(-std::log(dist[k]) - entropy);
  }
  std::sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
    if (gap[a] != gap[b]) return gap[a] < gap[b];
    return a < b;
  });
  double mass = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    mass += dist[order[k]];
    if (mass >= p) {
      order.resize(k + 1);
      break;
    }
  }
  return order;
}

std::vector<TokenId> typical_set(const Eigen::VectorXd& dist, double p) {
  return typical_set(std::span<const double>(dist.data(), static_cast<std::size_t>(dist.size())), p);
}

template <typename Scalar>
Eigen::VectorXd next_token_distribution(const Vec<Scalar>& logits, double temperature) {
  Eigen::VectorXd z = logits.template cast<double>() / temperature;
  z.array() -= z.maxCoeff();
  z = z.array().exp();
  return z / z.sum();
}

TokenId sample_from(const Eigen::VectorXd& dist, SamplingMode mode, double p, Rng& rng, const StepObserver& observer) {
  std::vector<TokenId> permitted;
  if (mode == SamplingMode::AdmPositive) {
    permitted = typical_set(dist, p);
    std::sort(permitted.begin(), permitted.end());
  } else {
    permitted.resize(static_cast<std::size_t>(dist.size()));
    std::iota(permitted.begin(), permitted.end(), 0);
  }
  double z = 0.0;
  for (auto k : permitted) z += dist(k);
  const double target = rng.uniform() * z;
  double cum = 0.0;
  TokenId chosen = -1;
  for (auto k : permitted) {
    if (dist(k) <= 0.0) continue;
    cum += dist(k);
    chosen = k;
    if (cum > target) break;
  }
  if (chosen < 0) throw std::invalid_argument("sample_from: no probability mass");
  if (observer) observer(dist, permitted, chosen);
  return chosen;
}

template <typename Scalar>
TokenId sample_step(const PolicyModel<Scalar>& model, std::span<const TokenId> prefix, const SamplingConfig& config,
                    Rng& rng) {
  const auto out = model.forward(prefix);
  const Vec<Scalar> last = out.logits.row(out.logits.rows() - 1).transpose();
  return sample_from(next_token_distribution<Scalar>(last, config.temperature), config.mode, config.p, rng);
}

template <typename Scalar>
Trajectory forced_trajectory(const PolicyModel<Scalar>& model, const ReferenceModel<Scalar>& ref, TokenSeq prefix,
                             TokenSeq tokens) {
  if (prefix.empty()) throw std::invalid_argument("forced_trajectory: empty prefix");
  if (tokens.empty()) throw std::invalid_argument("forced_trajectory: empty continuation");
  if (prefix.size() + tokens.size() > static_cast<std::size_t>(model.config().max_len)) {
    throw std::length_error("forced_trajectory: sequence exceeds max_len");
  }
  TokenSeq seq = prefix;
  seq.insert(seq.end(), tokens.begin(), tokens.end() - 1);
  const auto out = model.forward(seq);
  const auto lsm = log_softmax_rows<Scalar>(out.logits);
  const auto ref_lsm = log_softmax_rows<Scalar>(ref.forward(seq).logits);

  Trajectory traj;
  const std::size_t n = tokens.size();
  traj.logprobs.resize(n);
  traj.ref_logprobs.resize(n);
  traj.values.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto row = static_cast<Eigen::Index>(prefix.size() - 1 + t);
    traj.logprobs[t] = lsm(row, tokens[t]);
    traj.ref_logprobs[t] = ref_lsm(row, tokens[t]);
    traj.values[t] = static_cast<double>(out.values(row));
  }
  traj.prefix = std::move(prefix);
  traj.tokens = std::move(tokens);
  return traj;
}

template <typename Scalar>
TokenSeq sample_continuation(const PolicyModel<Scalar>& model, std::span<const TokenId> prefix,
                             const SamplingConfig& config, Rng& rng, const StepObserver& observer) {
  config.validate();
  if (prefix.empty()) throw std::invalid_argument("sample_continuation: empty prefix");
  const int room = model.config().max_len - static_cast<int>(prefix.size());
  if (room < 1) throw std::length_error("sample_continuation: prompt leaves no room for generation");
  const int budget = std::min(config.max_new_tokens, room);

  auto state = model.begin_decode();
  StepOutput<Scalar> step;
  for (auto tok : prefix) step = model.decode_step(state, tok);
  TokenSeq tokens;
  while (static_cast<int>(tokens.size()) < budget) {
    const auto dist = next_token_distribution<Scalar>(step.logits, config.temperature);
    const auto tok = sample_from(dist, config.mode, config.p, rng, observer);
    tokens.push_back(tok);
    if (tok == Vocab::kEos || static_cast<int>(tokens.size()) == budget) break;
    step = model.decode_step(state, tok);
  }
  return tokens;
}

template <typename Scalar>
Trajectory generate(const PolicyModel<Scalar>& model, const ReferenceModel<Scalar>& ref, const Vocab& vocab,
                    std::string_view x, std::string_view i, const SamplingConfig& config, Rng& rng,
                    const StepObserver& observer) {
  if (static_cast<int>(vocab.size()) != model.config().vocab_size) {
    throw std::invalid_argument("generate: vocabulary does not match the model");
  }
  TokenSeq prefix = encode_prefix(x, i, vocab);
  TokenSeq tokens = sample_continuation(model, prefix, config, rng, observer);
  auto traj = forced_trajectory(model, ref, std::move(prefix), std::move(tokens));
  traj.meta.mode = config.mode;
  return traj;
}

KeywordPool build_keyword_pool(const NlpEngine& nlp, std::span<const std::string> texts) {
  std::map<PosTag, std::set<std::string>> sets;
  for (const auto& text : texts) {
    for (const auto& [lemma, tag] : nlp.tagged_keywords(text)) {
      if (nlp.tag_word(lemma) == tag) sets[tag].insert(lemma);
    }
  }
  KeywordPool pool;
  for (auto& [tag, words] : sets) pool[tag].assign(words.begin(), words.end());
  return pool;
}

namespace {

struct WordSpan {
  std::size_t begin, end;
  std::string word;
};

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '\'' || c >= 0x80; }

// Byte spans of the words split_words would return, in order.
std::vector<WordSpan> word_spans(std::string_view text) {
  std::vector<WordSpan> out;
  std::size_t k = 0;
  while (k < text.size()) {
    if (!is_word_byte(static_cast<unsigned char>(text[k]))) {
      ++k;
      continue;
    }
    const std::size_t b = k;
    while (k < text.size() && is_word_byte(static_cast<unsigned char>(text[k]))) ++k;
    std::string w;
    bool wordy = false;
    for (std::size_t j = b; j < k; ++j) {
      const auto c = static_cast<unsigned char>(text[j]);
      wordy = wordy || std::isalnum(c) || c >= 0x80;
      w.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    }
    if (wordy) out.push_back({b, k, std::move(w)});
  }
  return out;
}

std::string remove_span(std::string_view text, std::size_t b, std::size_t e) {
  if (b > 0 && std::isspace(static_cast<unsigned char>(text[b - 1]))) {
    --b;
  } else if (e < text.size() && std::isspace(static_cast<unsigned char>(text[e]))) {
    ++e;
  }
  std::string out(text.substr(0, b));
  out += text.substr(e);
  return out;
}

}  // namespace

PerturbResult perturb_negative(const NlpEngine& nlp, std::string_view y, const KeywordPool& pool, double remove_prob,
                               Rng& rng) {
  if (trim(y).empty()) throw std::invalid_argument("perturb_negative: empty target");
  PerturbResult result{std::string(y), {}};
  const auto keywords = nlp.tagged_keywords(y);
  if (keywords.empty()) return result;

  const auto& [keyword, tag] = keywords[rng.below(keywords.size())];
  const auto spans = word_spans(y);
  int position = -1;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const TaggedWord tw{spans[k].word, nlp.tag_word(spans[k].word)};
    if (tw.tag == tag && nlp.lemmatize_one(tw) == keyword) {
      position = static_cast<int>(k);
      break;
    }
  }
  if (position < 0) throw std::logic_error("perturb_negative: keyword not located in text");

  auto& rec = result.record;
  rec.original = keyword;
  rec.tag = tag;
  rec.position = position;
  const auto& span = spans[static_cast<std::size_t>(position)];

  const bool remove = rng.uniform() < remove_prob;
  if (!remove) {
    std::vector<std::string> eligible;
    if (auto it = pool.find(tag); it != pool.end()) {
      const auto group = nlp.synonym_dict().synonyms(keyword);
      for (const auto& w : it->second) {
        if (w != keyword && !group.contains(w)) eligible.push_back(w);
      }
    }
    if (!eligible.empty()) {
      rec.kind = Perturbation::Kind::Modified;
      rec.replacement = eligible[rng.below(eligible.size())];
      result.text = std::string(y.substr(0, span.begin)) + rec.replacement + std::string(y.substr(span.end));
      return result;
    }
    rec.fallback = true;
  }
  rec.kind = Perturbation::Kind::Removed;
  result.text = remove_span(y, span.begin, span.end);
  return result;
}

std::vector<NegativeSample> build_negative_batch(const NlpEngine& nlp, std::span<const PromptTriplet> triplets,
                                                 const KeywordPool& pool, const SamplingConfig& config, Rng& rng) {
  std::vector<NegativeSample> out;
  out.reserve(triplets.size());
  for (const auto& t : triplets) {
    NegativeSample s;
    s.y = t.y;
    if (rng.uniform() < config.neg_prompt_prob) {
      s.selected = true;
      auto r = perturb_negative(nlp, t.y, pool, config.neg_remove_prob, rng);
      s.y = std::move(r.text);
      s.record = std::move(r.record);
    }
    out.push_back(std::move(s));
  }
  return out;
}

template Eigen::VectorXd next_token_distribution<float>(const Vec<float>&, double);
template Eigen::VectorXd next_token_distribution<double>(const Vec<double>&, double);
template TokenId sample_step<float>(const PolicyModel<float>&, std::span<const TokenId>, const SamplingConfig&, Rng&);
template TokenId sample_step<double>(const PolicyModel<double>&, std::span<const TokenId>, const SamplingConfig&, Rng&);
template Trajectory forced_trajectory<float>(const PolicyModel<float>&, const ReferenceModel<float>&, TokenSeq,
                                             TokenSeq);
template Trajectory forced_trajectory<double>(const PolicyModel<double>&, const ReferenceModel<double>&, TokenSeq,
                                              TokenSeq);
template TokenSeq sample_continuation<float>(const PolicyModel<float>&, std::span<const TokenId>,
                                             const SamplingConfig&, Rng&, const StepObserver&);
template TokenSeq sample_continuation<double>(const PolicyModel<double>&, std::span<const TokenId>,
                                              const SamplingConfig&, Rng&, const StepObserver&);
template Trajectory generate<float>(const PolicyModel<float>&, const ReferenceModel<float>&, const Vocab&,
                                    std::string_view, std::string_view, const SamplingConfig&, Rng&,
                                    const StepObserver&);
template Trajectory generate<double>(const PolicyModel<double>&, const ReferenceModel<double>&, const Vocab&,
                                     std::string_view, std::string_view, const SamplingConfig&, Rng&,
                                     const StepObserver&);

}  // namespace promptrl
