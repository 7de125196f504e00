#include "promptrl/ci_score.hpp"

#include <algorithm>
#include <set>

namespace promptrl {

CiContext build_context(const NlpEngine& nlp, std::string_view x_o, std::string_view i, std::string_view y_o) {
  CiContext ctx;
  ctx.x_o = std::string(x_o);
  ctx.i = std::string(i);
  ctx.y_o = std::string(y_o);
  ctx.x_o_keywords = nlp.extract_keywords(x_o);
  ctx.i_keywords = nlp.extract_keywords(i);
  ctx.y_o_keywords = nlp.extract_keywords(y_o);
  for (const auto& q : ctx.y_o_keywords) {
    if (!ctx.x_o_keywords.contains(q) && ctx.i_keywords.contains(q)) ctx.highlighted.insert(q);
  }
  return ctx;
}

CiScore ci_score(const NlpEngine& nlp, const CiContext& ctx, std::string_view y, const CiOptions& options) {
  const auto lemmas = nlp.lemmatized_words(y);
  const std::set<std::string, std::less<>> y_words(lemmas.begin(), lemmas.end());

  CiScore score;
  score.threshold = options.threshold;
  if (ctx.y_o_keywords.empty()) {
    score.raw = 1.0;
  } else {
    long cnt = 0;
    for (const auto& keyword : ctx.y_o_keywords) {
      for (const auto& s : nlp.synonym_dict().group(keyword)) {
        if (y_words.contains(s)) {
          cnt += ctx.highlighted.contains(s) ? options.highlight_weight : 1;
          break;
        }
      }
    }
    score.raw = std::min(static_cast<double>(cnt) / static_cast<double>(ctx.y_o_keywords.size()), 1.0);
  }
  score.thresholded = score.raw >= options.threshold ? score.raw : 0.0;
  return score;
}

double ci_score_prefix(const NlpEngine& nlp, const CiContext& ctx, std::span<const TokenId> prefix, const Vocab& vocab,
                       const CiOptions& options) {
  return ci_score(nlp, ctx, detokenize(prefix, vocab), options).raw;
}

}  // namespace promptrl
