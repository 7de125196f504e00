#pragma once

#include <span>
#include <string>
#include <string_view>

#include "promptrl/nlp.hpp"
#include "promptrl/text.hpp"

namespace promptrl {

// Reference side of the content-integrity score. `highlighted` holds the
// target keywords the instruction introduced (absent from x_o, present in i).
struct CiContext {
  std::string x_o;
  std::string i;
  std::string y_o;
  KeywordSet x_o_keywords;
  KeywordSet i_keywords;
  KeywordSet y_o_keywords;
  KeywordSet highlighted;
};

struct CiOptions {
  double threshold = 0.7;
  int highlight_weight = 2;
};

struct CiScore {
  double raw = 0.0;
  double thresholded = 0.0;
  double threshold = 0.7;
};

CiContext build_context(const NlpEngine& nlp, std::string_view x_o, std::string_view i, std::string_view y_o);

// Keyword coverage of `y` against the reference keywords; a match is the first
// synonym of a reference keyword found among the lemmatized words of `y`.
// With no reference keywords the score is 1.
CiScore ci_score(const NlpEngine& nlp, const CiContext& ctx, std::string_view y, const CiOptions& options = {});

// Raw (unthresholded) score of a partial generation.
double ci_score_prefix(const NlpEngine& nlp, const CiContext& ctx, std::span<const TokenId> prefix, const Vocab& vocab,
                       const CiOptions& options = {});

}  // namespace promptrl
