#pragma once

// Straight-line reference implementations used by the unit and acceptance
// tests. They share no code with the library beyond the tagger/lemmatizer.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "promptrl/nlp.hpp"

namespace oracle {

inline std::vector<std::string> keywords(const promptrl::NlpEngine& nlp, const std::string& text) {
  std::vector<std::string> out;
  for (const auto& w : promptrl::NlpEngine::split_words(text)) {
    const auto tag = nlp.tag_word(w);
    if (!nlp.candidates().contains(tag)) continue;
    auto lemma = nlp.lemmatize_one({w, tag});
    if (std::find(out.begin(), out.end(), lemma) == out.end()) out.push_back(lemma);
  }
  return out;
}

inline bool in(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Raw content-integrity score, computed literally from the three references.
inline double ci_raw(const promptrl::NlpEngine& nlp, const std::string& x_o, const std::string& i,
                     const std::string& y_o, const std::string& y) {
  std::vector<std::string> y_words;
  for (const auto& w : promptrl::NlpEngine::split_words(y)) y_words.push_back(nlp.lemmatize_one({w, nlp.tag_word(w)}));
  const auto xk = keywords(nlp, x_o);
  const auto ik = keywords(nlp, i);
  const auto yk = keywords(nlp, y_o);
  std::vector<std::string> highlighted;
  for (const auto& q : yk) {
    if (!in(xk, q) && in(ik, q)) highlighted.push_back(q);
  }
  if (yk.empty()) return 1.0;
  int cnt = 0;
  for (const auto& k : yk) {
    for (const auto& s : nlp.synonym_dict().group(k)) {
      if (in(y_words, s)) {
        cnt += in(highlighted, s) ? 2 : 1;
        break;
      }
    }
  }
  return std::min(static_cast<double>(cnt) / static_cast<double>(yk.size()), 1.0);
}

// A_t = sum_l (gamma lam)^l delta_{t+l}, evaluated term by term.
inline std::vector<double> gae_quadratic(const std::vector<double>& r, const std::vector<double>& v, double gamma,
                                         double lam) {
  const auto T = r.size();
  std::vector<double> adv(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    double acc = 0.0;
    double w = 1.0;
    for (std::size_t l = t; l < T; ++l) {
      const double next = l + 1 < T ? v[l + 1] : 0.0;
      acc += w * (r[l] + gamma * next - v[l]);
      w *= gamma * lam;
    }
    adv[t] = acc;
  }
  return adv;
}

// Rank of each method in one column as the mean position over every
// ordering that sorts the present values best-first.
inline std::vector<double> column_ranks_exhaustive(const std::vector<std::optional<double>>& col, bool higher) {
  std::vector<int> present;
  for (int m = 0; m < static_cast<int>(col.size()); ++m) {
    if (col[m]) present.push_back(m);
  }
  std::vector<double> pos_sum(col.size(), 0.0);
  long orders = 0;
  std::vector<int> perm = present;
  std::sort(perm.begin(), perm.end());
  do {
    bool sorted = true;
    for (std::size_t k = 1; k < perm.size() && sorted; ++k) {
      const double a = *col[perm[k - 1]], b = *col[perm[k]];
      sorted = higher ? a >= b : a <= b;
    }
    if (!sorted) continue;
    ++orders;
    for (std::size_t k = 0; k < perm.size(); ++k) pos_sum[perm[k]] += static_cast<double>(k + 1);
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<double> out(col.size(), std::nan(""));
  for (int m : present) out[m] = pos_sum[m] / static_cast<double>(orders);
  return out;
}

}  // namespace oracle
