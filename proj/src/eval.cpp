#include "promptrl/eval.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "promptrl/ci_score.hpp"

namespace promptrl {

void MetricTable::validate() const {
  if (values.size() != methods.size()) throw std::invalid_argument("metric table: one row per method required");
  for (const auto& row : values) {
    if (row.size() != metrics.size()) throw std::invalid_argument("metric table: one column per metric required");
    for (const auto& v : row) {
      if (v && !std::isfinite(*v)) throw std::invalid_argument("metric table: non-finite value");
    }
  }
}

std::vector<double> average_ranking(const MetricTable& table) {
  table.validate();
  if (table.methods.size() < 2) throw std::invalid_argument("average_ranking: at least two methods required");
  const auto n = table.methods.size();
  std::vector<double> sum(n, 0.0);
  std::vector<int> count(n, 0);
  for (std::size_t c = 0; c < table.metrics.size(); ++c) {
    const bool higher = table.metrics[c].direction == Direction::HigherBetter;
    for (std::size_t m = 0; m < n; ++m) {
      const auto& v = table.values[m][c];
      if (!v) continue;
      int better = 0, tied = 0;
      for (std::size_t o = 0; o < n; ++o) {
        const auto& w = table.values[o][c];
        if (!w) continue;
        if (*w == *v) {
          ++tied;
        } else if (higher ? *w > *v : *w < *v) {
          ++better;
        }
      }
      sum[m] += 1.0 + better + (tied - 1) / 2.0;
      ++count[m];
    }
  }
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    if (count[m] == 0) throw std::invalid_argument("average_ranking: method '" + table.methods[m] + "' has no values");
    out[m] = sum[m] / count[m];
  }
  return out;
}

double MethodEvaluation::get(std::string_view key) const {
  for (const auto& [k, v] : means) {
    if (k == key) return v;
  }
  throw std::out_of_range("evaluation has no metric " + std::string(key));
}

MethodEvaluation evaluate_method(const PromptGenerator& generator, std::span<const PromptTriplet> testset,
                                 const NlpEngine& nlp, const ScorerSet& scorers) {
  if (testset.empty()) throw std::invalid_argument("evaluate_method: empty test set");
  scorers.validate();
  const auto k = scorers.scorers.size();
  std::vector<double> sums(k, 0.0);
  double ci_sum = 0.0, reward_sum = 0.0;
  MethodEvaluation ev;
  for (const auto& t : testset) {
    std::string y;
    try {
      y = generator(t.x, t.i);
    } catch (const std::exception&) {
      ++ev.skipped;
      continue;
    }
    const auto ctx = build_context(nlp, t.raw_prompt(), t.i, t.raw_target());
    const ScoreQuery q{y, t.x, &ctx};
    const auto parts = score_components(q, scorers);
    double r = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      sums[j] += parts[j];
      r += scorers.weights[j] * parts[j];
    }
    reward_sum += r;
    ci_sum += ci_score(nlp, ctx, y).raw;
    ++ev.evaluated;
  }
  const double denom = ev.evaluated == 0 ? 1.0 : static_cast<double>(ev.evaluated);
  for (std::size_t j = 0; j < k; ++j) ev.means.emplace_back(scorers.scorers[j]->name(), sums[j] / denom);
  ev.means.emplace_back("ci_raw", ci_sum / denom);
  ev.means.emplace_back("reward", reward_sum / denom);
  return ev;
}

PromptGenerator model_generator(const PolicyModel<float>& model, const Vocab& vocab, const SamplingConfig& config) {
  auto rng = std::make_shared<Rng>(config.seed, 3);
  return [&model, &vocab, config, rng](std::string_view x, std::string_view i) {
    const auto prefix = encode_prefix(x, i, vocab);
    return detokenize(sample_continuation(model, prefix, config, *rng), vocab);
  };
}

namespace {

constexpr int kWidth = 80;
constexpr int kMethodWidth = 20;

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fit(std::string s, std::size_t width, bool right) {
  if (s.size() >= width) return s.substr(0, width);
  const std::string pad(width - s.size(), ' ');
  return right ? pad + s : s + pad;
}

}  // namespace

std::string format_report_text(std::span<const MetricTable> tables) {
  std::ostringstream os;
  for (std::size_t ti = 0; ti < tables.size(); ++ti) {
    const auto& t = tables[ti];
    t.validate();
    const auto ranks = t.methods.size() >= 2 ? average_ranking(t) : std::vector<double>{};
    const int cols = static_cast<int>(t.metrics.size()) + (ranks.empty() ? 0 : 1);
    int w = cols == 0 ? 10 : std::clamp((kWidth - kMethodWidth) / cols, 6, 12);
    for (const auto& m : t.metrics) w = std::max(w, static_cast<int>(m.name.size()) + 1);
    std::size_t mw = kMethodWidth;
    if (static_cast<int>(mw) + cols * w > kWidth) {
      std::size_t longest = 6;
      for (const auto& m : t.methods) longest = std::max(longest, m.size());
      mw = std::max<std::size_t>(longest + 1, static_cast<std::size_t>(std::max(0, kWidth - cols * w)));
    }
    if (ti > 0) os << "\n";
    os << t.title << "\n";
    std::string header = fit("method", mw, false);
    for (const auto& m : t.metrics) header += fit(m.name, static_cast<std::size_t>(w), true);
    if (!ranks.empty()) header += fit("avg_rank", static_cast<std::size_t>(w), true);
    os << header << "\n" << std::string(std::min<std::size_t>(header.size(), kWidth), '-') << "\n";
    for (std::size_t r = 0; r < t.methods.size(); ++r) {
      std::string line = fit(t.methods[r], mw, false);
      for (const auto& v : t.values[r]) line += fit(v ? fixed4(*v) : "-", static_cast<std::size_t>(w), true);
      if (!ranks.empty()) line += fit(fixed4(ranks[r]), static_cast<std::size_t>(w), true);
      os << line << "\n";
    }
    std::string lower;
    for (const auto& m : t.metrics) {
      if (m.direction == Direction::LowerBetter) lower += (lower.empty() ? "" : ", ") + m.name;
    }
    if (!lower.empty()) os << "lower is better: " << lower << "\n";
  }
  return os.str();
}

std::string format_report_json(std::span<const MetricTable> tables) {
  nlohmann::ordered_json root;
  root["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : tables) {
    t.validate();
    nlohmann::ordered_json o;
    o["title"] = t.title;
    o["methods"] = t.methods;
    auto metrics = nlohmann::ordered_json::array();
    for (const auto& m : t.metrics) {
      metrics.push_back({{"name", m.name}, {"direction", m.direction == Direction::HigherBetter ? "higher" : "lower"}});
    }
    o["metrics"] = std::move(metrics);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.values) {
      auto r = nlohmann::ordered_json::array();
      for (const auto& v : row) r.push_back(v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr));
      rows.push_back(std::move(r));
    }
    o["values"] = std::move(rows);
    if (t.methods.size() >= 2) o["avg_rank"] = average_ranking(t);
    root["tables"].push_back(std::move(o));
  }
  return root.dump(2) + "\n";
}

std::vector<MetricTable> parse_report_json(std::string_view json) {
  const auto root = nlohmann::json::parse(json);
  std::vector<MetricTable> out;
  for (const auto& o : root.at("tables")) {
    MetricTable t;
    t.title = o.at("title").get<std::string>();
    t.methods = o.at("methods").get<std::vector<std::string>>();
    for (const auto& m : o.at("metrics")) {
      const auto dir = m.at("direction").get<std::string>();
      if (dir != "higher" && dir != "lower") throw std::runtime_error("report: unknown direction " + dir);
      t.metrics.push_back({m.at("name").get<std::string>(), dir == "higher" ? Direction::HigherBetter : Direction::LowerBetter});
    }
    for (const auto& row : o.at("values")) {
      std::vector<std::optional<double>> r;
      for (const auto& v : row) r.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
      t.values.push_back(std::move(r));
    }
    t.validate();
    out.push_back(std::move(t));
  }
  return out;
}

void emit_report(std::span<const MetricTable> tables, const std::filesystem::path& stem) {
  const auto write = [](const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report " + p.string());
    out << body;
    if (!out) throw std::runtime_error("failed writing report " + p.string());
  };
  write(std::filesystem::path(stem.string() + ".txt"), format_report_text(tables));
  write(std::filesystem::path(stem.string() + ".json"), format_report_json(tables));
}

}  // namespace promptrl
