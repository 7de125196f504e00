#include "promptrl/pipeline.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>

#include "promptrl/rewards.hpp"
#include "promptrl/sampler.hpp"

namespace promptrl {

std::string_view to_string(TemplateId id) { return id == TemplateId::TA ? "T_A" : "T_B"; }

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k > 0) out += sep;
    out += parts[k];
  }
  return out;
}

// Space-joins tokens, attaching closing punctuation to the previous token.
std::string join_tokens(std::span<const std::string> toks) {
  std::string out;
  for (const auto& t : toks) {
    const bool attach = t.size() == 1 && std::string_view(",.;:!?)").find(t[0]) != std::string_view::npos;
    if (!out.empty() && !attach) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

}  // namespace

RuleBeautifier::RuleBeautifier() : RuleBeautifier(default_quality_modifiers()) {}

RuleBeautifier::RuleBeautifier(std::vector<std::string> modifiers) : modifiers_(std::move(modifiers)) {
  if (modifiers_.size() < 4) throw std::invalid_argument("RuleBeautifier needs at least four modifiers");
}

std::string RuleBeautifier::rewrite(std::string_view prompt) {
  const auto base = trim(prompt);
  if (base.empty()) return base;
  Rng rng(fnv1a(normalize(base)));
  const auto k = 2 + rng.below(3);
  std::vector<std::string> pool = modifiers_;
  std::vector<std::string> picked;
  for (std::uint64_t j = 0; j < k; ++j) {
    const auto at = rng.below(pool.size());
    picked.push_back(pool[at]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
  }
  return base + ", " + join(picked, ", ");
}

void EchoChatClient::remember(std::string_view source, std::string_view instruction, std::string_view target) {
  forward_[{std::string(source), std::string(instruction)}] = std::string(target);
  backward_[{std::string(target), std::string(instruction)}] = std::string(source);
}

std::string EchoChatClient::complete(TemplateId id, std::string_view known, std::string_view instruction) {
  const auto& table = id == TemplateId::TB ? forward_ : backward_;
  if (auto it = table.find({std::string(known), std::string(instruction)}); it != table.end()) return it->second;
  return std::string(known);
}

std::string KeywordMergeChatClient::complete(TemplateId id, std::string_view known, std::string_view instruction) {
  const auto ikw = nlp_->extract_keywords(instruction);
  if (id == TemplateId::TB) {
    const auto kkw = nlp_->extract_keywords(known);
    std::vector<std::string> extra;
    for (const auto& k : ikw) {
      if (!kkw.contains(k)) extra.push_back(k);
    }
    std::string out = trim(known);
    if (!extra.empty()) out += ", " + join(extra, " ");
    return out;
  }
  std::vector<std::string> kept;
  for (auto& t : split_tokens(known)) {
    const auto u = static_cast<unsigned char>(t[0]);
    const bool wordy = std::isalnum(u) || u >= 0x80;
    if (wordy && ikw.contains(nlp_->lemmatize_one({t, nlp_->tag_word(t)}))) continue;
    kept.push_back(std::move(t));
  }
  return join_tokens(kept);
}

std::string ExternalRewriter::rewrite(std::string_view prompt) {
  const nlohmann::json req{{"id", next_id_}, {"prompt", std::string(prompt)}};
  const auto resp = nlohmann::json::parse(process_.request(req.dump()));
  if (!resp.contains("id") || resp["id"] != next_id_ || !resp.contains("text") || !resp["text"].is_string()) {
    throw std::runtime_error("rewriter: malformed response");
  }
  ++next_id_;
  return resp["text"].get<std::string>();
}

ChatTemplates ChatTemplates::load(const std::filesystem::path& dir) {
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open template " + p.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  return {slurp(dir / "chat_template_a.txt"), slurp(dir / "chat_template_b.txt")};
}

std::string ChatTemplates::render(TemplateId id, std::string_view known, std::string_view instruction) const {
  const auto& tpl = id == TemplateId::TA ? a : b;
  return replace_all(replace_all(tpl, "{known}", known), "{instruction}", instruction);
}

std::string ExternalChatClient::complete(TemplateId id, std::string_view known, std::string_view instruction) {
  const nlohmann::json req{{"id", next_id_},
                           {"template", std::string(to_string(id))},
                           {"prompt", templates_.render(id, known, instruction)},
                           {"known", std::string(known)},
                           {"instruction", std::string(instruction)}};
  const auto resp = nlohmann::json::parse(process_.request(req.dump()));
  if (!resp.contains("id") || resp["id"] != next_id_ || !resp.contains("text") || !resp["text"].is_string()) {
    throw std::runtime_error("chat client: malformed response");
  }
  ++next_id_;
  return resp["text"].get<std::string>();
}

double retention(const NlpEngine& nlp, std::string_view before, std::string_view after) {
  const auto kb = nlp.extract_keywords(before);
  const auto ka = nlp.extract_keywords(after);
  std::size_t kept = 0;
  for (const auto& k : kb) kept += ka.contains(k) ? 1 : 0;
  return static_cast<double>(kept) / static_cast<double>(std::max<std::size_t>(1, kb.size()));
}

TemplateId choose_template(const NlpEngine& nlp, std::string_view x_o, std::string_view x, std::string_view y_o,
                           std::string_view y) {
  return retention(nlp, y_o, y) > retention(nlp, x_o, x) ? TemplateId::TA : TemplateId::TB;
}

PromptTriplet build_triplet(const NlpEngine& nlp, const RawRecord& record, RewriterClient& rewriter, ChatClient& chat) {
  PromptTriplet t;
  t.i = record.i;
  t.x_o = record.x_o;
  t.y_o = record.y_o;
  t.x = rewriter.rewrite(record.x_o);
  t.y = rewriter.rewrite(record.y_o);
  if (choose_template(nlp, record.x_o, t.x, record.y_o, t.y) == TemplateId::TA) {
    t.x = chat.complete(TemplateId::TA, t.y, t.i);
  } else {
    t.y = chat.complete(TemplateId::TB, t.x, t.i);
  }
  validate(t);
  return t;
}

std::vector<PromptTriplet> build_corpus(const NlpEngine& nlp, std::span<const RawRecord> records,
                                        RewriterClient& rewriter, ChatClient& chat, std::size_t* skipped) {
  std::vector<PromptTriplet> out;
  std::size_t bad = 0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    try {
      out.push_back(build_triplet(nlp, records[k], rewriter, chat));
    } catch (const std::exception& e) {
      ++bad;
      std::cerr << "skipping record " << k << ": " << e.what() << "\n";
    }
  }
  if (skipped != nullptr) *skipped = bad;
  return out;
}

double non_ascii_letter_share(std::string_view text) {
  std::size_t ascii = 0, other = 0;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80) {
      ascii += std::isalpha(c) ? 1 : 0;
    } else if ((c & 0xC0) != 0x80) {
      ++other;  // lead byte of a multi-byte code point
    }
  }
  const auto total = ascii + other;
  return total == 0 ? 0.0 : static_cast<double>(other) / static_cast<double>(total);
}

bool contains_listed_phrase(std::string_view text, std::span<const std::string> phrases) {
  const auto toks = split_tokens(text);
  for (const auto& p : phrases) {
    const auto needle = split_tokens(p);
    if (needle.empty() || needle.size() > toks.size()) continue;
    for (std::size_t k = 0; k + needle.size() <= toks.size(); ++k) {
      if (std::equal(needle.begin(), needle.end(), toks.begin() + static_cast<std::ptrdiff_t>(k))) return true;
    }
  }
  return false;
}

const std::vector<std::string>& default_nsfw_list() {
  static const auto list = load_phrase_list(default_resource_dir() / "nsfw.txt");
  return list;
}

std::pair<std::vector<PromptTriplet>, FilterReport> filter_triplets(const NlpEngine& nlp,
                                                                    std::span<const PromptTriplet> triplets,
                                                                    const FilterThresholds& thresholds,
                                                                    std::span<const std::string> wordlist) {
  FilterReport report;
  report.input_count = triplets.size();
  std::vector<PromptTriplet> kept;
  for (const auto& t : triplets) {
    const std::array<std::string_view, 3> fields{t.x, t.i, t.y};
    if (std::any_of(fields.begin(), fields.end(),
                    [&](std::string_view f) { return non_ascii_letter_share(f) > thresholds.max_non_ascii_share; })) {
      ++report.dropped_non_english;
      continue;
    }
    if (std::any_of(fields.begin(), fields.end(), [&](std::string_view f) { return contains_listed_phrase(f, wordlist); })) {
      ++report.dropped_nsfw;
      continue;
    }
    const auto ctx = build_context(nlp, t.raw_prompt(), t.i, t.raw_target());
    const bool low = score_aesthetic_proxy(t.y) < thresholds.min_aesthetic ||
                     score_preference_proxy(nlp, t.y, t.x) < thresholds.min_preference ||
                     ci_score(nlp, ctx, t.y).raw < thresholds.min_ci;
    if (low) {
      ++report.dropped_low_score;
      continue;
    }
    kept.push_back(t);
  }
  report.kept = kept.size();
  return {std::move(kept), report};
}

namespace {

const std::vector<std::string> kNouns{"cat",    "dog",   "horse", "robot",  "woman", "castle", "car",
                                      "dragon", "bird",  "house", "tree",   "ship",  "fox",    "owl",
                                      "lion",   "knight", "wizard", "girl", "boy",   "lighthouse"};
const std::vector<std::string> kAdjectives{"old",   "tiny",     "giant",   "cute",   "fluffy",    "ancient",
                                           "happy", "sleepy",   "majestic", "mysterious", "broken", "shiny"};
const std::vector<std::string> kColors{"red", "blue", "green", "golden", "purple", "silver", "pink", "black", "white",
                                       "orange"};
const std::vector<std::string> kObjects{"hat",  "scarf", "crown",  "sword",    "umbrella",
                                        "flower", "lantern", "book", "guitar", "backpack"};
const std::vector<std::string> kScenes{"in a forest",   "on a beach", "at night",       "in the city",
                                       "under the stars", "in the snow", "on a mountain", "in space"};
const std::vector<std::string> kStyles{"oil painting", "watercolor painting", "digital art", "photograph",
                                       "pencil sketch", "anime illustration", "pixel art", "3d render"};
// how "make it ..." names each style
const std::vector<std::string> kStylePhrases{"an oil painting",     "a watercolor painting", "digital art",
                                             "a photograph",        "a pencil sketch",       "an anime illustration",
                                             "pixel art",           "a 3d render"};

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[rng.below(v.size())];
}

template <typename T>
const T& pick_other(const std::vector<T>& v, const T& not_this, Rng& rng) {
  for (;;) {
    const auto& c = pick(v, rng);
    if (c != not_this) return c;
  }
}

std::string article(std::string_view w) {
  return std::string_view("aeiou").find(w.front()) != std::string_view::npos ? "an" : "a";
}

}  // namespace

std::vector<RawRecord> generate_raw_records(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_raw_records: n must be positive");
  Rng rng(seed, 0x5eed);
  std::vector<RawRecord> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& adj = pick(kAdjectives, rng);
    const auto& noun = pick(kNouns, rng);
    const auto& scene = pick(kScenes, rng);
    const auto& style = pick(kStyles, rng);
    const auto subject = [&](std::string_view a, std::string_view nn) {
      return article(a) + " " + std::string(a) + " " + std::string(nn);
    };
    RawRecord r;
    r.x_o = subject(adj, noun) + " " + scene + ", " + style;
    switch (rng.below(5)) {
      case 0: {
        const auto& color = pick(kColors, rng);
        r.i = "make it " + color;
        r.y_o = subject(color, noun) + " " + scene + ", " + style;
        break;
      }
      case 1: {
        const auto& obj = pick(kObjects, rng);
        r.i = "add " + article(obj) + " " + obj;
        r.y_o = subject(adj, noun) + " with " + article(obj) + " " + obj + " " + scene + ", " + style;
        break;
      }
      case 2: {
        const auto& other = pick_other(kNouns, noun, rng);
        r.i = "turn it into " + article(other) + " " + other;
        r.y_o = subject(adj, other) + " " + scene + ", " + style;
        break;
      }
      case 3: {
        const auto& other = pick_other(kStyles, style, rng);
        const auto at = static_cast<std::size_t>(std::find(kStyles.begin(), kStyles.end(), other) - kStyles.begin());
        r.i = "make it " + kStylePhrases[at];
        r.y_o = subject(adj, noun) + " " + scene + ", " + other;
        break;
      }
      default: {
        const auto& other = pick_other(kScenes, scene, rng);
        r.i = "put it " + other;
        r.y_o = subject(adj, noun) + " " + other + ", " + style;
        break;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PromptTriplet> generate_synthetic_corpus(std::size_t n, std::uint64_t seed) {
  const auto raw = generate_raw_records(n, seed);
  const auto& modifiers = default_quality_modifiers();
  Rng rng(seed, 0xbea7);
  std::vector<PromptTriplet> out;
  out.reserve(n);
  for (const auto& r : raw) {
    std::vector<std::string> pool = modifiers;
    std::vector<std::string> picked;
    const auto k = 2 + rng.below(3);
    for (std::uint64_t j = 0; j < k; ++j) {
      const auto at = rng.below(pool.size());
      picked.push_back(pool[at]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
    }
    const auto tail = ", " + join(picked, ", ");
    out.push_back({r.x_o + tail, r.i, r.y_o + tail, r.x_o, r.y_o, {}});
  }
  return out;
}

namespace {

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

template <typename F>
void for_each_json_line(const std::filesystem::path& path, F&& f) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!is_valid_utf8(line)) fail_at(path, lineno, "invalid UTF-8");
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail_at(path, lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) fail_at(path, lineno, "expected a JSON object");
    f(obj, lineno);
  }
}

std::string required_string(const nlohmann::json& obj, const char* key, const std::filesystem::path& path,
                            std::size_t lineno) {
  if (!obj.contains(key)) fail_at(path, lineno, std::string("missing required field '") + key + "'");
  if (!obj[key].is_string()) fail_at(path, lineno, std::string("field '") + key + "' must be a string");
  return obj[key].get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key,
                                           const std::filesystem::path& path, std::size_t lineno) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  return required_string(obj, key, path, lineno);
}

}  // namespace

std::vector<PromptTriplet> read_jsonl(const std::filesystem::path& path) {
  std::vector<PromptTriplet> out;
  for_each_json_line(path, [&](const nlohmann::json& obj, std::size_t lineno) {
    PromptTriplet t;
    t.x = required_string(obj, "x", path, lineno);
    t.i = required_string(obj, "i", path, lineno);
    t.y = required_string(obj, "y", path, lineno);
    t.x_o = optional_string(obj, "x_o", path, lineno);
    t.y_o = optional_string(obj, "y_o", path, lineno);
    if (obj.contains("meta") && !obj["meta"].is_null()) {
      if (!obj["meta"].is_object()) fail_at(path, lineno, "field 'meta' must be an object");
      t.meta = obj["meta"].dump();
    }
    out.push_back(std::move(t));
  });
  return out;
}

void write_jsonl(const std::filesystem::path& path, std::span<const PromptTriplet> triplets) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& t : triplets) {
    nlohmann::ordered_json o;
    o["x"] = t.x;
    o["i"] = t.i;
    o["y"] = t.y;
    if (t.x_o) o["x_o"] = *t.x_o;
    if (t.y_o) o["y_o"] = *t.y_o;
    if (t.meta) o["meta"] = nlohmann::ordered_json::parse(*t.meta);
    out << o.dump() << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<RawRecord> read_raw_jsonl(const std::filesystem::path& path) {
  std::vector<RawRecord> out;
  for_each_json_line(path, [&](const nlohmann::json& obj, std::size_t lineno) {
    out.push_back({required_string(obj, "x_o", path, lineno), required_string(obj, "i", path, lineno),
                   required_string(obj, "y_o", path, lineno)});
  });
  return out;
}

}  // namespace promptrl
