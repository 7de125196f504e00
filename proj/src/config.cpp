#include "promptrl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>
#include <vector>

namespace promptrl {

std::string format_trainable(const Trainable& t) {
  return t.kind == Trainable::Kind::All ? "all" : "last_k(" + std::to_string(t.k) + ")";
}

Trainable parse_trainable(std::string_view text) {
  if (text == "all") return Trainable::all();
  if (text.starts_with("last_k(") && text.ends_with(")")) {
    const auto inner = text.substr(7, text.size() - 8);
    int k = 0;
    const auto [p, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), k);
    if (ec == std::errc() && p == inner.data() + inner.size() && k > 0) return Trainable::last_k(k);
  }
  throw std::invalid_argument("expected all or last_k(N), got '" + std::string(text) + "'");
}

namespace {

template <typename T>
T parse_value(std::string_view s) {
  if constexpr (std::is_same_v<T, bool>) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw std::invalid_argument("expected true or false");
  } else if constexpr (std::is_same_v<T, Trainable>) {
    return parse_trainable(s);
  } else if constexpr (std::is_same_v<T, SamplingMode>) {
    return parse_sampling_mode(s);
  } else {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("not a valid number");
    return v;
  }
}

template <typename T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, Trainable>) {
    return "\"" + format_trainable(v) + "\"";
  } else if constexpr (std::is_same_v<T, SamplingMode>) {
    return "\"" + std::string(to_string(v)) + "\"";
  } else {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    std::string out(buf, p);
    if constexpr (std::is_floating_point_v<T>) {
      if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    }
    return out;
  }
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(AppConfig&, std::string_view)> set;
  std::function<std::string(const AppConfig&)> get;
};

template <typename S, typename T>
Field field(std::string section, std::string key, S AppConfig::*sub, T S::*member) {
  return {std::move(section), std::move(key),
          [sub, member](AppConfig& c, std::string_view v) { (c.*sub).*member = parse_value<T>(v); },
          [sub, member](const AppConfig& c) { return format_value((c.*sub).*member); }};
}

template <typename T>
Field filter_field(std::string key, T FilterThresholds::*member) {
  return {"data", "filter_" + key,
          [member](AppConfig& c, std::string_view v) { c.data.filter.*member = parse_value<T>(v); },
          [member](const AppConfig& c) { return format_value(c.data.filter.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f;
    f.push_back(field("model", "d_model", &AppConfig::model, &ModelConfig::d_model));
    f.push_back(field("model", "n_layers", &AppConfig::model, &ModelConfig::n_layers));
    f.push_back(field("model", "n_heads", &AppConfig::model, &ModelConfig::n_heads));
    f.push_back(field("model", "max_len", &AppConfig::model, &ModelConfig::max_len));

    f.push_back(field("sft", "epochs", &AppConfig::sft, &SftConfig::epochs));
    f.push_back(field("sft", "batch_size", &AppConfig::sft, &SftConfig::batch_size));
    f.push_back(field("sft", "max_len", &AppConfig::sft, &SftConfig::max_len));
    f.push_back(field("sft", "lr", &AppConfig::sft, &SftConfig::lr));
    f.push_back(field("sft", "weight_decay", &AppConfig::sft, &SftConfig::weight_decay));
    f.push_back(field("sft", "unfreeze", &AppConfig::sft, &SftConfig::unfreeze));
    f.push_back(field("sft", "adam_eps", &AppConfig::sft, &SftConfig::adam_eps));
    f.push_back(field("sft", "beta1", &AppConfig::sft, &SftConfig::beta1));
    f.push_back(field("sft", "beta2", &AppConfig::sft, &SftConfig::beta2));

    f.push_back(field("rm", "epochs", &AppConfig::rm, &RmConfig::epochs));
    f.push_back(field("rm", "batch_size", &AppConfig::rm, &RmConfig::batch_size));
    f.push_back(field("rm", "max_len", &AppConfig::rm, &RmConfig::max_len));
    f.push_back(field("rm", "lr", &AppConfig::rm, &RmConfig::lr));
    f.push_back(field("rm", "weight_decay", &AppConfig::rm, &RmConfig::weight_decay));
    f.push_back(field("rm", "unfreeze", &AppConfig::rm, &RmConfig::unfreeze));

    f.push_back(field("ppo", "epochs", &AppConfig::ppo, &PpoConfig::epochs));
    f.push_back(field("ppo", "batch_size", &AppConfig::ppo, &PpoConfig::batch_size));
    f.push_back(field("ppo", "max_len", &AppConfig::ppo, &PpoConfig::max_len));
    f.push_back(field("ppo", "lr", &AppConfig::ppo, &PpoConfig::lr));
    f.push_back(field("ppo", "weight_decay", &AppConfig::ppo, &PpoConfig::weight_decay));
    f.push_back(field("ppo", "unfreeze_last", &AppConfig::ppo, &PpoConfig::unfreeze_last));
    f.push_back(field("ppo", "gamma", &AppConfig::ppo, &PpoConfig::gamma));
    f.push_back(field("ppo", "lam", &AppConfig::ppo, &PpoConfig::lam));
    f.push_back(field("ppo", "clip_range", &AppConfig::ppo, &PpoConfig::clip_range));
    f.push_back(field("ppo", "value_loss_scale", &AppConfig::ppo, &PpoConfig::value_loss_scale));
    f.push_back(field("ppo", "alpha_vci", &AppConfig::ppo, &PpoConfig::alpha_vci));
    f.push_back(field("ppo", "kl_coef", &AppConfig::ppo, &PpoConfig::kl_coef));
    f.push_back(field("ppo", "p_typical", &AppConfig::ppo, &PpoConfig::p_typical));
    f.push_back(field("ppo", "adam_eps", &AppConfig::ppo, &PpoConfig::adam_eps));
    f.push_back(field("ppo", "beta1", &AppConfig::ppo, &PpoConfig::beta1));
    f.push_back(field("ppo", "beta2", &AppConfig::ppo, &PpoConfig::beta2));
    f.push_back(field("ppo", "inner_epochs", &AppConfig::ppo, &PpoConfig::inner_epochs));
    f.push_back(field("ppo", "normalize_advantages", &AppConfig::ppo, &PpoConfig::normalize_advantages));
    f.push_back(field("ppo", "positive_share", &AppConfig::ppo, &PpoConfig::positive_share));
    f.push_back(field("ppo", "neg_prompt_prob", &AppConfig::ppo, &PpoConfig::neg_prompt_prob));
    f.push_back(field("ppo", "neg_remove_prob", &AppConfig::ppo, &PpoConfig::neg_remove_prob));
    f.push_back(field("ppo", "max_new_tokens", &AppConfig::ppo, &PpoConfig::max_new_tokens));
    f.push_back(field("ppo", "divergence_limit", &AppConfig::ppo, &PpoConfig::divergence_limit));

    f.push_back(field("sampling", "mode", &AppConfig::sampling, &SamplingConfig::mode));
    f.push_back(field("sampling", "p", &AppConfig::sampling, &SamplingConfig::p));
    f.push_back(field("sampling", "neg_prompt_prob", &AppConfig::sampling, &SamplingConfig::neg_prompt_prob));
    f.push_back(field("sampling", "neg_remove_prob", &AppConfig::sampling, &SamplingConfig::neg_remove_prob));
    f.push_back(field("sampling", "max_new_tokens", &AppConfig::sampling, &SamplingConfig::max_new_tokens));
    f.push_back(field("sampling", "temperature", &AppConfig::sampling, &SamplingConfig::temperature));

    f.push_back(field("rewards", "w_aesthetic", &AppConfig::rewards, &RewardConfig::w_aesthetic));
    f.push_back(field("rewards", "w_preference", &AppConfig::rewards, &RewardConfig::w_preference));
    f.push_back(field("rewards", "w_ci", &AppConfig::rewards, &RewardConfig::w_ci));

    f.push_back(field("ci", "threshold", &AppConfig::ci, &CiOptions::threshold));
    f.push_back(field("ci", "highlight_weight", &AppConfig::ci, &CiOptions::highlight_weight));

    f.push_back(field("data", "n", &AppConfig::data, &DataConfig::n));
    f.push_back(field("data", "holdout", &AppConfig::data, &DataConfig::holdout));
    f.push_back(field("data", "vocab_max_size", &AppConfig::data, &DataConfig::vocab_max_size));
    f.push_back(filter_field("min_ci", &FilterThresholds::min_ci));
    f.push_back(filter_field("min_aesthetic", &FilterThresholds::min_aesthetic));
    f.push_back(filter_field("min_preference", &FilterThresholds::min_preference));
    f.push_back(filter_field("max_non_ascii_share", &FilterThresholds::max_non_ascii_share));
    return f;
  }();
  return all;
}

void assign(AppConfig& config, std::string_view section, std::string_view key, std::string_view value,
            const std::string& where) {
  if (section.empty() && key == "seed") {
    try {
      config.seed = parse_value<std::uint64_t>(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": seed: " + e.what());
    }
    return;
  }
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) {
      try {
        f.set(config, value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + std::string(section) + "." + std::string(key) + ": " + e.what());
      }
      return;
    }
  }
  throw ConfigError(where + ": unknown key " + (section.empty() ? "" : std::string(section) + ".") + std::string(key));
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view v, const std::string& where) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return std::string(v.substr(1, v.size() - 2));
  if (!v.empty() && v.front() == '"') throw ConfigError(where + ": unterminated string");
  return std::string(v);
}

}  // namespace

void AppConfig::propagate_seed() {
  model.seed = seed;
  sft.seed = seed;
  ppo.seed = seed;
  sampling.seed = seed;
}

void AppConfig::validate() const {
  ModelConfig m = model;
  if (m.vocab_size == 0) m.vocab_size = 8;  // vocabulary is fixed later
  m.validate();
  sft.validate();
  rm.validate();
  ppo.validate();
  sampling.validate();
  if (rewards.w_aesthetic < 0 || rewards.w_preference < 0 || rewards.w_ci < 0) {
    throw std::invalid_argument("rewards weights must be non-negative");
  }
  if (data.n == 0) throw std::invalid_argument("data.n must be positive");
}

void apply_config_text(AppConfig& config, std::string_view text, std::string_view origin) {
  std::string section;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = std::string(origin) + ":" + std::to_string(lineno);
    std::string_view line = raw;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '"') quoted = !quoted;
      if (line[k] == '#' && !quoted) {
        line = line.substr(0, k);
        break;
      }
    }
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = std::string(strip(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const auto key = strip(line.substr(0, eq));
    const auto value = unquote(strip(line.substr(eq + 1)), where);
    assign(config, section, key, value, where);
  }
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  AppConfig config;
  apply_config_text(config, text, path.string());
  return config;
}

void apply_override(AppConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' needs key=value");
  const auto path = strip(assignment.substr(0, eq));
  const auto value = unquote(strip(assignment.substr(eq + 1)), "override");
  const auto dot = path.find('.');
  if (dot == std::string_view::npos) {
    assign(config, "", path, value, "override");
  } else {
    assign(config, path.substr(0, dot), path.substr(dot + 1), value, "override");
  }
}

std::string dump_config(const AppConfig& config) {
  std::ostringstream os;
  os << "seed = " << config.seed << "\n";
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      section = f.section;
      os << "\n[" << section << "]\n";
    }
    os << f.key << " = " << f.get(config) << "\n";
  }
  return os.str();
}

}  // namespace promptrl
