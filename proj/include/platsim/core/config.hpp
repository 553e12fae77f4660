#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "platsim/core/csv.hpp"
#include "platsim/core/errors.hpp"

namespace platsim {

struct UserModelConfig {
  double alpha_click = 0.8;
  double exit_base = 0.05;
  double exit_per_skip = 0.15;
  double novelty_decay = 0.8;
  double novelty_weight = 0.2;
};

struct MfConfig {
  int dim = 32;
  double lr = 0.05;
  int epochs = 5;
  double l2 = 1e-4;
};

struct RerankConfig {
  int pool_multiplier = 4;
  double mmr_lambda = 0.7;
  double fairrec_min_share = 0.5;
  double fairco_lambda = 0.5;
  double pmmf_eta = 0.1;
  double pmmf_dual_max = 2.0;
};

struct CreatorConfig {
  double explore_max = 0.40;
  double explore_min = 0.05;
  int memory_k = 3;
  bool full_information = false;
  double cfd_lr = 0.1;
  double lbr_step = 0.1;
};

struct LlmSettings {
  std::string endpoint;
  std::string model = "llama3-8b";
  double temperature = 0.0;
  int max_tokens = 512;
  int timeout_ms = 30000;
  int retries = 1;
  int concurrency = 4;
  std::string platform = "YouTube";
};

/// Parameters of the synthetic dataset generator.
struct SynthParams {
  std::uint64_t seed = 2024;
  int n_users = 100;
  int n_creators = 50;
  int n_genres = 14;
  double genre_skew = 1.0;          // genre popularity ~ rank^-skew
  double concentration = 0.8;       // P(item genre = creator's main genre)
  double items_median = 20.0;       // median historical items per creator
  double activity_sigma = 1.0;      // log-normal spread of creator activity
  int span_min_days = 30;
  int span_max_days = 365;
  int interactions_min = 10;
  int interactions_max = 40;
  int user_span_days = 60;
  int user_favorite_genres = 2;
  double user_focus = 0.85;         // share of a user's interactions in favorite genres
};

struct SimConfig {
  int n_users = 0;      // 0: every user in the dataset
  int n_creators = 0;   // 0: every creator in the dataset
  int n_steps = 100;
  int warmup = 10;      // N0
  int list_length = 5;  // K
  int retrain_period = 5;
  int timeliness_window = 20;
  double beta = 0.5;
  int departure_threshold = 5;
  std::uint64_t seed = 0;
  double activity_norm = 0.0;  // 0: population maximum
  std::string ranker = "mf";
  std::string reranker = "none";
  std::string creator_policy = "creagent";
  std::string data;  // dataset directory; empty: synthesize from `synth`
  int pop_window = 20;
  UserModelConfig user;
  MfConfig mf;
  RerankConfig rerank;
  CreatorConfig creator;
  LlmSettings llm;
  SynthParams synth;

  /// Checks every range constraint; throws ConfigError.
  void validate() const;

  /// Canonical key = value text; parsing it back yields an identical config.
  std::string to_text() const;
};

namespace detail {

struct KeyBinding {
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

inline void bind_int(std::map<std::string, KeyBinding>& m, const std::string& key, int& ref) {
  m[key] = {[&ref, key](const std::string& v) {
              try {
                ref = static_cast<int>(parse_int(v));
              } catch (const SimError&) {
                fail(Errc::ConfigError, key + ": expected an integer, got '" + v + "'");
              }
            },
            [&ref] { return std::to_string(ref); }};
}

inline void bind_u64(std::map<std::string, KeyBinding>& m, const std::string& key,
                     std::uint64_t& ref) {
  m[key] = {[&ref, key](const std::string& v) {
              try {
                const auto x = parse_int(v);
                if (x < 0) throw SimError(Errc::SchemaError, "negative");
                ref = static_cast<std::uint64_t>(x);
              } catch (const SimError&) {
                fail(Errc::ConfigError, key + ": expected a non-negative integer, got '" + v + "'");
              }
            },
            [&ref] { return std::to_string(ref); }};
}

inline void bind_double(std::map<std::string, KeyBinding>& m, const std::string& key,
                        double& ref) {
  m[key] = {[&ref, key](const std::string& v) {
              try {
                ref = parse_double(v);
              } catch (const SimError&) {
                fail(Errc::ConfigError, key + ": expected a number, got '" + v + "'");
              }
            },
            [&ref] { return format_double(ref); }};
}

inline void bind_bool(std::map<std::string, KeyBinding>& m, const std::string& key, bool& ref) {
  m[key] = {[&ref, key](const std::string& v) {
              if (v == "true" || v == "1") ref = true;
              else if (v == "false" || v == "0") ref = false;
              else fail(Errc::ConfigError, key + ": expected true/false, got '" + v + "'");
            },
            [&ref] { return std::string(ref ? "true" : "false"); }};
}

inline void bind_string(std::map<std::string, KeyBinding>& m, const std::string& key,
                        std::string& ref) {
  m[key] = {[&ref](const std::string& v) { ref = v; }, [&ref] { return ref; }};
}

inline void bind_synth(std::map<std::string, KeyBinding>& m, const std::string& prefix,
                       SynthParams& s) {
  bind_u64(m, prefix + "seed", s.seed);
  bind_int(m, prefix + "n_users", s.n_users);
  bind_int(m, prefix + "n_creators", s.n_creators);
  bind_int(m, prefix + "n_genres", s.n_genres);
  bind_double(m, prefix + "genre_skew", s.genre_skew);
  bind_double(m, prefix + "concentration", s.concentration);
  bind_double(m, prefix + "items_median", s.items_median);
  bind_double(m, prefix + "activity_sigma", s.activity_sigma);
  bind_int(m, prefix + "span_min_days", s.span_min_days);
  bind_int(m, prefix + "span_max_days", s.span_max_days);
  bind_int(m, prefix + "interactions_min", s.interactions_min);
  bind_int(m, prefix + "interactions_max", s.interactions_max);
  bind_int(m, prefix + "user_span_days", s.user_span_days);
  bind_int(m, prefix + "user_favorite_genres", s.user_favorite_genres);
  bind_double(m, prefix + "user_focus", s.user_focus);
}

inline std::map<std::string, KeyBinding> bindings(SimConfig& c) {
  std::map<std::string, KeyBinding> m;
  bind_int(m, "n_users", c.n_users);
  bind_int(m, "n_creators", c.n_creators);
  bind_int(m, "n_steps", c.n_steps);
  bind_int(m, "warmup", c.warmup);
  bind_int(m, "list_length", c.list_length);
  bind_int(m, "retrain_period", c.retrain_period);
  bind_int(m, "timeliness_window", c.timeliness_window);
  bind_double(m, "beta", c.beta);
  bind_int(m, "departure_threshold", c.departure_threshold);
  bind_u64(m, "seed", c.seed);
  bind_double(m, "activity_norm", c.activity_norm);
  bind_string(m, "ranker", c.ranker);
  bind_string(m, "reranker", c.reranker);
  bind_string(m, "creator_policy", c.creator_policy);
  bind_string(m, "data", c.data);
  bind_int(m, "pop.window", c.pop_window);
  bind_double(m, "user.alpha_click", c.user.alpha_click);
  bind_double(m, "user.exit_base", c.user.exit_base);
  bind_double(m, "user.exit_per_skip", c.user.exit_per_skip);
  bind_double(m, "user.novelty_decay", c.user.novelty_decay);
  bind_double(m, "user.novelty_weight", c.user.novelty_weight);
  bind_int(m, "mf.dim", c.mf.dim);
  bind_double(m, "mf.lr", c.mf.lr);
  bind_int(m, "mf.epochs", c.mf.epochs);
  bind_double(m, "mf.l2", c.mf.l2);
  bind_int(m, "rerank.pool_multiplier", c.rerank.pool_multiplier);
  bind_double(m, "mmr.lambda", c.rerank.mmr_lambda);
  bind_double(m, "fairrec.min_share", c.rerank.fairrec_min_share);
  bind_double(m, "fairco.lambda", c.rerank.fairco_lambda);
  bind_double(m, "pmmf.eta", c.rerank.pmmf_eta);
  bind_double(m, "pmmf.dual_max", c.rerank.pmmf_dual_max);
  bind_double(m, "creator.explore_max", c.creator.explore_max);
  bind_double(m, "creator.explore_min", c.creator.explore_min);
  bind_int(m, "creator.memory_k", c.creator.memory_k);
  bind_bool(m, "creator.full_information", c.creator.full_information);
  bind_double(m, "cfd.lr", c.creator.cfd_lr);
  bind_double(m, "lbr.step_size", c.creator.lbr_step);
  bind_string(m, "llm.endpoint", c.llm.endpoint);
  bind_string(m, "llm.model", c.llm.model);
  bind_double(m, "llm.temperature", c.llm.temperature);
  bind_int(m, "llm.max_tokens", c.llm.max_tokens);
  bind_int(m, "llm.timeout_ms", c.llm.timeout_ms);
  bind_int(m, "llm.retries", c.llm.retries);
  bind_int(m, "llm.concurrency", c.llm.concurrency);
  bind_string(m, "llm.platform", c.llm.platform);
  bind_synth(m, "synth.", c.synth);
  return m;
}

inline std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// Parses `key = value` lines ('#' starts a comment) and applies them through `m`.
inline void apply_kv_text(std::map<std::string, KeyBinding>& m, std::istream& is) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(Errc::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    auto it = m.find(key);
    if (it == m.end()) fail(Errc::ConfigError, "unknown key '" + key + "'");
    it->second.set(value);
  }
}

}  // namespace detail

inline SimConfig parse_config(std::istream& is) {
  SimConfig cfg;
  auto m = detail::bindings(cfg);
  detail::apply_kv_text(m, is);
  cfg.validate();
  return cfg;
}

inline SimConfig parse_config_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ConfigError, "cannot open config file " + path);
  return parse_config(in);
}

inline SynthParams parse_synth_params(std::istream& is) {
  SynthParams p;
  std::map<std::string, detail::KeyBinding> m;
  detail::bind_synth(m, "", p);
  detail::apply_kv_text(m, is);
  return p;
}

inline std::string SimConfig::to_text() const {
  auto copy = *this;
  auto m = detail::bindings(copy);
  std::ostringstream os;
  for (const auto& [key, binding] : m) os << key << " = " << binding.get() << '\n';
  return os.str();
}

inline void SimConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) fail(Errc::ConfigError, msg);
  };
  require(n_users >= 0, "n_users must be >= 0");
  require(n_creators >= 0, "n_creators must be >= 0");
  require(n_steps >= 1, "n_steps must be >= 1");
  require(warmup >= 1 && warmup <= n_steps, "warmup must satisfy 1 <= warmup <= n_steps");
  require(list_length >= 1, "list_length must be >= 1");
  require(retrain_period >= 1, "retrain_period must be >= 1");
  require(timeliness_window >= 1, "timeliness_window must be >= 1");
  require(beta >= 0.0 && beta <= 1.0, "beta must lie in [0, 1]");
  require(departure_threshold >= 1, "departure_threshold must be >= 1");
  require(activity_norm >= 0.0, "activity_norm must be >= 0");
  require(pop_window >= 1, "pop.window must be >= 1");
  const std::vector<std::string> rankers{"random", "pop", "mf", "bpr"};
  const std::vector<std::string> rerankers{"none", "mmr", "fairrec", "fairco", "pmmf"};
  const std::vector<std::string> policies{"creagent", "creagent_llm", "cfd", "lbr", "simuline",
                                          "random"};
  auto one_of = [](const std::string& v, const std::vector<std::string>& allowed) {
    for (const auto& a : allowed)
      if (a == v) return true;
    return false;
  };
  require(one_of(ranker, rankers), "unknown ranker '" + ranker + "'");
  require(one_of(reranker, rerankers), "unknown reranker '" + reranker + "'");
  require(one_of(creator_policy, policies), "unknown creator_policy '" + creator_policy + "'");
  require(user.alpha_click >= 0.0, "user.alpha_click must be >= 0");
  require(user.exit_base >= 0.0 && user.exit_base <= 1.0, "user.exit_base must lie in [0, 1]");
  require(user.exit_per_skip >= 0.0, "user.exit_per_skip must be >= 0");
  require(user.novelty_decay >= 0.0 && user.novelty_decay <= 1.0,
          "user.novelty_decay must lie in [0, 1]");
  require(user.novelty_weight >= 0.0, "user.novelty_weight must be >= 0");
  require(mf.dim >= 1 && mf.epochs >= 0 && mf.lr > 0.0 && mf.l2 >= 0.0, "invalid mf.* settings");
  require(rerank.pool_multiplier >= 1, "rerank.pool_multiplier must be >= 1");
  require(rerank.mmr_lambda >= 0.0 && rerank.mmr_lambda <= 1.0, "mmr.lambda must lie in [0, 1]");
  require(rerank.fairrec_min_share >= 0.0 && rerank.fairrec_min_share <= 1.0,
          "fairrec.min_share must lie in [0, 1]");
  require(rerank.fairco_lambda >= 0.0, "fairco.lambda must be >= 0");
  require(rerank.pmmf_eta > 0.0, "pmmf.eta must be > 0");
  require(rerank.pmmf_dual_max >= 0.0, "pmmf.dual_max must be >= 0");
  require(creator.explore_min >= 0.0 && creator.explore_max <= 1.0 &&
              creator.explore_min <= creator.explore_max,
          "creator.explore_min/max must satisfy 0 <= min <= max <= 1");
  require(creator.memory_k >= 1, "creator.memory_k must be >= 1");
  require(creator.cfd_lr >= 0.0, "cfd.lr must be >= 0");
  require(creator.lbr_step >= 0.0, "lbr.step_size must be >= 0");
  require(llm.retries >= 0, "llm.retries must be >= 0");
  require(llm.timeout_ms > 0, "llm.timeout_ms must be > 0");
  require(llm.concurrency >= 1, "llm.concurrency must be >= 1");
}

}  // namespace platsim
