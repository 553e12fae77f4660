#pragma once

#include <atomic>
#include <iomanip>
#include <sstream>
#include <string>

#include "platsim/creator/policy.hpp"
#include "platsim/llm/client.hpp"
#include "platsim/llm/parse.hpp"
#include "platsim/llm/prompt.hpp"

namespace platsim {

namespace detail {

inline std::string fmt(double x, int precision = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << x;
  return os.str();
}

inline std::string genre_list(const std::vector<bool>& known, bool want_known,
                              const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t g = 0; g < known.size(); ++g) {
    if (known[g] != want_known) continue;
    if (!out.empty()) out += ", ";
    out += names[g];
  }
  return out.empty() ? "none" : out;
}

inline std::string profile_text(const CreatorRuntime& c) {
  return "Social identity: " + c.social_identity() + ". Intrinsic motivation: " +
         c.intrinsic_motivation() + ". Activity: creates an item with probability " +
         fmt(c.create_probability()) + " per step.";
}

inline std::string memory_text(std::span<const MemoryItem> items, const std::vector<std::string>& names) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += "{title: " + items[i].content.title + ", genre: " + names[items[i].genre.value] +
           ", description: " + items[i].content.description + "}";
  }
  return out + "]";
}

}  // namespace detail

/// Variables for the slow-thinker prompt.
inline PromptVars slow_thinker_vars(const DecisionContext& ctx) {
  const auto& c = ctx.creator;
  const auto& names = ctx.genre_names;
  PromptVars v;
  v["name"] = c.name();
  v["profile"] = detail::profile_text(c);
  std::string audience;
  for (std::size_t g = 0; g < names.size(); ++g) {
    if (g) audience += ", ";
    const auto& a = c.beliefs().audience[g];
    audience += names[g] + ": " + (a ? detail::fmt(*a) : "[unknown]");
  }
  v["audience"] = audience;
  std::string skill;
  for (std::size_t g = 0; g < names.size(); ++g) {
    if (g) skill += ", ";
    skill += names[g] + ": " + detail::fmt(c.beliefs().skill[g]);
  }
  v["skill"] = skill;
  if (auto last = c.last_created()) {
    const auto* e = c.feedback().find(*last);
    v["last_genre"] = e ? names[e->genre.value] : "unknown";
    v["last_utility"] = detail::fmt(c.utility_of_last(ctx.n).value_or(0.0));
  } else {
    v["last_genre"] = "none";
    v["last_utility"] = "0.000";
  }
  const auto known = c.known_genres();
  v["unknown_genres"] = detail::genre_list(known, false, names);
  v["known_genres"] = detail::genre_list(known, true, names);
  return v;
}

/// Creator policy driven by a chat-completion model. It draws nothing from the rng
/// itself; any failure (transport or parse) defers to the rule-based policy with
/// the same rng, so a model that never answers usefully reproduces a rule-based run.
class LlmPolicy : public CreatorPolicy {
 public:
  LlmPolicy(LlmClient& client, RuleBasedPolicy fallback) : client_(client), fallback_(fallback) {}

  ExploreAction decide(const DecisionContext& ctx, RngStream& rng) override {
    if (!ctx.creator.alive()) fail(Errc::DeadCreator, "creator has departed");
    try {
      const auto reply = client_.complete(render_prompt(kSlowThinkerPrompt, slow_thinker_vars(ctx)));
      auto action = parse_explore_action(reply, ctx.genre_names);
      action.kind = kind_for(ctx.creator, action.genre);
      return action;
    } catch (const SimError&) {
      ++fallbacks_;
      return fallback_.decide(ctx, rng);
    }
  }

  CreatedContent create(const DecisionContext& ctx, const ExploreAction& action,
                        std::span<const MemoryItem> retrieved, RngStream& rng) override {
    PromptVars v;
    v["name"] = ctx.creator.name();
    v["profile"] = detail::profile_text(ctx.creator);
    v["action"] = format_explore_action(action, ctx.genre_names);
    v["history"] = detail::memory_text(retrieved, ctx.genre_names);
    try {
      auto content = parse_content(client_.complete(render_prompt(kFastThinkerPrompt, v)), ctx.genre_names);
      content.genre = action.genre;  // the decided genre wins over the model's label
      return content;
    } catch (const SimError&) {
      ++fallbacks_;
      return CreatorPolicy::create(ctx, action, retrieved, rng);
    }
  }

  std::size_t fallbacks() const { return fallbacks_.load(); }

 private:
  LlmClient& client_;
  RuleBasedPolicy fallback_;
  std::atomic<std::size_t> fallbacks_{0};
};

/// Inputs to the two profile-summarization prompts.
struct ProfileFacts {
  std::string platform;
  std::string name;
  std::string recent_content;
  std::string genre_proportion;
  double creations_per_day = 0.0;
  std::int64_t followers = 0;
  double average_views = 0.0;
};

/// Asks the model for identity and motivation; keeps the given defaults on failure.
inline std::pair<std::string, std::string> summarize_profile(LlmClient& client, const ProfileFacts& f,
                                                             std::string identity, std::string motivation) {
  PromptVars v{{"platform", f.platform},
               {"creator_name", f.name},
               {"recent_content", f.recent_content},
               {"genre_proportion", f.genre_proportion},
               {"creations_per_day", detail::fmt(f.creations_per_day)},
               {"followers", std::to_string(f.followers)},
               {"average_views", detail::fmt(f.average_views, 1)},
               {"recent_comments", "none"}};
  try {
    identity = parse_labelled(client.complete(render_prompt(kSocialIdentityPrompt, v)), "Social Identity");
  } catch (const SimError&) {
  }
  try {
    motivation = parse_labelled(client.complete(render_prompt(kIntrinsicMotivationPrompt, v)),
                                "Intrinsic Motivation");
  } catch (const SimError&) {
  }
  return {identity, motivation};
}

}  // namespace platsim
