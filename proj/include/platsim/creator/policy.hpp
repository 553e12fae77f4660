#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "platsim/core/rng.hpp"
#include "platsim/creator/creator.hpp"

namespace platsim {

/// What a policy may look at when a creator decides: the creator's own state plus,
/// for the full-information variant, the population genre preference.
struct DecisionContext {
  const CreatorRuntime& creator;
  Step n = 0;
  const std::vector<std::string>& genre_names;
  double reward_percentile = 0.5;
  const std::vector<double>* population_preference = nullptr;
};

/// The thinking step of a creator: pick explore/exploit and a genre, then write the item.
class CreatorPolicy {
 public:
  virtual ~CreatorPolicy() = default;

  virtual ExploreAction decide(const DecisionContext& ctx, RngStream& rng) = 0;

  virtual CreatedContent create(const DecisionContext& ctx, const ExploreAction& action,
                                std::span<const MemoryItem> retrieved, RngStream& rng);
};

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

/// Deterministic content for `action`: numbered title, tags reused from similar
/// past items, and a fixed description.
inline CreatedContent template_content(const CreatorRuntime& creator, const ExploreAction& action,
                                       std::span<const MemoryItem> retrieved,
                                       const std::vector<std::string>& genre_names) {
  const auto& genre = genre_names.at(action.genre.value);
  CreatedContent out;
  out.genre = action.genre;
  out.title = creator.name() + " — " + genre + " #" + std::to_string(creator.creations() + 1);

  std::map<std::string, int> freq;
  for (const auto& m : retrieved)
    if (m.genre == action.genre)
      for (const auto& t : m.content.tags) ++freq[t];
  std::vector<std::pair<std::string, int>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) out.tags.push_back(ranked[i].first);
  if (out.tags.empty()) out.tags.push_back(genre);

  out.description = "A new " + lowercase(genre) + " item from " + creator.name() + ", " +
                    creator.social_identity() + ".";
  return out;
}

inline CreatedContent CreatorPolicy::create(const DecisionContext& ctx, const ExploreAction& action,
                                            std::span<const MemoryItem> retrieved, RngStream&) {
  return template_content(ctx.creator, action, retrieved, ctx.genre_names);
}

/// Genre with the fewest owned items (lowest id on ties).
inline GenreId least_created_genre(const CreatorRuntime& c) {
  std::size_t best = 0;
  for (std::size_t g = 1; g < c.genre_count(); ++g) {
    if (c.created_count(GenreId(static_cast<std::uint32_t>(g))) <
        c.created_count(GenreId(static_cast<std::uint32_t>(best))))
      best = g;
  }
  return GenreId(static_cast<std::uint32_t>(best));
}

/// argmax over known genres of audience(g) * skill(g); unknown audience counts as 0.
inline std::optional<GenreId> best_known_genre(const CreatorRuntime& c,
                                               std::span<const double> audience) {
  const auto known = c.known_genres();
  const auto& skill = c.beliefs().skill;
  std::optional<GenreId> best;
  double best_value = 0.0;
  for (std::size_t g = 0; g < known.size(); ++g) {
    if (!known[g]) continue;
    const double v = audience[g] * skill[g];
    if (!best || v > best_value) {
      best = GenreId(static_cast<std::uint32_t>(g));
      best_value = v;
    }
  }
  return best;
}

inline std::vector<double> audience_or_zero(const Beliefs& b) {
  std::vector<double> out(b.audience.size(), 0.0);
  for (std::size_t g = 0; g < out.size(); ++g) out[g] = b.audience[g].value_or(0.0);
  return out;
}

inline ActionKind kind_for(const CreatorRuntime& c, GenreId g) {
  return c.known_genres()[g.value] ? ActionKind::Exploit : ActionKind::Explore;
}

/// Rule-based stand-in for the slow thinker: the worse the latest item did relative
/// to the creator's own record, the more likely the creator tries a new genre.
class RuleBasedPolicy : public CreatorPolicy {
 public:
  RuleBasedPolicy(double explore_max = 0.40, double explore_min = 0.05)
      : explore_max_(explore_max), explore_min_(explore_min) {}

  double explore_probability(double q) const {
    return explore_max_ - (explore_max_ - explore_min_) * std::clamp(q, 0.0, 1.0);
  }

  ExploreAction decide(const DecisionContext& ctx, RngStream& rng) override {
    const auto& c = ctx.creator;
    if (!c.alive()) fail(Errc::DeadCreator, "creator " + std::to_string(c.id().value) + " has departed");
    const bool explore = rng.bernoulli(explore_probability(ctx.reward_percentile));

    std::vector<double> audience = ctx.population_preference != nullptr
                                       ? *ctx.population_preference
                                       : audience_or_zero(c.beliefs());
    if (!explore) {
      if (auto g = best_known_genre(c, audience)) return {ActionKind::Exploit, *g};
    }
    return {ActionKind::Explore, explore_genre(ctx, rng)};
  }

 private:
  GenreId explore_genre(const DecisionContext& ctx, RngStream& rng) const {
    const auto known = ctx.creator.known_genres();
    std::vector<double> weights(known.size(), 0.0);
    bool any = false;
    for (std::size_t g = 0; g < known.size(); ++g) {
      if (known[g]) continue;
      weights[g] = ctx.population_preference != nullptr ? (*ctx.population_preference)[g] : 1.0;
      any = true;
    }
    if (!any) return least_created_genre(ctx.creator);
    return GenreId(static_cast<std::uint32_t>(rng.categorical(weights)));
  }

  double explore_max_;
  double explore_min_;
};

}  // namespace platsim
