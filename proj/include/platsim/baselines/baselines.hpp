#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "platsim/core/rng.hpp"
#include "platsim/creator/policy.hpp"

namespace platsim {

/// A creator's creation-probability distribution over genres.
using StrategyVector = std::vector<double>;

/// Clamp negative entries to zero and renormalize; an all-zero input becomes uniform.
inline StrategyVector project_to_simplex(StrategyVector s) {
  double total = 0.0;
  for (auto& x : s) {
    if (!(x > 0.0)) x = 0.0;
    total += x;
  }
  if (total <= 0.0) {
    std::fill(s.begin(), s.end(), 1.0 / static_cast<double>(s.size()));
    return s;
  }
  for (auto& x : s) x /= total;
  return s;
}

/// Creator feature dynamics: one gradient step along the normalized feedback.
inline StrategyVector cfd_step(const StrategyVector& s, std::span<const double> feedback, double lr) {
  const double total = std::accumulate(feedback.begin(), feedback.end(), 0.0);
  if (total <= 0.0 || lr <= 0.0) return s;
  StrategyVector next = s;
  for (std::size_t g = 0; g < next.size(); ++g) next[g] += lr * feedback[g] / total;
  return project_to_simplex(std::move(next));
}

/// Local better response: try a random zero-sum direction and keep it only if it
/// strictly improves `utility_of`.
inline StrategyVector lbr_step(const StrategyVector& s,
                               const std::function<double(const StrategyVector&)>& utility_of,
                               double step_size, RngStream& rng) {
  StrategyVector d(s.size());
  double mean = 0.0;
  for (auto& x : d) {
    x = rng.normal();
    mean += x;
  }
  mean /= static_cast<double>(d.size());
  double norm = 0.0;
  for (auto& x : d) {
    x -= mean;
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (step_size <= 0.0 || norm == 0.0) return s;
  StrategyVector candidate = s;
  for (std::size_t g = 0; g < s.size(); ++g) candidate[g] += step_size * d[g] / norm;
  candidate = project_to_simplex(std::move(candidate));
  return utility_of(candidate) > utility_of(s) ? candidate : s;
}

/// SimuLine: sample a genre in proportion to the likes it has collected.
inline GenreId simuline_choose(std::span<const double> likes, RngStream& rng) {
  return GenreId(static_cast<std::uint32_t>(rng.categorical(likes)));
}

inline GenreId random_choose(std::size_t n_genres, RngStream& rng) {
  if (n_genres == 0) fail(Errc::EmptyGenres, "no genres to choose from");
  return GenreId(static_cast<std::uint32_t>(rng.below(n_genres)));
}

namespace detail {

inline std::vector<double> clicks_by_genre(const CreatorRuntime& c) {
  std::vector<double> out(c.genre_count(), 0.0);
  for (const auto& e : c.feedback().entries()) out[e.genre.value] += static_cast<double>(e.clicks);
  return out;
}

}  // namespace detail

class CfdPolicy : public CreatorPolicy {
 public:
  explicit CfdPolicy(double lr) : lr_(lr) {}

  ExploreAction decide(const DecisionContext& ctx, RngStream& rng) override {
    const auto& c = ctx.creator;
    if (strategy_.empty()) {
      strategy_ = project_to_simplex(c.beliefs().skill);
      seen_clicks_.assign(c.genre_count(), 0.0);
    }
    const auto now = detail::clicks_by_genre(c);
    std::vector<double> recent(now.size());
    for (std::size_t g = 0; g < now.size(); ++g) recent[g] = now[g] - seen_clicks_[g];
    seen_clicks_ = now;
    strategy_ = cfd_step(strategy_, recent, lr_);
    const GenreId g(static_cast<std::uint32_t>(rng.categorical(strategy_)));
    return {kind_for(c, g), g};
  }

  const StrategyVector& strategy() const { return strategy_; }

 private:
  double lr_;
  StrategyVector strategy_;
  std::vector<double> seen_clicks_;
};

class LbrPolicy : public CreatorPolicy {
 public:
  explicit LbrPolicy(double step_size) : step_size_(step_size) {}

  ExploreAction decide(const DecisionContext& ctx, RngStream& rng) override {
    const auto& c = ctx.creator;
    if (strategy_.empty()) strategy_ = project_to_simplex(c.beliefs().skill);
    const auto audience = audience_or_zero(c.beliefs());
    auto utility_of = [&](const StrategyVector& s) {
      return std::inner_product(s.begin(), s.end(), audience.begin(), 0.0);
    };
    strategy_ = lbr_step(strategy_, utility_of, step_size_, rng);
    const GenreId g(static_cast<std::uint32_t>(rng.categorical(strategy_)));
    return {kind_for(c, g), g};
  }

 private:
  double step_size_;
  StrategyVector strategy_;
};

class SimulinePolicy : public CreatorPolicy {
 public:
  ExploreAction decide(const DecisionContext& ctx, RngStream& rng) override {
    const auto likes = detail::clicks_by_genre(ctx.creator);
    const auto g = simuline_choose(likes, rng);
    return {kind_for(ctx.creator, g), g};
  }
};

class RandomPolicy : public CreatorPolicy {
 public:
  ExploreAction decide(const DecisionContext& ctx, RngStream& rng) override {
    const auto g = random_choose(ctx.creator.genre_count(), rng);
    return {kind_for(ctx.creator, g), g};
  }
};

}  // namespace platsim
