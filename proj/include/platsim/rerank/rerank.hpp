#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "platsim/core/config.hpp"
#include "platsim/core/event_log.hpp"
#include "platsim/recsys/ranker.hpp"

namespace platsim {

/// Exposure each creator has received since re-ranking started, plus who is still
/// alive. Fairness re-rankers read a snapshot of it taken at the start of the step.
class ExposureLedger {
 public:
  explicit ExposureLedger(std::size_t n_creators = 0)
      : exposure_(n_creators, 0.0), alive_(n_creators, true) {}

  void add(CreatorId c, double exposures) { exposure_.at(c.value) += exposures; }
  void set_alive(CreatorId c, bool alive) { alive_.at(c.value) = alive; }

  double exposure(CreatorId c) const { return exposure_.at(c.value); }
  bool alive(CreatorId c) const { return alive_.at(c.value); }
  std::size_t size() const { return exposure_.size(); }

  std::size_t alive_count() const {
    return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), true));
  }

  /// Mean exposure over alive creators; 0 when nobody is alive.
  double mean_exposure() const {
    double total = 0.0, n = 0.0;
    for (std::size_t c = 0; c < exposure_.size(); ++c) {
      if (!alive_[c]) continue;
      total += exposure_[c];
      n += 1.0;
    }
    return n > 0.0 ? total / n : 0.0;
  }

  /// Target share of exposure proportional to summed relevance over alive creators.
  std::vector<double> target_share(std::span<const ScoredItem> scored) const {
    std::vector<double> share(exposure_.size(), 0.0);
    double total = 0.0;
    for (const auto& s : scored) {
      if (s.creator.value >= share.size() || !alive_[s.creator.value]) continue;
      share[s.creator.value] += std::max(0.0, s.score);
      total += std::max(0.0, s.score);
    }
    if (total > 0.0)
      for (auto& x : share) x /= total;
    return share;
  }

  /// Recounts exposures from the log over [from, to].
  void reconcile(const EventLog& log, const Catalog& catalog, Step from, Step to) {
    std::fill(exposure_.begin(), exposure_.end(), 0.0);
    for (Step s = from; s <= to; ++s)
      for (const auto& ev : log.events_at(s))
        if (ev.exposed) exposure_.at(catalog[ev.item].creator.value) += 1.0;
  }

 private:
  std::vector<double> exposure_;
  std::vector<bool> alive_;
};

/// Rescales scores to [0, 1] in place; a constant list maps to 1.
inline void normalize_relevance(std::vector<ScoredItem>& scored) {
  if (scored.empty()) return;
  auto [lo, hi] = std::minmax_element(scored.begin(), scored.end(),
                                      [](const auto& a, const auto& b) { return a.score < b.score; });
  const double min = lo->score, range = hi->score - lo->score;
  for (auto& s : scored) s.score = range > 0.0 ? (s.score - min) / range : 1.0;
}

namespace detail {

inline std::vector<ScoredItem> take(std::vector<ScoredItem> v, std::size_t k) {
  if (v.size() > k) v.resize(k);
  return v;
}

}  // namespace detail

/// Maximal marginal relevance with genre-indicator similarity.
inline std::vector<ScoredItem> mmr_rerank(std::span<const ScoredItem> scored, double lambda,
                                          std::size_t k) {
  std::vector<ScoredItem> out;
  std::vector<bool> used(scored.size(), false);
  std::vector<bool> genre_taken;
  while (out.size() < k && out.size() < scored.size()) {
    std::size_t best = scored.size();
    double best_value = 0.0;
    for (std::size_t i = 0; i < scored.size(); ++i) {
      if (used[i]) continue;
      const auto g = scored[i].genre.value;
      const double sim = g < genre_taken.size() && genre_taken[g] ? 1.0 : 0.0;
      const double value = lambda * scored[i].score - (1.0 - lambda) * sim;
      bool better = best == scored.size() || value > best_value;
      if (!better && value == best_value) {
        const auto& b = scored[best];
        better = scored[i].score > b.score || (scored[i].score == b.score && scored[i].item < b.item);
      }
      if (better) {
        best = i;
        best_value = value;
      }
    }
    used[best] = true;
    const auto g = scored[best].genre.value;
    if (g >= genre_taken.size()) genre_taken.resize(g + 1, false);
    genre_taken[g] = true;
    out.push_back(scored[best]);
  }
  return out;
}

/// Two-phase greedy: one slot each for creators under `min_share` of the mean
/// exposure (least exposed first), then relevance order for the remaining slots.
inline std::vector<ScoredItem> fairrec_rerank(std::span<const ScoredItem> scored,
                                              const ExposureLedger& ledger, std::size_t k,
                                              double min_share) {
  const double threshold = min_share * ledger.mean_exposure();
  std::vector<CreatorId> needy;
  for (const auto& s : scored) {
    if (ledger.exposure(s.creator) < threshold &&
        std::find(needy.begin(), needy.end(), s.creator) == needy.end())
      needy.push_back(s.creator);
  }
  std::stable_sort(needy.begin(), needy.end(), [&](CreatorId a, CreatorId b) {
    if (ledger.exposure(a) != ledger.exposure(b)) return ledger.exposure(a) < ledger.exposure(b);
    return a < b;
  });

  std::vector<ScoredItem> out;
  std::vector<bool> used(scored.size(), false);
  for (bool picked = true; picked && out.size() < k;) {
    picked = false;
    for (auto c : needy) {
      if (out.size() >= k) break;
      std::size_t best = scored.size();
      for (std::size_t i = 0; i < scored.size(); ++i) {
        if (used[i] || scored[i].creator != c) continue;
        if (best == scored.size() || scored[i].score > scored[best].score) best = i;
      }
      if (best == scored.size()) continue;
      used[best] = true;
      out.push_back(scored[best]);
      picked = true;
    }
  }
  for (std::size_t i = 0; i < scored.size() && out.size() < k; ++i) {
    if (!used[i]) out.push_back(scored[i]);
  }
  return out;
}

/// Relevance plus a boost proportional to how far the owner trails the mean exposure.
inline std::vector<ScoredItem> fairco_rerank(std::span<const ScoredItem> scored,
                                             const ExposureLedger& ledger, double lambda_fair,
                                             std::size_t k) {
  const double mean = ledger.mean_exposure();
  std::vector<std::pair<double, std::size_t>> adjusted;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    double err = 0.0;
    if (mean > 0.0) err = std::max(0.0, mean - ledger.exposure(scored[i].creator)) / mean;
    adjusted.emplace_back(scored[i].score + lambda_fair * err, i);
  }
  std::stable_sort(adjusted.begin(), adjusted.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<ScoredItem> out;
  for (const auto& [_, i] : adjusted) out.push_back(scored[i]);
  return detail::take(std::move(out), k);
}

/// Dual-adjusted selection: relevance plus the owner's dual, top-k.
inline std::vector<ScoredItem> pmmf_select(std::span<const ScoredItem> scored,
                                           std::span<const double> duals, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> adjusted;
  for (std::size_t i = 0; i < scored.size(); ++i)
    adjusted.emplace_back(scored[i].score + duals[scored[i].creator.value], i);
  std::stable_sort(adjusted.begin(), adjusted.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<ScoredItem> out;
  for (const auto& [_, i] : adjusted) out.push_back(scored[i]);
  return detail::take(std::move(out), k);
}

/// dual(c) -= eta * (selected(c) - k / alive), clamped to [0, dual_max], for alive creators.
inline void pmmf_update_duals(std::vector<double>& duals, std::span<const ScoredItem> selected,
                              const ExposureLedger& ledger, std::size_t k, double eta,
                              double dual_max) {
  const auto alive = ledger.alive_count();
  if (alive == 0) return;
  const double fair = static_cast<double>(k) / static_cast<double>(alive);
  std::vector<double> count(duals.size(), 0.0);
  for (const auto& s : selected) count[s.creator.value] += 1.0;
  for (std::size_t c = 0; c < duals.size(); ++c) {
    if (!ledger.alive(CreatorId(static_cast<std::uint32_t>(c)))) continue;
    duals[c] = std::clamp(duals[c] - eta * (count[c] - fair), 0.0, dual_max);
  }
}

inline std::vector<ScoredItem> pmmf_rerank(std::span<const ScoredItem> scored,
                                           std::vector<double>& duals, const ExposureLedger& ledger,
                                           double eta, double dual_max, std::size_t k) {
  auto out = pmmf_select(scored, duals, k);
  pmmf_update_duals(duals, out, ledger, k, eta, dual_max);
  return out;
}

inline bool is_known_reranker(const std::string& name) {
  return name == "none" || name == "mmr" || name == "fairrec" || name == "fairco" || name == "pmmf";
}

/// Dispatches to the configured method. Selection is pure given the snapshot
/// state; `commit` applies per-request dual updates in the order it is called.
class Reranker {
 public:
  Reranker(std::string name, const RerankConfig& cfg, std::size_t n_creators)
      : name_(std::move(name)), cfg_(cfg), duals_(n_creators, 0.0) {
    if (!is_known_reranker(name_)) fail(Errc::ConfigError, "unknown reranker '" + name_ + "'");
  }

  const std::string& name() const { return name_; }
  bool active() const { return name_ != "none"; }
  std::size_t candidates(std::size_t k) const {
    return active() ? k * static_cast<std::size_t>(cfg_.pool_multiplier) : k;
  }

  std::vector<ScoredItem> select(std::span<const ScoredItem> scored, const ExposureLedger& ledger,
                                 std::size_t k) const {
    if (name_ == "mmr") return mmr_rerank(scored, cfg_.mmr_lambda, k);
    if (name_ == "fairrec") return fairrec_rerank(scored, ledger, k, cfg_.fairrec_min_share);
    if (name_ == "fairco") return fairco_rerank(scored, ledger, cfg_.fairco_lambda, k);
    if (name_ == "pmmf") return pmmf_select(scored, duals_, k);
    return detail::take(std::vector<ScoredItem>(scored.begin(), scored.end()), k);
  }

  void commit(std::span<const ScoredItem> selected, const ExposureLedger& ledger, std::size_t k) {
    if (name_ == "pmmf") pmmf_update_duals(duals_, selected, ledger, k, cfg_.pmmf_eta, cfg_.pmmf_dual_max);
  }

  const std::vector<double>& duals() const { return duals_; }

 private:
  std::string name_;
  RerankConfig cfg_;
  std::vector<double> duals_;
};

}  // namespace platsim
