#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "platsim/core/catalog.hpp"
#include "platsim/core/event_log.hpp"
#include "platsim/core/rng.hpp"
#include "platsim/creator/memory.hpp"
#include "platsim/ingest/seeds.hpp"

namespace platsim {

enum class ActionKind { Explore, Exploit };

constexpr std::string_view to_string(ActionKind k) {
  return k == ActionKind::Explore ? "EXPLORE" : "EXPLOIT";
}

struct ExploreAction {
  ActionKind kind = ActionKind::Exploit;
  GenreId genre;
  bool operator==(const ExploreAction&) const = default;
};

struct Beliefs {
  std::vector<double> skill;                    // creation share per genre
  std::vector<std::optional<double>> audience;  // mean utility per genre; nullopt = unknown
};

/// State of one creator agent. Everything it knows about user feedback arrives
/// through update_feedback_memory, which only accepts owned items.
class CreatorRuntime {
 public:
  CreatorRuntime() = default;

  CreatorRuntime(const CreatorSeed& seed, double create_probability, double beta,
                 int departure_threshold)
      : id_(seed.id),
        name_(seed.name),
        social_identity_(seed.social_identity),
        intrinsic_motivation_(seed.intrinsic_motivation),
        followers_(seed.followers),
        create_probability_(std::clamp(create_probability, 0.0, 1.0)),
        beta_(beta),
        departure_threshold_(departure_threshold),
        history_genre_counts_(seed.history_genre_counts),
        sim_genre_counts_(seed.history_genre_counts.size(), 0.0),
        seed_audience_(seed.audience) {
    beliefs_.skill = seed.skill;
    beliefs_.audience = seed.audience;
  }

  /// Registers a dataset item the creator made before the simulation started.
  void add_history_item(const ItemRecord& item) {
    if (item.creator != id_) fail(Errc::NotOwned, "history item belongs to another creator");
    insert_owned(item.id);
    creation_memory_.remember({item.id, item.genre, item.content, item.created});
  }

  /// Registers an item this creator published at step `item.created`.
  void add_created_item(const ItemRecord& item) {
    if (item.creator != id_) fail(Errc::NotOwned, "created item belongs to another creator");
    insert_owned(item.id);
    feedback_.track(item.id, item.genre, item.created);
    creation_memory_.remember({item.id, item.genre, item.content, item.created});
    sim_genre_counts_[item.genre.value] += 1.0;
    last_created_ = item.id;
    ++creations_;
  }

  bool owns(ItemId item) const { return std::binary_search(owned_.begin(), owned_.end(), item); }

  /// Folds one step of feedback on owned items into memory.
  void update_feedback_memory(std::span<const InteractionEvent> step_events, Step n) {
    for (const auto& ev : step_events) {
      if (!owns(ev.item)) {
        fail(Errc::ForeignItem, "creator " + std::to_string(id_.value) + " received feedback on item " +
                                    std::to_string(ev.item.value));
      }
    }
    for (const auto& ev : step_events) {
      if (feedback_.find(ev.item) == nullptr) continue;  // history item
      feedback_.add(ev.item, {ev.exposed ? 1 : 0, ev.clicked ? 1 : 0});
    }
    feedback_.set_refreshed(n);
  }

  /// Same as above, with feedback already aggregated per item.
  void update_feedback_memory(std::span<const std::pair<ItemId, Tally>> tallies, Step n) {
    for (const auto& [item, t] : tallies) {
      if (!owns(item)) {
        fail(Errc::ForeignItem, "creator " + std::to_string(id_.value) + " received feedback on item " +
                                    std::to_string(item.value));
      }
    }
    for (const auto& [item, t] : tallies) {
      if (feedback_.find(item) != nullptr) feedback_.add(item, t);
    }
    feedback_.set_refreshed(n);
  }

  /// Time-averaged blend of exposures and clicks of an owned item since its creation.
  double item_utility(ItemId item, Step n) const {
    if (!owns(item)) fail(Errc::NotOwned, "item " + std::to_string(item.value));
    const auto* e = feedback_.find(item);
    if (e == nullptr) fail(Errc::NotOwned, "item " + std::to_string(item.value) + " has no feedback record");
    if (n < e->created) fail(Errc::FutureItem, "utility requested before creation");
    const double numerator = beta_ * static_cast<double>(e->exposures) +
                             (1.0 - beta_) * static_cast<double>(e->clicks);
    return numerator / static_cast<double>(n - e->created + 1);
  }

  void update_beliefs(Step n) {
    const std::size_t n_genres = history_genre_counts_.size();
    double total = 0.0;
    for (std::size_t g = 0; g < n_genres; ++g) total += history_genre_counts_[g] + sim_genre_counts_[g];
    if (total > 0.0) {
      for (std::size_t g = 0; g < n_genres; ++g)
        beliefs_.skill[g] = (history_genre_counts_[g] + sim_genre_counts_[g]) / total;
    }
    std::vector<double> sum(n_genres, 0.0), count(n_genres, 0.0);
    for (const auto& e : feedback_.entries()) {
      if (e.created > n) continue;
      sum[e.genre.value] += item_utility(e.item, n);
      count[e.genre.value] += 1.0;
    }
    for (std::size_t g = 0; g < n_genres; ++g) {
      beliefs_.audience[g] = count[g] > 0.0 ? std::optional(sum[g] / count[g]) : seed_audience_[g];
    }
  }

  /// Mid-rank percentile of the latest item's utility among the creator's other
  /// simulated items; 0.5 when there is nothing to compare against.
  double reward_percentile(Step n) const {
    if (!last_created_) return 0.5;
    const double latest = item_utility(*last_created_, n);
    double below = 0.0, equal = 0.0, others = 0.0;
    for (const auto& e : feedback_.entries()) {
      if (e.item == *last_created_ || e.created > n) continue;
      const double z = item_utility(e.item, n);
      others += 1.0;
      if (z < latest) below += 1.0;
      else if (z == latest) equal += 1.0;
    }
    if (others == 0.0) return 0.5;
    return (below + 0.5 * equal) / others;
  }

  std::optional<double> utility_of_last(Step n) const {
    if (!last_created_) return std::nullopt;
    return item_utility(*last_created_, n);
  }

  bool wants_to_create(RngStream& rng) const {
    if (!alive_) fail(Errc::DeadCreator, "creator " + std::to_string(id_.value) + " has departed");
    return rng.bernoulli(create_probability_);
  }

  /// Closes the click window of an item; departs after `departure_threshold`
  /// consecutive zero-click items.
  void register_creation_outcome(ItemId item, std::int64_t clicks_in_window) {
    if (!alive_) return;
    if (!owns(item)) fail(Errc::NotOwned, "item " + std::to_string(item.value));
    if (clicks_in_window == 0) {
      ++consecutive_zero_click_;
      if (consecutive_zero_click_ >= departure_threshold_) alive_ = false;
    } else {
      consecutive_zero_click_ = 0;
    }
  }

  /// Genres with at least one owned item (dataset history or simulated).
  std::vector<bool> known_genres() const {
    std::vector<bool> known(history_genre_counts_.size());
    for (std::size_t g = 0; g < known.size(); ++g)
      known[g] = history_genre_counts_[g] + sim_genre_counts_[g] > 0.0;
    return known;
  }

  double created_count(GenreId g) const {
    return history_genre_counts_[g.value] + sim_genre_counts_[g.value];
  }

  CreatorId id() const { return id_; }
  const std::string& name() const { return name_; }
  const std::string& social_identity() const { return social_identity_; }
  const std::string& intrinsic_motivation() const { return intrinsic_motivation_; }
  void set_profile_text(std::string identity, std::string motivation) {
    social_identity_ = std::move(identity);
    intrinsic_motivation_ = std::move(motivation);
  }
  std::int64_t followers() const { return followers_; }
  double create_probability() const { return create_probability_; }
  double beta() const { return beta_; }
  bool alive() const { return alive_; }
  int consecutive_zero_click() const { return consecutive_zero_click_; }
  void set_consecutive_zero_click(int v) { consecutive_zero_click_ = v; }
  int creations() const { return creations_; }
  std::optional<ItemId> last_created() const { return last_created_; }
  std::span<const ItemId> owned() const { return owned_; }
  const Beliefs& beliefs() const { return beliefs_; }
  const FeedbackMemory& feedback() const { return feedback_; }
  const CreationMemory& creation_memory() const { return creation_memory_; }
  std::size_t genre_count() const { return history_genre_counts_.size(); }

 private:
  void insert_owned(ItemId id) {
    owned_.insert(std::upper_bound(owned_.begin(), owned_.end(), id), id);
  }

  CreatorId id_;
  std::string name_;
  std::string social_identity_;
  std::string intrinsic_motivation_;
  std::int64_t followers_ = 0;
  double create_probability_ = 0.0;
  double beta_ = 0.5;
  int departure_threshold_ = 5;

  std::vector<double> history_genre_counts_;
  std::vector<double> sim_genre_counts_;
  std::vector<std::optional<double>> seed_audience_;
  std::vector<ItemId> owned_;
  FeedbackMemory feedback_;
  CreationMemory creation_memory_;
  Beliefs beliefs_;
  std::optional<ItemId> last_created_;
  int creations_ = 0;
  int consecutive_zero_click_ = 0;
  bool alive_ = true;
};

}  // namespace platsim
