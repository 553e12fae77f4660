#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "platsim/core/catalog.hpp"
#include "platsim/core/event_log.hpp"

namespace platsim {

struct FeedbackEntry {
  ItemId item;
  GenreId genre;
  Step created = 0;
  std::int64_t exposures = 0;  // cumulative since creation
  std::int64_t clicks = 0;
};

/// Per-item cumulative exposure and click counts for the items a creator owns.
class FeedbackMemory {
 public:
  void track(ItemId item, GenreId genre, Step created) {
    if (!entries_.empty() && item <= entries_.back().item) {
      fail(Errc::OutOfOrder, "feedback memory tracks items in creation order");
    }
    entries_.push_back({item, genre, created, 0, 0});
  }

  const FeedbackEntry* find(ItemId item) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), item,
                               [](const FeedbackEntry& e, ItemId id) { return e.item < id; });
    return it != entries_.end() && it->item == item ? &*it : nullptr;
  }

  void add(ItemId item, const Tally& t) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), item,
                               [](const FeedbackEntry& e, ItemId id) { return e.item < id; });
    FeedbackEntry* e = it != entries_.end() && it->item == item ? &*it : nullptr;
    if (e == nullptr) fail(Errc::ForeignItem, "item " + std::to_string(item.value) + " is not tracked");
    e->exposures += t.exposures;
    e->clicks += t.clicks;
  }

  void set_refreshed(Step n) { last_refresh_ = n; }

  std::span<const FeedbackEntry> entries() const { return entries_; }
  Step last_refresh() const { return last_refresh_; }

 private:
  std::vector<FeedbackEntry> entries_;
  Step last_refresh_ = 0;
};

struct MemoryItem {
  ItemId item;
  GenreId genre;
  CreatedContent content;
  Step created = 0;
};

inline constexpr double kOffGenreRelevance = 0.25;
inline constexpr double kForgettingExponent = 0.5;

/// Items a creator has made, oldest first. Retrieval weighs genre relevance by a
/// power-law forgetting curve.
class CreationMemory {
 public:
  void remember(MemoryItem item) {
    if (!items_.empty() && item.created < items_.back().created) {
      fail(Errc::OutOfOrder, "creation memory is ordered by creation step");
    }
    items_.push_back(std::move(item));
  }

  std::span<const MemoryItem> items() const { return items_; }
  std::size_t size() const { return items_.size(); }

  static double score(const MemoryItem& m, GenreId genre, Step n) {
    const double relevance = m.genre == genre ? 1.0 : kOffGenreRelevance;
    const double age = static_cast<double>(n - m.created + 1);
    return relevance * std::pow(std::max(age, 1.0), -kForgettingExponent);
  }

  /// Top-k memories for a creation in `genre` at step n; ties go to the newer item.
  std::vector<MemoryItem> retrieve(GenreId genre, std::size_t k, Step n) const {
    std::vector<std::size_t> order(items_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> scores(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) scores[i] = score(items_[i], genre, n);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      if (items_[a].created != items_[b].created) return items_[a].created > items_[b].created;
      return items_[a].item > items_[b].item;
    });
    std::vector<MemoryItem> out;
    for (std::size_t i = 0; i < order.size() && out.size() < k; ++i) out.push_back(items_[order[i]]);
    return out;
  }

 private:
  std::vector<MemoryItem> items_;
};

}  // namespace platsim
