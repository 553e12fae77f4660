#pragma once

#include <string>
#include <vector>

#include "platsim/core/errors.hpp"
#include "platsim/core/ids.hpp"

namespace platsim {

/// Text of an item as a creator wrote it.
struct CreatedContent {
  std::string title;
  GenreId genre;
  std::vector<std::string> tags;
  std::string description;

  bool operator==(const CreatedContent&) const = default;
};

struct ItemRecord {
  ItemId id;
  CreatorId creator;
  GenreId genre;
  CreatedContent content;
  Step created = 0;
  bool historical = false;  // seeded from the dataset; never enters the candidate pool
};

/// Every item known to the platform, indexed by ItemId.
class Catalog {
 public:
  const ItemRecord& operator[](ItemId id) const {
    if (id.value >= items_.size()) fail(Errc::UnknownItem, "item " + std::to_string(id.value));
    return items_[id.value];
  }

  ItemId next_id() const { return ItemId(static_cast<std::uint32_t>(items_.size())); }

  ItemId add(ItemRecord rec) {
    rec.id = next_id();
    rec.genre = rec.content.genre;
    items_.push_back(std::move(rec));
    return items_.back().id;
  }

  std::size_t size() const { return items_.size(); }
  const std::vector<ItemRecord>& items() const { return items_; }

 private:
  std::vector<ItemRecord> items_;
};

}  // namespace platsim
