#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace platsim {

/// Opaque integer identifier; the tag keeps user, item, creator and genre ids apart.
template <class Tag>
struct StrongId {
  using value_type = std::uint32_t;
  value_type value = 0;

  constexpr StrongId() = default;
  constexpr explicit StrongId(value_type v) : value(v) {}

  constexpr auto operator<=>(const StrongId&) const = default;

  friend std::ostream& operator<<(std::ostream& os, StrongId id) { return os << id.value; }
};

struct UserTag {};
struct ItemTag {};
struct CreatorTag {};
struct GenreTag {};

using UserId = StrongId<UserTag>;
using ItemId = StrongId<ItemTag>;
using CreatorId = StrongId<CreatorTag>;
using GenreId = StrongId<GenreTag>;

/// Simulation tick. Step 0 is "before the simulation"; simulated steps are 1..N.
using Step = std::int32_t;

inline constexpr std::size_t kDefaultGenreCount = 14;

}  // namespace platsim

template <class Tag>
struct std::hash<platsim::StrongId<Tag>> {
  std::size_t operator()(platsim::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
