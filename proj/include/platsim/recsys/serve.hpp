#pragma once

#include <span>
#include <vector>

#include "platsim/core/catalog.hpp"
#include "platsim/core/event_log.hpp"
#include "platsim/core/rng.hpp"
#include "platsim/users/user.hpp"

namespace platsim {

/// Shows `list` to the user one item at a time. Each shown item yields one event;
/// an exit ends the session and the rest of the list goes unseen.
inline std::vector<InteractionEvent> serve_session(std::span<const ItemId> list, UserRuntime& user,
                                                   RngStream& rng, const Catalog& catalog, Step n) {
  std::vector<InteractionEvent> events;
  for (auto id : list) {
    const auto action = user.react(catalog[id], rng);
    events.push_back({n, user.id(), id, true, action == UserActionKind::Click});
    if (action == UserActionKind::Exit) break;
  }
  return events;
}

}  // namespace platsim
