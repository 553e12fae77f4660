#pragma once

#include <functional>
#include <vector>

#include "platsim/core/catalog.hpp"

namespace platsim {

/// Items eligible for recommendation at one step.
struct CandidatePool {
  std::vector<ItemId> items;
  Step snapshot = 0;
};

/// Items created at most `window` steps before `n`. Dataset history never enters
/// the pool; `keep` can drop further items (e.g. those of departed creators).
inline CandidatePool build_candidate_pool(const Catalog& catalog, Step n, int window,
                                          const std::function<bool(const ItemRecord&)>& keep = {}) {
  CandidatePool pool;
  pool.snapshot = n;
  for (const auto& item : catalog.items()) {
    if (item.historical || item.created > n || n - item.created > window) continue;
    if (keep && !keep(item)) continue;
    pool.items.push_back(item.id);
  }
  return pool;
}

}  // namespace platsim
