#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "platsim/core/csv.hpp"
#include "platsim/core/errors.hpp"
#include "platsim/core/ids.hpp"

namespace platsim {

struct InteractionEvent {
  Step step = 0;
  UserId user;
  ItemId item;
  bool exposed = false;
  bool clicked = false;

  auto key() const { return std::tuple(step, user, item); }
  bool operator==(const InteractionEvent&) const = default;
};

struct Tally {
  std::int64_t exposures = 0;
  std::int64_t clicks = 0;

  Tally& operator+=(const Tally& o) {
    exposures += o.exposures;
    clicks += o.clicks;
    return *this;
  }
  bool operator==(const Tally&) const = default;
};

/// Append-only record of exposures and clicks, sorted by (step, user, item),
/// with a per-item index of event offsets.
///
/// Items must be registered (in id order) before events may reference them;
/// an item that is registered but never exposed tallies to zero.
class EventLog {
 public:
  void register_item(ItemId id) {
    if (id.value != by_item_.size()) {
      fail(Errc::OutOfOrder, "item ids must be registered densely in creation order, got " +
                                 std::to_string(id.value) + ", expected " +
                                 std::to_string(by_item_.size()));
    }
    by_item_.emplace_back();
  }

  /// Ensures ids [0, count) are registered.
  void register_items_up_to(std::size_t count) {
    while (by_item_.size() < count) by_item_.emplace_back();
  }

  bool knows(ItemId id) const { return id.value < by_item_.size(); }
  std::size_t item_count() const { return by_item_.size(); }

  void append(const InteractionEvent& ev) {
    if (ev.clicked && !ev.exposed) {
      fail(Errc::IllegalClick, "click without exposure at step " + std::to_string(ev.step));
    }
    if (!events_.empty()) {
      const auto& last = events_.back();
      if (ev.step < last.step) {
        fail(Errc::OutOfOrder, "step " + std::to_string(ev.step) + " after step " +
                                   std::to_string(last.step));
      }
      if (ev.key() == last.key()) {
        fail(Errc::DuplicateEvent, "duplicate (step, user, item) triple");
      }
      if (ev.key() < last.key()) {
        fail(Errc::OutOfOrder, "events within a step must be ordered by (user, item)");
      }
    }
    if (!knows(ev.item)) fail(Errc::UnknownItem, "item " + std::to_string(ev.item.value));

    const auto offset = static_cast<std::uint32_t>(events_.size());
    events_.push_back(ev);
    by_item_[ev.item.value].push_back(offset);
    while (static_cast<Step>(step_begin_.size()) <= ev.step) step_begin_.push_back(offset);
  }

  /// Sorts one step's batch into canonical order and appends it.
  void append_batch(std::vector<InteractionEvent> batch) {
    std::sort(batch.begin(), batch.end(),
              [](const auto& a, const auto& b) { return a.key() < b.key(); });
    for (const auto& ev : batch) append(ev);
  }

  /// Exact exposure / click counts for `item` over steps [from, to]; empty if from > to.
  Tally tally(ItemId item, Step from, Step to) const {
    if (!knows(item)) fail(Errc::UnknownItem, "item " + std::to_string(item.value));
    Tally t;
    if (from > to) return t;
    const auto& offsets = by_item_[item.value];
    auto first = std::lower_bound(offsets.begin(), offsets.end(), from,
                                  [&](std::uint32_t off, Step s) { return events_[off].step < s; });
    for (auto it = first; it != offsets.end(); ++it) {
      const auto& ev = events_[*it];
      if (ev.step > to) break;
      t.exposures += ev.exposed ? 1 : 0;
      t.clicks += ev.clicked ? 1 : 0;
    }
    return t;
  }

  std::span<const InteractionEvent> events() const { return events_; }

  /// Events recorded at step `n` (empty if none).
  std::span<const InteractionEvent> events_at(Step n) const {
    if (n < 0 || static_cast<std::size_t>(n) >= step_begin_.size()) return {};
    const std::size_t begin = step_begin_[n];
    const std::size_t end = static_cast<std::size_t>(n) + 1 < step_begin_.size()
                                ? step_begin_[n + 1]
                                : events_.size();
    return std::span(events_).subspan(begin, end - begin);
  }

  std::span<const std::uint32_t> offsets_of(ItemId item) const {
    if (!knows(item)) fail(Errc::UnknownItem, "item " + std::to_string(item.value));
    return by_item_[item.value];
  }

  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  Step last_step() const { return events_.empty() ? 0 : events_.back().step; }

  void write_csv(std::ostream& os) const {
    os << "step,user_id,item_id,exposed,clicked\n";
    for (const auto& ev : events_) {
      os << ev.step << ',' << ev.user.value << ',' << ev.item.value << ',' << (ev.exposed ? 1 : 0)
         << ',' << (ev.clicked ? 1 : 0) << '\n';
    }
  }

  /// Rebuilds a log from its CSV form. Any malformed row raises CorruptLog.
  static EventLog read_csv(std::istream& is) {
    EventLog log;
    std::vector<std::string> row;
    CsvReader reader(is);
    if (!reader.next(row) || row != std::vector<std::string>{"step", "user_id", "item_id",
                                                             "exposed", "clicked"}) {
      fail(Errc::CorruptLog, "missing or wrong event log header");
    }
    std::size_t line = 1;
    while (reader.next(row)) {
      ++line;
      if (row.size() != 5) fail(Errc::CorruptLog, "line " + std::to_string(line) + ": bad arity");
      InteractionEvent ev;
      try {
        ev.step = static_cast<Step>(parse_int(row[0]));
        ev.user = UserId(static_cast<std::uint32_t>(parse_int(row[1])));
        ev.item = ItemId(static_cast<std::uint32_t>(parse_int(row[2])));
        ev.exposed = parse_flag(row[3]);
        ev.clicked = parse_flag(row[4]);
        log.register_items_up_to(ev.item.value + 1);
        log.append(ev);
      } catch (const SimError& e) {
        fail(Errc::CorruptLog, "line " + std::to_string(line) + ": " + e.what());
      }
    }
    if (!reader.ended_cleanly()) fail(Errc::CorruptLog, "truncated final line");
    return log;
  }

 private:
  static bool parse_flag(const std::string& s) {
    if (s == "0") return false;
    if (s == "1") return true;
    fail(Errc::SchemaError, "flag must be 0 or 1, got '" + s + "'");
  }

  std::vector<InteractionEvent> events_;
  std::vector<std::vector<std::uint32_t>> by_item_;
  std::vector<std::uint32_t> step_begin_;
};

/// A creator's window onto the log: only items the creator owns can be read.
class CreatorView {
 public:
  /// `owned` must be sorted ascending.
  CreatorView(const EventLog& log, CreatorId creator, std::span<const ItemId> owned)
      : log_(&log), creator_(creator), owned_(owned) {}

  bool owns(ItemId item) const { return std::binary_search(owned_.begin(), owned_.end(), item); }

  Tally tally(ItemId item, Step from, Step to) const {
    if (!owns(item)) {
      fail(Errc::AsymmetryViolation, "creator " + std::to_string(creator_.value) +
                                         " cannot read item " + std::to_string(item.value));
    }
    return log_->tally(item, from, to);
  }

  CreatorId creator() const { return creator_; }

 private:
  const EventLog* log_;
  CreatorId creator_;
  std::span<const ItemId> owned_;
};

inline Tally creator_view(const EventLog& log, CreatorId creator, std::span<const ItemId> owned,
                          ItemId item, Step from, Step to) {
  return CreatorView(log, creator, owned).tally(item, from, to);
}

}  // namespace platsim
