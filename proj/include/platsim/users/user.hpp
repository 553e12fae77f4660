#pragma once

#include <algorithm>
#include <vector>

#include "platsim/core/catalog.hpp"
#include "platsim/core/config.hpp"
#include "platsim/core/rng.hpp"
#include "platsim/ingest/seeds.hpp"

namespace platsim {

enum class UserActionKind { Click, Skip, Exit };

/// Parametric user: fixed long-term genre preference, per-visit session state and a
/// decaying per-genre exposure count that discounts repeated genres.
class UserRuntime {
 public:
  UserRuntime(const UserSeed& seed, const UserModelConfig& model)
      : id_(seed.id),
        preference_(seed.preference),
        activity_(std::clamp(seed.activity, 0.0, 1.0)),
        model_(model),
        recent_(seed.preference.size(), 0.0) {}

  bool is_active(RngStream& rng) const { return rng.bernoulli(activity_); }

  double novelty(GenreId g) const { return 1.0 / (1.0 + model_.novelty_weight * recent_[g.value]); }

  double click_probability(GenreId g) const {
    const double p = model_.alpha_click * preference_[g.value] *
                     static_cast<double>(preference_.size()) * novelty(g);
    return std::clamp(p, 0.0, 1.0);
  }

  double exit_probability() const {
    return std::clamp(model_.exit_base + model_.exit_per_skip * consecutive_skips_, 0.0, 1.0);
  }

  /// Reaction to one recommended item. The exposure is counted towards novelty
  /// after the click decision.
  UserActionKind react(const ItemRecord& item, RngStream& rng) {
    if (exited_) fail(Errc::SessionClosed, "user " + std::to_string(id_.value) + " already exited");
    const double p_click = click_probability(item.genre);
    recent_[item.genre.value] += 1.0;
    ++seen_this_step_;
    if (rng.bernoulli(p_click)) {
      consecutive_skips_ = 0;
      return UserActionKind::Click;
    }
    if (rng.bernoulli(exit_probability())) {
      exited_ = true;
      return UserActionKind::Exit;
    }
    ++consecutive_skips_;
    return UserActionKind::Skip;
  }

  void end_step() {
    consecutive_skips_ = 0;
    seen_this_step_ = 0;
    exited_ = false;
    for (auto& r : recent_) r *= model_.novelty_decay;
  }

  UserId id() const { return id_; }
  double activity() const { return activity_; }
  const std::vector<double>& preference() const { return preference_; }
  int consecutive_skips() const { return consecutive_skips_; }
  int seen_this_step() const { return seen_this_step_; }
  bool exited() const { return exited_; }
  double recent_exposures(GenreId g) const { return recent_[g.value]; }
  void set_recent_exposures(GenreId g, double v) { recent_[g.value] = v; }
  void set_consecutive_skips(int v) { consecutive_skips_ = v; }

 private:
  UserId id_;
  std::vector<double> preference_;
  double activity_ = 0.0;
  UserModelConfig model_;
  std::vector<double> recent_;
  int consecutive_skips_ = 0;
  int seen_this_step_ = 0;
  bool exited_ = false;
};

}  // namespace platsim
