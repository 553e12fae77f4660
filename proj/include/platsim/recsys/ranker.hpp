#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "platsim/core/catalog.hpp"
#include "platsim/core/config.hpp"
#include "platsim/core/event_log.hpp"
#include "platsim/core/rng.hpp"
#include "platsim/recsys/pool.hpp"

namespace platsim {

using Interaction = std::pair<UserId, ItemId>;

/// Everything a ranker may learn from: dataset interactions plus simulated clicks.
struct TrainingData {
  const Catalog& catalog;
  const EventLog& log;
  std::span<const Interaction> positives;
  std::size_t n_users = 0;
  Step n = 0;  // retraining happens before serving step n
};

class Ranker {
 public:
  virtual ~Ranker() = default;
  virtual std::string name() const = 0;
  virtual void retrain(const TrainingData& data) = 0;
  /// Makes newly created items scorable before the next retrain.
  virtual void prepare(const Catalog&) {}
  virtual double score(UserId user, const ItemRecord& item, Step n) const = 0;
  Step trained_at() const { return trained_at_; }

 protected:
  Step trained_at_ = 0;
};

/// Uniform scores keyed by (seed, step, user, item); independent of call order.
class RandomRanker : public Ranker {
 public:
  explicit RandomRanker(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "random"; }
  void retrain(const TrainingData& data) override { trained_at_ = data.n; }
  double score(UserId user, const ItemRecord& item, Step n) const override {
    return keyed_uniform(seed_ ^ static_cast<std::uint64_t>(StreamDomain::RandomScore),
                         static_cast<std::uint64_t>(n), user.value, item.id.value);
  }

 private:
  std::uint64_t seed_;
};

/// Click count of each item over the trailing window, identical for every user.
class PopRanker : public Ranker {
 public:
  explicit PopRanker(int window) : window_(window) {}
  std::string name() const override { return "pop"; }

  void retrain(const TrainingData& data) override {
    clicks_.assign(data.catalog.size(), 0.0);
    const Step from = std::max<Step>(1, data.n - window_);
    for (Step s = from; s < data.n; ++s) {
      for (const auto& ev : data.log.events_at(s))
        if (ev.clicked && ev.item.value < clicks_.size()) clicks_[ev.item.value] += 1.0;
    }
    trained_at_ = data.n;
  }

  double score(UserId, const ItemRecord& item, Step) const override {
    return item.id.value < clicks_.size() ? clicks_[item.id.value] : 0.0;
  }

 private:
  int window_;
  std::vector<double> clicks_;
};

/// Latent-factor model trained by SGD with one sampled negative per positive,
/// either pointwise (logistic, "mf") or pairwise (BPR, "bpr"). Retraining warm-starts
/// from the previous parameters; unseen items start at their genre's mean factors.
class MatrixFactorization : public Ranker {
 public:
  enum class Loss { Pointwise, Pairwise };

  MatrixFactorization(Loss loss, const MfConfig& cfg, std::uint64_t seed)
      : loss_(loss), cfg_(cfg), rng_(seed, StreamDomain::Ranker, loss == Loss::Pointwise ? 1 : 2) {}

  std::string name() const override { return loss_ == Loss::Pointwise ? "mf" : "bpr"; }

  void prepare(const Catalog& catalog) override { grow_items(catalog); }

  void retrain(const TrainingData& data) override {
    if (data.positives.empty()) fail(Errc::EmptyInteractions, name() + " needs interactions to train");
    grow_users(data.n_users);
    grow_items(data.catalog);

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(data.positives.size() * 2);
    for (const auto& [u, i] : data.positives) {
      seen.insert(pair_key(u, i));
      trained_[i.value] = true;
    }
    any_trained_ = true;
    std::vector<std::size_t> order(data.positives.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    const auto n_items = data.catalog.size();

    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng_.below(k)]);
      for (auto k : order) {
        const auto [u, i] = data.positives[k];
        ItemId j(static_cast<std::uint32_t>(rng_.below(n_items)));
        for (int tries = 0; tries < 8 && (j == i || seen.contains(pair_key(u, j))); ++tries)
          j = ItemId(static_cast<std::uint32_t>(rng_.below(n_items)));
        if (j == i) continue;
        if (loss_ == Loss::Pointwise) {
          sgd_pointwise(u, i, 1.0);
          sgd_pointwise(u, j, 0.0);
        } else {
          sgd_pairwise(u, i, j);
        }
      }
    }
    trained_at_ = data.n;
  }

  double score(UserId user, const ItemRecord& item, Step) const override {
    return raw_score(user, item.id, item.genre);
  }

  /// Score of (user, item); items beyond the trained table use genre-mean factors.
  double raw_score(UserId u, ItemId i, GenreId genre) const {
    const double* p = u.value < n_users_ ? &user_f_[u.value * dim()] : nullptr;
    if (i.value < item_bias_.size()) {
      const double* q = &item_f_[i.value * dim()];
      double s = global_bias_ + item_bias_[i.value];
      if (p) s += dot(p, q);
      return s;
    }
    const auto [q, b] = genre_mean(genre);
    double s = global_bias_ + b;
    if (p) s += dot(p, q.data());
    return s;
  }

  /// One pointwise logistic SGD step on (u, i) with label y.
  void sgd_pointwise(UserId u, ItemId i, double y) {
    double* p = &user_f_[u.value * dim()];
    double* q = &item_f_[i.value * dim()];
    const double x = global_bias_ + item_bias_[i.value] + dot(p, q);
    const double g = y - sigmoid(x);
    const double lr = cfg_.lr, reg = cfg_.l2;
    item_bias_[i.value] += lr * (g - reg * item_bias_[i.value]);
    global_bias_ += lr * g;
    for (std::size_t f = 0; f < dim(); ++f) {
      const double pf = p[f], qf = q[f];
      p[f] += lr * (g * qf - reg * pf);
      q[f] += lr * (g * pf - reg * qf);
    }
  }

  /// One BPR SGD step: raise x_ui - x_uj.
  void sgd_pairwise(UserId u, ItemId i, ItemId j) {
    double* p = &user_f_[u.value * dim()];
    double* qi = &item_f_[i.value * dim()];
    double* qj = &item_f_[j.value * dim()];
    const double x = item_bias_[i.value] - item_bias_[j.value] + dot(p, qi) - dot(p, qj);
    const double g = sigmoid(-x);
    const double lr = cfg_.lr, reg = cfg_.l2;
    item_bias_[i.value] += lr * (g - reg * item_bias_[i.value]);
    item_bias_[j.value] += lr * (-g - reg * item_bias_[j.value]);
    for (std::size_t f = 0; f < dim(); ++f) {
      const double pf = p[f], qif = qi[f], qjf = qj[f];
      p[f] += lr * (g * (qif - qjf) - reg * pf);
      qi[f] += lr * (g * pf - reg * qif);
      qj[f] += lr * (-g * pf - reg * qjf);
    }
  }

  /// Mean of -ln sigmoid(x_ui - x_uj) over the given triples.
  double pairwise_loss(std::span<const std::tuple<UserId, ItemId, ItemId>> triples) const {
    double total = 0.0;
    for (const auto& [u, i, j] : triples) {
      const double x = raw_score(u, i, GenreId()) - raw_score(u, j, GenreId());
      total += std::log1p(std::exp(-x));
    }
    return triples.empty() ? 0.0 : total / static_cast<double>(triples.size());
  }

  void grow_users(std::size_t n_users) {
    while (n_users_ < n_users) {
      for (std::size_t f = 0; f < dim(); ++f) user_f_.push_back(rng_.normal(0.0, 0.1));
      ++n_users_;
    }
  }

  void grow_items(const Catalog& catalog) {
    while (item_bias_.size() < catalog.size()) {
      const auto& rec = catalog[ItemId(static_cast<std::uint32_t>(item_bias_.size()))];
      if (any_trained_) {
        const auto [q, b] = genre_mean(rec.genre);
        item_f_.insert(item_f_.end(), q.begin(), q.end());
        item_bias_.push_back(b);
      } else {
        for (std::size_t f = 0; f < dim(); ++f) item_f_.push_back(rng_.normal(0.0, 0.1));
        item_bias_.push_back(0.0);
      }
      item_genre_.push_back(rec.genre);
      trained_.push_back(false);
    }
    any_trained_ = any_trained_ || std::any_of(trained_.begin(), trained_.end(), [](bool b) { return b; });
  }

  std::size_t dim() const { return static_cast<std::size_t>(cfg_.dim); }

 private:
  static std::uint64_t pair_key(UserId u, ItemId i) {
    return (static_cast<std::uint64_t>(u.value) << 32) | i.value;
  }
  static double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
  double dot(const double* a, const double* b) const {
    double s = 0.0;
    for (std::size_t f = 0; f < dim(); ++f) s += a[f] * b[f];
    return s;
  }

  std::pair<std::vector<double>, double> genre_mean(GenreId genre) const {
    std::vector<double> q(dim(), 0.0);
    double b = 0.0, n = 0.0;
    for (std::size_t i = 0; i < item_genre_.size(); ++i) {
      if (!trained_[i] || item_genre_[i] != genre) continue;
      for (std::size_t f = 0; f < dim(); ++f) q[f] += item_f_[i * dim() + f];
      b += item_bias_[i];
      n += 1.0;
    }
    if (n > 0.0) {
      for (auto& x : q) x /= n;
      b /= n;
    }
    return {q, b};
  }

  Loss loss_;
  MfConfig cfg_;
  RngStream rng_;
  std::size_t n_users_ = 0;
  std::vector<double> user_f_;
  std::vector<double> item_f_;
  std::vector<double> item_bias_;
  std::vector<GenreId> item_genre_;
  std::vector<bool> trained_;
  bool any_trained_ = false;
  double global_bias_ = 0.0;
};

inline std::unique_ptr<Ranker> make_ranker(const std::string& name, const SimConfig& cfg) {
  if (name == "random") return std::make_unique<RandomRanker>(cfg.seed);
  if (name == "pop") return std::make_unique<PopRanker>(cfg.pop_window);
  if (name == "mf")
    return std::make_unique<MatrixFactorization>(MatrixFactorization::Loss::Pointwise, cfg.mf, cfg.seed);
  if (name == "bpr")
    return std::make_unique<MatrixFactorization>(MatrixFactorization::Loss::Pairwise, cfg.mf, cfg.seed);
  fail(Errc::ConfigError, "unknown ranker '" + name + "'");
}

struct ScoredItem {
  ItemId item;
  CreatorId creator;
  GenreId genre;
  Step created = 0;
  double score = 0.0;
};

/// Highest scores first; ties go to the newer item, then the lower id.
inline bool ranks_before(const ScoredItem& a, const ScoredItem& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.created != b.created) return a.created > b.created;
  return a.item < b.item;
}

/// Top-`k` items of the pool for `user`.
inline std::vector<ScoredItem> rank(const Ranker& r, UserId user, const CandidatePool& pool,
                                    const Catalog& catalog, std::size_t k) {
  std::vector<ScoredItem> scored;
  scored.reserve(pool.items.size());
  for (auto id : pool.items) {
    const auto& rec = catalog[id];
    scored.push_back({id, rec.creator, rec.genre, rec.created, r.score(user, rec, pool.snapshot)});
  }
  const auto top = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(top), scored.end(),
                    ranks_before);
  scored.resize(top);
  return scored;
}

}  // namespace platsim
