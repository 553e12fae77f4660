#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "platsim/baselines/baselines.hpp"
#include "platsim/core/catalog.hpp"
#include "platsim/core/config.hpp"
#include "platsim/core/event_log.hpp"
#include "platsim/creator/creator.hpp"
#include "platsim/creator/policy.hpp"
#include "platsim/ingest/dataset.hpp"
#include "platsim/ingest/seeds.hpp"
#include "platsim/llm/policy.hpp"
#include "platsim/metrics/metrics.hpp"
#include "platsim/recsys/pool.hpp"
#include "platsim/recsys/ranker.hpp"
#include "platsim/recsys/serve.hpp"
#include "platsim/rerank/rerank.hpp"
#include "platsim/users/user.hpp"

namespace platsim {

/// Runs fn(0..count-1) on up to `workers` threads. The first exception thrown by
/// any task is rethrown on the caller's thread.
inline void parallel_for(std::size_t workers, std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline const std::vector<std::string>& creator_policy_names() {
  static const std::vector<std::string> names{"creagent", "creagent_llm", "cfd", "lbr", "simuline", "random"};
  return names;
}

/// One row of the creator trace: a creation or a departure.
struct TraceRow {
  Step step = 0;
  CreatorId creator;
  std::string action;  // EXPLORE, EXPLOIT or DEPART
  std::optional<GenreId> genre;
  std::optional<ItemId> item;
  std::optional<double> utility_of_last;
  bool alive = true;
  double reward_percentile = 0.5;
};

struct RunOptions {
  std::size_t workers = 1;
  /// Used only by the LLM-backed policy; other policies never touch it.
  std::shared_ptr<Transport> transport;
  /// Called for every feedback read a creator makes (creator, item).
  std::function<void(CreatorId, ItemId)> on_creator_read;
};

/// The step loop. Every phase reads the state left by the previous phase and
/// commits its writes in ascending agent id, so results do not depend on workers.
class Engine {
 public:
  Engine(SimConfig cfg, const Dataset& dataset, RunOptions opts = {})
      : cfg_(std::move(cfg)), opts_(std::move(opts)) {
    cfg_.validate();
    data_ = dataset;
    if (cfg_.n_users > 0 || cfg_.n_creators > 0) {
      data_ = subset_dataset(dataset, cfg_.n_users > 0 ? static_cast<std::size_t>(cfg_.n_users) : dataset.users.size(),
                             cfg_.n_creators > 0 ? static_cast<std::size_t>(cfg_.n_creators) : dataset.creators.size());
    }
    cfg_.n_users = static_cast<int>(data_.users.size());
    cfg_.n_creators = static_cast<int>(data_.creators.size());
    setup();
  }

  const SimConfig& config() const { return cfg_; }
  const Dataset& dataset() const { return data_; }
  const EventLog& log() const { return log_; }
  const Catalog& catalog() const { return catalog_; }
  const std::vector<CreatorRuntime>& creators() const { return creators_; }
  const std::vector<UserRuntime>& users() const { return users_; }
  const std::vector<TraceRow>& trace() const { return trace_; }
  const std::vector<double>& step_wall_ms() const { return wall_ms_; }
  const std::vector<Step>& retrain_steps() const { return retrain_steps_; }
  const std::vector<double>& population_preference() const { return population_pref_; }
  const Ranker& ranker() const { return *ranker_; }
  const Reranker& reranker() const { return *reranker_; }
  Step current_step() const { return n_; }
  std::size_t llm_calls() const { return llm_ ? llm_->calls() : 0; }

  void run() {
    while (n_ < cfg_.n_steps) step();
  }

  void step() {
    const auto t0 = std::chrono::steady_clock::now();
    const Step n = ++n_;
    create_phase(n);
    const auto pool = build_candidate_pool(catalog_, n, cfg_.timeliness_window, [&](const ItemRecord& it) {
      return creators_[it.creator.value].alive();
    });
    if (n % cfg_.retrain_period == 0) retrain(n);
    auto events = serve_phase(n, pool);
    feedback_phase(n, std::move(events));
    for (auto& c : creators_)
      if (c.alive()) c.update_beliefs(n);
    for (auto& u : users_) u.end_step();
    for (const auto& c : creators_) ledger_.set_alive(c.id(), c.alive());
    wall_ms_.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }

  std::vector<Step> departures() const {
    std::vector<Step> out;
    for (const auto& r : trace_)
      if (r.action == "DEPART") out.push_back(r.step);
    return out;
  }

  std::vector<Decision> decisions() const {
    std::vector<Decision> out;
    for (const auto& r : trace_) {
      if (r.action == "DEPART") continue;
      out.push_back({r.reward_percentile, r.action == "EXPLORE" ? ActionKind::Explore : ActionKind::Exploit});
    }
    return out;
  }

  MetricsReport report() const {
    MetricsInputs in{log_, catalog_, data_.genre_count(), creators_.size(), departures(), decisions(),
                     cfg_.warmup, n_, cfg_.beta};
    return compute_report(in);
  }

 private:
  void setup() {
    const auto n_genres = data_.genre_count();
    for (std::size_t i = 0; i < data_.items.size(); ++i) {
      const auto& row = data_.items[i];
      ItemRecord rec;
      rec.creator = CreatorId(static_cast<std::uint32_t>(data_.creator_index.at(row.creator_id)));
      rec.content = {row.title, row.genre, row.tags, row.description};
      rec.created = 0;
      rec.historical = true;
      catalog_.add(rec);
    }
    log_.register_items_up_to(catalog_.size());

    const auto cseeds = init_creator_seeds(data_);
    double norm = cfg_.activity_norm;
    if (norm <= 0.0)
      for (const auto& s : cseeds) norm = std::max(norm, s.activity);
    for (const auto& s : cseeds) {
      creators_.emplace_back(s, norm > 0.0 ? s.activity / norm : 0.0, cfg_.beta, cfg_.departure_threshold);
      for (auto i : s.history) creators_.back().add_history_item(catalog_[ItemId(static_cast<std::uint32_t>(i))]);
    }
    population_pref_.assign(n_genres, 0.0);
    for (const auto& s : init_user_seeds(data_)) {
      users_.emplace_back(s, cfg_.user);
      for (std::size_t g = 0; g < n_genres; ++g) population_pref_[g] += s.preference[g];
    }
    for (auto& p : population_pref_) p /= static_cast<double>(users_.size());

    for (const auto& in : data_.interactions) {
      positives_.emplace_back(UserId(static_cast<std::uint32_t>(data_.user_index.at(in.user_id))),
                              ItemId(static_cast<std::uint32_t>(data_.item_index.at(in.item_id))));
    }

    for (std::size_t c = 0; c < creators_.size(); ++c) {
      create_rng_.emplace_back(cfg_.seed, StreamDomain::Creator, c);
      policy_rng_.emplace_back(cfg_.seed, StreamDomain::CreatorPolicy, c);
    }
    for (std::size_t u = 0; u < users_.size(); ++u) user_rng_.emplace_back(cfg_.seed, StreamDomain::User, u);

    if (cfg_.creator_policy == "creagent_llm") {
      if (!opts_.transport) opts_.transport = std::make_shared<HttpTransport>();
      llm_ = std::make_unique<LlmClient>(cfg_.llm, opts_.transport);
      summarize_profiles();
    }
    for (std::size_t c = 0; c < creators_.size(); ++c) policies_.push_back(make_policy());

    ranker_ = make_ranker(cfg_.ranker, cfg_);
    reranker_ = std::make_unique<Reranker>(cfg_.reranker, cfg_.rerank, creators_.size());
    ledger_ = ExposureLedger(creators_.size());
    retrain(0);
  }

  std::unique_ptr<CreatorPolicy> make_policy() {
    const auto& cc = cfg_.creator;
    const auto& name = cfg_.creator_policy;
    if (name == "creagent") return std::make_unique<RuleBasedPolicy>(cc.explore_max, cc.explore_min);
    if (name == "creagent_llm")
      return std::make_unique<LlmPolicy>(*llm_, RuleBasedPolicy(cc.explore_max, cc.explore_min));
    if (name == "cfd") return std::make_unique<CfdPolicy>(cc.cfd_lr);
    if (name == "lbr") return std::make_unique<LbrPolicy>(cc.lbr_step);
    if (name == "simuline") return std::make_unique<SimulinePolicy>();
    if (name == "random") return std::make_unique<RandomPolicy>();
    fail(Errc::ConfigError, "unknown creator_policy '" + name + "'");
  }

  void summarize_profiles() {
    parallel_for(opts_.workers, creators_.size(), [&](std::size_t c) {
      auto& cr = creators_[c];
      ProfileFacts f;
      f.platform = cfg_.llm.platform;
      f.name = cr.name();
      const auto items = cr.creation_memory().items();
      if (!items.empty()) {
        const auto& last = items.back();
        f.recent_content = "{title: " + last.content.title + ", genre: " + data_.genres[last.genre.value] +
                           ", description: " + last.content.description + "}";
      }
      for (std::size_t g = 0; g < data_.genre_count(); ++g) {
        if (cr.beliefs().skill[g] <= 0.0) continue;
        if (!f.genre_proportion.empty()) f.genre_proportion += ", ";
        f.genre_proportion += data_.genres[g] + ": " + detail::fmt(cr.beliefs().skill[g], 2);
      }
      f.creations_per_day = cr.create_probability();
      f.followers = cr.followers();
      auto [identity, motivation] =
          summarize_profile(*llm_, f, cr.social_identity(), cr.intrinsic_motivation());
      cr.set_profile_text(identity, motivation);
    });
  }

  void retrain(Step n) {
    TrainingData td{catalog_, log_, positives_, users_.size(), n};
    ranker_->retrain(td);
    retrain_steps_.push_back(n);
  }

  struct Pending {
    bool departs = false;
    bool creates = false;
    ExploreAction action;
    CreatedContent content;
    double q = 0.5;
    std::optional<double> utility_of_last;
  };

  void create_phase(Step n) {
    std::vector<Pending> pending(creators_.size());
    parallel_for(opts_.workers, creators_.size(), [&](std::size_t c) {
      auto& cr = creators_[c];
      if (!cr.alive() || !cr.wants_to_create(create_rng_[c])) return;
      auto& p = pending[c];
      p.utility_of_last = cr.utility_of_last(n - 1);
      if (auto prev = cr.last_created()) {
        const auto t = read(cr, *prev, catalog_[*prev].created, n - 1);
        cr.register_creation_outcome(*prev, t.clicks);
        if (!cr.alive()) {
          p.departs = true;
          return;
        }
      }
      p.q = cr.reward_percentile(n - 1);
      DecisionContext ctx{cr, n, data_.genres, p.q,
                          cfg_.creator.full_information ? &population_pref_ : nullptr};
      p.action = policies_[c]->decide(ctx, policy_rng_[c]);
      const auto retrieved = cr.creation_memory().retrieve(
          p.action.genre, static_cast<std::size_t>(cfg_.creator.memory_k), n);
      p.content = policies_[c]->create(ctx, p.action, retrieved, policy_rng_[c]);
      p.content.genre = p.action.genre;
      p.creates = true;
    });

    for (std::size_t c = 0; c < creators_.size(); ++c) {
      auto& p = pending[c];
      auto& cr = creators_[c];
      if (p.departs) {
        trace_.push_back({n, cr.id(), "DEPART", std::nullopt, std::nullopt, p.utility_of_last, false, p.q});
        continue;
      }
      if (!p.creates) continue;
      ItemRecord rec;
      rec.creator = cr.id();
      rec.content = std::move(p.content);
      rec.created = n;
      const auto id = catalog_.add(std::move(rec));
      log_.register_item(id);
      cr.add_created_item(catalog_[id]);
      trace_.push_back({n, cr.id(), std::string(to_string(p.action.kind)), p.action.genre, id,
                        p.utility_of_last, true, p.q});
    }
    ranker_->prepare(catalog_);
  }

  std::vector<InteractionEvent> serve_phase(Step n, const CandidatePool& pool) {
    const auto k = static_cast<std::size_t>(cfg_.list_length);
    const bool rerank = reranker_->active() && n >= cfg_.warmup;
    const auto m = rerank ? reranker_->candidates(k) : k;
    std::vector<std::vector<InteractionEvent>> per_user(users_.size());
    std::vector<std::vector<ScoredItem>> selected(users_.size());
    std::vector<char> visited(users_.size(), 0);

    parallel_for(opts_.workers, users_.size(), [&](std::size_t u) {
      auto& rng = user_rng_[u];
      if (!users_[u].is_active(rng)) return;
      visited[u] = 1;
      auto scored = rank(*ranker_, users_[u].id(), pool, catalog_, m);
      if (rerank) {
        normalize_relevance(scored);
        scored = reranker_->select(scored, ledger_, k);
      }
      std::vector<ItemId> list;
      for (const auto& s : scored) list.push_back(s.item);
      per_user[u] = serve_session(list, users_[u], rng, catalog_, n);
      selected[u] = std::move(scored);
    });

    if (rerank) {
      for (std::size_t u = 0; u < users_.size(); ++u)
        if (visited[u]) reranker_->commit(selected[u], ledger_, k);
    }
    std::vector<InteractionEvent> all;
    for (auto& v : per_user) all.insert(all.end(), v.begin(), v.end());
    return all;
  }

  void feedback_phase(Step n, std::vector<InteractionEvent> events) {
    log_.append_batch(std::move(events));
    for (const auto& ev : log_.events_at(n)) {
      if (ev.clicked) positives_.emplace_back(ev.user, ev.item);
      if (ev.exposed && n >= cfg_.warmup) ledger_.add(catalog_[ev.item].creator, 1.0);
    }
    parallel_for(opts_.workers, creators_.size(), [&](std::size_t c) {
      auto& cr = creators_[c];
      if (!cr.alive()) return;
      std::vector<std::pair<ItemId, Tally>> tallies;
      for (const auto& e : cr.feedback().entries()) {
        if (n - e.created > cfg_.timeliness_window) continue;
        const auto t = read(cr, e.item, n, n);
        if (t.exposures > 0 || t.clicks > 0) tallies.emplace_back(e.item, t);
      }
      cr.update_feedback_memory(tallies, n);
    });
  }

  /// Every creator read of user feedback goes through here.
  Tally read(const CreatorRuntime& cr, ItemId item, Step from, Step to) const {
    if (opts_.on_creator_read) opts_.on_creator_read(cr.id(), item);
    return CreatorView(log_, cr.id(), cr.owned()).tally(item, from, to);
  }

  SimConfig cfg_;
  RunOptions opts_;
  Dataset data_;
  Catalog catalog_;
  EventLog log_;
  std::vector<CreatorRuntime> creators_;
  std::vector<UserRuntime> users_;
  std::vector<std::unique_ptr<CreatorPolicy>> policies_;
  std::vector<RngStream> create_rng_;
  std::vector<RngStream> policy_rng_;
  std::vector<RngStream> user_rng_;
  std::vector<double> population_pref_;
  std::vector<Interaction> positives_;
  std::unique_ptr<LlmClient> llm_;
  std::unique_ptr<Ranker> ranker_;
  std::unique_ptr<Reranker> reranker_;
  ExposureLedger ledger_;
  std::vector<TraceRow> trace_;
  std::vector<double> wall_ms_;
  std::vector<Step> retrain_steps_;
  Step n_ = 0;
};

}  // namespace platsim
