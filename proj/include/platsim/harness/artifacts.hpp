#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "platsim/core/csv.hpp"
#include "platsim/harness/engine.hpp"
#include "platsim/ingest/synth.hpp"

namespace platsim {

namespace fs = std::filesystem;

inline constexpr const char* kEventsFile = "events.csv";
inline constexpr const char* kTraceFile = "creator_trace.csv";
inline constexpr const char* kItemsFile = "items.csv";
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kTimeseriesFile = "timeseries.csv";
inline constexpr const char* kConfigFile = "config.txt";
inline constexpr const char* kDatasetDir = "dataset";

namespace detail {

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) fail(Errc::DataError, "cannot write " + p.string());
  return os;
}

inline std::ifstream open_in(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) fail(Errc::MissingArtifact, "missing artifact " + p.string());
  return is;
}

template <class T>
std::string opt_str(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, double>) return format_double(*v);
  else return std::to_string(v->value);
}

}  // namespace detail

/// Serialized metrics; wall-clock data is deliberately left out so that the file
/// is identical across worker counts.
inline std::string metrics_text(const MetricsReport& r, std::uint64_t seed) {
  auto j = r.to_json();
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

inline void write_trace(const std::vector<TraceRow>& rows, const std::vector<std::string>& genres, std::ostream& os) {
  os << "step,creator_id,action_kind,genre,item_id,utility_of_last,alive,reward_percentile\n";
  for (const auto& r : rows) {
    write_csv_row(os, {std::to_string(r.step), std::to_string(r.creator.value), r.action,
                       r.genre ? genres[r.genre->value] : "", detail::opt_str(r.item),
                       detail::opt_str(r.utility_of_last), r.alive ? "1" : "0",
                       format_double(r.reward_percentile)});
  }
}

inline void write_items(const Catalog& catalog, const std::vector<std::string>& genres, std::ostream& os) {
  os << "item_id,creator_id,genre,created_step,historical,title,tags,description\n";
  for (const auto& it : catalog.items()) {
    write_csv_row(os, {std::to_string(it.id.value), std::to_string(it.creator.value), genres[it.genre.value],
                       std::to_string(it.created), it.historical ? "1" : "0", it.content.title,
                       detail::join(it.content.tags, '|'), it.content.description});
  }
}

/// Writes every artifact of a finished run into `dir`.
inline void write_run(const Engine& e, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& genres = e.dataset().genres;
  {
    auto os = detail::open_out(dir / kEventsFile);
    e.log().write_csv(os);
  }
  {
    auto os = detail::open_out(dir / kTraceFile);
    write_trace(e.trace(), genres, os);
  }
  {
    auto os = detail::open_out(dir / kItemsFile);
    write_items(e.catalog(), genres, os);
  }
  const auto report = e.report();
  {
    auto os = detail::open_out(dir / kMetricsFile);
    os << metrics_text(report, e.config().seed);
  }
  {
    auto os = detail::open_out(dir / kTimeseriesFile);
    os << "step,tuw_cum,alive_creators,cgd_window,reward,wall_ms\n";
    const auto& wall = e.step_wall_ms();
    for (std::size_t i = 0; i < report.timeseries.size(); ++i) {
      const auto& r = report.timeseries[i];
      write_csv_row(os, {std::to_string(r.step), std::to_string(r.tuw_cum), std::to_string(r.alive_creators),
                         format_double(r.cgd_window), format_double(r.reward),
                         i < wall.size() ? format_double(wall[i]) : ""});
    }
  }
  {
    auto os = detail::open_out(dir / kConfigFile);
    os << e.config().to_text();
  }
  write_dataset(e.dataset(), dir / kDatasetDir);
}

/// The dataset a config points at, or a synthetic one when `data` is empty.
inline Dataset dataset_for(const SimConfig& cfg) {
  if (cfg.data.empty()) return synth_dataset(cfg.synth);
  try {
    return load_dataset(cfg.data);
  } catch (const SimError& e) {
    if (e.code() == Errc::ConfigError) throw;
    fail(Errc::DataError, e.what());
  }
}

/// Everything persisted by a run, parsed back.
struct LoadedRun {
  SimConfig config;
  Dataset dataset;
  EventLog log;
  Catalog catalog;
  std::vector<Step> departures;
  std::vector<Decision> decisions;
};

inline LoadedRun load_run(const fs::path& dir) {
  for (const char* f : {kEventsFile, kTraceFile, kItemsFile, kConfigFile})
    if (!fs::exists(dir / f)) fail(Errc::MissingArtifact, "missing artifact " + (dir / f).string());
  if (!fs::is_directory(dir / kDatasetDir)) fail(Errc::MissingArtifact, "missing dataset copy in " + dir.string());

  LoadedRun run;
  run.config = load_config((dir / kConfigFile).string());
  run.dataset = load_dataset(dir / kDatasetDir);
  {
    auto is = detail::open_in(dir / kEventsFile);
    run.log = EventLog::read_csv(is);
  }
  {
    auto is = detail::open_in(dir / kItemsFile);
    CsvReader reader(is);
    std::vector<std::string> row;
    if (!reader.next(row) || row.size() != 8 || row[0] != "item_id")
      fail(Errc::CorruptLog, "bad items header");
    while (reader.next(row)) {
      if (row.size() != 8) fail(Errc::CorruptLog, "items row with wrong arity");
      try {
        ItemRecord rec;
        rec.creator = CreatorId(static_cast<std::uint32_t>(parse_int(row[1])));
        const auto g = run.dataset.genre_of(row[2]);
        if (!g) fail(Errc::CorruptLog, "unknown genre '" + row[2] + "'");
        rec.content = {row[5], *g, detail::split(row[6], '|'), row[7]};
        rec.created = static_cast<Step>(parse_int(row[3]));
        rec.historical = row[4] == "1";
        if (parse_int(row[0]) != static_cast<std::int64_t>(run.catalog.size()))
          fail(Errc::CorruptLog, "items out of order");
        run.catalog.add(std::move(rec));
      } catch (const SimError& e) {
        if (e.code() == Errc::CorruptLog) throw;
        fail(Errc::CorruptLog, std::string("items: ") + e.what());
      }
    }
    if (!reader.ended_cleanly()) fail(Errc::CorruptLog, "items file truncated");
  }
  {
    auto is = detail::open_in(dir / kTraceFile);
    CsvReader reader(is);
    std::vector<std::string> row;
    if (!reader.next(row) || row.size() != 8 || row[0] != "step") fail(Errc::CorruptLog, "bad trace header");
    while (reader.next(row)) {
      if (row.size() != 8) fail(Errc::CorruptLog, "trace row with wrong arity");
      try {
        const auto step = static_cast<Step>(parse_int(row[0]));
        if (row[2] == "DEPART") {
          run.departures.push_back(step);
        } else if (row[2] == "EXPLORE" || row[2] == "EXPLOIT") {
          run.decisions.push_back({parse_double(row[7]), row[2] == "EXPLORE" ? ActionKind::Explore : ActionKind::Exploit});
        } else {
          fail(Errc::CorruptLog, "unknown action '" + row[2] + "'");
        }
      } catch (const SimError& e) {
        if (e.code() == Errc::CorruptLog) throw;
        fail(Errc::CorruptLog, std::string("trace: ") + e.what());
      }
    }
    if (!reader.ended_cleanly()) fail(Errc::CorruptLog, "trace file truncated");
  }
  for (const auto& ev : run.log.events()) {
    if (ev.item.value >= run.catalog.size()) fail(Errc::CorruptLog, "event references unknown item");
  }
  return run;
}

/// Recomputes the metrics of a run directory from its files alone.
inline MetricsReport report(const fs::path& dir) {
  const auto run = load_run(dir);
  MetricsInputs in{run.log, run.catalog, run.dataset.genre_count(),
                   static_cast<std::size_t>(run.config.n_creators), run.departures, run.decisions,
                   run.config.warmup, run.config.n_steps, run.config.beta};
  return compute_report(in);
}

struct CompareRow {
  std::string condition;
  std::size_t runs = 0;
  std::map<std::string, std::pair<double, double>> stats;  // metric -> (mean, sample sd)
};

inline double metric_value(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number()) fail(Errc::MissingArtifact, "metric '" + key + "' not in report");
  return j[key].get<double>();
}

/// Mean and sample standard deviation per condition. Runs whose configs differ
/// only in the seed form one condition.
inline std::vector<CompareRow> compare(const std::vector<fs::path>& dirs, const std::vector<std::string>& metrics) {
  if (dirs.empty()) fail(Errc::EmptyInput, "no run directories given");
  if (metrics.empty()) fail(Errc::EmptyInput, "no metrics requested");

  std::vector<std::map<std::string, std::string>> configs;
  std::vector<nlohmann::json> reports;
  for (const auto& d : dirs) {
    auto is = detail::open_in(d / kConfigFile);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const auto key = detail::trim(line.substr(0, eq));
      if (key != "seed") kv[key] = detail::trim(line.substr(eq + 1));
    }
    configs.push_back(std::move(kv));
    auto ms = detail::open_in(d / kMetricsFile);
    try {
      reports.push_back(nlohmann::json::parse(ms));
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::CorruptLog, d.string() + ": " + e.what());
    }
  }

  // Keys whose value differs between runs name the conditions.
  std::set<std::string> varying;
  for (const auto& [k, v] : configs.front())
    for (const auto& c : configs)
      if (!c.contains(k) || c.at(k) != v) varying.insert(k);

  std::vector<std::map<std::string, std::string>> groups;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::size_t g = 0;
    while (g < groups.size() && groups[g] != configs[i]) ++g;
    if (g == groups.size()) {
      groups.push_back(configs[i]);
      members.emplace_back();
    }
    members[g].push_back(i);
  }

  std::vector<CompareRow> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    CompareRow row;
    for (const auto& k : varying) {
      if (!row.condition.empty()) row.condition += " ";
      row.condition += k + "=" + (groups[g].contains(k) ? groups[g].at(k) : "?");
    }
    if (row.condition.empty()) row.condition = "all";
    row.runs = members[g].size();
    for (const auto& m : metrics) {
      double sum = 0.0;
      for (auto i : members[g]) sum += metric_value(reports[i], m);
      const double mean = sum / static_cast<double>(row.runs);
      double ss = 0.0;
      for (auto i : members[g]) ss += std::pow(metric_value(reports[i], m) - mean, 2);
      const double sd = row.runs > 1 ? std::sqrt(ss / static_cast<double>(row.runs - 1)) : 0.0;
      row.stats[m] = {mean, sd};
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace platsim
