#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "platsim/harness/artifacts.hpp"

namespace {

using namespace platsim;

enum Exit { kOk = 0, kConfig = 2, kData = 3, kRuntime = 4 };

int exit_code_for(Errc e) {
  switch (e) {
    case Errc::ConfigError:
    case Errc::InvalidParams:
      return kConfig;
    case Errc::DataError:
    case Errc::SchemaError:
    case Errc::DanglingRef:
    case Errc::EmptyDataset:
    case Errc::MissingArtifact:
    case Errc::CorruptLog:
    case Errc::EmptyInput:
      return kData;
    default:
      return kRuntime;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Content-platform simulator with strategic creators"};
  app.require_subcommand(1);

  std::string config_path, out_dir, params_path, data_dir, run_dir, metrics = "tuw,crr,cgd";
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::vector<std::string> compare_dirs;

  auto* run = app.add_subcommand("run", "run a simulation and write its artifacts");
  run->add_option("--config", config_path, "config file (key = value)")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--params", params_path, "generator parameters (key = value)");
  synth->add_option("--out", out_dir, "output directory")->required();

  auto* rep = app.add_subcommand("report", "recompute metrics from a run directory");
  rep->add_option("dir", run_dir, "run directory")->required();

  auto* cmp = app.add_subcommand("compare", "mean and sd per condition over run directories");
  cmp->add_option("dirs", compare_dirs, "run directories")->required();
  cmp->add_option("--metrics", metrics, "comma-separated metric keys");

  auto* val = app.add_subcommand("validate", "check a dataset directory");
  val->add_option("dir", data_dir, "dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      auto cfg = load_config(config_path);
      if (seed) cfg.seed = *seed;
      Engine engine(cfg, dataset_for(cfg), RunOptions{workers, nullptr, nullptr});
      engine.run();
      write_run(engine, out_dir);
      const auto r = engine.report();
      std::cout << "tuw=" << r.tuw << " crr=" << format_double(r.crr) << " cgd=" << format_double(r.cgd)
                << "\n";
    } else if (*synth) {
      SynthParams p;
      if (!params_path.empty()) {
        std::ifstream in(params_path);
        if (!in) fail(Errc::ConfigError, "cannot open " + params_path);
        p = parse_synth_params(in);
      }
      write_dataset(synth_dataset(p), out_dir);
    } else if (*rep) {
      const auto r = report(run_dir);
      const auto cfg = load_config((fs::path(run_dir) / kConfigFile).string());
      std::cout << metrics_text(r, cfg.seed);
    } else if (*cmp) {
      std::vector<fs::path> dirs(compare_dirs.begin(), compare_dirs.end());
      const auto keys = split_list(metrics);
      const auto rows = compare(dirs, keys);
      std::cout << "condition\truns";
      for (const auto& k : keys) std::cout << '\t' << k;
      std::cout << '\n';
      for (const auto& row : rows) {
        std::cout << row.condition << '\t' << row.runs;
        for (const auto& k : keys) {
          const auto [mean, sd] = row.stats.at(k);
          std::cout << '\t' << std::fixed << std::setprecision(4) << mean << " ± " << sd;
        }
        std::cout << '\n';
      }
    } else if (*val) {
      const auto d = load_dataset(data_dir);
      std::cout << "ok: " << d.users.size() << " users, " << d.creators.size() << " creators, "
                << d.items.size() << " items, " << d.interactions.size() << " interactions\n";
    }
  } catch (const SimError& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
