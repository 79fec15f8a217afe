#include "sdnmob/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <future>

#include "CLI11.hpp"
#include "sdnmob/errors.hpp"
#include "sdnmob/network.hpp"

namespace sdnmob {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << content;
  f.close();
  if (!f) throw Error("failed writing " + path.string());
}

MetricsTrace run_mode(const RunConfig& cfg, MobilityMode mode) {
  if (mode == MobilityMode::Pmip) return run_pmip_baseline(cfg.topology, cfg.events, *cfg.tunnel);
  return run_scenario(cfg.topology, cfg.events, mode);
}

}  // namespace

std::string resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& flag,
                               const char* env_value) {
  if (flag && !flag->empty()) return *flag;
  if (env_value != nullptr && *env_value != '\0') return env_value;
  return cfg.output_dir;
}

RunResult execute(const RunConfig& cfg) {
  check_run_config(cfg);
  RunResult result;
  if (cfg.mode == RunMode::Both) {
    // Two isolated simulations; nothing is shared between them.
    auto pmip = std::async(std::launch::async, [&cfg] { return run_mode(cfg, MobilityMode::Pmip); });
    MetricsTrace sdn = run_mode(cfg, MobilityMode::Sdn);
    result.traces.push_back(std::move(sdn));
    result.traces.push_back(pmip.get());
    result.comparison = compare_runs(result.traces[0], result.traces[1]);
  } else {
    result.traces.push_back(
        run_mode(cfg, cfg.mode == RunMode::Pmip ? MobilityMode::Pmip : MobilityMode::Sdn));
  }

  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  std::string summary;
  summary += "mode: " + std::string(to_string(cfg.mode)) + "\n";
  summary += "seed: " + std::to_string(cfg.topology.seed) + "\n";
  for (const auto& t : result.traces) {
    const auto path = dir / (std::string(to_string(t.mode)) + ".csv");
    write_file(path, to_csv(t));
    result.artifacts.push_back(path);
    for (const auto& [k, v] : summarize(t)) summary += k + ": " + v + "\n";
  }
  if (result.comparison) {
    const auto path = dir / "comparison.csv";
    write_file(path, comparison_csv(*result.comparison));
    result.artifacts.push_back(path);
    for (const auto& [k, v] : summarize(*result.comparison)) summary += k + ": " + v + "\n";
  }
  const auto summary_path = dir / "summary.txt";
  write_file(summary_path, summary);
  result.artifacts.push_back(summary_path);
  return result;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SDN mobility simulator", "sdnmob"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "Run a scenario file");
  std::string config_path;
  std::string mode_text;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  run->add_option("config", config_path, "Scenario configuration file")->required();
  run->add_option("--mode", mode_text, "sdn, pmip or both (overrides the config)")
      ->check(CLI::IsMember({"sdn", "pmip", "both"}));
  run->add_option("--seed", seed, "Generator seed (overrides the config)");
  run->add_option("--out", out_dir, "Output directory (overrides $SDNMOB_OUT_DIR and the config)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!mode_text.empty()) cfg.mode = *parse_run_mode(mode_text);
    if (seed) cfg.topology.seed = *seed;
    cfg.output_dir = resolve_output_dir(cfg, out_dir.empty() ? std::nullopt : std::optional(out_dir),
                                        std::getenv(kOutputDirEnv));
    check_run_config(cfg, config_path);
    const RunResult r = execute(cfg);
    for (const auto& p : r.artifacts) out << "wrote " << p.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "sdnmob: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sdnmob
