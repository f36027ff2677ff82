// rydsim: configuration-driven runs of the ryd library.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical convergence
// failure, 1 anything else.

#include <chrono>
#include <ctime>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"
#include "ryd/core/parallel.hpp"

namespace {

using namespace rydsim;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
};

int run(const std::string& command, const Flags& flags) {
  static const std::map<std::string, Runner (*)(Node, const RunContext&)> parsers{
      {"ghz-optimize", parse_ghz_optimize}, {"ghz-evolve", parse_ghz_evolve}, {"gate-bench", parse_gate_bench},
      {"decay", parse_decay},               {"mpp", parse_mpp},               {"analyze", parse_analyze}};

  Config cfg = Config::load(flags.config);
  Node root = cfg.root();
  const std::string given = root.get<std::string>("command", command);
  if (given != command) throw ConfigError("command", "config is for '" + given + "', not '" + command + "'");
  root.has("generated_at");  // written into snapshots; ignored on input

  RunContext ctx;
  ctx.seed = flags.seed ? *flags.seed : root.get<std::uint64_t>("seed", 1);
  ctx.threads = flags.threads ? *flags.threads : root.get<int>("threads", ryd::default_threads());
  if (ctx.threads < 1) throw ConfigError("threads", "must be positive");
  ctx.out = flags.out.empty() ? root.get<std::string>("out", "rydsim_out") : flags.out;
  // flags win over the file; the snapshot records what was used
  for (const char* key : {"seed", "threads", "out"}) root.has(key);
  json& doc = cfg.document();
  doc["seed"] = ctx.seed;
  doc["threads"] = ctx.threads;
  doc["out"] = ctx.out.string();

  const Runner work = parsers.at(command)(root, ctx);
  cfg.check_unused();

  std::error_code ec;
  std::filesystem::create_directories(ctx.out, ec);
  if (ec) throw ConfigError("out", "cannot create '" + ctx.out.string() + "': " + ec.message());
  json snapshot = cfg.document();
  snapshot["generated_at"] = utc_now();
  ctx.write_json("resolved_config.json", snapshot);

  work();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rydberg array, gate and clock-pulse simulations"};
  app.require_subcommand(1);
  Flags flags;
  std::uint64_t seed = 0;
  int threads = 0;
  auto* seed_opt = app.add_option("--seed", seed, "base random seed (default 1)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (default: all cores)");
  app.add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", flags.out, "output directory");
  const std::pair<const char*, const char*> commands[] = {
      {"ghz-optimize", "optimize a GHZ preparation sweep; writes pulse.csv, trace.csv"},
      {"ghz-evolve", "evolve under a pulse and analyze the output state"},
      {"gate-bench", "synthesize the CZ pulse, fidelity budget, gRB and loss statistics"},
      {"decay", "post-selected decay curves and lifetime fits"},
      {"mpp", "clock pulse infidelity over trap-frequency and light-shift grids"},
      {"analyze", "re-analyze a shot file, optionally with readout correction"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (seed_opt->count()) flags.seed = seed;
  if (threads_opt->count()) flags.threads = threads;
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    return run(command, flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ryd::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
