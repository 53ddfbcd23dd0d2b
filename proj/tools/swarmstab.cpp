#include "swarmstab/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace swarmstab;

int main(int argc, char** argv) {
  CLI::App app{"Stability analysis and simulation of P2P swarms"};
  app.require_subcommand(1);
  std::string config, out;
  std::uint64_t seed = 0;
  int replications = 0, threads = 0;
  const char* names[] = {"simulate", "analyze", "lyapunov", "sweep", "watched"};
  const char* help[] = {"run replicated simulations", "classify stability", "search and certify Lyapunov constants",
                        "sweep one parameter", "run the watched top-layer chain"};
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config, "scenario YAML")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--replications", replications, "replication count")->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  Scenario s;
  try {
    s = parse_scenario(config);
  } catch (const ScenarioError& e) {
    std::cerr << config << ":" << e.what() << '\n';
    return e.kind() == ScenarioError::Kind::Parse ? kExitParse : kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitIo;
  }
  const auto* sub = app.get_subcommands().front();
  if (sub->count("--out")) s.out = out;
  if (sub->count("--seed")) s.seed = seed;
  if (sub->count("--replications")) s.replications = replications;
  if (sub->count("--threads")) s.threads = threads;
  const std::string name = sub->get_name();
  try {
    if (name == "simulate") return cmd_simulate(s, std::cout);
    if (name == "analyze") return cmd_analyze(s, std::cout);
    if (name == "lyapunov") return cmd_lyapunov(s, std::cout);
    if (name == "sweep") return cmd_sweep(s, std::cout);
    return cmd_watched(s, std::cout);
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::domain_error& e) {
    std::cerr << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitIo;
  }
}
