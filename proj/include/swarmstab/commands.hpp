#pragma once

#include "swarmstab/scenario.hpp"

#include <ostream>

namespace swarmstab {

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitInvariant = 4,
  kExitCertification = 5,
};

// Each command writes CSVs under s.out and a human summary to `log`.
int cmd_simulate(const Scenario& s, std::ostream& log);
int cmd_analyze(const Scenario& s, std::ostream& log);
int cmd_lyapunov(const Scenario& s, std::ostream& log);
int cmd_sweep(const Scenario& s, std::ostream& log);
int cmd_watched(const Scenario& s, std::ostream& log);

}  // namespace swarmstab
