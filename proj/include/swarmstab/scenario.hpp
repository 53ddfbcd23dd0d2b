#pragma once

#include "swarmstab/params.hpp"
#include "swarmstab/policy.hpp"
#include "swarmstab/rate.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmstab {

// One scalar parameter swept over a grid. `param` is one of Us, mu, gamma,
// 1/gamma or arrivals[i].rate.
struct SweepSpec {
  std::string param;
  std::vector<Rational> values;
};

struct Scenario {
  SwarmParams params;
  PolicyKind policy = PolicyKind::RandomUseful;
  double horizon = 1000.0;
  int replications = 1;
  std::uint64_t seed = 1;
  int threads = 1;
  int designated_piece = 1;
  std::string out = "out";
  std::optional<SweepSpec> sweep;
  // lyapunov subcommand
  int lyap_samples = 10000;
  int lyap_pilot = 600;
  // watched subcommand
  int watched_z_samples = 20000;
  std::int64_t watched_n = 50;
};

class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { Parse, Invariant };
  ScenarioError(Kind kind, int line, const std::string& what);
  Kind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario(const std::string& path);
std::string format_scenario(const Scenario& s);

// Params with the swept parameter set to v; throws ScenarioError on an
// unknown parameter name.
SwarmParams apply_sweep(const SwarmParams& p, const std::string& param, const Rational& v);

}  // namespace swarmstab
