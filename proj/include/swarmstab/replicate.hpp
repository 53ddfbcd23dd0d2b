#pragma once

#include "swarmstab/simulate.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace swarmstab {

struct Band {
  double mean = 0.0;
  double variance = 0.0;  // unbiased; zero for a single replication
  double p05 = 0.0, p50 = 0.0, p95 = 0.0;
};

Band band_of(std::vector<double> values);

struct ReplicationReport {
  std::vector<RunSummary> runs;
  // Observable name -> band across replications.
  std::map<std::string, Band> bands;
};

// Seeds for R replications derived from one master seed.
std::vector<std::uint64_t> replication_seeds(std::uint64_t seed, int R);

// Runs one simulation per seed (in parallel when threads > 1). Output order
// follows the seed list, so results do not depend on the thread count.
ReplicationReport replicate(const SwarmParams& params, const RunOptions& base,
                            const std::vector<std::uint64_t>& seeds, int threads = 1,
                            const CountState* initial = nullptr);

}  // namespace swarmstab
