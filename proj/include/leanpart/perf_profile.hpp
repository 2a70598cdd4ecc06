/*******************************************************************************
 * Performance profiles: for each algorithm, the fraction of instances whose
 * cut is within a factor tau of the best cut any algorithm achieved there.
 ******************************************************************************/
#pragma once

#include <string>
#include <vector>

namespace leanpart {

struct ProfileRun {
  std::string algorithm;
  std::string instance;
  double cut;
};

struct ProfilePoint {
  double tau;
  std::string algorithm;
  double fraction;
};

// Duplicate (algorithm, instance) pairs are aggregated by arithmetic mean
// first. Throws std::invalid_argument listing any missing pair. At tau = 1
// ties count for every tied algorithm.
std::vector<ProfilePoint> performance_profile(
    const std::vector<ProfileRun> &runs, const std::vector<double> &taus
);

} // namespace leanpart
