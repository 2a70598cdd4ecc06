#include "leanpart/perf_profile.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace leanpart {

std::vector<ProfilePoint> performance_profile(
    const std::vector<ProfileRun> &runs, const std::vector<double> &taus
) {
  std::set<std::string> algorithms;
  std::set<std::string> instances;
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> sums;
  for (const ProfileRun &run : runs) {
    algorithms.insert(run.algorithm);
    instances.insert(run.instance);
    auto &[sum, count] = sums[{run.algorithm, run.instance}];
    sum += run.cut;
    ++count;
  }

  std::string missing;
  for (const auto &algorithm : algorithms) {
    for (const auto &instance : instances) {
      if (sums.find({algorithm, instance}) == sums.end()) {
        missing += (missing.empty() ? "" : ", ") + algorithm + "/" + instance;
      }
    }
  }
  if (!missing.empty()) {
    throw std::invalid_argument("missing (algorithm, instance) pairs: " + missing);
  }

  std::map<std::pair<std::string, std::string>, double> cut;
  for (const auto &[key, value] : sums) {
    cut[key] = value.first / value.second;
  }
  std::map<std::string, double> best;
  for (const auto &instance : instances) {
    double min_cut = std::numeric_limits<double>::infinity();
    for (const auto &algorithm : algorithms) {
      min_cut = std::min(min_cut, cut[{algorithm, instance}]);
    }
    best[instance] = min_cut;
  }

  std::vector<ProfilePoint> out;
  for (const double tau : taus) {
    for (const auto &algorithm : algorithms) {
      int within = 0;
      for (const auto &instance : instances) {
        if (cut[{algorithm, instance}] <= tau * best[instance]) {
          ++within;
        }
      }
      out.push_back({tau, algorithm, instances.empty()
                                            ? 0.0
                                            : static_cast<double>(within) / instances.size()});
    }
  }
  return out;
}

} // namespace leanpart
