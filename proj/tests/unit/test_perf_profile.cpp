#include <doctest.h>

#include <stdexcept>

#include "leanpart/perf_profile.hpp"

using namespace leanpart;

namespace {

double fraction_of(const std::vector<ProfilePoint> &points, const double tau, const std::string &algorithm) {
  for (const auto &point : points) {
    if (point.tau == tau && point.algorithm == algorithm) {
      return point.fraction;
    }
  }
  FAIL("missing profile point");
  return -1.0;
}

} // namespace

TEST_CASE("single algorithm is always within any factor") {
  const std::vector<ProfileRun> runs{{"a", "i1", 10}, {"a", "i2", 20}};
  const auto points = performance_profile(runs, {1.0, 2.0});
  CHECK(fraction_of(points, 1.0, "a") == 1.0);
  CHECK(fraction_of(points, 2.0, "a") == 1.0);
}

TEST_CASE("two algorithms on one instance") {
  const std::vector<ProfileRun> runs{{"a", "i1", 10}, {"b", "i1", 20}};
  const auto points = performance_profile(runs, {1.0, 2.0});
  CHECK(fraction_of(points, 1.0, "a") == 1.0);
  CHECK(fraction_of(points, 1.0, "b") == 0.0);
  CHECK(fraction_of(points, 2.0, "b") == 1.0);
}

TEST_CASE("ties count for all tied algorithms") {
  const std::vector<ProfileRun> runs{{"a", "i1", 10}, {"b", "i1", 10}};
  const auto points = performance_profile(runs, {1.0});
  CHECK(fraction_of(points, 1.0, "a") == 1.0);
  CHECK(fraction_of(points, 1.0, "b") == 1.0);
}

TEST_CASE("duplicate pairs aggregate by arithmetic mean") {
  const std::vector<ProfileRun> runs{
      {"a", "i1", 10}, {"a", "i1", 20}, {"b", "i1", 15},
  };
  // mean(a) = 15 ties with b.
  const auto points = performance_profile(runs, {1.0});
  CHECK(fraction_of(points, 1.0, "a") == 1.0);
  CHECK(fraction_of(points, 1.0, "b") == 1.0);
}

TEST_CASE("missing pairs raise an error naming them") {
  const std::vector<ProfileRun> runs{{"a", "i1", 10}, {"b", "i2", 20}};
  std::string message;
  try {
    performance_profile(runs, {1.0});
  } catch (const std::invalid_argument &e) {
    message = e.what();
  }
  CHECK(message.find("a/i2") != std::string::npos);
  CHECK(message.find("b/i1") != std::string::npos);
}

TEST_CASE("hand-computed three-algorithm fixture") {
  // Ten instances; "fast" wins 6, "best" wins 4 with everyone close.
  std::vector<ProfileRun> runs;
  const double fast_cuts[10] = {100, 90, 80, 70, 60, 50, 220, 330, 440, 560};
  const double best_cuts[10] = {101, 95, 88, 77, 66, 55, 200, 300, 400, 500};
  const double slow_cuts[10] = {150, 135, 120, 105, 90, 75, 300, 450, 600, 750};
  for (int i = 0; i < 10; ++i) {
    const std::string instance = "g" + std::to_string(i);
    runs.push_back({"fast", instance, fast_cuts[i]});
    runs.push_back({"best", instance, best_cuts[i]});
    runs.push_back({"slow", instance, slow_cuts[i]});
  }
  const auto points = performance_profile(runs, {1.0, 1.1, 1.5});
  CHECK(fraction_of(points, 1.0, "fast") == doctest::Approx(0.6));
  CHECK(fraction_of(points, 1.0, "best") == doctest::Approx(0.4));
  CHECK(fraction_of(points, 1.0, "slow") == doctest::Approx(0.0));
  // fast is within 10% everywhere except 560/500 = 1.12.
  CHECK(fraction_of(points, 1.1, "fast") == doctest::Approx(0.9));
  CHECK(fraction_of(points, 1.1, "best") == doctest::Approx(1.0));
  CHECK(fraction_of(points, 1.5, "slow") == doctest::Approx(1.0));
}
