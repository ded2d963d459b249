#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

#include "freecorr/bitstream.hpp"
#include "freecorr/cesaro.hpp"
#include "freecorr/parallel.hpp"
#include "freecorr/shift.hpp"

using namespace freecorr;

namespace {

struct ThreadGuard {
  ~ThreadGuard() { parallel::set_max_threads(std::nullopt); }
};

}  // namespace

TEST_CASE("patterns canonicalize by first appearance") {
  const std::vector<int> a = {3, 1, 3};
  const std::vector<int> b = {1, 2, 1};
  CHECK(TimePattern::from_copies(a) == TimePattern::from_copies(b));
  CHECK(TimePattern::from_copies(a).distinct_count() == 2);
  CHECK(TimePattern::from_copies(std::vector<int>{}).distinct_count() == 0);
}

TEST_CASE("grid averages count points and include t = 0") {
  const auto pattern = TimePattern::from_copies(std::vector<int>{1, 2});
  const auto res = average(
      pattern, [](std::span<const std::int64_t>) { return 1; }, {3});
  CHECK(res.points == 16);  // (3+1)^2 points, sums start at t = 0
  CHECK(res.mean == 1.0);
}

TEST_CASE("min_gap excludes near-diagonal points") {
  const auto pattern = TimePattern::from_copies(std::vector<int>{1, 2});
  const auto one = [](std::span<const std::int64_t>) { return 1; };
  CHECK(average(pattern, one, {3}, 1).points == 12);
  CHECK(average(pattern, one, {3}, 2).points == 6);
  CHECK_THROWS_AS(average(pattern, one, {3}, 100), std::domain_error);
}

TEST_CASE("diagonal skip averaging matches its contract") {
  const auto pattern = TimePattern::from_copies(std::vector<int>{1, 2});
  const auto stream = BitStream::thue_morse();
  const auto pair = [&](std::span<const std::int64_t> t) {
    const std::int64_t w[2] = {t[0], t[1]};
    return expectation_of_times(w, 2, stream);
  };
  // min_gap 0 is the plain average
  CHECK(diagonal_skip_average(pattern, pair, {40}, 0).mean ==
        average(pattern, pair, {40}).mean);
  // every off-diagonal e(t1)e(t2) has expectation 0
  CHECK(diagonal_skip_average(pattern, pair, {100}, 1).mean == 0.0);
  const auto five = [](std::span<const std::int64_t>) { return 5; };
  CHECK(diagonal_skip_average(pattern, five, {50}, 5).mean == 5.0);
  CHECK_THROWS_AS(diagonal_skip_average(pattern, five, {50}, -1), std::invalid_argument);
}

TEST_CASE("averaging is linear for integer evaluators") {
  const auto pattern = TimePattern::from_copies(std::vector<int>{1, 2, 1});
  const auto g = [](std::span<const std::int64_t> t) {
    return static_cast<int>(t[0] % 3);
  };
  const auto h = [](std::span<const std::int64_t> t) {
    return static_cast<int>((t[0] + t[1]) % 5);
  };
  const auto combo = [&](std::span<const std::int64_t> t) { return 3 * g(t) - 2 * h(t); };
  const auto rg = average(pattern, g, {17});
  const auto rh = average(pattern, h, {17});
  const auto rc = average(pattern, combo, {17});
  CHECK(rc.mean == 3.0 * rg.mean - 2.0 * rh.mean);
}

TEST_CASE("full-grid averages of product evaluators factorize") {
  std::vector<std::int64_t> hs = {7, 12};
  const auto g0 = [](std::int64_t t) { return static_cast<double>(t % 3); };
  const auto g1 = [](std::int64_t t) { return static_cast<double>(t % 4); };
  const auto f = [&](std::span<const std::int64_t> t) { return g0(t[0]) * g1(t[1]); };
  const auto joint = grid_accumulate(std::span<const std::int64_t>(hs.data(), 2), f);
  double m0 = 0, m1 = 0;
  for (std::int64_t t = 0; t <= hs[0]; ++t) m0 += g0(t);
  for (std::int64_t t = 0; t <= hs[1]; ++t) m1 += g1(t);
  m0 /= static_cast<double>(hs[0] + 1);
  m1 /= static_cast<double>(hs[1] + 1);
  CHECK(std::abs(joint.mean - m0 * m1) < 1e-12);
}

TEST_CASE("diagonal exclusion shifts the mean by at most the density bound") {
  const auto stream = BitStream::thue_morse();
  const auto pattern = TimePattern::from_copies(std::vector<int>{1, 2});
  const auto f = [&](std::span<const std::int64_t> t) {
    return (1 - 2 * stream.bit(t[0] + 1)) * (1 - 2 * stream.bit(t[1] + 1));
  };
  const std::int64_t T = 64;
  const std::int64_t gap = 3;
  const auto full = average(pattern, f, {T});
  const auto skipped = average(pattern, f, {T}, gap);
  const double bound = 1.0 * static_cast<double>(gap) * 2.0 * 2.0 / static_cast<double>(T);
  CHECK(std::abs(full.mean - skipped.mean) <= bound);
}

TEST_CASE("grid results are identical across worker counts") {
  ThreadGuard guard;
  const auto pattern = TimePattern::from_copies(std::vector<int>{1, 2});
  const auto f = [](std::span<const std::int64_t> t) {
    return std::sin(0.7 * static_cast<double>(t[0])) * std::cos(1.3 * static_cast<double>(t[1]));
  };
  std::vector<double> means;
  for (const std::size_t workers : {1u, 2u, 8u}) {
    parallel::set_max_threads(workers);
    const auto res = average(pattern, f, {300}, 1);
    means.push_back(res.mean);
  }
  CHECK(std::memcmp(&means[0], &means[1], sizeof(double)) == 0);
  CHECK(std::memcmp(&means[0], &means[2], sizeof(double)) == 0);
}

TEST_CASE("thue-morse bit frequency converges to one half") {
  const auto stream = BitStream::thue_morse();
  const auto pattern = TimePattern::from_copies(std::vector<int>{1});
  const auto f = [&](std::span<const std::int64_t> t) { return stream.bit(t[0] + 1); };
  const auto res = average(pattern, f, {4096});
  CHECK(std::abs(res.mean - 0.5) < 0.01);
}

TEST_CASE("staircase schedules approximate iterated limits") {
  // f = [t1 > t2]: the iterated limit (inner t1 first) is 1, the joint
  // equal-horizon limit is 1/2; the schedules must tell them apart.
  const auto f = [](std::span<const std::int64_t> t) { return t[0] > t[1] ? 1 : 0; };
  const auto pattern = TimePattern::from_copies(std::vector<int>{1, 2});

  const auto stair = AveragingSchedule::staircase({32}, 2);
  REQUIRE(stair.rungs.size() == 1);
  CHECK(stair.rungs[0] == std::vector<std::int64_t>{1024, 32});
  const auto it = average(pattern, f,
                          std::span<const std::int64_t>(stair.rungs[0].data(), 2));
  CHECK(it.mean > 0.9);

  const auto joint = average(pattern, f, {512});
  CHECK(std::abs(joint.mean - 0.5) < 0.05);
}

TEST_CASE("convergence reports track deltas") {
  const auto pattern = TimePattern::from_copies(std::vector<int>{1});
  const auto good = [](std::span<const std::int64_t> t) {
    return t[0] % 2 == 0 ? 1.0 : 0.0;
  };
  const auto rep =
      convergence_report(pattern, good, AveragingSchedule::equal({2, 4, 8, 16}));
  REQUIRE(rep.rows.size() == 4);
  CHECK(!rep.rows[0].delta.has_value());
  CHECK(rep.rows[1].delta.has_value());
  CHECK(rep.deltas_nonincreasing);

  const auto spiky = [](std::span<const std::int64_t> t) {
    return t[0] == 3 ? 100.0 : 0.0;
  };
  const auto bad = convergence_report(pattern, spiky, AveragingSchedule::equal({1, 2, 3}));
  CHECK(!bad.deltas_nonincreasing);
}

TEST_CASE("invalid averaging inputs are rejected") {
  const auto pattern = TimePattern::from_copies(std::vector<int>{1, 2});
  const auto one = [](std::span<const std::int64_t>) { return 1; };
  CHECK_THROWS_AS(average(pattern, one, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(average(pattern, one, {-1}), std::invalid_argument);
  CHECK_THROWS_AS(average(TimePattern{}, one, {4}), std::invalid_argument);
}
