#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "cfsim/rng.hpp"

using namespace cfsim;

TEST_CASE("streams are reproducible and keyed") {
  RngStream a(42), b(42), c(43);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("derive_stream separates paths, orders and prefixes") {
  const std::uint64_t s = 7;
  CHECK(derive_stream(s, {1, 2}) != derive_stream(s, {2, 1}));
  CHECK(derive_stream(s, {1}) != derive_stream(s, {1, 0}));
  CHECK(derive_stream(s, {1, 2}) == derive_stream(s, {1, 2}));
  CHECK(derive_stream(s, {1, 2}) != derive_stream(s + 1, {1, 2}));
  // Tag constants are distinct.
  std::vector<std::uint64_t> tags = {stream_tag::kRrhPositions, stream_tag::kUePositions,
                                     stream_tag::kAssociation, stream_tag::kFading,
                                     stream_tag::kPilotNoise};
  std::sort(tags.begin(), tags.end());
  CHECK(std::adjacent_find(tags.begin(), tags.end()) == tags.end());
}

TEST_CASE("uniform lies in [0,1) with the right mean") {
  RngStream s(1);
  double sum = 0.0;
  bool in_range = true;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    in_range = in_range && u >= 0.0 && u < 1.0;
    sum += u;
  }
  CHECK(in_range);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));

  RngStream p(2);
  bool positive = true;
  for (int i = 0; i < 10000; ++i) positive = positive && p.uniform_pos() > 0.0;
  CHECK(positive);
}

TEST_CASE("bounded covers [0,n) roughly uniformly") {
  RngStream s(3);
  const std::uint64_t n = 7;
  std::vector<int> hits(n, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) hits[s.bounded(n)]++;
  for (std::uint64_t v = 0; v < n; ++v) {
    CHECK(hits[v] == doctest::Approx(draws / static_cast<double>(n)).epsilon(0.05));
  }
}

TEST_CASE("normal and cnormal moments") {
  RngStream s(4);
  const int n = 200000;
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    mean += x;
    var += x * x;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));

  RngStream cs(5);
  double cmean_re = 0.0, cmean_im = 0.0, power = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> z = cs.cnormal();
    cmean_re += z.real();
    cmean_im += z.imag();
    power += std::norm(z);
  }
  CHECK(std::abs(cmean_re / n) < 0.02);
  CHECK(std::abs(cmean_im / n) < 0.02);
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("permutation is a permutation and mixes positions") {
  RngStream s(6);
  const int n = 12;
  std::vector<int> first_position_hits(n, 0);
  const int trials = 12000;
  for (int t = 0; t < trials; ++t) {
    std::vector<int> p = s.permutation(n);
    std::vector<int> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i) REQUIRE(sorted[static_cast<std::size_t>(i)] == i);
    first_position_hits[static_cast<std::size_t>(p[0])]++;
  }
  for (int v = 0; v < n; ++v) {
    CHECK(first_position_hits[static_cast<std::size_t>(v)] ==
          doctest::Approx(trials / static_cast<double>(n)).epsilon(0.15));
  }
  CHECK(s.permutation(1) == std::vector<int>{0});
  CHECK(s.permutation(0).empty());
}
