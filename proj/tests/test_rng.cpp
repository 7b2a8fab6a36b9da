#include <doctest.h>

#include <cmath>
#include <set>

#include "normtail/rng.hpp"

using namespace normtail;

TEST_CASE("streams are deterministic and key-dependent") {
  RngStream a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  bool any_diff = false;
  RngStream a2(42);
  for (int i = 0; i < 100; ++i) any_diff |= (a2.next_u64() != c.next_u64());
  CHECK(any_diff);
}

TEST_CASE("fork does not advance the parent and children are independent") {
  RngStream parent(7);
  RngStream child1 = parent.fork(1);
  RngStream child2 = parent.fork(2);
  CHECK(child1.key() != child2.key());
  RngStream parent_copy(7);
  for (int i = 0; i < 50; ++i)
    CHECK(parent.next_u64() == parent_copy.next_u64());
  CHECK(parent.fork(1).key() == child1.key());
}

TEST_CASE("uniform01 stays strictly inside (0,1)") {
  RngStream rng(1);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("normal has roughly standard moments") {
  RngStream rng(2);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("stream keys separate sweep cells") {
  std::set<std::uint64_t> keys;
  for (std::uint32_t algo = 0; algo < 4; ++algo)
    for (std::uint64_t T : {256ULL, 1024ULL})
      for (std::uint32_t r = 0; r < 8; ++r)
        keys.insert(make_stream_key(99, algo, T, r));
  CHECK(keys.size() == 4 * 2 * 8);
}
