#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "rollpass/rng.hpp"

using namespace rollpass;

TEST_CASE("identical seed and stream reproduce the draw sequence") {
  RngStream a(42, 3), b(42, 3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("different streams of one seed do not share draws") {
  RngStream a(1, 0), b(1, 1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    seen.insert(a.next_u64());
  }
  for (int i = 0; i < 1000; ++i) {
    CHECK(seen.count(b.next_u64()) == 0);
  }
}

TEST_CASE("different seeds diverge") {
  RngStream a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) {
    equal += a.next_u64() == b.next_u64();
  }
  CHECK(equal == 0);
}

TEST_CASE("uniform stays inside its bounds with a sane mean") {
  RngStream rng(7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double v = rng.uniform(2.0, 5.0);
    CHECK(v >= 2.0);
    CHECK(v < 5.0);
    sum += v;
  }
  CHECK(sum / 20000 == doctest::Approx(3.5).epsilon(0.01));
}

TEST_CASE("uniform_int covers its range and nothing else") {
  RngStream rng(9);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t v = rng.uniform_int(7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  for (int h : hits) {
    CHECK(h > 1000);  // ~1429 expected per bucket
  }
  RngStream one(9);
  for (int i = 0; i < 100; ++i) {
    CHECK(one.uniform_int(1) == 0);
  }
}

TEST_CASE("counter advances once per draw") {
  RngStream rng(5);
  CHECK(rng.counter() == 0);
  rng.next_u64();
  CHECK(rng.counter() == 1);
  rng.uniform(0.0, 1.0);
  rng.uniform_int(10);
  CHECK(rng.counter() == 3);
}

TEST_CASE("state key resumes the remaining sequence") {
  RngStream rng(123, 4);
  for (int i = 0; i < 17; ++i) {
    rng.next_u64();
  }
  RngStream resumed = RngStream::from_key(rng.state_key());
  for (int i = 0; i < 200; ++i) {
    CHECK(resumed.next_u64() == rng.next_u64());
  }
}

TEST_CASE("fresh stream key replays the whole stream") {
  RngStream a(77, 2);
  RngStream b = RngStream::from_key(a.state_key());
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}
