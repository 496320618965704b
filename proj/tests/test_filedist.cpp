#include <cstdint>

#include <catch2/catch_amalgamated.hpp>

#include "ncauth/filedist.hpp"
#include "ncauth/rng.hpp"

using namespace ncauth;
using filedist::plan_for_file;

TEST_CASE("published distribution rows") {
  struct Row {
    std::uint64_t size;
    std::uint32_t N;
    std::uint64_t l_bytes;
    std::uint64_t M;
  };
  const Row rows[] = {
      {18'000'000ull, 1, 1'500, 12'000},
      {72'000'000ull, 2, 3'000, 24'000},
      {1'800'000'000ull, 10, 15'000, 120'000},
      {4'050'000'000ull, 15, 22'500, 180'000},
  };
  for (const auto& row : rows) {
    CAPTURE(row.size);
    const auto plan = plan_for_file(row.size);
    CHECK(plan.N == row.N);
    CHECK(plan.l_bytes == row.l_bytes);
    CHECK(plan.l_bits == row.l_bytes * 8);
    CHECK(plan.M == row.M);
    CHECK(plan.M_max == plan.l_bits);
    CHECK(plan.M == plan.M_max);  // the published sizes fill their scale exactly
    CHECK(plan.max_file_bytes == filedist::max_file_for(row.N));
    CHECK_FALSE(plan.payload_accounting);
  }
}

TEST_CASE("capacity per scale") {
  CHECK(filedist::max_file_for(1) == 18'000'000ull);
  CHECK(filedist::max_file_for(2) == 72'000'000ull);
  CHECK(filedist::max_file_for(10) == 1'800'000'000ull);
  CHECK(filedist::max_file_for(15) == 4'050'000'000ull);
  CHECK(filedist::max_file_for(100) == 180'000'000'000ull);
  for (std::uint32_t N = 1; N <= 64; ++N)
    CHECK(filedist::max_file_for(N) == 18'000'000ull * N * N);

  CHECK_THROWS_AS(filedist::max_file_for(0), std::invalid_argument);
}

TEST_CASE("smallest files still get a packet") {
  const auto one = plan_for_file(1);
  CHECK(one.N == 1);
  CHECK(one.l_bytes == 1'500);
  CHECK(one.M == 1);

  const auto exact = plan_for_file(1'500);
  CHECK(exact.N == 1);
  CHECK(exact.M == 1);

  const auto next = plan_for_file(1'501);
  CHECK(next.N == 1);
  CHECK(next.M == 2);
}

TEST_CASE("scale is minimal and the packet budget always fits") {
  Rng rng(2718);
  std::uint64_t first_bad = 0;
  for (int i = 0; i < 1'000'000 && first_bad == 0; ++i) {
    const std::uint64_t size = 1 + rng.next_below(filedist::max_file_for(4'000));
    const auto plan = plan_for_file(size);
    const bool ok = size <= filedist::max_file_for(plan.N) &&
                    (plan.N == 1 || filedist::max_file_for(plan.N - 1) < size) &&
                    plan.M <= plan.M_max &&
                    plan.M == (size + plan.l_bytes - 1) / plan.l_bytes &&
                    plan.l_bytes == 1'500ull * plan.N && plan.l_bits == 12'000ull * plan.N;
    if (!ok) first_bad = size;
  }
  if (first_bad != 0) {
    // replay the failing size with full assertions
    const auto plan = plan_for_file(first_bad);
    CAPTURE(first_bad, plan.N, plan.l_bytes, plan.M, plan.M_max);
    CHECK(first_bad <= filedist::max_file_for(plan.N));
    if (plan.N > 1) CHECK(filedist::max_file_for(plan.N - 1) < first_bad);
    CHECK(plan.M <= plan.M_max);
    CHECK(plan.M == (first_bad + plan.l_bytes - 1) / plan.l_bytes);
    CHECK(plan.l_bytes == 1'500ull * plan.N);
    CHECK(plan.l_bits == 12'000ull * plan.N);
  }
  REQUIRE(first_bad == 0);
}

TEST_CASE("boundary sizes sit exactly on the scale steps") {
  for (std::uint32_t N : {1u, 2u, 3u, 17u, 1000u}) {
    const std::uint64_t cap = filedist::max_file_for(N);
    CHECK(plan_for_file(cap).N == N);
    CHECK(plan_for_file(cap + 1).N == N + 1);
  }
}

TEST_CASE("payload accounting shrinks capacity but not the frame math") {
  const auto plan = plan_for_file(17'760'000ull, true);
  CHECK(plan.N == 1);
  CHECK(plan.l_bytes == 1'480);
  CHECK(plan.l_bits == 12'000);  // symbol budget still follows the frame
  CHECK(plan.M == 12'000);
  CHECK(plan.M_max == 12'000);
  CHECK(plan.payload_accounting);

  CHECK(filedist::max_file_for(1, true) == 17'760'000ull);
  CHECK(filedist::max_file_for(2, true) == 71'040'000ull);
  CHECK(plan_for_file(17'760'001ull, true).N == 2);

  // The same byte count may need a bigger scale when headers are excluded.
  CHECK(plan_for_file(18'000'000ull).N == 1);
  CHECK(plan_for_file(18'000'000ull, true).N == 2);
}

TEST_CASE("rejected sizes") {
  CHECK_THROWS_AS(plan_for_file(0), std::invalid_argument);
  const std::uint64_t over = filedist::max_file_for(filedist::kMaxScale);
  CHECK_THROWS_AS(plan_for_file(over + 1), std::invalid_argument);
  CHECK(plan_for_file(over).N == filedist::kMaxScale);
}
