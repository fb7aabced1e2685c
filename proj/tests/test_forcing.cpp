#include <doctest.h>

#include <filesystem>
#include <stdexcept>

#include "ebm/forcing.hpp"

using namespace ebm;

TEST_CASE("fluctuation table is seeded and bounded") {
  const auto a = generate_fluctuations(42, 1000);
  const auto b = generate_fluctuations(42, 1000);
  const auto c = generate_fluctuations(43, 1000);
  REQUIRE(a.size() == 1000);
  CHECK(a == b);
  CHECK(a != c);
  double lo = 1.0, hi = -1.0;
  for (double r : a) {
    CHECK(r >= -1.0);
    CHECK(r < 1.0);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo < -0.9);
  CHECK(hi > 0.9);
}

TEST_CASE("fluctuations are interpolated linearly from R(0) = 0") {
  auto spec = ForcingSpec::with_seed(5, 10);
  const auto& R = spec.fluctuations;
  CHECK(interpolated_fluctuation(0.0, spec) == 0.0);
  CHECK(interpolated_fluctuation(1.0, spec) == R[0]);
  CHECK(interpolated_fluctuation(0.5, spec) == doctest::Approx(0.5 * R[0]).epsilon(1e-15));
  CHECK(interpolated_fluctuation(3.25, spec) == doctest::Approx(R[2] + 0.25 * (R[3] - R[2])).epsilon(1e-15));
  CHECK(interpolated_fluctuation(10.0, spec) == R[9]);
  CHECK_THROWS_AS(interpolated_fluctuation(10.5, spec), std::out_of_range);
  CHECK_THROWS_AS(interpolated_fluctuation(-0.1, spec), std::out_of_range);
}

TEST_CASE("deterministic perturbation: jumps on closed intervals and trend") {
  const auto spec = ForcingSpec::with_seed(1);
  CHECK(delta_q_deterministic(282.999, spec) == 0.0);
  CHECK(delta_q_deterministic(283.0, spec) == 0.05);
  CHECK(delta_q_deterministic(335.0, spec) == 0.05);
  CHECK(delta_q_deterministic(335.001, spec) == 0.0);
  CHECK(delta_q_deterministic(487.0, spec) == -0.03);
  CHECK(delta_q_deterministic(564.0, spec) == -0.03);
  CHECK(delta_q_deterministic(700.0, spec) == 0.0);
  CHECK(delta_q_deterministic(1000.0, spec) == doctest::Approx(0.03).epsilon(1e-14));
  CHECK_THROWS_AS(delta_q(1000.5, spec), std::out_of_range);
}

TEST_CASE("random term is added only when enabled") {
  auto spec = ForcingSpec::with_seed(9);
  const double t = 123.0;
  CHECK(delta_q(t, spec) == doctest::Approx(0.05 * spec.fluctuations[122]).epsilon(1e-15));
  spec.include_random = false;
  CHECK(delta_q(t, spec) == 0.0);
}

TEST_CASE("forcing validation") {
  auto spec = ForcingSpec::with_seed(3);
  CHECK_NOTHROW(spec.validate());
  auto inverted = spec;
  inverted.a2 = 600.0;
  CHECK_THROWS_AS(inverted.validate(), std::invalid_argument);
  auto short_table = spec;
  short_table.fluctuations.pop_back();
  CHECK_THROWS_AS(short_table.validate(), std::invalid_argument);
  auto out_of_range = spec;
  out_of_range.fluctuations[17] = 1.5;
  CHECK_THROWS_AS(out_of_range.validate(), std::invalid_argument);
}

TEST_CASE("fluctuation table file round trip is exact") {
  const auto table = generate_fluctuations(20180613, 1000);
  const auto path = std::filesystem::temp_directory_path() / "ebm_fluct_roundtrip.txt";
  write_fluctuations(path, table);
  CHECK(read_fluctuations(path) == table);
  std::filesystem::remove(path);
  CHECK_THROWS(read_fluctuations(path));
}
