#include <doctest.h>

#include "suites.hpp"

using namespace ebm::testing;

namespace {

void expect_all(const std::vector<Check>& checks) {
  REQUIRE_FALSE(checks.empty());
  for (const auto& c : checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.pass);
  }
}

}  // namespace

TEST_CASE("coefficient laws against closed-form values") { expect_all(physics_suite()); }

TEST_CASE("spatial discretization") { expect_all(discretization_suite()); }

TEST_CASE("restriction, lifting and matching") { expect_all(operator_suite()); }
