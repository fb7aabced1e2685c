#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ebm/micro_model.hpp"
#include "ebm/ode/integrator.hpp"
#include "ebm/ode/tridiagonal.hpp"
#include "suites.hpp"

using namespace ebm;
using namespace ebm::ode;
using Vec = Eigen::VectorXd;

namespace {

Vec scalar(double v) { return Vec::Constant(1, v); }

struct Linear {
  double lambda;
  Vec operator()(double, const Vec& y) const { return lambda * y; }
};

}  // namespace

TEST_CASE("explicit Euler leaves a zero field unchanged") {
  const auto zero = [](double, const Vec& y) { return Vec::Zero(y.size()).eval(); };
  Vec y0(3);
  y0 << 1.0, -2.0, 3.5;
  const auto r = integrate(zero, y0, 0.0, 1.0, IntegratorSpec::euler(0.005));
  CHECK(r.final_state == y0);
  CHECK(r.stats.steps_taken == 200);
  const auto partial = integrate(zero, y0, 0.0, 0.0123, IntegratorSpec::euler(0.005));
  CHECK(partial.stats.steps_taken == 3);
}

TEST_CASE("explicit Euler lands on t1 with a shortened last step") {
  const auto one = [](double, const Vec& y) { return Vec::Ones(y.size()).eval(); };
  const auto r = integrate(one, scalar(0.0), 2.0, 2.0123, IntegratorSpec::euler(0.005));
  CHECK(r.final_state[0] == doctest::Approx(0.0123).epsilon(1e-13));
}

TEST_CASE("explicit Euler on exponential decay") {
  const auto r = integrate(Linear{-1.0}, scalar(1.0), 0.0, 1.0, IntegratorSpec::euler(0.005));
  CHECK(r.final_state[0] == doctest::Approx(testing::oracle::euler_decay_200).epsilon(1e-12));
}

TEST_CASE("adaptive integrator handles a very stiff decay") {
  const auto spec = IntegratorSpec::adaptive();
  const auto r = integrate(Linear{-1e6}, scalar(1.0), 0.0, 1.0, spec);
  CHECK(std::abs(r.final_state[0]) <= 10 * spec.abs_tol);
  CHECK(r.stats.steps_taken < 10000);
}

TEST_CASE("adaptive global error stays within 100x the tolerance") {
  const auto spec = IntegratorSpec::adaptive(1e-6, 1e-6);
  for (double lambda : {-1.0, -1e3, -1e6}) {
    const auto r = integrate(Linear{lambda}, scalar(1.0), 0.0, 1.0, spec);
    const double exact = std::exp(lambda);
    const double err = std::abs(r.final_state[0] - exact);
    INFO("lambda = " << lambda << ", error = " << err << ", steps = " << r.stats.steps_taken);
    CHECK(err <= 100 * (spec.rel_tol * exact + spec.abs_tol));
  }
}

TEST_CASE("adaptive cost grows as the tolerance tightens") {
  long previous = 0;
  for (double tol : {1e-3, 1e-5, 1e-7}) {
    const auto r = integrate(Linear{-2.0}, scalar(1.0), 0.0, 3.0, IntegratorSpec::adaptive(tol, tol));
    CHECK(r.stats.steps_taken > previous);
    previous = r.stats.steps_taken;
  }
}

TEST_CASE("dense output") {
  const std::vector<double> end{1.0};
  for (const auto& spec : {IntegratorSpec::euler(0.005), IntegratorSpec::adaptive()}) {
    const auto dense = integrate_dense(Linear{-1.0}, scalar(1.0), 0.0, 1.0, end, spec);
    const auto whole = integrate(Linear{-1.0}, scalar(1.0), 0.0, 1.0, spec);
    REQUIRE(dense.states.size() == 1);
    CHECK(dense.states[0][0] == whole.final_state[0]);
  }

  const auto zero = [](double, const Vec& y) { return Vec::Zero(y.size()).eval(); };
  const std::vector<double> times{0.0, 0.3, 0.7, 1.0};
  for (const auto& s : integrate_dense(zero, scalar(4.0), 0.0, 1.0, times, IntegratorSpec::adaptive()).states)
    CHECK(s[0] == 4.0);

  const std::vector<double> halves{0.5, 1.0};
  const auto euler = IntegratorSpec::euler(0.005);
  const auto dense = integrate_dense(Linear{-1.0}, scalar(1.0), 0.0, 1.0, halves, euler);
  const auto first = integrate(Linear{-1.0}, scalar(1.0), 0.0, 0.5, euler);
  const auto second = integrate(Linear{-1.0}, first.final_state, 0.5, 1.0, euler);
  CHECK(dense.states[0][0] == first.final_state[0]);
  CHECK(dense.states[1][0] == second.final_state[0]);

  const auto adaptive = IntegratorSpec::adaptive();
  const auto dense_a = integrate_dense(Linear{-1.0}, scalar(1.0), 0.0, 1.0, halves, adaptive);
  const auto first_a = integrate(Linear{-1.0}, scalar(1.0), 0.0, 0.5, adaptive);
  const auto second_a = integrate(Linear{-1.0}, first_a.final_state, 0.5, 1.0, adaptive);
  CHECK(dense_a.states[0][0] == first_a.final_state[0]);
  CHECK(dense_a.states[1][0] == doctest::Approx(second_a.final_state[0]).epsilon(1e-4));
}

TEST_CASE("integrator argument checks") {
  CHECK_THROWS_AS(integrate(Linear{-1.0}, scalar(1.0), 1.0, 1.0, IntegratorSpec::euler(0.1)), std::invalid_argument);
  CHECK_THROWS_AS(integrate(Linear{-1.0}, scalar(1.0), 0.0, 1.0, IntegratorSpec::euler(0.0)), std::invalid_argument);
  CHECK_THROWS_AS(integrate(Linear{-1.0}, scalar(1.0), 0.0, 1.0, IntegratorSpec::adaptive(0.0, 1e-6)),
                  std::invalid_argument);
  const std::vector<double> unsorted{0.7, 0.3};
  CHECK_THROWS_AS(integrate_dense(Linear{-1.0}, scalar(1.0), 0.0, 1.0, unsorted, IntegratorSpec::euler(0.01)),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate(Linear{-1.0}, scalar(NAN), 0.0, 1.0, IntegratorSpec::euler(0.1)), IntegrationError);
  const auto blow_up = [](double, const Vec& y) { return (y.array() * y.array()).matrix().eval(); };
  CHECK_THROWS_AS(integrate(blow_up, scalar(10.0), 0.0, 10.0, IntegratorSpec::euler(0.5)), IntegrationError);
}

TEST_CASE("tridiagonal solve agrees with a dense LU") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 30;
  Vec lower(n), diag(n), upper(n), rhs(n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    lower[i] = i > 0 ? u(rng) : 0.0;
    upper[i] = i + 1 < n ? u(rng) : 0.0;
    diag[i] = 3.0 + u(rng);
    rhs[i] = u(rng);
    A(i, i) = diag[i];
    if (i > 0) A(i, i - 1) = lower[i];
    if (i + 1 < n) A(i, i + 1) = upper[i];
  }
  const Vec x = solve_tridiagonal(lower, diag, upper, rhs);
  CHECK((x - A.partialPivLu().solve(rhs)).cwiseAbs().maxCoeff() < 1e-13);
  diag[0] = 0.0;
  CHECK_THROWS(solve_tridiagonal(lower, diag, upper, rhs));
}

TEST_CASE("banded and dense Jacobians agree") {
  // Linear tridiagonal system: Newton converges in one step with either
  // factorization, so both runs take the same steps.
  const int n = 12;
  const auto diffusion = [n](double, const Vec& y) {
    Vec out(n);
    for (int i = 0; i < n; ++i) {
      const double left = i > 0 ? y[i - 1] : y[i];
      const double right = i + 1 < n ? y[i + 1] : y[i];
      out[i] = 50.0 * (left - 2.0 * y[i] + right) - 0.1 * y[i];
    }
    return out;
  };
  const Vec y0 = Vec::LinSpaced(n, 1.0, 3.0);
  const auto banded = integrate(diffusion, y0, 0.0, 2.0, IntegratorSpec::adaptive(1e-6, 1e-6, 1));
  const auto dense = integrate(diffusion, y0, 0.0, 2.0, IntegratorSpec::adaptive(1e-6, 1e-6, -1));
  CHECK(banded.stats.steps_taken == dense.stats.steps_taken);
  CHECK(banded.stats.rhs_evaluations < dense.stats.rhs_evaluations);
  CHECK((banded.final_state - dense.final_state).cwiseAbs().maxCoeff() < 1e-10);

  ForcingSpec forcing = ForcingSpec::with_seed(kDefaultFluctuationSeed);
  const MicroModel<double> model(Grid(45), {}, forcing);
  const auto micro_banded = integrate(model, model.uniform(285.0), 0.0, 20.0, IntegratorSpec::adaptive(1e-6, 1e-6, 1));
  const auto micro_dense = integrate(model, model.uniform(285.0), 0.0, 20.0, IntegratorSpec::adaptive(1e-6, 1e-6, -1));
  CHECK((micro_banded.final_state - micro_dense.final_state).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("adaptive and Euler micro solutions agree over a short window") {
  ForcingSpec forcing = ForcingSpec::with_seed(kDefaultFluctuationSeed);
  forcing.include_random = false;
  const MicroModel<double> model(Grid(45), {}, forcing);
  const Vec y0 = model.uniform(290.0);
  const auto euler = integrate(model, y0, 0.0, 5.0, IntegratorSpec::euler(0.005));
  const auto adaptive = integrate(model, y0, 0.0, 5.0, IntegratorSpec::adaptive(1e-8, 1e-8, 1));
  CHECK((euler.final_state - adaptive.final_state).cwiseAbs().maxCoeff() < 0.05);
}
