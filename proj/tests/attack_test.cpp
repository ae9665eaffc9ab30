#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otpsim/attack.hpp"
#include "otpsim/cseq.hpp"

using namespace otpsim;

namespace {

// Witness qubit untouched, flag = ancilla qubit rotated by Ry(theta);
// Q = sin^2(theta/2) I.
MwVerifier rotation_verifier(double theta) {
  Mat ry(2, 2);
  ry << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2),
      std::cos(theta / 2);
  std::vector<GateStep> steps;
  steps.push_back({std::make_shared<const Mat>(ry), nullptr, nullptr, false,
                   {1},
                   {}});
  MwVerifier v;
  v.a = UnitaryOp::program(2, std::move(steps));
  v.witness_width = 1;
  v.ancilla_width = 1;
  v.flag_qubit = 1;
  return v;
}

RandomizedFunction and_function() {
  RandomizedFunction f;
  f.n_x = 1;
  f.n_r = 1;
  f.n_y = 1;
  f.table = {0, 0, 0, 1};
  return f;
}

RandomizedFunction quarter_function() {
  RandomizedFunction f;
  f.n_x = 1;
  f.n_r = 2;
  f.n_y = 1;
  f.table = {0, 0, 0, 1, 0, 0, 0, 1};
  return f;
}

}  // namespace

TEST_CASE("extreme eigenvalues give constant bit streams") {
  Rng rng(501);
  Vec witness(2);
  witness << 1.0, 0.0;
  MwRun ones = mw_rounds(rotation_verifier(3.14159265358979323846), witness,
                         20, rng);
  for (int b : ones.bits) CHECK(b == 1);
  MwRun zeros = mw_rounds(rotation_verifier(0.0), witness, 20, rng);
  for (int b : zeros.bits) CHECK(b == 0);
}

TEST_CASE("q matrix of the rotation fixture") {
  MwVerifier v = rotation_verifier(3.14159265358979323846 / 3);
  Mat q = mw_q_matrix(v);
  CHECK(max_abs_diff(q, 0.25 * Mat::Identity(2, 2)) < 1e-12);
}

TEST_CASE("bernoulli product law by exact branch enumeration") {
  MwVerifier v = rotation_verifier(3.14159265358979323846 / 3);
  Vec witness(2);
  witness << std::sqrt(0.3), std::sqrt(0.7);
  for (int n = 1; n <= 4; ++n) {
    auto dist = mw_branch_distribution(v, witness, n);
    CHECK(static_cast<int>(dist.size()) == (1 << n));
    for (const auto& [z, prob] : dist) {
      int w = 0;
      for (char c : z) w += (c == '1');
      double want = std::pow(0.25, w) * std::pow(0.75, n - w);
      CHECK(std::abs(prob - want) < 1e-9);
    }
  }
}

TEST_CASE("restoration returns an eigenvector witness exactly") {
  Rng rng(503);
  MwVerifier v = rotation_verifier(3.14159265358979323846 / 3);
  Vec witness(2);
  witness << std::sqrt(0.5), cxd(0, 1) * std::sqrt(0.5);
  MwRun run = mw_rounds(v, witness, 31, rng, true);
  REQUIRE(run.restored);
  CHECK(std::abs(std::abs(witness.dot(run.final_state)) - 1.0) < 1e-10);
}

TEST_CASE("derived parameters satisfy the grid invariant") {
  AttackParams p = derive_params(0.2, 0.1, 4);
  CHECK(p.alpha == doctest::Approx(0.05));
  CHECK(p.beta == doctest::Approx(0.0125));
  CHECK(p.tau == doctest::Approx(0.0125));
  CHECK(std::ldexp(1.0, -p.r) <= p.alpha / 4 + 1e-15);
  CHECK(p.r == 7);
}

TEST_CASE("laplace readout center, grid, and failure rate") {
  AttackParams p = derive_params(0.2, 0.1, 4);
  Rng rng(505);
  // Near-zero noise: the readout is the grid-rounded count.
  auto v = laplace_readout(1000, 2000, p.alpha, 1e-12, p.r, rng);
  REQUIRE(v.has_value());
  CHECK(*v == doctest::Approx(0.5));
  auto top = laplace_readout(2000, 2000, p.alpha, 1e-12, p.r, rng);
  CHECK(*top == doctest::Approx(1.0));
  CHECK_THROWS_AS(laplace_readout(3000, 2000, p.alpha, p.sigma, p.r, rng),
                  precondition_error);
  CHECK_THROWS_AS(laplace_readout(10, 2000, p.alpha, p.sigma, 2, rng),
                  precondition_error);

  double q = std::exp(-p.alpha * p.m0 / (4.0 * p.sigma));
  int failures = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    if (std::abs(sample_laplace(p.sigma, rng)) > p.alpha * p.m0 / 4)
      ++failures;
  double se = std::sqrt(q * (1 - q) / draws);
  CHECK(std::abs(double(failures) / draws - q) <= 3 * se);
}

TEST_CASE("ground-truth expectations for the and function") {
  TestableProgram prog = canonical_program(and_function());
  Mat z = Mat::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  CHECK(observable_expectation(prog, 0, z) == doctest::Approx(1.0));
  CHECK(observable_expectation(prog, 1, z) == doctest::Approx(0.0));
}

TEST_CASE("estimation verifier induces Q = Tr(E Phi(x)) on psi") {
  TestableProgram prog = canonical_program(quarter_function());
  Mat e = Mat::Zero(2, 2);
  e(1, 1) = 1.0;
  MwVerifier v = estimation_verifier(prog, 1, e);
  Mat q = mw_q_matrix(v);
  Mat want = 0.25 * prog.program_state * prog.program_state.adjoint();
  CHECK(max_abs_diff(q, want) < 1e-10);
}

TEST_CASE("trivial effects read out exactly") {
  TestableProgram prog = canonical_program(and_function());
  AttackParams params = derive_params(0.2, 0.1, 4);
  Rng rng(507);
  Mat id = Mat::Identity(2, 2);
  EstimatorResult one =
      estimator_call(prog, 1, id, params, prog.program_state, rng);
  REQUIRE(one.refresh_ok);
  if (one.readout_ok) CHECK(one.estimate == doctest::Approx(1.0));
  EstimatorResult zero = estimator_call(prog, 1, Mat::Zero(2, 2), params,
                                        prog.program_state, rng);
  REQUIRE(zero.refresh_ok);
  if (zero.readout_ok) CHECK(zero.estimate == doctest::Approx(0.0));
}

TEST_CASE("estimator concentrates around the true probability") {
  TestableProgram prog = canonical_program(quarter_function());
  AttackParams params = derive_params(0.2, 0.1, 4);
  Mat e = Mat::Zero(2, 2);
  e(1, 1) = 1.0;
  int good = 0, attempted = 0;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(900 + seed);
    EstimatorResult res =
        estimator_call(prog, 1, e, params, prog.program_state, rng);
    if (!res.refresh_ok || !res.readout_ok) continue;
    ++attempted;
    if (std::abs(res.estimate - 0.25) <= params.alpha) ++good;
  }
  CHECK(attempted >= 45);
  CHECK(good >= attempted - 1);
}

TEST_CASE("multi-observable attack hits every pair within epsilon") {
  TestableProgram prog = canonical_program(and_function());
  Mat z = Mat::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  std::vector<Mat> obs = {z, Mat::Identity(2, 2)};
  std::vector<std::uint64_t> inputs = {0, 1};
  int ok_runs = 0, within = 0, gentle = 0, calls = 0;
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(600 + seed);
    AttackReport rep = multi_observable_attack(prog, inputs, obs, 0.2, 0.1,
                                               rng);
    if (!rep.success) continue;
    ++ok_runs;
    bool all = true;
    for (const auto& call : rep.calls) {
      ++calls;
      if (std::abs(call.estimate - call.truth) > 0.2) all = false;
      if (call.disturbance <= rep.params.tau) ++gentle;
    }
    if (all) ++within;
  }
  CHECK(ok_runs >= 8);
  CHECK(within == ok_runs);
  CHECK(gentle == calls);
}

TEST_CASE("first refresh on an undisturbed program always succeeds") {
  TestableProgram prog = canonical_program(and_function());
  AttackParams params = derive_params(0.2, 0.1, 1);
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(700 + seed);
    EstimatorResult res = estimator_call(prog, 0, Mat::Identity(2, 2), params,
                                         prog.program_state, rng);
    CHECK(res.refresh_ok);
  }
}

TEST_CASE("effect validation") {
  TestableProgram prog = canonical_program(and_function());
  Mat bad = 2.0 * Mat::Identity(2, 2);
  CHECK_THROWS_AS(estimation_verifier(prog, 0, bad), precondition_error);
  Mat skew = Mat::Zero(2, 2);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(estimation_verifier(prog, 0, skew), precondition_error);
}
