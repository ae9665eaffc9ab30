#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otpsim/qsim.hpp"

using namespace otpsim;

namespace {

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat hadamard() {
  Mat m(2, 2);
  double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

}  // namespace

TEST_CASE("bitstring round trip") {
  CHECK(bits_to_string(5, 4) == "0101");
  CHECK(bits_to_string(0, 1) == "0");
  CHECK(bits_from_string("0101") == 5);
  CHECK(bits_from_string("1") == 1);
  for (std::uint64_t v = 0; v < 32; ++v)
    CHECK(bits_from_string(bits_to_string(v, 5)) == v);
}

TEST_CASE("layout offsets and widths") {
  RegisterLayout l({{"A", 2}, {"B", 3}, {"C", 1}});
  CHECK(l.total_width() == 6);
  CHECK(l.offset("A") == 0);
  CHECK(l.offset("B") == 2);
  CHECK(l.offset("C") == 5);
  CHECK(l.width("B") == 3);
  CHECK(l.has("C"));
  CHECK(!l.has("D"));
  CHECK(l.qubits_of("B") == std::vector<int>{2, 3, 4});
  CHECK(l.qubits_of(std::vector<std::string>{"C", "A"}) ==
        std::vector<int>{5, 0, 1});
  CHECK_THROWS_AS(RegisterLayout({{"A", 0}}), sim_error);
  CHECK_THROWS_AS(RegisterLayout({{"A", 1}, {"A", 2}}), sim_error);
  CHECK_THROWS_AS(RegisterLayout({{"A", 23}}), sim_error);
}

TEST_CASE("basis state places registers at the right bits") {
  RegisterLayout l({{"A", 2}, {"B", 3}});
  StateVector s = StateVector::basis(l, {{"A", 2}, {"B", 5}});
  // A=10, B=101 -> index 10101 = 21
  for (int i = 0; i < 32; ++i)
    CHECK(std::abs(s.amps(i) - (i == 21 ? 1.0 : 0.0)) < 1e-15);
}

TEST_CASE("dense apply on a sub-register") {
  RegisterLayout l({{"A", 1}, {"B", 1}});
  StateVector s = StateVector::zero(l);
  s = apply_unitary(s, UnitaryOp::dense(pauli_x()), {"B"});
  CHECK(std::abs(s.amps(1) - 1.0) < 1e-15);
  s = apply_unitary(s, UnitaryOp::dense(pauli_x()), {"A"});
  CHECK(std::abs(s.amps(3) - 1.0) < 1e-15);
}

TEST_CASE("qubit 0 is most significant inside an op") {
  // CNOT as a dense 2-qubit op: control = op qubit 0, target = op qubit 1.
  Mat cnot = Mat::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(3, 2) = cnot(2, 3) = 1;
  RegisterLayout l({{"A", 1}, {"B", 1}});
  StateVector s = StateVector::basis(l, {{"A", 1}});
  s = apply_unitary(s, UnitaryOp::dense(cnot), {"A", "B"});
  CHECK(std::abs(s.amps(3) - 1.0) < 1e-15);
  // Reversed target order: control is B = 0, so nothing happens.
  StateVector t = StateVector::basis(l, {{"A", 1}});
  t = apply_unitary(t, UnitaryOp::dense(cnot), {"B", "A"});
  CHECK(std::abs(t.amps(2) - 1.0) < 1e-15);
}

TEST_CASE("permutation op matches its dense form") {
  Rng rng(7);
  std::vector<std::uint32_t> p = {2, 0, 3, 1};
  UnitaryOp perm = UnitaryOp::permutation(2, p);
  Mat d = perm.to_dense();
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r)
      CHECK(std::abs(d(r, c) - (static_cast<std::uint32_t>(r) == p[c] ? 1.0 : 0.0)) < 1e-15);
  Vec v = random_state(2, rng);
  Vec a = v, b = d * v;
  perm.apply(a, 2, {0, 1});
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  // Adjoint inverts.
  perm.apply(a, 2, {0, 1}, {}, true);
  CHECK((a - v).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(UnitaryOp::permutation(2, {0, 0, 1, 2}), sim_error);
}

TEST_CASE("controlled apply") {
  RegisterLayout l({{"C", 2}, {"T", 1}});
  StateVector s = StateVector::basis(l, {{"C", 2}});
  StateVector hit = controlled_apply(s, "C", "10", UnitaryOp::dense(pauli_x()), {"T"});
  CHECK(std::abs(hit.amps(5) - 1.0) < 1e-15);
  StateVector miss = controlled_apply(s, "C", "11", UnitaryOp::dense(pauli_x()), {"T"});
  CHECK(std::abs(miss.amps(4) - 1.0) < 1e-15);
}

TEST_CASE("gate program with nested sub-op and controls") {
  // Program on 2 qubits: H on qubit 1, then X on qubit 1 controlled on
  // qubit 0 = 1. Compare against the dense composition.
  std::vector<GateStep> steps(2);
  steps[0].mat = std::make_shared<const Mat>(hadamard());
  steps[0].targets = {1};
  steps[1].sub = std::make_shared<const UnitaryOp>(UnitaryOp::dense(pauli_x()));
  steps[1].targets = {1};
  steps[1].controls = {{0, 1}};
  UnitaryOp prog = UnitaryOp::program(2, steps);
  Mat dense = prog.to_dense();
  Mat expect = Mat::Identity(4, 4);
  Mat h4 = Mat::Zero(4, 4);
  h4.block(0, 0, 2, 2) = hadamard();
  h4.block(2, 2, 2, 2) = hadamard();
  Mat cx = Mat::Identity(4, 4);
  cx(2, 2) = cx(3, 3) = 0;
  cx(2, 3) = cx(3, 2) = 1;
  expect = cx * h4;
  CHECK(max_abs_diff(dense, expect) < 1e-12);
  // Adjoint really is the inverse.
  CHECK(max_abs_diff(prog.adjoint().to_dense() * dense, Mat::Identity(4, 4)) < 1e-12);
}

TEST_CASE("guarded program leaves failing states untouched") {
  // Flip qubit 1, but only when qubit 0 = 0 (guard on the local index).
  std::vector<GateStep> steps(1);
  steps[0].mat = std::make_shared<const Mat>(pauli_x());
  steps[0].targets = {1};
  UnitaryOp g = UnitaryOp::program(2, steps,
                                   [](std::uint64_t idx) { return (idx >> 1) == 0; });
  Mat d = g.to_dense();
  Mat expect = Mat::Identity(4, 4);
  expect(0, 0) = expect(1, 1) = 0;
  expect(0, 1) = expect(1, 0) = 1;
  CHECK(max_abs_diff(d, expect) < 1e-12);
  CHECK(max_abs_diff(g.adjoint().to_dense(), expect.adjoint()) < 1e-12);
}

TEST_CASE("reflection about a state flips the flag exactly on it") {
  Rng rng(3);
  Vec psi = random_state(2, rng);
  UnitaryOp r = reflection_about(psi);
  CHECK(r.arity() == 3);
  Mat d = r.to_dense();
  // On |0>|psi>, get |1>|psi>.
  Vec in = Vec::Zero(8);
  in.segment(0, 4) = psi;
  Vec out = d * in;
  CHECK((out.segment(4, 4) - psi).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(out.segment(0, 4).cwiseAbs().maxCoeff() < 1e-12);
  // On |0>|phi> with phi orthogonal to psi, unchanged.
  Vec phi = random_state(2, rng);
  phi -= psi.dot(phi) * psi;
  phi.normalize();
  Vec in2 = Vec::Zero(8);
  in2.segment(0, 4) = phi;
  Vec out2 = d * in2;
  CHECK((out2 - in2).cwiseAbs().maxCoeff() < 1e-12);
  // Involution.
  CHECK(max_abs_diff(d * d, Mat::Identity(8, 8)) < 1e-12);
}

TEST_CASE("branch probabilities and measurement") {
  RegisterLayout l({{"A", 1}, {"B", 1}});
  StateVector s = StateVector::zero(l);
  s = apply_unitary(s, UnitaryOp::dense(hadamard()), {"A"});
  Distribution d = branch_probabilities(s, "A");
  CHECK(d.p.at("0") == doctest::Approx(0.5));
  CHECK(d.p.at("1") == doctest::Approx(0.5));
  Rng rng(11);
  auto [outcome, post, prob] = measure_register(s, "A", rng);
  CHECK(prob == doctest::Approx(0.5));
  CHECK(std::abs(post.amps.norm() - 1.0) < 1e-12);
}

TEST_CASE("partial trace of a product state") {
  RegisterLayout l({{"A", 1}, {"B", 1}});
  StateVector s = StateVector::basis(l, {{"A", 1}});
  s = apply_unitary(s, UnitaryOp::dense(hadamard()), {"B"});
  DensityMatrix rho = partial_trace(s, {"A"});
  CHECK(std::abs(rho.m(1, 1) - 1.0) < 1e-12);
  DensityMatrix sigma = partial_trace(s, {"B"});
  CHECK(std::abs(sigma.m(0, 1) - 0.5) < 1e-12);
}

TEST_CASE("trace distance of orthogonal pure states is 1") {
  Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
  a(0, 0) = 1;
  b(1, 1) = 1;
  CHECK(trace_distance({a}, {b}) == doctest::Approx(1.0));
  CHECK(trace_distance({a}, {a}) == doctest::Approx(0.0));
}

TEST_CASE("hellinger and tv basics") {
  Distribution p{{{"0", 0.5}, {"1", 0.5}}};
  Distribution q{{{"0", 1.0}}};
  CHECK(tv_distance(p, q) == doctest::Approx(0.5));
  CHECK(hellinger_sq(p, q) == doctest::Approx(1.0 - std::sqrt(0.5)));
  CHECK(tv_distance(p, p) == doctest::Approx(0.0));
}

TEST_CASE("random unitary is unitary") {
  Rng rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    Mat u = random_unitary_matrix(4, rng);
    CHECK(max_abs_diff(Mat(u.adjoint() * u), Mat::Identity(4, 4)) < 1e-10);
  }
}

TEST_CASE("adjoint of dense op") {
  Rng rng(1);
  UnitaryOp u = random_unitary(2, rng);
  CHECK(max_abs_diff(Mat(u.adjoint().to_dense() * u.to_dense()),
                     Mat::Identity(4, 4)) < 1e-10);
}
