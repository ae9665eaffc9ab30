#pragma once

// Marriott-Watrous empirical estimation, Laplace-noised gentle readout, and
// the multi-observable estimation attack against testable programs.

#include "otpsim/channels.hpp"

namespace otpsim {

// ---------------------------------------------------------------------------
// Marriott-Watrous verifier and alternating measurement

// A verifier circuit on (witness, ancilla); the accept projector is the
// designated flag qubit (op-local index) being 1. The induced observable is
// Q = (I (x) <0^k|) A^dag Pi_1 A (I (x) |0^k>).
struct MwVerifier {
  UnitaryOp a;
  int witness_width = 0;
  int ancilla_width = 0;
  int flag_qubit = 0;
};

Mat mw_q_matrix(const MwVerifier& v);

struct MwRun {
  std::vector<int> bits;  // one per round
  Vec final_state;        // on witness qubits; valid when restored
  int extra_rounds = 0;
  bool restored = false;
};

// Alternates the Pi_1 measurement (A, measure flag, A^dag) with the
// return-to-|0^k> measurement, starting from witness (x) |0^k>. Round i
// emits z_i = [outcome_i == outcome_{i-1}] with outcome_0 = 1; on an
// eigenvalue-p eigenvector of Q the bits are i.i.d. Bernoulli(p). With
// restore set, keeps measuring after the rounds until the ancilla returns
// to |0^k> and extracts the witness register.
MwRun mw_rounds(const MwVerifier& v, const Vec& witness, int n_rounds,
                Rng& rng, bool restore = false);

// Exact joint distribution of (z_1, ..., z_n) by branch enumeration; keys
// are bitstrings z_1...z_n.
std::map<std::string, double> mw_branch_distribution(const MwVerifier& v,
                                                     const Vec& witness,
                                                     int n_rounds);

// ---------------------------------------------------------------------------
// Parameters and the gentle readout

struct AttackParams {
  double alpha = 0.0;
  double beta = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  int m0 = 0;
  int n_calls = 0;
  double sigma = 0.0;
  int r = 0;  // estimates land on the grid of multiples of 2^-r
};

// alpha = eps/4, beta = tau = delta/(2N), sigma = alpha m0 / (4 ln(3/beta)),
// r minimal with 2^-r <= alpha/4.
AttackParams derive_params(double epsilon, double delta, int n_calls,
                           int m0 = 2000);

double sample_laplace(double sigma, Rng& rng);

// Adds Lap(sigma) noise to the count S; fails iff |eta| > alpha m0 / 4,
// otherwise clips (S + eta) / m0 to [0, 1] and rounds to the 2^-r grid.
std::optional<double> laplace_readout(int s, int m0, double alpha,
                                      double sigma, int r, Rng& rng);

// ---------------------------------------------------------------------------
// The estimator and the attack

// Exact Tr(O Phi(x)) on the program's output register.
double observable_expectation(const TestableProgram& prog, std::uint64_t x,
                              const Mat& obs);

// The verifier A_{i,j}: reflection-check of the program state, set input to
// x, Eval, Naimark two-outcome test for the effect on the output register,
// un-Eval, unset input. Accepts on the effect flag.
MwVerifier estimation_verifier(const TestableProgram& prog, std::uint64_t x,
                               const Mat& effect);

struct EstimatorResult {
  bool refresh_ok = false;
  bool readout_ok = false;
  double estimate = 0.0;  // on the 2^-r grid, valid when readout_ok
  int s_count = 0;
  Vec post_state;  // program register state after the call
};

// Refresh via the reflection, m0 Marriott-Watrous rounds against the
// estimation verifier, gentle readout, then restoration of the program
// state.
EstimatorResult estimator_call(const TestableProgram& prog, std::uint64_t x,
                               const Mat& effect, const AttackParams& params,
                               const Vec& state_in, Rng& rng);

struct AttackCallRecord {
  int i = 0;
  int j = 0;
  bool refresh_ok = false;
  bool readout_ok = false;
  double estimate = 0.0;  // mu scale
  double truth = 0.0;
  double disturbance = 0.0;  // trace distance to |psi><psi| after the call
};

struct AttackReport {
  bool success = false;
  std::vector<std::vector<double>> mu_hat;
  std::vector<AttackCallRecord> calls;
  AttackParams params;
};

// Estimates mu_{i,j} = Tr(O_i Phi(x_j)) for every observable/input pair
// from one program copy, reusing the (possibly disturbed) program state
// between calls.
AttackReport multi_observable_attack(const TestableProgram& prog,
                                     const std::vector<std::uint64_t>& inputs,
                                     const std::vector<Mat>& observables,
                                     double epsilon, double delta, Rng& rng);

}  // namespace otpsim
