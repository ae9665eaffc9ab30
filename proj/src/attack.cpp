#include "otpsim/attack.hpp"

#include <algorithm>
#include <cmath>

namespace otpsim {

namespace {

std::vector<int> all_qubits(int n) {
  std::vector<int> q(n);
  for (int i = 0; i < n; ++i) q[i] = i;
  return q;
}

// Projective measurement of a predicate over basis indices; renormalizes and
// returns the sampled outcome.
int measure_predicate(Vec& amps, const std::function<bool(std::uint64_t)>& in_1,
                      Rng& rng) {
  double p1 = 0.0;
  for (std::uint64_t i = 0; i < std::uint64_t(amps.size()); ++i)
    if (in_1(i)) p1 += std::norm(amps[i]);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int outcome = unif(rng) < p1 ? 1 : 0;
  double keep = outcome ? p1 : 1.0 - p1;
  if (keep <= 0.0) throw sim_error("measured a zero-probability branch");
  double scale = 1.0 / std::sqrt(keep);
  for (std::uint64_t i = 0; i < std::uint64_t(amps.size()); ++i) {
    if ((in_1(i) ? 1 : 0) == outcome)
      amps[i] *= scale;
    else
      amps[i] = 0.0;
  }
  return outcome;
}

struct MwState {
  Vec amps;
  int total = 0;
  std::uint64_t flag_bit = 0;   // mask of the accept flag
  std::uint64_t anc_mask = 0;   // mask of all ancilla bits
};

MwState mw_init(const MwVerifier& v, const Vec& witness) {
  const int w = v.witness_width, k = v.ancilla_width;
  if (witness.size() != (1ll << w))
    throw precondition_error("witness width mismatch");
  if (v.a.arity() != w + k) throw precondition_error("verifier arity mismatch");
  MwState st;
  st.total = w + k;
  st.amps = Vec::Zero(1ll << st.total);
  for (std::uint64_t i = 0; i < std::uint64_t(witness.size()); ++i)
    st.amps[i << k] = witness(i);
  st.flag_bit = 1ull << (st.total - 1 - v.flag_qubit);
  st.anc_mask = (1ull << k) - 1;
  return st;
}

int gamma_measure(const MwVerifier& v, MwState& st, Rng& rng) {
  v.a.apply(st.amps, st.total, all_qubits(st.total));
  int b = measure_predicate(
      st.amps, [&](std::uint64_t i) { return (i & st.flag_bit) != 0; }, rng);
  v.a.apply(st.amps, st.total, all_qubits(st.total), {}, true);
  return b;
}

int delta_measure(MwState& st, Rng& rng) {
  return measure_predicate(
      st.amps, [&](std::uint64_t i) { return (i & st.anc_mask) == 0; }, rng);
}

Mat mat_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(m);
  Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0);
  return solver.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
         solver.eigenvectors().adjoint();
}

void check_effect(const Mat& effect) {
  if (effect.rows() != effect.cols())
    throw precondition_error("effect not square");
  if (max_abs_diff(effect, effect.adjoint()) > 1e-10)
    throw precondition_error("effect not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> solver(effect);
  if (solver.eigenvalues().minCoeff() < -1e-10 ||
      solver.eigenvalues().maxCoeff() > 1.0 + 1e-10)
    throw precondition_error("effect eigenvalues outside [0, 1]");
}

}  // namespace

Mat mw_q_matrix(const MwVerifier& v) {
  const int w = v.witness_width, k = v.ancilla_width;
  if (w + k > 12) throw precondition_error("verifier too wide for dense Q");
  const std::int64_t wd = 1ll << w, kd = 1ll << k;
  const std::uint64_t flag_bit = 1ull << (w + k - 1 - v.flag_qubit);
  Mat q(wd, wd);
  for (std::int64_t c = 0; c < wd; ++c) {
    Vec amps = Vec::Zero(wd * kd);
    amps[std::uint64_t(c) << k] = 1.0;
    v.a.apply(amps, w + k, all_qubits(w + k));
    for (std::int64_t i = 0; i < wd * kd; ++i)
      if ((std::uint64_t(i) & flag_bit) == 0) amps[i] = 0.0;
    v.a.apply(amps, w + k, all_qubits(w + k), {}, true);
    for (std::int64_t r = 0; r < wd; ++r) q(r, c) = amps[std::uint64_t(r) << k];
  }
  return q;
}

MwRun mw_rounds(const MwVerifier& v, const Vec& witness, int n_rounds,
                Rng& rng, bool restore) {
  MwState st = mw_init(v, witness);
  MwRun run;
  int prev = 1;
  bool last_was_delta_1 = false;
  for (int i = 0; i < n_rounds; ++i) {
    int b = (i % 2 == 0) ? gamma_measure(v, st, rng) : delta_measure(st, rng);
    run.bits.push_back(b == prev ? 1 : 0);
    last_was_delta_1 = (i % 2 == 1) && b == 1;
    prev = b;
  }
  if (restore) {
    bool next_is_delta = (n_rounds % 2 == 1);
    while (!last_was_delta_1) {
      if (run.extra_rounds++ > 500)
        throw sim_error("restoration did not converge");
      if (next_is_delta)
        last_was_delta_1 = delta_measure(st, rng) == 1;
      else
        gamma_measure(v, st, rng);
      next_is_delta = !next_is_delta;
    }
    run.restored = true;
    run.final_state = Vec::Zero(1ll << v.witness_width);
    for (std::int64_t i = 0; i < run.final_state.size(); ++i)
      run.final_state[i] = st.amps[std::uint64_t(i) << v.ancilla_width];
  }
  return run;
}

namespace {

void enumerate_branches(const MwVerifier& v, const Vec& amps, int round,
                        int n_rounds, int prev, double prob, std::string z,
                        std::map<std::string, double>& out) {
  if (prob <= 1e-15) return;
  if (round == n_rounds) {
    out[z] += prob;
    return;
  }
  const int total = v.witness_width + v.ancilla_width;
  const std::uint64_t flag_bit = 1ull << (total - 1 - v.flag_qubit);
  const std::uint64_t anc_mask = (1ull << v.ancilla_width) - 1;
  const bool gamma = (round % 2 == 0);
  Vec work = amps;
  if (gamma) v.a.apply(work, total, all_qubits(total));
  for (int b = 0; b < 2; ++b) {
    Vec branch = work;
    double p = 0.0;
    for (std::uint64_t i = 0; i < std::uint64_t(branch.size()); ++i) {
      bool in_1 = gamma ? (i & flag_bit) != 0 : (i & anc_mask) == 0;
      if ((in_1 ? 1 : 0) == b)
        p += std::norm(branch[i]);
      else
        branch[i] = 0.0;
    }
    if (p <= 1e-15) continue;
    branch /= std::sqrt(p);
    if (gamma) v.a.apply(branch, total, all_qubits(total), {}, true);
    enumerate_branches(v, branch, round + 1, n_rounds, b, prob * p,
                       z + (b == prev ? '1' : '0'), out);
  }
}

}  // namespace

std::map<std::string, double> mw_branch_distribution(const MwVerifier& v,
                                                     const Vec& witness,
                                                     int n_rounds) {
  if (n_rounds > 10) throw precondition_error("branch tree too deep");
  MwState st = mw_init(v, witness);
  std::map<std::string, double> out;
  enumerate_branches(v, st.amps, 0, n_rounds, 1, 1.0, "", out);
  return out;
}

AttackParams derive_params(double epsilon, double delta, int n_calls, int m0) {
  if (epsilon <= 0 || epsilon >= 1 || delta <= 0 || delta >= 1)
    throw precondition_error("epsilon and delta must lie in (0, 1)");
  if (n_calls < 1 || m0 < 1) throw precondition_error("counts must be positive");
  AttackParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.n_calls = n_calls;
  p.m0 = m0;
  p.alpha = epsilon / 4.0;
  p.beta = delta / (2.0 * n_calls);
  p.tau = delta / (2.0 * n_calls);
  p.sigma = p.alpha * m0 / (4.0 * std::log(3.0 / p.beta));
  p.r = static_cast<int>(std::ceil(std::log2(4.0 / p.alpha)));
  return p;
}

double sample_laplace(double sigma, Rng& rng) {
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  double u = unif(rng);
  return -sigma * (u < 0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(u));
}

std::optional<double> laplace_readout(int s, int m0, double alpha,
                                      double sigma, int r, Rng& rng) {
  if (s < 0 || s > m0) throw precondition_error("count out of range");
  if (std::ldexp(1.0, -r) > alpha / 4.0 + 1e-15)
    throw precondition_error("grid coarser than alpha/4");
  double eta = sample_laplace(sigma, rng);
  if (std::abs(eta) > alpha * m0 / 4.0) return std::nullopt;
  double v = std::clamp((s + eta) / m0, 0.0, 1.0);
  return std::round(std::ldexp(v, r)) * std::ldexp(1.0, -r);
}

double observable_expectation(const TestableProgram& prog, std::uint64_t x,
                              const Mat& obs) {
  std::vector<std::pair<std::string, int>> regs;
  if (prog.in_width > 0) regs.emplace_back("X", prog.in_width);
  regs.emplace_back("Y", prog.out_width);
  if (prog.p_width > 0) regs.emplace_back("P", prog.p_width);
  StateVector state = StateVector::zero(RegisterLayout(std::move(regs)));
  state.amps.setZero();
  const std::uint64_t p_dim = 1ull << prog.p_width;
  const std::uint64_t base = (prog.in_width > 0 ? x : 0)
                             << (prog.out_width + prog.p_width);
  for (std::uint64_t pv = 0; pv < p_dim; ++pv)
    state.amps[base | pv] = prog.program_state(pv);
  std::vector<std::string> targets;
  if (prog.in_width > 0) targets.push_back("X");
  targets.push_back("Y");
  if (prog.p_width > 0) targets.push_back("P");
  state = apply_unitary(state, prog.eval, targets);
  DensityMatrix rho = partial_trace(state, {"Y"});
  return (obs * rho.m).trace().real();
}

MwVerifier estimation_verifier(const TestableProgram& prog, std::uint64_t x,
                               const Mat& effect) {
  check_effect(effect);
  const int p = prog.p_width, in = prog.in_width, out = prog.out_width;
  if (p < 1) throw precondition_error("program register required");
  if (effect.rows() != (1ll << out))
    throw precondition_error("effect dimension mismatch");
  // Op-local layout: P [0, p), psi-flag p, X [p+1, p+1+in), Y, effect flag.
  const int fpsi = p;
  const int x0 = p + 1, y0 = x0 + in, feff = y0 + out;
  const int arity = feff + 1;

  std::vector<GateStep> steps;
  std::vector<int> refl_targets = {fpsi};
  for (int i = 0; i < p; ++i) refl_targets.push_back(i);
  steps.push_back({nullptr, nullptr,
                   std::make_shared<UnitaryOp>(prog.reflection), false,
                   refl_targets, {}});

  auto x_flip = std::make_shared<const std::vector<std::uint32_t>>(
      std::vector<std::uint32_t>{1, 0});
  auto add_set_x = [&] {
    for (int i = 0; i < in; ++i)
      if ((x >> (in - 1 - i)) & 1)
        steps.push_back(
            {nullptr, x_flip, nullptr, false, {x0 + i}, {{fpsi, 1}}});
  };
  add_set_x();

  std::vector<int> eval_targets;
  for (int i = 0; i < in; ++i) eval_targets.push_back(x0 + i);
  for (int i = 0; i < out; ++i) eval_targets.push_back(y0 + i);
  for (int i = 0; i < p; ++i) eval_targets.push_back(i);
  auto eval = std::make_shared<UnitaryOp>(prog.eval);
  steps.push_back({nullptr, nullptr, eval, false, eval_targets, {{fpsi, 1}}});

  Mat sq = mat_sqrt(effect);
  Mat sqc = mat_sqrt(Mat::Identity(effect.rows(), effect.cols()) - effect);
  const std::int64_t d = effect.rows();
  Mat naimark(2 * d, 2 * d);
  naimark.topLeftCorner(d, d) = sqc;
  naimark.topRightCorner(d, d) = sq;
  naimark.bottomLeftCorner(d, d) = sq;
  naimark.bottomRightCorner(d, d) = -sqc;
  std::vector<int> ntargets = {feff};
  for (int i = 0; i < out; ++i) ntargets.push_back(y0 + i);
  steps.push_back({std::make_shared<const Mat>(std::move(naimark)), nullptr,
                   nullptr, false, ntargets, {{fpsi, 1}}});

  steps.push_back({nullptr, nullptr, eval, true, eval_targets, {{fpsi, 1}}});
  add_set_x();

  MwVerifier v;
  v.a = UnitaryOp::program(arity, std::move(steps));
  v.witness_width = p;
  v.ancilla_width = arity - p;
  v.flag_qubit = feff;
  return v;
}

EstimatorResult estimator_call(const TestableProgram& prog, std::uint64_t x,
                               const Mat& effect, const AttackParams& params,
                               const Vec& state_in, Rng& rng) {
  const int p = prog.p_width;
  if (p < 1) throw precondition_error("program register required");
  EstimatorResult res;

  // Refresh: measure {Pi_psi, I - Pi_psi} through the reflection.
  Vec joint = Vec::Zero(2ll << p);
  for (std::int64_t i = 0; i < state_in.size(); ++i) joint[i] = state_in(i);
  prog.reflection.apply(joint, p + 1, all_qubits(p + 1));
  const std::uint64_t half = 1ull << p;
  int outcome = measure_predicate(
      joint, [&](std::uint64_t i) { return i >= half; }, rng);
  if (outcome == 0) {
    prog.reflection.apply(joint, p + 1, all_qubits(p + 1), {}, true);
    res.post_state = Vec::Zero(half);
    for (std::uint64_t i = 0; i < half; ++i) res.post_state[i] = joint[i];
    return res;
  }
  res.refresh_ok = true;

  MwVerifier verifier = estimation_verifier(prog, x, effect);
  MwRun run = mw_rounds(verifier, prog.program_state, params.m0, rng, true);
  res.post_state = run.final_state;
  int s = 0;
  for (int b : run.bits) s += b;
  res.s_count = s;
  auto value =
      laplace_readout(s, params.m0, params.alpha, params.sigma, params.r, rng);
  if (value) {
    res.readout_ok = true;
    res.estimate = *value;
  }
  return res;
}

AttackReport multi_observable_attack(const TestableProgram& prog,
                                     const std::vector<std::uint64_t>& inputs,
                                     const std::vector<Mat>& observables,
                                     double epsilon, double delta, Rng& rng) {
  const int t = static_cast<int>(observables.size());
  const int n = static_cast<int>(inputs.size());
  if (t < 1 || n < 1) throw precondition_error("empty attack");
  AttackReport report;
  report.params = derive_params(epsilon, delta, t * n);
  report.mu_hat.assign(t, std::vector<double>(n, 0.0));
  report.success = true;

  const Mat identity =
      Mat::Identity(1ll << prog.out_width, 1ll << prog.out_width);
  Vec state = prog.program_state;
  for (int i = 0; i < t; ++i) {
    Mat effect = 0.5 * (identity + observables[i]);
    for (int j = 0; j < n; ++j) {
      EstimatorResult call =
          estimator_call(prog, inputs[j], effect, report.params, state, rng);
      state = call.post_state;
      AttackCallRecord rec;
      rec.i = i;
      rec.j = j;
      rec.refresh_ok = call.refresh_ok;
      rec.readout_ok = call.readout_ok;
      rec.truth = observable_expectation(prog, inputs[j], observables[i]);
      if (call.refresh_ok && call.readout_ok) {
        rec.estimate = 2.0 * call.estimate - 1.0;
        report.mu_hat[i][j] = rec.estimate;
      } else {
        report.success = false;
      }
      cxd overlap = prog.program_state.dot(state);
      double fidelity = std::min(1.0, std::norm(overlap));
      rec.disturbance = std::sqrt(1.0 - fidelity);
      report.calls.push_back(rec);
    }
  }
  return report;
}

}  // namespace otpsim
