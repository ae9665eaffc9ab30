#include "otpsim/stateful.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace otpsim {

namespace {

RegisterLayout script_layout(const StatefulProgram& prog, int adversary_width) {
  std::vector<std::pair<std::string, int>> regs;
  if (adversary_width > 0) regs.emplace_back("A", adversary_width);
  regs.emplace_back("Q", prog.query_width);
  if (prog.state_width > 0) regs.emplace_back("R", prog.state_width);
  return RegisterLayout(std::move(regs));
}

std::vector<std::string> query_targets(const StatefulProgram& prog) {
  if (prog.state_width > 0) return {"Q", "R"};
  return {"Q"};
}

}  // namespace

DensityMatrix run_stateful(const StatefulProgram& prog,
                           const QueryScript& script) {
  if (prog.u.arity() != prog.query_width + prog.state_width)
    throw precondition_error("program arity mismatch");
  StateVector state = StateVector::zero(script_layout(prog,
                                                      script.adversary_width));
  state.amps.setZero();
  const std::uint64_t r_dim = 1ull << prog.state_width;
  for (std::uint64_t rv = 0; rv < r_dim; ++rv)
    state.amps[rv] = prog.initial_state(rv);
  auto qr = query_targets(prog);
  for (const auto& step : script.steps) {
    switch (step.kind) {
      case StepKind::local:
        state = apply_unitary(state, step.op, step.targets);
        break;
      case StepKind::forward:
        state = apply_unitary(state, prog.u, qr);
        break;
      case StepKind::inverse:
        state = apply_unitary(state, prog.u.adjoint(), qr);
        break;
    }
  }
  std::vector<std::string> visible;
  if (script.adversary_width > 0) visible.push_back("A");
  visible.push_back("Q");
  return partial_trace(state, visible);
}

double functional_equiv(const StatefulProgram& p1, const StatefulProgram& p2,
                        const std::vector<QueryScript>& scripts) {
  if (p1.query_width != p2.query_width)
    throw precondition_error("query widths differ");
  double worst = 0.0;
  for (const auto& script : scripts)
    worst = std::max(worst, trace_distance(run_stateful(p1, script),
                                           run_stateful(p2, script)));
  return worst;
}

StatefulProgram counting_program(int n) {
  const int arity = 2 * n;
  const std::uint64_t mask = (1ull << n) - 1;
  std::vector<std::uint32_t> perm(1u << arity);
  for (std::uint64_t i = 0; i < perm.size(); ++i) {
    std::uint64_t y = i >> n, s = i & mask;
    s = (s + 1) & mask;
    y ^= s;
    perm[i] = static_cast<std::uint32_t>((y << n) | s);
  }
  StatefulProgram prog;
  prog.query_width = n;
  prog.state_width = n;
  prog.u = UnitaryOp::permutation(arity, std::move(perm));
  prog.initial_state = Vec::Zero(1ll << n);
  prog.initial_state[0] = 1.0;
  return prog;
}

StatefulProgram constant_program(int n, std::uint64_t value) {
  std::vector<std::uint32_t> perm(1u << n);
  for (std::uint64_t i = 0; i < perm.size(); ++i)
    perm[i] = static_cast<std::uint32_t>(i ^ value);
  StatefulProgram prog;
  prog.query_width = n;
  prog.state_width = 0;
  prog.u = UnitaryOp::permutation(n, std::move(perm));
  prog.initial_state = Vec::Ones(1);
  return prog;
}

StatefulProgram random_stateful(int query_width, int state_width, Rng& rng) {
  StatefulProgram prog;
  prog.query_width = query_width;
  prog.state_width = state_width;
  prog.u = random_unitary(query_width + state_width, rng);
  prog.initial_state = random_state(state_width, rng);
  return prog;
}

QueryScript random_stateful_script(int adversary_width, int query_width,
                                   int n_locals, int n_queries, Rng& rng) {
  QueryScript script;
  script.adversary_width = adversary_width;
  std::vector<StatefulStep> queries;
  for (int i = 0; i < n_queries; ++i) {
    StatefulStep step;
    step.kind = (rng() % 2 == 0) ? StepKind::forward : StepKind::inverse;
    queries.push_back(step);
  }
  std::vector<std::string> locals_on;
  if (adversary_width > 0) locals_on.push_back("A");
  locals_on.push_back("Q");
  for (int i = 0; i < n_locals; ++i) {
    StatefulStep step;
    step.kind = StepKind::local;
    step.op = random_unitary(adversary_width + query_width, rng);
    step.targets = locals_on;
    script.steps.push_back(step);
  }
  for (auto& q : queries) {
    std::uint64_t pos = rng() % (script.steps.size() + 1);
    script.steps.insert(script.steps.begin() + pos, q);
  }
  return script;
}

// ---------------------------------------------------------------------------
// QAS

QasKey qas_keygen(int n, int t, Rng& rng) {
  if (t < 1) throw precondition_error("at least one trap required");
  QasKey key;
  key.n = n;
  key.t = t;
  const std::uint64_t mask = (1ull << (n + t)) - 1;
  key.x_mask = rng() & mask;
  key.z_mask = rng() & mask;
  return key;
}

Mat qas_mask_matrix(const QasKey& key) {
  const std::int64_t dim = 1ll << (key.n + key.t);
  Mat m = Mat::Zero(dim, dim);
  for (std::int64_t j = 0; j < dim; ++j) {
    double phase = std::popcount(std::uint64_t(j) & key.z_mask) % 2 ? -1 : 1;
    m(j ^ key.x_mask, j) = phase;
  }
  return m;
}

Vec qas_enc(const QasKey& key, const Vec& psi) {
  if (psi.size() != (1ll << key.n))
    throw precondition_error("state width mismatch");
  Vec out = Vec::Zero(1ll << (key.n + key.t));
  for (std::int64_t d = 0; d < psi.size(); ++d) {
    std::uint64_t j = std::uint64_t(d) << key.t;  // traps at the low bits
    double phase = std::popcount(j & key.z_mask) % 2 ? -1 : 1;
    out[j ^ key.x_mask] += phase * psi(d);
  }
  return out;
}

double qas_ver_prob(const QasKey& key, const Vec& enc) {
  if (enc.size() != (1ll << (key.n + key.t)))
    throw precondition_error("encoded width mismatch");
  const std::uint64_t trap_mask = (1ull << key.t) - 1;
  double accept = 0.0;
  for (std::int64_t i = 0; i < enc.size(); ++i)
    if (((std::uint64_t(i) ^ key.x_mask) & trap_mask) == 0)
      accept += std::norm(enc(i));
  return accept;
}

QasDecResult qas_dec(const QasKey& key, const Vec& enc, Rng& rng) {
  double accept = qas_ver_prob(key, enc);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  QasDecResult res;
  res.accept = unif(rng) < accept;
  if (!res.accept) return res;
  res.state = Vec::Zero(1ll << key.n);
  for (std::int64_t d = 0; d < res.state.size(); ++d) {
    std::uint64_t j = std::uint64_t(d) << key.t;
    double phase = std::popcount(j & key.z_mask) % 2 ? -1 : 1;
    res.state[d] = phase * enc(j ^ key.x_mask);
  }
  res.state /= std::sqrt(accept);
  return res;
}

QasKey qas_key_update(const QasKey& key, std::uint64_t dx, std::uint64_t dz) {
  QasKey out = key;
  out.x_mask ^= dx;
  out.z_mask ^= dz;
  return out;
}

// ---------------------------------------------------------------------------
// Obfuscation

StatefulProgram stateful_obfuscate(const StatefulProgram& prog, int traps,
                                   Rng& rng) {
  const int q = prog.query_width, n = prog.state_width, t = traps;
  if (q + n + t > kMaxQubits) throw precondition_error("program too wide");
  QasKey key = qas_keygen(n, t, rng);

  auto mask = std::make_shared<const Mat>(qas_mask_matrix(key));
  auto unmask = std::make_shared<const Mat>(mask->adjoint());
  std::vector<int> hidden_targets;
  for (int i = 0; i < n + t; ++i) hidden_targets.push_back(q + i);

  std::vector<int> u_targets;
  for (int i = 0; i < q + n; ++i) u_targets.push_back(i);
  std::vector<Ctrl> trap_zero;
  for (int i = 0; i < t; ++i) trap_zero.push_back({q + n + i, 0});

  std::vector<GateStep> steps;
  steps.push_back({unmask, nullptr, nullptr, false, hidden_targets, {}});
  steps.push_back({nullptr, nullptr, std::make_shared<UnitaryOp>(prog.u),
                   false, u_targets, trap_zero});
  steps.push_back({mask, nullptr, nullptr, false, hidden_targets, {}});

  StatefulProgram out;
  out.query_width = q;
  out.state_width = n + t;
  out.u = UnitaryOp::program(q + n + t, std::move(steps));
  out.initial_state = qas_enc(key, prog.initial_state);
  return out;
}

}  // namespace otpsim
