#include "otpsim/seq.hpp"

#include <algorithm>

namespace otpsim {

DensityMatrix run_oracle_script(const OracleSpec& spec,
                                const AdversaryScript& script) {
  std::vector<std::pair<std::string, int>> regs = spec.visible;
  regs.insert(regs.end(), spec.hidden.begin(), spec.hidden.end());
  RegisterLayout layout(regs);
  int hidden_width = 0;
  for (const auto& [name, w] : spec.hidden) hidden_width += w;
  StateVector joint = StateVector::zero(layout);
  joint.amps.setZero();
  joint.amps.segment(0, 1ll << hidden_width) = spec.hidden_init;
  for (const ScriptStep& step : script) {
    if (step.is_query) {
      joint = spec.query(joint);
    } else {
      joint = apply_unitary(joint, step.local, step.targets);
    }
  }
  std::vector<std::string> keep;
  for (const auto& [name, w] : spec.visible) keep.push_back(name);
  return partial_trace(joint, keep);
}

SeqOracle SeqOracle::canonical(const ChannelDilation& ch) {
  SeqOracle o;
  o.query_width = ch.query_width;
  o.p_width = ch.ancilla_width;
  o.eval = ch.u;
  Vec zero_state = Vec::Zero(1ll << ch.ancilla_width);
  zero_state(0) = 1.0;
  o.reflection = reflection_about(zero_state);
  o.hidden_init = Vec::Zero(1ll << (ch.ancilla_width + 1));
  o.hidden_init(0) = 1.0;
  return o;
}

SeqOracle SeqOracle::sim_prime(const TestableProgram& prog, int query_width) {
  if (prog.in_width + prog.out_width != query_width)
    throw sim_error("sim_prime: query width mismatch");
  SeqOracle o;
  o.query_width = query_width;
  o.p_width = prog.p_width;
  o.eval = prog.eval;
  o.reflection = prog.reflection;
  o.hidden_init = Vec::Zero(1ll << (prog.p_width + 1));
  for (std::int64_t p = 0; p < prog.program_state.size(); ++p)
    o.hidden_init(p << 1) = prog.program_state(p);
  return o;
}

StateVector seq_query(const SeqOracle& oracle, StateVector joint,
                      const std::vector<std::string>& qregs,
                      const std::string& preg, const std::string& creg) {
  std::vector<std::string> eval_targets = qregs;
  if (oracle.p_width > 0) eval_targets.push_back(preg);
  std::vector<std::string> refl_targets = {creg};
  if (oracle.p_width > 0) refl_targets.push_back(preg);
  UnitaryOp eval_adj = oracle.eval.adjoint();
  joint = controlled_apply(joint, creg, "1", eval_adj, eval_targets);
  joint = apply_unitary(joint, oracle.reflection, refl_targets);
  joint = controlled_apply(joint, creg, "1", oracle.eval, eval_targets);
  return joint;
}

UnitaryOp build_seq_matrix(const ChannelDilation& ch) {
  SeqOracle o = SeqOracle::canonical(ch);
  const int q = ch.query_width;
  const int p = ch.ancilla_width;
  const int total = q + p + 1;
  std::vector<int> eval_targets;
  for (int i = 0; i < q + p; ++i) eval_targets.push_back(i);
  std::vector<int> refl_targets = {q + p};
  for (int i = 0; i < p; ++i) refl_targets.push_back(q + i);
  std::vector<GateStep> steps(3);
  steps[0].sub = std::make_shared<const UnitaryOp>(o.eval);
  steps[0].sub_adjoint = true;
  steps[0].targets = eval_targets;
  steps[0].controls = {{q + p, 1}};
  steps[1].sub = std::make_shared<const UnitaryOp>(o.reflection);
  steps[1].targets = refl_targets;
  steps[2].sub = std::make_shared<const UnitaryOp>(o.eval);
  steps[2].targets = eval_targets;
  steps[2].controls = {{q + p, 1}};
  return UnitaryOp::program(total, std::move(steps));
}

OracleSpec oracle_spec(const SeqOracle& oracle, int adversary_width) {
  OracleSpec spec;
  if (adversary_width > 0) spec.visible.emplace_back("A", adversary_width);
  spec.visible.emplace_back("Q", oracle.query_width);
  if (oracle.p_width > 0) spec.hidden.emplace_back("P", oracle.p_width);
  spec.hidden.emplace_back("C", 1);
  spec.hidden_init = oracle.hidden_init;
  spec.query = [oracle](const StateVector& joint) {
    return seq_query(oracle, joint, {"Q"}, "P", "C");
  };
  return spec;
}

DensityMatrix run_script(const SeqOracle& oracle, int adversary_width,
                         const AdversaryScript& script) {
  return run_oracle_script(oracle_spec(oracle, adversary_width), script);
}

double check_dilation_hiding(const ChannelDilation& a,
                             const ChannelDilation& b, int adversary_width,
                             const std::vector<AdversaryScript>& scripts) {
  if (choi_max_diff(choi_of(a), choi_of(b)) > 1e-9)
    throw precondition_error("check_dilation_hiding: dilations present "
                             "different channels");
  SeqOracle oa = SeqOracle::canonical(a);
  SeqOracle ob = SeqOracle::canonical(b);
  double worst = 0.0;
  for (const AdversaryScript& s : scripts) {
    double d = trace_distance(run_script(oa, adversary_width, s),
                              run_script(ob, adversary_width, s));
    worst = std::max(worst, d);
  }
  return worst;
}

double check_sim_prime(const ChannelDilation& ch, const TestableProgram& prog,
                       int adversary_width,
                       const std::vector<AdversaryScript>& scripts) {
  if (choi_max_diff(choi_of(ch), choi_of_program(prog)) > 1e-9)
    throw precondition_error("check_sim_prime: program presents a different "
                             "channel");
  SeqOracle oracle = SeqOracle::canonical(ch);
  SeqOracle sim = SeqOracle::sim_prime(prog, ch.query_width);
  double worst = 0.0;
  for (const AdversaryScript& s : scripts) {
    double d = trace_distance(run_script(oracle, adversary_width, s),
                              run_script(sim, adversary_width, s));
    worst = std::max(worst, d);
  }
  return worst;
}

AdversaryScript random_script(int adversary_width, int query_width,
                              int n_locals, int n_queries, Rng& rng) {
  std::vector<std::string> local_targets;
  if (adversary_width > 0) local_targets.push_back("A");
  local_targets.push_back("Q");
  AdversaryScript script;
  for (int i = 0; i < n_locals; ++i) {
    ScriptStep step;
    step.local = random_unitary(adversary_width + query_width, rng);
    step.targets = local_targets;
    script.push_back(std::move(step));
  }
  for (int i = 0; i < n_queries; ++i) {
    ScriptStep step;
    step.is_query = true;
    script.push_back(std::move(step));
  }
  std::shuffle(script.begin(), script.end(), rng);
  return script;
}

}  // namespace otpsim
