#include "otpsim/channels.hpp"

#include <cmath>

namespace otpsim {

namespace {

RegisterLayout layout_q_anc(int q, int m) {
  std::vector<std::pair<std::string, int>> regs;
  regs.emplace_back("Q", q);
  if (m > 0) regs.emplace_back("P", m);
  return RegisterLayout(std::move(regs));
}

}  // namespace

DensityMatrix apply_channel(const ChannelDilation& ch,
                            const DensityMatrix& input) {
  const std::int64_t d = 1ll << ch.query_width;
  if (input.dim() != d) throw sim_error("apply_channel: dimension mismatch");
  Mat herm = 0.5 * (input.m + Mat(input.m.adjoint()));
  Eigen::SelfAdjointEigenSolver<Mat> es(herm);
  RegisterLayout layout = layout_q_anc(ch.query_width, ch.ancilla_width);
  std::vector<std::string> targets = {"Q"};
  if (ch.ancilla_width > 0) targets.push_back("P");
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double w = es.eigenvalues()(i);
    if (w < 1e-14) continue;
    StateVector s = StateVector::zero(layout);
    s.amps.setZero();
    // Embed the eigenvector on Q with ancilla |0...0>.
    const std::int64_t anc = 1ll << ch.ancilla_width;
    for (std::int64_t q = 0; q < d; ++q) s.amps(q * anc) = es.eigenvectors()(q, i);
    s = apply_unitary(s, ch.u, targets);
    out += w * partial_trace(s, {"Q"}).m;
  }
  return DensityMatrix{std::move(out)};
}

ChoiState choi_of(const ChannelDilation& ch) {
  if (ch.query_width > 5) throw sim_error("choi_of: query width cap exceeded");
  const int q = ch.query_width;
  const std::int64_t d = 1ll << q;
  std::vector<std::pair<std::string, int>> regs = {{"ref", q}, {"Q", q}};
  if (ch.ancilla_width > 0) regs.emplace_back("P", ch.ancilla_width);
  RegisterLayout layout(std::move(regs));
  StateVector s = StateVector::zero(layout);
  s.amps.setZero();
  const std::int64_t anc = 1ll << ch.ancilla_width;
  for (std::int64_t i = 0; i < d; ++i) {
    // |i>_ref |i>_Q |0>_P
    s.amps(((i << q) | i) * anc) = 1.0 / std::sqrt(static_cast<double>(d));
  }
  std::vector<std::string> targets = {"Q"};
  if (ch.ancilla_width > 0) targets.push_back("P");
  s = apply_unitary(s, ch.u, targets);
  ChoiState out;
  out.query_width = q;
  out.m = partial_trace(s, {"ref", "Q"});
  return out;
}

ChoiState choi_of_program(const TestableProgram& prog) {
  const int q = prog.in_width + prog.out_width;
  if (q > 5) throw sim_error("choi_of_program: query width cap exceeded");
  const std::int64_t d = 1ll << q;
  std::vector<std::pair<std::string, int>> regs = {{"ref", q}, {"Q", q}};
  if (prog.p_width > 0) regs.emplace_back("P", prog.p_width);
  RegisterLayout layout(std::move(regs));
  StateVector s = StateVector::zero(layout);
  s.amps.setZero();
  const std::int64_t pd = 1ll << prog.p_width;
  for (std::int64_t i = 0; i < d; ++i) {
    for (std::int64_t p = 0; p < pd; ++p) {
      s.amps((((i << q) | i) << prog.p_width) | p) =
          prog.program_state(p) / std::sqrt(static_cast<double>(d));
    }
  }
  std::vector<std::string> targets = {"Q"};
  if (prog.p_width > 0) targets.push_back("P");
  s = apply_unitary(s, prog.eval, targets);
  ChoiState out;
  out.query_width = q;
  out.m = partial_trace(s, {"ref", "Q"});
  return out;
}

double choi_max_diff(const ChoiState& a, const ChoiState& b) {
  if (a.query_width != b.query_width)
    throw sim_error("choi_max_diff: width mismatch");
  return max_abs_diff(a.m.m, b.m.m);
}

TestableProgram testable_from_dilation(const ChannelDilation& ch, int in_width,
                                       int out_width) {
  if (in_width + out_width != ch.query_width)
    throw sim_error("testable_from_dilation: query split mismatch");
  TestableProgram p;
  p.in_width = in_width;
  p.out_width = out_width;
  p.p_width = ch.ancilla_width;
  p.program_state = Vec::Zero(1ll << ch.ancilla_width);
  p.program_state(0) = 1.0;
  p.eval = ch.u;
  p.reflection = reflection_about(p.program_state);
  return p;
}

ChannelDilation twirl_dilation(const ChannelDilation& ch, const UnitaryOp& v) {
  if (v.arity() != ch.ancilla_width)
    throw sim_error("twirl_dilation: arity mismatch");
  const int total = ch.query_width + ch.ancilla_width;
  std::vector<GateStep> steps;
  GateStep u_step;
  u_step.sub = std::make_shared<const UnitaryOp>(ch.u);
  for (int i = 0; i < total; ++i) u_step.targets.push_back(i);
  steps.push_back(std::move(u_step));
  GateStep v_step;
  v_step.sub = std::make_shared<const UnitaryOp>(v);
  for (int i = 0; i < ch.ancilla_width; ++i)
    v_step.targets.push_back(ch.query_width + i);
  steps.push_back(std::move(v_step));
  ChannelDilation out;
  out.query_width = ch.query_width;
  out.ancilla_width = ch.ancilla_width;
  out.u = UnitaryOp::program(total, std::move(steps));
  return out;
}

Distribution sampling_program_output(const TestableProgram& prog,
                                     const std::string& x) {
  if (static_cast<int>(x.size()) != prog.in_width)
    throw sim_error("sampling_program_output: input width mismatch");
  std::vector<std::pair<std::string, int>> regs;
  if (prog.in_width > 0) regs.emplace_back("X", prog.in_width);
  regs.emplace_back("Y", prog.out_width);
  if (prog.p_width > 0) regs.emplace_back("P", prog.p_width);
  RegisterLayout layout(std::move(regs));
  StateVector s = StateVector::zero(layout);
  s.amps.setZero();
  const std::int64_t pd = 1ll << prog.p_width;
  std::uint64_t xv = prog.in_width > 0 ? bits_from_string(x) : 0;
  const std::int64_t base = static_cast<std::int64_t>(xv)
                            << (prog.out_width + prog.p_width);
  for (std::int64_t p = 0; p < pd; ++p) s.amps(base | p) = prog.program_state(p);
  std::vector<std::string> targets;
  if (prog.in_width > 0) targets.push_back("X");
  targets.push_back("Y");
  if (prog.p_width > 0) targets.push_back("P");
  s = apply_unitary(s, prog.eval, targets);
  return branch_probabilities(s, "Y");
}

}  // namespace otpsim
