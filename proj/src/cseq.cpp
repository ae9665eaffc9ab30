#include "otpsim/cseq.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace otpsim {

namespace {

using u64 = std::uint64_t;

u64 mask_of(int w) { return (w >= 64) ? ~0ull : ((1ull << w) - 1); }

UnitaryOp perm_op(int arity, const std::function<u64(u64)>& f) {
  std::vector<std::uint32_t> p(1ull << arity);
  for (u64 s = 0; s < p.size(); ++s) p[s] = static_cast<std::uint32_t>(f(s));
  return UnitaryOp::permutation(arity, std::move(p));
}

const std::shared_ptr<const std::vector<std::uint32_t>>& x_table() {
  static const auto t = std::make_shared<const std::vector<std::uint32_t>>(
      std::vector<std::uint32_t>{1, 0});
  return t;
}

GateStep x_step(int target, std::vector<Ctrl> controls = {}) {
  GateStep st;
  st.perm = x_table();
  st.targets = {target};
  st.controls = std::move(controls);
  return st;
}

std::vector<int> range(int from, int count) {
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(from + i);
  return out;
}

void append(std::vector<int>& dst, const std::vector<int>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

// In-place 2D swap of the (normalized, orthogonal) vectors a and b.
void add_swap_block(Mat& m, const Vec& a, const Vec& b) {
  m += a * b.adjoint() + b * a.adjoint() - a * a.adjoint() - b * b.adjoint();
}

}  // namespace

std::uint64_t RandomizedFunction::eval(u64 x, u64 r) const {
  return table.at((x << n_r) | r);
}

bool RandomizedFunction::is_deterministic() const {
  for (u64 x = 0; x < (1ull << n_x); ++x)
    for (u64 r = 1; r < (1ull << n_r); ++r)
      if (eval(x, r) != eval(x, 0)) return false;
  return true;
}

RandomizedFunction RandomizedFunction::random(int n_x, int n_r, int n_y,
                                              Rng& rng) {
  RandomizedFunction f{n_x, n_r, n_y, {}};
  f.table.resize(1ull << (n_x + n_r));
  for (auto& y : f.table) y = rng() & mask_of(n_y);
  return f;
}

RandomizedFunction RandomizedFunction::constant(int n_x, int n_r, int n_y,
                                                u64 y) {
  RandomizedFunction f{n_x, n_r, n_y, {}};
  f.table.assign(1ull << (n_x + n_r), y & mask_of(n_y));
  return f;
}

void RandomizedFunction::save(std::ostream& os) const {
  os << n_x << " " << n_r << " " << n_y << "\n";
  for (u64 x = 0; x < (1ull << n_x); ++x)
    for (u64 r = 0; r < (1ull << n_r); ++r)
      os << bits_to_string(x, n_x) << " " << bits_to_string(r, n_r) << " "
         << bits_to_string(eval(x, r), n_y) << "\n";
}

RandomizedFunction RandomizedFunction::load(std::istream& is) {
  RandomizedFunction f;
  if (!(is >> f.n_x >> f.n_r >> f.n_y))
    throw sim_error("randomized function: bad header");
  f.table.assign(1ull << (f.n_x + f.n_r), 0);
  std::string xs, rs, ys;
  for (std::size_t i = 0; i < f.table.size(); ++i) {
    if (!(is >> xs >> rs >> ys))
      throw sim_error("randomized function: truncated table");
    f.table[(bits_from_string(xs) << f.n_r) | bits_from_string(rs)] =
        bits_from_string(ys);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Building blocks

UnitaryOp std_decomp_op(int n_x, int n_r) {
  const int dw = (n_x + 1) + (n_r + 1);
  const int arity = n_x + dw;
  const std::int64_t dim = 1ll << arity;
  const double amp = 1.0 / std::sqrt(static_cast<double>(1ull << n_r));
  Mat m = Mat::Identity(dim, dim);
  for (u64 x = 0; x < (1ull << n_x); ++x) {
    Vec a = Vec::Zero(dim), b = Vec::Zero(dim);
    a(static_cast<std::int64_t>(x << dw)) = 1.0;
    for (u64 r = 0; r < (1ull << n_r); ++r) {
      u64 d = (((x << 1) | 1) << (n_r + 1)) | ((r << 1) | 1);
      b(static_cast<std::int64_t>((x << dw) | d)) = amp;
    }
    add_swap_block(m, a, b);
  }
  return UnitaryOp::dense(std::move(m));
}

UnitaryOp csto_prime_op(int n_x, int n_r) {
  const int nw = n_x + n_r;
  const int nd = (n_x + 1) + (n_r + 1);
  return perm_op(nw + nd, [=](u64 s) {
    u64 w = s >> nd, d = s & mask_of(nd);
    u64 x = w >> n_r, r = w & mask_of(n_r);
    u64 dx = d >> (n_r + 1), dr = d & mask_of(n_r + 1);
    if ((dx & 1) && (dx >> 1) == x && (dr & 1)) r ^= dr >> 1;
    return (((x << n_r) | r) << nd) | d;
  });
}

UnitaryOp answer_op(const RandomizedFunction& f) {
  const int nw = f.n_x + f.n_r;
  return perm_op(f.n_y + 1 + nw, [f](u64 s) {
    const int nw2 = f.n_x + f.n_r;
    u64 u = s >> (1 + nw2), b = (s >> nw2) & 1, w = s & mask_of(nw2);
    u64 x = w >> f.n_r, r = w & mask_of(f.n_r);
    u ^= f.eval(x, r);
    b ^= 1;
    return (((u << 1) | b) << nw2) | w;
  });
}

UnitaryOp copy_x_op(int n_x, int n_r) {
  const int nw = n_x + n_r;
  return perm_op(n_x + nw, [=](u64 s) {
    u64 qx = s >> nw, w = s & mask_of(nw);
    u64 wx = w >> n_r, wr = w & mask_of(n_r);
    return (qx << nw) | (((wx ^ qx) << n_r) | wr);
  });
}

UnitaryOp record_op(int n_x, int n_r) {
  const int pw = n_r + 1;
  const int dw = n_x + 1;
  const int arity = n_x + dw + pw;
  const std::int64_t dim = 1ll << arity;
  const double amp = 1.0 / std::sqrt(static_cast<double>(1ull << n_r));
  Mat m = Mat::Identity(dim, dim);
  for (u64 x = 0; x < (1ull << n_x); ++x) {
    Vec a = Vec::Zero(dim), b = Vec::Zero(dim);
    for (u64 r = 0; r < (1ull << n_r); ++r) {
      u64 renc = (r << 1) | 1;
      a(static_cast<std::int64_t>((x << (dw + pw)) | renc)) = amp;
      b(static_cast<std::int64_t>((x << (dw + pw)) |
                                  (((x << 1) | 1) << pw) | renc)) = amp;
    }
    add_swap_block(m, a, b);
  }
  return UnitaryOp::dense(std::move(m));
}

UnitaryOp decomp_op(int n_r) {
  const std::int64_t dim = 1ll << (n_r + 1);
  const double amp = 1.0 / std::sqrt(static_cast<double>(1ull << n_r));
  Mat m = Mat::Identity(dim, dim);
  Vec a = Vec::Zero(dim), b = Vec::Zero(dim);
  a(0) = 1.0;
  for (u64 r = 0; r < (1ull << n_r); ++r)
    b(static_cast<std::int64_t>((r << 1) | 1)) = amp;
  add_swap_block(m, a, b);
  return UnitaryOp::dense(std::move(m));
}

// ---------------------------------------------------------------------------
// Phi_f and the oracle

int phi_f_ancilla_width(const RandomizedFunction& f) {
  return (f.n_x + f.n_r) + (f.n_x + 1) + (f.n_r + 1);
}

namespace {

std::vector<GateStep> phi_f_steps(const RandomizedFunction& f) {
  const int nx = f.n_x, ny = f.n_y, nr = f.n_r;
  const int nq = nx + ny + 1;
  const int nw = nx + nr;
  const int nd = (nx + 1) + (nr + 1);
  const std::vector<int> qx = range(0, nx);
  const std::vector<int> qu = range(nx, ny);
  const int qb = nx + ny;
  const std::vector<int> w = range(nq, nw);
  const std::vector<int> wx = range(nq, nx);
  const std::vector<int> d = range(nq + nw, nd);

  GateStep copy;
  copy.sub = std::make_shared<const UnitaryOp>(copy_x_op(nx, nr));
  copy.targets = qx;
  append(copy.targets, w);

  GateStep sd;
  sd.sub = std::make_shared<const UnitaryOp>(std_decomp_op(nx, nr));
  sd.targets = wx;
  append(sd.targets, d);

  GateStep csto;
  csto.sub = std::make_shared<const UnitaryOp>(csto_prime_op(nx, nr));
  csto.targets = w;
  append(csto.targets, d);

  GateStep answer;
  answer.sub = std::make_shared<const UnitaryOp>(answer_op(f));
  answer.targets = qu;
  answer.targets.push_back(qb);
  append(answer.targets, w);

  return {copy, sd, csto, sd, answer, sd, csto, sd, copy};
}

// Acts only when the database x slot is empty or already records the query
// input. Malformed slots (data without the presence flag) and, when
// workspace_width > 0, a dirty workspace are passed through untouched so the
// guarded subspace is exactly invariant under the query steps.
std::function<bool(u64)> cseq_guard(int n_x, int n_r, int tail_width,
                                    int workspace_width) {
  const int nd = (n_x + 1) + (n_r + 1);
  return [=](u64 s) {
    u64 qx = s >> (tail_width + nd);
    u64 dx = (s >> (n_r + 1)) & mask_of(n_x + 1);
    if (workspace_width > 0 && ((s >> nd) & mask_of(workspace_width)) != 0)
      return false;
    if (dx == 0) return true;
    return (dx & 1) != 0 && (dx >> 1) == qx;
  };
}

OracleSpec visible_spec(const RandomizedFunction& f, int adversary_width) {
  OracleSpec spec;
  if (adversary_width > 0) spec.visible.emplace_back("A", adversary_width);
  if (f.n_x > 0) spec.visible.emplace_back("Qx", f.n_x);
  if (f.n_y > 0) spec.visible.emplace_back("Qu", f.n_y);
  spec.visible.emplace_back("Qb", 1);
  return spec;
}

std::vector<std::string> query_regs(const RandomizedFunction& f) {
  std::vector<std::string> regs;
  if (f.n_x > 0) regs.push_back("Qx");
  if (f.n_y > 0) regs.push_back("Qu");
  regs.push_back("Qb");
  return regs;
}

}  // namespace

UnitaryOp phi_f_program(const RandomizedFunction& f) {
  const int arity = (f.n_x + f.n_y + 1) + phi_f_ancilla_width(f);
  return UnitaryOp::program(arity, phi_f_steps(f));
}

ChannelDilation build_phi_f(const RandomizedFunction& f) {
  ChannelDilation ch;
  ch.query_width = f.n_x + f.n_y + 1;
  ch.ancilla_width = phi_f_ancilla_width(f);
  ch.u = phi_f_program(f);
  return ch;
}

UnitaryOp cseq_query_op(const RandomizedFunction& f) {
  const int arity = (f.n_x + f.n_y + 1) + phi_f_ancilla_width(f);
  const int nw = f.n_x + f.n_r;
  return UnitaryOp::program(arity, phi_f_steps(f),
                            cseq_guard(f.n_x, f.n_r, f.n_y + 1 + nw, nw));
}

OracleSpec cseq_oracle(const RandomizedFunction& f, int adversary_width) {
  OracleSpec spec = visible_spec(f, adversary_width);
  spec.hidden.emplace_back("W", f.n_x + f.n_r);
  spec.hidden.emplace_back("D", (f.n_x + 1) + (f.n_r + 1));
  spec.hidden_init = Vec::Zero(1ll << (spec.hidden[0].second +
                                       spec.hidden[1].second));
  spec.hidden_init(0) = 1.0;
  UnitaryOp op = cseq_query_op(f);
  std::vector<std::string> targets = query_regs(f);
  targets.push_back("W");
  targets.push_back("D");
  spec.query = [op, targets](const StateVector& joint) {
    return apply_unitary(joint, op, targets);
  };
  return spec;
}

OracleSpec hybrid1_oracle(const RandomizedFunction& f, int adversary_width) {
  const int nx = f.n_x, ny = f.n_y, nr = f.n_r;
  const int nd = (nx + 1) + (nr + 1);
  const int arity = (nx + ny + 1) + nd;
  const std::vector<int> qx = range(0, nx);
  const std::vector<int> qu = range(nx, ny);
  const int qb = nx + ny;
  const std::vector<int> d = range(nx + ny + 1, nd);

  GateStep sd;
  sd.sub = std::make_shared<const UnitaryOp>(std_decomp_op(nx, nr));
  sd.targets = qx;
  append(sd.targets, d);

  // |x, u> (x) |x, r>_D -> |x, u xor f(x;r)> (x) |x, r>_D
  UnitaryOp eval = perm_op(nx + ny + nd, [f, nd](u64 s) {
    u64 x = s >> (f.n_y + nd);
    u64 u = (s >> nd) & mask_of(f.n_y);
    u64 dv = s & mask_of(nd);
    u64 dx = dv >> (f.n_r + 1), dr = dv & mask_of(f.n_r + 1);
    if ((dx & 1) && (dx >> 1) == x && (dr & 1)) u ^= f.eval(x, dr >> 1);
    return (((x << f.n_y) | u) << nd) | dv;
  });
  GateStep ev;
  ev.sub = std::make_shared<const UnitaryOp>(std::move(eval));
  ev.targets = qx;
  append(ev.targets, qu);
  append(ev.targets, d);

  UnitaryOp op = UnitaryOp::program(
      arity, {sd, ev, sd, x_step(qb)}, cseq_guard(nx, nr, ny + 1, 0));

  OracleSpec spec = visible_spec(f, adversary_width);
  spec.hidden.emplace_back("D", nd);
  spec.hidden_init = Vec::Zero(1ll << nd);
  spec.hidden_init(0) = 1.0;
  std::vector<std::string> targets = query_regs(f);
  targets.push_back("D");
  spec.query = [op, targets](const StateVector& joint) {
    return apply_unitary(joint, op, targets);
  };
  return spec;
}

OracleSpec hybrid2_oracle(const RandomizedFunction& f, int adversary_width) {
  const int nx = f.n_x, ny = f.n_y, nr = f.n_r;
  const int dw = nx + 1, pw = nr + 1;
  const int arity = (nx + ny + 1) + dw + pw;
  const std::vector<int> qx = range(0, nx);
  const std::vector<int> qu = range(nx, ny);
  const int qb = nx + ny;
  const std::vector<int> d = range(nx + ny + 1, dw);
  const std::vector<int> p = range(nx + ny + 1 + dw, pw);

  GateStep dec;
  dec.sub = std::make_shared<const UnitaryOp>(decomp_op(nr));
  dec.targets = p;

  GateStep rec;
  rec.sub = std::make_shared<const UnitaryOp>(record_op(nx, nr));
  rec.targets = qx;
  append(rec.targets, d);
  append(rec.targets, p);

  // Eval_f on the encoded program slot: acts only on r-values, not empty.
  UnitaryOp eval = perm_op(nx + ny + pw, [f, pw](u64 s) {
    u64 x = s >> (f.n_y + pw);
    u64 u = (s >> pw) & mask_of(f.n_y);
    u64 pv = s & mask_of(pw);
    if (pv & 1) u ^= f.eval(x, pv >> 1);
    return (((x << f.n_y) | u) << pw) | pv;
  });
  GateStep ev;
  ev.sub = std::make_shared<const UnitaryOp>(std::move(eval));
  ev.targets = qx;
  append(ev.targets, qu);
  append(ev.targets, p);

  // Guard reads the x slot of D, which has no r part here.
  auto guard = [nx, ny, dw, pw](u64 s) {
    u64 qxv = s >> (ny + 1 + dw + pw);
    u64 dx = (s >> pw) & mask_of(dw);
    if (dx == 0) return true;
    return (dx & 1) != 0 && (dx >> 1) == qxv;
  };
  UnitaryOp op = UnitaryOp::program(
      arity, {dec, rec, ev, rec, dec, x_step(qb)}, guard);

  OracleSpec spec = visible_spec(f, adversary_width);
  spec.hidden.emplace_back("D", dw);
  spec.hidden.emplace_back("P", pw);
  spec.hidden_init = Vec::Zero(1ll << (dw + pw));
  spec.hidden_init(0) = 1.0;
  std::vector<std::string> targets = query_regs(f);
  targets.push_back("D");
  targets.push_back("P");
  spec.query = [op, targets](const StateVector& joint) {
    return apply_unitary(joint, op, targets);
  };
  return spec;
}

// ---------------------------------------------------------------------------
// Simulator

TestableProgram canonical_program(const RandomizedFunction& f) {
  TestableProgram prog;
  prog.in_width = f.n_x;
  prog.out_width = f.n_y;
  prog.p_width = f.n_r;
  const std::int64_t dim = 1ll << f.n_r;
  prog.program_state = Vec::Constant(dim, 1.0 / std::sqrt(
                                              static_cast<double>(dim)));
  prog.eval = perm_op(f.n_x + f.n_y + f.n_r, [f](u64 s) {
    u64 x = s >> (f.n_y + f.n_r);
    u64 u = (s >> f.n_r) & mask_of(f.n_y);
    u64 r = s & mask_of(f.n_r);
    u ^= f.eval(x, r);
    return (((x << f.n_y) | u) << f.n_r) | r;
  });
  prog.reflection = reflection_about(prog.program_state);
  return prog;
}

OracleSpec cseq_sim_oracle(const TestableProgram& prog, int n_x, int n_y,
                           int adversary_width) {
  const int p = prog.p_width;
  const int nq = n_x + n_y + 1;
  const int dxw = n_x + 1, wxw = n_x + 1, wyw = n_y + 1;
  const int arity = nq + p + dxw + wxw + wyw + 1;
  const int p0 = nq;
  const int dx0 = p0 + p;
  const int wx0 = dx0 + dxw;
  const int wy0 = wx0 + wxw;
  const int wb = wy0 + wyw;

  std::vector<Ctrl> work_empty;
  for (int i = 0; i < wxw; ++i) work_empty.push_back({wx0 + i, 0});
  for (int i = 0; i < wyw; ++i) work_empty.push_back({wy0 + i, 0});

  GateStep reflect;
  reflect.sub = std::make_shared<const UnitaryOp>(prog.reflection);
  reflect.targets = {wb};
  append(reflect.targets, range(p0, p));
  reflect.controls = work_empty;

  std::vector<GateStep> reflect_copy;
  reflect_copy.push_back(reflect);
  for (int i = 0; i < n_x; ++i) {
    std::vector<Ctrl> c = work_empty;
    c.push_back({i, 1});
    c.push_back({wb, 1});
    reflect_copy.push_back(x_step(dx0 + i, std::move(c)));
  }
  {
    std::vector<Ctrl> c = work_empty;
    c.push_back({wb, 1});
    reflect_copy.push_back(x_step(dx0 + n_x, std::move(c)));
  }
  reflect_copy.push_back(reflect);

  std::vector<GateStep> copy_in;
  for (int i = 0; i < n_x; ++i) copy_in.push_back(x_step(wx0 + i, {{i, 1}}));
  copy_in.push_back(x_step(wx0 + n_x));

  GateStep ev;
  ev.sub = std::make_shared<const UnitaryOp>(prog.eval);
  ev.targets = range(wx0, n_x);
  append(ev.targets, range(wy0, n_y));
  append(ev.targets, range(p0, p));
  GateStep ev_dag = ev;
  ev_dag.sub_adjoint = true;

  std::vector<GateStep> steps = reflect_copy;
  steps.insert(steps.end(), copy_in.begin(), copy_in.end());
  steps.push_back(ev);
  for (int i = 0; i < n_y; ++i)
    steps.push_back(x_step(n_x + i, {{wy0 + i, 1}}));
  steps.push_back(ev_dag);
  steps.insert(steps.end(), copy_in.begin(), copy_in.end());
  steps.insert(steps.end(), reflect_copy.begin(), reflect_copy.end());
  steps.push_back(x_step(n_x + n_y));

  auto guard = [n_x, arity, dx0, dxw](u64 s) {
    u64 qx = s >> (arity - n_x);
    u64 dx = (s >> (arity - dx0 - dxw)) & mask_of(dxw);
    if (dx == 0) return true;
    return (dx & 1) != 0 && (dx >> 1) == qx;
  };
  UnitaryOp op = UnitaryOp::program(arity, std::move(steps), guard);

  OracleSpec spec;
  if (adversary_width > 0) spec.visible.emplace_back("A", adversary_width);
  if (n_x > 0) spec.visible.emplace_back("Qx", n_x);
  if (n_y > 0) spec.visible.emplace_back("Qu", n_y);
  spec.visible.emplace_back("Qb", 1);
  if (p > 0) spec.hidden.emplace_back("P", p);
  spec.hidden.emplace_back("Dx", dxw);
  spec.hidden.emplace_back("Wx", wxw);
  spec.hidden.emplace_back("Wy", wyw);
  spec.hidden.emplace_back("Wb", 1);
  const int rest = dxw + wxw + wyw + 1;
  spec.hidden_init = Vec::Zero(1ll << (p + rest));
  for (std::int64_t pv = 0; pv < prog.program_state.size(); ++pv)
    spec.hidden_init(pv << rest) = prog.program_state(pv);

  std::vector<std::string> targets;
  if (n_x > 0) targets.push_back("Qx");
  if (n_y > 0) targets.push_back("Qu");
  targets.push_back("Qb");
  if (p > 0) targets.push_back("P");
  targets.push_back("Dx");
  targets.push_back("Wx");
  targets.push_back("Wy");
  targets.push_back("Wb");
  spec.query = [op, targets](const StateVector& joint) {
    return apply_unitary(joint, op, targets);
  };
  return spec;
}

AdversaryScript random_cseq_script(int adversary_width,
                                   const RandomizedFunction& f, int n_locals,
                                   int n_queries, Rng& rng) {
  std::vector<std::string> local_targets;
  if (adversary_width > 0) local_targets.push_back("A");
  if (f.n_x > 0) local_targets.push_back("Qx");
  if (f.n_y > 0) local_targets.push_back("Qu");
  local_targets.push_back("Qb");
  const int width = adversary_width + f.n_x + f.n_y + 1;
  AdversaryScript script;
  for (int i = 0; i < n_locals; ++i) {
    ScriptStep step;
    step.local = random_unitary(width, rng);
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

double compare_oracles(const OracleSpec& a, const OracleSpec& b,
                       const std::vector<AdversaryScript>& scripts) {
  double worst = 0.0;
  for (const AdversaryScript& s : scripts) {
    double d = trace_distance(run_oracle_script(a, s),
                              run_oracle_script(b, s));
    worst = std::max(worst, d);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Cross-simulations

TestableProgram seq_as_program(const RandomizedFunction& f) {
  const int nx = f.n_x, ny = f.n_y;
  const int nw = nx + f.n_r;
  const int nd = (nx + 1) + (f.n_r + 1);
  const int p = nw + nd + 2;  // workspace, database, control bit, cache bit
  const int w0 = nx + ny;
  const int d0 = w0 + nw;
  const int c = d0 + nd;
  const int b = c + 1;

  UnitaryOp phi = phi_f_program(f);
  std::vector<int> phi_targets = range(0, nx);
  append(phi_targets, range(nx, ny));
  phi_targets.push_back(b);
  append(phi_targets, range(w0, nw));
  append(phi_targets, range(d0, nd));

  GateStep un_eval;
  un_eval.sub = std::make_shared<const UnitaryOp>(phi);
  un_eval.sub_adjoint = true;
  un_eval.targets = phi_targets;
  un_eval.controls = {{c, 1}};
  GateStep re_eval = un_eval;
  re_eval.sub_adjoint = false;

  // Flip the control bit exactly when the channel's internal state is fresh.
  std::vector<Ctrl> internal_zero;
  for (int i = 0; i < nw + nd; ++i) internal_zero.push_back({w0 + i, 0});
  GateStep mark = x_step(c, internal_zero);

  TestableProgram prog;
  prog.in_width = nx;
  prog.out_width = ny;
  prog.p_width = p;
  prog.eval = UnitaryOp::program(nx + ny + p, {un_eval, mark, re_eval});
  prog.program_state = Vec::Zero(1ll << p);
  prog.program_state(0) = 1.0;
  // X on the external qubit iff the cache bit is 0.
  prog.reflection = UnitaryOp::program(1 + p, {x_step(0, {{p, 0}})});
  return prog;
}

TestableProgram cseq_as_program(const RandomizedFunction& f) {
  if (f.n_x < 1)
    throw precondition_error(
        "cseq_as_program: needs a domain with more than one input");
  const int nq = f.n_x + f.n_y + 1;
  const int nw = f.n_x + f.n_r;
  const int nd = (f.n_x + 1) + (f.n_r + 1);
  const int p = nw + nd + 2 * nq + 2;

  UnitaryOp cq = cseq_query_op(f);

  TestableProgram prog;
  prog.in_width = nq;
  prog.out_width = 0;
  prog.p_width = p;

  {
    GateStep q;
    q.sub = std::make_shared<const UnitaryOp>(cq);
    q.targets = range(0, nq);
    append(q.targets, range(nq, nw + nd));
    prog.eval = UnitaryOp::program(nq + p, {q});
  }

  // Reflection register layout: flag, then (W, D, Q0, Q1, B0, B1).
  const int w0 = 1;
  const int d0 = w0 + nw;
  const int q0 = d0 + nd;
  const int q1 = q0 + nq;
  const int b0 = q1 + nq;
  const int b1 = b0 + 1;
  auto probe = [&](int qreg) {
    GateStep q;
    q.sub = std::make_shared<const UnitaryOp>(cq);
    q.targets = range(qreg, nq);
    append(q.targets, range(w0, nw));
    append(q.targets, range(d0, nd));
    return q;
  };
  GateStep cache0 = x_step(b0, {{q0 + nq - 1, 1}});
  GateStep cache1 = x_step(b1, {{q1 + nq - 1, 1}});
  std::vector<GateStep> rsteps = {
      probe(q0), cache0, probe(q0), probe(q1), cache1, probe(q1),
      x_step(0, {{b0, 1}, {b1, 1}}),
      probe(q1), cache1, probe(q1), probe(q0), cache0, probe(q0)};
  prog.reflection = UnitaryOp::program(1 + p, std::move(rsteps));

  // Program state: oracle registers fresh, probes loaded with the two
  // distinct inputs x0 = 0...0 and x1 = 0...01.
  prog.program_state = Vec::Zero(1ll << p);
  const int q1_in_p = (q1 - 1) + f.n_x - 1;  // last x bit of Q1
  prog.program_state(1ll << (p - 1 - q1_in_p)) = 1.0;
  return prog;
}

}  // namespace otpsim
