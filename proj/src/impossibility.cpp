#include "otpsim/impossibility.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace otpsim {

namespace {

std::uint64_t mask_of(int w) { return (w >= 64) ? ~0ull : ((1ull << w) - 1); }

int bits_needed(std::uint64_t count) {
  int w = 1;
  while ((1ull << w) < count) ++w;
  return w;
}

RegisterLayout program_layout(const SamplingProgram& prog) {
  std::vector<std::pair<std::string, int>> regs;
  if (prog.n_x > 0) regs.emplace_back("X", prog.n_x);
  regs.emplace_back("Y", prog.n_y);
  if (prog.p_width > 0) regs.emplace_back("P", prog.p_width);
  return RegisterLayout(regs);
}

std::vector<std::string> eval_targets(const SamplingProgram& prog) {
  std::vector<std::string> t;
  if (prog.n_x > 0) t.push_back("X");
  t.push_back("Y");
  if (prog.p_width > 0) t.push_back("P");
  return t;
}

// XOR-into-Y permutation on (X, Y, P) from a classical map (x, r) -> y.
UnitaryOp xor_eval_op(int n_x, int n_y, int n_r,
                      const std::function<std::uint64_t(std::uint64_t,
                                                        std::uint64_t)>& fn) {
  const int arity = n_x + n_y + n_r;
  std::vector<std::uint32_t> perm(1u << arity);
  for (std::uint64_t s = 0; s < perm.size(); ++s) {
    std::uint64_t r = s & mask_of(n_r);
    std::uint64_t y = (s >> n_r) & mask_of(n_y);
    std::uint64_t x = s >> (n_r + n_y);
    y ^= fn(x, r) & mask_of(n_y);
    perm[s] = static_cast<std::uint32_t>((x << (n_r + n_y)) | (y << n_r) | r);
  }
  return UnitaryOp::permutation(arity, std::move(perm));
}

GaCiphertext encrypt_bit(const GroupActionKey& key, int bit, std::uint64_t u) {
  return ga_enc(key, bit, static_cast<std::uint32_t>(u % key.n_mod));
}

// Ciphertext tuple for input x under randomness r, one group-action key per
// message bit. shared_u: all bits reuse the same two-bit randomness;
// otherwise r packs two bits per message bit.
std::vector<std::uint32_t> tuple_of(const std::vector<GroupActionKey>& keys,
                                    std::uint64_t x, std::uint64_t r,
                                    bool shared_u) {
  const int n = static_cast<int>(keys.size());
  std::vector<std::uint32_t> out;
  out.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    int bit = static_cast<int>((x >> (n - 1 - i)) & 1);
    std::uint64_t u = shared_u ? r : ((r >> (2 * (n - 1 - i))) & 3);
    GaCiphertext c = encrypt_bit(keys[i], bit, u);
    out.push_back(c.y1);
    out.push_back(c.y2);
  }
  return out;
}

// Enumerates the tuple support over all (x, r) and freezes the index map
// into a table.
FamilyMember tabulate(std::string kind, std::vector<GroupActionKey> keys,
                      int n, int n_r, bool shared_u) {
  const std::uint64_t n_inputs = 1ull << n;
  const std::uint64_t support = 1ull << n_r;
  std::map<std::vector<std::uint32_t>, std::uint64_t> index;
  std::vector<std::uint64_t> raw(n_inputs * support);
  for (std::uint64_t x = 0; x < n_inputs; ++x)
    for (std::uint64_t r = 0; r < support; ++r) {
      auto tup = tuple_of(keys, x, r, shared_u);
      auto it = index.find(tup);
      if (it == index.end())
        it = index.emplace(std::move(tup), index.size()).first;
      raw[x * support + r] = it->second;
    }
  FamilyMember member;
  member.kind = std::move(kind);
  member.f.n_x = n;
  member.f.n_r = n_r;
  member.f.n_y = bits_needed(index.size());
  member.f.table = std::move(raw);
  member.support = static_cast<int>(support);
  member.keys = std::move(keys);
  return member;
}

}  // namespace

Distribution sampling_output(const SamplingProgram& prog, std::uint64_t x) {
  RegisterLayout layout = program_layout(prog);
  auto targets = eval_targets(prog);
  Distribution out;
  for (const auto& [weight, psi] : prog.components) {
    StateVector state = StateVector::zero(layout);
    state.amps.setZero();
    const std::uint64_t p_dim = 1ull << prog.p_width;
    const std::uint64_t base = (prog.n_x > 0 ? x : 0)
                               << (prog.n_y + prog.p_width);
    for (std::uint64_t pv = 0; pv < p_dim; ++pv)
      state.amps[base | pv] = psi(pv);
    state = apply_unitary(state, prog.eval, targets);
    Distribution d = branch_probabilities(state, "Y");
    for (const auto& [key, p] : d.p) out.p[key] += weight * p;
  }
  return out;
}

SamplingProgram reference_otp(const RandomizedFunction& f, int support) {
  const int full = 1 << f.n_r;
  if (support <= 0) support = full;
  if (support > full) throw precondition_error("support exceeds 2^n_r");
  SamplingProgram prog;
  prog.n_x = f.n_x;
  prog.n_y = f.n_y;
  prog.p_width = f.n_r;
  Vec psi = Vec::Zero(full);
  for (int r = 0; r < support; ++r) psi(r) = 1.0 / std::sqrt(double(support));
  prog.components.emplace_back(1.0, std::move(psi));
  prog.eval = xor_eval_op(f.n_x, f.n_y, f.n_r,
                          [f](std::uint64_t x, std::uint64_t r) {
                            return f.eval(x, r);
                          });
  return prog;
}

FamilyMember family_constant(int n, Rng& rng) {
  GroupActionKey key = ga_gen(GaMode::lossy, 4, rng);
  FamilyMember member;
  member.kind = "constant";
  // Index 0 stands for the one fixed ciphertext Enc(pk, 0; r*).
  member.f = RandomizedFunction::constant(n, 0, 1, 0);
  member.support = 1;
  member.keys = {key};
  return member;
}

FamilyMember family_injective(int n, Rng& rng) {
  std::vector<GroupActionKey> keys;
  for (int i = 0; i < n; ++i) keys.push_back(ga_gen(GaMode::inj, 4, rng));
  return tabulate("injective", std::move(keys), n, 2, true);
}

FamilyMember family_lossy(int n, Rng& rng) {
  std::vector<GroupActionKey> keys;
  for (int i = 0; i < n; ++i) {
    GroupActionKey key;
    do {
      key = ga_gen(GaMode::lossy, 4, rng);
    } while (key.h == 0);
    keys.push_back(key);
  }
  return tabulate("lossy", std::move(keys), n, 2 * n, false);
}

SamplingProgram fresh_program(const FamilyMember& member) {
  return reference_otp(member.f, member.support);
}

SamplingProgram mixture_program(const FamilyMember& member) {
  const RandomizedFunction& f = member.f;
  SamplingProgram prog;
  prog.n_x = f.n_x;
  prog.n_y = f.n_y;
  prog.p_width = f.n_r;
  const std::uint64_t p_dim = 1ull << f.n_r;
  const double w = 1.0 / double(member.support);
  for (int r = 0; r < member.support; ++r) {
    Vec psi = Vec::Zero(p_dim);
    psi(r) = 1.0;
    prog.components.emplace_back(w, std::move(psi));
  }
  prog.eval = xor_eval_op(f.n_x, f.n_y, f.n_r,
                          [f](std::uint64_t, std::uint64_t r) {
                            return f.eval(0, r);
                          });
  return prog;
}

double max_output_tv(const SamplingProgram& a, const SamplingProgram& b) {
  if (a.n_x != b.n_x || a.n_y != b.n_y)
    throw precondition_error("program shapes differ");
  double worst = 0.0;
  for (std::uint64_t x = 0; x < (1ull << a.n_x); ++x)
    worst = std::max(worst,
                     tv_distance(sampling_output(a, x), sampling_output(b, x)));
  return worst;
}

double adversary_prob_of_1(const SamplingProgram& prog) {
  const int n = prog.n_x;
  if (n < 1 || n > 6) throw precondition_error("input width out of range");
  const int ny = prog.n_y;
  const int p = prog.p_width;
  const int total = 2 * n + 2 * ny + p;
  if (total > kMaxQubits) throw precondition_error("adversary state too wide");

  std::vector<std::pair<std::string, int>> regs = {
      {"X", n}, {"Xp", n}, {"Y", ny}, {"Yp", ny}};
  if (p > 0) regs.emplace_back("P", p);
  RegisterLayout layout(std::move(regs));

  std::vector<std::string> eval_regs = {"X", "Y"};
  if (p > 0) eval_regs.push_back("P");

  UnitaryOp copy = xor_eval_op(ny, ny, 0, [](std::uint64_t y, std::uint64_t) {
    return y;
  });

  const std::uint64_t p_dim = 1ull << p;
  const int tail = 2 * ny + p;
  const double amp = 1.0 / std::sqrt(double(1ull << n));

  double prob = 0.0;
  for (const auto& [weight, psi] : prog.components) {
    StateVector state = StateVector::zero(layout);
    state.amps.setZero();
    for (std::uint64_t x = 0; x < (1ull << n); ++x)
      for (std::uint64_t pv = 0; pv < p_dim; ++pv)
        state.amps[(((x << n) | x) << tail) | pv] = amp * psi(pv);
    state = apply_unitary(state, prog.eval, eval_regs);
    state = apply_unitary(state, copy, {"Y", "Yp"});
    state = apply_unitary(state, prog.eval.adjoint(), eval_regs);
    double pass = 0.0;
    for (std::uint64_t t = 0; t < (1ull << tail); ++t) {
      cxd overlap = 0.0;
      for (std::uint64_t x = 0; x < (1ull << n); ++x)
        overlap += amp * state.amps[(((x << n) | x) << tail) | t];
      pass += std::norm(overlap);
    }
    prob += weight * (1.0 - pass);
  }
  return prob;
}

double projector_norm(const RandomizedFunction& f, int support) {
  const int n = f.n_x;
  if (n < 1 || n > 4) throw precondition_error("input width out of range");
  const int full = 1 << f.n_r;
  if (support <= 0) support = full;
  const int ny = f.n_y;
  const std::uint64_t dim = 1ull << (2 * n + ny);
  if (dim > (1ull << 12)) throw precondition_error("projector too wide");

  // Basis order (X, X', Y'), X most significant.
  Vec diag = Vec::Zero(dim);
  for (std::uint64_t xp = 0; xp < (1ull << n); ++xp) {
    std::vector<bool> in_support(1ull << ny, false);
    for (int r = 0; r < support; ++r) in_support[f.eval(xp, r)] = true;
    for (std::uint64_t y = 0; y < (1ull << ny); ++y) {
      if (!in_support[y]) continue;
      for (std::uint64_t x = 0; x < (1ull << n); ++x)
        diag[(((x << n) | xp) << ny) | y] = 1.0;
    }
  }

  const double amp = 1.0 / std::sqrt(double(1ull << n));
  Mat pi_pp = Mat::Zero(dim, dim);
  for (std::uint64_t y = 0; y < (1ull << ny); ++y) {
    Vec col = Vec::Zero(dim);
    for (std::uint64_t x = 0; x < (1ull << n); ++x)
      col[(((x << n) | x) << ny) | y] = amp;
    pi_pp += col * col.adjoint();
  }

  Mat m = diag.asDiagonal() * pi_pp * diag.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat> solver(m);
  return solver.eigenvalues().maxCoeff();
}

std::vector<ImpossibilityRow> impossibility_experiment(Rng& rng) {
  std::vector<ImpossibilityRow> rows;

  {
    FamilyMember member = family_constant(2, rng);
    auto tv = lossiness_audit(member.keys[0]);
    ImpossibilityRow row;
    row.family = member.kind;
    row.form = "fresh";
    row.n = 2;
    row.key_mode = "lossy";
    row.prob_of_1 = adversary_prob_of_1(fresh_program(member));
    row.projector_norm = projector_norm(member.f, member.support);
    row.max_pair_tv = tv[0][1];
    rows.push_back(row);
  }

  for (int n = 1; n <= 3; ++n) {
    FamilyMember member = family_injective(n, rng);
    double audit = 0.0;
    for (const auto& key : member.keys)
      audit = std::max(audit, lossiness_audit(key)[0][1]);
    ImpossibilityRow row;
    row.family = member.kind;
    row.form = "fresh";
    row.n = n;
    row.key_mode = "inj";
    row.prob_of_1 = adversary_prob_of_1(fresh_program(member));
    row.projector_norm = projector_norm(member.f, member.support);
    row.max_pair_tv = audit;
    rows.push_back(row);
  }

  {
    FamilyMember member = family_lossy(2, rng);
    SamplingProgram fresh = fresh_program(member);
    SamplingProgram mixed = mixture_program(member);
    double pair_tv = max_output_tv(fresh, mixed);
    double norm = projector_norm(member.f, member.support);
    for (const char* form : {"fresh", "mixture"}) {
      ImpossibilityRow row;
      row.family = member.kind;
      row.form = form;
      row.n = 2;
      row.key_mode = "lossy";
      row.prob_of_1 = adversary_prob_of_1(
          std::string(form) == "fresh" ? fresh : mixed);
      row.projector_norm = norm;
      row.max_pair_tv = pair_tv;
      rows.push_back(row);
    }
  }

  return rows;
}

}  // namespace otpsim
