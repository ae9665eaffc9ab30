#include "otpsim/qsim.hpp"

#include <algorithm>
#include <cmath>

namespace otpsim {

namespace {

constexpr double kNormTol = 1e-10;

std::uint64_t scatter_bits(std::uint64_t local, int k,
                           const int* shifts) {
  std::uint64_t g = 0;
  for (int j = 0; j < k; ++j) {
    g |= ((local >> (k - 1 - j)) & 1ull) << shifts[j];
  }
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// bitstrings

std::string bits_to_string(std::uint64_t value, int width) {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int i = 0; i < width; ++i) {
    if ((value >> (width - 1 - i)) & 1ull) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

std::uint64_t bits_from_string(const std::string& s) {
  std::uint64_t v = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw sim_error("malformed bitstring: " + s);
    v = (v << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return v;
}

// ---------------------------------------------------------------------------
// RegisterLayout

RegisterLayout::RegisterLayout(std::vector<std::pair<std::string, int>> regs)
    : regs_(std::move(regs)) {
  int off = 0;
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    const auto& [name, width] = regs_[i];
    if (width < 1) throw sim_error("register width must be >= 1: " + name);
    if (pos_.count(name)) throw sim_error("duplicate register name: " + name);
    pos_[name] = static_cast<int>(i);
    off += width;
  }
  total_ = off;
  if (total_ > kMaxQubits) {
    throw sim_error("layout exceeds the " + std::to_string(kMaxQubits) +
                    "-qubit cap: " + std::to_string(total_));
  }
}

bool RegisterLayout::has(const std::string& name) const {
  return pos_.count(name) != 0;
}

int RegisterLayout::offset(const std::string& name) const {
  auto it = pos_.find(name);
  if (it == pos_.end()) throw sim_error("unknown register: " + name);
  int off = 0;
  for (int i = 0; i < it->second; ++i) off += regs_[static_cast<std::size_t>(i)].second;
  return off;
}

int RegisterLayout::width(const std::string& name) const {
  auto it = pos_.find(name);
  if (it == pos_.end()) throw sim_error("unknown register: " + name);
  return regs_[static_cast<std::size_t>(it->second)].second;
}

std::vector<int> RegisterLayout::qubits_of(const std::string& name) const {
  int off = offset(name);
  int w = width(name);
  std::vector<int> q(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) q[static_cast<std::size_t>(i)] = off + i;
  return q;
}

std::vector<int> RegisterLayout::qubits_of(
    const std::vector<std::string>& names) const {
  std::vector<int> q;
  for (const auto& n : names) {
    auto part = qubits_of(n);
    q.insert(q.end(), part.begin(), part.end());
  }
  return q;
}

// ---------------------------------------------------------------------------
// UnitaryOp

UnitaryOp UnitaryOp::dense(Mat m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw sim_error("dense unitary must be square");
  int k = 0;
  while ((1 << k) < m.rows()) ++k;
  if ((1 << k) != m.rows()) throw sim_error("dense unitary dim not a power of 2");
  UnitaryOp u;
  u.arity_ = k;
  u.mat_ = std::make_shared<const Mat>(std::move(m));
  return u;
}

UnitaryOp UnitaryOp::permutation(int arity, std::vector<std::uint32_t> perm) {
  if (perm.size() != (1ull << arity))
    throw sim_error("permutation table size mismatch");
  std::vector<bool> seen(perm.size(), false);
  for (auto v : perm) {
    if (v >= perm.size() || seen[v]) throw sim_error("not a permutation");
    seen[v] = true;
  }
  UnitaryOp u;
  u.arity_ = arity;
  u.perm_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(perm));
  return u;
}

UnitaryOp UnitaryOp::program(int arity, std::vector<GateStep> steps,
                             std::function<bool(std::uint64_t)> guard) {
  for (const auto& s : steps) {
    int set = (s.mat ? 1 : 0) + (s.perm ? 1 : 0) + (s.sub ? 1 : 0);
    if (set != 1) throw sim_error("gate step must have exactly one payload");
    for (int t : s.targets) {
      if (t < 0 || t >= arity) throw sim_error("step target out of range");
    }
    for (const auto& c : s.controls) {
      if (c.qubit < 0 || c.qubit >= arity)
        throw sim_error("step control out of range");
    }
  }
  UnitaryOp u;
  u.arity_ = arity;
  u.steps_ = std::move(steps);
  u.guard_ = std::move(guard);
  return u;
}

Mat UnitaryOp::to_dense() const {
  if (mat_) return *mat_;
  const std::int64_t dim = 1ll << arity_;
  Mat out(dim, dim);
  std::vector<int> qubits(static_cast<std::size_t>(arity_));
  for (int i = 0; i < arity_; ++i) qubits[static_cast<std::size_t>(i)] = i;
  for (std::int64_t col = 0; col < dim; ++col) {
    Vec v = Vec::Zero(dim);
    v(col) = 1.0;
    apply(v, arity_, qubits);
    out.col(col) = v;
  }
  return out;
}

UnitaryOp UnitaryOp::adjoint() const {
  UnitaryOp u;
  u.arity_ = arity_;
  if (mat_) {
    u.mat_ = std::make_shared<const Mat>(mat_->adjoint());
    return u;
  }
  if (perm_) {
    std::vector<std::uint32_t> inv(perm_->size());
    for (std::uint32_t i = 0; i < perm_->size(); ++i) inv[(*perm_)[i]] = i;
    u.perm_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(inv));
    return u;
  }
  u.guard_ = guard_;
  u.steps_.reserve(steps_.size());
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    GateStep s = *it;
    if (s.mat) {
      s.mat = std::make_shared<const Mat>(s.mat->adjoint());
    } else if (s.perm) {
      std::vector<std::uint32_t> inv(s.perm->size());
      for (std::uint32_t i = 0; i < s.perm->size(); ++i) inv[(*s.perm)[i]] = i;
      s.perm = std::make_shared<const std::vector<std::uint32_t>>(std::move(inv));
    } else {
      s.sub_adjoint = !s.sub_adjoint;
    }
    u.steps_.push_back(std::move(s));
  }
  return u;
}

void UnitaryOp::apply(Vec& amps, int total_qubits,
                      const std::vector<int>& qubits,
                      const std::vector<Ctrl>& outer_controls,
                      bool take_adjoint) const {
  if (static_cast<int>(qubits.size()) != arity_)
    throw sim_error("apply: arity mismatch");
  for (int q : qubits) {
    if (q < 0 || q >= total_qubits) throw sim_error("apply: qubit out of range");
  }
  const std::int64_t n = amps.size();
  if (n != (1ll << total_qubits)) throw sim_error("apply: state size mismatch");

  std::uint64_t cmask = 0, cval = 0;
  for (const auto& c : outer_controls) {
    std::uint64_t bit = 1ull << (total_qubits - 1 - c.qubit);
    cmask |= bit;
    if (c.bit) cval |= bit;
  }

  if (!steps_.empty() || (!mat_ && !perm_)) {
    // Gate program.
    Vec rest;
    bool guarded = static_cast<bool>(guard_);
    if (guarded) {
      std::vector<int> shifts(static_cast<std::size_t>(arity_));
      for (int j = 0; j < arity_; ++j)
        shifts[static_cast<std::size_t>(j)] = total_qubits - 1 - qubits[static_cast<std::size_t>(j)];
      rest = Vec::Zero(n);
      for (std::int64_t g = 0; g < n; ++g) {
        std::uint64_t gu = static_cast<std::uint64_t>(g);
        if ((gu & cmask) != cval) continue;
        std::uint64_t local = 0;
        for (int j = 0; j < arity_; ++j) {
          local |= ((gu >> shifts[static_cast<std::size_t>(j)]) & 1ull) << (arity_ - 1 - j);
        }
        if (!guard_(local)) {
          rest(g) = amps(g);
          amps(g) = 0.0;
        }
      }
    }
    auto run_step = [&](const GateStep& s, bool adj) {
      std::vector<int> tg(s.targets.size());
      for (std::size_t j = 0; j < s.targets.size(); ++j)
        tg[j] = qubits[static_cast<std::size_t>(s.targets[j])];
      std::vector<Ctrl> ctrls = outer_controls;
      for (const auto& c : s.controls)
        ctrls.push_back({qubits[static_cast<std::size_t>(c.qubit)], c.bit});
      if (s.sub) {
        s.sub->apply(amps, total_qubits, tg, ctrls, adj != s.sub_adjoint);
      } else if (s.mat) {
        UnitaryOp leaf;
        leaf.arity_ = static_cast<int>(s.targets.size());
        leaf.mat_ = s.mat;
        leaf.apply(amps, total_qubits, tg, ctrls, adj);
      } else {
        UnitaryOp leaf;
        leaf.arity_ = static_cast<int>(s.targets.size());
        leaf.perm_ = s.perm;
        leaf.apply(amps, total_qubits, tg, ctrls, adj);
      }
    };
    if (!take_adjoint) {
      for (const auto& s : steps_) run_step(s, false);
    } else {
      for (auto it = steps_.rbegin(); it != steps_.rend(); ++it)
        run_step(*it, true);
    }
    if (guarded) amps += rest;
    return;
  }

  const int k = arity_;
  std::vector<int> shifts(static_cast<std::size_t>(k));
  std::uint64_t tmask = 0;
  for (int j = 0; j < k; ++j) {
    shifts[static_cast<std::size_t>(j)] = total_qubits - 1 - qubits[static_cast<std::size_t>(j)];
    tmask |= 1ull << shifts[static_cast<std::size_t>(j)];
  }
  const std::int64_t dim = 1ll << k;
  std::vector<std::uint64_t> scat(static_cast<std::size_t>(dim));
  for (std::int64_t s = 0; s < dim; ++s)
    scat[static_cast<std::size_t>(s)] =
        scatter_bits(static_cast<std::uint64_t>(s), k, shifts.data());

  if (perm_) {
    const auto& p = *perm_;
    std::vector<cxd> buf(static_cast<std::size_t>(dim));
    for (std::int64_t g = 0; g < n; ++g) {
      std::uint64_t gu = static_cast<std::uint64_t>(g);
      if ((gu & tmask) != 0 || (gu & cmask) != cval) continue;
      if (!take_adjoint) {
        for (std::int64_t s = 0; s < dim; ++s)
          buf[p[static_cast<std::size_t>(s)]] =
              amps(static_cast<std::int64_t>(gu | scat[static_cast<std::size_t>(s)]));
      } else {
        for (std::int64_t s = 0; s < dim; ++s)
          buf[static_cast<std::size_t>(s)] =
              amps(static_cast<std::int64_t>(gu | scat[p[static_cast<std::size_t>(s)]]));
      }
      for (std::int64_t s = 0; s < dim; ++s)
        amps(static_cast<std::int64_t>(gu | scat[static_cast<std::size_t>(s)])) =
            buf[static_cast<std::size_t>(s)];
    }
    return;
  }

  const Mat& m = *mat_;
  Vec in(dim), out(dim);
  for (std::int64_t g = 0; g < n; ++g) {
    std::uint64_t gu = static_cast<std::uint64_t>(g);
    if ((gu & tmask) != 0 || (gu & cmask) != cval) continue;
    for (std::int64_t s = 0; s < dim; ++s)
      in(s) = amps(static_cast<std::int64_t>(gu | scat[static_cast<std::size_t>(s)]));
    if (!take_adjoint) {
      out.noalias() = m * in;
    } else {
      out.noalias() = m.adjoint() * in;
    }
    for (std::int64_t s = 0; s < dim; ++s)
      amps(static_cast<std::int64_t>(gu | scat[static_cast<std::size_t>(s)])) = out(s);
  }
}

// ---------------------------------------------------------------------------
// States

StateVector StateVector::zero(RegisterLayout layout) {
  StateVector s;
  s.amps = Vec::Zero(1ll << layout.total_width());
  s.amps(0) = 1.0;
  s.layout = std::move(layout);
  return s;
}

StateVector StateVector::basis(
    RegisterLayout layout,
    const std::vector<std::pair<std::string, std::uint64_t>>& values) {
  std::uint64_t idx = 0;
  int total = layout.total_width();
  for (const auto& [name, value] : values) {
    int off = layout.offset(name);
    int w = layout.width(name);
    if (w < 64 && value >= (1ull << w))
      throw sim_error("basis value out of range for register " + name);
    idx |= value << (total - off - w);
  }
  StateVector s;
  s.amps = Vec::Zero(1ll << total);
  s.amps(static_cast<std::int64_t>(idx)) = 1.0;
  s.layout = std::move(layout);
  return s;
}

// ---------------------------------------------------------------------------
// Operations

StateVector apply_unitary(const StateVector& state, const UnitaryOp& u,
                          const std::vector<std::string>& targets) {
  auto qubits = state.layout.qubits_of(targets);
  if (static_cast<int>(qubits.size()) != u.arity())
    throw sim_error("apply_unitary: target width != op arity");
  StateVector out = state;
  u.apply(out.amps, state.layout.total_width(), qubits);
  return out;
}

StateVector controlled_apply(const StateVector& state,
                             const std::string& control,
                             const std::string& predicate, const UnitaryOp& u,
                             const std::vector<std::string>& targets) {
  int cw = state.layout.width(control);
  if (static_cast<int>(predicate.size()) != cw)
    throw sim_error("controlled_apply: predicate width != control width");
  auto qubits = state.layout.qubits_of(targets);
  if (static_cast<int>(qubits.size()) != u.arity())
    throw sim_error("controlled_apply: target width != op arity");
  std::vector<Ctrl> ctrls;
  int off = state.layout.offset(control);
  for (int i = 0; i < cw; ++i)
    ctrls.push_back({off + i, predicate[static_cast<std::size_t>(i)] == '1'});
  StateVector out = state;
  u.apply(out.amps, state.layout.total_width(), qubits, ctrls);
  return out;
}

UnitaryOp reflection_about(const Vec& psi) {
  if (std::abs(psi.norm() - 1.0) > kNormTol)
    throw sim_error("reflection_about: state is not unit norm");
  const std::int64_t d = psi.size();
  Mat proj = psi * psi.adjoint();
  Mat r = Mat::Zero(2 * d, 2 * d);
  // Flag basis: |0>, |1>; flip the flag on the |psi> component.
  r.block(0, 0, d, d) = Mat::Identity(d, d) - proj;
  r.block(d, d, d, d) = Mat::Identity(d, d) - proj;
  r.block(0, d, d, d) = proj;
  r.block(d, 0, d, d) = proj;
  return UnitaryOp::dense(std::move(r));
}

std::tuple<std::string, StateVector, double> measure_register(
    const StateVector& state, const std::string& reg, Rng& rng) {
  Distribution dist = branch_probabilities(state, reg);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double x = unif(rng);
  double acc = 0.0;
  std::string outcome;
  double prob = 0.0;
  for (const auto& [bits, p] : dist.p) {
    acc += p;
    outcome = bits;
    prob = p;
    if (x <= acc) break;
  }
  int off = state.layout.offset(reg);
  int w = state.layout.width(reg);
  int total = state.layout.total_width();
  std::uint64_t val = bits_from_string(outcome);
  std::uint64_t mask = ((w == 64) ? ~0ull : ((1ull << w) - 1)) << (total - off - w);
  std::uint64_t want = val << (total - off - w);
  StateVector post = state;
  for (std::int64_t i = 0; i < post.amps.size(); ++i) {
    if ((static_cast<std::uint64_t>(i) & mask) != want) post.amps(i) = 0.0;
  }
  post.amps /= std::sqrt(prob);
  return {outcome, std::move(post), prob};
}

Distribution branch_probabilities(const StateVector& state,
                                  const std::string& reg) {
  int off = state.layout.offset(reg);
  int w = state.layout.width(reg);
  int total = state.layout.total_width();
  std::vector<double> acc(1ull << w, 0.0);
  for (std::int64_t i = 0; i < state.amps.size(); ++i) {
    std::uint64_t v = (static_cast<std::uint64_t>(i) >> (total - off - w)) &
                      ((w == 64) ? ~0ull : ((1ull << w) - 1));
    acc[v] += std::norm(state.amps(i));
  }
  Distribution d;
  for (std::uint64_t v = 0; v < acc.size(); ++v) {
    if (acc[v] > 1e-15) d.p[bits_to_string(v, w)] = acc[v];
  }
  return d;
}

DensityMatrix partial_trace(const StateVector& state,
                            const std::vector<std::string>& keep) {
  if (keep.empty()) throw sim_error("partial_trace: empty keep list");
  auto keepq = state.layout.qubits_of(keep);
  int total = state.layout.total_width();
  std::vector<bool> kept(static_cast<std::size_t>(total), false);
  for (int q : keepq) kept[static_cast<std::size_t>(q)] = true;
  std::vector<int> restq;
  for (int q = 0; q < total; ++q)
    if (!kept[static_cast<std::size_t>(q)]) restq.push_back(q);

  const int kk = static_cast<int>(keepq.size());
  const int kr = static_cast<int>(restq.size());
  std::vector<int> ksh(static_cast<std::size_t>(kk)), rsh(static_cast<std::size_t>(kr));
  for (int j = 0; j < kk; ++j) ksh[static_cast<std::size_t>(j)] = total - 1 - keepq[static_cast<std::size_t>(j)];
  for (int j = 0; j < kr; ++j) rsh[static_cast<std::size_t>(j)] = total - 1 - restq[static_cast<std::size_t>(j)];

  const std::int64_t dk = 1ll << kk;
  const std::int64_t dr = 1ll << kr;
  std::vector<std::uint64_t> kscat(static_cast<std::size_t>(dk));
  for (std::int64_t i = 0; i < dk; ++i)
    kscat[static_cast<std::size_t>(i)] =
        scatter_bits(static_cast<std::uint64_t>(i), kk, ksh.data());

  Mat rho = Mat::Zero(dk, dk);
  Vec col(dk);
  for (std::int64_t r = 0; r < dr; ++r) {
    std::uint64_t base = scatter_bits(static_cast<std::uint64_t>(r), kr, rsh.data());
    for (std::int64_t i = 0; i < dk; ++i)
      col(i) = state.amps(static_cast<std::int64_t>(base | kscat[static_cast<std::size_t>(i)]));
    rho.noalias() += col * col.adjoint();
  }
  return DensityMatrix{std::move(rho)};
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw sim_error("trace_distance: dimension mismatch");
  Mat diff = a.m - b.m;
  diff = 0.5 * (diff + Mat(diff.adjoint()));
  Eigen::SelfAdjointEigenSolver<Mat> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double hellinger_sq(const Distribution& d1, const Distribution& d2) {
  double bc = 0.0;
  for (const auto& [k, v] : d1.p) {
    auto it = d2.p.find(k);
    if (it != d2.p.end()) bc += std::sqrt(v * it->second);
  }
  return std::max(0.0, 1.0 - bc);
}

double tv_distance(const Distribution& d1, const Distribution& d2) {
  double s = 0.0;
  for (const auto& [k, v] : d1.p) {
    auto it = d2.p.find(k);
    s += std::abs(v - (it == d2.p.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : d2.p) {
    if (!d1.p.count(k)) s += v;
  }
  return 0.5 * s;
}

// ---------------------------------------------------------------------------
// Random objects

Vec random_state(int qubits, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(1ll << qubits);
  for (std::int64_t i = 0; i < v.size(); ++i) v(i) = cxd(g(rng), g(rng));
  v /= v.norm();
  return v;
}

Mat random_unitary_matrix(int dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = cxd(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    cxd d = r(j, j);
    q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : cxd(1.0, 0.0));
  }
  return q;
}

UnitaryOp random_unitary(int qubits, Rng& rng) {
  return UnitaryOp::dense(random_unitary_matrix(1 << qubits, rng));
}

double max_abs_diff(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace otpsim
