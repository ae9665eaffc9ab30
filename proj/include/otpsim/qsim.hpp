#pragma once

// Dense statevector simulation over named qubit registers, plus the distance
// metrics (trace distance, Hellinger, total variation) used by every other
// module.

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace otpsim {

using cxd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

inline constexpr int kMaxQubits = 22;

struct sim_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated caller contract (distinct from a property failure).
struct precondition_error : sim_error {
  using sim_error::sim_error;
};

// ---------------------------------------------------------------------------
// bitstrings

std::string bits_to_string(std::uint64_t value, int width);
std::uint64_t bits_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// RegisterLayout

class RegisterLayout {
 public:
  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<std::pair<std::string, int>> regs);

  int total_width() const { return total_; }
  bool has(const std::string& name) const;
  int offset(const std::string& name) const;
  int width(const std::string& name) const;
  // Global qubit indices of one register (contiguous) or several concatenated.
  std::vector<int> qubits_of(const std::string& name) const;
  std::vector<int> qubits_of(const std::vector<std::string>& names) const;
  const std::vector<std::pair<std::string, int>>& registers() const {
    return regs_;
  }

 private:
  std::vector<std::pair<std::string, int>> regs_;
  std::map<std::string, int> pos_;
  int total_ = 0;
};

// ---------------------------------------------------------------------------
// UnitaryOp

// A single computational-basis control: qubit must hold `bit`.
struct Ctrl {
  int qubit;
  int bit;
};

class UnitaryOp;

// One step of a gate program. Exactly one of mat/perm/sub is set. Targets and
// controls are op-local qubit indices (qubit 0 = most significant).
struct GateStep {
  std::shared_ptr<const Mat> mat;
  std::shared_ptr<const std::vector<std::uint32_t>> perm;
  std::shared_ptr<const UnitaryOp> sub;
  bool sub_adjoint = false;
  std::vector<int> targets;
  std::vector<Ctrl> controls;
};

class UnitaryOp {
 public:
  UnitaryOp() = default;

  static UnitaryOp dense(Mat m);
  static UnitaryOp permutation(int arity, std::vector<std::uint32_t> perm);
  // guard: basis-state predicate over the op-local index; states where it
  // returns false are left untouched. The steps must map the guard-passing
  // subspace onto itself.
  static UnitaryOp program(int arity, std::vector<GateStep> steps,
                           std::function<bool(std::uint64_t)> guard = nullptr);

  int arity() const { return arity_; }
  bool is_dense() const { return static_cast<bool>(mat_); }
  Mat to_dense() const;
  UnitaryOp adjoint() const;

  // Applies the op to `amps` (length 2^total_qubits) on the given global
  // qubit indices, restricted to basis states satisfying outer_controls.
  void apply(Vec& amps, int total_qubits, const std::vector<int>& qubits,
             const std::vector<Ctrl>& outer_controls = {},
             bool take_adjoint = false) const;

 private:
  int arity_ = 0;
  std::shared_ptr<const Mat> mat_;
  std::shared_ptr<const std::vector<std::uint32_t>> perm_;
  std::vector<GateStep> steps_;
  std::function<bool(std::uint64_t)> guard_;
};

// ---------------------------------------------------------------------------
// States and distributions

struct StateVector {
  RegisterLayout layout;
  Vec amps;

  static StateVector zero(RegisterLayout layout);
  // Basis state with the listed registers set to the given values (others 0).
  static StateVector basis(
      RegisterLayout layout,
      const std::vector<std::pair<std::string, std::uint64_t>>& values);
};

struct DensityMatrix {
  Mat m;
  int dim() const { return static_cast<int>(m.rows()); }
};

// Probabilities over bitstrings of one fixed width.
struct Distribution {
  std::map<std::string, double> p;
};

// ---------------------------------------------------------------------------
// Operations

StateVector apply_unitary(const StateVector& state, const UnitaryOp& u,
                          const std::vector<std::string>& targets);

StateVector controlled_apply(const StateVector& state,
                             const std::string& control,
                             const std::string& predicate, const UnitaryOp& u,
                             const std::vector<std::string>& targets);

// R = X (x) |psi><psi| + I (x) (I - |psi><psi|); qubit 0 is the flag.
UnitaryOp reflection_about(const Vec& psi);

std::tuple<std::string, StateVector, double> measure_register(
    const StateVector& state, const std::string& reg, Rng& rng);

Distribution branch_probabilities(const StateVector& state,
                                  const std::string& reg);

DensityMatrix partial_trace(const StateVector& state,
                            const std::vector<std::string>& keep);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

double hellinger_sq(const Distribution& d1, const Distribution& d2);
double tv_distance(const Distribution& d1, const Distribution& d2);

// ---------------------------------------------------------------------------
// Random objects (Haar unitaries via QR of a Ginibre matrix)

Vec random_state(int qubits, Rng& rng);
Mat random_unitary_matrix(int dim, Rng& rng);
UnitaryOp random_unitary(int qubits, Rng& rng);

double max_abs_diff(const Mat& a, const Mat& b);

}  // namespace otpsim
