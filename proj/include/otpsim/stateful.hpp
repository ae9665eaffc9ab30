#pragma once

// Stateful programs with forward/inverse oracle access, functional
// equivalence testing, a toy Pauli-mask authentication scheme, and the
// authenticated stateful-obfuscation construction.

#include "otpsim/qsim.hpp"

namespace otpsim {

// ---------------------------------------------------------------------------
// Stateful programs and query scripts

// A pair (U, |psi>): U acts on (query, state), forward queries apply U,
// inverse queries U^dag. The state register persists across queries.
struct StatefulProgram {
  int query_width = 0;
  int state_width = 0;
  UnitaryOp u;
  Vec initial_state;  // dimension 2^state_width
};

enum class StepKind { local, forward, inverse };

struct StatefulStep {
  StepKind kind = StepKind::local;
  UnitaryOp op;                      // local steps only
  std::vector<std::string> targets;  // subset of {"A", "Q"}
};

struct QueryScript {
  int adversary_width = 0;
  std::vector<StatefulStep> steps;
};

// Runs the script with the internal register hidden; returns the reduced
// state on (adversary, query).
DensityMatrix run_stateful(const StatefulProgram& prog,
                           const QueryScript& script);

double functional_equiv(const StatefulProgram& p1, const StatefulProgram& p2,
                        const std::vector<QueryScript>& scripts);

// Increments the internal counter mod 2^n and XORs it into the query
// register: outputs 1, then 2, ...
StatefulProgram counting_program(int n);
// XORs a fixed value into the query register; no internal state.
StatefulProgram constant_program(int n, std::uint64_t value);

StatefulProgram random_stateful(int query_width, int state_width, Rng& rng);
QueryScript random_stateful_script(int adversary_width, int query_width,
                                   int n_locals, int n_queries, Rng& rng);

// ---------------------------------------------------------------------------
// Toy quantum authentication: Pauli one-time pad plus computational traps

struct QasKey {
  int n = 0;
  int t = 0;
  std::uint64_t x_mask = 0;  // over n + t qubits, qubit 0 = most significant
  std::uint64_t z_mask = 0;
};

QasKey qas_keygen(int n, int t, Rng& rng);

// X^x Z^z as a dense matrix on n + t qubits.
Mat qas_mask_matrix(const QasKey& key);

// Appends |0^t> traps and applies the mask.
Vec qas_enc(const QasKey& key, const Vec& psi);

// Exact probability that verification accepts the given encoded state.
double qas_ver_prob(const QasKey& key, const Vec& enc);

struct QasDecResult {
  bool accept = false;
  Vec state;  // dimension 2^n when accepted
};

// Unmasks, measures the traps, and returns the data register or rejects.
QasDecResult qas_dec(const QasKey& key, const Vec& enc, Rng& rng);

// Pauli key rewrite: XORs the given corrections into the masks.
QasKey qas_key_update(const QasKey& key, std::uint64_t dx, std::uint64_t dz);

// ---------------------------------------------------------------------------
// Authenticated stateful obfuscation

// Samples a key, encodes the initial state, and wraps U as
// [unmask; U controlled on all traps zero; remask]. Basis states failing
// trap verification pass through untouched.
StatefulProgram stateful_obfuscate(const StatefulProgram& prog, int traps,
                                   Rng& rng);

}  // namespace otpsim
