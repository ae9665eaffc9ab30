#pragma once

// Single-effective-query oracle for classical randomized functions, the
// hybrid oracles connecting it to the program-state simulator, and the two
// cross-simulations between it and the channel oracle for Phi_f.
//
// Encoding: a slot for X u {empty} is data||flag, x -> x||1, empty -> 0...00.
// Same for Y u {empty} and R u {empty}.

#include <iosfwd>

#include "otpsim/seq.hpp"

namespace otpsim {

struct RandomizedFunction {
  int n_x = 0;
  int n_r = 0;
  int n_y = 0;
  std::vector<std::uint64_t> table;  // index x * 2^n_r + r

  std::uint64_t eval(std::uint64_t x, std::uint64_t r) const;
  bool is_deterministic() const;

  static RandomizedFunction random(int n_x, int n_r, int n_y, Rng& rng);
  static RandomizedFunction constant(int n_x, int n_r, int n_y,
                                     std::uint64_t y);
  // Text format: one header line "n_x n_r n_y", then a line "x r y" per
  // table entry (bitstrings).
  void save(std::ostream& os) const;
  static RandomizedFunction load(std::istream& is);
};

// ---------------------------------------------------------------------------
// Building blocks (exposed for the unit tests)

// On (X, D): swaps |x>|empty,empty>_D and |x>|x, +>_D where |+> is the
// uniform superposition of encoded r values. X here is a plain n_x-bit
// control register.
UnitaryOp std_decomp_op(int n_x, int n_r);

// On (W, D): |x,r>_W |D> -> |x, r xor D(x)>_W |D>.
UnitaryOp csto_prime_op(int n_x, int n_r);

// On (Qu, Qb, W): |u,b>|x,r> -> |u xor f(x;r), b xor 1>|x,r>.
UnitaryOp answer_op(const RandomizedFunction& f);

// On (Qx, W): XOR Qx into the x part of the workspace.
UnitaryOp copy_x_op(int n_x, int n_r);

// On (X, D, P): swaps |x>|empty>_D|+>_P and |x>|x>_D|+>_P. D holds an
// encoded x slot, P an encoded r slot.
UnitaryOp record_op(int n_x, int n_r);

// On P (encoded r slot): swaps |empty> and |+>.
UnitaryOp decomp_op(int n_r);

// ---------------------------------------------------------------------------
// The channel Phi_f and the oracle

int phi_f_ancilla_width(const RandomizedFunction& f);

// Unguarded query unitary on (Qx, Qu, Qb, W, D); self-adjoint.
UnitaryOp phi_f_program(const RandomizedFunction& f);

ChannelDilation build_phi_f(const RandomizedFunction& f);

// Same steps with the one-effective-query guard: skip when the database
// already records some x' != x.
UnitaryOp cseq_query_op(const RandomizedFunction& f);

// Oracle specs for the script harness. Visible registers are
// (A?, Qx, Qu, Qb).
OracleSpec cseq_oracle(const RandomizedFunction& f, int adversary_width);
OracleSpec hybrid1_oracle(const RandomizedFunction& f, int adversary_width);
OracleSpec hybrid2_oracle(const RandomizedFunction& f, int adversary_width);

// ---------------------------------------------------------------------------
// The simulator

// The canonical program P_f = (|+>, Eval_f, R_+) with a plain n_r-qubit
// program register.
TestableProgram canonical_program(const RandomizedFunction& f);

// Sim'(P): internal registers (P, D, Wx, Wy, Wb). Feeding canonical_program
// gives hybrid 3.
OracleSpec cseq_sim_oracle(const TestableProgram& prog, int n_x, int n_y,
                           int adversary_width);

// Scripts over visible (A?, Qx, Qu, Qb) with locals on all visible regs.
AdversaryScript random_cseq_script(int adversary_width,
                                   const RandomizedFunction& f, int n_locals,
                                   int n_queries, Rng& rng);

double compare_oracles(const OracleSpec& a, const OracleSpec& b,
                       const std::vector<AdversaryScript>& scripts);

// ---------------------------------------------------------------------------
// Cross-simulations

// Wraps the channel oracle for Phi_f as a testable program implementing f;
// feeding it to cseq_sim_oracle reproduces the classical oracle.
TestableProgram seq_as_program(const RandomizedFunction& f);

// Wraps the classical oracle as a testable program implementing Phi_f;
// feeding it to SeqOracle::sim_prime reproduces the channel oracle.
// Requires a domain with more than one input (n_x >= 1).
TestableProgram cseq_as_program(const RandomizedFunction& f);

}  // namespace otpsim
