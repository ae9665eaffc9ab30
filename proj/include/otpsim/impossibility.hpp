#pragma once

// The three circuit families (constant, lossy, injective), a transparent
// reference compiler into sampling programs, and the entanglement-testing
// adversary with exact probability extraction.

#include "otpsim/cseq.hpp"
#include "otpsim/lossy.hpp"

namespace otpsim {

// A quantum sampling program (rho, Eval): rho is a labeled mixture of pure
// states on the program register, Eval acts on (X, Y, P) and XORs the sample
// into Y.
struct SamplingProgram {
  int n_x = 0;
  int n_y = 0;
  int p_width = 0;
  std::vector<std::pair<double, Vec>> components;
  UnitaryOp eval;
};

// Output distribution on Y for the classical input x (weighted over the
// mixture).
Distribution sampling_output(const SamplingProgram& prog, std::uint64_t x);

// Transparent compiler: program state uniform over the first `support` basis
// states of the randomness register (all of them when support == 0), Eval
// XORs f(x; r) into Y.
SamplingProgram reference_otp(const RandomizedFunction& f, int support = 0);

// ---------------------------------------------------------------------------
// Families. Ciphertext tuples are truncated to an enumerated index of the
// support, shared between the fresh and mixture forms.

struct FamilyMember {
  std::string kind;  // constant | lossy | injective
  RandomizedFunction f;  // y = ciphertext index
  int support = 0;       // randomness support (= 2^{n_r} here)
  std::vector<GroupActionKey> keys;  // one per message bit
};

// Fixed ciphertext of 0 under a lossy key; ignores (x, r).
FamilyMember family_constant(int n, Rng& rng);
// Per-bit injective keys at N = 4 with one shared randomness value.
FamilyMember family_injective(int n, Rng& rng);
// Per-bit perfectly lossy keys at N = 4 (h != 0) with independent
// randomness per bit.
FamilyMember family_lossy(int n, Rng& rng);

// The fresh-randomness program for a family member.
SamplingProgram fresh_program(const FamilyMember& member);
// The one-time-equivalent mixture of constants: each component fixes r* and
// always encrypts 0.
SamplingProgram mixture_program(const FamilyMember& member);

// Largest TV between the two programs' output distributions over all inputs.
double max_output_tv(const SamplingProgram& a, const SamplingProgram& b);

// ---------------------------------------------------------------------------
// The adversary

// Prepares sum_x |x,x> on (X, X'), runs Eval, CNOTs Y onto Y', runs
// Eval^dag, and projects (X, X') back onto the initial state. Returns the
// exact probability that the check fails.
double adversary_prob_of_1(const SamplingProgram& prog);

// Builds Pi_inj (from the supports of f) and Pi_++ densely and returns
// ||Pi_inj Pi_++ Pi_inj||. Equals 2^{-n} when the supports are disjoint.
double projector_norm(const RandomizedFunction& f, int support = 0);

// ---------------------------------------------------------------------------
// Experiment report

struct ImpossibilityRow {
  std::string family;
  std::string form;  // fresh | mixture
  int n = 0;
  std::string key_mode;
  double prob_of_1 = 0.0;
  double projector_norm = 0.0;
  double max_pair_tv = 0.0;
};

std::vector<ImpossibilityRow> impossibility_experiment(Rng& rng);

}  // namespace otpsim
