#pragma once

// Self-adjoint oracle built from a channel dilation (query = controlled
// un-eval, marked reflection, controlled eval), the program-state simulator
// that shares the same engine, and a script harness for indistinguishability
// checks.

#include "otpsim/channels.hpp"

namespace otpsim {

// One step of an adversary script: either a local unitary on named visible
// registers or an oracle query.
struct ScriptStep {
  bool is_query = false;
  UnitaryOp local;
  std::vector<std::string> targets;
};

using AdversaryScript = std::vector<ScriptStep>;

// Interaction harness shared by every oracle flavor. Visible registers come
// first (adversary workspace, then query registers); hidden registers are
// appended and initialized from hidden_init. run_oracle_script returns the
// reduced state on the visible registers after the script.
struct OracleSpec {
  std::vector<std::pair<std::string, int>> visible;
  std::vector<std::pair<std::string, int>> hidden;
  Vec hidden_init;
  std::function<StateVector(const StateVector&)> query;
};

DensityMatrix run_oracle_script(const OracleSpec& spec,
                                const AdversaryScript& script);

// ---------------------------------------------------------------------------
// The oracle

// Query registers Q, hidden program register P (may be empty) and control
// bit C. A query applies eval^dag on (Q, P) controlled on C = 1, then the
// reflection on (C, P), then eval controlled on C = 1.
struct SeqOracle {
  int query_width = 0;
  int p_width = 0;
  UnitaryOp eval;        // on (Q, P)
  UnitaryOp reflection;  // on (flag, P), flag first
  Vec hidden_init;       // on (P, C), dimension 2^(p_width + 1)

  static SeqOracle canonical(const ChannelDilation& ch);
  static SeqOracle sim_prime(const TestableProgram& prog, int query_width);
};

// Applies one query in place on a joint state holding the named registers.
// qregs lists the registers spanned by eval's query part, in eval order.
StateVector seq_query(const SeqOracle& oracle, StateVector joint,
                      const std::vector<std::string>& qregs,
                      const std::string& preg, const std::string& creg);

// Full query unitary on (Q, P, C) as one op.
UnitaryOp build_seq_matrix(const ChannelDilation& ch);

OracleSpec oracle_spec(const SeqOracle& oracle, int adversary_width);

DensityMatrix run_script(const SeqOracle& oracle, int adversary_width,
                         const AdversaryScript& script);

// ---------------------------------------------------------------------------
// Indistinguishability checks

// Both dilations must present the same channel (checked through their Choi
// states; throws precondition_error otherwise). Returns the largest trace
// distance between the two adversaries' final visible states over the
// scripts.
double check_dilation_hiding(const ChannelDilation& a,
                             const ChannelDilation& b, int adversary_width,
                             const std::vector<AdversaryScript>& scripts);

// Same, comparing the canonical oracle for ch against the simulator built
// from prog. Requires matching Choi states.
double check_sim_prime(const ChannelDilation& ch, const TestableProgram& prog,
                       int adversary_width,
                       const std::vector<AdversaryScript>& scripts);

AdversaryScript random_script(int adversary_width, int query_width,
                              int n_locals, int n_queries, Rng& rng);

}  // namespace otpsim
