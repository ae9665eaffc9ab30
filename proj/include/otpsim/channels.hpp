#pragma once

// Channels in Stinespring form, testable programs, and Choi-state equality
// checks.

#include "otpsim/qsim.hpp"

namespace otpsim {

struct ChannelDilation {
  int query_width = 0;
  int ancilla_width = 0;
  UnitaryOp u;  // on query_width + ancilla_width qubits, query first
};

struct ChoiState {
  int query_width = 0;
  DensityMatrix m;  // on 2 * query_width qubits (reference, output)
};

// A program given as (|psi>, Eval, R). The query register splits into an
// input part (in_width) and an output part (out_width) with XOR-into-output
// semantics. Eval acts on (input, output, program); R acts on
// (flag, program) and flips the flag exactly on |psi>.
struct TestableProgram {
  Vec program_state;  // dimension 2^p_width (dimension 1 when p_width == 0)
  UnitaryOp eval;
  UnitaryOp reflection;
  int in_width = 0;
  int out_width = 0;
  int p_width = 0;
};

DensityMatrix apply_channel(const ChannelDilation& ch,
                            const DensityMatrix& input);

ChoiState choi_of(const ChannelDilation& ch);

// Choi state of the channel induced by eval with the ancilla initialized to
// the program state.
ChoiState choi_of_program(const TestableProgram& prog);

double choi_max_diff(const ChoiState& a, const ChoiState& b);

TestableProgram testable_from_dilation(const ChannelDilation& ch, int in_width,
                                       int out_width);

// (I (x) v) . U; same channel, different dilation.
ChannelDilation twirl_dilation(const ChannelDilation& ch, const UnitaryOp& v);

Distribution sampling_program_output(const TestableProgram& prog,
                                     const std::string& x);

}  // namespace otpsim
