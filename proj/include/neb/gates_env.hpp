#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "neb/common.hpp"
#include "neb/rng.hpp"

namespace neb::gates {

enum class Kind { NParity, SimpleAlu };
enum class Mode { Enumerated, Sampled };

// Simple ALU instruction codes, in curriculum order. Level L activates
// codes 0..min(L, 8): level 1 switches between MUX and NAND with a single
// control bit, each later level adds the next operation. Level 9 is
// accepted for range compatibility and is identical to level 8 (all nine
// operations); codes 9-15 are never presented.
enum AluOp {
    kMux = 0,
    kNand = 1,
    kNot = 2,
    kAnd = 3,
    kXor = 4,
    kInc = 5,
    kDec = 6,
    kShl = 7,
    kShr = 8,
};

struct Task {
    Kind kind = Kind::NParity;
    Mode mode = Mode::Enumerated;
    int level = 1;
    int parity_bits = 6;  // observation width N for N-parity
};

int max_level(Kind kind, int parity_bits);
int obs_size(const Task& task);    // parity: N; alu: 4 control + 4 input
int action_size(Kind kind);        // parity: 1; alu: 4
int active_data_bits(const Task& task);  // parity: level+1 active input bits
int alu_control_width(int level);
int alu_code_count(int level);
// Steps in one enumerated episode: parity 2^(level+1); alu codes*16.
int episode_length(const Task& task);

// Ground-truth circuit output for one observation (inactive bits must be 0).
// Observation layout: parity = N data bits; alu = [c3 c2 c1 c0 i3 i2 i1 i0]
// with each group most-significant bit first. Unary ALU ops act on the full
// input nibble; NAND/AND/XOR treat it as two 2-bit operands A=(i3,i2),
// B=(i1,i0) writing the result into (o1,o0); MUX outputs input bit
// 2*i3 + i2 (LSB index) on o0. INC/DEC wrap mod 16, shifts fill with zeros.
std::vector<int> oracle(const Task& task, std::span<const int> input_bits);

struct State {
    int step = 0;
    std::vector<int> current;  // current input bits, obs_size entries
};

struct StepResult {
    std::vector<double> observation;  // next input (or zeros when done)
    double reward = 0.0;
    bool done = false;
};

// Enumerated mode presents inputs in canonical binary counting order
// (parity: active bits count up; alu: codes ascending, nibble counting up
// within each code). Sampled mode draws the active bits uniformly, with a
// single-step episode.
std::pair<State, std::vector<double>> reset(const Task& task, Rng& rng);
StepResult step(const Task& task, State& state, std::span<const double> actions, Rng& rng);

using Policy = std::function<std::vector<double>(std::span<const double>)>;

// Fraction of the level's enumerated input combinations for which the
// policy gets every output bit right (actions thresholded at 0.5).
double evaluate_success(const Task& task, int level, const Policy& policy);

// Full oracle table for a (task, level) as CSV.
void dump_truth_table(const Task& task, int level, std::ostream& out);

}  // namespace neb::gates
