#include "neb/gates_env.hpp"

#include <algorithm>
#include <cmath>

namespace neb::gates {

namespace {

constexpr int kAluControlBits = 4;
constexpr int kAluDataBits = 4;
constexpr int kAluOps = 9;

int bit_threshold(double a) { return a > 0.5 ? 1 : 0; }

// Packs bits given most-significant first.
int pack_bits(std::span<const int> bits) {
    int v = 0;
    for (int b : bits) v = (v << 1) | (b & 1);
    return v;
}

void unpack_bits(int value, int width, int* out) {
    for (int i = 0; i < width; ++i) out[i] = (value >> (width - 1 - i)) & 1;
}

std::vector<int> enumerated_input(const Task& task, int index) {
    std::vector<int> bits(obs_size(task), 0);
    if (task.kind == Kind::NParity) {
        unpack_bits(index, active_data_bits(task), bits.data());
    } else {
        int code = index / 16;
        int nibble = index % 16;
        int w = alu_control_width(task.level);
        // Active control bits are the low w bits, at positions 4-w .. 3.
        for (int i = 0; i < w; ++i)
            bits[kAluControlBits - 1 - i] = (code >> i) & 1;
        unpack_bits(nibble, kAluDataBits, bits.data() + kAluControlBits);
    }
    return bits;
}

std::vector<double> to_obs(const std::vector<int>& bits) {
    std::vector<double> obs(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) obs[i] = static_cast<double>(bits[i]);
    return obs;
}

}  // namespace

int max_level(Kind kind, int parity_bits) {
    return kind == Kind::NParity ? parity_bits - 1 : 9;
}

int obs_size(const Task& task) {
    return task.kind == Kind::NParity ? task.parity_bits : kAluControlBits + kAluDataBits;
}

int action_size(Kind kind) { return kind == Kind::NParity ? 1 : kAluDataBits; }

int active_data_bits(const Task& task) {
    if (task.kind == Kind::NParity) return task.level + 1;
    return kAluDataBits;
}

int alu_control_width(int level) {
    int codes = alu_code_count(level);
    int w = 0;
    while ((1 << w) < codes) ++w;
    return w;
}

int alu_code_count(int level) { return std::min(level, kAluOps - 1) + 1; }

int episode_length(const Task& task) {
    if (task.kind == Kind::NParity) return 1 << active_data_bits(task);
    return alu_code_count(task.level) * 16;
}

std::vector<int> oracle(const Task& task, std::span<const int> input_bits) {
    if (static_cast<int>(input_bits.size()) != obs_size(task))
        throw DimensionError("gates oracle: wrong input width");
    if (task.kind == Kind::NParity) {
        int parity = 0;
        for (int b : input_bits) parity ^= (b & 1);
        return {parity};
    }
    int code = pack_bits(input_bits.first(kAluControlBits));
    int v = pack_bits(input_bits.subspan(kAluControlBits, kAluDataBits));
    if (code >= alu_code_count(task.level))
        throw PreconditionError("gates oracle: control code " + std::to_string(code) +
                                " is not active at level " + std::to_string(task.level));
    int i3 = (v >> 3) & 1, i2 = (v >> 2) & 1, i1 = (v >> 1) & 1, i0 = v & 1;
    int out = 0;
    switch (code) {
        case kMux: out = (v >> (2 * i3 + i2)) & 1; break;
        case kNand: out = ((!(i3 && i1)) << 1) | (!(i2 && i0)); break;
        case kNot: out = (~v) & 0xF; break;
        case kAnd: out = ((i3 & i1) << 1) | (i2 & i0); break;
        case kXor: out = ((i3 ^ i1) << 1) | (i2 ^ i0); break;
        case kInc: out = (v + 1) & 0xF; break;
        case kDec: out = (v + 15) & 0xF; break;
        case kShl: out = (v << 1) & 0xF; break;
        case kShr: out = v >> 1; break;
        default: break;
    }
    std::vector<int> bits(kAluDataBits);
    unpack_bits(out, kAluDataBits, bits.data());
    return bits;
}

std::pair<State, std::vector<double>> reset(const Task& task, Rng& rng) {
    if (task.level < 1 || task.level > max_level(task.kind, task.parity_bits))
        throw PreconditionError("gates reset: level " + std::to_string(task.level) +
                                " out of range");
    State st;
    st.step = 0;
    if (task.mode == Mode::Enumerated) {
        st.current = enumerated_input(task, 0);
    } else {
        if (task.kind == Kind::NParity) {
            int active = active_data_bits(task);
            st.current = enumerated_input(task, 0);
            for (int i = 0; i < active; ++i) st.current[i] = rng.uniform_int(2);
        } else {
            int code = rng.uniform_int(alu_code_count(task.level));
            int nibble = rng.uniform_int(16);
            st.current = enumerated_input(task, code * 16 + nibble);
        }
    }
    return {st, to_obs(st.current)};
}

StepResult step(const Task& task, State& state, std::span<const double> actions, Rng& rng) {
    const int n_out = action_size(task.kind);
    if (static_cast<int>(actions.size()) != n_out)
        throw DimensionError("gates step: expected " + std::to_string(n_out) + " actions");
    std::vector<int> expected = oracle(task, state.current);
    int correct = 0;
    for (int i = 0; i < n_out; ++i)
        if (bit_threshold(actions[i]) == expected[i]) ++correct;

    StepResult res;
    res.reward = static_cast<double>(correct) / n_out;
    state.step += 1;
    if (task.mode == Mode::Sampled) {
        res.done = true;
        res.observation.assign(obs_size(task), 0.0);
        (void)rng;
        return res;
    }
    if (state.step >= episode_length(task)) {
        res.done = true;
        res.observation.assign(obs_size(task), 0.0);
    } else {
        state.current = enumerated_input(task, state.step);
        res.observation = to_obs(state.current);
    }
    return res;
}

double evaluate_success(const Task& task, int level, const Policy& policy) {
    Task t = task;
    t.level = level;
    t.mode = Mode::Enumerated;
    const int n = episode_length(t);
    const int n_out = action_size(t.kind);
    int solved = 0;
    for (int e = 0; e < n; ++e) {
        std::vector<int> bits = enumerated_input(t, e);
        std::vector<int> expected = oracle(t, bits);
        std::vector<double> action = policy(to_obs(bits));
        if (static_cast<int>(action.size()) != n_out)
            throw DimensionError("evaluate_success: policy output width mismatch");
        bool all = true;
        for (int i = 0; i < n_out && all; ++i) all = bit_threshold(action[i]) == expected[i];
        if (all) ++solved;
    }
    return static_cast<double>(solved) / n;
}

void dump_truth_table(const Task& task, int level, std::ostream& out) {
    Task t = task;
    t.level = level;
    t.mode = Mode::Enumerated;
    const int width = obs_size(t);
    const int n_out = action_size(t.kind);
    for (int i = 0; i < width; ++i) out << "in" << i << ",";
    for (int i = 0; i < n_out; ++i) out << "out" << i << (i + 1 < n_out ? "," : "\n");
    for (int e = 0; e < episode_length(t); ++e) {
        std::vector<int> bits = enumerated_input(t, e);
        std::vector<int> expected = oracle(t, bits);
        for (int b : bits) out << b << ",";
        for (int i = 0; i < n_out; ++i) out << expected[i] << (i + 1 < n_out ? "," : "\n");
    }
}

}  // namespace neb::gates
