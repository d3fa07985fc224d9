#include "neb/nnet.hpp"

#include <algorithm>
#include <cmath>

#include "neb/kernels.hpp"

namespace neb::nnet {

double activate(Activation a, double x) {
    switch (a) {
        case Activation::Identity: return x;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::Tanh: return std::tanh(x);
        case Activation::Relu: return x > 0.0 ? x : 0.0;
        case Activation::Step: return x > 0.0 ? 1.0 : 0.0;
        case Activation::Sine: return std::sin(x);
        case Activation::Gauss: return std::exp(-x * x);
        case Activation::Abs: return std::fabs(x);
    }
    return x;
}

double activate_grad(Activation a, double pre, double value) {
    switch (a) {
        case Activation::Identity: return 1.0;
        case Activation::Sigmoid: return value * (1.0 - value);
        case Activation::Tanh: return 1.0 - value * value;
        case Activation::Relu: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::Step: return 0.0;
        case Activation::Sine: return std::cos(pre);
        case Activation::Gauss: return -2.0 * pre * value;
        case Activation::Abs: return pre > 0.0 ? 1.0 : (pre < 0.0 ? -1.0 : 0.0);
    }
    return 1.0;
}

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Step: return "step";
        case Activation::Sine: return "sine";
        case Activation::Gauss: return "gauss";
        case Activation::Abs: return "abs";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    for (Activation a : {Activation::Identity, Activation::Sigmoid, Activation::Tanh,
                         Activation::Relu, Activation::Step, Activation::Sine, Activation::Gauss,
                         Activation::Abs}) {
        if (name == activation_name(a)) return a;
    }
    throw ParseError("unknown activation name: " + name);
}

const char* role_name(NodeRole r) {
    switch (r) {
        case NodeRole::Input: return "input";
        case NodeRole::Hidden: return "hidden";
        case NodeRole::Output: return "output";
    }
    return "hidden";
}

NodeRole role_from_name(const std::string& name) {
    if (name == "input") return NodeRole::Input;
    if (name == "hidden") return NodeRole::Hidden;
    if (name == "output") return NodeRole::Output;
    throw ParseError("unknown node role: " + name);
}

DagNetwork::DagNetwork(std::vector<DagNode> nodes, std::vector<DagEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    const int n = static_cast<int>(nodes_.size());
    std::vector<int> id_to_idx_keys;
    // Map ids to indices; ids are sparse after node deletions.
    auto find_idx = [&](int id) -> int {
        for (int i = 0; i < n; ++i)
            if (nodes_[i].id == id) return i;
        throw StructuralError("dag edge references unknown node id " + std::to_string(id));
    };

    incoming_.assign(n, {});
    std::vector<std::vector<int>> out_adj(n);
    std::vector<int> indegree(n, 0);
    for (const DagEdge& e : edges_) {
        if (!e.enabled) continue;
        int s = find_idx(e.src);
        int d = find_idx(e.dst);
        incoming_[d].push_back({s, e.weight});
        out_adj[s].push_back(d);
        indegree[d]++;
    }

    for (int i = 0; i < n; ++i) {
        if (nodes_[i].role == NodeRole::Input) input_idx_.push_back(i);
        if (nodes_[i].role == NodeRole::Output) output_idx_.push_back(i);
    }

    // Kahn's algorithm with ascending-index tie order so the default
    // evaluation order is deterministic.
    std::vector<int> ready;
    for (int i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push_back(i);
    order_.reserve(n);
    while (!ready.empty()) {
        std::pop_heap(ready.begin(), ready.end(), std::greater<>{});
        int v = ready.back();
        ready.pop_back();
        order_.push_back(v);
        for (int d : out_adj[v]) {
            if (--indegree[d] == 0) {
                ready.push_back(d);
                std::push_heap(ready.begin(), ready.end(), std::greater<>{});
            }
        }
    }
    std::make_heap(ready.begin(), ready.end(), std::greater<>{});
    if (static_cast<int>(order_.size()) != n)
        throw StructuralError("enabled subgraph contains a cycle");
}

void DagNetwork::set_evaluation_order(const std::vector<int>& order) {
    const int n = static_cast<int>(nodes_.size());
    if (static_cast<int>(order.size()) != n)
        throw StructuralError("evaluation order must cover every node exactly once");
    std::vector<int> pos(n, -1);
    for (int i = 0; i < n; ++i) {
        int v = order[i];
        if (v < 0 || v >= n || pos[v] != -1)
            throw StructuralError("evaluation order is not a permutation");
        pos[v] = i;
    }
    for (int d = 0; d < n; ++d)
        for (const Incoming& in : incoming_[d])
            if (pos[in.src_idx] > pos[d])
                throw StructuralError("evaluation order violates an enabled edge");
    order_ = order;
}

std::vector<double> DagNetwork::forward(std::span<const double> inputs) const {
    if (static_cast<int>(inputs.size()) != input_count())
        throw DimensionError("dag forward: expected " + std::to_string(input_count()) +
                             " inputs, got " + std::to_string(inputs.size()));
    std::vector<double> value(nodes_.size(), 0.0);
    std::vector<char> is_input(nodes_.size(), 0);
    for (size_t k = 0; k < input_idx_.size(); ++k) {
        value[input_idx_[k]] = inputs[k];
        is_input[input_idx_[k]] = 1;
    }
    for (int v : order_) {
        if (is_input[v]) continue;
        double sum = nodes_[v].bias;
        for (const Incoming& in : incoming_[v]) sum += in.weight * value[in.src_idx];
        value[v] = activate(nodes_[v].act, sum);
    }
    std::vector<double> out(output_idx_.size());
    for (size_t k = 0; k < output_idx_.size(); ++k) out[k] = value[output_idx_[k]];
    return out;
}

LayeredNet LayeredNet::make(std::vector<int> sizes, std::vector<Activation> acts, bool skips) {
    if (sizes.size() < 2) throw DimensionError("layered net needs at least input and output sizes");
    if (acts.size() != sizes.size() - 1)
        throw DimensionError("layered net needs one activation per non-input layer");
    for (int s : sizes)
        if (s <= 0) throw DimensionError("layer sizes must be positive");
    LayeredNet net;
    net.sizes = std::move(sizes);
    net.acts = std::move(acts);
    net.skips = skips;
    const int L = static_cast<int>(net.sizes.size()) - 1;
    net.weights.reserve(L);
    net.biases.reserve(L);
    net.skip_weights.resize(L);
    for (int l = 1; l <= L; ++l) {
        net.weights.emplace_back(net.sizes[l], net.sizes[l - 1]);
        net.biases.emplace_back(net.sizes[l], 0.0);
        if (skips)
            for (int j = 0; j <= l - 2; ++j)
                net.skip_weights[l - 1].emplace_back(net.sizes[l], net.sizes[j]);
    }
    return net;
}

void LayeredNet::init_random(Rng& rng, double gain) {
    const int L = static_cast<int>(sizes.size()) - 1;
    for (int l = 0; l < L; ++l) {
        double scale = gain / std::sqrt(static_cast<double>(sizes[l]));
        for (double& w : weights[l].a) w = rng.normal(0.0, scale);
        for (double& b : biases[l]) b = 0.0;
        for (Mat& s : skip_weights[l]) {
            double sscale = gain / std::sqrt(static_cast<double>(s.cols));
            for (double& w : s.a) w = rng.normal(0.0, sscale);
        }
    }
}

int LayeredNet::param_count() const { return layout_of(*this).param_count(); }

Vec forward_layered(const LayeredNet& net, std::span<const double> input, ForwardCache* cache) {
    if (static_cast<int>(input.size()) != net.sizes.front())
        throw DimensionError("layered forward: expected " + std::to_string(net.sizes.front()) +
                             " inputs, got " + std::to_string(input.size()));
    const int L = static_cast<int>(net.sizes.size()) - 1;
    std::vector<Vec> acts(L + 1);
    std::vector<Vec> pres(L);
    acts[0].assign(input.begin(), input.end());
    for (int l = 1; l <= L; ++l) {
        const Mat& w = net.weights[l - 1];
        Vec pre = net.biases[l - 1];
        kernels::matvec_acc(w.a.data(), w.rows, w.cols, acts[l - 1].data(), pre.data());
        if (net.skips)
            for (int j = 0; j <= l - 2; ++j) {
                const Mat& s = net.skip_weights[l - 1][j];
                kernels::matvec_acc(s.a.data(), s.rows, s.cols, acts[j].data(), pre.data());
            }
        Vec act(pre.size());
        for (size_t i = 0; i < pre.size(); ++i) act[i] = activate(net.acts[l - 1], pre[i]);
        pres[l - 1] = std::move(pre);
        acts[l] = std::move(act);
    }
    Vec out = acts[L];
    if (cache != nullptr) {
        cache->activations = std::move(acts);
        cache->preacts = std::move(pres);
    }
    return out;
}

int NetLayout::param_count() const {
    int total = 0;
    const int L = static_cast<int>(sizes.size()) - 1;
    for (int l = 1; l <= L; ++l) total += sizes[l] * sizes[l - 1] + sizes[l];
    if (skips)
        for (int l = 2; l <= L; ++l)
            for (int j = 0; j <= l - 2; ++j) total += sizes[l] * sizes[j];
    return total;
}

NetLayout layout_of(const LayeredNet& net) { return NetLayout{net.sizes, net.acts, net.skips}; }

Vec flatten(const LayeredNet& net) {
    NetLayout lay = layout_of(net);
    Vec out;
    out.reserve(lay.param_count());
    const int L = static_cast<int>(net.sizes.size()) - 1;
    for (int l = 0; l < L; ++l) {
        out.insert(out.end(), net.weights[l].a.begin(), net.weights[l].a.end());
        out.insert(out.end(), net.biases[l].begin(), net.biases[l].end());
    }
    if (net.skips)
        for (int l = 1; l < L; ++l)
            for (const Mat& s : net.skip_weights[l])
                out.insert(out.end(), s.a.begin(), s.a.end());
    return out;
}

LayeredNet unflatten(const NetLayout& layout, std::span<const double> values) {
    if (static_cast<int>(values.size()) != layout.param_count())
        throw DimensionError("unflatten: expected " + std::to_string(layout.param_count()) +
                             " values, got " + std::to_string(values.size()));
    LayeredNet net = LayeredNet::make(layout.sizes, layout.acts, layout.skips);
    const int L = static_cast<int>(net.sizes.size()) - 1;
    size_t off = 0;
    for (int l = 0; l < L; ++l) {
        std::copy_n(values.begin() + off, net.weights[l].size(), net.weights[l].a.begin());
        off += net.weights[l].size();
        std::copy_n(values.begin() + off, net.biases[l].size(), net.biases[l].begin());
        off += net.biases[l].size();
    }
    if (net.skips)
        for (int l = 1; l < L; ++l)
            for (Mat& s : net.skip_weights[l]) {
                std::copy_n(values.begin() + off, s.size(), s.a.begin());
                off += s.size();
            }
    return net;
}

Vec backprop(const LayeredNet& net, const ForwardCache& cache,
             std::span<const double> grad_outputs) {
    const int L = static_cast<int>(net.sizes.size()) - 1;
    if (static_cast<int>(cache.activations.size()) != L + 1 ||
        static_cast<int>(cache.preacts.size()) != L)
        throw StructuralError("backprop: cache does not match network depth");
    for (int l = 0; l <= L; ++l)
        if (static_cast<int>(cache.activations[l].size()) != net.sizes[l])
            throw StructuralError("backprop: cache layer width does not match network");
    if (static_cast<int>(grad_outputs.size()) != net.sizes.back())
        throw DimensionError("backprop: grad_outputs size mismatch");

    NetLayout lay = layout_of(net);
    Vec grad(lay.param_count(), 0.0);

    // Offsets mirror the flatten() layout.
    std::vector<size_t> w_off(L), b_off(L);
    std::vector<std::vector<size_t>> s_off(L);
    {
        size_t off = 0;
        for (int l = 0; l < L; ++l) {
            w_off[l] = off;
            off += static_cast<size_t>(net.sizes[l + 1]) * net.sizes[l];
            b_off[l] = off;
            off += net.sizes[l + 1];
        }
        if (net.skips)
            for (int l = 1; l < L; ++l) {
                s_off[l].resize(l);
                for (int j = 0; j < l; ++j) {
                    s_off[l][j] = off;
                    off += static_cast<size_t>(net.sizes[l + 1]) * net.sizes[j];
                }
            }
    }

    std::vector<Vec> grad_act(L + 1);
    for (int l = 0; l <= L; ++l) grad_act[l].assign(net.sizes[l], 0.0);
    grad_act[L].assign(grad_outputs.begin(), grad_outputs.end());

    for (int l = L; l >= 1; --l) {
        const Vec& pre = cache.preacts[l - 1];
        const Vec& act = cache.activations[l];
        Vec delta(net.sizes[l]);
        for (int i = 0; i < net.sizes[l]; ++i)
            delta[i] = grad_act[l][i] * activate_grad(net.acts[l - 1], pre[i], act[i]);

        const Mat& w = net.weights[l - 1];
        kernels::outer_acc(grad.data() + w_off[l - 1], w.rows, w.cols, delta.data(),
                           cache.activations[l - 1].data());
        kernels::axpy(1.0, delta.data(), grad.data() + b_off[l - 1], delta.size());
        kernels::matvec_t_acc(w.a.data(), w.rows, w.cols, delta.data(),
                              grad_act[l - 1].data());
        if (net.skips)
            for (int j = 0; j <= l - 2; ++j) {
                const Mat& s = net.skip_weights[l - 1][j];
                kernels::outer_acc(grad.data() + s_off[l - 1][j], s.rows, s.cols, delta.data(),
                                   cache.activations[j].data());
                kernels::matvec_t_acc(s.a.data(), s.rows, s.cols, delta.data(),
                                      grad_act[j].data());
            }
    }
    return grad;
}

}  // namespace neb::nnet
