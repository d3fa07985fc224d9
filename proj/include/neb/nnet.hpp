#pragma once

#include <span>
#include <string>
#include <vector>

#include "neb/common.hpp"
#include "neb/rng.hpp"

namespace neb::nnet {

enum class Activation { Identity, Sigmoid, Tanh, Relu, Step, Sine, Gauss, Abs };

double activate(Activation a, double x);
// Derivative in terms of the pre-activation and the activation value.
// Step and Abs use the zero / sign subgradient at the kink.
double activate_grad(Activation a, double pre, double value);
const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

enum class NodeRole { Input, Hidden, Output };
const char* role_name(NodeRole r);
NodeRole role_from_name(const std::string& name);

struct DagNode {
    int id = 0;
    NodeRole role = NodeRole::Hidden;
    Activation act = Activation::Identity;
    double bias = 0.0;
};

struct DagEdge {
    int src = 0;
    int dst = 0;
    double weight = 0.0;
    bool enabled = true;
};

// Feedforward phenotype over an arbitrary DAG. Construction computes a
// topological evaluation order over the enabled subgraph and throws
// StructuralError if that subgraph has a cycle. Input nodes take their value
// directly from the input vector (their bias is ignored); every other node
// evaluates activation(bias + sum of enabled incoming weight*value), so a
// node with no incoming edges still has a defined value.
class DagNetwork {
public:
    DagNetwork(std::vector<DagNode> nodes, std::vector<DagEdge> edges);

    std::vector<double> forward(std::span<const double> inputs) const;

    int input_count() const { return static_cast<int>(input_idx_.size()); }
    int output_count() const { return static_cast<int>(output_idx_.size()); }
    const std::vector<DagNode>& nodes() const { return nodes_; }
    const std::vector<DagEdge>& edges() const { return edges_; }
    // Evaluation order as indices into nodes().
    const std::vector<int>& evaluation_order() const { return order_; }
    // Replace the evaluation order with another topological order of the
    // enabled subgraph (throws StructuralError if it is not one).
    void set_evaluation_order(const std::vector<int>& order);

private:
    struct Incoming {
        int src_idx;
        double weight;
    };

    std::vector<DagNode> nodes_;
    std::vector<DagEdge> edges_;
    std::vector<std::vector<Incoming>> incoming_;  // per node, in edge-list order
    std::vector<int> input_idx_;
    std::vector<int> output_idx_;
    std::vector<int> order_;
};

// Fixed-topology fully connected network. Layer l (1-based, l = 1..L) maps
// activations of layer l-1 through weights[l-1] and biases[l-1]. When skips
// is set, layer l additionally receives skip_weights[l-1][j] applied to the
// activations of layer j for every j <= l-2, summed pre-activation.
struct LayeredNet {
    std::vector<int> sizes;               // L+1 entries, sizes[0] = input width
    std::vector<Activation> acts;         // L entries
    bool skips = false;
    std::vector<Mat> weights;             // L entries
    std::vector<Vec> biases;              // L entries
    std::vector<std::vector<Mat>> skip_weights;  // L entries; entry l-1 has l-1 mats

    static LayeredNet make(std::vector<int> sizes, std::vector<Activation> acts,
                           bool skips = false);
    // He/Xavier-flavoured init: weights ~ N(0, gain/sqrt(fan_in)), biases 0.
    void init_random(Rng& rng, double gain = 1.0);
    int param_count() const;
    int input_size() const { return sizes.front(); }
    int output_size() const { return sizes.back(); }

    bool operator==(const LayeredNet& o) const = default;
};

struct ForwardCache {
    std::vector<Vec> activations;  // L+1 entries, [0] is the input
    std::vector<Vec> preacts;      // L entries
};

Vec forward_layered(const LayeredNet& net, std::span<const double> input,
                    ForwardCache* cache = nullptr);

// Exact reverse-mode gradient of grad_outputs . outputs with respect to all
// parameters, in flatten() layout. The cache must come from forward_layered
// on the same network.
Vec backprop(const LayeredNet& net, const ForwardCache& cache,
             std::span<const double> grad_outputs);

// Shape descriptor for flat parameter vectors. Flatten layout: for each
// layer (in order) weights row-major then biases; all skip matrices last,
// ordered by layer then by source layer.
struct NetLayout {
    std::vector<int> sizes;
    std::vector<Activation> acts;
    bool skips = false;

    int param_count() const;
    bool operator==(const NetLayout& o) const = default;
};

NetLayout layout_of(const LayeredNet& net);
Vec flatten(const LayeredNet& net);
LayeredNet unflatten(const NetLayout& layout, std::span<const double> values);

}  // namespace neb::nnet
