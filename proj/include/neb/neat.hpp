#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "neb/nnet.hpp"
#include "neb/rng.hpp"

namespace neb::neat {

using nnet::Activation;
using nnet::NodeRole;

struct NodeGene {
    int id = 0;
    NodeRole role = NodeRole::Hidden;
    Activation act = Activation::Sigmoid;
    double bias = 0.0;
};

struct ConnGene {
    int innovation = 0;
    int in_node = 0;
    int out_node = 0;
    double weight = 0.0;
    bool enabled = true;
};

// Genome invariants: nodes sorted by id, connections sorted by innovation,
// no duplicate (in,out) pair, enabled subgraph acyclic.
struct NeatGenome {
    std::vector<NodeGene> nodes;
    std::vector<ConnGene> conns;

    nnet::DagNetwork decode() const;
    bool has_conn(int in_node, int out_node) const;
    const NodeGene* find_node(int id) const;
    int max_innovation() const;
};

// Assigns innovation numbers and node ids. Within one generation the same
// structural event (new connection between a pair, or splitting a given
// connection) always receives the same ids; begin_generation() starts a new
// event scope without resetting the counters.
class InnovationRegistry {
public:
    explicit InnovationRegistry(int first_node_id = 0) : next_node_id_(first_node_id) {}

    void begin_generation();
    int connection_innovation(int in_node, int out_node);

    struct NodeSplit {
        int node_id;
        int in_innovation;
        int out_innovation;
    };
    NodeSplit node_split(int conn_innovation, int in_node, int out_node);

    int next_innovation() const { return next_innovation_; }
    int next_node_id() const { return next_node_id_; }
    void reserve_node_ids(int past_last_id);

private:
    int next_innovation_ = 0;
    int next_node_id_ = 0;
    std::map<std::pair<int, int>, int> conn_events_;
    std::map<int, NodeSplit> split_events_;
};

struct NeatConfig {
    int population = 150;
    int species_target = 10;  // also the hard cap on species count

    double prob_add_conn = 0.2;
    double prob_del_conn = 0.2;
    double prob_add_node = 0.2;
    double prob_del_node = 0.1;
    double conn_mutate_rate = 0.1;  // per connection gene: weight perturbation
    double node_mutate_rate = 0.1;  // per node gene: bias perturbation

    double weight_sigma = 0.5;
    double weight_clip = 5.0;
    double act_resample_prob = 0.25;  // within a node mutation, when choices exist

    double c1 = 1.0, c2 = 1.0, c3 = 0.4;
    double compat_threshold = 3.0;
    int elitism = 1;
    int stagnation = 20;
    double survival_fraction = 0.5;

    Activation hidden_act = Activation::Sigmoid;
    Activation output_act = Activation::Sigmoid;
    // When non-empty, hidden-node activations are drawn from this set and
    // node mutation may resample them (CPPN mode).
    std::vector<Activation> act_choices;
};

struct Species {
    NeatGenome representative;
    std::vector<int> members;       // indices into the current population
    double best_fitness = 0.0;
    bool has_best = false;
    int stagnation = 0;
};

// Fully connected input->output genome, weights ~ N(0,1).
NeatGenome initial_genome(int n_inputs, int n_outputs, const NeatConfig& cfg,
                          InnovationRegistry& registry, Rng& rng);

NeatGenome mutate(const NeatGenome& genome, InnovationRegistry& registry, Rng& rng,
                  const NeatConfig& cfg);

// Matching genes take their weight from a uniformly chosen parent; gene set,
// enabled flags, and disjoint/excess genes come from the fitter parent (so
// the child topology is the fitter parent's, which keeps it acyclic). For
// equal fitness the caller passes a uniformly chosen parent as `fitter`.
NeatGenome crossover(const NeatGenome& fitter, const NeatGenome& other, Rng& rng);

double compatibility_distance(const NeatGenome& a, const NeatGenome& b, double c1, double c2,
                              double c3);

// Assigns each genome to the first previous species within threshold, else
// founds a new one (up to cfg.species_target; overflow joins the nearest).
std::vector<Species> speciate(const std::vector<NeatGenome>& population,
                              const std::vector<Species>& previous, double threshold,
                              const NeatConfig& cfg);

std::vector<NeatGenome> next_generation(const std::vector<NeatGenome>& population,
                                        const std::vector<double>& fitnesses,
                                        std::vector<Species>& species,
                                        InnovationRegistry& registry, Rng& rng,
                                        const NeatConfig& cfg);

// Evolution loop state: population, species bookkeeping, and the adaptive
// compatibility threshold.
class Evolution {
public:
    Evolution(int n_inputs, int n_outputs, const NeatConfig& cfg, Rng& rng);

    const std::vector<NeatGenome>& population() const { return population_; }
    const std::vector<Species>& species() const { return species_; }
    double threshold() const { return threshold_; }
    InnovationRegistry& registry() { return registry_; }

    // One generation: speciate, reproduce. fitnesses[i] belongs to
    // population()[i].
    void advance(const std::vector<double>& fitnesses, Rng& rng);

private:
    NeatConfig cfg_;
    InnovationRegistry registry_;
    std::vector<NeatGenome> population_;
    std::vector<Species> species_;
    double threshold_;
    int n_inputs_, n_outputs_;
};

std::string genome_to_text(const NeatGenome& genome);
NeatGenome genome_from_text(const std::string& text);

}  // namespace neb::neat
