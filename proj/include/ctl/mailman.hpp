#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctl/rng.hpp"
#include "ctl/street.hpp"

namespace ctl {

// Street generator for a subtree of the given age.
using StreetGenerator = std::function<Street(double age, Rng&)>;

// Streets indexed by address history: a node's children are keyed by the choice made
// on its street (atom index, or clock_choice for the spine end).
class StreetStore {
public:
    static constexpr int clock_choice = -1;
    static constexpr int no_parent = -1;

    struct Node {
        Street street;
        double age = 0.0;
        int parent = no_parent;
        int choice = 0;
        int origin = no_parent;  // node of an earlier store this street was carried from
        std::map<int, int> children;
    };

    StreetStore() = default;
    explicit StreetStore(StreetGenerator gen) : gen_(std::move(gen)) {}

    int add_root(Street s, double age);
    // Existing child, else a fresh street from the generator at child_age.
    int child(int node, int choice, double child_age, Rng& rng);
    int add_child(int node, int choice, Street s, double age);
    bool has_child(int node, int choice) const;

    const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    Node& node(int id) { return nodes_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return nodes_.size(); }
    int root() const { return nodes_.empty() ? no_parent : 0; }
    const StreetGenerator& generator() const { return gen_; }

private:
    StreetGenerator gen_;
    std::vector<Node> nodes_;
};

struct MailmanStep {
    double address = 0.0;  // A
    int bit = 0;           // 1: atom of nu, 0: end of the street
    double age = 0.0;      // mass of the chosen atom, or the clock
    int node = -1;         // street the step was taken on
    int choice = 0;
};

struct Mailman {
    std::vector<MailmanStep> steps;
    std::size_t depth = 0;
    bool terminated = false;  // hit a street with no mass and no clock
    double tail_bound = 0.0;

    double total() const;
    double partial(std::size_t m) const;  // sum of addresses 0..m
};

// Walks the store from the root, creating streets lazily. Degenerate streets end the
// walk; remaining steps are zero.
Mailman sample_mailman(StreetStore& store, std::size_t depth, Rng& rng);

// One step on a street; false if the street has neither mass nor clock.
bool mailman_step(const Street& s, Rng& rng, MailmanStep& out);

// First index where two mailmen differ in (address, bit); depth if never.
std::size_t divergence_index(const Mailman& a, const Mailman& b);

class ProperKTree {
public:
    struct Node {
        int parent = -1;
        double depth = 0.0;
        int label = 0;  // leaf label from 1, 0 for internal vertices and the root
        std::vector<int> children;
    };

    std::size_t leaves() const { return leaf_node_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    double leaf_depth(int label) const;
    double meet_depth(int i, int j) const;
    double distance(int i, int j) const;
    std::size_t zero_edges() const { return zero_edges_; }

    // Four-point condition over every quadruple of leaves; returns the violation count.
    std::size_t four_point_violations(double tol = 1e-9) const;
    std::string to_newick() const;

    // Internal: leaf `label` attached at depth `at` on the path to leaf `anchor`.
    void attach(int label, double leaf_depth, int anchor, double at);
    void first_leaf(double leaf_depth);

private:
    std::vector<Node> nodes_{Node{}};
    std::vector<int> leaf_node_;
    std::size_t zero_edges_ = 0;
};

ProperKTree ktree_from_mailmen(const std::vector<Mailman>& members);

// Meet depth of leaves i and j straight from the recipe.
double recipe_meet_depth(const Mailman& a, const Mailman& b);
double recipe_distance(const Mailman& a, const Mailman& b);

// Leaves 1..j of the tree on k leaves against the tree built from the first j
// mailmen; returns the number of mismatched meet depths.
std::size_t nested_consistency_mismatches(const std::vector<Mailman>& members, std::size_t j);

double leaf_tightness_stat(const ProperKTree& tree);

struct MailmanFamily {
    double level = 0.0;
    StreetStore store;
    std::vector<Mailman> members;
    std::size_t depth = 0;
    // transition bookkeeping
    std::size_t fresh_steps = 0;     // subtree born after the old level
    std::size_t carried_steps = 0;   // subtree carried over from the old store
    std::size_t reused_steps = 0;
    std::size_t unmatched = 0;       // parent lookups that found no age match
};

StreetGenerator entrance_generator();

MailmanFamily sample_family(double a, std::size_t count, std::size_t depth, Rng& rng,
                            StreetGenerator gen = entrance_generator());

// Family at a1 given the family at a0; `scale` is the n of the street transition.
MailmanFamily one_step_transition(MailmanFamily& family, double a1, Rng& rng, double scale = 1000.0);

struct L1Diagnostic {
    double partial = 0.0;
    double rate = 0.0;  // fitted geometric decay of the addresses
    double tail = 0.0;  // geometric tail beyond the truncation
};
L1Diagnostic l1_mass_diagnostic(const Mailman& m);

nlohmann::json to_json(const Mailman& m);
nlohmann::json to_json(const MailmanFamily& f);

}  // namespace ctl
