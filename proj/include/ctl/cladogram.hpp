#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctl/rng.hpp"

namespace ctl {

enum class VertexKind : std::uint8_t { root, internal, leaf, free };

// Leaf-labelled rooted binary tree over an index arena. The edge above a
// non-root vertex is identified with that vertex's id.
class RootedBinaryTree {
public:
    RootedBinaryTree();  // root with the single leaf 1

    static RootedBinaryTree random(int n_leaves, Rng& rng);

    int n_leaves() const { return n_leaves_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<int>& edges() const { return edges_; }
    bool has_edge(int e) const;

    int root() const { return 0; }
    VertexKind kind(int v) const { return nodes_.at(static_cast<std::size_t>(v)).kind; }
    int parent(int v) const { return nodes_.at(static_cast<std::size_t>(v)).parent; }
    std::array<int, 2> children(int v) const { return nodes_.at(static_cast<std::size_t>(v)).child; }
    int label(int v) const { return nodes_.at(static_cast<std::size_t>(v)).label; }
    int leaf_of(int label) const;
    int sibling(int v) const;
    bool is_ancestor(int anc, int v) const;  // anc on the path from v to the root (inclusive)
    std::vector<int> leaves_below(int v) const;
    std::size_t arena_size() const { return nodes_.size(); }

    void remove_leaf(int label);
    // Returns the new internal vertex; the new leaf is its second child.
    int insert_leaf(int edge, int label);
    void relabel(int from, int to);
    // Poissonized death of the only leaf: leaves the bare root.
    void clear_last_leaf();

    // Throws std::logic_error on any broken invariant.
    void audit() const;

    std::string canonical() const;
    std::string canonical(int v) const;

    bool operator==(const RootedBinaryTree& o) const { return canonical() == o.canonical(); }

private:
    struct Node {
        VertexKind kind = VertexKind::free;
        int label = 0;
        int parent = -1;
        std::array<int, 2> child{-1, -1};
    };

    int alloc(VertexKind k);
    void release(int v);
    void add_edge(int v);
    void drop_edge(int v);
    void replace_child(int p, int old_c, int new_c);

    std::vector<Node> nodes_;
    std::vector<int> free_;
    std::vector<int> edges_;
    std::vector<int> edge_pos_;
    std::vector<int> leaf_of_label_;
    int n_leaves_ = 0;
};

enum class EventKind : std::uint8_t { death, birth };

struct ChainEvent {
    double time = 0.0;
    std::uint64_t step = 0;
    EventKind kind = EventKind::death;
    int label = 0;
    int edge = -1;
    int relabeled_from = 0;  // Poissonized death: label moved onto `label`, 0 if none
};

std::string to_json_line(const ChainEvent& e);

ChainEvent discrete_step(RootedBinaryTree& tree, Rng& rng);

// Hooks are called before a death and after a birth; returning false stops the run.
struct ChainObserver {
    virtual ~ChainObserver() = default;
    virtual bool before_death(const RootedBinaryTree&, int /*leaf_vertex*/) { return true; }
    virtual bool after_birth(const RootedBinaryTree&, int /*edge*/, int /*new_internal*/,
                             int /*new_leaf*/) {
        return true;
    }
};

struct PoissonizedRun {
    std::vector<ChainEvent> events;
    std::optional<double> died_at;
    double end_time = 0.0;
};

PoissonizedRun poissonized_run(RootedBinaryTree& tree, double horizon, Rng& rng,
                               ChainObserver* observer = nullptr, bool keep_events = true);

struct SubtreeTracker {
    int vertex = -1;
    int side = 0;
    std::vector<std::pair<double, int>> leaf_count_path;
    std::optional<double> extinct_at;
    std::optional<double> censored_at;  // the other side died first, the marked vertex vanished
};

// Follows both non-root parts below internal vertex u until one of them dies.
std::array<SubtreeTracker, 2> track_parts(RootedBinaryTree tree, int u, double horizon, Rng& rng);
SubtreeTracker track_subtree(RootedBinaryTree tree, int u, int side, double horizon, Rng& rng);

std::vector<RootedBinaryTree> enumerate_rooted_shapes(int n);
std::uint64_t double_factorial(int k);

// Exact one-step transition probabilities of the discrete chain, shapes in
// enumerate_rooted_shapes order.
std::vector<std::vector<double>> exact_transition_matrix(int n);

}  // namespace ctl
