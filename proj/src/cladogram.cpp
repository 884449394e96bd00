#include "ctl/cladogram.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ctl {

RootedBinaryTree::RootedBinaryTree() {
    int r = alloc(VertexKind::root);
    int l = alloc(VertexKind::leaf);
    nodes_[static_cast<std::size_t>(r)].child[0] = l;
    nodes_[static_cast<std::size_t>(l)].parent = r;
    nodes_[static_cast<std::size_t>(l)].label = 1;
    leaf_of_label_ = {-1, l};
    add_edge(l);
    n_leaves_ = 1;
}

RootedBinaryTree RootedBinaryTree::random(int n_leaves, Rng& rng) {
    if (n_leaves < 1) throw std::invalid_argument("random tree: need at least one leaf");
    RootedBinaryTree t;
    for (int k = 2; k <= n_leaves; ++k) {
        int e = t.edges_[rng.uniform_index(t.edges_.size())];
        t.insert_leaf(e, k);
    }
    return t;
}

int RootedBinaryTree::alloc(VertexKind k) {
    int v;
    if (!free_.empty()) {
        v = free_.back();
        free_.pop_back();
        nodes_[static_cast<std::size_t>(v)] = Node{};
    } else {
        v = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        edge_pos_.push_back(-1);
    }
    nodes_[static_cast<std::size_t>(v)].kind = k;
    return v;
}

void RootedBinaryTree::release(int v) {
    nodes_[static_cast<std::size_t>(v)] = Node{};
    free_.push_back(v);
}

void RootedBinaryTree::add_edge(int v) {
    edge_pos_[static_cast<std::size_t>(v)] = static_cast<int>(edges_.size());
    edges_.push_back(v);
}

void RootedBinaryTree::drop_edge(int v) {
    int pos = edge_pos_[static_cast<std::size_t>(v)];
    int last = edges_.back();
    edges_[static_cast<std::size_t>(pos)] = last;
    edge_pos_[static_cast<std::size_t>(last)] = pos;
    edges_.pop_back();
    edge_pos_[static_cast<std::size_t>(v)] = -1;
}

void RootedBinaryTree::replace_child(int p, int old_c, int new_c) {
    auto& ch = nodes_[static_cast<std::size_t>(p)].child;
    if (ch[0] == old_c)
        ch[0] = new_c;
    else if (ch[1] == old_c)
        ch[1] = new_c;
    else
        throw std::logic_error("replace_child: not a child");
}

bool RootedBinaryTree::has_edge(int e) const {
    return e > 0 && static_cast<std::size_t>(e) < nodes_.size() &&
           edge_pos_[static_cast<std::size_t>(e)] >= 0;
}

int RootedBinaryTree::leaf_of(int label) const {
    if (label <= 0 || static_cast<std::size_t>(label) >= leaf_of_label_.size() ||
        leaf_of_label_[static_cast<std::size_t>(label)] < 0)
        throw std::invalid_argument("unknown leaf label " + std::to_string(label));
    return leaf_of_label_[static_cast<std::size_t>(label)];
}

int RootedBinaryTree::sibling(int v) const {
    const auto& ch = nodes_.at(static_cast<std::size_t>(parent(v))).child;
    return ch[0] == v ? ch[1] : ch[0];
}

bool RootedBinaryTree::is_ancestor(int anc, int v) const {
    for (int x = v; x >= 0; x = nodes_[static_cast<std::size_t>(x)].parent)
        if (x == anc) return true;
    return false;
}

std::vector<int> RootedBinaryTree::leaves_below(int v) const {
    std::vector<int> out, stack{v};
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        const Node& n = nodes_[static_cast<std::size_t>(x)];
        if (n.kind == VertexKind::leaf) {
            out.push_back(n.label);
            continue;
        }
        for (int c : n.child)
            if (c >= 0) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void RootedBinaryTree::remove_leaf(int label) {
    int v = leaf_of(label);
    if (n_leaves_ < 2) throw std::invalid_argument("remove_leaf: tree would degenerate");
    int p = parent(v);
    int s = sibling(v);
    int g = parent(p);
    replace_child(g, p, s);
    nodes_[static_cast<std::size_t>(s)].parent = g;
    drop_edge(v);
    drop_edge(p);
    release(v);
    release(p);
    leaf_of_label_[static_cast<std::size_t>(label)] = -1;
    --n_leaves_;
}

int RootedBinaryTree::insert_leaf(int edge, int label) {
    if (!has_edge(edge)) throw std::invalid_argument("insert_leaf: invalid edge id");
    if (label <= 0) throw std::invalid_argument("insert_leaf: label must be positive");
    if (static_cast<std::size_t>(label) < leaf_of_label_.size() &&
        leaf_of_label_[static_cast<std::size_t>(label)] >= 0)
        throw std::invalid_argument("insert_leaf: duplicate label");
    int p = parent(edge);
    int b = alloc(VertexKind::internal);
    int l = alloc(VertexKind::leaf);
    replace_child(p, edge, b);
    Node& nb = nodes_[static_cast<std::size_t>(b)];
    nb.parent = p;
    nb.child = {edge, l};
    nodes_[static_cast<std::size_t>(edge)].parent = b;
    nodes_[static_cast<std::size_t>(l)].parent = b;
    nodes_[static_cast<std::size_t>(l)].label = label;
    add_edge(b);
    add_edge(l);
    if (static_cast<std::size_t>(label) >= leaf_of_label_.size())
        leaf_of_label_.resize(static_cast<std::size_t>(label) + 1, -1);
    leaf_of_label_[static_cast<std::size_t>(label)] = l;
    ++n_leaves_;
    return b;
}

void RootedBinaryTree::relabel(int from, int to) {
    int v = leaf_of(from);
    if (static_cast<std::size_t>(to) < leaf_of_label_.size() && leaf_of_label_[static_cast<std::size_t>(to)] >= 0)
        throw std::invalid_argument("relabel: target label in use");
    if (static_cast<std::size_t>(to) >= leaf_of_label_.size())
        leaf_of_label_.resize(static_cast<std::size_t>(to) + 1, -1);
    leaf_of_label_[static_cast<std::size_t>(from)] = -1;
    leaf_of_label_[static_cast<std::size_t>(to)] = v;
    nodes_[static_cast<std::size_t>(v)].label = to;
}

void RootedBinaryTree::clear_last_leaf() {
    if (n_leaves_ != 1) throw std::logic_error("clear_last_leaf: more than one leaf");
    int v = nodes_[0].child[0];
    int lab = label(v);
    nodes_[0].child[0] = -1;
    drop_edge(v);
    release(v);
    leaf_of_label_[static_cast<std::size_t>(lab)] = -1;
    n_leaves_ = 0;
}

void RootedBinaryTree::audit() const {
    auto fail = [](const std::string& m) { throw std::logic_error("tree audit: " + m); };
    if (nodes_.empty() || nodes_[0].kind != VertexKind::root) fail("missing root");
    if (n_leaves_ == 0) {
        if (nodes_[0].child[0] != -1 || !edges_.empty()) fail("dead tree with edges");
        return;
    }
    if (nodes_[0].child[1] != -1 || nodes_[0].child[0] < 0) fail("root degree != 1");
    if (edges_.size() != static_cast<std::size_t>(2 * n_leaves_ - 1)) fail("edge count != 2n-1");
    std::vector<int> seen_labels;
    std::size_t visited = 0;
    std::vector<int> stack{nodes_[0].child[0]};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++visited;
        if (visited > nodes_.size()) fail("cycle");
        const Node& n = nodes_[static_cast<std::size_t>(v)];
        if (edge_pos_[static_cast<std::size_t>(v)] < 0) fail("vertex without edge entry");
        if (n.kind == VertexKind::leaf) {
            if (n.child[0] != -1 || n.child[1] != -1) fail("leaf with children");
            if (leaf_of_label_.at(static_cast<std::size_t>(n.label)) != v) fail("label map mismatch");
            seen_labels.push_back(n.label);
        } else if (n.kind == VertexKind::internal) {
            for (int c : n.child) {
                if (c < 0) fail("internal vertex degree != 3");
                if (nodes_[static_cast<std::size_t>(c)].parent != v) fail("parent link mismatch");
                stack.push_back(c);
            }
        } else {
            fail("free or root vertex reachable");
        }
    }
    if (visited != edges_.size()) fail("unreachable edges");
    std::sort(seen_labels.begin(), seen_labels.end());
    for (int i = 0; i < n_leaves_; ++i)
        if (seen_labels[static_cast<std::size_t>(i)] != i + 1) fail("labels are not 1..n");
}

std::string RootedBinaryTree::canonical(int v) const {
    const Node& n = nodes_.at(static_cast<std::size_t>(v));
    if (n.kind == VertexKind::leaf) return std::to_string(n.label);
    std::string a = canonical(n.child[0]), b = canonical(n.child[1]);
    if (b < a) std::swap(a, b);
    return "(" + a + "," + b + ")";
}

std::string RootedBinaryTree::canonical() const {
    if (n_leaves_ == 0) return "";
    return canonical(nodes_[0].child[0]);
}

std::string to_json_line(const ChainEvent& e) {
    nlohmann::json j;
    j["t"] = e.time;
    j["kind"] = e.kind == EventKind::death ? "death" : "birth";
    j["label"] = e.label;
    j["edge"] = e.edge;
    return j.dump();
}

ChainEvent discrete_step(RootedBinaryTree& tree, Rng& rng) {
    const int n = tree.n_leaves();
    if (n < 2) throw std::invalid_argument("discrete_step: need at least two leaves");
    ChainEvent ev;
    ev.kind = EventKind::birth;
    ev.label = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    tree.remove_leaf(ev.label);
    ev.edge = tree.edges()[rng.uniform_index(tree.edge_count())];
    tree.insert_leaf(ev.edge, ev.label);
    return ev;
}

PoissonizedRun poissonized_run(RootedBinaryTree& tree, double horizon, Rng& rng,
                               ChainObserver* observer, bool keep_events) {
    if (horizon < 0.0) throw std::invalid_argument("poissonized_run: negative horizon");
    PoissonizedRun run;
    double t = 0.0;
    std::uint64_t step = 0;
    while (tree.n_leaves() > 0) {
        const double n = tree.n_leaves();
        const double deaths = 2.0 * n;
        const double total = deaths + static_cast<double>(tree.edge_count());
        t += rng.exponential() / total;
        if (t > horizon) {
            run.end_time = horizon;
            return run;
        }
        ChainEvent ev;
        ev.time = t;
        ev.step = step++;
        bool go_on = true;
        if (rng.uniform() * total < deaths) {
            ev.kind = EventKind::death;
            ev.label = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(tree.n_leaves())));
            ev.edge = tree.leaf_of(ev.label);
            if (observer) go_on = observer->before_death(tree, ev.edge);
            if (tree.n_leaves() == 1) {
                tree.clear_last_leaf();
                run.died_at = t;
            } else {
                int last = tree.n_leaves();
                tree.remove_leaf(ev.label);
                if (ev.label != last) {
                    tree.relabel(last, ev.label);
                    ev.relabeled_from = last;
                }
            }
        } else {
            ev.kind = EventKind::birth;
            ev.edge = tree.edges()[rng.uniform_index(tree.edge_count())];
            ev.label = tree.n_leaves() + 1;
            int b = tree.insert_leaf(ev.edge, ev.label);
            if (observer) go_on = observer->after_birth(tree, ev.edge, b, tree.leaf_of(ev.label));
        }
        if (keep_events) run.events.push_back(ev);
        if (!go_on) {
            run.end_time = t;
            return run;
        }
    }
    run.end_time = t;
    return run;
}

namespace {

struct PartObserver : ChainObserver {
    int u = -1;
    std::array<int, 2> top{};
    std::array<int, 2> count{};
    std::array<SubtreeTracker, 2>* out = nullptr;
    double now = 0.0;

    int side_of(const RootedBinaryTree& t, int v) const {
        for (int s = 0; s < 2; ++s)
            if (t.is_ancestor(top[static_cast<std::size_t>(s)], v)) return s;
        return -1;
    }

    void record(int s) { (*out)[static_cast<std::size_t>(s)].leaf_count_path.emplace_back(now, count[static_cast<std::size_t>(s)]); }

    bool before_death(const RootedBinaryTree& t, int leaf) override {
        int s = side_of(t, leaf);
        if (s < 0) return true;
        auto si = static_cast<std::size_t>(s);
        --count[si];
        record(s);
        if (count[si] == 0) {
            (*out)[si].extinct_at = now;
            (*out)[1 - si].censored_at = now;
            return false;
        }
        // the branchpoint above the leaf goes away; if it was the top, the sibling takes over
        int p = t.parent(leaf);
        if (p == top[si]) top[si] = t.sibling(leaf);
        return true;
    }

    bool after_birth(const RootedBinaryTree& t, int edge, int b, int) override {
        int s = -1;
        for (int k = 0; k < 2; ++k)
            if (edge == top[static_cast<std::size_t>(k)]) {
                top[static_cast<std::size_t>(k)] = b;
                s = k;
            }
        if (s < 0) s = side_of(t, edge);
        if (s < 0) return true;
        ++count[static_cast<std::size_t>(s)];
        record(s);
        return true;
    }
};

// Observer needs the event time, so the run loop is replicated here with a clock hook.
struct TimedObserver : ChainObserver {
    PartObserver* inner;
    const double* clock;
    bool before_death(const RootedBinaryTree& t, int leaf) override {
        inner->now = *clock;
        return inner->before_death(t, leaf);
    }
    bool after_birth(const RootedBinaryTree& t, int e, int b, int l) override {
        inner->now = *clock;
        return inner->after_birth(t, e, b, l);
    }
};

}  // namespace

std::array<SubtreeTracker, 2> track_parts(RootedBinaryTree tree, int u, double horizon, Rng& rng) {
    if (u <= 0 || static_cast<std::size_t>(u) >= tree.arena_size() || tree.kind(u) != VertexKind::internal)
        throw std::invalid_argument("track_subtree: vertex is not internal");
    std::array<SubtreeTracker, 2> out;
    PartObserver obs;
    obs.u = u;
    obs.out = &out;
    obs.top = tree.children(u);
    for (int s = 0; s < 2; ++s) {
        auto si = static_cast<std::size_t>(s);
        out[si].vertex = u;
        out[si].side = s;
        obs.count[si] = static_cast<int>(tree.leaves_below(obs.top[si]).size());
        out[si].leaf_count_path.emplace_back(0.0, obs.count[si]);
    }
    // Inline event loop so the observer sees event times.
    double t = 0.0;
    TimedObserver timed;
    timed.inner = &obs;
    timed.clock = &t;
    while (tree.n_leaves() > 0) {
        const double n = tree.n_leaves();
        const double deaths = 2.0 * n;
        const double total = deaths + static_cast<double>(tree.edge_count());
        t += rng.exponential() / total;
        if (t > horizon) break;
        if (rng.uniform() * total < deaths) {
            int lab = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(tree.n_leaves())));
            bool go = timed.before_death(tree, tree.leaf_of(lab));
            if (!go) break;
            int last = tree.n_leaves();
            tree.remove_leaf(lab);
            if (lab != last) tree.relabel(last, lab);
        } else {
            int e = tree.edges()[rng.uniform_index(tree.edge_count())];
            int lab = tree.n_leaves() + 1;
            int b = tree.insert_leaf(e, lab);
            timed.after_birth(tree, e, b, tree.leaf_of(lab));
        }
    }
    return out;
}

SubtreeTracker track_subtree(RootedBinaryTree tree, int u, int side, double horizon, Rng& rng) {
    if (side != 0 && side != 1) throw std::invalid_argument("track_subtree: side must be 0 or 1");
    return track_parts(std::move(tree), u, horizon, rng)[static_cast<std::size_t>(side)];
}

std::uint64_t double_factorial(int k) {
    std::uint64_t r = 1;
    for (int i = k; i > 1; i -= 2) r *= static_cast<std::uint64_t>(i);
    return r;
}

std::vector<RootedBinaryTree> enumerate_rooted_shapes(int n) {
    if (n < 1) throw std::invalid_argument("enumerate_rooted_shapes: n must be positive");
    if (n > 7) throw std::invalid_argument("enumerate_rooted_shapes: n too large (max 7)");
    std::vector<RootedBinaryTree> level{RootedBinaryTree()};
    for (int k = 2; k <= n; ++k) {
        std::map<std::string, RootedBinaryTree> next;
        for (const auto& t : level) {
            for (int e : t.edges()) {
                RootedBinaryTree c = t;
                c.insert_leaf(e, k);
                next.emplace(c.canonical(), std::move(c));
            }
        }
        level.clear();
        for (auto& [code, t] : next) level.push_back(std::move(t));
    }
    std::sort(level.begin(), level.end(),
              [](const RootedBinaryTree& a, const RootedBinaryTree& b) { return a.canonical() < b.canonical(); });
    return level;
}

std::vector<std::vector<double>> exact_transition_matrix(int n) {
    if (n < 2) throw std::invalid_argument("exact_transition_matrix: need n >= 2");
    auto shapes = enumerate_rooted_shapes(n);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < shapes.size(); ++i) index[shapes[i].canonical()] = i;
    std::vector<std::vector<double>> P(shapes.size(), std::vector<double>(shapes.size(), 0.0));
    const double w = 1.0 / (static_cast<double>(n) * (2.0 * n - 3.0));
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        for (int lab = 1; lab <= n; ++lab) {
            RootedBinaryTree reduced = shapes[i];
            reduced.remove_leaf(lab);
            for (int e : reduced.edges()) {
                RootedBinaryTree c = reduced;
                c.insert_leaf(e, lab);
                P[i][index.at(c.canonical())] += w;
            }
        }
    }
    return P;
}

}  // namespace ctl
