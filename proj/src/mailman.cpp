#include "ctl/mailman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ctl {

int StreetStore::add_root(Street s, double age) {
    if (!nodes_.empty()) throw std::logic_error("StreetStore: root already set");
    nodes_.push_back({std::move(s), age, no_parent, 0, no_parent, {}});
    return 0;
}

bool StreetStore::has_child(int node, int choice) const {
    return this->node(node).children.contains(choice);
}

int StreetStore::add_child(int node, int choice, Street s, double age) {
    if (has_child(node, choice)) throw std::logic_error("StreetStore: child already present");
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({std::move(s), age, node, choice, no_parent, {}});
    nodes_[static_cast<std::size_t>(node)].children[choice] = id;
    return id;
}

int StreetStore::child(int node, int choice, double child_age, Rng& rng) {
    auto& kids = this->node(node).children;
    if (auto it = kids.find(choice); it != kids.end()) return it->second;
    if (!gen_) throw std::logic_error("StreetStore: no generator for a missing street");
    return add_child(node, choice, gen_(child_age, rng), child_age);
}

double Mailman::total() const {
    double s = 0.0;
    for (const auto& st : steps) s += st.address;
    return s;
}

double Mailman::partial(std::size_t m) const {
    double s = 0.0;
    for (std::size_t i = 0; i <= m && i < steps.size(); ++i) s += steps[i].address;
    return s;
}

bool mailman_step(const Street& s, Rng& rng, MailmanStep& out) {
    const double mass = s.mass();
    const double clock = s.has_clock ? s.clock : 0.0;
    if (!(mass + clock > 0.0)) return false;
    out = {};
    if (rng.uniform() * (mass + clock) < mass) {
        double u = rng.uniform() * mass;
        std::size_t i = 0;
        for (; i + 1 < s.atoms.size(); ++i) {
            if (u < s.atoms[i].second) break;
            u -= s.atoms[i].second;
        }
        out.address = s.atoms[i].first;
        out.bit = 1;
        out.age = s.atoms[i].second;
        out.choice = static_cast<int>(i);
    } else {
        out.address = s.length;
        out.bit = 0;
        out.age = clock;
        out.choice = StreetStore::clock_choice;
    }
    return true;
}

namespace {

void pad(Mailman& m, std::size_t depth) {
    while (m.steps.size() < depth) m.steps.push_back({});
}

}  // namespace

Mailman sample_mailman(StreetStore& store, std::size_t depth, Rng& rng) {
    if (depth == 0) throw std::invalid_argument("sample_mailman: depth must be >= 1");
    if (store.root() < 0) throw std::invalid_argument("sample_mailman: empty store");
    Mailman m;
    m.depth = depth;
    int node = store.root();
    for (std::size_t k = 0; k < depth; ++k) {
        MailmanStep st;
        if (!mailman_step(store.node(node).street, rng, st)) {
            m.terminated = true;
            break;
        }
        st.node = node;
        m.steps.push_back(st);
        if (k + 1 < depth) node = store.child(node, st.choice, st.age, rng);
    }
    pad(m, depth);
    m.tail_bound = l1_mass_diagnostic(m).tail;
    return m;
}

std::size_t divergence_index(const Mailman& a, const Mailman& b) {
    const std::size_t n = std::min(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a.steps[i].address != b.steps[i].address || a.steps[i].bit != b.steps[i].bit) return i;
    return n;
}

double recipe_meet_depth(const Mailman& a, const Mailman& b) {
    std::size_t m = divergence_index(a, b);
    if (m >= std::min(a.steps.size(), b.steps.size())) return std::min(a.total(), b.total());
    return std::min(a.partial(m), b.partial(m));
}

double recipe_distance(const Mailman& a, const Mailman& b) {
    return a.total() + b.total() - 2.0 * recipe_meet_depth(a, b);
}

void ProperKTree::first_leaf(double leaf_depth) {
    if (!leaf_node_.empty()) throw std::logic_error("ProperKTree: first leaf already present");
    nodes_.push_back({0, leaf_depth, 1, {}});
    nodes_[0].children.push_back(1);
    leaf_node_.push_back(1);
    if (leaf_depth == 0.0) ++zero_edges_;
}

void ProperKTree::attach(int label, double leaf_depth, int anchor, double at) {
    if (label != static_cast<int>(leaf_node_.size()) + 1) throw std::logic_error("ProperKTree: labels out of order");
    int v = leaf_node_.at(static_cast<std::size_t>(anchor - 1));
    while (nodes_[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(v)].parent)].depth > at)
        v = nodes_[static_cast<std::size_t>(v)].parent;
    const int p = nodes_[static_cast<std::size_t>(v)].parent;
    const int w = static_cast<int>(nodes_.size());
    const int leaf = w + 1;
    nodes_.push_back({p, at, 0, {v, leaf}});
    nodes_.push_back({w, leaf_depth, label, {}});
    auto& pc = nodes_[static_cast<std::size_t>(p)].children;
    *std::find(pc.begin(), pc.end(), v) = w;
    nodes_[static_cast<std::size_t>(v)].parent = w;
    if (at == nodes_[static_cast<std::size_t>(p)].depth) ++zero_edges_;
    if (at == nodes_[static_cast<std::size_t>(v)].depth) ++zero_edges_;
    if (leaf_depth == at) ++zero_edges_;
    leaf_node_.push_back(leaf);
}

double ProperKTree::leaf_depth(int label) const {
    return nodes_[static_cast<std::size_t>(leaf_node_.at(static_cast<std::size_t>(label - 1)))].depth;
}

double ProperKTree::meet_depth(int i, int j) const {
    std::vector<char> seen(nodes_.size(), 0);
    for (int v = leaf_node_.at(static_cast<std::size_t>(i - 1)); v >= 0; v = nodes_[static_cast<std::size_t>(v)].parent)
        seen[static_cast<std::size_t>(v)] = 1;
    int v = leaf_node_.at(static_cast<std::size_t>(j - 1));
    while (!seen[static_cast<std::size_t>(v)]) v = nodes_[static_cast<std::size_t>(v)].parent;
    return nodes_[static_cast<std::size_t>(v)].depth;
}

double ProperKTree::distance(int i, int j) const {
    return leaf_depth(i) + leaf_depth(j) - 2.0 * meet_depth(i, j);
}

std::size_t ProperKTree::four_point_violations(double tol) const {
    const int k = static_cast<int>(leaves());
    std::vector<double> d(static_cast<std::size_t>(k * k), 0.0);
    double scale = 1.0;
    for (int i = 1; i <= k; ++i)
        for (int j = i + 1; j <= k; ++j) {
            double x = distance(i, j);
            d[static_cast<std::size_t>((i - 1) * k + j - 1)] = d[static_cast<std::size_t>((j - 1) * k + i - 1)] = x;
            scale = std::max(scale, x);
        }
    auto at = [&](int i, int j) { return d[static_cast<std::size_t>((i - 1) * k + j - 1)]; };
    std::size_t bad = 0;
    for (int i = 1; i <= k; ++i)
        for (int j = i + 1; j <= k; ++j)
            for (int l = j + 1; l <= k; ++l)
                for (int m = l + 1; m <= k; ++m) {
                    double s[3] = {at(i, j) + at(l, m), at(i, l) + at(j, m), at(i, m) + at(j, l)};
                    std::sort(s, s + 3);
                    if (s[2] - s[1] > tol * scale) ++bad;
                }
    return bad;
}

std::string ProperKTree::to_newick() const {
    std::ostringstream os;
    os.precision(12);
    auto rec = [&](auto&& self, int v) -> void {
        const auto& nd = nodes_[static_cast<std::size_t>(v)];
        if (!nd.children.empty()) {
            os << '(';
            for (std::size_t c = 0; c < nd.children.size(); ++c) {
                if (c) os << ',';
                self(self, nd.children[c]);
            }
            os << ')';
        }
        if (nd.label > 0) os << nd.label;
        if (nd.parent >= 0) os << ':' << nd.depth - nodes_[static_cast<std::size_t>(nd.parent)].depth;
    };
    rec(rec, 0);
    os << ';';
    return os.str();
}

ProperKTree ktree_from_mailmen(const std::vector<Mailman>& members) {
    if (members.empty()) throw std::invalid_argument("ktree_from_mailmen: no mailmen");
    for (const auto& m : members)
        if (m.steps.size() != members[0].steps.size())
            throw std::invalid_argument("ktree_from_mailmen: mailmen must share a truncation depth");
    ProperKTree tree;
    tree.first_leaf(members[0].total());
    for (std::size_t j = 1; j < members.size(); ++j) {
        std::size_t best_m = 0;
        double best_d = -1.0;
        int anchor = 1;
        for (std::size_t t = 0; t < j; ++t) {
            std::size_t m = divergence_index(members[t], members[j]);
            double d = recipe_meet_depth(members[t], members[j]);
            if (m > best_m || (m == best_m && d > best_d)) {
                best_m = m;
                best_d = d;
                anchor = static_cast<int>(t) + 1;
            }
        }
        tree.attach(static_cast<int>(j) + 1, members[j].total(), anchor, best_d);
    }
    return tree;
}

std::size_t nested_consistency_mismatches(const std::vector<Mailman>& members, std::size_t j) {
    if (j == 0 || j > members.size()) throw std::invalid_argument("nested_consistency_mismatches: bad j");
    ProperKTree big = ktree_from_mailmen(members);
    ProperKTree small = ktree_from_mailmen({members.begin(), members.begin() + static_cast<std::ptrdiff_t>(j)});
    std::size_t bad = 0;
    for (int i = 1; i <= static_cast<int>(j); ++i) {
        if (big.leaf_depth(i) != small.leaf_depth(i)) ++bad;
        for (int l = i + 1; l <= static_cast<int>(j); ++l)
            if (big.meet_depth(i, l) != small.meet_depth(i, l)) ++bad;
    }
    return bad;
}

double leaf_tightness_stat(const ProperKTree& tree) {
    if (tree.leaves() < 2) throw std::invalid_argument("leaf_tightness_stat: need two leaves");
    double best = std::numeric_limits<double>::infinity();
    for (int j = 2; j <= static_cast<int>(tree.leaves()); ++j) best = std::min(best, tree.distance(1, j));
    return best;
}

StreetGenerator entrance_generator() {
    return [](double age, Rng& rng) { return entrance_sample(age, rng); };
}

MailmanFamily sample_family(double a, std::size_t count, std::size_t depth, Rng& rng, StreetGenerator gen) {
    if (count == 0) throw std::invalid_argument("sample_family: need at least one member");
    MailmanFamily f;
    f.level = a;
    f.depth = depth;
    f.store = StreetStore(std::move(gen));
    f.store.add_root(f.store.generator()(a, rng), a);
    for (std::size_t i = 0; i < count; ++i) f.members.push_back(sample_mailman(f.store, depth, rng));
    return f;
}

namespace {

// Choice on the parent street whose age, grown by `shift`, equals `age`.
int match_by_age(const Street& s, double age, double shift) {
    const double want = age - shift;
    const double tol = 1e-9 * std::max(1.0, age);
    for (std::size_t i = 0; i < s.atoms.size(); ++i)
        if (std::abs(s.atoms[i].second - want) <= tol) return static_cast<int>(i);
    if (s.has_clock && std::abs(s.clock - want) <= tol) return StreetStore::clock_choice;
    return StreetStore::clock_choice - 1;
}

}  // namespace

MailmanFamily one_step_transition(MailmanFamily& family, double a1, Rng& rng, double scale) {
    const double a0 = family.level;
    if (!(a0 < a1)) throw std::invalid_argument("one_step_transition: need a0 < a1");
    const double shift = a1 - a0;
    StreetStore& old = family.store;
    MailmanFamily out;
    out.level = a1;
    out.depth = family.depth;
    out.store = StreetStore(old.generator());
    out.store.add_root(transition_sample(old.node(old.root()).street, a1, scale, rng).street, a1);
    out.store.node(0).origin = old.root();
    StreetStore& fresh = out.store;

    for (std::size_t i = 0; i < family.members.size(); ++i) {
        Mailman m;
        m.depth = family.depth;
        int node = fresh.root();
        for (std::size_t k = 0; k < family.depth; ++k) {
            MailmanStep st;
            if (!mailman_step(fresh.node(node).street, rng, st)) {
                m.terminated = true;
                break;
            }
            st.node = node;
            m.steps.push_back(st);
            if (k + 1 == family.depth) break;
            if (fresh.has_child(node, st.choice)) {
                ++out.reused_steps;
                node = fresh.node(node).children.at(st.choice);
                continue;
            }
            const int parent = fresh.node(node).origin;
            int old_choice = StreetStore::clock_choice - 1;
            if (parent != StreetStore::no_parent && st.age > shift)
                old_choice = match_by_age(old.node(parent).street, st.age, shift);
            if (parent == StreetStore::no_parent || st.age <= shift) {
                // born after a0: everything below it is new too
                ++out.fresh_steps;
                node = fresh.child(node, st.choice, st.age, rng);
            } else if (old_choice < StreetStore::clock_choice) {
                ++out.unmatched;
                node = fresh.child(node, st.choice, st.age, rng);
            } else {
                ++out.carried_steps;
                const double old_age = st.age - shift;
                int src = old.child(parent, old_choice, old_age, rng);
                Street next = transition_sample(old.node(src).street, st.age, scale, rng).street;
                node = fresh.add_child(node, st.choice, std::move(next), st.age);
                fresh.node(node).origin = src;
            }
        }
        pad(m, family.depth);
        m.tail_bound = l1_mass_diagnostic(m).tail;
        out.members.push_back(std::move(m));
    }
    return out;
}

L1Diagnostic l1_mass_diagnostic(const Mailman& m) {
    L1Diagnostic d;
    d.partial = m.total();
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = m.steps.size() / 2; k < m.steps.size(); ++k)
        if (m.steps[k].address > 0.0) pts.emplace_back(static_cast<double>(k), std::log(m.steps[k].address));
    if (pts.size() < 2) return d;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    d.rate = std::exp(slope);
    const double last = m.steps.back().address;
    d.tail = d.rate < 1.0 ? last * d.rate / (1.0 - d.rate) : std::numeric_limits<double>::infinity();
    return d;
}

nlohmann::json to_json(const Mailman& m) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : m.steps) steps.push_back({{"A", s.address}, {"bit", s.bit}, {"age", s.age}, {"street", s.node}});
    return {{"depth", m.depth}, {"terminated", m.terminated}, {"sum", m.total()}, {"tail_bound", m.tail_bound},
            {"steps", steps}};
}

nlohmann::json to_json(const MailmanFamily& f) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : f.members) members.push_back(to_json(m));
    nlohmann::json streets = nlohmann::json::array();
    for (std::size_t i = 0; i < f.store.size(); ++i) {
        const auto& nd = f.store.node(static_cast<int>(i));
        streets.push_back({{"id", i}, {"parent", nd.parent}, {"choice", nd.choice}, {"age", nd.age},
                           {"carried_from", nd.origin}, {"street", to_json(nd.street)}});
    }
    return {{"level", f.level}, {"depth", f.depth}, {"members", members}, {"streets", streets},
            {"fresh_steps", f.fresh_steps}, {"carried_steps", f.carried_steps},
            {"reused_steps", f.reused_steps}, {"unmatched", f.unmatched}};
}

}  // namespace ctl
