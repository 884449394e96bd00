#include "ctl/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "ctl/parallel.hpp"

namespace ctl {

double ChronologicalTree::total_length() const {
    double s = 0.0;
    for (const auto& ind : individuals) s += ind.lifespan();
    return s;
}

void ChronologicalTree::validate() const {
    auto fail = [](const std::string& m) { throw std::logic_error("chronological tree: " + m); };
    if (individuals.empty()) fail("no root");
    if (individuals[0].parent != -1 || individuals[0].birth != 0.0) fail("root must be born at 0");
    for (std::size_t i = 0; i < individuals.size(); ++i) {
        const auto& u = individuals[i];
        if (!(u.birth < u.death)) fail("empty lifespan");
        double prev = u.birth;
        for (int c : u.children) {
            const auto& ch = individuals.at(static_cast<std::size_t>(c));
            if (ch.parent != static_cast<int>(i)) fail("parent link");
            if (!(ch.birth > prev)) fail("sibling birth levels not strictly increasing");
            if (!(ch.birth < u.death)) fail("child born after parent death");
            prev = ch.birth;
        }
    }
}

bool same_tree(const ChronologicalTree& a, const ChronologicalTree& b, double tol) {
    if (a.individuals.size() != b.individuals.size()) return false;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        const auto& u = a.individuals[static_cast<std::size_t>(i)];
        const auto& v = b.individuals[static_cast<std::size_t>(j)];
        if (std::abs(u.birth - v.birth) > tol || std::abs(u.death - v.death) > tol) return false;
        if (u.children.size() != v.children.size()) return false;
        for (std::size_t k = 0; k < u.children.size(); ++k) stack.emplace_back(u.children[k], v.children[k]);
    }
    return true;
}

ChronologicalTree sample_splitting_tree(double lifespan, std::size_t max_individuals, Rng& rng) {
    if (!(lifespan > 0.0)) throw std::invalid_argument("sample_splitting_tree: lifespan must be positive");
    ChronologicalTree tree;
    tree.individuals.push_back({-1, 0.0, lifespan, {}});
    for (std::size_t i = 0; i < tree.individuals.size(); ++i) {
        const double end = tree.individuals[i].death;
        for (double t = tree.individuals[i].birth + rng.exponential(); t < end; t += rng.exponential()) {
            if (tree.individuals.size() >= max_individuals) {
                tree.truncated = true;
                return tree;
            }
            int id = static_cast<int>(tree.individuals.size());
            tree.individuals.push_back({static_cast<int>(i), t, t + jump_sample(rng), {}});
            tree.individuals[i].children.push_back(id);
        }
    }
    return tree;
}

CompoundPoissonPath jccp_from_tree(const ChronologicalTree& tree) {
    CompoundPoissonPath p;
    p.start = 0.0;
    double t = 0.0;
    double level = 0.0;
    // (individual, children still to visit counted from the top)
    std::vector<std::pair<int, std::size_t>> stack;
    auto enter = [&](int u) {
        const auto& ind = tree.individuals[static_cast<std::size_t>(u)];
        p.jump_times.push_back(t);
        p.jump_sizes.push_back(ind.lifespan());
        level = ind.death;
        stack.emplace_back(u, ind.children.size());
    };
    enter(0);
    while (!stack.empty()) {
        auto& [u, left] = stack.back();
        const auto& ind = tree.individuals[static_cast<std::size_t>(u)];
        if (left == 0) {
            t += level - ind.birth;
            level = ind.birth;
            stack.pop_back();
            continue;
        }
        --left;
        int c = ind.children[left];
        double b = tree.individuals[static_cast<std::size_t>(c)].birth;
        t += level - b;
        level = b;
        enter(c);
    }
    p.end_time = t;
    p.stop_reason = StopReason::exited_below;
    return p;
}

ChronologicalTree tree_from_jccp(const CompoundPoissonPath& path, double tol) {
    if (path.jump_times.empty() || path.jump_times[0] != 0.0 || path.start != 0.0)
        throw std::invalid_argument("tree_from_jccp: path must start at 0 with a jump");
    ChronologicalTree tree;
    std::vector<int> active;
    double sum = 0.0;
    for (std::size_t k = 0; k < path.jump_times.size(); ++k) {
        double x = path.start - path.jump_times[k] + sum;
        if (x < -tol) throw std::invalid_argument("tree_from_jccp: path goes below 0");
        while (!active.empty() && tree.individuals[static_cast<std::size_t>(active.back())].birth >= x - tol)
            active.pop_back();
        if (active.empty() && k > 0) throw std::invalid_argument("tree_from_jccp: path returns to 0 early");
        int parent = active.empty() ? -1 : active.back();
        int id = static_cast<int>(tree.individuals.size());
        double birth = k == 0 ? 0.0 : x;
        tree.individuals.push_back({parent, birth, birth + path.jump_sizes[k], {}});
        if (parent >= 0) tree.individuals[static_cast<std::size_t>(parent)].children.push_back(id);
        active.push_back(id);
        sum += path.jump_sizes[k];
    }
    double end = path.start - path.end_time + sum;
    if (std::abs(end) > tol * std::max(1.0, sum)) throw std::invalid_argument("tree_from_jccp: path does not end at 0");
    // contour meets children from the top down
    for (auto& ind : tree.individuals) std::reverse(ind.children.begin(), ind.children.end());
    return tree;
}

double AgeProcess::position(const AgeAtom& at) const {
    return static_cast<double>(at.index) / std::sqrt(2.0 * scale);
}

double AgeProcess::scaled_age(const AgeAtom& at) const { return at.age / scale; }

std::size_t AgeProcess::count_in_box(double pos_lo, double pos_hi, double age_lo) const {
    std::size_t c = 0;
    for (const auto& at : atoms) {
        double p = position(at);
        if (p > pos_lo && p <= pos_hi && scaled_age(at) >= age_lo) ++c;
    }
    return c;
}

std::string AgeProcess::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "k,J\n";
    for (const auto& at : atoms) os << at.index << ',' << at.age << '\n';
    return os.str();
}

AgeProcess age_process_at_level(const CompoundPoissonPath& path, double a, double n,
                                const std::vector<double>& age_offsets) {
    if (a < 0.0 || !(n > 0.0)) throw std::invalid_argument("age_process_at_level");
    AgeProcess out;
    out.level = a;
    out.scale = n;
    const double level = n * a;
    double sum = 0.0;
    for (std::size_t k = 0; k < path.jump_times.size(); ++k) {
        double x = path.start - path.jump_times[k] + sum;
        double top = x + path.jump_sizes[k];
        if (x <= level && top > level) {
            double off = k < age_offsets.size() ? age_offsets[k] : 0.0;
            out.atoms.push_back({out.atoms.size() + 1, k, level - x + off});
        }
        sum += path.jump_sizes[k];
    }
    return out;
}

std::pair<double, double> initial_jump_pair(Rng& rng) {
    double v0 = initial_jump_sample(rng);
    double v1 = initial_jump_sample(rng);
    return {v0, v1};
}

namespace {

// Entrance jump of a forest excursion: total size, part below 0, part above 0.
struct Entrance {
    double below, above;
};

Entrance sample_entrance(Rng& rng) {
    double v = initial_jump_sample(rng);
    double below = rng.uniform() * v;
    return {below, v - below};
}

}  // namespace

ForestPath forest_path(std::size_t excursions, Rng& rng, std::uint64_t max_jumps) {
    ForestPath out;
    auto& p = out.path;
    double t = 0.0;
    std::uint64_t used = 0;
    for (std::size_t e = 0; e < excursions; ++e) {
        Entrance en = sample_entrance(rng);
        t += en.below;  // the approach from 0 down to the jump
        p.jump_times.push_back(t);
        p.jump_sizes.push_back(en.below + en.above);
        double x = en.above;
        for (;;) {
            if (++used > max_jumps) {
                p.end_time = t;
                p.stop_reason = StopReason::budget;
                return out;
            }
            double w = rng.exponential();
            if (x - w <= 0.0) {
                t += x;
                break;
            }
            t += w;
            x -= w;
            double z = jump_sample(rng);
            p.jump_times.push_back(t);
            p.jump_sizes.push_back(z);
            x += z;
        }
    }
    p.end_time = t;
    p.stop_reason = StopReason::exited_below;
    return out;
}

AgeProcess forest_age_process(double a, double n, std::size_t max_atoms, Rng& rng,
                              std::uint64_t max_jumps, bool start_at_level) {
    AgeProcess out;
    out.level = a;
    out.scale = n;
    const double level = n * a;
    std::size_t jump = 0;
    std::uint64_t used = 0;
    // Above the level nothing can cross it, and the way back down is pure drift
    // onto the level, so those stretches are skipped.
    double x = start_at_level ? level : -1.0;
    while (out.atoms.size() < max_atoms) {
        if (x < 0.0) {
            Entrance en = sample_entrance(rng);
            if (en.above > level) out.atoms.push_back({out.atoms.size() + 1, jump, level + en.below});
            ++jump;
            x = std::min(en.above, level);
            continue;
        }
        if (++used > max_jumps) {
            out.truncated = true;
            return out;
        }
        double w = rng.exponential();
        if (x - w <= 0.0) {
            x = -1.0;
            continue;
        }
        x -= w;
        double z = jump_sample(rng);
        if (x + z > level) {
            out.atoms.push_back({out.atoms.size() + 1, jump, level - x});
            x = level;
        } else {
            x += z;
        }
        ++jump;
    }
    return out;
}

RestrictionReport check_restriction_consistency(const AgeProcess& lower, const AgeProcess& upper, double tol) {
    if (lower.scale != upper.scale) throw std::invalid_argument("restriction check: scales differ");
    if (lower.level > upper.level) throw std::invalid_argument("restriction check: levels out of order");
    RestrictionReport r;
    const double shift = upper.scale * (upper.level - lower.level);
    std::vector<const AgeAtom*> by_jump;
    by_jump.reserve(lower.atoms.size());
    for (const auto& at : lower.atoms) by_jump.push_back(&at);
    std::sort(by_jump.begin(), by_jump.end(), [](auto* x, auto* y) { return x->jump < y->jump; });
    for (const auto& at : upper.atoms) {
        if (at.age < shift) continue;
        ++r.checked;
        auto it = std::lower_bound(by_jump.begin(), by_jump.end(), at.jump,
                                   [](const AgeAtom* x, std::size_t j) { return x->jump < j; });
        bool ok = it != by_jump.end() && (*it)->jump == at.jump &&
                  std::abs((*it)->age - (at.age - shift)) <= tol * std::max(1.0, at.age);
        if (!ok) {
            ++r.violations;
            r.violating_jumps.push_back(at.jump);
        }
    }
    return r;
}

ReducedJCCP reduced_jccp(double v0, double v1, Rng& rng, double age0, double age1, std::uint64_t max_jumps) {
    if (!(v0 > 0.0) || !(v1 > 0.0)) throw std::invalid_argument("reduced_jccp: initial jumps must be positive");
    ReducedJCCP r;
    r.v0 = v0;
    r.v1 = v1;
    r.age0 = age0;
    r.age1 = age1;
    r.sources.resize(2);
    double t = 0.0;
    double own[2] = {0.0, 0.0};
    double pos[2] = {v0, 0.0};
    auto push = [&](int src, double size) {
        r.path.jump_times.push_back(t);
        r.path.jump_sizes.push_back(size);
        r.jump_source.push_back(src);
        r.sources[static_cast<std::size_t>(src)].jump_times.push_back(own[src]);
        r.sources[static_cast<std::size_t>(src)].jump_sizes.push_back(size);
    };
    // first clock: a lone jump, then its lifetime drifts back to 0
    push(0, v0);
    r.fragments.push_back({0, 0.0, v0, 0, 1, false});
    t += v0;
    double top = v0;
    r.clock_tops.push_back(v0);

    int s = 1;
    bool first = true;
    std::uint64_t used = 0;
    for (;;) {
        Fragment f{s, pos[s], 0.0, r.path.jump_times.size(), 0, false};
        double x = pos[s];
        bool crossed = false;
        if (first) {
            push(1, v1);
            x = v1;
            f.jumps = 1;
            first = false;
            crossed = x > top;
        }
        while (!crossed) {
            if (++used > max_jumps) {
                r.complete = false;
                break;
            }
            double w = rng.exponential();
            if (x - w <= 0.0) {
                t += x;
                own[s] += x;
                x = 0.0;
                f.hit_zero = true;
                break;
            }
            t += w;
            own[s] += w;
            x -= w;
            double z = jump_sample(rng);
            push(s, z);
            ++f.jumps;
            x += z;
            crossed = x > top;
        }
        f.end_level = x;
        r.fragments.push_back(f);
        if (!r.complete) break;
        if (f.hit_zero) {
            r.terminal = s;
            break;
        }
        // lifetime of the new clock above the previous clock's death level
        t += x - top;
        pos[s] = x;
        top = x;
        r.clock_tops.push_back(x);
        s = 1 - s;
    }
    r.path.end_time = t;
    r.path.stop_reason = r.complete ? StopReason::exited_below : StopReason::budget;
    for (int k = 0; k < 2; ++k) {
        auto& src = r.sources[static_cast<std::size_t>(k)];
        src.end_time = own[k];
        src.stop_reason = r.terminal == k ? StopReason::exited_below : StopReason::horizon;
    }
    return r;
}

Street street_at_level(const ReducedJCCP& reduced, double a, double n) {
    if (!(a > 0.0) || !(n > 0.0)) throw std::invalid_argument("street_at_level");
    AgeProcess ages = age_process_at_level(reduced.path, a, n, {reduced.age0, reduced.age1});
    Street s;
    s.level = a;
    s.scale = n;
    if (ages.atoms.empty()) return s;
    s.has_clock = true;
    s.clock = ages.atoms.front().age / n;
    const double root2n = std::sqrt(2.0 * n);
    const std::size_t regular = ages.atoms.size() - 1;
    s.length = static_cast<double>(regular) / root2n;
    for (std::size_t k = 0; k < regular; ++k)
        s.atoms.emplace_back(static_cast<double>(k + 1) / root2n, ages.atoms[ages.atoms.size() - 1 - k].age / n);
    return s;
}

ExcursionCrossing excursion_first_crossing(double level, Rng& rng) {
    // the excursion leaves its infimum with an ordinary jump
    double z = jump_sample(rng);
    if (z > level) return {true, level};
    ExitRecord e = exit_interval_record(z, 0.0, level, rng);
    if (!e.above) return {false, 0.0};
    return {true, e.undershoot};
}

SigmaEstimate estimate_sigma_rate(double a, double n, std::size_t pairs, std::uint64_t key) {
    if (!(a > 0.0) || !(n > 0.0) || pairs == 0) throw std::invalid_argument("estimate_sigma_rate");
    auto hit = replicate(pairs, key, [a, n](std::size_t, Rng& rng) -> char {
        bool r0 = excursion_first_crossing(n * a, rng).reached;
        bool r1 = excursion_first_crossing(n * a, rng).reached;
        return r0 && r1 ? 1 : 0;
    });
    SigmaEstimate est;
    est.n = n;
    est.pairs = pairs;
    for (char h : hit) est.hits += static_cast<std::size_t>(h);
    double p = static_cast<double>(est.hits) / static_cast<double>(pairs);
    est.rate = n * p;
    est.se = n * std::sqrt(std::max(p * (1.0 - p), 1.0 / static_cast<double>(pairs)) / static_cast<double>(pairs));
    return est;
}

}  // namespace ctl
