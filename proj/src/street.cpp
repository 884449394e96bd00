#include "ctl/street.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "ctl/levy.hpp"
#include "ctl/parallel.hpp"
#include "ctl/splitting.hpp"

namespace ctl {

double Street::mass() const {
    double m = 0.0;
    for (const auto& [pos, age] : atoms) m += age;
    return m;
}

nlohmann::json to_json(const Street& s) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& [pos, age] : s.atoms) atoms.push_back({pos, age});
    nlohmann::json j{{"level", s.level}, {"I", s.length}, {"atoms", atoms}, {"n", s.scale}};
    j["R"] = s.has_clock ? nlohmann::json(s.clock) : nlohmann::json(nullptr);
    return j;
}

Street street_from_json(const nlohmann::json& j) {
    Street s;
    s.level = j.at("level").get<double>();
    s.length = j.at("I").get<double>();
    s.scale = j.value("n", 0.0);
    if (!j.at("R").is_null()) {
        s.has_clock = true;
        s.clock = j.at("R").get<double>();
    }
    for (const auto& a : j.at("atoms")) s.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    return s;
}

SpineState sapling_state(double v0, double v1, double age0, double age1) {
    if (!(v0 > 0.0) || !(v1 > 0.0)) throw std::invalid_argument("sapling_state: jumps must be positive");
    SpineState s;
    s.clock = {-age0, v0};
    s.regular.push_back({-age1, v1});
    return s;
}

void advance_spine(SpineState& s, double to_level, Rng& rng) {
    if (to_level < s.level) throw std::invalid_argument("advance_spine: cannot go back");
    while (s.alive) {
        const double births = static_cast<double>(s.regular.size());
        double next_birth = births > 0.0 ? s.level + rng.exponential() / births
                                         : std::numeric_limits<double>::infinity();
        double next_death = s.clock.death;
        std::size_t dying = s.regular.size();  // sentinel: the clock
        for (std::size_t i = 0; i < s.regular.size(); ++i) {
            if (s.regular[i].death < next_death) {
                next_death = s.regular[i].death;
                dying = i;
            }
        }
        double next = std::min(next_birth, next_death);
        if (next > to_level) break;
        s.level = next;
        if (next_death <= next_birth) {
            if (dying < s.regular.size()) {
                s.regular.erase(s.regular.begin() + static_cast<std::ptrdiff_t>(dying));
            } else if (s.regular.empty()) {
                s.alive = false;
            } else {
                s.clock = s.regular.back();
                s.regular.pop_back();
            }
        } else {
            auto i = static_cast<std::ptrdiff_t>(rng.uniform_index(s.regular.size()));
            s.regular.insert(s.regular.begin() + i, SpineSubtree{s.level, s.level + jump_sample(rng)});
        }
    }
    s.level = std::max(s.level, to_level);
}

Street street_from_spine(const SpineState& s, double n) {
    Street out;
    out.level = s.level / n;
    out.scale = n;
    if (!s.alive) return out;
    const double root2n = std::sqrt(2.0 * n);
    out.has_clock = true;
    out.clock = (s.level - s.clock.origin) / n;
    out.length = static_cast<double>(s.regular.size()) / root2n;
    out.atoms.reserve(s.regular.size());
    for (std::size_t k = 0; k < s.regular.size(); ++k)
        out.atoms.emplace_back(static_cast<double>(k + 1) / root2n, (s.level - s.regular[k].origin) / n);
    return out;
}

double entrance_length_mean(double a) {
    if (!(a > 0.0)) throw std::domain_error("entrance_length_mean: level must be positive");
    return 3.0 * std::sqrt(a) / (2.0 * std::sqrt(2.0 * std::numbers::pi));
}

namespace {

std::mutex cache_mutex;

std::uint64_t bits_of(double x) {
    std::uint64_t b;
    static_assert(sizeof b == sizeof x);
    std::memcpy(&b, &x, sizeof b);
    return b;
}

const ScaleFunctionTable& cached_scale_table(double x_max) {
    static std::map<std::uint64_t, std::unique_ptr<ScaleFunctionTable>> tables;
    // round up to a power of two so nearby levels share a table
    double cap = 64.0;
    while (cap < x_max) cap *= 2.0;
    std::lock_guard lock(cache_mutex);
    auto& slot = tables[bits_of(cap)];
    if (!slot) slot = std::make_unique<ScaleFunctionTable>(scale_function(cap, 0.01));
    return *slot;
}

// Undershoot below `level` restricted to [0, cap]: density proportional to
// W(level - v) Lbar(v). Proposals from Lbar truncated to [0, cap].
double undershoot_below(double level, double cap, Rng& rng) {
    const ScaleFunctionTable& w = cached_scale_table(level);
    const double wl = w(level);
    const double fcap = 1.0 - 1.0 / std::sqrt(1.0 + 2.0 * cap);
    for (;;) {
        double t = 1.0 - rng.uniform() * fcap;
        double v = 0.5 * (1.0 / (t * t) - 1.0);
        if (rng.uniform() * wl <= w(std::max(0.0, level - v))) return v;
    }
}

}  // namespace

const std::vector<double>& clock_pool(double n, std::size_t pool) {
    static std::map<std::pair<std::uint64_t, std::size_t>, std::unique_ptr<std::vector<double>>> pools;
    {
        std::lock_guard lock(cache_mutex);
        auto it = pools.find({bits_of(n), pool});
        if (it != pools.end()) return *it->second;
    }
    const std::uint64_t key = derive_key(derive_key(hash_label("clock-pool"), bits_of(n)), pool);
    auto values = replicate(pool, key, [n](std::size_t, Rng& rng) {
        for (;;) {
            ExcursionCrossing c = excursion_first_crossing(n, rng);
            if (c.reached) return c.undershoot / n;
        }
    });
    std::lock_guard lock(cache_mutex);
    auto& slot = pools[{bits_of(n), pool}];
    if (!slot) slot = std::make_unique<std::vector<double>>(std::move(values));
    return *slot;
}

double clock_sample(double a, Rng& rng, double n, std::size_t pool) {
    const auto& p = clock_pool(n, pool);
    return a * p[rng.uniform_index(p.size())];
}

Street entrance_sample(double a, Rng& rng, std::size_t max_atoms) {
    if (!(a > 0.0)) throw std::domain_error("entrance_sample: level must be positive");
    Street s;
    s.level = a;
    s.length = rng.exponential() * entrance_length_mean(a);
    std::uint64_t count = rng.poisson(s.length * gstar_mass(a));
    if (count > max_atoms) throw std::runtime_error("entrance_sample: atom guard exceeded");
    std::vector<double> pos(count);
    for (auto& p : pos) p = rng.uniform() * s.length;
    std::sort(pos.begin(), pos.end());
    for (double p : pos) s.atoms.emplace_back(p, gstar_sample(a, rng));
    s.has_clock = true;
    s.clock = clock_sample(a, rng);
    return s;
}

TransitionResult transition_sample(const Street& s, double a1, double n, Rng& rng) {
    const double a0 = s.level;
    if (!(0.0 < a0 && a0 < a1)) throw std::invalid_argument("transition_sample: need 0 < a0 < a1");
    if (!(n >= 1.0)) throw std::invalid_argument("transition_sample: n must be >= 1");
    TransitionResult out;
    const double root2n = std::sqrt(2.0 * n);
    const double start = n * a0;
    if (s.empty()) {
        out.street.level = a1;
        out.street.scale = n;
        return out;
    }
    // Slots along the spine; observed atoms take the slot nearest their position.
    auto slots = static_cast<std::size_t>(std::llround(s.length * root2n));
    slots = std::max(slots, s.atoms.size());
    std::vector<double> ages(slots, -1.0);
    for (const auto& [pos, age] : s.atoms) {
        auto want = static_cast<std::ptrdiff_t>(std::ceil(pos * root2n)) - 1;
        want = std::clamp<std::ptrdiff_t>(want, 0, static_cast<std::ptrdiff_t>(slots) - 1);
        std::ptrdiff_t best = -1;
        for (std::ptrdiff_t d = 0; best < 0; ++d) {
            for (std::ptrdiff_t c : {want - d, want + d}) {
                if (c >= 0 && c < static_cast<std::ptrdiff_t>(slots) && ages[static_cast<std::size_t>(c)] < 0.0) {
                    best = c;
                    break;
                }
            }
        }
        ages[static_cast<std::size_t>(best)] = n * age;
    }
    // Unmarked slots hold subtrees too young to register at this scale.
    const double micro = std::min(std::sqrt(n), start);
    for (double& age : ages) {
        if (age >= 0.0) continue;
        age = undershoot_below(start, micro, rng);
        ++out.filler;
    }
    SpineState spine;
    spine.level = start;
    spine.regular.reserve(slots);
    for (double age : ages) spine.regular.push_back({start - age, start - age + jump_sample_above(age, rng)});
    if (s.has_clock) {
        double age = n * s.clock;
        spine.clock = {start - age, start - age + jump_sample_above(age, rng)};
    } else if (!spine.regular.empty()) {
        spine.clock = spine.regular.back();
        spine.regular.pop_back();
    } else {
        spine.alive = false;
    }
    advance_spine(spine, n * a1, rng);
    out.street = street_from_spine(spine, n);
    out.street.level = a1;
    return out;
}

}  // namespace ctl
