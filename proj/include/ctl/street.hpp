#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctl/rng.hpp"

namespace ctl {

// Subtree ages along a spine: atoms (position, age) ordered away from the root,
// spine length and the age of the clock subtree at the far end.
struct Street {
    double level = 0.0;
    double scale = 0.0;  // n of the finite construction, 0 for limit samplers
    double length = 0.0;
    double clock = 0.0;
    bool has_clock = false;
    std::vector<std::pair<double, double>> atoms;

    bool empty() const { return !has_clock && atoms.empty(); }
    double mass() const;  // sum of atom ages
};

nlohmann::json to_json(const Street& s);
Street street_from_json(const nlohmann::json& j);

// Spine population in unscaled units. Regular subtrees reproduce at rate 1 and
// place the child immediately on their root side; the clock does not reproduce.
// When the clock dies the outermost regular subtree takes over.
struct SpineSubtree {
    double origin = 0.0;  // level at which its age was 0
    double death = 0.0;   // level at which it dies
};

struct SpineState {
    double level = 0.0;
    std::vector<SpineSubtree> regular;  // root side first
    SpineSubtree clock;
    bool alive = true;
};

SpineState sapling_state(double v0, double v1, double age0 = 0.0, double age1 = 0.0);
void advance_spine(SpineState& s, double to_level, Rng& rng);
Street street_from_spine(const SpineState& s, double n);

double entrance_length_mean(double a);  // 3 sqrt(a) / (2 sqrt(2 pi))

// Clock age at level a: conditioned first undershoot of an excursion at level n,
// pooled once per (n, pool size) and rescaled by self-similarity.
double clock_sample(double a, Rng& rng, double n = 1000.0, std::size_t pool = 5000);
const std::vector<double>& clock_pool(double n, std::size_t pool);

Street entrance_sample(double a, Rng& rng, std::size_t max_atoms = 1u << 20);

struct TransitionResult {
    Street street;
    std::size_t filler = 0;  // microscopic subtrees added to complete the spine
};
// Embeds the street at a0 into a spine at scale n, runs it to a1 and reads it back.
TransitionResult transition_sample(const Street& s, double a1, double n, Rng& rng);

}  // namespace ctl
