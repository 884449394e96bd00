#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctl/levy.hpp"
#include "ctl/rng.hpp"
#include "ctl/stats.hpp"
#include "ctl/street.hpp"

namespace ctl {

// Individuals indexed in creation order; index 0 is the ancestor.
struct Individual {
    int parent = -1;
    double birth = 0.0;
    double death = 0.0;
    std::vector<int> children;  // increasing birth level
    double lifespan() const { return death - birth; }
};

struct ChronologicalTree {
    std::vector<Individual> individuals;
    bool truncated = false;  // the size guard stopped the construction

    double total_length() const;
    // Throws std::logic_error if the chronological-tree axioms fail.
    void validate() const;
};

// Structural equality up to tol on levels (children compared in birth order).
bool same_tree(const ChronologicalTree& a, const ChronologicalTree& b, double tol = 1e-9);

ChronologicalTree sample_splitting_tree(double lifespan, std::size_t max_individuals, Rng& rng);

// Depth-first contour: jump to the top of each individual, then drift down.
CompoundPoissonPath jccp_from_tree(const ChronologicalTree& tree);
ChronologicalTree tree_from_jccp(const CompoundPoissonPath& path, double tol = 1e-9);

struct AgeAtom {
    std::size_t index = 0;  // crossing number, from 1
    std::size_t jump = 0;   // jump of the path that made the crossing
    double age = 0.0;       // undershoot below the level, unscaled
};

struct AgeProcess {
    double level = 0.0;  // a
    double scale = 1.0;  // n
    std::vector<AgeAtom> atoms;
    bool truncated = false;

    double position(const AgeAtom& at) const;  // k / sqrt(2n)
    double scaled_age(const AgeAtom& at) const;  // J / n
    std::size_t count_in_box(double pos_lo, double pos_hi, double age_lo) const;
    std::string to_csv() const;
};

// Upcrossings of level n*a. Jumps listed in age_offsets start that much below their
// pre-jump value (ages carried into the path from before time zero).
AgeProcess age_process_at_level(const CompoundPoissonPath& path, double a, double n,
                                const std::vector<double>& age_offsets = {});

// Infinite forest: excursions above 0, each entered by a jump with the initial-jump
// law split uniformly into a part below 0 and a part above. Time spent below 0 is
// cut down to the final approach, so ages at levels >= 0 are those of the full path.
struct ForestPath {
    CompoundPoissonPath path;
};
ForestPath forest_path(std::size_t excursions, Rng& rng, std::uint64_t max_jumps = 1ull << 26);

// Streams the forest and keeps only the first max_atoms crossings of n*a. With
// start_at_level the path starts on the level, otherwise at 0.
AgeProcess forest_age_process(double a, double n, std::size_t max_atoms, Rng& rng,
                              std::uint64_t max_jumps, bool start_at_level = true);

struct RestrictionReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::vector<std::size_t> violating_jumps;
};
RestrictionReport check_restriction_consistency(const AgeProcess& lower, const AgeProcess& upper,
                                                double tol = 1e-9);

struct Fragment {
    int source = 0;             // 0 or 1
    double start_level = 0.0;
    double end_level = 0.0;     // top of the crossing jump, or 0 if it died
    std::size_t first_jump = 0; // index into the reduced path
    std::size_t jumps = 0;
    bool hit_zero = false;
};

struct ReducedJCCP {
    double v0 = 0.0, v1 = 0.0;
    double age0 = 0.0, age1 = 0.0;
    CompoundPoissonPath path;          // interwoven contour, continuous apart from jumps
    std::vector<int> jump_source;      // per reduced-path jump
    std::vector<Fragment> fragments;
    std::vector<double> clock_tops;    // death levels of successive clocks
    std::vector<CompoundPoissonPath> sources;  // the two source paths in their own clocks
    int terminal = -1;                 // source that hit 0
    bool complete = true;
};

ReducedJCCP reduced_jccp(double v0, double v1, Rng& rng, double age0 = 0.0, double age1 = 0.0,
                         std::uint64_t max_jumps = 1ull << 26);

Street street_at_level(const ReducedJCCP& reduced, double a, double n);

// Sample from the law of V = I_0 + J_0 and a pair.
std::pair<double, double> initial_jump_pair(Rng& rng);

// One excursion of the path above its running infimum; reports its first crossing of `level`.
struct ExcursionCrossing {
    bool reached = false;
    double undershoot = 0.0;
};
ExcursionCrossing excursion_first_crossing(double level, Rng& rng);

struct SigmaEstimate {
    double n = 0.0;
    double rate = 0.0;
    double se = 0.0;
    std::size_t hits = 0;
    std::size_t pairs = 0;
};
SigmaEstimate estimate_sigma_rate(double a, double n, std::size_t pairs, std::uint64_t key);

}  // namespace ctl
