#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ctl/splitting.hpp"
#include "ctl/street.hpp"

using namespace ctl;

TEST_CASE("contour round trip recovers the tree") {
    for (std::uint64_t k = 0; k < 20; ++k) {
        Rng r(derive_key(5, k));
        ChronologicalTree t = sample_splitting_tree(1.0 + r.exponential(), 5000, r);
        if (t.truncated) continue;
        t.validate();
        CompoundPoissonPath p = jccp_from_tree(t);
        ChronologicalTree back = tree_from_jccp(p);
        CHECK(same_tree(t, back));
        double jumps = 0;
        for (double z : p.jump_sizes) jumps += z;
        CHECK(jumps == doctest::Approx(t.total_length()));
    }
}

TEST_CASE("ages at two levels on a hand-built path") {
    CompoundPoissonPath p;
    p.start = 0.0;
    p.jump_times = {1.0, 3.0};
    p.jump_sizes = {5.0, 4.0};
    p.end_time = 10.0;
    AgeProcess lo = age_process_at_level(p, 1.5, 1.0);
    AgeProcess hi = age_process_at_level(p, 3.0, 1.0);
    REQUIRE(lo.atoms.size() == 1);
    CHECK(lo.atoms[0].age == doctest::Approx(2.5));
    REQUIRE(hi.atoms.size() == 2);
    CHECK(hi.atoms[0].age == doctest::Approx(4.0));
    CHECK(hi.atoms[1].age == doctest::Approx(1.0));
    RestrictionReport rep = check_restriction_consistency(lo, hi);
    CHECK(rep.checked == 1);
    CHECK(rep.violations == 0);
    CHECK(hi.count_in_box(0.0, 10.0, 2.0) == 1);
}

TEST_CASE("forest paths are restriction consistent") {
    Rng r(14);
    ForestPath f = forest_path(6, r, 1u << 20);
    AgeProcess lo = age_process_at_level(f.path, 1.0, 50.0), hi = age_process_at_level(f.path, 2.0, 50.0);
    CHECK(check_restriction_consistency(lo, hi).violations == 0);
}

TEST_CASE("forest age process stays in bounds") {
    Rng r(3);
    AgeProcess p = forest_age_process(1.0, 100.0, 40, r, 1u << 24);
    CHECK_FALSE(p.truncated);
    CHECK(p.atoms.size() == 40);
    for (const auto& a : p.atoms) CHECK(a.age > 0.0);
}

TEST_CASE("reduced contour is complete and readable") {
    Rng r(10);
    auto [v0, v1] = initial_jump_pair(r);
    ReducedJCCP red = reduced_jccp(v0, v1, r);
    CHECK(red.complete);
    CHECK(red.terminal >= 0);
    Street s = street_at_level(red, 0.5 * std::min(v0, v1) / 100.0, 100.0);
    CHECK(s.length >= 0.0);
}

TEST_CASE("excursion crossings lie below the level") {
    Rng r(7);
    for (int i = 0; i < 300; ++i) {
        ExcursionCrossing c = excursion_first_crossing(5.0, r);
        if (c.reached) {
            CHECK(c.undershoot > 0.0);
            CHECK(c.undershoot <= 5.0);
        }
    }
}

TEST_CASE("street serialization round trip") {
    Street s;
    s.level = 2.0;
    s.length = 1.25;
    s.clock = 0.5;
    s.has_clock = true;
    s.atoms = {{0.25, 0.1}, {1.0, 0.7}};
    Street b = street_from_json(to_json(s));
    CHECK(b.length == s.length);
    CHECK(b.atoms == s.atoms);
    CHECK(b.mass() == doctest::Approx(0.8));
    CHECK(entrance_length_mean(2.0 * std::numbers::pi) == doctest::Approx(1.5));
}

TEST_CASE("entrance and transition streets live at their levels") {
    Rng r(19);
    Street s = entrance_sample(1.0, r);
    CHECK(s.level == 1.0);
    for (const auto& [pos, age] : s.atoms) {
        CHECK(pos >= 0.0);
        CHECK(pos <= s.length);
        CHECK(age > 0.0);
    }
    TransitionResult t = transition_sample(s, 1.5, 500.0, r);
    CHECK(t.street.level == 1.5);
}
