#include <doctest.h>

#include <cmath>

#include "ctl/mailman.hpp"

using namespace ctl;

namespace {

// Root street with two atoms; every later street is a bare clock of length one.
StreetStore worked_store() {
    StreetStore store([](double age, Rng&) {
        Street s;
        s.length = 1.0;
        s.clock = age;
        s.has_clock = true;
        return s;
    });
    Street root;
    root.length = 2.0;
    root.atoms = {{0.5, 1.0}, {1.5, 3.0}};
    store.add_root(root, 1.0);
    return store;
}

Mailman from_addresses(std::initializer_list<std::pair<double, int>> steps) {
    Mailman m;
    for (auto [a, b] : steps) m.steps.push_back({a, b, 0.0, -1, 0});
    m.depth = m.steps.size();
    return m;
}

}  // namespace

TEST_CASE("worked example: atoms are picked in proportion to age") {
    StreetStore store = worked_store();
    Rng r(1);
    int second = 0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        Mailman m = sample_mailman(store, 3, r);
        REQUIRE(m.steps.size() == 3);
        CHECK(m.steps[0].bit == 1);
        CHECK(m.steps[1].bit == 0);
        CHECK(m.steps[1].address == 1.0);
        second += m.steps[0].address == 1.5;
        CHECK(m.total() == doctest::Approx(m.steps[0].address + 2.0));
    }
    CHECK(std::abs(second / double(n) - 0.75) < 4.0 * std::sqrt(0.75 * 0.25 / n));
    CHECK(store.size() == 5);
}

TEST_CASE("worked example: recipe distances") {
    Mailman a = from_addresses({{0.5, 1}, {1.0, 0}, {1.0, 0}});
    Mailman b = from_addresses({{1.5, 1}, {1.0, 0}, {1.0, 0}});
    Mailman c = from_addresses({{0.5, 1}, {0.25, 1}, {1.0, 0}});
    CHECK(divergence_index(a, b) == 0);
    CHECK(recipe_meet_depth(a, b) == doctest::Approx(0.5));
    CHECK(recipe_distance(a, b) == doctest::Approx(5.0));
    CHECK(divergence_index(a, c) == 1);
    CHECK(recipe_meet_depth(a, c) == doctest::Approx(0.75));
    CHECK(recipe_distance(a, a) == 0.0);

    ProperKTree t = ktree_from_mailmen({a, b, c, a});
    CHECK(t.leaves() == 4);
    CHECK(t.distance(1, 2) == doctest::Approx(5.0));
    CHECK(t.distance(1, 3) == doctest::Approx(recipe_distance(a, c)));
    CHECK(t.distance(2, 3) == doctest::Approx(recipe_distance(b, c)));
    CHECK(t.distance(1, 4) == 0.0);
    CHECK(t.zero_edges() >= 1);
    CHECK(t.four_point_violations() == 0);
    CHECK(t.to_newick().back() == ';');
}

TEST_CASE("l1 diagnostic on a geometric sequence") {
    Mailman m;
    for (int k = 0; k < 32; ++k) m.steps.push_back({std::ldexp(1.0, -k), 1, 0.0, -1, 0});
    L1Diagnostic d = l1_mass_diagnostic(m);
    CHECK(d.partial == doctest::Approx(2.0 - std::ldexp(1.0, -31)));
    CHECK(d.rate == doctest::Approx(0.5));
    CHECK(d.tail == doctest::Approx(std::ldexp(1.0, -31)));
}

TEST_CASE("families give proper nested trees") {
    Rng r(23);
    MailmanFamily f = sample_family(1.0, 24, 16, r);
    ProperKTree t = ktree_from_mailmen(f.members);
    CHECK(t.four_point_violations() == 0);
    CHECK(nested_consistency_mismatches(f.members, 10) == 0);
    for (int i = 1; i <= 24; ++i)
        CHECK(t.leaf_depth(i) == doctest::Approx(f.members[static_cast<std::size_t>(i - 1)].total()));
}

TEST_CASE("one-step transition keeps every member") {
    Rng r(4);
    MailmanFamily f = sample_family(1.0, 8, 12, r);
    MailmanFamily g = one_step_transition(f, 1.5, r);
    CHECK(g.level == 1.5);
    CHECK(g.members.size() == 8);
    const std::size_t moves = g.fresh_steps + g.carried_steps + g.reused_steps + g.unmatched;
    CHECK(moves > 0);
    // filler subtrees from the embedding have no parent atom to match
    CHECK(g.unmatched * 10 <= moves);
    auto j = to_json(g);
    CHECK(j.contains("members"));
}
