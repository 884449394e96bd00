#include <doctest.h>

#include <cmath>
#include <map>

#include "ctl/besq.hpp"
#include "ctl/cladogram.hpp"
#include "ctl/parallel.hpp"

using namespace ctl;

TEST_CASE("shape counts are double factorials") {
    for (int n = 1; n <= 6; ++n)
        CHECK(enumerate_rooted_shapes(n).size() == double_factorial(2 * n - 3 < 1 ? 1 : 2 * n - 3));
}

TEST_CASE("three-leaf chain moves uniformly") {
    auto p = exact_transition_matrix(3);
    REQUIRE(p.size() == 3);
    for (const auto& row : p)
        for (double x : row) CHECK(x == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("transition matrix is doubly stochastic") {
    auto p = exact_transition_matrix(5);
    for (std::size_t j = 0; j < p.size(); ++j) {
        double row = 0, col = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            row += p[j][i];
            col += p[i][j];
        }
        CHECK(row == doctest::Approx(1.0));
        CHECK(col == doctest::Approx(1.0));
    }
}

TEST_CASE("insert and remove keep the tree valid") {
    Rng r(9);
    RootedBinaryTree t = RootedBinaryTree::random(12, r);
    t.audit();
    CHECK(t.edge_count() == 2u * 12u - 1u);
    for (int k = 0; k < 2000; ++k) {
        discrete_step(t, r);
        t.audit();
    }
    CHECK(t.n_leaves() == 12);
    t.remove_leaf(5);
    t.relabel(12, 5);
    t.audit();
    CHECK(t.n_leaves() == 11);
}

TEST_CASE("canonical form ignores child order") {
    RootedBinaryTree a;
    a.insert_leaf(a.leaf_of(1), 2);
    RootedBinaryTree b;
    int e = b.leaf_of(1);
    b.insert_leaf(e, 2);
    CHECK(a == b);
    CHECK(a.canonical().size() > 0);
}

TEST_CASE("discrete step events are well formed") {
    Rng r(1);
    RootedBinaryTree t = RootedBinaryTree::random(6, r);
    ChainEvent e = discrete_step(t, r);
    CHECK(e.label >= 1);
    CHECK(e.label <= 6);
    CHECK(to_json_line(e).find("birth") != std::string::npos);
}

TEST_CASE("rescaled leaf count follows the dimension -1 mean") {
    const double n = 200;
    auto z = replicate(1500, 21, [&](std::size_t, Rng& r) {
        RootedBinaryTree t = RootedBinaryTree::random(200, r);
        poissonized_run(t, n * 0.5, r, nullptr, false);
        return t.n_leaves() / n;
    });
    double m = 0, m2 = 0;
    for (double v : z) {
        m += v;
        m2 += v * v;
    }
    m /= z.size();
    double se = std::sqrt((m2 / z.size() - m * m) / z.size());
    CHECK(std::abs(m - 0.628904145185155) < 3.5 * se);
}

TEST_CASE("part trackers stop when one part dies") {
    Rng r(33);
    RootedBinaryTree t = RootedBinaryTree::random(5, r);
    int u = t.children(t.root())[0];
    auto parts = track_parts(t, u, 1e6, r);
    int extinct = (parts[0].extinct_at ? 1 : 0) + (parts[1].extinct_at ? 1 : 0);
    CHECK(extinct == 1);
    for (const auto& p : parts) CHECK(p.leaf_count_path.front().first == 0.0);
}
