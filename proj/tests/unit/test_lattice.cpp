#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ising/lattice.hpp"

using namespace ising;

namespace {

std::vector<Vertex> sorted(std::span<const Vertex> v)
{
    std::vector<Vertex> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    return out;
}

// Pairs of block cells within Chebyshev distance 1, counted directly.
std::size_t king_edges_in_block(int side)
{
    std::size_t count = 0;
    for (int i = 0; i < side * side; ++i) {
        for (int j = i + 1; j < side * side; ++j) {
            int dx = std::abs(i / side - j / side);
            int dy = std::abs(i % side - j % side);
            count += std::max(dx, dy) == 1;
        }
    }
    return count;
}

}  // namespace

TEST_CASE("neighbor counts")
{
    CHECK(build_lattice(8, 1, NormOrder::finite(1), 1).degree() == 2);
    CHECK(build_lattice(8, 2, NormOrder::finite(1), 1).degree() == 4);
    CHECK(build_lattice(8, 2, NormOrder::infinity(), 1).degree() == 8);
    CHECK(build_lattice(8, 3, NormOrder::finite(1), 1).degree() == 6);

    auto line = build_lattice(8, 1, NormOrder::finite(1), 1);
    CHECK(line.neighbor_offsets() == std::vector<Offset>{{-1}, {1}});
}

TEST_CASE("finite p adjacency matches the Euclidean test")
{
    for (int rho : {1, 2, 3}) {
        auto lat = build_lattice(4 * rho + 3, 2, NormOrder::finite(2), rho);
        int expected = 0;
        for (int x = -rho; x <= rho; ++x) {
            for (int y = -rho; y <= rho; ++y) {
                if ((x || y) && std::hypot(x, y) <= rho + 1e-9) {
                    ++expected;
                }
            }
        }
        CHECK(lat.degree() == expected);
    }
    // |o|_3^3 = 2 * 8 = 16 <= 27 but |o|_1 = 4 > 3.
    CHECK(NormOrder::finite(3).within(std::vector<int>{2, 2}, 3));
    CHECK_FALSE(NormOrder::finite(1).within(std::vector<int>{2, 2}, 3));
}

TEST_CASE("neighbors wrap around")
{
    auto line = build_lattice(8, 1, NormOrder::finite(1), 1);
    CHECK(sorted(line.neighbors(0)) == std::vector<Vertex>{1, 7});

    auto sq = build_lattice(4, 2, NormOrder::finite(1), 1);
    auto at = [&](int i, int j) { return sq.vertex_at(std::vector<int>{i, j}); };
    CHECK(sorted(sq.neighbors(at(0, 0))) == sorted(std::vector<Vertex>{at(3, 0), at(1, 0), at(0, 3), at(0, 1)}));

    auto king = build_lattice(8, 2, NormOrder::infinity(), 1);
    std::set<Vertex> block;
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            if (i || j) {
                block.insert(king.vertex_at(std::vector<int>{i, j}));
            }
        }
    }
    auto nb = king.neighbors(0);
    CHECK(std::set<Vertex>(nb.begin(), nb.end()) == block);
}

TEST_CASE("row-major indexing")
{
    auto lat = build_lattice(5, 3, NormOrder::finite(1), 1);
    CHECK(lat.vertex_at(std::vector<int>{1, 2, 3}) == 1 * 25 + 2 * 5 + 3);
    CHECK(lat.coordinates(38) == std::vector<int>{1, 2, 3});
    CHECK(lat.vertex_at(std::vector<int>{-1, 5, 7}) == lat.vertex_at(std::vector<int>{4, 0, 2}));
}

TEST_CASE("ball constants")
{
    auto line = build_lattice(8, 1, NormOrder::finite(1), 1);
    auto b = ball(line, 0, 1);
    CHECK(b.offsets == std::vector<Offset>{{-1}, {0}, {1}});
    CHECK(sorted(b.members) == std::vector<Vertex>{0, 1, 7});
    CHECK(b.beta() == 3);
    CHECK(b.alpha == 2);

    auto sq = ball(build_lattice(8, 2, NormOrder::finite(1), 1), 0, 1);
    CHECK(sq.beta() == 5);
    CHECK(sq.alpha == 4);

    auto king = ball(build_lattice(8, 2, NormOrder::infinity(), 1), 0, 1);
    CHECK(king.beta() == 9);
    CHECK(king.alpha == king_edges_in_block(3));
    CHECK(king.alpha == 20);

    CHECK(ball(build_lattice(8, 2, NormOrder::finite(1), 1), 0, 2).beta() == 13);
}

TEST_CASE("ball boundary")
{
    auto line = build_lattice(8, 1, NormOrder::finite(1), 1);
    auto bd = ball_boundary(line, ball(line, 0, 1));
    CHECK(sorted(bd) == std::vector<Vertex>{2, 6});

    auto sq = build_lattice(8, 2, NormOrder::finite(1), 1);
    CHECK(ball_boundary(sq, ball(sq, 0, 1)).size() == 13 - 5);

    for (auto p : {NormOrder::finite(1), NormOrder::infinity(), NormOrder::finite(2)}) {
        auto lat = build_lattice(9, 2, p, 2);
        auto b0 = ball(lat, 17, 0);
        CHECK(sorted(ball_boundary(lat, b0)) == sorted(lat.neighbors(17)));
    }
}

TEST_CASE("small tori keep the torus geometry")
{
    // n = 4, d = 2: the radius-2 shell wraps, so only 6 distinct boundary vertices remain.
    auto sq = build_lattice(4, 2, NormOrder::finite(1), 1);
    CHECK(ball_boundary(sq, ball(sq, 0, 1)).size() == 6);
    CHECK(vertex_boundary(sq, ball(sq, 0, 1).members).size() == 6);
}

TEST_CASE("invalid construction")
{
    CHECK_THROWS_AS(build_lattice(1, 1, NormOrder::finite(1), 1), std::invalid_argument);
    CHECK_THROWS_AS(build_lattice(8, 0, NormOrder::finite(1), 1), std::invalid_argument);
    CHECK_THROWS_AS(build_lattice(8, 1, NormOrder::finite(1), 0), std::invalid_argument);
    CHECK_THROWS_AS(NormOrder::finite(0), std::invalid_argument);
    CHECK_THROWS_AS(NormOrder::parse("zero"), std::invalid_argument);
    CHECK(NormOrder::parse("inf").is_infinite());
    CHECK(NormOrder::parse("3").order() == 3);

    auto line = build_lattice(4, 1, NormOrder::finite(1), 1);
    CHECK_THROWS_AS(ball(line, 0, 2), std::invalid_argument);
    CHECK_NOTHROW(ball(line, 0, 1));
    CHECK_THROWS(line.check_vertex(4));
}

TEST_CASE("translation, symmetry and nesting")
{
    std::mt19937_64 rng(3);
    for (auto p : {NormOrder::finite(1), NormOrder::infinity()}) {
        auto lat = build_lattice(7, 2, p, 1);
        auto other = build_lattice(11, 2, p, 1);
        std::uniform_int_distribution<Vertex> any(0, static_cast<Vertex>(lat.num_vertices() - 1));
        auto ref = ball(lat, 0, 1);
        for (int i = 0; i < 10; ++i) {
            Vertex x = any(rng);
            Vertex y = any(rng);
            auto cy = lat.coordinates(y);

            std::vector<Vertex> moved;
            for (Vertex z : lat.neighbors(x)) {
                moved.push_back(lat.translate(z, cy));
                CHECK(lat.adjacent(z, x));
            }
            CHECK(sorted(moved) == sorted(lat.neighbors(lat.translate(x, cy))));

            auto bx = ball(lat, x, 1);
            auto bxy = ball(lat, lat.translate(x, cy), 1);
            std::vector<Vertex> shifted;
            for (Vertex v : bx.members) {
                shifted.push_back(lat.translate(v, cy));
            }
            CHECK(shifted == bxy.members);
            CHECK(bx.beta() == ref.beta());
            CHECK(bx.alpha == ref.alpha);
        }
        auto far = ball(other, 5, 1);
        CHECK(far.beta() == ref.beta());
        CHECK(far.alpha == ref.alpha);

        auto inner = ball(lat, 3, 1);
        auto outer = ball(lat, 3, 2);
        for (Vertex v : inner.members) {
            CHECK(std::find(outer.members.begin(), outer.members.end(), v) != outer.members.end());
        }
        CHECK(outer.beta() == inner.beta() + ball_boundary(lat, inner).size());
    }
}

TEST_CASE("edges and closure")
{
    auto lat = build_lattice(5, 2, NormOrder::finite(1), 1);
    auto edges = lat.edges();
    CHECK(edges.size() == lat.num_edges());
    CHECK(edges.size() == 50);
    CHECK(std::all_of(edges.begin(), edges.end(), [](auto e) { return e.first < e.second; }));

    std::vector<Vertex> single{7};
    CHECK(closure(lat, single).size() == 1 + 4);
}
