#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ising {

using Vertex = std::uint32_t;

/// Integer displacement in Z^d.
using Offset = std::vector<int>;

/// Order of the L_p norm used for one-step adjacency: an integer p >= 1 or infinity.
class NormOrder {
public:
    static NormOrder finite(int p);
    static NormOrder infinity() { return NormOrder(0); }
    /// Accepts a positive integer or the token "inf".
    static NormOrder parse(std::string_view text);

    bool is_infinite() const { return p_ == 0; }
    int order() const { return p_; }
    std::string to_string() const;

    /// Exact integer test of ||o||_p <= rho (compares sum |o_i|^p against rho^p).
    bool within(std::span<const int> o, int rho) const;

    friend bool operator==(const NormOrder&, const NormOrder&) = default;

private:
    explicit NormOrder(int p) : p_(p) {}
    int p_;
};

/// The (d, p, rho) triple that fixes the local geometry independently of the size n.
struct LatticeShape {
    int d = 1;
    NormOrder p = NormOrder::finite(1);
    int rho = 1;

    friend bool operator==(const LatticeShape&, const LatticeShape&) = default;
};

/// Sorted nonzero offsets o with ||o||_p <= rho.
std::vector<Offset> neighbor_offsets(const LatticeShape& shape);

/// Offsets of the graph-distance ball of radius r around the origin of Z^d, in
/// lexicographic order.
std::vector<Offset> ball_offsets(const LatticeShape& shape, int r);

/// Graph distance from the origin in Z^d, or -1 if it exceeds max_radius.
int graph_norm(const LatticeShape& shape, std::span<const int> o, int max_radius);

/// The torus {0..n-1}^d with edges between vertices whose componentwise
/// difference mod n has L_p norm at most rho. Vertices are indexed row-major
/// (first coordinate most significant). Immutable after construction.
class TorusLattice {
public:
    TorusLattice(int n, int d, NormOrder p, int rho);

    int size() const { return n_; }
    int dimension() const { return shape_.d; }
    NormOrder norm() const { return shape_.p; }
    int range() const { return shape_.rho; }
    const LatticeShape& shape() const { return shape_; }

    std::size_t num_vertices() const { return num_vertices_; }
    /// Common neighbor count V.
    int degree() const { return static_cast<int>(offsets_.size()); }
    std::size_t num_edges() const { return num_vertices_ * offsets_.size() / 2; }

    const std::vector<Offset>& neighbor_offsets() const { return offsets_; }

    /// Neighbors of x, in the order of neighbor_offsets().
    std::span<const Vertex> neighbors(Vertex x) const;
    bool adjacent(Vertex x, Vertex y) const;

    std::vector<int> coordinates(Vertex x) const;
    /// Reduces each coordinate mod n.
    Vertex vertex_at(std::span<const int> coords) const;
    Vertex translate(Vertex x, std::span<const int> offset) const;

    /// Every edge once, as (u, v) with u < v, sorted.
    std::vector<std::pair<Vertex, Vertex>> edges() const;

    void check_vertex(Vertex x) const;

private:
    int n_;
    LatticeShape shape_;
    std::size_t num_vertices_;
    std::vector<Offset> offsets_;
    std::vector<Vertex> table_;
};

TorusLattice build_lattice(int n, int d, NormOrder p, int rho);

/// Graph-distance ball B(center, radius) on a torus.
struct Ball {
    Vertex center = 0;
    int radius = 0;
    /// Offsets from the center, lexicographic; members[i] = center + offsets[i].
    std::vector<Offset> offsets;
    std::vector<Vertex> members;
    /// Number of torus edges with both endpoints in the ball.
    std::size_t alpha = 0;

    std::size_t beta() const { return members.size(); }
};

/// Requires n > 2 * rho * radius.
Ball ball(const TorusLattice& lattice, Vertex x, int r);

/// dB = B(x, r+1) \ B(x, r), ordered by offset from the center.
std::vector<Vertex> ball_boundary(const TorusLattice& lattice, const Ball& b);

/// dV for an arbitrary vertex set, sorted by index.
std::vector<Vertex> vertex_boundary(const TorusLattice& lattice, std::span<const Vertex> set);

/// V together with dV, sorted by index.
std::vector<Vertex> closure(const TorusLattice& lattice, std::span<const Vertex> set);

}  // namespace ising
