#include "ising/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <set>
#include <stdexcept>

namespace ising {

namespace {

constexpr std::size_t kMaxTableEntries = std::size_t{1} << 30;

// rho^p must fit so that the norm test stays in exact integer arithmetic.
bool power_fits(int base, int p)
{
    constexpr std::uint64_t limit = std::uint64_t{1} << 62;
    std::uint64_t acc = 1;
    for (int i = 0; i < p; ++i) {
        if (acc > limit / static_cast<std::uint64_t>(base)) {
            return false;
        }
        acc *= static_cast<std::uint64_t>(base);
    }
    return true;
}

// Callers guarantee base <= rho with rho^p < 2^62.
std::uint64_t ipow(std::uint64_t base, int p)
{
    std::uint64_t acc = 1;
    for (int i = 0; i < p; ++i) {
        acc *= base;
    }
    return acc;
}

void validate_shape(const LatticeShape& shape)
{
    if (shape.d < 1) {
        throw std::invalid_argument("dimension d must be >= 1");
    }
    if (shape.rho < 1) {
        throw std::invalid_argument("range rho must be >= 1");
    }
    if (!shape.p.is_infinite() && !power_fits(shape.rho, shape.p.order())) {
        throw std::invalid_argument("norm order p too large for range rho");
    }
}

}  // namespace

NormOrder NormOrder::finite(int p)
{
    if (p < 1) {
        throw std::invalid_argument("norm order p must be >= 1 or inf");
    }
    return NormOrder(p);
}

NormOrder NormOrder::parse(std::string_view text)
{
    if (text == "inf" || text == "infinity") {
        return infinity();
    }
    int p = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("norm order must be a positive integer or 'inf', got '" +
                                    std::string(text) + "'");
    }
    return finite(p);
}

std::string NormOrder::to_string() const
{
    return is_infinite() ? std::string("inf") : std::to_string(p_);
}

bool NormOrder::within(std::span<const int> o, int rho) const
{
    for (int c : o) {
        if (std::abs(c) > rho) {
            return false;
        }
    }
    if (is_infinite()) {
        return true;
    }
    if (!power_fits(rho, p_)) {
        throw std::invalid_argument("norm order p too large for range rho");
    }
    const std::uint64_t bound = ipow(static_cast<std::uint64_t>(rho), p_);
    std::uint64_t sum = 0;
    for (int c : o) {
        sum += ipow(static_cast<std::uint64_t>(std::abs(c)), p_);
        if (sum > bound) {
            return false;
        }
    }
    return true;
}

std::vector<Offset> neighbor_offsets(const LatticeShape& shape)
{
    validate_shape(shape);
    std::vector<Offset> out;
    Offset o(shape.d, -shape.rho);
    for (;;) {
        bool nonzero = std::any_of(o.begin(), o.end(), [](int c) { return c != 0; });
        if (nonzero && shape.p.within(o, shape.rho)) {
            out.push_back(o);
        }
        int i = shape.d - 1;
        while (i >= 0 && o[i] == shape.rho) {
            o[i] = -shape.rho;
            --i;
        }
        if (i < 0) {
            break;
        }
        ++o[i];
    }
    return out;
}

namespace {

// Breadth-first layers of Z^d around the origin; layers[k] holds offsets at distance k.
std::vector<std::vector<Offset>> bfs_layers(const LatticeShape& shape, int r)
{
    auto steps = neighbor_offsets(shape);
    std::set<Offset> seen;
    std::vector<std::vector<Offset>> layers;
    layers.push_back({Offset(shape.d, 0)});
    seen.insert(layers[0][0]);
    for (int k = 1; k <= r; ++k) {
        std::set<Offset> next;
        for (const auto& u : layers.back()) {
            for (const auto& s : steps) {
                Offset v(shape.d);
                for (int i = 0; i < shape.d; ++i) {
                    v[i] = u[i] + s[i];
                }
                if (!seen.count(v)) {
                    next.insert(v);
                }
            }
        }
        seen.insert(next.begin(), next.end());
        layers.emplace_back(next.begin(), next.end());
    }
    return layers;
}

}  // namespace

std::vector<Offset> ball_offsets(const LatticeShape& shape, int r)
{
    if (r < 0) {
        throw std::invalid_argument("ball radius must be >= 0");
    }
    std::vector<Offset> out;
    for (auto& layer : bfs_layers(shape, r)) {
        out.insert(out.end(), layer.begin(), layer.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

int graph_norm(const LatticeShape& shape, std::span<const int> o, int max_radius)
{
    if (static_cast<int>(o.size()) != shape.d) {
        throw std::invalid_argument("offset has wrong dimension");
    }
    Offset target(o.begin(), o.end());
    auto layers = bfs_layers(shape, max_radius);
    for (std::size_t k = 0; k < layers.size(); ++k) {
        if (std::binary_search(layers[k].begin(), layers[k].end(), target)) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

TorusLattice::TorusLattice(int n, int d, NormOrder p, int rho)
    : n_(n), shape_{d, p, rho}, num_vertices_(0)
{
    validate_shape(shape_);
    if (n < 2) {
        throw std::invalid_argument("lattice size n must be >= 2");
    }
    // Offsets in [-rho, rho]^d stay distinct mod n only when n > 2 rho.
    if (n <= 2 * rho) {
        throw std::invalid_argument("lattice size n must exceed 2*rho (n=" + std::to_string(n) +
                                    ", rho=" + std::to_string(rho) + ")");
    }
    std::size_t count = 1;
    for (int i = 0; i < d; ++i) {
        if (count > std::numeric_limits<Vertex>::max() / static_cast<std::size_t>(n)) {
            throw std::invalid_argument("lattice has too many vertices");
        }
        count *= static_cast<std::size_t>(n);
    }
    num_vertices_ = count;
    offsets_ = ising::neighbor_offsets(shape_);
    if (num_vertices_ * offsets_.size() > kMaxTableEntries) {
        throw std::invalid_argument("lattice neighbor table too large");
    }

    table_.resize(num_vertices_ * offsets_.size());
    std::vector<int> c(d);
    for (std::size_t x = 0; x < num_vertices_; ++x) {
        std::size_t rest = x;
        for (int i = d - 1; i >= 0; --i) {
            c[i] = static_cast<int>(rest % n);
            rest /= n;
        }
        for (std::size_t j = 0; j < offsets_.size(); ++j) {
            std::size_t idx = 0;
            for (int i = 0; i < d; ++i) {
                int v = (c[i] + offsets_[j][i]) % n;
                if (v < 0) {
                    v += n;
                }
                idx = idx * n + static_cast<std::size_t>(v);
            }
            table_[x * offsets_.size() + j] = static_cast<Vertex>(idx);
        }
    }
}

void TorusLattice::check_vertex(Vertex x) const
{
    if (x >= num_vertices_) {
        throw std::out_of_range("vertex index " + std::to_string(x) + " out of range");
    }
}

std::span<const Vertex> TorusLattice::neighbors(Vertex x) const
{
    check_vertex(x);
    return {table_.data() + static_cast<std::size_t>(x) * offsets_.size(), offsets_.size()};
}

bool TorusLattice::adjacent(Vertex x, Vertex y) const
{
    auto nb = neighbors(x);
    return std::find(nb.begin(), nb.end(), y) != nb.end();
}

std::vector<int> TorusLattice::coordinates(Vertex x) const
{
    check_vertex(x);
    std::vector<int> c(shape_.d);
    std::size_t rest = x;
    for (int i = shape_.d - 1; i >= 0; --i) {
        c[i] = static_cast<int>(rest % n_);
        rest /= n_;
    }
    return c;
}

Vertex TorusLattice::vertex_at(std::span<const int> coords) const
{
    if (static_cast<int>(coords.size()) != shape_.d) {
        throw std::invalid_argument("coordinate vector has wrong dimension");
    }
    std::size_t idx = 0;
    for (int v : coords) {
        int m = v % n_;
        if (m < 0) {
            m += n_;
        }
        idx = idx * n_ + static_cast<std::size_t>(m);
    }
    return static_cast<Vertex>(idx);
}

Vertex TorusLattice::translate(Vertex x, std::span<const int> offset) const
{
    auto c = coordinates(x);
    if (offset.size() != c.size()) {
        throw std::invalid_argument("offset has wrong dimension");
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] += offset[i];
    }
    return vertex_at(c);
}

std::vector<std::pair<Vertex, Vertex>> TorusLattice::edges() const
{
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(num_edges());
    for (Vertex u = 0; u < num_vertices_; ++u) {
        for (Vertex v : neighbors(u)) {
            if (u < v) {
                out.emplace_back(u, v);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

TorusLattice build_lattice(int n, int d, NormOrder p, int rho)
{
    return TorusLattice(n, d, p, rho);
}

Ball ball(const TorusLattice& lattice, Vertex x, int r)
{
    lattice.check_vertex(x);
    if (r < 0) {
        throw std::invalid_argument("ball radius must be >= 0");
    }
    if (lattice.size() <= 2 * lattice.range() * r) {
        throw std::invalid_argument("self-overlapping ball: need n > 2*rho*r (n=" +
                                    std::to_string(lattice.size()) + ", rho=" +
                                    std::to_string(lattice.range()) + ", r=" + std::to_string(r) + ")");
    }
    Ball b;
    b.center = x;
    b.radius = r;
    b.offsets = ball_offsets(lattice.shape(), r);
    b.members.reserve(b.offsets.size());
    for (const auto& o : b.offsets) {
        b.members.push_back(lattice.translate(x, o));
    }
    std::vector<Vertex> sorted = b.members;
    std::sort(sorted.begin(), sorted.end());
    for (Vertex u : sorted) {
        for (Vertex v : lattice.neighbors(u)) {
            if (u < v && std::binary_search(sorted.begin(), sorted.end(), v)) {
                ++b.alpha;
            }
        }
    }
    return b;
}

std::vector<Vertex> ball_boundary(const TorusLattice& lattice, const Ball& b)
{
    auto outer = ball_offsets(lattice.shape(), b.radius + 1);
    std::vector<Vertex> inside = b.members;
    std::sort(inside.begin(), inside.end());
    std::vector<Vertex> out;
    std::vector<Vertex> seen;
    for (const auto& o : outer) {
        if (std::binary_search(b.offsets.begin(), b.offsets.end(), o)) {
            continue;
        }
        Vertex v = lattice.translate(b.center, o);
        if (std::binary_search(inside.begin(), inside.end(), v)) {
            continue;
        }
        if (std::find(seen.begin(), seen.end(), v) != seen.end()) {
            continue;
        }
        seen.push_back(v);
        out.push_back(v);
    }
    return out;
}

std::vector<Vertex> vertex_boundary(const TorusLattice& lattice, std::span<const Vertex> set)
{
    std::vector<Vertex> sorted(set.begin(), set.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<Vertex> out;
    for (Vertex u : sorted) {
        for (Vertex v : lattice.neighbors(u)) {
            if (!std::binary_search(sorted.begin(), sorted.end(), v)) {
                out.push_back(v);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Vertex> closure(const TorusLattice& lattice, std::span<const Vertex> set)
{
    auto out = vertex_boundary(lattice, set);
    out.insert(out.end(), set.begin(), set.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace ising
