#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ising/lattice.hpp"
#include "ising/spin_state.hpp"

namespace ising {

/// Magnetic field a and pair potential b. The pair potential is never negative.
class Potentials {
public:
    Potentials(double a, double b);

    double a() const { return a_; }
    double b() const { return b_; }
    /// a < 0: rare positive vertices.
    bool rare_positive_regime() const { return a_ < 0.0; }

private:
    double a_;
    double b_;
};

/// A sign assignment on a finite set of torus vertices.
class Assignment {
public:
    Assignment() = default;
    /// Every site of `support` is set, + exactly on `plus` (which must lie in support).
    static Assignment from_positives(std::span<const Vertex> support, std::span<const Vertex> plus);

    void set(Vertex x, Spin s) { spins_[x] = s; }
    bool contains(Vertex x) const { return spins_.count(x) != 0; }
    Spin at(Vertex x) const;
    std::size_t size() const { return spins_.size(); }

    std::vector<Vertex> support() const;
    std::vector<Vertex> positives() const;
    bool disjoint_from(const Assignment& other) const;
    /// Concatenation on the union of two disjoint supports.
    Assignment joined(const Assignment& other) const;

private:
    std::map<Vertex, Spin> spins_;
};

/// Number of torus edges with both endpoints in `set`.
std::size_t internal_edge_count(const TorusLattice& lattice, std::span<const Vertex> set);

/// gamma = V |P| - 2 |E(P)|: edges between the positive set and its complement.
long perimeter(const TorusLattice& lattice, std::span<const Vertex> positives);

/// log W = 2 a k - 2 b gamma.
double log_weight(std::size_t k, long gamma, const Potentials& pot);
double log_weight(const TorusLattice& lattice, std::span<const Vertex> positives, const Potentials& pot);

/// Edges {y, z} with y in A, z in B and both endpoints +. Supports must be disjoint.
std::size_t connection(const Assignment& A, const Assignment& B, const TorusLattice& lattice);

/// A local configuration: a sign on every vertex of the graph-distance ball
/// B(0, r), identified with its set of positive offsets.
class LocalPattern {
public:
    LocalPattern(LatticeShape shape, int radius, std::vector<Offset> positives);
    /// `mask[i]` is the sign of ball_offsets()[i].
    static LocalPattern from_mask(LatticeShape shape, int radius, const std::vector<bool>& mask);
    static LocalPattern null(LatticeShape shape, int radius) { return {shape, radius, {}}; }
    /// Every local configuration of the given radius, in mask-index order (guarded).
    static std::vector<LocalPattern> all(LatticeShape shape, int radius);

    const LatticeShape& shape() const { return shape_; }
    int radius() const { return radius_; }
    const std::vector<Offset>& ball_offsets() const { return ball_; }
    const std::vector<Offset>& positives() const { return positives_; }
    const std::vector<bool>& mask() const { return mask_; }

    std::size_t k() const { return positives_.size(); }
    std::size_t beta() const { return ball_.size(); }
    bool is_null() const { return positives_.empty(); }
    bool covers_ball() const { return positives_.size() == ball_.size(); }
    /// Positives within B(0, r-1).
    bool is_clean() const { return clean_; }

    /// Throws unless the lattice has this shape and n > 2 rho r.
    void check_lattice(const TorusLattice& lattice) const;

    /// Ball members around x, in ball_offsets() order.
    std::vector<Vertex> ball_vertices(const TorusLattice& lattice, Vertex x) const;
    /// x + V_+(eta), sorted by vertex index.
    std::vector<Vertex> positive_vertices(const TorusLattice& lattice, Vertex x) const;
    /// eta_x as a sign assignment on B(x, r).
    Assignment placed(const TorusLattice& lattice, Vertex x) const;

    friend bool operator==(const LocalPattern& l, const LocalPattern& r)
    {
        return l.shape_ == r.shape_ && l.radius_ == r.radius_ && l.mask_ == r.mask_;
    }

private:
    LatticeShape shape_;
    int radius_;
    std::vector<Offset> ball_;
    std::vector<Offset> positives_;
    std::vector<bool> mask_;
    bool clean_ = true;
};

struct PatternStats {
    std::size_t k = 0;
    long gamma = 0;
};

PatternStats pattern_stats(const LocalPattern& pattern, const TorusLattice& lattice);

/// Probability gap, in log scale.
struct GapResult {
    double log_gap = 0.0;
    /// 2a - 2b (V - 2 c*), c* the largest count of positive ball neighbors of one boundary vertex.
    double log_closed_form = 0.0;
    int max_connection = 0;
    /// The exact maximum came from enumeration rather than a minimum cut.
    bool exhaustive = false;
    /// The exact maximum disagreed with the closed form; log_gap holds the exact value.
    bool mismatch = false;
    std::string diagnostic;

    double value() const;
};

/// Closed form, always cross-checked against the exact maximum: by enumeration
/// when the boundary has at most `check_limit` vertices, by minimum cut otherwise.
GapResult probability_gap(const LocalPattern& pattern, const Potentials& pot,
                          const TorusLattice& lattice, std::size_t check_limit = 16);

/// Exact max over all nonnull boundary configurations of log W(eta_x sigma) - log W(eta).
double log_probability_gap_bruteforce(const LocalPattern& pattern, const Potentials& pot,
                                      const TorusLattice& lattice);

/// Max over strict positive supersets eta' of eta within the ball of log W(eta') - log W(eta).
/// Exact for any ball size (b >= 0 makes the objective supermodular).
double log_maximality_probability(const LocalPattern& pattern, const Potentials& pot,
                                  const TorusLattice& lattice);

struct PatternReport {
    PatternStats stats;
    double log_weight = 0.0;
    GapResult gap;
    /// Empty when the pattern covers the whole ball.
    std::optional<double> log_theta;
    bool clean = false;
};

PatternReport analyze_pattern(const LocalPattern& pattern, const Potentials& pot,
                              const TorusLattice& lattice);

/// Precomputed placement of one pattern on one lattice for repeated counting.
class PatternScanner {
public:
    PatternScanner(const LocalPattern& pattern, const TorusLattice& lattice);

    std::size_t count_exact(const SpinState& state) const;
    std::size_t count_upper(const SpinState& state) const;

private:
    template <bool Upper>
    std::size_t scan(const SpinState& state) const;

    const TorusLattice* lattice_;
    // Positive offsets first, then negative ones; positives_ of them are +.
    std::vector<Offset> offsets_;
    std::size_t positives_ = 0;
};

/// X_n(eta): centers x where the state on B(x, r) equals eta_x exactly.
std::size_t count_occurrences(const SpinState& state, const LocalPattern& pattern,
                              const TorusLattice& lattice);

/// Upper count: centers x where every vertex of x + V_+(eta) is +.
std::size_t count_upper(const SpinState& state, const LocalPattern& pattern,
                        const TorusLattice& lattice);

}  // namespace ising
