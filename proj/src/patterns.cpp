#include "ising/patterns.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ising/errors.hpp"
#include "ising/extension.hpp"

namespace ising {

Potentials::Potentials(double a, double b) : a_(a), b_(b)
{
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw std::invalid_argument("potentials must be finite");
    }
    if (b < 0.0) {
        throw std::invalid_argument("pair potential b must be nonnegative");
    }
}

// ---------------------------------------------------------------------------
// Assignment

Assignment Assignment::from_positives(std::span<const Vertex> support, std::span<const Vertex> plus)
{
    Assignment out;
    for (Vertex v : support) {
        out.set(v, Spin::minus);
    }
    for (Vertex v : plus) {
        if (!out.contains(v)) {
            throw std::invalid_argument("positive vertex outside the assignment support");
        }
        out.set(v, Spin::plus);
    }
    return out;
}

Spin Assignment::at(Vertex x) const
{
    auto it = spins_.find(x);
    if (it == spins_.end()) {
        throw std::out_of_range("vertex " + std::to_string(x) + " not in assignment support");
    }
    return it->second;
}

std::vector<Vertex> Assignment::support() const
{
    std::vector<Vertex> out;
    out.reserve(spins_.size());
    for (const auto& [v, s] : spins_) {
        out.push_back(v);
    }
    return out;
}

std::vector<Vertex> Assignment::positives() const
{
    std::vector<Vertex> out;
    for (const auto& [v, s] : spins_) {
        if (s == Spin::plus) {
            out.push_back(v);
        }
    }
    return out;
}

bool Assignment::disjoint_from(const Assignment& other) const
{
    for (const auto& [v, s] : spins_) {
        if (other.contains(v)) {
            return false;
        }
    }
    return true;
}

Assignment Assignment::joined(const Assignment& other) const
{
    if (!disjoint_from(other)) {
        throw std::invalid_argument("cannot join assignments with overlapping supports");
    }
    Assignment out = *this;
    for (const auto& [v, s] : other.spins_) {
        out.set(v, s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Weights on arbitrary vertex sets

std::size_t internal_edge_count(const TorusLattice& lattice, std::span<const Vertex> set)
{
    std::vector<Vertex> sorted(set.begin(), set.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t count = 0;
    for (Vertex u : sorted) {
        for (Vertex v : lattice.neighbors(u)) {
            if (u < v && std::binary_search(sorted.begin(), sorted.end(), v)) {
                ++count;
            }
        }
    }
    return count;
}

long perimeter(const TorusLattice& lattice, std::span<const Vertex> positives)
{
    return static_cast<long>(lattice.degree()) * static_cast<long>(positives.size()) -
           2 * static_cast<long>(internal_edge_count(lattice, positives));
}

double log_weight(std::size_t k, long gamma, const Potentials& pot)
{
    return 2.0 * pot.a() * static_cast<double>(k) - 2.0 * pot.b() * static_cast<double>(gamma);
}

double log_weight(const TorusLattice& lattice, std::span<const Vertex> positives, const Potentials& pot)
{
    return log_weight(positives.size(), perimeter(lattice, positives), pot);
}

std::size_t connection(const Assignment& A, const Assignment& B, const TorusLattice& lattice)
{
    if (!A.disjoint_from(B)) {
        throw std::invalid_argument("connection requires disjoint supports");
    }
    auto plus_b = B.positives();
    std::size_t count = 0;
    for (Vertex y : A.positives()) {
        for (Vertex z : lattice.neighbors(y)) {
            if (std::binary_search(plus_b.begin(), plus_b.end(), z)) {
                ++count;
            }
        }
    }
    return count;
}

// ---------------------------------------------------------------------------
// LocalPattern

LocalPattern::LocalPattern(LatticeShape shape, int radius, std::vector<Offset> positives)
    : shape_(shape), radius_(radius)
{
    if (radius < 0) {
        throw std::invalid_argument("pattern radius must be >= 0");
    }
    ball_ = ising::ball_offsets(shape_, radius_);
    mask_.assign(ball_.size(), false);
    for (const auto& o : positives) {
        if (static_cast<int>(o.size()) != shape_.d) {
            throw std::invalid_argument("pattern offset has dimension " + std::to_string(o.size()) +
                                        ", expected " + std::to_string(shape_.d));
        }
        auto it = std::lower_bound(ball_.begin(), ball_.end(), o);
        if (it == ball_.end() || *it != o) {
            throw std::invalid_argument("pattern offset lies outside the ball of radius " +
                                        std::to_string(radius_));
        }
        auto idx = static_cast<std::size_t>(it - ball_.begin());
        if (mask_[idx]) {
            throw std::invalid_argument("duplicate pattern offset");
        }
        mask_[idx] = true;
    }
    for (std::size_t i = 0; i < ball_.size(); ++i) {
        if (mask_[i]) {
            positives_.push_back(ball_[i]);
        }
    }
    if (radius_ == 0) {
        clean_ = positives_.empty();
    } else {
        auto inner = ising::ball_offsets(shape_, radius_ - 1);
        clean_ = std::all_of(positives_.begin(), positives_.end(), [&](const Offset& o) {
            return std::binary_search(inner.begin(), inner.end(), o);
        });
    }
}

LocalPattern LocalPattern::from_mask(LatticeShape shape, int radius, const std::vector<bool>& mask)
{
    auto ball = ising::ball_offsets(shape, radius);
    if (mask.size() != ball.size()) {
        throw std::invalid_argument("pattern mask length does not match the ball size");
    }
    std::vector<Offset> plus;
    for (std::size_t i = 0; i < ball.size(); ++i) {
        if (mask[i]) {
            plus.push_back(ball[i]);
        }
    }
    return {shape, radius, std::move(plus)};
}

std::vector<LocalPattern> LocalPattern::all(LatticeShape shape, int radius)
{
    auto beta = ising::ball_offsets(shape, radius).size();
    require_enumerable(beta, "local configuration enumeration");
    std::vector<LocalPattern> out;
    out.reserve(std::size_t{1} << beta);
    std::vector<bool> mask(beta);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << beta); ++bits) {
        for (std::size_t i = 0; i < beta; ++i) {
            mask[i] = (bits >> i) & 1U;
        }
        out.push_back(from_mask(shape, radius, mask));
    }
    return out;
}

void LocalPattern::check_lattice(const TorusLattice& lattice) const
{
    if (!(lattice.shape() == shape_)) {
        throw std::invalid_argument("pattern geometry (d, p, rho) does not match the lattice");
    }
    if (lattice.size() <= 2 * shape_.rho * radius_) {
        throw std::invalid_argument("self-overlapping ball: need n > 2*rho*r");
    }
}

std::vector<Vertex> LocalPattern::ball_vertices(const TorusLattice& lattice, Vertex x) const
{
    check_lattice(lattice);
    std::vector<Vertex> out;
    out.reserve(ball_.size());
    for (const auto& o : ball_) {
        out.push_back(lattice.translate(x, o));
    }
    return out;
}

std::vector<Vertex> LocalPattern::positive_vertices(const TorusLattice& lattice, Vertex x) const
{
    check_lattice(lattice);
    std::vector<Vertex> out;
    out.reserve(positives_.size());
    for (const auto& o : positives_) {
        out.push_back(lattice.translate(x, o));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Assignment LocalPattern::placed(const TorusLattice& lattice, Vertex x) const
{
    auto members = ball_vertices(lattice, x);
    Assignment out;
    for (std::size_t i = 0; i < members.size(); ++i) {
        out.set(members[i], mask_[i] ? Spin::plus : Spin::minus);
    }
    return out;
}

PatternStats pattern_stats(const LocalPattern& pattern, const TorusLattice& lattice)
{
    auto plus = pattern.positive_vertices(lattice, 0);
    return {plus.size(), perimeter(lattice, plus)};
}

// ---------------------------------------------------------------------------
// Gap and maximality

namespace {

// log W(P + S) - log W(P) for S within the candidates, as a pairwise objective:
// each candidate contributes 2a - 2bV + 4b conn(i, P), each candidate edge 4b.
PairwiseObjective extension_objective(const TorusLattice& lattice, std::span<const Vertex> sorted_plus,
                                      std::span<const Vertex> candidates, const Potentials& pot,
                                      std::vector<int>* plus_neighbors = nullptr)
{
    std::vector<Vertex> order(candidates.begin(), candidates.end());
    std::vector<std::size_t> index(candidates.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        index[i] = i;
    }
    std::sort(index.begin(), index.end(), [&](auto l, auto r) { return candidates[l] < candidates[r]; });
    std::sort(order.begin(), order.end());

    PairwiseObjective f;
    f.unary.resize(candidates.size());
    const double degree = lattice.degree();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        int conn = 0;
        for (Vertex v : lattice.neighbors(candidates[i])) {
            if (std::binary_search(sorted_plus.begin(), sorted_plus.end(), v)) {
                ++conn;
            }
            auto it = std::lower_bound(order.begin(), order.end(), v);
            if (it != order.end() && *it == v) {
                auto j = index[static_cast<std::size_t>(it - order.begin())];
                if (i < j) {
                    f.pairs.push_back({i, j, 4.0 * pot.b()});
                }
            }
        }
        if (plus_neighbors) {
            plus_neighbors->push_back(conn);
        }
        f.unary[i] = 2.0 * pot.a() - 2.0 * pot.b() * degree + 4.0 * pot.b() * conn;
    }
    return f;
}

constexpr std::size_t kExhaustiveExtensionLimit = 16;

double maximize_extension(const PairwiseObjective& f, std::size_t exhaustive_limit)
{
    return f.size() <= exhaustive_limit ? maximize_nonempty_exhaustive(f) : maximize_nonempty_by_cut(f);
}

std::vector<Vertex> pattern_boundary(const LocalPattern& pattern, const TorusLattice& lattice)
{
    pattern.check_lattice(lattice);
    auto b = ball(lattice, 0, pattern.radius());
    return ball_boundary(lattice, b);
}

}  // namespace

double GapResult::value() const
{
    return std::exp(log_gap);
}

double log_probability_gap_bruteforce(const LocalPattern& pattern, const Potentials& pot,
                                      const TorusLattice& lattice)
{
    auto boundary = pattern_boundary(pattern, lattice);
    if (boundary.empty()) {
        throw std::domain_error("probability gap undefined: empty ball boundary on this torus");
    }
    require_enumerable(boundary.size(), "probability gap enumeration");
    auto plus = pattern.positive_vertices(lattice, 0);
    return maximize_nonempty_exhaustive(extension_objective(lattice, plus, boundary, pot));
}

GapResult probability_gap(const LocalPattern& pattern, const Potentials& pot,
                          const TorusLattice& lattice, std::size_t check_limit)
{
    auto boundary = pattern_boundary(pattern, lattice);
    if (boundary.empty()) {
        throw std::domain_error("probability gap undefined: empty ball boundary on this torus");
    }
    auto plus = pattern.positive_vertices(lattice, 0);
    std::vector<int> conn;
    const auto f = extension_objective(lattice, plus, boundary, pot, &conn);

    GapResult out;
    out.max_connection = *std::max_element(conn.begin(), conn.end());
    out.log_closed_form = 2.0 * pot.a() - 2.0 * pot.b() *
                          static_cast<double>(lattice.degree() - 2 * out.max_connection);
    out.exhaustive = boundary.size() <= std::min<std::size_t>(check_limit, kMaxEnumerationBits);
    const double exact = maximize_extension(f, out.exhaustive ? boundary.size() : 0);
    out.log_gap = out.log_closed_form;

    const double tol = 1e-12 * std::max(1.0, std::abs(exact));
    if (std::abs(exact - out.log_closed_form) > tol) {
        out.mismatch = true;
        out.log_gap = exact;
        std::ostringstream msg;
        msg.precision(17);
        msg << "probability gap: closed form log value " << out.log_closed_form << " differs from the exact maximum "
            << exact << "; using the exact value";
        out.diagnostic = msg.str();
    }
    return out;
}

double log_maximality_probability(const LocalPattern& pattern, const Potentials& pot,
                                  const TorusLattice& lattice)
{
    if (pattern.covers_ball()) {
        throw std::domain_error("maximality probability undefined: pattern covers the whole ball");
    }
    auto members = pattern.ball_vertices(lattice, 0);
    std::vector<Vertex> free;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!pattern.mask()[i]) {
            free.push_back(members[i]);
        }
    }
    auto plus = pattern.positive_vertices(lattice, 0);
    return maximize_extension(extension_objective(lattice, plus, free, pot), kExhaustiveExtensionLimit);
}

PatternReport analyze_pattern(const LocalPattern& pattern, const Potentials& pot,
                              const TorusLattice& lattice)
{
    PatternReport r;
    r.stats = pattern_stats(pattern, lattice);
    r.log_weight = log_weight(r.stats.k, r.stats.gamma, pot);
    r.gap = probability_gap(pattern, pot, lattice);
    if (!pattern.covers_ball()) {
        r.log_theta = log_maximality_probability(pattern, pot, lattice);
    }
    r.clean = pattern.is_clean();
    return r;
}

// ---------------------------------------------------------------------------
// Counting

PatternScanner::PatternScanner(const LocalPattern& pattern, const TorusLattice& lattice)
    : lattice_(&lattice)
{
    pattern.check_lattice(lattice);
    for (std::size_t i = 0; i < pattern.beta(); ++i) {
        if (pattern.mask()[i]) {
            offsets_.push_back(pattern.ball_offsets()[i]);
        }
    }
    positives_ = offsets_.size();
    for (std::size_t i = 0; i < pattern.beta(); ++i) {
        if (!pattern.mask()[i]) {
            offsets_.push_back(pattern.ball_offsets()[i]);
        }
    }
}

template <bool Upper>
std::size_t PatternScanner::scan(const SpinState& state) const
{
    const auto& lat = *lattice_;
    if (state.size() != lat.num_vertices()) {
        throw std::invalid_argument("spin state size does not match the lattice");
    }
    const int n = lat.size();
    const int d = lat.dimension();
    const std::size_t checked = Upper ? positives_ : offsets_.size();
    std::vector<int> c(d, 0);
    std::size_t count = 0;
    for (std::size_t x = 0; x < lat.num_vertices(); ++x) {
        bool match = true;
        for (std::size_t j = 0; j < checked && match; ++j) {
            const auto& o = offsets_[j];
            std::size_t idx = 0;
            for (int i = 0; i < d; ++i) {
                int v = c[i] + o[i];
                v = v < 0 ? v + n : (v >= n ? v - n : v);
                idx = idx * n + static_cast<std::size_t>(v);
            }
            bool want_plus = j < positives_;
            match = state.is_plus(static_cast<Vertex>(idx)) == want_plus;
        }
        if (match) {
            ++count;
        }
        for (int i = d - 1; i >= 0; --i) {
            if (++c[i] < n) {
                break;
            }
            c[i] = 0;
        }
    }
    return count;
}

std::size_t PatternScanner::count_exact(const SpinState& state) const
{
    return scan<false>(state);
}

std::size_t PatternScanner::count_upper(const SpinState& state) const
{
    return scan<true>(state);
}

std::size_t count_occurrences(const SpinState& state, const LocalPattern& pattern,
                              const TorusLattice& lattice)
{
    return PatternScanner(pattern, lattice).count_exact(state);
}

std::size_t count_upper(const SpinState& state, const LocalPattern& pattern,
                        const TorusLattice& lattice)
{
    return PatternScanner(pattern, lattice).count_upper(state);
}

}  // namespace ising
