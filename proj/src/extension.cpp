#include "ising/extension.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "ising/errors.hpp"

namespace ising {

namespace {

// Dinic on a small dense-ish graph with real capacities.
class FlowNetwork {
public:
    explicit FlowNetwork(std::size_t nodes) : adj_(nodes), level_(nodes), next_(nodes) {}

    void add_edge(std::size_t from, std::size_t to, double cap)
    {
        if (cap <= 0.0) {
            return;
        }
        adj_[from].push_back(edges_.size());
        edges_.push_back({to, cap});
        adj_[to].push_back(edges_.size());
        edges_.push_back({from, 0.0});
    }

    void max_flow(std::size_t s, std::size_t t, double eps)
    {
        eps_ = eps;
        while (bfs(s, t)) {
            std::fill(next_.begin(), next_.end(), 0);
            while (push(s, t, std::numeric_limits<double>::infinity()) > eps_) {
            }
        }
    }

    /// Nodes reachable from s in the residual graph after max_flow.
    std::vector<char> source_side(std::size_t s) const
    {
        std::vector<char> seen(adj_.size(), 0);
        std::vector<std::size_t> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            auto u = stack.back();
            stack.pop_back();
            for (auto e : adj_[u]) {
                if (edges_[e].cap > eps_ && !seen[edges_[e].to]) {
                    seen[edges_[e].to] = 1;
                    stack.push_back(edges_[e].to);
                }
            }
        }
        return seen;
    }

private:
    struct Edge {
        std::size_t to;
        double cap;
    };

    bool bfs(std::size_t s, std::size_t t)
    {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<std::size_t> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            auto u = q.front();
            q.pop();
            for (auto e : adj_[u]) {
                if (edges_[e].cap > eps_ && level_[edges_[e].to] < 0) {
                    level_[edges_[e].to] = level_[u] + 1;
                    q.push(edges_[e].to);
                }
            }
        }
        return level_[t] >= 0;
    }

    double push(std::size_t u, std::size_t t, double limit)
    {
        if (u == t) {
            return limit;
        }
        for (auto& i = next_[u]; i < adj_[u].size(); ++i) {
            auto e = adj_[u][i];
            auto v = edges_[e].to;
            if (edges_[e].cap > eps_ && level_[v] == level_[u] + 1) {
                double got = push(v, t, std::min(limit, edges_[e].cap));
                if (got > eps_) {
                    edges_[e].cap -= got;
                    edges_[e ^ 1].cap += got;
                    return got;
                }
            }
        }
        return 0.0;
    }

    std::vector<std::vector<std::size_t>> adj_;
    std::vector<Edge> edges_;
    std::vector<int> level_;
    std::vector<std::size_t> next_;
    double eps_ = 0.0;
};

}  // namespace

double PairwiseObjective::evaluate(const std::vector<char>& in_set) const
{
    double v = 0.0;
    for (std::size_t i = 0; i < unary.size(); ++i) {
        if (in_set[i]) {
            v += unary[i];
        }
    }
    for (const auto& p : pairs) {
        if (in_set[p.i] && in_set[p.j]) {
            v += p.weight;
        }
    }
    return v;
}

double maximize_nonempty_exhaustive(const PairwiseObjective& f)
{
    const std::size_t m = f.size();
    if (m == 0) {
        throw std::invalid_argument("maximum over nonempty subsets of an empty ground set");
    }
    require_enumerable(m, "subset enumeration");
    std::vector<std::uint32_t> links(m, 0);
    std::vector<std::vector<double>> w(m, std::vector<double>(m, 0.0));
    for (const auto& p : f.pairs) {
        links[p.i] |= std::uint32_t{1} << p.j;
        w[p.i][p.j] += p.weight;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint32_t s = 1; s < (std::uint32_t{1} << m); ++s) {
        double v = 0.0;
        for (std::uint32_t rest = s; rest != 0; rest &= rest - 1) {
            auto i = static_cast<std::size_t>(std::countr_zero(rest));
            v += f.unary[i];
            for (std::uint32_t r2 = links[i] & s; r2 != 0; r2 &= r2 - 1) {
                v += w[i][static_cast<std::size_t>(std::countr_zero(r2))];
            }
        }
        best = std::max(best, v);
    }
    return best;
}

double maximize_nonempty_by_cut(const PairwiseObjective& f)
{
    // Minimize -f: -w x_i x_j = -w x_i + w x_i (1 - x_j); source side means i in S.
    const std::size_t m = f.size();
    if (m == 0) {
        throw std::invalid_argument("maximum over nonempty subsets of an empty ground set");
    }
    std::vector<double> cost(m);
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        cost[i] = -f.unary[i];
        scale += std::abs(f.unary[i]);
    }
    for (const auto& p : f.pairs) {
        if (!(p.weight >= 0.0) || p.i == p.j || p.i >= m || p.j >= m) {
            throw std::invalid_argument("pair weights must be nonnegative and join distinct elements");
        }
        cost[p.i] -= p.weight;
        scale += 2.0 * p.weight;
    }
    const std::size_t s = m;
    const std::size_t t = m + 1;
    const double eps = 1e-13 * scale;

    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t forced = 0; forced < m; ++forced) {
        FlowNetwork net(m + 2);
        for (std::size_t i = 0; i < m; ++i) {
            if (cost[i] > 0.0) {
                net.add_edge(i, t, cost[i]);
            } else {
                net.add_edge(s, i, -cost[i]);
            }
        }
        for (const auto& p : f.pairs) {
            net.add_edge(p.i, p.j, p.weight);
        }
        net.add_edge(s, forced, 2.0 * scale);
        net.max_flow(s, t, eps);
        auto side = net.source_side(s);
        side.resize(m);
        best = std::max(best, f.evaluate(side));
    }
    return best;
}

}  // namespace ising
