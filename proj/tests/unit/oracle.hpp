#pragma once

// Coordinate-level reference implementations. Nothing here calls into the
// library beyond the row-major vertex numbering.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <set>
#include <vector>

namespace oracle {

struct Torus {
    int n;
    int d;
    int p;  // 0 means infinity
    int rho;

    int volume() const
    {
        int v = 1;
        for (int i = 0; i < d; ++i) {
            v *= n;
        }
        return v;
    }

    std::vector<int> coords(int x) const
    {
        std::vector<int> c(static_cast<std::size_t>(d));
        for (int i = d - 1; i >= 0; --i) {
            c[static_cast<std::size_t>(i)] = x % n;
            x /= n;
        }
        return c;
    }

    int index(const std::vector<int>& c) const
    {
        int x = 0;
        for (int v : c) {
            x = x * n + ((v % n) + n) % n;
        }
        return x;
    }

    bool adjacent(int x, int y) const
    {
        if (x == y) {
            return false;
        }
        auto cx = coords(x);
        auto cy = coords(y);
        double acc = 0.0;
        int worst = 0;
        for (int i = 0; i < d; ++i) {
            int diff = std::abs(cx[static_cast<std::size_t>(i)] - cy[static_cast<std::size_t>(i)]);
            diff = std::min(diff, n - diff);
            worst = std::max(worst, diff);
            acc += p == 0 ? 0.0 : std::pow(diff, p);
        }
        if (p == 0) {
            return worst <= rho;
        }
        return acc <= std::pow(rho, p) + 1e-9;
    }

    int degree() const
    {
        int count = 0;
        for (int y = 0; y < volume(); ++y) {
            count += adjacent(0, y);
        }
        return count;
    }

    /// Edges from `plus` to its complement.
    long perimeter(const std::set<int>& plus) const
    {
        long g = 0;
        for (int u : plus) {
            for (int w = 0; w < volume(); ++w) {
                g += adjacent(u, w) && !plus.count(w);
            }
        }
        return g;
    }

    /// Sum over edges of the spin product, bit i of `bits` being vertex i.
    long edge_sum(std::uint64_t bits) const
    {
        long s = 0;
        for (int u = 0; u < volume(); ++u) {
            for (int w = u + 1; w < volume(); ++w) {
                if (adjacent(u, w)) {
                    int su = (bits >> u) & 1U ? 1 : -1;
                    int sw = (bits >> w) & 1U ? 1 : -1;
                    s += su * sw;
                }
            }
        }
        return s;
    }

    /// Vertices reachable from x in at most r steps.
    std::set<int> ball(int x, int r) const
    {
        std::set<int> out{x};
        std::set<int> frontier{x};
        for (int step = 0; step < r; ++step) {
            std::set<int> next;
            for (int u : frontier) {
                for (int w = 0; w < volume(); ++w) {
                    if (adjacent(u, w) && !out.count(w)) {
                        next.insert(w);
                    }
                }
            }
            out.insert(next.begin(), next.end());
            frontier = next;
        }
        return out;
    }
};

}  // namespace oracle
