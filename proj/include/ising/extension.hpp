#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ising {

/// f(S) = sum_{i in S} unary[i] + sum over pairs {i, j} inside S of weight.
/// Every pair weight is nonnegative, so f is supermodular.
struct PairwiseObjective {
    struct Pair {
        std::size_t i = 0;
        std::size_t j = 0;
        double weight = 0.0;
    };

    std::vector<double> unary;
    std::vector<Pair> pairs;

    std::size_t size() const { return unary.size(); }
    /// f on the set whose members are flagged in `in_set`.
    double evaluate(const std::vector<char>& in_set) const;
};

/// max f(S) over nonempty S by enumeration; at most 24 elements.
double maximize_nonempty_exhaustive(const PairwiseObjective& f);

/// max f(S) over nonempty S through one minimum cut per forced element.
double maximize_nonempty_by_cut(const PairwiseObjective& f);

}  // namespace ising
