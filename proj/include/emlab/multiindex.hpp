#pragma once

// Multi-index bookkeeping shared by the parablender systems and the jet
// machinery. E(d,k) = { i in {0..d}^k : |i| <= d } in lexicographic order,
// with the zero index first. Branch symbols are sign patterns over E.

#include <cstdint>
#include <string>
#include <vector>

#include "emlab/common.hpp"

namespace emlab {

using MultiIndex = std::vector<int>;

class MultiIndexSet {
  public:
    MultiIndexSet(int d, int k);

    int d() const { return d_; }
    int k() const { return k_; }
    int size() const { return int(indices_.size()); }
    const MultiIndex& at(int t) const { return indices_[t]; }
    const std::vector<MultiIndex>& indices() const { return indices_; }

    // position of i in the set, -1 if |i| > d
    int position(const MultiIndex& i) const;

    // a^i with the 0^0 = 1 convention
    double monomial(const std::vector<double>& a, int t) const;

    std::string index_name(int t) const;

  private:
    int d_, k_;
    std::vector<MultiIndex> indices_;
};

// Sign pattern delta : E -> {-1,+1}. Branch ordinal encodes the pattern as
// bits in E order (bit t set <=> delta(i_t) = +1), so ordinal 2^|E|-1 is the
// all-plus branch and enumeration order is stable everywhere.
struct BranchSymbol {
    std::vector<std::int8_t> signs;  // aligned with MultiIndexSet order

    int size() const { return int(signs.size()); }
    int sign(int t) const { return signs[t]; }

    static BranchSymbol from_ordinal(std::uint64_t ordinal, int count);
    std::uint64_t ordinal() const;
    std::string to_string() const;  // e.g. "+--+"
};

// number of branches 2^|E|; guard: |E| <= 12 so CardDelta <= 4096
std::uint64_t card_delta(const MultiIndexSet& E);

}  // namespace emlab
