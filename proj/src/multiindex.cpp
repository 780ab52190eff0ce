#include "emlab/multiindex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace emlab {

static void gen_indices(int d, int k, int pos, int remaining, MultiIndex& cur,
                        std::vector<MultiIndex>& out) {
    if (pos == k) {
        out.push_back(cur);
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        cur[pos] = v;
        gen_indices(d, k, pos + 1, remaining - v, cur, out);
    }
}

MultiIndexSet::MultiIndexSet(int d, int k) : d_(d), k_(k) {
    if (d < 0 || k < 1) throw UsageError("MultiIndexSet: need d >= 0 and k >= 1");
    MultiIndex cur(k, 0);
    gen_indices(d, k, 0, d, cur, indices_);
    std::sort(indices_.begin(), indices_.end());
}

int MultiIndexSet::position(const MultiIndex& i) const {
    auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
    if (it == indices_.end() || *it != i) return -1;
    return int(it - indices_.begin());
}

double MultiIndexSet::monomial(const std::vector<double>& a, int t) const {
    const MultiIndex& i = indices_[t];
    double prod = 1.0;
    for (int j = 0; j < k_; ++j) {
        for (int e = 0; e < i[j]; ++e) prod *= a[j];  // 0^0 = 1 by skipping
    }
    return prod;
}

std::string MultiIndexSet::index_name(int t) const {
    const MultiIndex& i = indices_[t];
    std::string s = "(";
    for (int j = 0; j < k_; ++j) {
        if (j) s += ",";
        s += std::to_string(i[j]);
    }
    return s + ")";
}

BranchSymbol BranchSymbol::from_ordinal(std::uint64_t ordinal, int count) {
    BranchSymbol b;
    b.signs.resize(count);
    for (int t = 0; t < count; ++t) b.signs[t] = (ordinal >> t) & 1 ? +1 : -1;
    return b;
}

std::uint64_t BranchSymbol::ordinal() const {
    std::uint64_t o = 0;
    for (int t = 0; t < size(); ++t)
        if (signs[t] > 0) o |= (std::uint64_t(1) << t);
    return o;
}

std::string BranchSymbol::to_string() const {
    std::string s;
    for (int t = 0; t < size(); ++t) s += signs[t] > 0 ? '+' : '-';
    return s;
}

std::uint64_t card_delta(const MultiIndexSet& E) {
    return std::uint64_t(1) << E.size();
}

}  // namespace emlab
