#include "floq/basis.hpp"

#include <algorithm>
#include <numeric>

namespace floq {

namespace {

std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

constexpr std::int64_t kDimGuard = 1 << 16;

void validate(const Sector& s) {
    if (s.L < 1) throw config_error("sector: L must be >= 1");
    if (s.M < 0) throw config_error("sector: M must be >= 0");
    if (s.stats == Statistics::Hardcore && s.M > s.L)
        throw config_error("sector: hardcore requires M <= L (empty sector)");
}

std::string pack(const OccupationState& occ) {
    std::string key(occ.size(), '\0');
    for (size_t i = 0; i < occ.size(); ++i) key[i] = static_cast<char>(occ[i]);
    return key;
}

}  // namespace

std::int64_t dim(const Sector& sector) {
    validate(sector);
    const std::int64_t d = sector.stats == Statistics::Bosonic
                               ? binomial(sector.M + sector.L - 1, sector.M)
                               : binomial(sector.L, sector.M);
    if (d > kDimGuard)
        throw config_error("sector: dimension " + std::to_string(d) +
                           " exceeds the dense-algebra guard of 65536");
    return d;
}

std::vector<OccupationState> enumerate_basis(const Sector& sector) {
    const std::int64_t d = dim(sector);
    std::vector<OccupationState> states;
    states.reserve(static_cast<size_t>(d));
    OccupationState occ(sector.L, 0);
    // Descending lexicographic order falls out of filling sites left to right
    // with the largest admissible occupation first.
    auto rec = [&](auto&& self, int site, int remaining) -> void {
        if (site == sector.L) {
            if (remaining == 0) states.push_back(occ);
            return;
        }
        const int cap = sector.stats == Statistics::Hardcore
                            ? std::min(remaining, 1)
                            : remaining;
        for (int n = cap; n >= 0; --n) {
            occ[site] = n;
            self(self, site + 1, remaining - n);
        }
        occ[site] = 0;
    };
    rec(rec, 0, sector.M);
    return states;
}

Basis::Basis(const Sector& sector) : sector_(sector), states_(enumerate_basis(sector)) {
    index_.reserve(states_.size());
    for (size_t i = 0; i < states_.size(); ++i)
        index_.emplace(pack(states_[i]), static_cast<int>(i));
}

int Basis::index_of(const OccupationState& state) const {
    const auto it = index_.find(pack(state));
    if (it == index_.end())
        throw config_error("index_of: state does not belong to the sector");
    return it->second;
}

int index_of(const Sector& sector, const OccupationState& state) {
    if (static_cast<int>(state.size()) != sector.L)
        throw config_error("index_of: state length does not match sector L");
    if (std::accumulate(state.begin(), state.end(), 0) != sector.M)
        throw config_error("index_of: state does not belong to the sector");
    return Basis(sector).index_of(state);
}

}  // namespace floq
