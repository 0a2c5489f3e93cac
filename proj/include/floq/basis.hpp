#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "floq/types.hpp"

namespace floq {

using OccupationState = std::vector<int>;

// Number of basis states: binomial(M+L-1, M) for bosons, binomial(L, M) for
// hardcore bosons.  Throws config_error for invalid sectors or dimensions
// beyond the dense-algebra guard (2^16).
std::int64_t dim(const Sector& sector);

// Ordered occupation basis, descending lexicographic over occupation tuples,
// so (M, 0, ..., 0) comes first.
std::vector<OccupationState> enumerate_basis(const Sector& sector);

// Position of `state` in enumerate_basis(sector); throws config_error if the
// state does not belong to the sector.
int index_of(const Sector& sector, const OccupationState& state);

// Cached basis with O(1) state lookup, for operator builders.
class Basis {
  public:
    explicit Basis(const Sector& sector);

    const Sector& sector() const { return sector_; }
    int size() const { return static_cast<int>(states_.size()); }
    const std::vector<OccupationState>& states() const { return states_; }
    const OccupationState& state(int i) const { return states_[i]; }
    int index_of(const OccupationState& state) const;

  private:
    Sector sector_;
    std::vector<OccupationState> states_;
    std::unordered_map<std::string, int> index_;  // packed-occupation key
};

}  // namespace floq
