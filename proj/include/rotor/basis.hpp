#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

namespace rotor {

/// A single spherical-harmonic basis label |j,m>.
struct BasisIndex {
    int j = 0;
    int m = 0;
};

/// Truncated |j,m> basis with j <= j_max.
///
/// Two flavours exist: the full basis of size (j_max+1)^2 and, for
/// z-polarized problems that conserve m, the subspace at a fixed m of size
/// j_max+1-|m|.  Ordering groups states by m (ascending from -j_max), with j
/// ascending within each m block, so the m = 0 block is contiguous.
class Basis {
public:
    explicit Basis(int j_max, std::optional<int> fixed_m = std::nullopt);

    int jMax() const { return j_max_; }
    std::optional<int> fixedM() const { return fixed_m_; }
    int size() const { return static_cast<int>(states_.size()); }

    const BasisIndex& state(int i) const { return states_[i]; }
    const std::vector<BasisIndex>& states() const { return states_; }

    bool contains(int j, int m) const;
    /// Linear index of |j,m>; throws if the state is not in the basis.
    int index(int j, int m) const;

    /// First linear index of the m block and its length (full basis only).
    int blockBegin(int m) const;
    int blockSize(int m) const;

private:
    int j_max_;
    std::optional<int> fixed_m_;
    std::vector<BasisIndex> states_;
    std::vector<int> block_begin_; // indexed by m + j_max (full basis)
};

} // namespace rotor
