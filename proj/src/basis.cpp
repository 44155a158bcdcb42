#include "rotor/basis.hpp"

#include <cstdlib>

namespace rotor {

Basis::Basis(int j_max, std::optional<int> fixed_m)
    : j_max_(j_max), fixed_m_(fixed_m) {
    if (j_max < 0)
        throw std::invalid_argument("Basis: j_max must be non-negative");
    if (fixed_m_) {
        const int m = *fixed_m_;
        if (std::abs(m) > j_max)
            throw std::invalid_argument("Basis: |fixed_m| exceeds j_max");
        for (int j = std::abs(m); j <= j_max; ++j) states_.push_back({j, m});
    } else {
        block_begin_.resize(2 * j_max + 2, 0);
        for (int m = -j_max; m <= j_max; ++m) {
            block_begin_[m + j_max] = static_cast<int>(states_.size());
            for (int j = std::abs(m); j <= j_max; ++j) states_.push_back({j, m});
        }
        block_begin_[2 * j_max + 1] = static_cast<int>(states_.size());
    }
}

bool Basis::contains(int j, int m) const {
    if (j < 0 || j > j_max_ || std::abs(m) > j) return false;
    return !fixed_m_ || m == *fixed_m_;
}

int Basis::index(int j, int m) const {
    if (!contains(j, m))
        throw std::out_of_range("Basis::index: state |j,m> not in basis");
    if (fixed_m_) return j - std::abs(*fixed_m_);
    return block_begin_[m + j_max_] + (j - std::abs(m));
}

int Basis::blockBegin(int m) const {
    if (fixed_m_ || std::abs(m) > j_max_)
        throw std::out_of_range("Basis::blockBegin: invalid m block");
    return block_begin_[m + j_max_];
}

int Basis::blockSize(int m) const {
    if (fixed_m_ || std::abs(m) > j_max_)
        throw std::out_of_range("Basis::blockSize: invalid m block");
    return j_max_ + 1 - std::abs(m);
}

} // namespace rotor
