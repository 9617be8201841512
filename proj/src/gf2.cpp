#include "qds/gf2.hpp"

#include <bit>
#include <stdexcept>

namespace qds {

void BitVec::xor_in(const BitVec& o) {
    if (o.bits_ != bits_) throw std::invalid_argument("BitVec::xor_in: width mismatch");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
}

std::size_t BitVec::count() const {
    std::size_t c = 0;
    for (std::uint64_t w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

bool BitVec::none() const {
    for (std::uint64_t w : w_)
        if (w) return false;
    return true;
}

int BitVec::dot(const BitVec& o) const {
    if (o.bits_ != bits_) throw std::invalid_argument("BitVec::dot: width mismatch");
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) acc ^= (w_[i] & o.w_[i]);
    return std::popcount(acc) & 1;
}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitVec BitMatrix::apply(const BitVec& x) const {
    if (x.size() != cols_) throw std::invalid_argument("BitMatrix::apply: width mismatch");
    BitVec y(num_rows());
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (rows_[i].dot(x)) y.set(i, true);
    return y;
}

std::size_t gf2_rank(BitMatrix m) {
    Gf2RowSpace space(m.num_cols());
    for (std::size_t i = 0; i < m.num_rows(); ++i) space.insert(m.row(i));
    return space.rank();
}

void Gf2RowSpace::insert(BitVec v) {
    if (v.size() != width_) throw std::invalid_argument("Gf2RowSpace::insert: width mismatch");
    for (std::size_t b = 0; b < basis_.size(); ++b)
        if (v.get(pivots_[b])) v.xor_in(basis_[b]);
    for (std::size_t j = 0; j < width_; ++j) {
        if (!v.get(j)) continue;
        // Keep stored basis rows reduced above the new pivot as well.
        for (std::size_t b = 0; b < basis_.size(); ++b)
            if (basis_[b].get(j)) basis_[b].xor_in(v);
        basis_.push_back(std::move(v));
        pivots_.push_back(j);
        return;
    }
}

bool Gf2RowSpace::contains(BitVec v) const {
    if (v.size() != width_) throw std::invalid_argument("Gf2RowSpace::contains: width mismatch");
    for (std::size_t b = 0; b < basis_.size(); ++b)
        if (v.get(pivots_[b])) v.xor_in(basis_[b]);
    return v.none();
}

BitVec symplectic_row(const PauliVector& v) {
    const std::size_t n = v.size();
    BitVec row(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (x_bit(v[i])) row.set(i, true);
        if (z_bit(v[i])) row.set(n + i, true);
    }
    return row;
}

PauliVector pauli_from_symplectic(const BitVec& row) {
    if (row.size() % 2 != 0) throw std::invalid_argument("pauli_from_symplectic: odd width");
    const std::size_t n = row.size() / 2;
    PauliVector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint8_t code = static_cast<std::uint8_t>(row.get(i) ? 1 : 0) |
                            static_cast<std::uint8_t>(row.get(n + i) ? 2 : 0);
        v[i] = static_cast<Pauli>(code);
    }
    return v;
}

std::size_t symplectic_rank(const std::vector<PauliVector>& rows) {
    if (rows.empty()) return 0;
    Gf2RowSpace space(2 * rows.front().size());
    for (const auto& r : rows) space.insert(symplectic_row(r));
    return space.rank();
}

Gf2RowSpace symplectic_row_space(const std::vector<PauliVector>& rows) {
    if (rows.empty()) return Gf2RowSpace(0);
    Gf2RowSpace space(2 * rows.front().size());
    for (const auto& r : rows) space.insert(symplectic_row(r));
    return space;
}

bool in_row_space(const Gf2RowSpace& space, const PauliVector& v) {
    return space.contains(symplectic_row(v));
}

}  // namespace qds
