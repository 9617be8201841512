#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qds/pauli.hpp"

namespace qds {

// Bit-packed vector over GF(2).
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(std::size_t bits) : bits_(bits), w_((bits + 63) / 64, 0) {}

    std::size_t size() const { return bits_; }
    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v) {
        std::uint64_t m = std::uint64_t(1) << (i & 63);
        if (v)
            w_[i >> 6] |= m;
        else
            w_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

    void xor_in(const BitVec& o);
    std::size_t count() const;
    bool none() const;
    // Parity of the AND with another vector (GF(2) inner product).
    int dot(const BitVec& o) const;

    bool operator==(const BitVec&) const = default;

  private:
    std::size_t bits_ = 0;
    std::vector<std::uint64_t> w_;
};

// Dense binary matrix as a list of bit-packed rows.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : cols_(cols), rows_(rows, BitVec(cols)) {}

    std::size_t num_rows() const { return rows_.size(); }
    std::size_t num_cols() const { return cols_; }
    BitVec& row(std::size_t i) { return rows_[i]; }
    const BitVec& row(std::size_t i) const { return rows_[i]; }
    bool get(std::size_t i, std::size_t j) const { return rows_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool v) { rows_[i].set(j, v); }

    static BitMatrix identity(std::size_t n);
    // y = M x over GF(2); x.size() == num_cols().
    BitVec apply(const BitVec& x) const;

    bool operator==(const BitMatrix&) const = default;

  private:
    std::size_t cols_ = 0;
    std::vector<BitVec> rows_;
};

std::size_t gf2_rank(BitMatrix m);

// Incremental row-echelon basis of a GF(2) row space; supports membership
// queries without re-eliminating.
class Gf2RowSpace {
  public:
    Gf2RowSpace() = default;
    explicit Gf2RowSpace(std::size_t width) : width_(width) {}

    void insert(BitVec v);
    bool contains(BitVec v) const;
    std::size_t rank() const { return basis_.size(); }
    std::size_t width() const { return width_; }

  private:
    std::size_t width_ = 0;
    std::vector<BitVec> basis_;        // each with a unique leading bit
    std::vector<std::size_t> pivots_;  // leading bit positions, parallel to basis_
};

// (x|z) binary image of a Pauli word: columns [0,n) hold x bits, [n,2n) z bits.
BitVec symplectic_row(const PauliVector& v);
PauliVector pauli_from_symplectic(const BitVec& row);

// Rank of the (x|z) image of a set of Pauli words over GF(2).
std::size_t symplectic_rank(const std::vector<PauliVector>& rows);

// Row space of the (x|z) image, for membership tests against a stabilizer
// group (phase-free).
Gf2RowSpace symplectic_row_space(const std::vector<PauliVector>& rows);
bool in_row_space(const Gf2RowSpace& space, const PauliVector& v);

}  // namespace qds
