#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qds {

// Phase-free Pauli symbol in (x,z)-bit encoding: I=(0,0), X=(1,0), Z=(0,1),
// Y=(1,1). Multiplication is XOR of the bit pairs, so phases never appear.
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

constexpr std::uint8_t x_bit(Pauli p) { return static_cast<std::uint8_t>(p) & 1u; }
constexpr std::uint8_t z_bit(Pauli p) { return static_cast<std::uint8_t>(static_cast<std::uint8_t>(p) >> 1) & 1u; }

constexpr Pauli pauli_mul(Pauli a, Pauli b) {
    return static_cast<Pauli>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}

// 1 iff a and b anticommute.
constexpr int pauli_anticommute(Pauli a, Pauli b) {
    return static_cast<int>((x_bit(a) & z_bit(b)) ^ (z_bit(a) & x_bit(b)));
}

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);  // throws std::invalid_argument on anything else

// Fixed-length word over {I,X,Y,Z} with componentwise (phase-free) product.
class PauliVector {
  public:
    PauliVector() = default;
    explicit PauliVector(std::size_t n) : sym_(n, Pauli::I) {}
    explicit PauliVector(std::vector<Pauli> sym) : sym_(std::move(sym)) {}

    static PauliVector from_string(std::string_view s);

    std::size_t size() const { return sym_.size(); }
    Pauli operator[](std::size_t i) const { return sym_[i]; }
    Pauli& operator[](std::size_t i) { return sym_[i]; }
    const std::vector<Pauli>& symbols() const { return sym_; }

    std::size_t weight() const;  // number of non-identity entries
    bool is_identity() const { return weight() == 0; }
    std::string str() const;

    bool operator==(const PauliVector&) const = default;

  private:
    std::vector<Pauli> sym_;
};

// Componentwise product; lengths must match.
PauliVector pauli_product(const PauliVector& a, const PauliVector& b);

// Symplectic bilinear form <a,b> = sum_i (x_a z_b + z_a x_b) mod 2.
// Returns 1 iff a and b anticommute as operators.
int bilinear_form(const PauliVector& a, const PauliVector& b);

// Pair of a quaternary word and a binary word, e.g. (error, flip) vectors.
struct MixedVector {
    PauliVector pauli;
    std::vector<std::uint8_t> bits;

    std::size_t quaternary_size() const { return pauli.size(); }
    std::size_t binary_size() const { return bits.size(); }
    std::size_t weight() const;

    bool operator==(const MixedVector&) const = default;
};

// <(E,e),(F,f)> = <E,F> + e.f mod 2.
int mixed_bilinear_form(const MixedVector& a, const MixedVector& b);

}  // namespace qds
