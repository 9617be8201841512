#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "qds/gf2.hpp"
#include "qds/pauli.hpp"
#include "qds/rng.hpp"

using namespace qds;

namespace {

// Plain dense elimination over int matrices, independent of the bit-packed
// implementation under test.
std::size_t dense_rank(std::vector<std::vector<int>> m) {
    std::size_t rank = 0;
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t piv = row;
        while (piv < rows && m[piv][col] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[row]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r != row && m[r][col]) {
                for (std::size_t c = 0; c < cols; ++c) m[r][c] ^= m[row][c];
            }
        }
        ++row;
        ++rank;
    }
    return rank;
}

std::vector<std::vector<int>> to_dense(const std::vector<PauliVector>& rows) {
    std::vector<std::vector<int>> out;
    for (const auto& r : rows) {
        std::vector<int> v(2 * r.size(), 0);
        for (std::size_t i = 0; i < r.size(); ++i) {
            v[i] = x_bit(r[i]);
            v[r.size() + i] = z_bit(r[i]);
        }
        out.push_back(std::move(v));
    }
    return out;
}

PauliVector random_pauli_vector(std::size_t n, Rng& rng) {
    PauliVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Pauli>(rng.next_below(4));
    return v;
}

}  // namespace

TEST_CASE("symbol products and characters") {
    CHECK(pauli_mul(Pauli::X, Pauli::Y) == Pauli::Z);
    CHECK(pauli_mul(Pauli::X, Pauli::X) == Pauli::I);
    CHECK(pauli_mul(Pauli::I, Pauli::Z) == Pauli::Z);
    for (char c : {'I', 'X', 'Y', 'Z'}) CHECK(pauli_char(pauli_from_char(c)) == c);
    CHECK_THROWS_AS(pauli_from_char('Q'), std::invalid_argument);
    CHECK_THROWS_AS(pauli_from_char('x'), std::invalid_argument);
}

TEST_CASE("vector product") {
    auto a = PauliVector::from_string("XYI");
    auto b = PauliVector::from_string("YYZ");
    CHECK(pauli_product(a, b).str() == "ZIZ");
    CHECK(pauli_product(a, a).is_identity());
    CHECK(pauli_product(PauliVector::from_string("X"), PauliVector::from_string("I")).str() == "X");
    CHECK_THROWS_AS(pauli_product(a, PauliVector::from_string("XY")), std::invalid_argument);
    CHECK(a.weight() == 2);
    CHECK(PauliVector(4).weight() == 0);
}

TEST_CASE("bilinear form") {
    CHECK(bilinear_form(PauliVector::from_string("X"), PauliVector::from_string("Z")) == 1);
    CHECK(bilinear_form(PauliVector::from_string("X"), PauliVector::from_string("Y")) == 1);
    CHECK(bilinear_form(PauliVector::from_string("X"), PauliVector::from_string("X")) == 0);
    CHECK(bilinear_form(PauliVector::from_string("XY"), PauliVector::from_string("ZY")) == 1);
    CHECK(bilinear_form(PauliVector::from_string("XX"), PauliVector::from_string("ZZ")) == 0);

    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng.next_below(8);
        auto a = random_pauli_vector(n, rng);
        auto b = random_pauli_vector(n, rng);
        auto c = random_pauli_vector(n, rng);
        CHECK(bilinear_form(a, a) == 0);
        CHECK(bilinear_form(a, b) == bilinear_form(b, a));
        int lhs = bilinear_form(pauli_product(a, b), c);
        int rhs = bilinear_form(a, c) ^ bilinear_form(b, c);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("mixed bilinear form") {
    MixedVector a{PauliVector::from_string("X"), {1}};
    MixedVector b{PauliVector::from_string("Z"), {1}};
    CHECK(mixed_bilinear_form(a, b) == 0);

    MixedVector c{PauliVector::from_string("XY"), {1, 0}};
    MixedVector d{PauliVector::from_string("YY"), {1, 1}};
    CHECK(mixed_bilinear_form(c, d) == 0);

    MixedVector zero{PauliVector(2), {0, 0}};
    CHECK(mixed_bilinear_form(zero, d) == 0);
    CHECK(c.weight() == 3);
}

TEST_CASE("bit vectors") {
    BitVec v(70);
    v.set(0, true);
    v.set(69, true);
    CHECK(v.count() == 2);
    CHECK(v.get(69));
    v.flip(69);
    CHECK_FALSE(v.get(69));
    BitVec w(70);
    w.set(0, true);
    CHECK(v.dot(w) == 1);
    v.xor_in(w);
    CHECK(v.none());
    CHECK_THROWS_AS(v.dot(BitVec(3)), std::invalid_argument);
}

TEST_CASE("bit matrix apply") {
    BitMatrix m(2, 3);
    m.set(0, 0, true);
    m.set(0, 2, true);
    m.set(1, 1, true);
    BitVec x(3);
    x.set(2, true);
    auto y = m.apply(x);
    CHECK(y.get(0));
    CHECK_FALSE(y.get(1));
    CHECK(BitMatrix::identity(4).apply(BitVec(4)).none());
}

TEST_CASE("symplectic rank matches dense elimination") {
    CHECK(symplectic_rank({}) == 0);
    CHECK(symplectic_rank({PauliVector(3)}) == 0);
    CHECK(symplectic_rank({PauliVector::from_string("X")}) == 1);
    CHECK(symplectic_rank({PauliVector::from_string("XX"), PauliVector::from_string("XX")}) == 1);

    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng.next_below(6);
        std::size_t m = 1 + rng.next_below(10);
        std::vector<PauliVector> rows;
        for (std::size_t i = 0; i < m; ++i) rows.push_back(random_pauli_vector(n, rng));
        CHECK(symplectic_rank(rows) == dense_rank(to_dense(rows)));
    }
}

TEST_CASE("rank is invariant under row operations") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 2 + rng.next_below(5);
        std::size_t m = 2 + rng.next_below(6);
        std::vector<PauliVector> rows;
        for (std::size_t i = 0; i < m; ++i) rows.push_back(random_pauli_vector(n, rng));
        auto mutated = rows;
        for (int k = 0; k < 10; ++k) {
            std::size_t i = rng.next_below(m), j = rng.next_below(m);
            if (i == j) continue;
            mutated[i] = pauli_product(mutated[i], mutated[j]);
        }
        CHECK(symplectic_rank(mutated) == symplectic_rank(rows));
    }
}

TEST_CASE("row space membership") {
    std::vector<PauliVector> rows = {PauliVector::from_string("XXI"),
                                     PauliVector::from_string("IZZ")};
    auto space = symplectic_row_space(rows);
    CHECK(space.rank() == 2);
    CHECK(in_row_space(space, rows[0]));
    CHECK(in_row_space(space, rows[1]));
    CHECK(in_row_space(space, pauli_product(rows[0], rows[1])));
    CHECK(in_row_space(space, PauliVector(3)));
    CHECK_FALSE(in_row_space(space, PauliVector::from_string("XII")));
    CHECK_FALSE(in_row_space(space, PauliVector::from_string("YXI")));

    // Exhaustive cross-check on a small group: membership iff the vector is
    // one of the 2^rank products.
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 1 + rng.next_below(3);
        std::vector<PauliVector> gens;
        for (std::size_t i = 0; i < 3; ++i) gens.push_back(random_pauli_vector(n, rng));
        auto sp = symplectic_row_space(gens);
        std::vector<std::string> members;
        for (int massk = 0; massk < 8; ++massk) {
            PauliVector v(n);
            for (int g = 0; g < 3; ++g)
                if (massk >> g & 1) v = pauli_product(v, gens[g]);
            members.push_back(v.str());
        }
        // Enumerate every length-n word and compare membership.
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) total *= 4;
        for (std::size_t code = 0; code < total; ++code) {
            PauliVector v(n);
            std::size_t c = code;
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = static_cast<Pauli>(c % 4);
                c /= 4;
            }
            bool expect = false;
            for (const auto& s : members) expect |= (s == v.str());
            CHECK(in_row_space(sp, v) == expect);
        }
    }
}
