#include "qds/pauli.hpp"

#include <stdexcept>

namespace qds {

char pauli_char(Pauli p) {
    switch (p) {
        case Pauli::I: return 'I';
        case Pauli::X: return 'X';
        case Pauli::Z: return 'Z';
        case Pauli::Y: return 'Y';
    }
    throw std::logic_error("bad Pauli value");
}

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Z': return Pauli::Z;
        case 'Y': return Pauli::Y;
        default: throw std::invalid_argument(std::string("not a Pauli symbol: '") + c + "'");
    }
}

PauliVector PauliVector::from_string(std::string_view s) {
    std::vector<Pauli> sym;
    sym.reserve(s.size());
    for (char c : s) sym.push_back(pauli_from_char(c));
    return PauliVector(std::move(sym));
}

std::size_t PauliVector::weight() const {
    std::size_t w = 0;
    for (Pauli p : sym_)
        if (p != Pauli::I) ++w;
    return w;
}

std::string PauliVector::str() const {
    std::string s;
    s.reserve(sym_.size());
    for (Pauli p : sym_) s.push_back(pauli_char(p));
    return s;
}

PauliVector pauli_product(const PauliVector& a, const PauliVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("pauli_product: length mismatch");
    PauliVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = pauli_mul(a[i], b[i]);
    return out;
}

int bilinear_form(const PauliVector& a, const PauliVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("bilinear_form: length mismatch");
    int acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc ^= pauli_anticommute(a[i], b[i]);
    return acc;
}

std::size_t MixedVector::weight() const {
    std::size_t w = pauli.weight();
    for (auto b : bits) w += (b & 1u);
    return w;
}

int mixed_bilinear_form(const MixedVector& a, const MixedVector& b) {
    if (a.bits.size() != b.bits.size())
        throw std::invalid_argument("mixed_bilinear_form: binary length mismatch");
    int acc = bilinear_form(a.pauli, b.pauli);
    for (std::size_t i = 0; i < a.bits.size(); ++i) acc ^= (a.bits[i] & b.bits[i] & 1u);
    return acc;
}

}  // namespace qds
