#include "qds/codes.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qds/rng.hpp"

namespace qds {

StabilizerCode make_stabilizer_code(QuaternaryCheckMatrix h,
                                    std::optional<std::size_t> expected_k,
                                    std::optional<std::size_t> d, std::string id) {
    h.validate_commuting();
    StabilizerCode code;
    code.id = std::move(id);
    code.n = h.num_cols();
    code.stabilizer_space = symplectic_row_space(h.row_vectors());
    const std::size_t rank = code.stabilizer_space.rank();
    if (rank > code.n) throw ParseError("stabilizer rank exceeds qubit count");
    code.k = code.n - rank;
    if (expected_k && *expected_k != code.k)
        throw ParseError("declared k=" + std::to_string(*expected_k) +
                         " contradicts symplectic rank " + std::to_string(rank) + " (n=" +
                         std::to_string(code.n) + ")");
    code.d = d;
    code.h = std::move(h);
    return code;
}

StabilizerCode rotated_toric(std::size_t L) {
    if (L < 2 || L % 2 != 0)
        throw std::invalid_argument("rotated_toric: L must be even and >= 2");
    const std::size_t n = L * L;
    auto q = [&](std::size_t i, std::size_t j) { return (i % L) * L + (j % L); };
    std::vector<std::vector<QuatEntry>> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
            Pauli p = ((i + j) % 2 == 0) ? Pauli::X : Pauli::Z;
            std::vector<std::uint32_t> cols = {
                static_cast<std::uint32_t>(q(i, j)), static_cast<std::uint32_t>(q(i, j + 1)),
                static_cast<std::uint32_t>(q(i + 1, j)), static_cast<std::uint32_t>(q(i + 1, j + 1))};
            std::sort(cols.begin(), cols.end());
            std::vector<QuatEntry> row;
            for (auto c : cols) row.push_back({c, p});
            rows.push_back(std::move(row));
        }
    }
    QuaternaryCheckMatrix h(n, n, std::move(rows));
    return make_stabilizer_code(std::move(h), 2, L, "toric" + std::to_string(L));
}

BitMatrix quasi_cyclic(const QuasiCyclicSpec& spec) {
    if (spec.base.size() != spec.gamma) throw ParseError("quasi_cyclic: base row count mismatch");
    if (spec.c == 0) throw ParseError("quasi_cyclic: c must be positive");
    BitMatrix out(spec.gamma * spec.c, spec.rho * spec.c);
    for (std::size_t bi = 0; bi < spec.gamma; ++bi) {
        if (spec.base[bi].size() != spec.rho)
            throw ParseError("quasi_cyclic: base column count mismatch");
        for (std::size_t bj = 0; bj < spec.rho; ++bj) {
            int p = spec.base[bi][bj];
            if (p < -1 || p >= static_cast<int>(spec.c))
                throw ParseError("quasi_cyclic: shift out of range");
            if (p < 0) continue;
            for (std::size_t i = 0; i < spec.c; ++i)
                out.set(bi * spec.c + i, bj * spec.c + (i + static_cast<std::size_t>(p)) % spec.c,
                        true);
        }
    }
    return out;
}

QuasiCyclicSpec read_qc(std::istream& in) {
    std::string line;
    auto next_line = [&](std::string& out_line) {
        while (std::getline(in, out_line)) {
            if (!out_line.empty() && out_line.back() == '\r') out_line.pop_back();
            if (!out_line.empty() && out_line[0] == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_line(line)) throw ParseError("empty QC input");
    std::istringstream head(line);
    std::string magic;
    QuasiCyclicSpec spec;
    if (!(head >> magic >> spec.gamma >> spec.rho >> spec.c) || magic != "QC")
        throw ParseError("bad QC header: " + line);
    for (std::size_t i = 0; i < spec.gamma; ++i) {
        if (!next_line(line)) throw ParseError("QC: missing base row " + std::to_string(i));
        std::istringstream ls(line);
        std::vector<int> row;
        int v = 0;
        while (ls >> v) row.push_back(v);
        if (row.size() != spec.rho) throw ParseError("QC: base row " + std::to_string(i) +
                                                     " has wrong length");
        spec.base.push_back(std::move(row));
    }
    return spec;
}

QuasiCyclicSpec read_qc_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return read_qc(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_qc(std::ostream& out, const QuasiCyclicSpec& spec,
              std::span<const std::string> comments) {
    for (const auto& c : comments) out << (c.starts_with("#") ? "" : "# ") << c << "\n";
    out << "QC " << spec.gamma << " " << spec.rho << " " << spec.c << "\n";
    for (const auto& row : spec.base) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
        out << "\n";
    }
}

void write_qc_file(const std::string& path, const QuasiCyclicSpec& spec,
                   std::span<const std::string> comments) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    write_qc(out, spec, comments);
}

GdsCheckMatrix gds_from_binary(const BitMatrix& a, bool with_identity) {
    const std::size_t rows = a.num_rows();
    const std::size_t cols = a.num_cols() + (with_identity ? rows : 0);
    std::vector<std::vector<QuatEntry>> quat(rows);
    std::vector<std::vector<std::uint32_t>> bin(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < a.num_cols(); ++j)
            if (a.get(i, j)) bin[i].push_back(static_cast<std::uint32_t>(j));
        if (with_identity) bin[i].push_back(static_cast<std::uint32_t>(a.num_cols() + i));
    }
    return GdsCheckMatrix(0, cols, std::move(quat), std::move(bin));
}

std::optional<QuasiCyclicSpec> random_qc_search(std::size_t gamma, std::size_t rho,
                                                std::size_t c, std::size_t girth_target,
                                                std::size_t attempts, std::uint64_t seed,
                                                bool with_identity) {
    if (c == 0) throw std::invalid_argument("random_qc_search: c must be positive");
    for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
        Rng rng = make_stream(seed, attempt, 0, StreamKind::qc_search);
        QuasiCyclicSpec spec{gamma, rho, c, {}};
        spec.base.assign(gamma, std::vector<int>(rho, 0));
        for (auto& row : spec.base)
            for (auto& v : row) v = static_cast<int>(rng.next_below(c));
        TannerGraph g(gds_from_binary(quasi_cyclic(spec), with_identity));
        if (girth(g) >= girth_target) return spec;
    }
    return std::nullopt;
}

StabilizerCode load_stabilizer_code(const std::string& path) {
    ChkFile f = read_chk_file(path);
    std::string id = f.meta_id.value_or(path);
    try {
        return make_stabilizer_code(std::move(f.matrix), f.meta_k, f.meta_d, std::move(id));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

namespace {

// Circulant over Z_ell: row i has ones at columns (i + s) mod ell.
void add_circulant_entries(std::vector<std::uint32_t>& cols, std::size_t ell, std::size_t row,
                           std::span<const std::size_t> shifts, std::size_t col_offset) {
    for (auto s : shifts) cols.push_back(static_cast<std::uint32_t>(col_offset + (row + s) % ell));
}

std::vector<QuatEntry> pauli_row_from_cols(std::vector<std::uint32_t> cols, Pauli p) {
    std::sort(cols.begin(), cols.end());
    std::vector<QuatEntry> row;
    row.reserve(cols.size());
    for (auto c : cols) row.push_back({c, p});
    return row;
}

}  // namespace

QuaternaryCheckMatrix bicycle_css(std::size_t ell, std::span<const std::size_t> a_shifts,
                                  std::span<const std::size_t> b_shifts, bool interleave) {
    const std::size_t n = 2 * ell;
    std::vector<std::vector<QuatEntry>> x_rows, z_rows;
    for (std::size_t i = 0; i < ell; ++i) {
        // X row i: [A | B] row i. Z row i: [B^T | A^T] row i; the transpose of
        // a circulant with shift s is the circulant with shift ell - s.
        std::vector<std::uint32_t> xc, zc;
        add_circulant_entries(xc, ell, i, a_shifts, 0);
        add_circulant_entries(xc, ell, i, b_shifts, ell);
        x_rows.push_back(pauli_row_from_cols(std::move(xc), Pauli::X));
        std::vector<std::size_t> bt, at;
        for (auto s : b_shifts) bt.push_back((ell - s % ell) % ell);
        for (auto s : a_shifts) at.push_back((ell - s % ell) % ell);
        add_circulant_entries(zc, ell, i, bt, 0);
        add_circulant_entries(zc, ell, i, at, ell);
        z_rows.push_back(pauli_row_from_cols(std::move(zc), Pauli::Z));
    }
    std::vector<std::vector<QuatEntry>> rows;
    rows.reserve(2 * ell);
    if (interleave) {
        for (std::size_t i = 0; i < ell; ++i) {
            rows.push_back(std::move(x_rows[i]));
            rows.push_back(std::move(z_rows[i]));
        }
    } else {
        for (auto& r : x_rows) rows.push_back(std::move(r));
        for (auto& r : z_rows) rows.push_back(std::move(r));
    }
    return QuaternaryCheckMatrix(2 * ell, n, std::move(rows));
}

namespace {
constexpr std::size_t kGbEll = 63;
constexpr std::size_t kGbAShifts[] = {0, 1, 14, 16, 22};
constexpr std::size_t kGbBShifts[] = {0, 3, 13, 20, 42};
}  // namespace

StabilizerCode gb_code_126() {
    auto h = bicycle_css(kGbEll, kGbAShifts, kGbBShifts, /*interleave=*/true);
    return make_stabilizer_code(std::move(h), 28, 8, "gb126");
}

StabilizerCode gb_code_102() {
    auto full = bicycle_css(kGbEll, kGbAShifts, kGbBShifts, /*interleave=*/true);
    std::vector<std::vector<QuatEntry>> rows;
    rows.reserve(102);
    for (std::size_t i = 0; i < 102; ++i) rows.push_back(full.row(i));
    QuaternaryCheckMatrix h(102, full.num_cols(), std::move(rows));
    return make_stabilizer_code(std::move(h), 28, 8, "gb102");
}

}  // namespace qds
