#include "qds/check_matrix.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qds {

namespace {

void check_row_entries(const std::vector<QuatEntry>& row, std::size_t n, std::size_t i) {
    std::uint32_t prev = 0;
    bool first = true;
    for (const auto& e : row) {
        if (e.col >= n)
            throw ParseError("row " + std::to_string(i) + ": column " + std::to_string(e.col) +
                             " out of range");
        if (!first && e.col <= prev)
            throw ParseError("row " + std::to_string(i) + ": columns not strictly ascending");
        if (e.sym == Pauli::I)
            throw ParseError("row " + std::to_string(i) + ": explicit identity entry");
        prev = e.col;
        first = false;
    }
}

void check_bin_entries(const std::vector<std::uint32_t>& row, std::size_t m, std::size_t i) {
    std::uint32_t prev = 0;
    bool first = true;
    for (auto c : row) {
        if (c >= m)
            throw ParseError("row " + std::to_string(i) + ": binary column " + std::to_string(c) +
                             " out of range");
        if (!first && c <= prev)
            throw ParseError("row " + std::to_string(i) + ": binary columns not strictly ascending");
        prev = c;
        first = false;
    }
}

}  // namespace

QuaternaryCheckMatrix::QuaternaryCheckMatrix(std::size_t m, std::size_t n,
                                             std::vector<std::vector<QuatEntry>> rows)
    : m_(m), n_(n), rows_(std::move(rows)) {
    if (rows_.size() != m_) throw ParseError("row count does not match header");
    for (std::size_t i = 0; i < rows_.size(); ++i) check_row_entries(rows_[i], n_, i);
}

QuaternaryCheckMatrix QuaternaryCheckMatrix::from_strings(std::span<const std::string> rows) {
    if (rows.empty()) return {};
    const std::size_t n = rows.front().size();
    std::vector<std::vector<QuatEntry>> out;
    out.reserve(rows.size());
    for (const auto& s : rows) {
        if (s.size() != n) throw ParseError("from_strings: ragged rows");
        std::vector<QuatEntry> row;
        for (std::size_t j = 0; j < s.size(); ++j) {
            Pauli p = pauli_from_char(s[j]);
            if (p != Pauli::I) row.push_back({static_cast<std::uint32_t>(j), p});
        }
        out.push_back(std::move(row));
    }
    return QuaternaryCheckMatrix(rows.size(), n, std::move(out));
}

PauliVector QuaternaryCheckMatrix::row_vector(std::size_t i) const {
    PauliVector v(n_);
    for (const auto& e : rows_[i]) v[e.col] = e.sym;
    return v;
}

std::vector<PauliVector> QuaternaryCheckMatrix::row_vectors() const {
    std::vector<PauliVector> out;
    out.reserve(m_);
    for (std::size_t i = 0; i < m_; ++i) out.push_back(row_vector(i));
    return out;
}

Pauli QuaternaryCheckMatrix::at(std::size_t i, std::size_t j) const {
    for (const auto& e : rows_[i])
        if (e.col == j) return e.sym;
    return Pauli::I;
}

void QuaternaryCheckMatrix::validate_commuting() const {
    // Sparse overlap evaluation: only shared columns contribute.
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = i + 1; j < m_; ++j) {
            const auto& a = rows_[i];
            const auto& b = rows_[j];
            int acc = 0;
            std::size_t p = 0, q = 0;
            while (p < a.size() && q < b.size()) {
                if (a[p].col < b[q].col)
                    ++p;
                else if (a[p].col > b[q].col)
                    ++q;
                else
                    acc ^= pauli_anticommute(a[p++].sym, b[q++].sym);
            }
            if (acc)
                throw ParseError("checks " + std::to_string(i) + " and " + std::to_string(j) +
                                 " anticommute");
        }
    }
}

std::vector<std::uint8_t> QuaternaryCheckMatrix::syndrome_of(const PauliVector& e) const {
    if (e.size() != n_) throw std::invalid_argument("syndrome_of: length mismatch");
    std::vector<std::uint8_t> s(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
        int acc = 0;
        for (const auto& en : rows_[i]) acc ^= pauli_anticommute(en.sym, e[en.col]);
        s[i] = static_cast<std::uint8_t>(acc);
    }
    return s;
}

GdsCheckMatrix::GdsCheckMatrix(std::size_t n_quat, std::size_t m_bin,
                               std::vector<std::vector<QuatEntry>> quat_rows,
                               std::vector<std::vector<std::uint32_t>> bin_rows)
    : n_quat_(n_quat), m_bin_(m_bin), quat_rows_(std::move(quat_rows)),
      bin_rows_(std::move(bin_rows)) {
    if (quat_rows_.size() != bin_rows_.size())
        throw ParseError("quaternary/binary row counts differ");
    for (std::size_t i = 0; i < quat_rows_.size(); ++i) {
        check_row_entries(quat_rows_[i], n_quat_, i);
        check_bin_entries(bin_rows_[i], m_bin_, i);
    }
}

std::vector<std::uint8_t> GdsCheckMatrix::syndrome_of(const MixedVector& v) const {
    if (v.pauli.size() != n_quat_ || v.bits.size() != m_bin_)
        throw std::invalid_argument("syndrome_of: shape mismatch");
    std::vector<std::uint8_t> s(num_rows(), 0);
    for (std::size_t i = 0; i < num_rows(); ++i) {
        int acc = 0;
        for (const auto& e : quat_rows_[i]) acc ^= pauli_anticommute(e.sym, v.pauli[e.col]);
        for (auto c : bin_rows_[i]) acc ^= (v.bits[c] & 1);
        s[i] = static_cast<std::uint8_t>(acc);
    }
    return s;
}

GdsCheckMatrix ds_matrix(const QuaternaryCheckMatrix& h) {
    const std::size_t m = h.num_rows();
    std::vector<std::vector<QuatEntry>> quat(m);
    std::vector<std::vector<std::uint32_t>> bin(m);
    for (std::size_t i = 0; i < m; ++i) {
        quat[i] = h.row(i);
        bin[i] = {static_cast<std::uint32_t>(i)};
    }
    return GdsCheckMatrix(h.num_cols(), m, std::move(quat), std::move(bin));
}

namespace {

std::vector<QuatEntry> shifted_row(const std::vector<QuatEntry>& row, std::size_t col_offset) {
    std::vector<QuatEntry> out;
    out.reserve(row.size());
    for (const auto& e : row)
        out.push_back({static_cast<std::uint32_t>(e.col + col_offset), e.sym});
    return out;
}

}  // namespace

GdsCheckMatrix gds_repeated(const QuaternaryCheckMatrix& h, std::size_t rounds) {
    if (rounds == 0) throw std::invalid_argument("gds_repeated: rounds must be >= 1");
    const std::size_t m = h.num_rows(), n = h.num_cols();
    std::vector<std::vector<QuatEntry>> quat;
    std::vector<std::vector<std::uint32_t>> bin;
    quat.reserve(rounds * m);
    bin.reserve(rounds * m);
    for (std::size_t l = 0; l < rounds; ++l) {
        for (std::size_t i = 0; i < m; ++i) {
            quat.push_back(shifted_row(h.row(i), l * n));
            std::vector<std::uint32_t> b;
            if (l > 0) b.push_back(static_cast<std::uint32_t>((l - 1) * m + i));
            b.push_back(static_cast<std::uint32_t>(l * m + i));
            bin.push_back(std::move(b));
        }
    }
    return GdsCheckMatrix(rounds * n, rounds * m, std::move(quat), std::move(bin));
}

GdsCheckMatrix gds_repeated_raw(const QuaternaryCheckMatrix& h, std::size_t rounds) {
    if (rounds == 0) throw std::invalid_argument("gds_repeated_raw: rounds must be >= 1");
    const std::size_t m = h.num_rows(), n = h.num_cols();
    std::vector<std::vector<QuatEntry>> quat;
    std::vector<std::vector<std::uint32_t>> bin;
    quat.reserve(rounds * m);
    bin.reserve(rounds * m);
    for (std::size_t l = 0; l < rounds; ++l) {
        for (std::size_t i = 0; i < m; ++i) {
            // Row block l checks the product of rounds 1..l+1, so it carries a
            // copy of the check in every earlier quaternary block.
            std::vector<QuatEntry> q;
            for (std::size_t b = 0; b <= l; ++b) {
                auto part = shifted_row(h.row(i), b * n);
                q.insert(q.end(), part.begin(), part.end());
            }
            quat.push_back(std::move(q));
            bin.push_back({static_cast<std::uint32_t>(l * m + i)});
        }
    }
    return GdsCheckMatrix(rounds * n, rounds * m, std::move(quat), std::move(bin));
}

GdsCheckMatrix gds_with_readout(const QuaternaryCheckMatrix& h, std::size_t rounds) {
    if (rounds == 0) throw std::invalid_argument("gds_with_readout: rounds must be >= 1");
    const std::size_t m = h.num_rows(), n = h.num_cols();
    const std::size_t r = rounds;
    std::vector<std::vector<QuatEntry>> quat;
    std::vector<std::vector<std::uint32_t>> bin;
    quat.reserve((r + 1) * m);
    bin.reserve((r + 1) * m);
    // Row block l (0-based, of r+1 blocks) couples flip blocks l-1 and l; the
    // readout block l = r has no flip of its own and only touches block r-1.
    for (std::size_t l = 0; l < r + 1; ++l) {
        for (std::size_t i = 0; i < m; ++i) {
            quat.push_back(shifted_row(h.row(i), l * n));
            std::vector<std::uint32_t> b;
            if (l > 0) b.push_back(static_cast<std::uint32_t>((l - 1) * m + i));
            if (l < r) b.push_back(static_cast<std::uint32_t>(l * m + i));
            bin.push_back(std::move(b));
        }
    }
    return GdsCheckMatrix((r + 1) * n, r * m, std::move(quat), std::move(bin));
}

GdsCheckMatrix gds_per_round(std::span<const QuaternaryCheckMatrix> h,
                             std::span<const BitMatrix> a) {
    if (h.empty()) throw std::invalid_argument("gds_per_round: no rounds");
    if (a.size() + 1 != h.size())
        throw std::invalid_argument("gds_per_round: need one transfer matrix per round after the first");
    const std::size_t n = h.front().num_cols();
    for (const auto& hl : h)
        if (hl.num_cols() != n) throw std::invalid_argument("gds_per_round: column count varies");
    // Verify h[l] = a[l-1] * h[l-1] as GF(2) row combinations.
    for (std::size_t l = 1; l < h.size(); ++l) {
        const auto& al = a[l - 1];
        if (al.num_rows() != h[l].num_rows() || al.num_cols() != h[l - 1].num_rows())
            throw std::invalid_argument("gds_per_round: transfer matrix shape mismatch");
        for (std::size_t i = 0; i < h[l].num_rows(); ++i) {
            BitVec expect(2 * n);
            for (std::size_t j = 0; j < al.num_cols(); ++j)
                if (al.get(i, j)) expect.xor_in(symplectic_row(h[l - 1].row_vector(j)));
            if (!(expect == symplectic_row(h[l].row_vector(i))))
                throw std::invalid_argument("gds_per_round: round " + std::to_string(l + 1) +
                                            " is not a row transform of the previous round");
        }
    }

    std::vector<std::size_t> m_off(h.size() + 1, 0);
    for (std::size_t l = 0; l < h.size(); ++l) m_off[l + 1] = m_off[l] + h[l].num_rows();

    std::vector<std::vector<QuatEntry>> quat;
    std::vector<std::vector<std::uint32_t>> bin;
    for (std::size_t l = 0; l < h.size(); ++l) {
        for (std::size_t i = 0; i < h[l].num_rows(); ++i) {
            quat.push_back(shifted_row(h[l].row(i), l * n));
            std::vector<std::uint32_t> b;
            if (l > 0) {
                const auto& al = a[l - 1];
                for (std::size_t j = 0; j < al.num_cols(); ++j)
                    if (al.get(i, j)) b.push_back(static_cast<std::uint32_t>(m_off[l - 1] + j));
            }
            b.push_back(static_cast<std::uint32_t>(m_off[l] + i));
            std::sort(b.begin(), b.end());
            bin.push_back(std::move(b));
        }
    }
    return GdsCheckMatrix(h.size() * n, m_off.back(), std::move(quat), std::move(bin));
}

SingleShotMatrices single_shot_matrix(const QuaternaryCheckMatrix& h, const BitMatrix& a) {
    const std::size_t m = h.num_rows(), n = h.num_cols(), ell = a.num_rows();
    if (a.num_cols() != m)
        throw std::invalid_argument("single_shot_matrix: a must have one column per check");

    std::vector<std::vector<QuatEntry>> meas_quat, dec_quat;
    std::vector<std::vector<std::uint32_t>> meas_bin, dec_bin;
    for (std::size_t i = 0; i < m; ++i) {
        meas_quat.push_back(h.row(i));
        meas_bin.push_back({static_cast<std::uint32_t>(i)});
    }
    // Redundant checks: row combinations of h selected by the rows of a.
    for (std::size_t i = 0; i < ell; ++i) {
        BitVec acc(2 * n);
        for (std::size_t j = 0; j < m; ++j)
            if (a.get(i, j)) acc.xor_in(symplectic_row(h.row_vector(j)));
        PauliVector combo = pauli_from_symplectic(acc);
        std::vector<QuatEntry> row;
        for (std::size_t c = 0; c < n; ++c)
            if (combo[c] != Pauli::I) row.push_back({static_cast<std::uint32_t>(c), combo[c]});
        meas_quat.push_back(std::move(row));
        meas_bin.push_back({static_cast<std::uint32_t>(m + i)});
    }

    dec_quat = meas_quat;
    dec_bin = meas_bin;
    BitMatrix row_ops = BitMatrix::identity(m + ell);
    // Eliminate the redundant quaternary blocks by adding the generating rows;
    // the same elementary operations are applied to row_ops and the flip part.
    for (std::size_t i = 0; i < ell; ++i) {
        BitVec acc(2 * n);
        std::vector<std::uint32_t> flips = {static_cast<std::uint32_t>(m + i)};
        for (std::size_t j = 0; j < m; ++j) {
            if (!a.get(i, j)) continue;
            acc.xor_in(symplectic_row(h.row_vector(j)));
            row_ops.row(m + i).flip(j);
            flips.push_back(static_cast<std::uint32_t>(j));
        }
        BitVec target(2 * n);
        for (const auto& e : dec_quat[m + i]) {
            target.set(e.col, x_bit(e.sym));
            target.set(n + e.col, z_bit(e.sym));
        }
        acc.xor_in(target);
        assert(acc.none());
        dec_quat[m + i].clear();
        std::sort(flips.begin(), flips.end());
        dec_bin[m + i] = std::move(flips);
    }

    SingleShotMatrices out;
    out.measurement =
        GdsCheckMatrix(n, m + ell, std::move(meas_quat), std::move(meas_bin));
    out.decoding = GdsCheckMatrix(n, m + ell, std::move(dec_quat), std::move(dec_bin));
    out.row_ops = std::move(row_ops);
    return out;
}

std::vector<std::uint8_t> r_transform_syndrome(std::span<const std::uint8_t> s,
                                               std::size_t rounds, std::size_t m) {
    if (s.size() != rounds * m) throw std::invalid_argument("r_transform_syndrome: size mismatch");
    std::vector<std::uint8_t> out(s.size());
    for (std::size_t i = 0; i < m; ++i) out[i] = s[i] & 1;
    for (std::size_t l = 1; l < rounds; ++l)
        for (std::size_t i = 0; i < m; ++i)
            out[l * m + i] = static_cast<std::uint8_t>((s[(l - 1) * m + i] ^ s[l * m + i]) & 1);
    return out;
}

std::vector<std::uint8_t> r_transform_inverse(std::span<const std::uint8_t> s,
                                              std::size_t rounds, std::size_t m) {
    if (s.size() != rounds * m) throw std::invalid_argument("r_transform_inverse: size mismatch");
    std::vector<std::uint8_t> out(s.size());
    for (std::size_t i = 0; i < m; ++i) out[i] = s[i] & 1;
    for (std::size_t l = 1; l < rounds; ++l)
        for (std::size_t i = 0; i < m; ++i)
            out[l * m + i] = static_cast<std::uint8_t>((out[(l - 1) * m + i] ^ s[l * m + i]) & 1);
    return out;
}

TannerGraph::TannerGraph(const GdsCheckMatrix& h) : n_quat_(h.quaternary_cols()) {
    const std::size_t mprime = h.num_rows();
    check_adj_.resize(mprime);
    check_labels_.resize(mprime);
    var_adj_.resize(h.num_vars());
    for (std::size_t i = 0; i < mprime; ++i) {
        for (const auto& e : h.quat_row(i)) {
            check_adj_[i].push_back(e.col);
            check_labels_[i].push_back(e.sym);
            var_adj_[e.col].push_back(static_cast<std::uint32_t>(i));
            ++edges_;
        }
        for (auto c : h.bin_row(i)) {
            std::uint32_t v = static_cast<std::uint32_t>(n_quat_ + c);
            check_adj_[i].push_back(v);
            check_labels_[i].push_back(Pauli::I);
            var_adj_[v].push_back(static_cast<std::uint32_t>(i));
            ++edges_;
        }
    }
}

std::size_t girth(const TannerGraph& g) {
    // Nodes: variables [0, V), checks [V, V + C). BFS from every node; a
    // non-tree edge closes a cycle of length dist[u] + dist[v] + 1.
    const std::size_t V = g.num_vars(), C = g.num_checks();
    const std::size_t total = V + C;
    auto neighbors = [&](std::size_t u, auto&& fn) {
        if (u < V) {
            for (auto c : g.var_adj()[u]) fn(V + c);
        } else {
            for (auto v : g.check_adj()[u - V]) fn(static_cast<std::size_t>(v));
        }
    };
    std::size_t best = kInfiniteGirth;
    std::vector<std::int64_t> dist(total);
    std::vector<std::int64_t> parent(total);
    for (std::size_t root = 0; root < total; ++root) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(parent.begin(), parent.end(), -1);
        std::deque<std::size_t> q{root};
        dist[root] = 0;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop_front();
            if (best != kInfiniteGirth &&
                static_cast<std::size_t>(2 * dist[u]) >= best)
                break;
            neighbors(u, [&](std::size_t v) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    parent[v] = static_cast<std::int64_t>(u);
                    q.push_back(v);
                } else if (static_cast<std::int64_t>(v) != parent[u]) {
                    std::size_t cyc = static_cast<std::size_t>(dist[u] + dist[v] + 1);
                    best = std::min(best, cyc);
                }
            });
        }
    }
    return best;
}

std::string export_dot(const TannerGraph& g) {
    std::ostringstream out;
    out << "graph tanner {\n";
    const std::size_t nq = g.n_quat();
    for (std::size_t j = 0; j < g.num_vars(); ++j) {
        if (j < nq)
            out << "  E" << j << " [shape=circle];\n";
        else
            out << "  e" << (j - nq) << " [shape=circle,style=dashed];\n";
    }
    for (std::size_t i = 0; i < g.num_checks(); ++i) out << "  c" << i << " [shape=box];\n";
    for (std::size_t i = 0; i < g.num_checks(); ++i) {
        const auto& adj = g.check_adj()[i];
        const auto& lab = g.check_labels()[i];
        for (std::size_t t = 0; t < adj.size(); ++t) {
            if (adj[t] < nq)
                out << "  E" << adj[t] << " -- c" << i << " [label=\"" << pauli_char(lab[t])
                    << "\"];\n";
            else
                out << "  e" << (adj[t] - nq) << " -- c" << i << " [label=\"1\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

// --- text formats ------------------------------------------------------------

namespace {

struct MetaComments {
    std::optional<std::size_t> k, d;
    std::optional<std::string> id;
};

void scan_meta(const std::string& comment, MetaComments& meta) {
    // Recognizes "key=value" anywhere in a comment line, keys k, d, id.
    std::istringstream iss(comment);
    std::string tok;
    while (iss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        try {
            if (key == "k") meta.k = std::stoul(val);
            else if (key == "d") meta.d = std::stoul(val);
            else if (key == "id") meta.id = val;
        } catch (const std::exception&) {
            throw ParseError("bad metadata token: " + tok);
        }
    }
}

// Reads the next content line (skipping comments), collecting metadata.
bool next_content_line(std::istream& in, std::string& line, MetaComments* meta) {
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] == '#') {
            if (meta) scan_meta(line.substr(1), *meta);
            continue;
        }
        return true;
    }
    return false;
}

QuatEntry parse_quat_token(const std::string& tok) {
    auto colon = tok.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 2 != tok.size())
        throw ParseError("bad entry token: " + tok);
    std::size_t pos = 0;
    unsigned long col = 0;
    try {
        col = std::stoul(tok.substr(0, colon), &pos);
    } catch (const std::exception&) {
        throw ParseError("bad column in token: " + tok);
    }
    if (pos != colon) throw ParseError("bad column in token: " + tok);
    Pauli p = Pauli::I;
    try {
        p = pauli_from_char(tok[colon + 1]);
    } catch (const std::invalid_argument&) {
        throw ParseError("bad symbol in token: " + tok);
    }
    if (p == Pauli::I) throw ParseError("identity entry in token: " + tok);
    return {static_cast<std::uint32_t>(col), p};
}

}  // namespace

ChkFile read_chk(std::istream& in) {
    MetaComments meta;
    std::string line;
    if (!next_content_line(in, line, &meta)) throw ParseError("empty CHK input");
    std::istringstream head(line);
    std::string magic;
    std::size_t m = 0, n = 0;
    if (!(head >> magic >> m >> n) || magic != "CHK") throw ParseError("bad CHK header: " + line);
    std::string extra;
    if (head >> extra) throw ParseError("trailing tokens in CHK header");

    std::vector<std::vector<QuatEntry>> rows;
    rows.reserve(m);
    while (rows.size() < m) {
        if (!next_content_line(in, line, &meta))
            throw ParseError("CHK: expected " + std::to_string(m) + " rows, got " +
                             std::to_string(rows.size()));
        std::istringstream ls(line);
        std::vector<QuatEntry> row;
        std::string tok;
        while (ls >> tok) row.push_back(parse_quat_token(tok));
        rows.push_back(std::move(row));
    }
    while (next_content_line(in, line, &meta)) {
        std::istringstream ls(line);
        std::string tok;
        if (ls >> tok) throw ParseError("CHK: unexpected content after last row: " + line);
    }
    ChkFile out;
    out.matrix = QuaternaryCheckMatrix(m, n, std::move(rows));
    out.meta_k = meta.k;
    out.meta_d = meta.d;
    out.meta_id = meta.id;
    return out;
}

ChkFile read_chk_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return read_chk(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_chk(std::ostream& out, const QuaternaryCheckMatrix& h,
               std::span<const std::string> comments) {
    for (const auto& c : comments) out << (c.starts_with("#") ? "" : "# ") << c << "\n";
    out << "CHK " << h.num_rows() << " " << h.num_cols() << "\n";
    for (std::size_t i = 0; i < h.num_rows(); ++i) {
        bool first = true;
        for (const auto& e : h.row(i)) {
            if (!first) out << ' ';
            out << e.col << ':' << pauli_char(e.sym);
            first = false;
        }
        out << '\n';
    }
}

void write_chk_file(const std::string& path, const QuaternaryCheckMatrix& h,
                    std::span<const std::string> comments) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    write_chk(out, h, comments);
}

GdsCheckMatrix read_gds(std::istream& in) {
    std::string line;
    if (!next_content_line(in, line, nullptr)) throw ParseError("empty GDS input");
    std::istringstream head(line);
    std::string magic;
    std::size_t n = 0, m = 0, mprime = 0;
    if (!(head >> magic >> n >> m >> mprime) || magic != "GDS")
        throw ParseError("bad GDS header: " + line);
    std::string extra;
    if (head >> extra) throw ParseError("trailing tokens in GDS header");

    std::vector<std::vector<QuatEntry>> quat;
    std::vector<std::vector<std::uint32_t>> bin;
    while (quat.size() < mprime) {
        if (!next_content_line(in, line, nullptr))
            throw ParseError("GDS: expected " + std::to_string(mprime) + " rows, got " +
                             std::to_string(quat.size()));
        std::istringstream ls(line);
        std::vector<QuatEntry> qrow;
        std::vector<std::uint32_t> brow;
        std::string tok;
        while (ls >> tok) {
            if (tok[0] == 'b') {
                std::size_t pos = 0;
                unsigned long col = 0;
                try {
                    col = std::stoul(tok.substr(1), &pos);
                } catch (const std::exception&) {
                    throw ParseError("bad binary token: " + tok);
                }
                if (pos + 1 != tok.size()) throw ParseError("bad binary token: " + tok);
                brow.push_back(static_cast<std::uint32_t>(col));
            } else {
                if (!brow.empty()) throw ParseError("quaternary token after binary ones: " + tok);
                qrow.push_back(parse_quat_token(tok));
            }
        }
        quat.push_back(std::move(qrow));
        bin.push_back(std::move(brow));
    }
    while (next_content_line(in, line, nullptr)) {
        std::istringstream ls(line);
        std::string tok;
        if (ls >> tok) throw ParseError("GDS: unexpected content after last row: " + line);
    }
    return GdsCheckMatrix(n, m, std::move(quat), std::move(bin));
}

GdsCheckMatrix read_gds_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return read_gds(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_gds(std::ostream& out, const GdsCheckMatrix& h,
               std::span<const std::string> comments) {
    for (const auto& c : comments) out << (c.starts_with("#") ? "" : "# ") << c << "\n";
    out << "GDS " << h.quaternary_cols() << " " << h.binary_cols() << " " << h.num_rows() << "\n";
    for (std::size_t i = 0; i < h.num_rows(); ++i) {
        bool first = true;
        for (const auto& e : h.quat_row(i)) {
            if (!first) out << ' ';
            out << e.col << ':' << pauli_char(e.sym);
            first = false;
        }
        for (auto c : h.bin_row(i)) {
            if (!first) out << ' ';
            out << 'b' << c;
            first = false;
        }
        out << '\n';
    }
}

void write_gds_file(const std::string& path, const GdsCheckMatrix& h,
                    std::span<const std::string> comments) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    write_gds(out, h, comments);
}

}  // namespace qds
