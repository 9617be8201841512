#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qds/gf2.hpp"
#include "qds/pauli.hpp"

namespace qds {

// Raised on malformed input files or inconsistent matrix data.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuatEntry {
    std::uint32_t col;
    Pauli sym;
    bool operator==(const QuatEntry&) const = default;
};

// Sparse m x n matrix over {I,X,Y,Z}; rows store non-identity entries in
// ascending column order.
class QuaternaryCheckMatrix {
  public:
    QuaternaryCheckMatrix() = default;
    // Validates column bounds, ordering and absence of identity entries.
    QuaternaryCheckMatrix(std::size_t m, std::size_t n,
                          std::vector<std::vector<QuatEntry>> rows);

    static QuaternaryCheckMatrix from_strings(std::span<const std::string> rows);

    std::size_t num_rows() const { return m_; }
    std::size_t num_cols() const { return n_; }
    const std::vector<QuatEntry>& row(std::size_t i) const { return rows_[i]; }
    PauliVector row_vector(std::size_t i) const;
    std::vector<PauliVector> row_vectors() const;
    Pauli at(std::size_t i, std::size_t j) const;

    // Throws ParseError if two rows anticommute.
    void validate_commuting() const;

    // Syndrome bit per row: <row_i, e>.
    std::vector<std::uint8_t> syndrome_of(const PauliVector& e) const;

    bool operator==(const QuaternaryCheckMatrix&) const = default;

  private:
    std::size_t m_ = 0, n_ = 0;
    std::vector<std::vector<QuatEntry>> rows_;
};

// Generalized check matrix over the mixed alphabet: each of the M' rows has a
// quaternary part (N columns over {I,X,Y,Z}) and a binary part (M columns
// over GF(2)). The syndrome of (E, e) is <row_quat, E> + row_bin . e per row.
class GdsCheckMatrix {
  public:
    GdsCheckMatrix() = default;
    GdsCheckMatrix(std::size_t n_quat, std::size_t m_bin,
                   std::vector<std::vector<QuatEntry>> quat_rows,
                   std::vector<std::vector<std::uint32_t>> bin_rows);

    std::size_t num_rows() const { return quat_rows_.size(); }
    std::size_t quaternary_cols() const { return n_quat_; }
    std::size_t binary_cols() const { return m_bin_; }
    std::size_t num_vars() const { return n_quat_ + m_bin_; }

    const std::vector<QuatEntry>& quat_row(std::size_t i) const { return quat_rows_[i]; }
    const std::vector<std::uint32_t>& bin_row(std::size_t i) const { return bin_rows_[i]; }

    std::vector<std::uint8_t> syndrome_of(const MixedVector& v) const;

    bool operator==(const GdsCheckMatrix&) const = default;

  private:
    std::size_t n_quat_ = 0, m_bin_ = 0;
    std::vector<std::vector<QuatEntry>> quat_rows_;
    std::vector<std::vector<std::uint32_t>> bin_rows_;
};

// [H | I_m]: one flip variable per check.
GdsCheckMatrix ds_matrix(const QuaternaryCheckMatrix& h);

// r-round repeated-measurement form on transformed syndromes: block-diagonal
// copies of H beside the binary bidiagonal [I; I I; I I; ...]. Quaternary
// block l holds the fresh round-l error; flip block l couples rounds l, l+1.
GdsCheckMatrix gds_repeated(const QuaternaryCheckMatrix& h, std::size_t rounds);

// Raw (untransformed) form of the same r-round experiment: block
// lower-triangular copies of H beside diagonal flips. Row block l checks the
// accumulated error through round l directly.
GdsCheckMatrix gds_repeated_raw(const QuaternaryCheckMatrix& h, std::size_t rounds);

// r rounds of noisy measurement plus one flip-free readout round, on
// transformed syndromes: r+1 quaternary blocks; flip block l couples rounds
// l, l+1 for l < r while block r couples round r and the readout row.
GdsCheckMatrix gds_with_readout(const QuaternaryCheckMatrix& h, std::size_t rounds);

// Per-round variant: round l measures h[l] where h[l] must equal a[l] *
// h[l-1] over GF(2) row combinations (a[l] is m_l x m_{l-1}). Binary part is
// diagonal plus the subdiagonal a[l] blocks.
GdsCheckMatrix gds_per_round(std::span<const QuaternaryCheckMatrix> h,
                             std::span<const BitMatrix> a);

struct SingleShotMatrices {
    GdsCheckMatrix measurement;  // [H | I 0; AH | 0 I]
    GdsCheckMatrix decoding;     // [H | I 0; 0  | A I]
    BitMatrix row_ops;           // decoding = row_ops * measurement over GF(2)
};

// Adds redundant checks AH with their own flip variables; row_ops maps the
// measured syndrome to the one the decoding matrix expects.
SingleShotMatrices single_shot_matrix(const QuaternaryCheckMatrix& h, const BitMatrix& a);

// (s^1, s^2, ..., s^R) -> (s^1, s^1+s^2, ..., s^{R-1}+s^R), blocks of size m.
std::vector<std::uint8_t> r_transform_syndrome(std::span<const std::uint8_t> s,
                                               std::size_t rounds, std::size_t m);
// Inverse (prefix sums over blocks).
std::vector<std::uint8_t> r_transform_inverse(std::span<const std::uint8_t> s,
                                              std::size_t rounds, std::size_t m);

// Bipartite graph of a GDS matrix: variables are the N quaternary columns
// followed by the M binary columns; checks are rows. Edges keep their symbol.
class TannerGraph {
  public:
    explicit TannerGraph(const GdsCheckMatrix& h);

    std::size_t num_vars() const { return var_adj_.size(); }
    std::size_t num_checks() const { return check_adj_.size(); }
    std::size_t num_edges() const { return edges_; }
    std::size_t n_quat() const { return n_quat_; }

    // Neighbor lists; labels parallel check_adj (Pauli::I marks a binary edge).
    const std::vector<std::vector<std::uint32_t>>& check_adj() const { return check_adj_; }
    const std::vector<std::vector<Pauli>>& check_labels() const { return check_labels_; }
    const std::vector<std::vector<std::uint32_t>>& var_adj() const { return var_adj_; }

  private:
    std::size_t n_quat_ = 0;
    std::size_t edges_ = 0;
    std::vector<std::vector<std::uint32_t>> check_adj_;
    std::vector<std::vector<Pauli>> check_labels_;
    std::vector<std::vector<std::uint32_t>> var_adj_;
};

constexpr std::size_t kInfiniteGirth = std::numeric_limits<std::size_t>::max();

// Shortest cycle length (always even on a bipartite graph); kInfiniteGirth
// for forests.
std::size_t girth(const TannerGraph& g);

// Graphviz text: variable nodes as circles, check nodes as boxes, edges
// labeled X/Y/Z for quaternary entries and 1 for binary ones.
std::string export_dot(const TannerGraph& g);

// --- text formats -----------------------------------------------------------
//
// CHK (quaternary matrix), 0-based columns, one row per line:
//   CHK <m> <n>
//   0:X 1:Y
// GDS (mixed matrix): binary entries are written b<col>:
//   GDS <N> <M> <MPRIME>
//   0:X 1:Y b0
// Lines starting with '#' are comments and may carry key=value metadata.

struct ChkFile {
    QuaternaryCheckMatrix matrix;
    std::optional<std::size_t> meta_k;
    std::optional<std::size_t> meta_d;
    std::optional<std::string> meta_id;
};

ChkFile read_chk(std::istream& in);
ChkFile read_chk_file(const std::string& path);
void write_chk(std::ostream& out, const QuaternaryCheckMatrix& h,
               std::span<const std::string> comments = {});
void write_chk_file(const std::string& path, const QuaternaryCheckMatrix& h,
                    std::span<const std::string> comments = {});

GdsCheckMatrix read_gds(std::istream& in);
GdsCheckMatrix read_gds_file(const std::string& path);
void write_gds(std::ostream& out, const GdsCheckMatrix& h,
               std::span<const std::string> comments = {});
void write_gds_file(const std::string& path, const GdsCheckMatrix& h,
                    std::span<const std::string> comments = {});

}  // namespace qds
