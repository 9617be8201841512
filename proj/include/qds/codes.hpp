#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qds/check_matrix.hpp"
#include "qds/gf2.hpp"

namespace qds {

// A validated stabilizer code: pairwise commuting checks with symplectic
// rank n - k, plus the row space for residual classification.
struct StabilizerCode {
    std::string id;
    QuaternaryCheckMatrix h;
    std::size_t n = 0;
    std::size_t k = 0;
    std::optional<std::size_t> d;
    Gf2RowSpace stabilizer_space;

    std::size_t num_checks() const { return h.num_rows(); }
    bool is_stabilizer_equivalent(const PauliVector& residual) const {
        return in_row_space(stabilizer_space, residual);
    }
};

// Validates commutation and, when expected_k is given, the symplectic rank.
StabilizerCode make_stabilizer_code(QuaternaryCheckMatrix h,
                                    std::optional<std::size_t> expected_k,
                                    std::optional<std::size_t> d, std::string id);

// Rotated toric code on an L x L grid (L even): n = L^2, k = 2, d = L.
// Qubits are row-major; the plaquette at (i, j) acts on the four qubits
// {(i,j),(i,j+1),(i+1,j),(i+1,j+1)} mod L and is X-type iff i + j is even.
StabilizerCode rotated_toric(std::size_t L);

// Base matrix of a quasi-cyclic binary code: entry p >= 0 expands to the
// c x c circulant I(p) with I(p)[i][i+p mod c] = 1; entry -1 expands to zero.
struct QuasiCyclicSpec {
    std::size_t gamma = 0, rho = 0, c = 0;
    std::vector<std::vector<int>> base;  // gamma rows of rho entries in [-1, c)

    bool operator==(const QuasiCyclicSpec&) const = default;
};

BitMatrix quasi_cyclic(const QuasiCyclicSpec& spec);

// Text form:
//   QC <gamma> <rho> <c>
//   5 3 13 10 0 16
QuasiCyclicSpec read_qc(std::istream& in);
QuasiCyclicSpec read_qc_file(const std::string& path);
void write_qc(std::ostream& out, const QuasiCyclicSpec& spec,
              std::span<const std::string> comments = {});
void write_qc_file(const std::string& path, const QuasiCyclicSpec& spec,
                   std::span<const std::string> comments = {});

// Binary matrix viewed as a GDS matrix with only binary variables, optionally
// with an appended identity block (one flip variable per row); used for girth
// checks of classical expander parts.
GdsCheckMatrix gds_from_binary(const BitMatrix& a, bool with_identity);

// Seeded search for a gamma x rho base matrix over Z_c whose expansion
// (optionally beside an identity) reaches the target girth. Returns the first
// hit in attempt order; attempt k draws from the stream (seed, k).
std::optional<QuasiCyclicSpec> random_qc_search(std::size_t gamma, std::size_t rho,
                                                std::size_t c, std::size_t girth_target,
                                                std::size_t attempts, std::uint64_t seed,
                                                bool with_identity = true);

// Loads a CHK file and validates it as a stabilizer code. Recognized header
// metadata: id=<name>, k=<int>, d=<int>. A declared k that contradicts the
// symplectic rank is an error; without it k is derived from the rank.
StabilizerCode load_stabilizer_code(const std::string& path);

// Two-block circulant CSS construction over cyclic group size ell:
// H_X = [A | B], H_Z = [B^T | A^T] with A, B circulants of the given shift
// exponents. Used to generate the shipped [[126,28,8]] fixtures.
QuaternaryCheckMatrix bicycle_css(std::size_t ell, std::span<const std::size_t> a_shifts,
                                  std::span<const std::size_t> b_shifts, bool interleave);

// The [[126,28,8]] code shipped under data/: ell = 63,
// a = {0,1,14,16,22}, b = {0,3,13,20,42}. X and Z rows alternate.
StabilizerCode gb_code_126();

// First 51 X-type and first 51 Z-type checks of gb_code_126 (symplectic rank
// is still 98, so nothing is lost; the row count matches the rank-redundancy
// budget m = 102 used by the single-shot construction).
StabilizerCode gb_code_102();

}  // namespace qds
