#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qds/check_matrix.hpp"
#include "qds/codes.hpp"
#include "qds/pauli.hpp"
#include "qds/rng.hpp"

namespace qds {

// Phenomenological model: fresh depolarizing error with total rate eps per
// round, independent syndrome-bit flips with rate eps_b on noisy rounds.
struct NoiseModel {
    double epsilon = 0.0;
    double epsilon_b = 0.0;
    std::size_t rounds = 1;

    void validate() const;
};

// One sampled history. data_errors[l] is the fresh error of round l+1;
// syndrome_flips has one block per noisy round; observed_syndromes are the
// raw per-round outcomes <accumulated error, H> + flips, with a final
// flip-free block when readout is set.
struct TrialSample {
    std::vector<PauliVector> data_errors;
    std::vector<std::vector<std::uint8_t>> syndrome_flips;
    std::vector<std::vector<std::uint8_t>> observed_syndromes;
};

PauliVector sample_depolarizing(std::size_t n, double eps, Rng& rng);
std::vector<std::uint8_t> sample_flips(std::size_t m, double eps_b, Rng& rng);

// Draws the full history for one trial. Streams are keyed per (round, kind),
// so results do not depend on consumption order. initial, when given, is
// folded into the round-1 error before syndromes are formed. round_offset
// shifts the stream keys, letting repeated cycles within one trial stay on
// fresh streams.
TrialSample sample_trial(const StabilizerCode& code, const NoiseModel& noise, bool readout,
                         const TrialKey& key, const PauliVector* initial = nullptr,
                         std::uint64_t round_offset = 0);

// Differences of consecutive observed blocks, the syndrome the repeated /
// readout matrices expect.
std::vector<std::uint8_t> syndromes_for_decoding(const TrialSample& sample, std::size_t m);

enum class Residual { stabilizer, logical };

// Residual class of prod_l truth[l] * estimate[l].
Residual classify_residual(const StabilizerCode& code, std::span<const PauliVector> truth,
                           std::span<const PauliVector> estimate);

struct PosteriorOracle {
    std::vector<std::array<double, 3>> quaternary;  // LLR of X, Y, Z against I
    std::vector<double> binary;                     // LLR of 1 against 0
    MixedVector map_candidate;                      // most probable consistent vector
    double total_probability = 0.0;                 // unnormalized mass of the syndrome class
};

// Exact syndrome-conditioned marginals by exhaustive enumeration over all
// 4^N 2^M candidates (capped at 2^24 states). Priors are the i.i.d. rates of
// the noise model. Throws if the cap is exceeded or no candidate matches.
PosteriorOracle exact_posterior_oracle(const GdsCheckMatrix& h,
                                       std::span<const std::uint8_t> syndrome, double eps,
                                       double eps_b);

}  // namespace qds
