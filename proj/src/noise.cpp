#include "qds/noise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qds {

void NoiseModel::validate() const {
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon out of [0, 1]");
    if (epsilon_b < 0.0 || epsilon_b > 1.0) throw std::invalid_argument("epsilon_b out of [0, 1]");
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
}

PauliVector sample_depolarizing(std::size_t n, double eps, Rng& rng) {
    static constexpr Pauli kErr[3] = {Pauli::X, Pauli::Y, Pauli::Z};
    PauliVector v(n);
    for (std::size_t i = 0; i < n; ++i)
        if (rng.next_double() < eps) v[i] = kErr[rng.next_below(3)];
    return v;
}

std::vector<std::uint8_t> sample_flips(std::size_t m, double eps_b, Rng& rng) {
    std::vector<std::uint8_t> e(m, 0);
    for (std::size_t i = 0; i < m; ++i) e[i] = rng.next_double() < eps_b ? 1 : 0;
    return e;
}

TrialSample sample_trial(const StabilizerCode& code, const NoiseModel& noise, bool readout,
                         const TrialKey& key, const PauliVector* initial,
                         std::uint64_t round_offset) {
    noise.validate();
    const std::size_t n = code.n;
    const std::size_t m = code.num_checks();
    const std::size_t total_rounds = noise.rounds + (readout ? 1 : 0);

    TrialSample out;
    out.data_errors.reserve(total_rounds);
    out.syndrome_flips.reserve(noise.rounds);
    out.observed_syndromes.reserve(total_rounds);

    for (std::size_t l = 1; l <= total_rounds; ++l) {
        Rng rng = key.stream(round_offset + l, StreamKind::data_error);
        out.data_errors.push_back(sample_depolarizing(n, noise.epsilon, rng));
    }
    if (initial) {
        if (initial->size() != n) throw std::invalid_argument("sample_trial: initial size mismatch");
        out.data_errors[0] = pauli_product(*initial, out.data_errors[0]);
    }
    for (std::size_t l = 1; l <= noise.rounds; ++l) {
        Rng rng = key.stream(round_offset + l, StreamKind::syndrome_flip);
        out.syndrome_flips.push_back(sample_flips(m, noise.epsilon_b, rng));
    }

    PauliVector accumulated(n);
    for (std::size_t l = 0; l < total_rounds; ++l) {
        accumulated = pauli_product(accumulated, out.data_errors[l]);
        auto s = code.h.syndrome_of(accumulated);
        if (l < noise.rounds)
            for (std::size_t i = 0; i < m; ++i) s[i] ^= out.syndrome_flips[l][i];
        out.observed_syndromes.push_back(std::move(s));
    }
    return out;
}

std::vector<std::uint8_t> syndromes_for_decoding(const TrialSample& sample, std::size_t m) {
    const std::size_t blocks = sample.observed_syndromes.size();
    if (blocks == 0) throw std::invalid_argument("syndromes_for_decoding: empty sample");
    std::vector<std::uint8_t> raw;
    raw.reserve(blocks * m);
    for (const auto& s : sample.observed_syndromes) {
        if (s.size() != m) throw std::invalid_argument("syndromes_for_decoding: block size mismatch");
        raw.insert(raw.end(), s.begin(), s.end());
    }
    return r_transform_syndrome(raw, blocks, m);
}

Residual classify_residual(const StabilizerCode& code, std::span<const PauliVector> truth,
                           std::span<const PauliVector> estimate) {
    if (truth.size() != estimate.size())
        throw std::invalid_argument("classify_residual: round count mismatch");
    PauliVector residual(code.n);
    for (std::size_t l = 0; l < truth.size(); ++l) {
        residual = pauli_product(residual, truth[l]);
        residual = pauli_product(residual, estimate[l]);
    }
    return code.is_stabilizer_equivalent(residual) ? Residual::stabilizer : Residual::logical;
}

PosteriorOracle exact_posterior_oracle(const GdsCheckMatrix& h,
                                       std::span<const std::uint8_t> syndrome, double eps,
                                       double eps_b) {
    const std::size_t N = h.quaternary_cols();
    const std::size_t M = h.binary_cols();
    const std::size_t checks = h.num_rows();
    if (syndrome.size() != checks)
        throw std::invalid_argument("exact_posterior_oracle: syndrome length mismatch");
    if (checks > 64)
        throw std::invalid_argument("exact_posterior_oracle: more than 64 checks");
    if (2 * N + M > 24)
        throw std::invalid_argument("exact_posterior_oracle: state space exceeds 2^24");

    // Per-digit probability weights and per-(digit,value) syndrome masks.
    const double wq[4] = {1.0 - eps, eps / 3.0, eps / 3.0, eps / 3.0};
    const double wb[2] = {1.0 - eps_b, eps_b};
    std::vector<std::array<std::uint64_t, 4>> mask(N + M, {0, 0, 0, 0});
    for (std::size_t i = 0; i < checks; ++i) {
        for (const auto& e : h.quat_row(i))
            for (int v = 1; v < 4; ++v)
                if (pauli_anticommute(e.sym, static_cast<Pauli>(v)))
                    mask[e.col][v] |= std::uint64_t(1) << i;
        for (auto c : h.bin_row(i)) mask[N + c][1] |= std::uint64_t(1) << i;
    }
    std::uint64_t target = 0;
    for (std::size_t i = 0; i < checks; ++i)
        if (syndrome[i] & 1) target |= std::uint64_t(1) << i;

    const std::size_t digits = N + M;
    std::vector<int> d(digits, 0);
    std::vector<int> radix(digits);
    for (std::size_t j = 0; j < digits; ++j) radix[j] = j < N ? 4 : 2;

    auto full_prob = [&]() {
        double p = 1.0;
        for (std::size_t j = 0; j < N; ++j) p *= wq[d[j]];
        for (std::size_t j = N; j < digits; ++j) p *= wb[d[j]];
        return p;
    };

    std::vector<std::array<long double, 4>> acc(digits, {0.0L, 0.0L, 0.0L, 0.0L});
    long double total = 0.0L;
    double best = -1.0;
    std::vector<int> best_digits;

    std::uint64_t s = 0;
    for (;;) {
        if (s == target) {
            // Probability is only needed on consistent candidates, so it is
            // recomputed fresh here; no incremental drift.
            const double prob = full_prob();
            total += prob;
            for (std::size_t j = 0; j < digits; ++j) acc[j][d[j]] += prob;
            if (prob > best) {
                best = prob;
                best_digits = d;
            }
        }
        // Odometer increment with carries; the syndrome follows each digit
        // change via the precomputed masks.
        std::size_t j = 0;
        for (; j < digits; ++j) {
            int old = d[j];
            if (old + 1 < radix[j]) {
                d[j] = old + 1;
                s ^= mask[j][old] ^ mask[j][old + 1];
                break;
            }
            d[j] = 0;
            s ^= mask[j][old];
        }
        if (j == digits) break;
    }

    if (!(total > 0.0L))
        throw std::runtime_error("exact_posterior_oracle: no candidate matches the syndrome");

    PosteriorOracle out;
    out.total_probability = static_cast<double>(total);
    out.quaternary.resize(N);
    out.binary.resize(M);
    auto llr_of = [](long double p_top, long double p_bot) {
        if (p_bot <= 0.0L) return std::numeric_limits<double>::infinity();
        return static_cast<double>(logl(p_top / p_bot));
    };
    for (std::size_t j = 0; j < N; ++j) {
        const auto& a = acc[j];
        // LLR of W against I in the order X, Y, Z (Pauli codes 1, 3, 2).
        out.quaternary[j] = {llr_of(a[0], a[1]), llr_of(a[0], a[3]), llr_of(a[0], a[2])};
    }
    for (std::size_t j = 0; j < M; ++j) out.binary[j] = llr_of(acc[N + j][0], acc[N + j][1]);
    out.map_candidate.pauli = PauliVector(N);
    out.map_candidate.bits.assign(M, 0);
    for (std::size_t j = 0; j < N; ++j)
        out.map_candidate.pauli[j] = static_cast<Pauli>(best_digits[j]);
    for (std::size_t j = 0; j < M; ++j)
        out.map_candidate.bits[j] = static_cast<std::uint8_t>(best_digits[N + j]);
    return out;
}

}  // namespace qds
