#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qds/codes.hpp"
#include "qds/decoder.hpp"
#include "qds/noise.hpp"

namespace qds {

// Aggregated decoder usage over an experiment.
struct DecodeStats {
    std::uint64_t calls = 0;
    std::uint64_t converged = 0;
    double iter_sum = 0.0;
    double alpha_sum = 0.0;  // over converged calls only

    void add(const DecodeOutcome& o) {
        ++calls;
        iter_sum += o.iterations;
        if (o.converged) {
            ++converged;
            alpha_sum += o.alpha_star;
        }
    }
    void merge(const DecodeStats& o) {
        calls += o.calls;
        converged += o.converged;
        iter_sum += o.iter_sum;
        alpha_sum += o.alpha_sum;
    }
    double mean_iters() const { return calls ? iter_sum / static_cast<double>(calls) : 0.0; }
    // NaN when nothing converged.
    double mean_alpha_star() const;
};

// One CSV row; the header is fixed.
struct ExperimentRecord {
    std::string code_id;
    std::size_t d = 0;
    std::size_t r = 1;
    double epsilon = 0.0;
    double epsilon_b = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    double metric = 0.0;
    double mean_iters = 0.0;
    double mean_alpha_star = 0.0;
    std::uint64_t censored = 0;
    std::uint64_t wall_ms = 0;
};

std::string csv_header();
std::string to_csv_row(const ExperimentRecord& rec);

// ---------------------------------------------------------------------------
// Memory lifetime (sustained rounds until the readout-stage decoder leaves a
// logical residual).

struct MemoryConfig {
    std::size_t rounds = 3;  // syndrome-measurement rounds per cycle
    double epsilon = 0.0;
    double epsilon_b = 0.0;
    DecoderConfig decoder;                // shared by both decoding stages
    std::optional<double> fixed_init;     // prior rate override for both alphabets
    std::uint64_t max_cycles = 1'000'000; // censoring cap per trial
    std::size_t trials = 100;             // hard cap on trials
    // Stop after the trial whose failure brings the count to this target; the
    // included trial prefix depends only on per-trial outcomes, so records
    // stay identical across worker counts. trials still caps the run.
    std::optional<std::uint64_t> failure_target;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    bool timing = false;
};

struct SustainOutcome {
    std::uint64_t rounds_survived = 1;
    bool censored = false;
    DecodeStats stats;
};

// One trial of the sustain-time procedure: cycles of r noisy rounds plus a
// flip-free readout; the readout-stage estimate decides logical failure, the
// repeated-stage estimate folds the residual into the next cycle.
SustainOutcome sustain_time(const StabilizerCode& code, const MemoryConfig& cfg,
                            std::uint64_t trial);

// Campaign over cfg.trials trials. metric = 1 / mean(rounds survived).
ExperimentRecord run_memory(const StabilizerCode& code, const MemoryConfig& cfg);

// ---------------------------------------------------------------------------
// Single-shot correction with redundant checks.

struct SingleShotConfig {
    double epsilon = 0.0;
    double epsilon_b = 0.0;
    DecoderConfig decoder;
    std::size_t trials = 1000;  // hard cap on trials
    // Same early-stop contract as MemoryConfig::failure_target.
    std::optional<std::uint64_t> failure_target;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    bool timing = false;
    // Priors may differ from the sampling rates (e.g. scaled flip priors).
    std::optional<double> prior_epsilon;
    std::optional<double> prior_epsilon_b;
    // Weight-conditioned test mode: draw uniformly among vectors of exact
    // combined weight, or of weight <= the bound. data_only restricts errors
    // to the quaternary part.
    std::optional<std::size_t> weight_exact;
    std::optional<std::size_t> weight_at_most;
    bool data_only = false;
};

// With epsilon_b > 0 decodes [H | I 0; 0 | A I] on the transformed measured
// syndrome; with epsilon_b = 0 decodes the plain quaternary matrix of the
// code. Success requires convergence and a stabilizer residual on the data
// part. metric = failures / trials.
ExperimentRecord run_single_shot(const StabilizerCode& code, const BitMatrix& a,
                                 const SingleShotConfig& cfg);

// Uniform draw among mixed vectors of exact combined weight w (each of the N
// quaternary slots counts three ways); data_only restricts the support to the
// quaternary part.
MixedVector sample_weighted(std::size_t N, std::size_t M, std::size_t w, bool data_only,
                            Rng& rng);
// Uniform draw among all vectors of combined weight <= bound.
MixedVector sample_weight_at_most(std::size_t N, std::size_t M, std::size_t bound,
                                  bool data_only, Rng& rng);

// ---------------------------------------------------------------------------
// Bounded-distance reference and threshold-ansatz fit.

// 1 - sum_{j<=t} C(N,j) eps^j (1-eps)^(N-j), evaluated in log space.
double bdd_rate(std::size_t N, std::size_t t, double eps);

struct AnsatzPoint {
    std::size_t d = 0;
    double epsilon = 0.0;
    double rate = 0.0;
};

struct AnsatzGrid {
    double nu_min = 1.0, nu_max = 2.0, nu_step = 0.01;
    double tau_min = 0.02, tau_max = 0.04, tau_step = 0.0001;
};

struct AnsatzFitResult {
    double nu = 0.0;
    double tau = 0.0;
    double mse = 0.0;
    std::array<double, 3> coeffs{};  // quadratic in x = d^(1/nu) (eps - tau)
};

// Grid search minimizing the quadratic least-squares MSE; ties prefer the
// smaller tau, then the smaller nu. Throws when no grid point admits a fit.
AnsatzFitResult ansatz_fit(std::span<const AnsatzPoint> points, const AnsatzGrid& grid = {});

}  // namespace qds
