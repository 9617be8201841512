#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qds/check_matrix.hpp"
#include "qds/pauli.hpp"

namespace qds {

// Per-variable prior LLRs: three entries (X, Y, Z relative to I) for each
// quaternary variable, one entry per binary variable.
struct LlrInit {
    std::vector<std::array<double, 3>> quaternary;
    std::vector<double> binary;
};

// Priors from i.i.d. depolarizing rate eps and flip rate eps_b:
// Lambda^W = ln((1-eps)/(eps/3)), Lambda = ln((1-eps_b)/eps_b), clamped.
LlrInit init_from_rates(std::size_t n_quat, std::size_t m_bin, double eps, double eps_b,
                        double clamp = 30.0);

enum class Schedule { parallel, serial };

struct DecoderConfig {
    int t_max = 50;
    // MBP uses alphas.front(); the adaptive sweep tries them in order and
    // requires a strictly decreasing sequence.
    std::vector<double> alphas = {1.0};
    Schedule schedule = Schedule::parallel;
    double llr_clamp = 30.0;
    bool capture_llrs = false;  // fill DecodeOutcome::final_llrs
};

// alpha_start down to alpha_end inclusive (within half a step), step > 0.
std::vector<double> alpha_sweep(double alpha_start, double alpha_end, double step = 0.01);

struct DecodeOutcome {
    bool converged = false;
    MixedVector estimate;     // hard decision at exit (last iteration if FAIL)
    int iterations = 0;       // iterations executed; summed over an adaptive sweep
    double alpha_star = 0.0;  // alpha in effect at exit
    // Final beliefs, 3 per quaternary variable then 1 per binary variable,
    // only when DecoderConfig::capture_llrs is set.
    std::vector<double> final_llrs;
};

// LLR of symbol W against I given beliefs (gx, gy, gz):
// ln((1 + e^-gW) / (e^-gU + e^-gV)) where U, V are the two symbols that
// anticommute with W. Evaluated in the log domain; no cancellation.
double lambda_w(Pauli w, double gx, double gy, double gz);

// 2 atanh(prod tanh(a_j / 2)); inputs clamped to +-clamp, the product kept
// away from +-1.
double boxplus(std::span<const double> values, double clamp = 30.0);

// Quaternary/binary belief propagation with the message-normalization
// parameter alpha applied to the belief sum and fixed inhibition on the
// outgoing messages. One Decoder instance can be reused across many calls on
// the same matrix; buffers persist between calls.
class Decoder {
  public:
    explicit Decoder(const GdsCheckMatrix& h);

    // Runs up to cfg.t_max iterations at alpha = cfg.alphas.front().
    DecodeOutcome decode_mbp(std::span<const std::uint8_t> syndrome, const LlrInit& init,
                             const DecoderConfig& cfg);
    // Restarts decode_mbp along the descending alpha sequence; the first
    // converged run wins and sets alpha_star.
    DecodeOutcome decode_ambp(std::span<const std::uint8_t> syndrome, const LlrInit& init,
                              const DecoderConfig& cfg);

    std::size_t num_checks() const;
    std::size_t num_vars() const;

  private:
    struct Graph;
    std::shared_ptr<const Graph> g_;

    // Working buffers, sized on construction.
    std::vector<double> gamma_edge_;   // current variable-to-check messages
    std::vector<double> tanh_edge_;    // tanh(gamma_edge / 2), kept in sync
    std::vector<double> delta_edge_;   // last check-to-variable messages
    std::vector<std::array<double, 3>> belief_quat_;
    std::vector<double> belief_bin_;
    std::vector<double> scratch_pre_, scratch_suf_;
    MixedVector estimate_;

    DecodeOutcome run_mbp(std::span<const std::uint8_t> syndrome, const LlrInit& init,
                          const DecoderConfig& cfg, double alpha);
    void init_messages(const LlrInit& init, double clamp);
    // Horizontal step plus belief update (no outgoing-message refresh).
    void iterate_parallel(std::span<const std::uint8_t> syndrome, const LlrInit& init,
                          double alpha, double clamp);
    // Outgoing-message refresh from the current beliefs and deltas.
    void update_messages_parallel(double clamp);
    void iterate_serial(std::span<const std::uint8_t> syndrome, const LlrInit& init,
                        double alpha, double clamp);
    void hard_decision();
    bool syndrome_matches(std::span<const std::uint8_t> syndrome) const;
};

// One-shot conveniences.
DecodeOutcome decode_mbp(const GdsCheckMatrix& h, std::span<const std::uint8_t> syndrome,
                         const LlrInit& init, const DecoderConfig& cfg);
DecodeOutcome decode_ambp(const GdsCheckMatrix& h, std::span<const std::uint8_t> syndrome,
                          const LlrInit& init, const DecoderConfig& cfg);

}  // namespace qds
