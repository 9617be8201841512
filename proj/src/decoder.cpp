#include "qds/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qds {

namespace {

constexpr double kProductGuard = 1.0 - 1e-15;

inline double clamp_llr(double v, double c) { return std::min(std::max(v, -c), c); }

inline double logaddexp(double a, double b) {
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

// lambda for symbol w from the three beliefs, given as exponents already
// negated is avoided; we pass raw beliefs and negate here.
inline double lambda_raw(double gw, double gu, double gv) {
    return logaddexp(0.0, -gw) - logaddexp(-gu, -gv);
}

}  // namespace

double lambda_w(Pauli w, double gx, double gy, double gz) {
    switch (w) {
        case Pauli::X: return lambda_raw(gx, gy, gz);
        case Pauli::Y: return lambda_raw(gy, gx, gz);
        case Pauli::Z: return lambda_raw(gz, gx, gy);
        case Pauli::I: break;
    }
    throw std::invalid_argument("lambda_w: symbol must be X, Y or Z");
}

double boxplus(std::span<const double> values, double clamp) {
    if (values.empty()) return 2.0 * std::atanh(kProductGuard);
    // Pairwise fold of 2 atanh(tanh(a/2) tanh(b/2)) evaluated in the log
    // domain, ln((1 + e^{a+b}) / (e^a + e^b)), which stays accurate where the
    // tanh product saturates.
    double acc = clamp_llr(values[0], clamp);
    for (std::size_t i = 1; i < values.size(); ++i) {
        double b = clamp_llr(values[i], clamp);
        double s = acc + b;
        double d = acc - b;
        acc = std::max(s, 0.0) - std::max(acc, b) + std::log1p(std::exp(-std::fabs(s))) -
              std::log1p(std::exp(-std::fabs(d)));
    }
    return acc;
}

LlrInit init_from_rates(std::size_t n_quat, std::size_t m_bin, double eps, double eps_b,
                        double clamp) {
    if (eps < 0.0 || eps > 1.0 || eps_b < 0.0 || eps_b > 1.0)
        throw std::invalid_argument("init_from_rates: rates must lie in [0, 1]");
    LlrInit init;
    double lq = (eps <= 0.0) ? clamp : std::log((1.0 - eps) / (eps / 3.0));
    lq = clamp_llr(lq, clamp);
    double lb = (eps_b <= 0.0) ? clamp : std::log((1.0 - eps_b) / eps_b);
    lb = clamp_llr(lb, clamp);
    init.quaternary.assign(n_quat, {lq, lq, lq});
    init.binary.assign(m_bin, lb);
    return init;
}

std::vector<double> alpha_sweep(double alpha_start, double alpha_end, double step) {
    if (step <= 0.0) throw std::invalid_argument("alpha_sweep: step must be positive");
    if (alpha_start < alpha_end)
        throw std::invalid_argument("alpha_sweep: start must not be below end");
    std::vector<double> out;
    const std::size_t count =
        static_cast<std::size_t>(std::floor((alpha_start - alpha_end) / step + 0.5)) + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(alpha_start - static_cast<double>(i) * step);
    return out;
}

struct Decoder::Graph {
    std::size_t n_quat = 0, m_bin = 0, m_checks = 0;
    std::size_t max_row_weight = 0;
    // Edges in CSR order by check.
    std::vector<std::uint32_t> check_ptr;
    std::vector<std::uint32_t> edge_var;  // combined index: quaternary then binary
    std::vector<Pauli> edge_label;        // Pauli::I marks a binary edge
    std::vector<std::uint32_t> edge_check;
    // Edge ids grouped by variable.
    std::vector<std::uint32_t> var_ptr;
    std::vector<std::uint32_t> var_edges;
};

Decoder::Decoder(const GdsCheckMatrix& h) {
    auto g = std::make_shared<Graph>();
    g->n_quat = h.quaternary_cols();
    g->m_bin = h.binary_cols();
    g->m_checks = h.num_rows();
    if (g->m_checks == 0) throw std::invalid_argument("Decoder: matrix has no rows");

    g->check_ptr.assign(g->m_checks + 1, 0);
    for (std::size_t i = 0; i < g->m_checks; ++i) {
        std::size_t w = h.quat_row(i).size() + h.bin_row(i).size();
        g->check_ptr[i + 1] = g->check_ptr[i] + static_cast<std::uint32_t>(w);
        g->max_row_weight = std::max(g->max_row_weight, w);
    }
    const std::size_t edges = g->check_ptr.back();
    g->edge_var.resize(edges);
    g->edge_label.resize(edges);
    g->edge_check.resize(edges);
    std::size_t e = 0;
    for (std::size_t i = 0; i < g->m_checks; ++i) {
        for (const auto& ent : h.quat_row(i)) {
            g->edge_var[e] = ent.col;
            g->edge_label[e] = ent.sym;
            g->edge_check[e] = static_cast<std::uint32_t>(i);
            ++e;
        }
        for (auto c : h.bin_row(i)) {
            g->edge_var[e] = static_cast<std::uint32_t>(g->n_quat + c);
            g->edge_label[e] = Pauli::I;
            g->edge_check[e] = static_cast<std::uint32_t>(i);
            ++e;
        }
    }

    const std::size_t vars = g->n_quat + g->m_bin;
    g->var_ptr.assign(vars + 1, 0);
    for (std::size_t t = 0; t < edges; ++t) ++g->var_ptr[g->edge_var[t] + 1];
    for (std::size_t v = 0; v < vars; ++v) g->var_ptr[v + 1] += g->var_ptr[v];
    g->var_edges.resize(edges);
    std::vector<std::uint32_t> fill(vars, 0);
    for (std::uint32_t t = 0; t < edges; ++t) {
        std::uint32_t v = g->edge_var[t];
        g->var_edges[g->var_ptr[v] + fill[v]++] = t;
    }

    g_ = std::move(g);
    gamma_edge_.resize(edges);
    tanh_edge_.resize(edges);
    delta_edge_.resize(edges);
    belief_quat_.resize(g_->n_quat);
    belief_bin_.resize(g_->m_bin);
    scratch_pre_.resize(g_->max_row_weight + 1);
    scratch_suf_.resize(g_->max_row_weight + 1);
    estimate_.pauli = PauliVector(g_->n_quat);
    estimate_.bits.assign(g_->m_bin, 0);
}

std::size_t Decoder::num_checks() const { return g_->m_checks; }
std::size_t Decoder::num_vars() const { return g_->n_quat + g_->m_bin; }

void Decoder::init_messages(const LlrInit& init, double clamp) {
    const Graph& g = *g_;
    for (std::size_t e = 0; e < g.edge_var.size(); ++e) {
        std::uint32_t v = g.edge_var[e];
        double val;
        if (v < g.n_quat) {
            const auto& l = init.quaternary[v];
            val = lambda_w(g.edge_label[e], l[0], l[1], l[2]);
        } else {
            val = init.binary[v - g.n_quat];
        }
        gamma_edge_[e] = clamp_llr(val, clamp);
        tanh_edge_[e] = std::tanh(gamma_edge_[e] / 2.0);
    }
}

void Decoder::hard_decision() {
    const Graph& g = *g_;
    for (std::size_t j = 0; j < g.n_quat; ++j) {
        const auto& b = belief_quat_[j];
        if (b[0] > 0.0 && b[1] > 0.0 && b[2] > 0.0) {
            estimate_.pauli[j] = Pauli::I;
        } else if (b[0] <= b[1] && b[0] <= b[2]) {
            estimate_.pauli[j] = Pauli::X;
        } else if (b[1] <= b[2]) {
            estimate_.pauli[j] = Pauli::Y;
        } else {
            estimate_.pauli[j] = Pauli::Z;
        }
    }
    for (std::size_t j = 0; j < g.m_bin; ++j)
        estimate_.bits[j] = belief_bin_[j] > 0.0 ? 0 : 1;
}

bool Decoder::syndrome_matches(std::span<const std::uint8_t> syndrome) const {
    const Graph& g = *g_;
    for (std::size_t i = 0; i < g.m_checks; ++i) {
        int acc = 0;
        for (std::uint32_t e = g.check_ptr[i]; e < g.check_ptr[i + 1]; ++e) {
            std::uint32_t v = g.edge_var[e];
            if (v < g.n_quat)
                acc ^= pauli_anticommute(g.edge_label[e], estimate_.pauli[v]);
            else
                acc ^= estimate_.bits[v - g.n_quat];
        }
        if (acc != (syndrome[i] & 1)) return false;
    }
    return true;
}

void Decoder::iterate_parallel(std::span<const std::uint8_t> syndrome, const LlrInit& init,
                               double alpha, double clamp) {
    const Graph& g = *g_;
    // Horizontal: delta_e = (-1)^{s_i} boxplus over the other edges of the
    // check, via prefix/suffix products of the cached tanh values.
    for (std::size_t i = 0; i < g.m_checks; ++i) {
        const std::uint32_t p0 = g.check_ptr[i], p1 = g.check_ptr[i + 1];
        const std::size_t w = p1 - p0;
        scratch_pre_[0] = 1.0;
        for (std::size_t t = 0; t < w; ++t)
            scratch_pre_[t + 1] = scratch_pre_[t] * tanh_edge_[p0 + t];
        scratch_suf_[w] = 1.0;
        for (std::size_t t = w; t-- > 0;)
            scratch_suf_[t] = scratch_suf_[t + 1] * tanh_edge_[p0 + t];
        const double sign = (syndrome[i] & 1) ? -1.0 : 1.0;
        for (std::size_t t = 0; t < w; ++t) {
            double prod = scratch_pre_[t] * scratch_suf_[t + 1];
            prod = std::min(std::max(prod, -kProductGuard), kProductGuard);
            delta_edge_[p0 + t] = clamp_llr(sign * 2.0 * std::atanh(prod), clamp);
        }
    }

    // Vertical: beliefs carry the 1/alpha-scaled sum of incoming deltas.
    // Beliefs stay unclamped: every addend is bounded by clamp / alpha, so
    // they are finite, and truncating them would skew the inhibition left in
    // the outgoing messages at small alpha.
    const double inv_alpha = 1.0 / alpha;
    for (std::size_t j = 0; j < g.n_quat; ++j) {
        std::array<double, 3> b = init.quaternary[j];
        for (std::uint32_t t = g.var_ptr[j]; t < g.var_ptr[j + 1]; ++t) {
            const std::uint32_t e = g.var_edges[t];
            const double add = inv_alpha * delta_edge_[e];
            const Pauli l = g.edge_label[e];
            if (pauli_anticommute(Pauli::X, l)) b[0] += add;
            if (pauli_anticommute(Pauli::Y, l)) b[1] += add;
            if (pauli_anticommute(Pauli::Z, l)) b[2] += add;
        }
        belief_quat_[j] = b;
    }
    for (std::size_t j = 0; j < g.m_bin; ++j) {
        double b = init.binary[j];
        const std::size_t v = g.n_quat + j;
        for (std::uint32_t t = g.var_ptr[v]; t < g.var_ptr[v + 1]; ++t)
            b += inv_alpha * delta_edge_[g.var_edges[t]];
        belief_bin_[j] = b;
    }
}

void Decoder::update_messages_parallel(double clamp) {
    const Graph& g = *g_;
    // Outgoing messages subtract the full incoming delta (fixed inhibition).
    for (std::size_t j = 0; j < g.n_quat; ++j) {
        const auto& b = belief_quat_[j];
        for (std::uint32_t t = g.var_ptr[j]; t < g.var_ptr[j + 1]; ++t) {
            const std::uint32_t e = g.var_edges[t];
            const double d = delta_edge_[e];
            const Pauli l = g.edge_label[e];
            const double gx = b[0] - (pauli_anticommute(Pauli::X, l) ? d : 0.0);
            const double gy = b[1] - (pauli_anticommute(Pauli::Y, l) ? d : 0.0);
            const double gz = b[2] - (pauli_anticommute(Pauli::Z, l) ? d : 0.0);
            gamma_edge_[e] = clamp_llr(lambda_w(l, gx, gy, gz), clamp);
            tanh_edge_[e] = std::tanh(gamma_edge_[e] / 2.0);
        }
    }
    for (std::size_t j = 0; j < g.m_bin; ++j) {
        const std::size_t v = g.n_quat + j;
        for (std::uint32_t t = g.var_ptr[v]; t < g.var_ptr[v + 1]; ++t) {
            const std::uint32_t e = g.var_edges[t];
            gamma_edge_[e] = clamp_llr(belief_bin_[j] - delta_edge_[e], clamp);
            tanh_edge_[e] = std::tanh(gamma_edge_[e] / 2.0);
        }
    }
}

void Decoder::iterate_serial(std::span<const std::uint8_t> syndrome, const LlrInit& init,
                             double alpha, double clamp) {
    const Graph& g = *g_;
    const double inv_alpha = 1.0 / alpha;
    for (std::size_t j = 0; j < g.n_quat + g.m_bin; ++j) {
        // Check-to-variable messages for this variable, from current state.
        for (std::uint32_t t = g.var_ptr[j]; t < g.var_ptr[j + 1]; ++t) {
            const std::uint32_t e = g.var_edges[t];
            const std::uint32_t i = g.edge_check[e];
            double prod = 1.0;
            for (std::uint32_t f = g.check_ptr[i]; f < g.check_ptr[i + 1]; ++f)
                if (f != e) prod *= tanh_edge_[f];
            prod = std::min(std::max(prod, -kProductGuard), kProductGuard);
            const double sign = (syndrome[i] & 1) ? -1.0 : 1.0;
            delta_edge_[e] = clamp_llr(sign * 2.0 * std::atanh(prod), clamp);
        }
        if (j < g.n_quat) {
            std::array<double, 3> b = init.quaternary[j];
            for (std::uint32_t t = g.var_ptr[j]; t < g.var_ptr[j + 1]; ++t) {
                const std::uint32_t e = g.var_edges[t];
                const double add = inv_alpha * delta_edge_[e];
                const Pauli l = g.edge_label[e];
                if (pauli_anticommute(Pauli::X, l)) b[0] += add;
                if (pauli_anticommute(Pauli::Y, l)) b[1] += add;
                if (pauli_anticommute(Pauli::Z, l)) b[2] += add;
            }
            belief_quat_[j] = b;
            for (std::uint32_t t = g.var_ptr[j]; t < g.var_ptr[j + 1]; ++t) {
                const std::uint32_t e = g.var_edges[t];
                const double d = delta_edge_[e];
                const Pauli l = g.edge_label[e];
                const double gx = b[0] - (pauli_anticommute(Pauli::X, l) ? d : 0.0);
                const double gy = b[1] - (pauli_anticommute(Pauli::Y, l) ? d : 0.0);
                const double gz = b[2] - (pauli_anticommute(Pauli::Z, l) ? d : 0.0);
                gamma_edge_[e] = clamp_llr(lambda_w(l, gx, gy, gz), clamp);
                tanh_edge_[e] = std::tanh(gamma_edge_[e] / 2.0);
            }
        } else {
            const std::size_t jb = j - g.n_quat;
            double b = init.binary[jb];
            for (std::uint32_t t = g.var_ptr[j]; t < g.var_ptr[j + 1]; ++t)
                b += inv_alpha * delta_edge_[g.var_edges[t]];
            belief_bin_[jb] = b;
            for (std::uint32_t t = g.var_ptr[j]; t < g.var_ptr[j + 1]; ++t) {
                const std::uint32_t e = g.var_edges[t];
                gamma_edge_[e] = clamp_llr(b - delta_edge_[e], clamp);
                tanh_edge_[e] = std::tanh(gamma_edge_[e] / 2.0);
            }
        }
    }
}

DecodeOutcome Decoder::run_mbp(std::span<const std::uint8_t> syndrome, const LlrInit& init,
                               const DecoderConfig& cfg, double alpha) {
    const Graph& g = *g_;
    if (syndrome.size() != g.m_checks)
        throw std::invalid_argument("decode: syndrome length mismatch");
    if (init.quaternary.size() != g.n_quat || init.binary.size() != g.m_bin)
        throw std::invalid_argument("decode: prior shape mismatch");
    if (cfg.t_max < 1) throw std::invalid_argument("decode: t_max must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("decode: alpha must be positive");

    init_messages(init, cfg.llr_clamp);
    DecodeOutcome out;
    for (int t = 1; t <= cfg.t_max; ++t) {
        bool converged = false;
        if (cfg.schedule == Schedule::parallel) {
            iterate_parallel(syndrome, init, alpha, cfg.llr_clamp);
            hard_decision();
            converged = syndrome_matches(syndrome);
            if (!converged && t < cfg.t_max) update_messages_parallel(cfg.llr_clamp);
        } else {
            iterate_serial(syndrome, init, alpha, cfg.llr_clamp);
            hard_decision();
            converged = syndrome_matches(syndrome);
        }
        if (converged) {
            out.converged = true;
            out.iterations = t;
            break;
        }
        out.iterations = t;
    }
    out.estimate = estimate_;
    out.alpha_star = alpha;
    if (cfg.capture_llrs) {
        out.final_llrs.clear();
        out.final_llrs.reserve(3 * g.n_quat + g.m_bin);
        for (const auto& b : belief_quat_) {
            out.final_llrs.push_back(b[0]);
            out.final_llrs.push_back(b[1]);
            out.final_llrs.push_back(b[2]);
        }
        for (double b : belief_bin_) out.final_llrs.push_back(b);
    }
    return out;
}

DecodeOutcome Decoder::decode_mbp(std::span<const std::uint8_t> syndrome, const LlrInit& init,
                                  const DecoderConfig& cfg) {
    if (cfg.alphas.empty()) throw std::invalid_argument("decode_mbp: no alpha given");
    return run_mbp(syndrome, init, cfg, cfg.alphas.front());
}

DecodeOutcome Decoder::decode_ambp(std::span<const std::uint8_t> syndrome, const LlrInit& init,
                                   const DecoderConfig& cfg) {
    if (cfg.alphas.empty()) throw std::invalid_argument("decode_ambp: no alpha sequence");
    for (std::size_t i = 1; i < cfg.alphas.size(); ++i)
        if (!(cfg.alphas[i] < cfg.alphas[i - 1]))
            throw std::invalid_argument("decode_ambp: alpha sequence must be strictly decreasing");
    DecodeOutcome out;
    int total_iters = 0;
    for (double alpha : cfg.alphas) {
        out = run_mbp(syndrome, init, cfg, alpha);
        total_iters += out.iterations;
        if (out.converged) break;
    }
    out.iterations = total_iters;
    return out;
}

DecodeOutcome decode_mbp(const GdsCheckMatrix& h, std::span<const std::uint8_t> syndrome,
                         const LlrInit& init, const DecoderConfig& cfg) {
    Decoder d(h);
    return d.decode_mbp(syndrome, init, cfg);
}

DecodeOutcome decode_ambp(const GdsCheckMatrix& h, std::span<const std::uint8_t> syndrome,
                          const LlrInit& init, const DecoderConfig& cfg) {
    Decoder d(h);
    return d.decode_ambp(syndrome, init, cfg);
}

}  // namespace qds
