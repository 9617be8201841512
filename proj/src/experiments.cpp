#include "qds/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

namespace qds {

double DecodeStats::mean_alpha_star() const {
    if (converged == 0) return std::numeric_limits<double>::quiet_NaN();
    return alpha_sum / static_cast<double>(converged);
}

namespace {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Runs fn(trial) for trial in [0, trials) across workers; results are stored
// by trial index, so the aggregate is independent of the worker count.
template <typename T, typename Fn>
std::vector<T> run_trials(std::size_t trials, std::size_t workers, Fn&& fn) {
    std::vector<T> results(trials);
    workers = std::max<std::size_t>(1, std::min(workers, trials ? trials : 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < trials; ++i) results[i] = fn(static_cast<std::uint64_t>(i));
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= trials) return;
                results[i] = fn(static_cast<std::uint64_t>(i));
            }
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

// Variant with an optional failure target: trials run in index order and the
// kept prefix ends at the trial whose failure reaches the target. Inclusion
// depends only on per-trial outcomes, so the aggregate is still independent
// of the worker count; chunking merely bounds wasted work past the stop.
template <typename T, typename Fn, typename FailPred>
std::vector<T> run_trials_capped(std::size_t trials, std::optional<std::uint64_t> target,
                                 std::size_t workers, Fn&& fn, FailPred&& is_failure) {
    if (!target) return run_trials<T>(trials, workers, fn);
    if (*target == 0) throw std::invalid_argument("failure_target must be >= 1");
    std::vector<T> kept;
    std::uint64_t failures = 0;
    std::size_t done = 0;
    while (done < trials) {
        const std::size_t chunk =
            std::min(trials - done, std::max<std::size_t>(64, workers * 16));
        auto part = run_trials<T>(chunk, workers,
                                  [&](std::uint64_t i) { return fn(done + i); });
        for (auto& r : part) {
            const bool fail = is_failure(r);
            kept.push_back(std::move(r));
            if (fail && ++failures >= *target) return kept;
        }
        done += chunk;
    }
    return kept;
}

class WallClock {
  public:
    explicit WallClock(bool enabled) : enabled_(enabled) {
        if (enabled_) start_ = std::chrono::steady_clock::now();
    }
    std::uint64_t elapsed_ms() const {
        if (!enabled_) return 0;
        auto d = std::chrono::steady_clock::now() - start_;
        return static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::milliseconds>(d).count());
    }

  private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_{};
};

}  // namespace

std::string csv_header() {
    return "code,d,r,epsilon,epsilon_b,trials,failures,metric,mean_iters,mean_alpha_star,"
           "censored,wall_ms";
}

std::string to_csv_row(const ExperimentRecord& rec) {
    std::string out;
    out += rec.code_id;
    out += ',';
    out += std::to_string(rec.d);
    out += ',';
    out += std::to_string(rec.r);
    out += ',';
    out += fmt_double(rec.epsilon);
    out += ',';
    out += fmt_double(rec.epsilon_b);
    out += ',';
    out += std::to_string(rec.trials);
    out += ',';
    out += std::to_string(rec.failures);
    out += ',';
    out += fmt_double(rec.metric);
    out += ',';
    out += fmt_double(rec.mean_iters);
    out += ',';
    out += fmt_double(rec.mean_alpha_star);
    out += ',';
    out += std::to_string(rec.censored);
    out += ',';
    out += std::to_string(rec.wall_ms);
    return out;
}

// ---------------------------------------------------------------------------
// Memory lifetime.

namespace {

struct MemoryShared {
    GdsCheckMatrix h_readout;  // decoded after each cycle to test the state
    GdsCheckMatrix h_repeat;   // decoded to carry the residual forward
    LlrInit init_readout;
    LlrInit init_repeat;
};

MemoryShared build_memory_shared(const StabilizerCode& code, const MemoryConfig& cfg) {
    const std::size_t r = cfg.rounds;
    const std::size_t n = code.n, m = code.num_checks();
    MemoryShared sh;
    sh.h_readout = gds_with_readout(code.h, r);
    sh.h_repeat = gds_repeated(code.h, r);
    const double pe = cfg.fixed_init.value_or(cfg.epsilon);
    const double pb = cfg.fixed_init.value_or(cfg.epsilon_b);
    sh.init_readout = init_from_rates((r + 1) * n, r * m, pe, pb, cfg.decoder.llr_clamp);
    sh.init_repeat = init_from_rates(r * n, r * m, pe, pb, cfg.decoder.llr_clamp);
    return sh;
}

SustainOutcome sustain_trial(const StabilizerCode& code, const MemoryConfig& cfg,
                             const MemoryShared& sh, std::uint64_t trial) {
    const std::size_t r = cfg.rounds;
    const std::size_t n = code.n, m = code.num_checks();
    const NoiseModel noise{cfg.epsilon, cfg.epsilon_b, r};
    const TrialKey key{cfg.seed, trial};

    Decoder dec_readout(sh.h_readout);
    Decoder dec_repeat(sh.h_repeat);

    SustainOutcome out;
    out.rounds_survived = 1;
    PauliVector carried(n);

    for (std::uint64_t cycle = 0; cycle < cfg.max_cycles; ++cycle) {
        TrialSample sample = sample_trial(code, noise, /*readout=*/true, key, &carried,
                                          /*round_offset=*/cycle * (r + 1));
        auto s_readout = syndromes_for_decoding(sample, m);
        DecodeOutcome o1 = dec_readout.decode_ambp(s_readout, sh.init_readout, cfg.decoder);
        out.stats.add(o1);

        std::vector<PauliVector> est1;
        est1.reserve(r + 1);
        for (std::size_t l = 0; l < r + 1; ++l) {
            PauliVector block(n);
            for (std::size_t q = 0; q < n; ++q) block[q] = o1.estimate.pauli[l * n + q];
            est1.push_back(std::move(block));
        }
        if (classify_residual(code, sample.data_errors, est1) == Residual::logical) {
            out.censored = false;
            return out;
        }

        // Survived: decode the first r rounds to carry the state forward.
        std::vector<std::uint8_t> raw;
        raw.reserve(r * m);
        for (std::size_t l = 0; l < r; ++l)
            raw.insert(raw.end(), sample.observed_syndromes[l].begin(),
                       sample.observed_syndromes[l].end());
        auto s_repeat = r_transform_syndrome(raw, r, m);
        DecodeOutcome o0 = dec_repeat.decode_ambp(s_repeat, sh.init_repeat, cfg.decoder);
        out.stats.add(o0);

        carried = PauliVector(n);
        for (std::size_t l = 0; l < r; ++l) {
            carried = pauli_product(carried, sample.data_errors[l]);
            PauliVector block(n);
            for (std::size_t q = 0; q < n; ++q) block[q] = o0.estimate.pauli[l * n + q];
            carried = pauli_product(carried, block);
        }
        out.rounds_survived += r;
    }
    out.censored = true;
    return out;
}

}  // namespace

SustainOutcome sustain_time(const StabilizerCode& code, const MemoryConfig& cfg,
                            std::uint64_t trial) {
    MemoryShared sh = build_memory_shared(code, cfg);
    return sustain_trial(code, cfg, sh, trial);
}

ExperimentRecord run_memory(const StabilizerCode& code, const MemoryConfig& cfg) {
    if (cfg.trials == 0) throw std::invalid_argument("run_memory: trials must be >= 1");
    WallClock clock(cfg.timing);
    MemoryShared sh = build_memory_shared(code, cfg);
    auto results = run_trials_capped<SustainOutcome>(
        cfg.trials, cfg.failure_target, cfg.workers,
        [&](std::uint64_t trial) { return sustain_trial(code, cfg, sh, trial); },
        [](const SustainOutcome& r) { return !r.censored; });

    DecodeStats stats;
    long double round_sum = 0.0L;
    std::uint64_t censored = 0, failures = 0;
    for (const auto& rres : results) {
        round_sum += static_cast<long double>(rres.rounds_survived);
        stats.merge(rres.stats);
        if (rres.censored)
            ++censored;
        else
            ++failures;
    }
    const std::uint64_t ran = results.size();
    const double lifetime = static_cast<double>(round_sum / static_cast<long double>(ran));

    ExperimentRecord rec;
    rec.code_id = code.id;
    rec.d = code.d.value_or(0);
    rec.r = cfg.rounds;
    rec.epsilon = cfg.epsilon;
    rec.epsilon_b = cfg.epsilon_b;
    rec.trials = ran;
    rec.failures = failures;
    rec.metric = 1.0 / lifetime;
    rec.mean_iters = stats.mean_iters();
    rec.mean_alpha_star = stats.mean_alpha_star();
    rec.censored = censored;
    rec.wall_ms = clock.elapsed_ms();
    return rec;
}

// ---------------------------------------------------------------------------
// Single-shot correction.

namespace {

double log_choose(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Number of combined-weight-w vectors with a quaternary part of weight a:
// C(N,a) 3^a C(M,w-a), as a double (fine for desk-scale N, M, w).
double weight_split_count(std::size_t N, std::size_t M, std::size_t w, std::size_t a) {
    if (a > N || w - a > M) return 0.0;
    return std::exp(log_choose(N, a) + static_cast<double>(a) * std::log(3.0) +
                    log_choose(M, w - a));
}

std::vector<std::size_t> sample_distinct(std::size_t count, std::size_t bound, Rng& rng) {
    std::vector<std::size_t> out;
    out.reserve(count);
    while (out.size() < count) {
        std::size_t v = rng.next_below(bound);
        bool seen = false;
        for (auto u : out) seen |= (u == v);
        if (!seen) out.push_back(v);
    }
    return out;
}

// Uniform draw among mixed vectors of exact combined weight w.
}  // namespace

MixedVector sample_weighted(std::size_t N, std::size_t M, std::size_t w, bool data_only,
                            Rng& rng) {
    static constexpr Pauli kErr[3] = {Pauli::X, Pauli::Y, Pauli::Z};
    std::size_t a = w;
    if (!data_only) {
        std::vector<double> counts(w + 1, 0.0);
        double total = 0.0;
        for (std::size_t cand = 0; cand <= w; ++cand) {
            counts[cand] = weight_split_count(N, M, w, cand);
            total += counts[cand];
        }
        if (total <= 0.0) throw std::invalid_argument("sample_weighted: weight out of range");
        double u = rng.next_double() * total;
        a = w;
        for (std::size_t cand = 0; cand <= w; ++cand) {
            u -= counts[cand];
            if (u < 0.0) {
                a = cand;
                break;
            }
        }
    } else if (w > N) {
        throw std::invalid_argument("sample_weighted: weight exceeds qubit count");
    }

    MixedVector out;
    out.pauli = PauliVector(N);
    out.bits.assign(M, 0);
    for (auto pos : sample_distinct(a, N, rng)) out.pauli[pos] = kErr[rng.next_below(3)];
    if (!data_only)
        for (auto pos : sample_distinct(w - a, M, rng)) out.bits[pos] = 1;
    return out;
}

// Uniform among all vectors of combined weight <= bound.
MixedVector sample_weight_at_most(std::size_t N, std::size_t M, std::size_t bound,
                                  bool data_only, Rng& rng) {
    std::vector<double> counts(bound + 1, 0.0);
    double total = 0.0;
    for (std::size_t w = 0; w <= bound; ++w) {
        double c = 0.0;
        if (data_only) {
            c = (w <= N) ? std::exp(log_choose(N, w) + static_cast<double>(w) * std::log(3.0))
                         : 0.0;
        } else {
            for (std::size_t a = 0; a <= w; ++a) c += weight_split_count(N, M, w, a);
        }
        counts[w] = c;
        total += c;
    }
    double u = rng.next_double() * total;
    std::size_t w = bound;
    for (std::size_t cand = 0; cand <= bound; ++cand) {
        u -= counts[cand];
        if (u < 0.0) {
            w = cand;
            break;
        }
    }
    return sample_weighted(N, M, w, data_only, rng);
}

namespace {

struct ShotResult {
    bool failure = false;
    DecodeStats stats;
};

}  // namespace

ExperimentRecord run_single_shot(const StabilizerCode& code, const BitMatrix& a,
                                 const SingleShotConfig& cfg) {
    if (cfg.trials == 0) throw std::invalid_argument("run_single_shot: trials must be >= 1");
    if (cfg.weight_exact && cfg.weight_at_most)
        throw std::invalid_argument("run_single_shot: choose one weight mode");
    WallClock clock(cfg.timing);

    const std::size_t n = code.n, m = code.num_checks();
    const bool flips_active = cfg.epsilon_b > 0.0 || (!cfg.data_only &&
                              (cfg.weight_exact || cfg.weight_at_most));

    GdsCheckMatrix decode_matrix;
    BitMatrix row_ops;
    GdsCheckMatrix measure_matrix;
    std::size_t m_bin = 0;
    if (flips_active) {
        SingleShotMatrices mats = single_shot_matrix(code.h, a);
        measure_matrix = std::move(mats.measurement);
        decode_matrix = std::move(mats.decoding);
        row_ops = std::move(mats.row_ops);
        m_bin = decode_matrix.binary_cols();
    } else {
        // Flip-free channel: decode the plain quaternary matrix directly.
        std::vector<std::vector<QuatEntry>> rows;
        rows.reserve(m);
        for (std::size_t i = 0; i < m; ++i) rows.push_back(code.h.row(i));
        decode_matrix = GdsCheckMatrix(n, 0, std::move(rows),
                                       std::vector<std::vector<std::uint32_t>>(m));
    }

    const double pe = cfg.prior_epsilon.value_or(cfg.epsilon);
    const double pb = cfg.prior_epsilon_b.value_or(cfg.epsilon_b);
    const LlrInit init =
        init_from_rates(n, m_bin, pe, pb, cfg.decoder.llr_clamp);

    auto one_trial = [&](std::uint64_t trial) {
        const TrialKey key{cfg.seed, trial};
        MixedVector err;
        if (cfg.weight_exact || cfg.weight_at_most) {
            Rng rng = key.stream(0, StreamKind::weight_shape);
            const std::size_t mcols = flips_active ? m_bin : 0;
            err = cfg.weight_exact
                      ? sample_weighted(n, mcols, *cfg.weight_exact, cfg.data_only, rng)
                      : sample_weight_at_most(n, mcols, *cfg.weight_at_most, cfg.data_only, rng);
        } else {
            Rng rd = key.stream(0, StreamKind::data_error);
            err.pauli = sample_depolarizing(n, cfg.epsilon, rd);
            if (flips_active) {
                Rng rf = key.stream(0, StreamKind::syndrome_flip);
                err.bits = sample_flips(m_bin, cfg.epsilon_b, rf);
            }
        }
        if (!flips_active) err.bits.assign(0, 0);

        Decoder dec(decode_matrix);
        ShotResult res;
        DecodeOutcome o;
        if (flips_active) {
            auto s_meas = measure_matrix.syndrome_of(err);
            BitVec sv(s_meas.size());
            for (std::size_t i = 0; i < s_meas.size(); ++i)
                if (s_meas[i]) sv.set(i, true);
            BitVec sd = row_ops.apply(sv);
            std::vector<std::uint8_t> s(sd.size(), 0);
            for (std::size_t i = 0; i < sd.size(); ++i) s[i] = sd.get(i) ? 1 : 0;
            o = dec.decode_ambp(s, init, cfg.decoder);
        } else {
            auto s = code.h.syndrome_of(err.pauli);
            o = dec.decode_ambp(s, init, cfg.decoder);
        }
        res.stats.add(o);

        if (!o.converged) {
            res.failure = true;
            return res;
        }
        PauliVector residual = pauli_product(err.pauli, o.estimate.pauli);
        res.failure = !code.is_stabilizer_equivalent(residual);
        return res;
    };

    auto results = run_trials_capped<ShotResult>(cfg.trials, cfg.failure_target, cfg.workers,
                                                 one_trial,
                                                 [](const ShotResult& r) { return r.failure; });

    DecodeStats stats;
    std::uint64_t failures = 0;
    for (const auto& rres : results) {
        stats.merge(rres.stats);
        if (rres.failure) ++failures;
    }

    ExperimentRecord rec;
    rec.code_id = code.id;
    rec.d = code.d.value_or(0);
    rec.r = 1;
    rec.epsilon = cfg.epsilon;
    rec.epsilon_b = cfg.epsilon_b;
    rec.trials = results.size();
    rec.failures = failures;
    rec.metric = static_cast<double>(failures) / static_cast<double>(results.size());
    rec.mean_iters = stats.mean_iters();
    rec.mean_alpha_star = stats.mean_alpha_star();
    rec.censored = 0;
    rec.wall_ms = clock.elapsed_ms();
    return rec;
}

// ---------------------------------------------------------------------------
// Bounded-distance reference and ansatz fit.

double bdd_rate(std::size_t N, std::size_t t, double eps) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("bdd_rate: eps out of [0, 1]");
    if (t >= N) return 0.0;
    if (eps == 0.0) return 0.0;
    if (eps == 1.0) return 1.0;
    const long double le = logl(static_cast<long double>(eps));
    const long double l1e = log1pl(static_cast<long double>(-eps));
    // Summing the failure tail directly avoids the cancellation that
    // 1 - (success sum) suffers when the tail is tiny.
    long double p = 0.0L;
    for (std::size_t j = t + 1; j <= N; ++j) {
        const long double lchoose = lgammal(static_cast<long double>(N) + 1.0L) -
                                    lgammal(static_cast<long double>(j) + 1.0L) -
                                    lgammal(static_cast<long double>(N - j) + 1.0L);
        p += expl(lchoose + static_cast<long double>(j) * le +
                  static_cast<long double>(N - j) * l1e);
    }
    if (p < 0.0L) p = 0.0L;
    if (p > 1.0L) p = 1.0L;
    return static_cast<double>(p);
}

AnsatzFitResult ansatz_fit(std::span<const AnsatzPoint> points, const AnsatzGrid& grid) {
    if (points.size() < 3) throw std::invalid_argument("ansatz_fit: need at least 3 points");
    const std::size_t nu_count =
        static_cast<std::size_t>(std::floor((grid.nu_max - grid.nu_min) / grid.nu_step + 0.5)) + 1;
    const std::size_t tau_count =
        static_cast<std::size_t>(std::floor((grid.tau_max - grid.tau_min) / grid.tau_step + 0.5)) +
        1;

    AnsatzFitResult best;
    best.mse = std::numeric_limits<double>::infinity();
    bool found = false;

    std::vector<double> x(points.size());
    for (std::size_t ni = 0; ni < nu_count; ++ni) {
        const double nu = grid.nu_min + static_cast<double>(ni) * grid.nu_step;
        for (std::size_t ti = 0; ti < tau_count; ++ti) {
            const double tau = grid.tau_min + static_cast<double>(ti) * grid.tau_step;
            for (std::size_t p = 0; p < points.size(); ++p)
                x[p] = std::pow(static_cast<double>(points[p].d), 1.0 / nu) *
                       (points[p].epsilon - tau);

            // Normal equations for y ~ c0 + c1 x + c2 x^2.
            double s[5] = {static_cast<double>(points.size()), 0, 0, 0, 0};
            double b[3] = {0, 0, 0};
            for (std::size_t p = 0; p < points.size(); ++p) {
                const double x1 = x[p], x2 = x1 * x1;
                s[1] += x1;
                s[2] += x2;
                s[3] += x2 * x1;
                s[4] += x2 * x2;
                b[0] += points[p].rate;
                b[1] += points[p].rate * x1;
                b[2] += points[p].rate * x2;
            }
            double mat[3][4] = {{s[0], s[1], s[2], b[0]},
                                {s[1], s[2], s[3], b[1]},
                                {s[2], s[3], s[4], b[2]}};
            double scale = 0.0;
            for (int rr = 0; rr < 3; ++rr)
                for (int cc = 0; cc < 3; ++cc) scale = std::max(scale, std::fabs(mat[rr][cc]));
            // Gaussian elimination with partial pivoting; the pivot cutoff is
            // relative to the matrix magnitude so rank-deficient systems (all
            // sample points sharing one abscissa) are rejected instead of
            // solved against rounding noise.
            const double pivot_floor = 1e-9 * std::max(scale, 1e-300);
            bool singular = false;
            for (int col = 0; col < 3 && !singular; ++col) {
                int piv = col;
                for (int rr = col + 1; rr < 3; ++rr)
                    if (std::fabs(mat[rr][col]) > std::fabs(mat[piv][col])) piv = rr;
                if (std::fabs(mat[piv][col]) < pivot_floor) {
                    singular = true;
                    break;
                }
                if (piv != col)
                    for (int cc = col; cc < 4; ++cc) std::swap(mat[piv][cc], mat[col][cc]);
                for (int rr = col + 1; rr < 3; ++rr) {
                    const double f = mat[rr][col] / mat[col][col];
                    for (int cc = col; cc < 4; ++cc) mat[rr][cc] -= f * mat[col][cc];
                }
            }
            if (singular) continue;
            double c[3];
            for (int rr = 2; rr >= 0; --rr) {
                double v = mat[rr][3];
                for (int cc = rr + 1; cc < 3; ++cc) v -= mat[rr][cc] * c[cc];
                c[rr] = v / mat[rr][rr];
            }
            double mse = 0.0;
            for (std::size_t p = 0; p < points.size(); ++p) {
                const double fit = c[0] + c[1] * x[p] + c[2] * x[p] * x[p];
                const double e = points[p].rate - fit;
                mse += e * e;
            }
            mse /= static_cast<double>(points.size());

            const bool better =
                mse < best.mse ||
                (mse == best.mse && (tau < best.tau || (tau == best.tau && nu < best.nu)));
            if (!found || better) {
                found = true;
                best.nu = nu;
                best.tau = tau;
                best.mse = mse;
                best.coeffs = {c[0], c[1], c[2]};
            }
        }
    }
    if (!found) throw std::invalid_argument("ansatz_fit: every grid point is degenerate");
    return best;
}

}  // namespace qds
