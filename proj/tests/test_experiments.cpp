#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "qds/experiments.hpp"

using namespace qds;

namespace {

// Reference tail of the binomial CDF via an extended-precision term
// recurrence.
long double binom_tail_ref(std::size_t N, std::size_t t, long double eps) {
    long double term = powl(1.0L - eps, static_cast<long double>(N));
    long double cum = term;
    for (std::size_t j = 1; j <= t && j <= N; ++j) {
        term *= (static_cast<long double>(N - j + 1) / static_cast<long double>(j)) *
                (eps / (1.0L - eps));
        cum += term;
    }
    return 1.0L - cum;
}

}  // namespace

TEST_CASE("decode statistics aggregation") {
    DecodeStats s;
    CHECK(s.mean_iters() == 0.0);
    CHECK(std::isnan(s.mean_alpha_star()));

    DecodeOutcome good;
    good.converged = true;
    good.iterations = 4;
    good.alpha_star = 0.8;
    DecodeOutcome bad;
    bad.converged = false;
    bad.iterations = 10;
    s.add(good);
    s.add(bad);
    CHECK(s.calls == 2);
    CHECK(s.converged == 1);
    CHECK(s.mean_iters() == doctest::Approx(7.0));
    CHECK(s.mean_alpha_star() == doctest::Approx(0.8));

    DecodeStats t;
    t.add(good);
    s.merge(t);
    CHECK(s.calls == 3);
    CHECK(s.mean_alpha_star() == doctest::Approx(0.8));

    DecodeStats none;
    none.add(bad);
    CHECK(std::isnan(none.mean_alpha_star()));
}

TEST_CASE("csv formatting") {
    CHECK(csv_header() ==
          "code,d,r,epsilon,epsilon_b,trials,failures,metric,mean_iters,mean_alpha_star,"
          "censored,wall_ms");

    ExperimentRecord rec;
    rec.code_id = "toric4";
    rec.d = 4;
    rec.r = 3;
    rec.epsilon = 0.01;
    rec.epsilon_b = 0.02;
    rec.trials = 10;
    rec.failures = 2;
    rec.metric = 0.5;
    rec.mean_iters = 1.0 / 3.0;
    rec.mean_alpha_star = std::nan("");
    rec.censored = 1;
    rec.wall_ms = 0;
    CHECK(to_csv_row(rec) == "toric4,4,3,0.01,0.02,10,2,0.5,0.333333333333,nan,1,0");
}

TEST_CASE("bounded-distance rate") {
    CHECK(bdd_rate(10, 10, 0.3) == 0.0);
    CHECK(bdd_rate(10, 12, 0.3) == 0.0);
    CHECK(bdd_rate(10, 3, 0.0) == 0.0);
    CHECK(bdd_rate(10, 3, 1.0) == 1.0);

    // t = 0 reduces to 1 - (1-eps)^N.
    CHECK(bdd_rate(20, 0, 0.05) ==
          doctest::Approx(1.0 - std::pow(0.95, 20.0)).epsilon(1e-14));

    for (auto [N, t, eps] : std::vector<std::tuple<std::size_t, std::size_t, double>>{
             {126, 4, 0.05}, {262, 12, 0.05}, {50, 3, 0.1}, {300, 20, 0.02}}) {
        long double want = binom_tail_ref(N, t, eps);
        CHECK(std::fabs(bdd_rate(N, t, eps) - static_cast<double>(want)) <=
              1e-12 * static_cast<double>(want));
    }

    CHECK(bdd_rate(126, 4, 0.06) > bdd_rate(126, 4, 0.05));
    CHECK(bdd_rate(126, 5, 0.05) < bdd_rate(126, 4, 0.05));
    CHECK(bdd_rate(200, 4, 0.05) > bdd_rate(126, 4, 0.05));
}

TEST_CASE("ansatz fit recovers a planted quadratic") {
    const double nu0 = 1.32, tau0 = 0.0357;
    const double a0 = 0.08, b0 = 1.9, c2 = 6.0;
    std::vector<AnsatzPoint> pts;
    for (std::size_t d : {4u, 6u, 8u}) {
        for (double eps : {0.031, 0.033, 0.0357, 0.038, 0.04}) {
            double x = std::pow(static_cast<double>(d), 1.0 / nu0) * (eps - tau0);
            pts.push_back({d, eps, a0 + b0 * x + c2 * x * x});
        }
    }
    auto fit = ansatz_fit(pts);
    CHECK(std::fabs(fit.nu - nu0) <= 0.01 + 1e-9);
    CHECK(std::fabs(fit.tau - tau0) <= 0.0001 + 1e-9);
    CHECK(fit.mse <= 1e-16);
    CHECK(fit.coeffs[0] == doctest::Approx(a0).epsilon(1e-6));
    CHECK(fit.coeffs[1] == doctest::Approx(b0).epsilon(1e-4));
    CHECK(fit.coeffs[2] == doctest::Approx(c2).epsilon(1e-3));

    auto again = ansatz_fit(pts);
    CHECK(again.nu == fit.nu);
    CHECK(again.tau == fit.tau);
    CHECK(again.mse == fit.mse);
}

TEST_CASE("ansatz fit rejects unusable inputs") {
    std::vector<AnsatzPoint> two = {{4, 0.03, 0.1}, {6, 0.03, 0.2}};
    CHECK_THROWS_AS(ansatz_fit(two), std::invalid_argument);

    // Identical abscissas everywhere: singular at every grid point.
    std::vector<AnsatzPoint> flat = {{4, 0.03, 0.1}, {4, 0.03, 0.12}, {4, 0.03, 0.11}};
    CHECK_THROWS_AS(ansatz_fit(flat), std::invalid_argument);
}

TEST_CASE("weight-conditioned samples are uniform") {
    Rng rng(31337);
    // n=2, m=1, w=1: six single-qubit symbols plus one flip, all equally
    // likely.
    std::map<std::string, std::size_t> counts;
    const std::size_t draws = 7000;
    for (std::size_t i = 0; i < draws; ++i) {
        auto v = sample_weighted(2, 1, 1, false, rng);
        std::size_t wq = v.pauli.weight(), wb = 0;
        for (auto b : v.bits) wb += b;
        REQUIRE(wq + wb == 1);
        counts[v.pauli.str() + (v.bits[0] ? "1" : "0")]++;
    }
    CHECK(counts.size() == 7);
    for (const auto& [key, c] : counts)
        CHECK(std::fabs(static_cast<double>(c) - 1000.0) <= 150.0);

    // Bound mode: n=1, m=1, bound=1 gives five equally likely vectors
    // including the empty one.
    std::map<std::string, std::size_t> at_most;
    for (std::size_t i = 0; i < 5000; ++i) {
        auto v = sample_weight_at_most(1, 1, 1, false, rng);
        std::size_t w = v.pauli.weight();
        for (auto b : v.bits) w += b;
        REQUIRE(w <= 1);
        at_most[v.pauli.str() + (v.bits[0] ? "1" : "0")]++;
    }
    CHECK(at_most.size() == 5);
    for (const auto& [key, c] : at_most)
        CHECK(std::fabs(static_cast<double>(c) - 1000.0) <= 150.0);

    // data_only keeps the binary part clean.
    for (std::size_t i = 0; i < 50; ++i) {
        auto v = sample_weighted(3, 5, 2, true, rng);
        CHECK(v.pauli.weight() == 2);
        for (auto b : v.bits) CHECK(b == 0);
    }

    CHECK_THROWS_AS(sample_weighted(1, 0, 2, true, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_weighted(0, 2, 3, false, rng), std::invalid_argument);
}

TEST_CASE("memory campaign censors noiseless runs") {
    auto code = rotated_toric(2);
    MemoryConfig cfg;
    cfg.rounds = 3;
    cfg.epsilon = 0.0;
    cfg.epsilon_b = 0.0;
    cfg.max_cycles = 5;
    cfg.trials = 3;
    cfg.seed = 7;

    auto one = sustain_time(code, cfg, 0);
    CHECK(one.censored);
    CHECK(one.rounds_survived == 1 + 5 * 3);
    CHECK(one.stats.calls == 10);  // readout + repeat decoders per cycle
    CHECK(one.stats.converged == 10);

    auto rec = run_memory(code, cfg);
    CHECK(rec.code_id == "toric2");
    CHECK(rec.d == 2);
    CHECK(rec.r == 3);
    CHECK(rec.trials == 3);
    CHECK(rec.failures == 0);
    CHECK(rec.censored == 3);
    CHECK(rec.metric == doctest::Approx(1.0 / 16.0));
    CHECK(rec.mean_iters == doctest::Approx(1.0));
    CHECK(rec.mean_alpha_star == doctest::Approx(1.0));
    CHECK(rec.wall_ms == 0);
}

TEST_CASE("memory campaign fails fast under heavy noise") {
    auto code = rotated_toric(2);
    MemoryConfig cfg;
    cfg.rounds = 2;
    cfg.epsilon = 0.4;
    cfg.epsilon_b = 0.1;
    cfg.max_cycles = 50;
    cfg.trials = 10;
    cfg.seed = 3;
    cfg.decoder.t_max = 12;
    cfg.decoder.alphas = {1.0, 0.6};

    auto rec = run_memory(code, cfg);
    CHECK(rec.censored == 0);
    CHECK(rec.failures == 10);
    CHECK(rec.metric > 0.0);
    CHECK(rec.metric <= 1.0);
}

TEST_CASE("failure target stops campaigns at a deterministic trial") {
    auto code = rotated_toric(2);
    MemoryConfig cfg;
    cfg.rounds = 2;
    cfg.epsilon = 0.4;
    cfg.epsilon_b = 0.1;
    cfg.max_cycles = 50;
    cfg.trials = 200;
    cfg.failure_target = 4;
    cfg.seed = 3;
    cfg.decoder.t_max = 12;
    cfg.decoder.alphas = {1.0, 0.6};

    auto rec = run_memory(code, cfg);
    CHECK(rec.failures == 4);
    CHECK(rec.trials >= 4);
    CHECK(rec.trials < 200);

    // The stop point depends only on per-trial outcomes, not on scheduling.
    cfg.workers = 3;
    CHECK(to_csv_row(run_memory(code, cfg)) == to_csv_row(rec));

    // The trial cap still applies when the target is out of reach.
    MemoryConfig calm = cfg;
    calm.workers = 1;
    calm.epsilon = 0.0;
    calm.epsilon_b = 0.0;
    calm.max_cycles = 3;
    calm.trials = 6;
    auto censored = run_memory(code, calm);
    CHECK(censored.trials == 6);
    CHECK(censored.failures == 0);
    CHECK(censored.censored == 6);

    CHECK_THROWS_AS(
        [&] {
            MemoryConfig zero = cfg;
            zero.failure_target = 0;
            run_memory(code, zero);
        }(),
        std::invalid_argument);

    SingleShotConfig shot;
    shot.epsilon = 0.35;
    shot.epsilon_b = 0.1;
    shot.trials = 500;
    shot.failure_target = 3;
    shot.seed = 90;
    shot.decoder.t_max = 10;
    shot.decoder.alphas = {1.0, 0.5};
    BitMatrix a(1, code.num_checks());
    a.set(0, 0, true);
    a.set(0, 1, true);

    auto s1 = run_single_shot(code, a, shot);
    CHECK(s1.failures == 3);
    CHECK(s1.trials < 500);
    shot.workers = 4;
    CHECK(to_csv_row(run_single_shot(code, a, shot)) == to_csv_row(s1));
}

TEST_CASE("memory campaign is worker-count independent") {
    auto code = rotated_toric(2);
    MemoryConfig cfg;
    cfg.rounds = 2;
    cfg.epsilon = 0.15;
    cfg.epsilon_b = 0.1;
    cfg.max_cycles = 30;
    cfg.trials = 9;
    cfg.seed = 21;
    cfg.decoder.t_max = 10;
    cfg.decoder.alphas = {1.0, 0.5};

    auto w1 = run_memory(code, cfg);
    cfg.workers = 2;
    auto w2 = run_memory(code, cfg);
    cfg.workers = 4;
    auto w4 = run_memory(code, cfg);
    CHECK(to_csv_row(w1) == to_csv_row(w2));
    CHECK(to_csv_row(w1) == to_csv_row(w4));

    CHECK_THROWS_AS(
        [&] {
            MemoryConfig zero = cfg;
            zero.trials = 0;
            run_memory(code, zero);
        }(),
        std::invalid_argument);
}

TEST_CASE("single-shot campaign on clean weight-zero draws") {
    auto code = rotated_toric(2);
    BitMatrix a(1, code.num_checks());
    a.set(0, 0, true);
    a.set(0, 1, true);

    SingleShotConfig cfg;
    cfg.trials = 10;
    cfg.weight_at_most = 0;
    cfg.prior_epsilon = 0.01;
    cfg.prior_epsilon_b = 0.01;
    auto rec = run_single_shot(code, a, cfg);
    CHECK(rec.trials == 10);
    CHECK(rec.failures == 0);
    CHECK(rec.metric == 0.0);
    CHECK(rec.mean_iters == doctest::Approx(1.0));
    CHECK(rec.r == 1);
    CHECK(rec.censored == 0);
    CHECK(rec.wall_ms == 0);
}

TEST_CASE("single-shot campaign corrects single data errors without flips") {
    auto code = rotated_toric(4);
    BitMatrix a(1, code.num_checks());
    a.set(0, 0, true);

    SingleShotConfig cfg;
    cfg.trials = 60;
    cfg.weight_exact = 1;
    cfg.data_only = true;
    cfg.prior_epsilon = 0.01;
    cfg.decoder.t_max = 20;
    cfg.decoder.alphas = {1.0, 0.8, 0.6, 0.5};
    auto rec = run_single_shot(code, a, cfg);
    CHECK(rec.failures == 0);
    CHECK(rec.metric == 0.0);
}

TEST_CASE("single-shot campaign is worker-count independent") {
    auto code = rotated_toric(2);
    BitMatrix a(1, code.num_checks());
    a.set(0, 0, true);
    a.set(0, 2, true);

    SingleShotConfig cfg;
    cfg.epsilon = 0.05;
    cfg.epsilon_b = 0.05;
    cfg.trials = 12;
    cfg.seed = 5;
    cfg.decoder.t_max = 10;
    cfg.decoder.alphas = {1.0, 0.7};

    auto w1 = run_single_shot(code, a, cfg);
    cfg.workers = 3;
    auto w3 = run_single_shot(code, a, cfg);
    CHECK(to_csv_row(w1) == to_csv_row(w3));

    SingleShotConfig bad = cfg;
    bad.weight_exact = 1;
    bad.weight_at_most = 2;
    CHECK_THROWS_AS(run_single_shot(code, a, bad), std::invalid_argument);
    bad = cfg;
    bad.trials = 0;
    CHECK_THROWS_AS(run_single_shot(code, a, bad), std::invalid_argument);
}
