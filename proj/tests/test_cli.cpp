#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "qds/check_matrix.hpp"
#include "qds/codes.hpp"
#include "qds/experiments.hpp"
#include "qds/pauli.hpp"

using namespace qds;

namespace {

std::string data_path(const std::string& name) {
    return std::string(QDS_DATA_DIR) + "/" + name;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("qds_cli_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

TempDir& tmp() {
    static TempDir dir;
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string out_path = tmp().file("last_stdout.txt");
    const std::string cmd =
        std::string(QDS_CLI_PATH) + " " + args + " > " + out_path + " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    return r;
}

std::map<std::string, std::string> parse_report(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

// GF(2) rank of the symplectic (x|z) image, dense and independent of the
// library's elimination code.
std::size_t symplectic_rank(const QuaternaryCheckMatrix& h) {
    const std::size_t n = h.num_cols();
    std::vector<std::vector<int>> rows;
    for (std::size_t i = 0; i < h.num_rows(); ++i) {
        std::vector<int> r(2 * n, 0);
        for (const auto& e : h.row(i)) {
            r[e.col] = x_bit(e.sym);
            r[n + e.col] = z_bit(e.sym);
        }
        rows.push_back(std::move(r));
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < 2 * n && rank < rows.size(); ++col) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][col] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[rank], rows[piv]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i != rank && rows[i][col]) {
                for (std::size_t j = 0; j < 2 * n; ++j) rows[i][j] ^= rows[rank][j];
            }
        }
        ++rank;
    }
    return rank;
}

}  // namespace

TEST_CASE("build writes a toric code file with the right rank") {
    const std::string out = tmp().file("t4.chk");
    auto r = run_cli("build --code toric:4 --out " + out);
    REQUIRE(r.exit_code == 0);

    ChkFile f = read_chk_file(out);
    CHECK(f.matrix.num_rows() == 16);
    CHECK(f.matrix.num_cols() == 16);
    CHECK(f.meta_id == std::string("toric4"));
    CHECK(f.meta_k == 2);
    CHECK(f.meta_d == 4);
    CHECK(symplectic_rank(f.matrix) == 14);

    // Resolved configuration lands next to the output.
    const std::string cfg = slurp(out + ".config");
    CHECK(cfg.find("subcommand=build") != std::string::npos);
    CHECK(cfg.find("code=toric:4") != std::string::npos);
}

TEST_CASE("build rejects an odd toric size") {
    auto r = run_cli("build --code toric:3");
    CHECK(r.exit_code == 1);
}

TEST_CASE("build prints the girth of the expanded quasi-cyclic case") {
    auto r = run_cli("build --qc " + data_path("qc_case1.qc") + " --with-identity --girth");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "8\n");
}

TEST_CASE("build searches quasi-cyclic bases and reports infeasible targets") {
    const std::string out = tmp().file("found.qc");
    auto r = run_cli("build --qc-search 2 2 5 8 200 --seed 99 --with-identity --girth "
                     "--out " + out);
    REQUIRE(r.exit_code == 0);
    CHECK(std::stoul(r.out) >= 8);
    auto spec = read_qc_file(out);
    CHECK(spec.gamma == 2);
    CHECK(spec.rho == 2);
    CHECK(spec.c == 5);

    auto bad = run_cli("build --qc-search 2 2 5 100 5 --seed 1");
    CHECK(bad.exit_code == 3);
}

TEST_CASE("build emits the single-shot matrix pair") {
    const std::string qc = tmp().file("tiny.qc");
    std::ofstream(qc) << "QC 1 2 2\n0 1\n";
    const std::string stem = tmp().file("ss_t2");
    auto r = run_cli("build --code toric:2 --single-shot --redundancy " + qc + " --out " +
                     stem);
    REQUIRE(r.exit_code == 0);

    GdsCheckMatrix measure = read_gds_file(stem + ".measure.gds");
    GdsCheckMatrix decode = read_gds_file(stem + ".decode.gds");
    CHECK(measure.num_rows() == 6);  // 4 checks + 2 redundant combinations
    CHECK(measure.quaternary_cols() == 4);
    CHECK(measure.binary_cols() == 6);
    CHECK(decode.num_rows() == 6);
    // The redundant rows of the decoding form have no quaternary support.
    CHECK(decode.quat_row(4).empty());
    CHECK(decode.quat_row(5).empty());

    const std::string rowops = slurp(stem + ".rowops.txt");
    CHECK(rowops.size() == 6 * 7);  // six lines of six bits plus newlines
}

TEST_CASE("build exports a DOT view") {
    const std::string dot = tmp().file("t2.dot");
    auto r = run_cli("build --code toric:2 --dot " + dot);
    REQUIRE(r.exit_code == 0);
    const std::string text = slurp(dot);
    CHECK(text.find("graph tanner {") != std::string::npos);
    CHECK(text.find("E0 [shape=circle]") != std::string::npos);
}

TEST_CASE("decode returns the identity on a zero syndrome in one iteration") {
    const std::string chk = tmp().file("dec_t4.chk");
    REQUIRE(run_cli("build --code toric:4 --out " + chk).exit_code == 0);

    auto r = run_cli("decode --matrix " + chk + " --syndrome 0000000000000000");
    REQUIRE(r.exit_code == 0);
    auto kv = parse_report(r.out);
    CHECK(kv["converged"] == "true");
    CHECK(kv["iterations"] == "1");
    CHECK(kv["estimate_pauli"] == std::string(16, 'I'));
    CHECK(kv["estimate_weight"] == "0");
}

TEST_CASE("decode matches the syndrome on a mixed-alphabet instance") {
    // Two commuting checks with one flip variable per row: [H | I].
    auto h = QuaternaryCheckMatrix::from_strings(std::vector<std::string>{"XYI", "ZZY"});
    GdsCheckMatrix ds = ds_matrix(h);
    const std::string path = tmp().file("example.gds");
    write_gds_file(path, ds);

    // Syndrome of a single X on qubit 1: both checks anticommute with it.
    PauliVector err = PauliVector::from_string("IXI");
    MixedVector truth{err, {0, 0}};
    auto s = ds.syndrome_of(truth);
    std::string sbits;
    for (auto b : s) sbits += static_cast<char>('0' + b);
    REQUIRE(sbits == "11");

    auto r = run_cli("decode --matrix " + path + " --syndrome " + sbits +
                     " --epsilon 0.05 --epsilon-b 0.01 --schedule serial");
    REQUIRE(r.exit_code == 0);
    auto kv = parse_report(r.out);
    REQUIRE(kv["converged"] == "true");

    MixedVector est{PauliVector::from_string(kv["estimate_pauli"]), {}};
    for (char c : kv["estimate_flips"]) est.bits.push_back(c == '1' ? 1 : 0);
    CHECK(ds.syndrome_of(est) == s);
}

TEST_CASE("decode writes a belief dump on request") {
    const std::string chk = tmp().file("dump_t2.chk");
    REQUIRE(run_cli("build --code toric:2 --out " + chk).exit_code == 0);
    const std::string dump = tmp().file("llrs.txt");
    auto r = run_cli("decode --matrix " + chk + " --syndrome 0000 --llr-dump " + dump);
    REQUIRE(r.exit_code == 0);
    std::istringstream ss(slurp(dump));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(ss, line)) ++lines;
    CHECK(lines == 12);  // 3 beliefs per qubit, no binary columns
}

TEST_CASE("decode reports parse failures with the data exit code") {
    const std::string bad = tmp().file("bad.chk");
    std::ofstream(bad) << "CHK 2 zz\nnot a row\n";
    CHECK(run_cli("decode --matrix " + bad + " --syndrome 00").exit_code == 2);
    CHECK(run_cli("decode --matrix " + tmp().file("absent.chk") + " --syndrome 00")
              .exit_code == 2);

    // Wrong syndrome length is a usage error.
    const std::string chk = tmp().file("len_t2.chk");
    REQUIRE(run_cli("build --code toric:2 --out " + chk).exit_code == 0);
    CHECK(run_cli("decode --matrix " + chk + " --syndrome 00").exit_code == 1);
}

TEST_CASE("memory censors every noiseless trial") {
    auto r = run_cli("memory --code toric:4 --epsilon 0 --trials 3 --max-cycles 10");
    REQUIRE(r.exit_code == 0);
    std::istringstream ss(r.out);
    std::string header, row;
    REQUIRE(std::getline(ss, header));
    REQUIRE(std::getline(ss, row));
    CHECK(header == csv_header());
    // 10 cycles of 3 rounds survive from the starting round: 1/31 per trial.
    CHECK(row == "toric4,4,3,0,0,3,0,0.0322580645161,1,1,3,0");
}

TEST_CASE("memory runs are byte-identical across repeats and worker counts") {
    const std::string base =
        "memory --code toric:2 --rounds 2 --epsilon 0.15 --epsilon-b 0.1 "
        "--max-cycles 20 --trials 8 --seed 21 --tmax 8 --alpha-start 1.0 "
        "--alpha-end 0.5 --alpha-step 0.5 ";
    const std::string o1 = tmp().file("w1.csv"), o2 = tmp().file("w2.csv"),
                      o3 = tmp().file("again.csv");
    REQUIRE(run_cli(base + "--workers 1 --out " + o1).exit_code == 0);
    REQUIRE(run_cli(base + "--workers 2 --out " + o2).exit_code == 0);
    REQUIRE(run_cli(base + "--workers 1 --out " + o3).exit_code == 0);
    const std::string b1 = slurp(o1);
    CHECK(!b1.empty());
    CHECK(b1 == slurp(o2));
    CHECK(b1 == slurp(o3));
}

TEST_CASE("config files mirror flags and flags override them") {
    const std::string cfg = tmp().file("mem.cfg");
    std::ofstream(cfg) << "code=toric:2\nrounds=2\nepsilon=0.15\nepsilon-b=0.1\n"
                          "max-cycles=20\ntrials=8\nseed=21\ntmax=8\n"
                          "alpha-start=1.0\nalpha-end=0.5\nalpha-step=0.5\n";
    const std::string flags_out = tmp().file("flags.csv");
    const std::string cfg_out = tmp().file("fromcfg.csv");
    const std::string override_out = tmp().file("override.csv");

    REQUIRE(run_cli("memory --code toric:2 --rounds 2 --epsilon 0.15 --epsilon-b 0.1 "
                    "--max-cycles 20 --trials 8 --seed 21 --tmax 8 --alpha-start 1.0 "
                    "--alpha-end 0.5 --alpha-step 0.5 --out " +
                    flags_out)
                .exit_code == 0);
    REQUIRE(run_cli("memory --config " + cfg + " --out " + cfg_out).exit_code == 0);
    CHECK(slurp(flags_out) == slurp(cfg_out));

    REQUIRE(run_cli("memory --config " + cfg + " --seed 99 --out " + override_out)
                .exit_code == 0);
    CHECK(slurp(flags_out) != slurp(override_out));

    // The provenance file written by a run is itself a usable config.
    const std::string replay_out = tmp().file("replay.csv");
    REQUIRE(run_cli("memory --config " + flags_out + ".config --out " + replay_out)
                .exit_code == 0);
    CHECK(slurp(flags_out) == slurp(replay_out));

    CHECK(run_cli("memory --config " + tmp().file("no.cfg")).exit_code == 2);
}

TEST_CASE("singleshot corrects weight-one data errors through the pipeline") {
    auto r = run_cli("singleshot --code toric:4 --weight 1 --data-only "
                     "--prior-epsilon 0.01 --trials 48 --seed 5 --tmax 20");
    REQUIRE(r.exit_code == 0);
    std::istringstream ss(r.out);
    std::string header, row;
    REQUIRE(std::getline(ss, header));
    REQUIRE(std::getline(ss, row));
    // code,d,r,eps,eps_b,trials,failures,...
    CHECK(row.find("toric4,4,1,0,0,48,0,0,") == 0);
}

TEST_CASE("singleshot with redundant checks stays deterministic across workers") {
    const std::string base =
        "singleshot --code gb102 --redundancy " + data_path("qc_case1.qc") +
        " --weight-at-most 3 --prior-epsilon 0.001 --prior-epsilon-b 0.005 "
        "--trials 12 --seed 7 --tmax 30 --alpha-start 1.4 --alpha-end 0.4 "
        "--alpha-step 0.2 ";
    const std::string o1 = tmp().file("ss1.csv"), o2 = tmp().file("ss2.csv");
    REQUIRE(run_cli(base + "--workers 1 --out " + o1).exit_code == 0);
    REQUIRE(run_cli(base + "--workers 2 --out " + o2).exit_code == 0);
    const std::string b1 = slurp(o1);
    CHECK(!b1.empty());
    CHECK(b1 == slurp(o2));
}

TEST_CASE("fit recovers a planted quadratic from CSV records") {
    // Rows follow the scaling form rate = c0 + c1 x + c2 x^2 with
    // x = d^(1/nu0) (eps - tau0).
    const double nu0 = 1.32, tau0 = 0.0357;
    std::ostringstream csv;
    csv << "code,d,r,epsilon,epsilon_b,trials,failures,metric,mean_iters,"
           "mean_alpha_star,censored,wall_ms\n";
    for (std::size_t d : {4, 6, 8}) {
        for (double e : {0.02, 0.03, 0.04, 0.05}) {
            const double x = std::pow(static_cast<double>(d), 1.0 / nu0) * (e - tau0);
            const double y = 0.08 + 1.9 * x + 6.0 * x * x;
            csv << "toric" << d << "," << d << ",3," << e << "," << e << ",1000,10," << y
                << ",5,1,0,0\n";
        }
    }
    const std::string path = tmp().file("fit_input.csv");
    std::ofstream(path) << csv.str();

    auto r = run_cli("fit --in " + path);
    REQUIRE(r.exit_code == 0);
    std::istringstream ss(r.out);
    std::map<std::string, double> vals;
    std::string tok;
    while (ss >> tok) {
        const auto eq = tok.find('=');
        REQUIRE(eq != std::string::npos);
        vals[tok.substr(0, eq)] = std::stod(tok.substr(eq + 1));
    }
    CHECK(std::fabs(vals["nu"] - nu0) <= 0.01 + 1e-12);
    CHECK(std::fabs(vals["tau"] - tau0) <= 0.0001 + 1e-12);
    CHECK(vals["mse"] < 1e-12);

    // A single record cannot pin the three coefficients.
    const std::string one = tmp().file("one_row.csv");
    std::ofstream(one) << "code,d,r,epsilon,epsilon_b,trials,failures,metric,mean_iters,"
                          "mean_alpha_star,censored,wall_ms\n"
                          "toric4,4,3,0.03,0.03,10,1,0.1,2,1,0,0\n";
    CHECK(run_cli("fit --in " + one).exit_code == 3);
    CHECK(run_cli("fit --in " + tmp().file("absent.csv")).exit_code == 2);
}
