#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qds/check_matrix.hpp"
#include "qds/codes.hpp"
#include "qds/decoder.hpp"
#include "qds/experiments.hpp"
#include "qds/gf2.hpp"
#include "qds/noise.hpp"
#include "qds/pauli.hpp"

namespace {

using namespace qds;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInfeasible = 3;

// Bad flag combinations or values detected past CLI11's own checks.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A well-formed request with no solution (exhausted search, degenerate fit).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Fully-resolved run parameters, written alongside results. Keys mirror the
// long flag names, so the file is itself a valid --config input.
class ResolvedConfig {
  public:
    void add(const std::string& key, const std::string& v) {
        lines_ += key + "=" + v + "\n";
    }
    void add(const std::string& key, const char* v) { add(key, std::string(v)); }
    void add(const std::string& key, double v) { add(key, fmt_g(v)); }
    void add(const std::string& key, std::uint64_t v) { add(key, std::to_string(v)); }
    void add(const std::string& key, int v) { add(key, std::to_string(v)); }
    void add(const std::string& key, bool v) { add(key, std::string(v ? "true" : "false")); }

    template <typename T>
    void add_opt(const std::string& key, const std::optional<T>& v) {
        if (v) add(key, *v);
    }

    // With an output path the config lands in <path>.config; otherwise it
    // goes to stderr so stdout stays clean for results.
    void emit(const std::optional<std::string>& out_path) const {
        if (!out_path) {
            std::cerr << lines_;
            return;
        }
        const std::string path = *out_path + ".config";
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << lines_;
    }

  private:
    std::string lines_;
};

std::string trim_ws(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// CLI11 applies config files only on the top-level app, where flat keys would
// need section prefixes. To keep the documented flat key=value format, the
// file named by --config is expanded here into synthetic flags placed right
// after the subcommand name; keys already given on the command line are
// dropped, so explicit flags win.
std::vector<std::string> with_config_applied(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    std::size_t sub_pos = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub_pos = i;
            break;
        }
    }
    if (sub_pos == args.size()) return args;

    std::string config_path;
    std::set<std::string> given;
    for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
        const std::string& t = args[i];
        if (t == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (t.rfind("--config=", 0) == 0)
            config_path = t.substr(9);
        if (t.size() > 2 && t[0] == '-' && t[1] == '-')
            given.insert(t.substr(2, t.find('=') - 2));
    }
    if (config_path.empty()) return args;

    std::ifstream f(config_path);
    if (!f) throw ParseError("cannot open " + config_path);

    // One explicit flag of an exclusive pair suppresses the other's file key.
    auto suppressed = [&](const std::string& key) {
        if (key == "epsilon-b" && given.count("eta")) return true;
        if (key == "eta" && given.count("epsilon-b")) return true;
        if (key == "weight" && given.count("weight-at-most")) return true;
        if (key == "weight-at-most" && given.count("weight")) return true;
        return false;
    };

    std::vector<std::string> injected;
    std::string line;
    while (std::getline(f, line)) {
        line = trim_ws(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(config_path + ": expected key=value, got: " + line);
        const std::string key = trim_ws(line.substr(0, eq));
        const std::string value = trim_ws(line.substr(eq + 1));
        if (key.empty())
            throw ParseError(config_path + ": empty key in: " + line);
        // subcommand= lines let resolved-config files round-trip as inputs.
        if (key == "config" || key == "subcommand") continue;
        if (value.empty() || given.count(key) || suppressed(key)) continue;

        std::istringstream vs(value);
        std::vector<std::string> parts{std::istream_iterator<std::string>(vs),
                                       std::istream_iterator<std::string>()};
        if (parts.size() <= 1) {
            injected.push_back("--" + key + "=" + value);
        } else {
            injected.push_back("--" + key);
            injected.insert(injected.end(), parts.begin(), parts.end());
        }
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, injected.begin(),
                injected.end());
    return args;
}

std::size_t parse_size(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        unsigned long v = std::stoul(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string("bad ") + what + ": " + s);
    }
}

// --- shared flag groups ------------------------------------------------------

struct NoiseArgs {
    double epsilon = 0.0;
    std::optional<double> epsilon_b;
    std::optional<double> eta;
};

void add_noise_flags(CLI::App* sub, NoiseArgs& a, double epsilon_default) {
    a.epsilon = epsilon_default;
    sub->add_option("--epsilon", a.epsilon, "depolarizing rate per round")
        ->capture_default_str();
    auto* eb = sub->add_option("--epsilon-b", a.epsilon_b,
                               "syndrome-flip rate (default: the epsilon value)");
    sub->add_option("--eta", a.eta, "flip-rate ratio: epsilon-b = eta * epsilon")
        ->excludes(eb);
}

double resolved_epsilon_b(const NoiseArgs& a) {
    if (a.eta) return *a.eta * a.epsilon;
    return a.epsilon_b.value_or(a.epsilon);
}

struct DecoderArgs {
    int tmax = 50;
    double alpha = 1.0;
    std::optional<double> alpha_start;
    std::optional<double> alpha_end;
    double alpha_step = 0.1;
    std::string schedule = "parallel";
    std::optional<double> fixed_init;
};

void add_decoder_flags(CLI::App* sub, DecoderArgs& a) {
    sub->add_option("--tmax", a.tmax, "iteration cap per decode")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--alpha", a.alpha, "message-normalization parameter")
        ->capture_default_str();
    auto* as = sub->add_option("--alpha-start", a.alpha_start,
                               "first alpha of the adaptive sweep (enables the sweep)");
    sub->add_option("--alpha-end", a.alpha_end, "last alpha of the adaptive sweep")
        ->needs(as);
    sub->add_option("--alpha-step", a.alpha_step, "sweep decrement")
        ->capture_default_str();
    sub->add_option("--schedule", a.schedule, "message-update order")
        ->check(CLI::IsMember({"parallel", "serial"}))
        ->capture_default_str();
    sub->add_option("--fixed-init", a.fixed_init,
                    "substitute this rate for both prior alphabets");
}

DecoderConfig decoder_config(const DecoderArgs& a) {
    DecoderConfig cfg;
    cfg.t_max = a.tmax;
    cfg.schedule = (a.schedule == "serial") ? Schedule::serial : Schedule::parallel;
    if (a.alpha_start) {
        if (!a.alpha_end) throw UsageError("--alpha-start needs --alpha-end");
        cfg.alphas = alpha_sweep(*a.alpha_start, *a.alpha_end, a.alpha_step);
    } else {
        cfg.alphas = {a.alpha};
    }
    return cfg;
}

void record_decoder(ResolvedConfig& rc, const DecoderArgs& a) {
    rc.add("tmax", a.tmax);
    if (a.alpha_start) {
        rc.add("alpha-start", *a.alpha_start);
        rc.add("alpha-end", *a.alpha_end);
        rc.add("alpha-step", a.alpha_step);
    } else {
        rc.add("alpha", a.alpha);
    }
    rc.add("schedule", a.schedule);
    rc.add_opt("fixed-init", a.fixed_init);
}

// --- loading helpers ---------------------------------------------------------

StabilizerCode load_code_spec(const std::string& spec) {
    if (spec.rfind("toric:", 0) == 0)
        return rotated_toric(parse_size(spec.substr(6), "toric size"));
    if (spec == "gb126") return gb_code_126();
    if (spec == "gb102") return gb_code_102();
    return load_stabilizer_code(spec);
}

BitMatrix load_redundancy(const std::string& path) {
    return quasi_cyclic(read_qc_file(path));
}

GdsCheckMatrix as_mixed(const QuaternaryCheckMatrix& h) {
    std::vector<std::vector<QuatEntry>> rows;
    rows.reserve(h.num_rows());
    for (std::size_t i = 0; i < h.num_rows(); ++i) rows.push_back(h.row(i));
    return GdsCheckMatrix(h.num_cols(), 0, std::move(rows),
                          std::vector<std::vector<std::uint32_t>>(h.num_rows()));
}

// Accepts either matrix format, sniffed from the first content line.
GdsCheckMatrix load_mixed_matrix(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    std::string text = buf.str();

    std::istringstream scan(text);
    std::string line, tok;
    while (std::getline(scan, line)) {
        std::istringstream ls(line);
        if (!(ls >> tok) || tok[0] == '#') continue;
        std::istringstream body(text);
        if (tok == "GDS") return read_gds(body);
        if (tok == "CHK") return as_mixed(read_chk(body).matrix);
        break;
    }
    throw ParseError(path + ": expected a CHK or GDS header");
}

std::string code_metadata_line(const StabilizerCode& code) {
    std::string meta = "id=" + code.id + " k=" + std::to_string(code.k);
    if (code.d) meta += " d=" + std::to_string(*code.d);
    return meta;
}

void write_csv_record(const ExperimentRecord& rec, const std::optional<std::string>& out,
                      const ResolvedConfig& rc) {
    const std::string text = csv_header() + "\n" + to_csv_row(rec) + "\n";
    if (out) {
        std::ofstream f(*out);
        if (!f) throw std::runtime_error("cannot write " + *out);
        f << text;
    } else {
        std::cout << text;
    }
    rc.emit(out);
}

// --- build -------------------------------------------------------------------

struct BuildArgs {
    std::optional<std::string> code;
    std::optional<std::string> gds_form;
    bool readout = false;
    std::size_t rounds = 1;
    std::optional<std::string> qc;
    std::optional<std::size_t> c_override;
    bool with_identity = false;
    std::vector<std::uint64_t> qc_search;  // gamma rho c girth attempts
    bool single_shot = false;
    std::optional<std::string> redundancy;
    std::uint64_t seed = 1;
    bool print_girth = false;
    std::optional<std::string> dot;
    std::optional<std::string> out;
};

int cmd_build(const BuildArgs& a) {
    const int sources = (a.code ? 1 : 0) + (a.qc ? 1 : 0) + (a.qc_search.empty() ? 0 : 1);
    if (sources != 1)
        throw UsageError("build needs exactly one of --code, --qc, --qc-search");

    ResolvedConfig rc;
    rc.add("subcommand", "build");

    GdsCheckMatrix graph_matrix;
    if (a.qc) {
        QuasiCyclicSpec spec = read_qc_file(*a.qc);
        if (a.c_override) spec.c = *a.c_override;
        graph_matrix = gds_from_binary(quasi_cyclic(spec), a.with_identity);
        if (a.out) write_gds_file(*a.out, graph_matrix, {});
        rc.add("qc", *a.qc);
        rc.add_opt("c", a.c_override ? std::optional<std::uint64_t>(*a.c_override)
                                     : std::nullopt);
        rc.add("with-identity", a.with_identity);
    } else if (!a.qc_search.empty()) {
        if (a.qc_search.size() != 5)
            throw UsageError("--qc-search takes gamma rho c girth attempts");
        auto found = random_qc_search(a.qc_search[0], a.qc_search[1], a.qc_search[2],
                                      a.qc_search[3], a.qc_search[4], a.seed,
                                      a.with_identity);
        if (!found)
            throw InfeasibleError("quasi-cyclic search exhausted its attempts");
        graph_matrix = gds_from_binary(quasi_cyclic(*found), a.with_identity);
        if (a.out) write_qc_file(*a.out, *found, {});
        for (std::size_t i = 0; i < 5; ++i)
            rc.add(std::vector<std::string>{"gamma", "rho", "c", "girth-target",
                                            "attempts"}[i],
                   a.qc_search[i]);
        rc.add("seed", a.seed);
        rc.add("with-identity", a.with_identity);
    } else {
        StabilizerCode code = load_code_spec(*a.code);
        rc.add("code", *a.code);
        std::string form = a.gds_form.value_or("");
        if (a.readout) {
            if (!form.empty() && form != "repeated" && form != "readout")
                throw UsageError("--readout applies to the repeated form only");
            form = "readout";
        }
        if (a.single_shot) {
            if (!a.redundancy) throw UsageError("--single-shot needs --redundancy");
            if (!form.empty())
                throw UsageError("--single-shot and --gds are exclusive");
            BitMatrix redundant = load_redundancy(*a.redundancy);
            SingleShotMatrices mats = single_shot_matrix(code.h, redundant);
            graph_matrix = mats.decoding;
            if (a.out) {
                write_gds_file(*a.out + ".measure.gds", mats.measurement,
                               std::vector<std::string>{code_metadata_line(code)});
                write_gds_file(*a.out + ".decode.gds", mats.decoding,
                               std::vector<std::string>{code_metadata_line(code)});
                std::ofstream rf(*a.out + ".rowops.txt");
                if (!rf) throw std::runtime_error("cannot write " + *a.out + ".rowops.txt");
                for (std::size_t i = 0; i < mats.row_ops.num_rows(); ++i) {
                    for (std::size_t j = 0; j < mats.row_ops.num_cols(); ++j)
                        rf << (mats.row_ops.get(i, j) ? '1' : '0');
                    rf << '\n';
                }
            }
            rc.add("single-shot", true);
            rc.add("redundancy", *a.redundancy);
        } else if (!form.empty()) {
            if (form == "ds")
                graph_matrix = ds_matrix(code.h);
            else if (form == "repeated")
                graph_matrix = gds_repeated(code.h, a.rounds);
            else if (form == "repeated-raw")
                graph_matrix = gds_repeated_raw(code.h, a.rounds);
            else if (form == "readout")
                graph_matrix = gds_with_readout(code.h, a.rounds);
            else
                throw UsageError("unknown --gds form: " + form);
            if (a.out)
                write_gds_file(*a.out, graph_matrix,
                               std::vector<std::string>{code_metadata_line(code)});
            rc.add("gds", form);
            if (form != "ds") rc.add("rounds", static_cast<std::uint64_t>(a.rounds));
        } else {
            graph_matrix = as_mixed(code.h);
            if (a.out)
                write_chk_file(*a.out, code.h,
                               std::vector<std::string>{code_metadata_line(code)});
        }
    }

    if (a.print_girth) {
        const std::size_t g = girth(TannerGraph(graph_matrix));
        if (g == kInfiniteGirth)
            std::cout << "inf\n";
        else
            std::cout << g << "\n";
    }
    if (a.dot) {
        std::ofstream df(*a.dot);
        if (!df) throw std::runtime_error("cannot write " + *a.dot);
        df << export_dot(TannerGraph(graph_matrix));
        rc.add("dot", *a.dot);
    }
    if (a.out) {
        rc.add("out", *a.out);
        rc.emit(a.out);
    }
    return 0;
}

// --- decode ------------------------------------------------------------------

struct DecodeArgs {
    std::string matrix;
    std::string syndrome;
    NoiseArgs noise;
    DecoderArgs dec;
    std::optional<std::string> llr_dump;
    std::optional<std::string> out;
};

int cmd_decode(const DecodeArgs& a) {
    GdsCheckMatrix h = load_mixed_matrix(a.matrix);

    if (a.syndrome.size() != h.num_rows())
        throw UsageError("syndrome has " + std::to_string(a.syndrome.size()) +
                         " bits; the matrix has " + std::to_string(h.num_rows()) +
                         " rows");
    std::vector<std::uint8_t> syndrome(a.syndrome.size());
    for (std::size_t i = 0; i < a.syndrome.size(); ++i) {
        if (a.syndrome[i] != '0' && a.syndrome[i] != '1')
            throw UsageError("syndrome must be a 0/1 string");
        syndrome[i] = static_cast<std::uint8_t>(a.syndrome[i] - '0');
    }

    double pe = a.noise.epsilon;
    double pb = resolved_epsilon_b(a.noise);
    if (a.dec.fixed_init) pe = pb = *a.dec.fixed_init;

    DecoderConfig cfg = decoder_config(a.dec);
    cfg.capture_llrs = a.llr_dump.has_value();
    const LlrInit init =
        init_from_rates(h.quaternary_cols(), h.binary_cols(), pe, pb, cfg.llr_clamp);

    const DecodeOutcome o = a.dec.alpha_start ? decode_ambp(h, syndrome, init, cfg)
                                              : decode_mbp(h, syndrome, init, cfg);

    std::string flips(o.estimate.bits.size(), '0');
    for (std::size_t i = 0; i < o.estimate.bits.size(); ++i)
        if (o.estimate.bits[i]) flips[i] = '1';

    std::ostringstream report;
    report << "converged=" << (o.converged ? "true" : "false") << "\n"
           << "iterations=" << o.iterations << "\n"
           << "alpha_star=" << fmt_g(o.alpha_star) << "\n"
           << "estimate_pauli=" << o.estimate.pauli.str() << "\n"
           << "estimate_flips=" << flips << "\n"
           << "estimate_weight=" << o.estimate.weight() << "\n";
    if (a.out) {
        std::ofstream f(*a.out);
        if (!f) throw std::runtime_error("cannot write " + *a.out);
        f << report.str();
    } else {
        std::cout << report.str();
    }

    if (a.llr_dump) {
        std::ofstream f(*a.llr_dump);
        if (!f) throw std::runtime_error("cannot write " + *a.llr_dump);
        for (double v : o.final_llrs) f << fmt_g(v) << "\n";
    }

    ResolvedConfig rc;
    rc.add("subcommand", "decode");
    rc.add("matrix", a.matrix);
    rc.add("syndrome", a.syndrome);
    rc.add("epsilon", a.noise.epsilon);
    rc.add("epsilon-b", resolved_epsilon_b(a.noise));
    record_decoder(rc, a.dec);
    rc.add_opt("llr-dump", a.llr_dump);
    if (a.out) rc.add("out", *a.out);
    rc.emit(a.out);
    return 0;
}

// --- memory ------------------------------------------------------------------

struct MemoryArgs {
    std::string code;
    std::size_t rounds = 3;
    NoiseArgs noise;
    DecoderArgs dec;
    std::uint64_t max_cycles = 1'000'000;
    std::size_t trials = 100;
    std::optional<std::uint64_t> failure_target;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    bool timing = false;
    std::optional<std::string> out;
    bool trials_given = false;
};

int cmd_memory(const MemoryArgs& a) {
    StabilizerCode code = load_code_spec(a.code);

    MemoryConfig cfg;
    cfg.rounds = a.rounds;
    cfg.epsilon = a.noise.epsilon;
    cfg.epsilon_b = resolved_epsilon_b(a.noise);
    cfg.decoder = decoder_config(a.dec);
    cfg.fixed_init = a.dec.fixed_init;
    cfg.max_cycles = a.max_cycles;
    cfg.trials = a.trials;
    cfg.failure_target = a.failure_target;
    // With a failure target the trial count is only a safety cap; leave room
    // unless the user pinned it explicitly.
    if (a.failure_target && !a.trials_given) cfg.trials = 1'000'000;
    cfg.seed = a.seed;
    cfg.workers = a.workers;
    cfg.timing = a.timing;

    const ExperimentRecord rec = run_memory(code, cfg);

    ResolvedConfig rc;
    rc.add("subcommand", "memory");
    rc.add("code", a.code);
    rc.add("rounds", static_cast<std::uint64_t>(cfg.rounds));
    rc.add("epsilon", cfg.epsilon);
    rc.add("epsilon-b", cfg.epsilon_b);
    record_decoder(rc, a.dec);
    rc.add("max-cycles", cfg.max_cycles);
    rc.add("trials", static_cast<std::uint64_t>(cfg.trials));
    rc.add_opt("failure-target", cfg.failure_target);
    rc.add("seed", cfg.seed);
    rc.add("workers", static_cast<std::uint64_t>(cfg.workers));
    rc.add("timing", cfg.timing);
    if (a.out) rc.add("out", *a.out);

    write_csv_record(rec, a.out, rc);
    return 0;
}

// --- singleshot --------------------------------------------------------------

struct SingleShotArgs {
    std::string code;
    std::optional<std::string> redundancy;
    NoiseArgs noise;
    DecoderArgs dec;
    std::optional<double> prior_epsilon;
    std::optional<double> prior_epsilon_b;
    std::optional<std::size_t> weight_exact;
    std::optional<std::size_t> weight_at_most;
    bool data_only = false;
    std::size_t trials = 1000;
    std::optional<std::uint64_t> failure_target;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    bool timing = false;
    std::optional<std::string> out;
    bool trials_given = false;
};

int cmd_singleshot(const SingleShotArgs& a) {
    StabilizerCode code = load_code_spec(a.code);
    BitMatrix redundant = a.redundancy ? load_redundancy(*a.redundancy)
                                       : BitMatrix(0, code.num_checks());

    SingleShotConfig cfg;
    cfg.epsilon = a.noise.epsilon;
    cfg.epsilon_b = resolved_epsilon_b(a.noise);
    cfg.decoder = decoder_config(a.dec);
    cfg.trials = a.trials;
    cfg.failure_target = a.failure_target;
    if (a.failure_target && !a.trials_given) cfg.trials = 1'000'000;
    cfg.seed = a.seed;
    cfg.workers = a.workers;
    cfg.timing = a.timing;
    cfg.prior_epsilon = a.prior_epsilon;
    cfg.prior_epsilon_b = a.prior_epsilon_b;
    if (a.dec.fixed_init) {
        cfg.prior_epsilon = *a.dec.fixed_init;
        cfg.prior_epsilon_b = *a.dec.fixed_init;
    }
    cfg.weight_exact = a.weight_exact;
    cfg.weight_at_most = a.weight_at_most;
    cfg.data_only = a.data_only;

    const ExperimentRecord rec = run_single_shot(code, redundant, cfg);

    ResolvedConfig rc;
    rc.add("subcommand", "singleshot");
    rc.add("code", a.code);
    rc.add_opt("redundancy", a.redundancy);
    rc.add("epsilon", cfg.epsilon);
    rc.add("epsilon-b", cfg.epsilon_b);
    record_decoder(rc, a.dec);
    rc.add_opt("prior-epsilon", cfg.prior_epsilon);
    rc.add_opt("prior-epsilon-b", cfg.prior_epsilon_b);
    rc.add_opt("weight", cfg.weight_exact
                             ? std::optional<std::uint64_t>(*cfg.weight_exact)
                             : std::nullopt);
    rc.add_opt("weight-at-most", cfg.weight_at_most
                                     ? std::optional<std::uint64_t>(*cfg.weight_at_most)
                                     : std::nullopt);
    rc.add("data-only", cfg.data_only);
    rc.add("trials", static_cast<std::uint64_t>(cfg.trials));
    rc.add_opt("failure-target", cfg.failure_target);
    rc.add("seed", cfg.seed);
    rc.add("workers", static_cast<std::uint64_t>(cfg.workers));
    rc.add("timing", cfg.timing);
    if (a.out) rc.add("out", *a.out);

    write_csv_record(rec, a.out, rc);
    return 0;
}

// --- fit ---------------------------------------------------------------------

struct FitArgs {
    std::vector<std::string> inputs;
    AnsatzGrid grid;
    std::optional<std::string> out;
};

void read_points(const std::string& path, std::vector<AnsatzPoint>& points) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line != csv_header())
        throw ParseError(path + ": unexpected CSV header");
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 12)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 12 fields");
        try {
            AnsatzPoint p;
            p.d = parse_size(fields[1], "d");
            p.epsilon = std::stod(fields[3]);
            p.rate = std::stod(fields[7]);
            if (std::isfinite(p.rate)) points.push_back(p);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad numeric field");
        }
    }
}

int cmd_fit(const FitArgs& a) {
    std::vector<AnsatzPoint> points;
    for (const auto& path : a.inputs) read_points(path, points);

    AnsatzFitResult fit;
    try {
        fit = ansatz_fit(points, a.grid);
    } catch (const std::invalid_argument& e) {
        throw InfeasibleError(e.what());
    }

    std::ostringstream line;
    line << "nu=" << fmt_g(fit.nu) << " tau=" << fmt_g(fit.tau) << " mse="
         << fmt_g(fit.mse) << " c0=" << fmt_g(fit.coeffs[0]) << " c1="
         << fmt_g(fit.coeffs[1]) << " c2=" << fmt_g(fit.coeffs[2]) << "\n";
    if (a.out) {
        std::ofstream f(*a.out);
        if (!f) throw std::runtime_error("cannot write " + *a.out);
        f << line.str();
    } else {
        std::cout << line.str();
    }

    ResolvedConfig rc;
    rc.add("subcommand", "fit");
    for (const auto& path : a.inputs) rc.add("in", path);
    rc.add("nu-min", a.grid.nu_min);
    rc.add("nu-max", a.grid.nu_max);
    rc.add("nu-step", a.grid.nu_step);
    rc.add("tau-min", a.grid.tau_min);
    rc.add("tau-max", a.grid.tau_max);
    rc.add("tau-step", a.grid.tau_step);
    if (a.out) rc.add("out", *a.out);
    rc.emit(a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decoding toolkit for stabilizer codes with redundant noisy syndromes"};
    app.require_subcommand(1);

    BuildArgs build_args;
    auto* build = app.add_subcommand("build", "construct and export check matrices");
    build->add_option("--code", build_args.code,
                      "code spec: toric:L, gb126, gb102, or a CHK file path");
    build->add_option("--gds", build_args.gds_form,
                      "mixed-alphabet form of the code's matrix")
        ->check(CLI::IsMember({"ds", "repeated", "repeated-raw", "readout"}));
    build->add_flag("--readout", build_args.readout,
                    "append a flip-free readout round to the repeated form");
    build->add_option("--rounds", build_args.rounds, "measurement rounds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    build->add_option("--qc", build_args.qc, "expand a quasi-cyclic base file");
    build->add_option("--c", build_args.c_override, "override the circulant size");
    build->add_flag("--with-identity", build_args.with_identity,
                    "append an identity block to the expansion");
    build->add_option("--qc-search", build_args.qc_search,
                      "search a base matrix: gamma rho c girth attempts")
        ->expected(5);
    build->add_flag("--single-shot", build_args.single_shot,
                    "emit the measurement/decoding pair for redundant checks");
    build->add_option("--redundancy", build_args.redundancy,
                      "QC file whose expansion multiplies the check matrix");
    build->add_option("--seed", build_args.seed, "search seed")->capture_default_str();
    build->add_flag("--girth", build_args.print_girth, "print the Tanner-graph girth");
    build->add_option("--dot", build_args.dot, "write a Graphviz view of the graph");
    build->add_option("--out", build_args.out, "output path (stem for --single-shot)");

    DecodeArgs decode_args;
    auto* decode = app.add_subcommand("decode", "run one decode on a syndrome");
    decode->add_option("--matrix", decode_args.matrix, "CHK or GDS file")->required();
    decode->add_option("--syndrome", decode_args.syndrome, "0/1 string, one bit per row")
        ->required();
    add_noise_flags(decode, decode_args.noise, 0.01);
    add_decoder_flags(decode, decode_args.dec);
    decode->add_option("--llr-dump", decode_args.llr_dump,
                       "write final beliefs, one value per line");
    decode->add_option("--out", decode_args.out, "write the report here instead of stdout");

    MemoryArgs memory_args;
    auto* memory = app.add_subcommand("memory", "sustained-lifetime campaign");
    memory->add_option("--code", memory_args.code, "code spec")->required();
    memory->add_option("--rounds", memory_args.rounds, "noisy rounds per cycle")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_noise_flags(memory, memory_args.noise, 0.0);
    add_decoder_flags(memory, memory_args.dec);
    memory->add_option("--max-cycles", memory_args.max_cycles, "censoring cap per trial")
        ->capture_default_str();
    auto* mem_trials =
        memory->add_option("--trials", memory_args.trials, "trial cap")->capture_default_str();
    memory->add_option("--failure-target", memory_args.failure_target,
                       "stop once this many trials failed");
    memory->add_option("--seed", memory_args.seed, "stream seed")->capture_default_str();
    memory->add_option("--workers", memory_args.workers, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    memory->add_flag("--timing", memory_args.timing, "fill the wall_ms column");
    memory->add_option("--out", memory_args.out, "CSV path (default: stdout)");

    SingleShotArgs shot_args;
    auto* shot = app.add_subcommand("singleshot", "one-round correction campaign");
    shot->add_option("--code", shot_args.code, "code spec")->required();
    shot->add_option("--redundancy", shot_args.redundancy,
                     "QC file expanding to the redundant-check multiplier");
    add_noise_flags(shot, shot_args.noise, 0.0);
    add_decoder_flags(shot, shot_args.dec);
    shot->add_option("--prior-epsilon", shot_args.prior_epsilon,
                     "decoder prior on the quaternary part");
    shot->add_option("--prior-epsilon-b", shot_args.prior_epsilon_b,
                     "decoder prior on the flip part");
    auto* we = shot->add_option("--weight", shot_args.weight_exact,
                                "draw uniformly at this exact combined weight");
    shot->add_option("--weight-at-most", shot_args.weight_at_most,
                     "draw uniformly over combined weight <= bound")
        ->excludes(we);
    shot->add_flag("--data-only", shot_args.data_only,
                   "restrict weight-mode draws to the quaternary part");
    auto* shot_trials =
        shot->add_option("--trials", shot_args.trials, "trial cap")->capture_default_str();
    shot->add_option("--failure-target", shot_args.failure_target,
                     "stop once this many trials failed");
    shot->add_option("--seed", shot_args.seed, "stream seed")->capture_default_str();
    shot->add_option("--workers", shot_args.workers, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    shot->add_flag("--timing", shot_args.timing, "fill the wall_ms column");
    shot->add_option("--out", shot_args.out, "CSV path (default: stdout)");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "threshold-ansatz grid fit over CSV records");
    fit->add_option("--in", fit_args.inputs, "CSV files holding the sample points")
        ->required();
    fit->add_option("--nu-min", fit_args.grid.nu_min)->capture_default_str();
    fit->add_option("--nu-max", fit_args.grid.nu_max)->capture_default_str();
    fit->add_option("--nu-step", fit_args.grid.nu_step)->capture_default_str();
    fit->add_option("--tau-min", fit_args.grid.tau_min)->capture_default_str();
    fit->add_option("--tau-max", fit_args.grid.tau_max)->capture_default_str();
    fit->add_option("--tau-step", fit_args.grid.tau_step)->capture_default_str();
    fit->add_option("--out", fit_args.out, "write the fit line here instead of stdout");

    static std::string config_sink;
    for (auto* sub : {build, decode, memory, shot, fit})
        sub->add_option("--config", config_sink,
                        "flat key=value file mirroring the flags; flags win");

    try {
        std::vector<std::string> args = with_config_applied(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }

    try {
        if (build->parsed()) return cmd_build(build_args);
        if (decode->parsed()) return cmd_decode(decode_args);
        if (memory->parsed()) {
            memory_args.trials_given = mem_trials->count() > 0;
            return cmd_memory(memory_args);
        }
        if (shot->parsed()) {
            shot_args.trials_given = shot_trials->count() > 0;
            return cmd_singleshot(shot_args);
        }
        if (fit->parsed()) return cmd_fit(fit_args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
