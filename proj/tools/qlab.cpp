#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "qlab/error.hpp"
#include "qlab/harness.hpp"

using namespace qlab;
using namespace qlab::harness;

namespace {

struct Common {
    std::uint64_t seed = 42;
    double timeout = 100.0;
    std::size_t runs = 10;
    double eve_fraction = 1.0;
    std::size_t sample_k = 8;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App *cmd, Common &c) {
    cmd->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--timeout", c.timeout, "Per-attempt timeout in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--runs", c.runs, "Number of runs")->capture_default_str();
    cmd->add_option("--eve-fraction", c.eve_fraction, "Intercept-resend fraction")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--sample-k", c.sample_k, "Sifted bits disclosed for QBER")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--out", c.out, "Output path (stdout if omitted)");
    cmd->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

void emit(const Common &c, const Table &table) {
    const Format format = parse_format(c.format);
    if (c.out.empty()) {
        write_table(std::cout, table, format);
        return;
    }
    std::ofstream file(c.out);
    if (!file)
        throw Error(Errc::InvalidArgument, "cannot open " + c.out);
    write_table(file, table, format);
}

void require_runs(const Common &c) {
    if (c.runs < 1)
        throw CLI::ValidationError("--runs", "must be at least 1");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum/classical cryptography experiment runner"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    Common c;

    auto *rsa = app.add_subcommand("rsa-bench", "RSA keygen/encrypt/decrypt timings");
    add_common(rsa, c);
    std::vector<std::string> categories{"small", "medium", "large", "very_large"};
    rsa->add_option("--categories", categories, "Prime categories")
        ->delimiter(',')
        ->capture_default_str();

    auto *factor = app.add_subcommand("factor", "Trial division vs Pollard rho table");
    add_common(factor, c);

    auto *shor = app.add_subcommand("shor", "Simulated Shor factoring runs");
    add_common(shor, c);
    std::vector<std::uint64_t> moduli(std::begin(kShorModuli), std::end(kShorModuli));
    shor->add_option("--n", moduli, "Moduli to factor")->delimiter(',')->capture_default_str();

    auto *bb84_cmd = app.add_subcommand("bb84", "BB84 session suite");
    add_common(bb84_cmd, c);
    std::size_t eve_runs = 5, n_transmit = 128;
    double noise = 0.0;
    bb84_cmd->add_option("--eve-runs", eve_runs, "Sessions with Eve")->capture_default_str();
    bb84_cmd->add_option("--n", n_transmit, "Qubits per session")->capture_default_str();
    bb84_cmd->add_option("--noise", noise, "Channel bit-flip probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    auto *detection = app.add_subcommand("detection", "Eavesdropping detection experiment");
    add_common(detection, c);
    std::size_t trials = 10000;
    detection->add_option("--trials", trials, "Trials per leg")->capture_default_str();

    auto *pipeline = app.add_subcommand("pipeline", "End-to-end hybrid pipeline runs");
    add_common(pipeline, c);

    auto *immune_cmd = app.add_subcommand("immune-sim", "Immune layer over a mixed stream");
    add_common(immune_cmd, c);

    auto *repro = app.add_subcommand("reproduce", "Run every experiment into a directory");
    add_common(repro, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    try {
        const auto timeout = std::chrono::duration<double>(c.timeout);
        if (*rsa) {
            std::vector<PrimeCategory> cats;
            for (const auto &name : categories)
                if (!name.empty())
                    cats.push_back(parse_category(name));
            emit(c, run_rsa_bench(cats));
        } else if (*factor) {
            emit(c, run_factor_table(timeout, c.seed));
        } else if (*shor) {
            require_runs(c);
            emit(c, run_shor(moduli, c.runs, c.seed));
        } else if (*bb84_cmd) {
            require_runs(c);
            bb84::Bb84Config base;
            base.seed = c.seed;
            base.sample_k = c.sample_k;
            base.n_transmit = n_transmit;
            base.noise_flip = noise;
            emit(c, run_bb84_suite(c.runs, eve_runs, base, c.eve_fraction));
        } else if (*detection) {
            DetectionConfig cfg;
            cfg.trials = trials;
            cfg.sample_k = c.sample_k;
            cfg.eve_fraction = c.eve_fraction;
            cfg.seed = c.seed;
            emit(c, run_detection_experiment(cfg));
        } else if (*pipeline) {
            require_runs(c);
            emit(c, run_pipeline(c.runs, c.eve_fraction, c.sample_k, c.seed));
        } else if (*immune_cmd) {
            require_runs(c);
            emit(c, run_immune_sim(c.runs, c.eve_fraction, c.seed));
        } else if (*repro) {
            require_runs(c);
            ReproduceConfig cfg;
            cfg.seed = c.seed;
            cfg.timeout = timeout;
            cfg.runs = c.runs;
            cfg.eve_fraction = c.eve_fraction;
            cfg.sample_k = c.sample_k;
            cfg.format = parse_format(c.format);
            const std::string dir = c.out.empty() ? "reproduce_out" : c.out;
            for (const auto &f : reproduce(dir, cfg))
                std::cout << dir << '/' << f << '\n';
        }
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const Error &e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}
