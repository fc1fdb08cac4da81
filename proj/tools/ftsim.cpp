#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftsim/config.hpp"
#include "ftsim/engine.hpp"
#include "ftsim/errors.hpp"
#include "ftsim/reliability.hpp"
#include "ftsim/report.hpp"

namespace {

struct RunOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::int64_t seed = -1;
    unsigned reps = 1;
    std::string out_path;
    std::string mode;
};

ftsim::SimConfig build_config(const RunOptions& opt) {
    ftsim::SimConfig cfg;
    if (!opt.config_path.empty())
        cfg = ftsim::parse_config_file(opt.config_path);
    for (const auto& kv : opt.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ftsim::ConfigError("--set expects key=value: " + kv);
        ftsim::apply_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
    if (!opt.mode.empty())
        cfg.exec_mode = ftsim::exec_mode_from_string(opt.mode);
    return cfg;
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw ftsim::ConfigError("cannot open output file: " + out_path);
    out << text;
}

std::vector<ftsim::SimReport> run_reps(const ftsim::SimConfig& base,
                                       unsigned reps) {
    std::vector<ftsim::SimReport> runs;
    for (unsigned k = 0; k < reps; ++k) {
        ftsim::SimConfig cfg = base;
        cfg.seed = base.seed + k;
        runs.push_back(ftsim::run_simulation(cfg));
    }
    return runs;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ftsim::ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_double_list(const std::vector<std::string>& raw) {
    std::vector<double> out;
    for (const auto& s : raw) out.push_back(std::stod(s));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fault-tolerant time-stepped parallel simulation engine"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run_cmd = app.add_subcommand(
        "run", "Run one configuration for --reps repetitions");
    run_cmd->add_option("-c,--config", run_opt.config_path,
                        "Config file (key=value lines)");
    run_cmd->add_option("--set", run_opt.overrides,
                        "Override a config key (key=value, repeatable)");
    run_cmd->add_option("--seed", run_opt.seed, "Global seed");
    run_cmd->add_option("--reps", run_opt.reps,
                        "Repetitions with seeds seed..seed+reps-1");
    run_cmd->add_option("-o,--out", run_opt.out_path,
                        "Output CSV path (default stdout)");
    run_cmd->add_option("--mode", run_opt.mode,
                        "Execution mode: single, threads or processes");

    RunOptions sweep_opt;
    std::string sweep_key;
    std::vector<std::string> sweep_values;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Run one configuration varying a single key over a list");
    sweep_cmd->add_option("-c,--config", sweep_opt.config_path,
                          "Config file (key=value lines)");
    sweep_cmd->add_option("--set", sweep_opt.overrides,
                          "Override a config key (key=value, repeatable)");
    sweep_cmd->add_option("--seed", sweep_opt.seed, "Global seed");
    sweep_cmd->add_option("--reps", sweep_opt.reps,
                          "Repetitions per sweep point");
    sweep_cmd->add_option("-o,--out", sweep_opt.out_path,
                          "Output CSV path (default stdout)");
    sweep_cmd->add_option("--mode", sweep_opt.mode,
                          "Execution mode: single, threads or processes");
    sweep_cmd->add_option("--key", sweep_key, "Config key to vary")
        ->required();
    sweep_cmd->add_option("--values", sweep_values,
                          "Comma-separated values for --key")
        ->required()
        ->delimiter(',');

    double rel_lambda = 2.7573e-8;
    std::vector<std::string> rel_n = {"10", "100", "1000"};
    std::vector<std::string> rel_t = {"3600", "86400", "604800"};
    std::string rel_out;
    auto* rel_cmd = app.add_subcommand(
        "reliability", "Emit the analytic reliability table R(N,t)");
    rel_cmd->add_option("--lambda", rel_lambda,
                        "Per-component failure rate (1/seconds)");
    rel_cmd->add_option("--n", rel_n, "Component counts")->delimiter(',');
    rel_cmd->add_option("--t", rel_t, "Horizons in seconds")
        ->delimiter(',');
    rel_cmd->add_option("-o,--out", rel_out,
                        "Output CSV path (default stdout)");

    std::string cmp_a, cmp_b;
    auto* cmp_cmd = app.add_subcommand(
        "compare", "Diff two report CSVs (exit 0 iff digests match)");
    cmp_cmd->add_option("a", cmp_a, "First report CSV")->required();
    cmp_cmd->add_option("b", cmp_b, "Second report CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            auto runs = run_reps(build_config(run_opt), run_opt.reps);
            write_output(run_opt.out_path, ftsim::report_csv(runs, true));
            return 0;
        }
        if (sweep_cmd->parsed()) {
            const ftsim::SimConfig base = build_config(sweep_opt);
            std::vector<ftsim::SimReport> all;
            for (const auto& value : sweep_values) {
                ftsim::SimConfig cfg = base;
                ftsim::apply_key(cfg, sweep_key, value);
                for (auto& r : run_reps(cfg, sweep_opt.reps))
                    all.push_back(std::move(r));
            }
            write_output(sweep_opt.out_path, ftsim::report_csv(all, false));
            return 0;
        }
        if (rel_cmd->parsed()) {
            std::vector<std::uint64_t> ns;
            for (const auto& s : rel_n) ns.push_back(std::stoull(s));
            write_output(rel_out,
                         ftsim::reliability_table(
                             ns, rel_lambda, parse_double_list(rel_t)));
            return 0;
        }
        if (cmp_cmd->parsed()) {
            auto a = ftsim::load_report_csv(slurp(cmp_a));
            auto b = ftsim::load_report_csv(slurp(cmp_b));
            if (a.empty() || a.size() != b.size()) {
                std::cerr << "incompatible: run counts differ ("
                          << a.size() << " vs " << b.size() << ")\n";
                return 2;
            }
            bool equivalent = true;
            for (std::size_t i = 0; i < a.size(); ++i) {
                auto diff = ftsim::compare_reports(a[i], b[i]);
                if (diff.incompatible) {
                    std::cerr << "run " << i
                              << ": incompatible entity sets\n";
                    return 2;
                }
                if (!diff.differing_entities.empty()) {
                    equivalent = false;
                    std::cout << "run " << i << ": "
                              << diff.differing_entities.size()
                              << " entities differ:";
                    for (auto e : diff.differing_entities)
                        std::cout << ' ' << e;
                    std::cout << '\n';
                }
                if (diff.counters_differ)
                    std::cout << "run " << i << ": counters differ\n";
            }
            if (equivalent) std::cout << "equivalent\n";
            return equivalent ? 0 : 1;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
