#include <CLI11.hpp>

#include "moboga/cli.hpp"

int main(int argc, char** argv)
{
    using namespace moboga;
    CLI::App app{"moboga - constraint-aware multi-objective Bayesian optimization"};
    app.require_subcommand(1);

    cli::RunOptions run_opt;
    std::string config_path, problem;
    std::size_t iters = 0, n_initial = 0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "explore + exploit one problem and write a run record");
    run->add_option("config", config_path, "JSON config file");
    auto* o_problem = run->add_option("--problem", problem, "built-in problem name");
    auto* o_iters = run->add_option("--iters", iters, "evaluation budget including the initial design");
    auto* o_init = run->add_option("--n-initial", n_initial, "size of the initial design");
    auto* o_delta = run->add_option("--delta", delta, "stop distance in encoded space");
    auto* o_seed = run->add_option("--seed", seed, "random seed (overrides config and MOBOGA_SEED)");
    run->add_option("-o,--out", run_opt.out_path, "run record path")->capture_default_str();
    run->add_flag("-q,--quiet", run_opt.quiet, "no per-evaluation progress lines");

    std::string record, csv_out = "-";
    auto* front = app.add_subcommand("front", "export a run record as CSV");
    front->add_option("record", record, "run record")->required();
    front->add_option("csv", csv_out, "output CSV, - for stdout")->capture_default_str();

    std::string which, out_dir = "verify-out";
    auto* verify = app.add_subcommand("verify", "reproduce a benchmark and check it against its oracle");
    verify->add_option("name", which, "binh-korn | constr-ex | sinusoid-1d")->required();
    verify->add_option("-d,--out-dir", out_dir, "output directory")->capture_default_str();

    auto* problems = app.add_subcommand("problems", "list built-in problems");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const rc = app.exit(e);
        return rc == 0 ? 0 : cli::kConfigError;
    }

    if (run->parsed()) {
        if (!config_path.empty()) {
            run_opt.config_path = config_path;
        }
        if (*o_problem) {
            run_opt.problem = problem;
        }
        if (*o_iters) {
            run_opt.iters = iters;
        }
        if (*o_init) {
            run_opt.n_initial = n_initial;
        }
        if (*o_delta) {
            run_opt.delta = delta;
        }
        if (*o_seed) {
            run_opt.seed = seed;
        }
        return cli::cmd_run(run_opt);
    }
    if (front->parsed()) {
        return cli::cmd_front(record, csv_out);
    }
    if (verify->parsed()) {
        return cli::cmd_verify(which, out_dir);
    }
    if (problems->parsed()) {
        return cli::cmd_problems();
    }
    return cli::kConfigError;
}
