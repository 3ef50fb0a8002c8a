// hawkesfit: simulate, discretize, and fit self-exciting count models
// from interval-count data via SMC likelihood estimation inside a
// pseudo-marginal Metropolis-Hastings sampler.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hawkes/hawkes.hpp"

namespace {

struct KernelFlags {
    std::string family = "exp";
    double nu = 1.0;
    double eta = 0.5;
    std::optional<double> alpha;
    double beta = 1.0;
};

void add_kernel_options(CLI::App& cmd, KernelFlags& flags, bool with_values) {
    cmd.add_option("--kernel", flags.family, "Excitation kernel family")
        ->check(CLI::IsMember({"exp", "gamma", "weibull"}))
        ->capture_default_str();
    if (with_values) {
        cmd.add_option("--nu", flags.nu, "Background event rate")->required();
        cmd.add_option("--eta", flags.eta, "Branching ratio in [0,1)")->required();
        cmd.add_option("--alpha", flags.alpha, "Kernel shape (gamma/weibull only)");
        cmd.add_option("--beta", flags.beta, "Kernel scale")->required();
    }
}

hawkes::KernelFamily parse_family(const std::string& name) {
    if (name == "exp") return hawkes::KernelFamily::exponential;
    if (name == "gamma") return hawkes::KernelFamily::gamma;
    return hawkes::KernelFamily::weibull;
}

hawkes::HawkesParams build_params(const KernelFlags& flags) {
    const hawkes::KernelFamily family = parse_family(flags.family);
    if (hawkes::has_shape(family) && !flags.alpha) {
        throw std::invalid_argument("--alpha is required for gamma/weibull kernels");
    }
    if (!hawkes::has_shape(family) && flags.alpha) {
        throw std::invalid_argument("--alpha does not apply to the exponential kernel");
    }
    const double shape = flags.alpha.value_or(1.0);
    return {flags.nu, hawkes::ExcitationKernel::make(family, flags.eta, shape, flags.beta)};
}

int default_threads() {
    if (const char* env = std::getenv("HAWKESFIT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

bool use_fast_path(const std::string& mode, hawkes::KernelFamily family) {
    if (mode == "on") return true;
    if (mode == "off") return false;
    return family == hawkes::KernelFamily::exponential;
}

std::vector<double> parse_init(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string field;
    while (std::getline(in, field, ',')) values.push_back(std::stod(field));
    return values;
}

// Expand `--config FILE` (flat key=value lines mirroring this
// subcommand's flags) into ordinary flags, placed before the explicit
// flags so that explicit flags win.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_file;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_file = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_file = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    if (config_file.empty()) return args;
    if (args.empty()) throw std::invalid_argument("--config requires a subcommand");

    std::ifstream in(config_file);
    if (!in) throw std::invalid_argument("config file '" + config_file + "' cannot be opened");
    std::vector<std::string> expanded;
    std::string line;
    while (std::getline(in, line)) {
        const auto begin = line.find_first_not_of(" \t\r\n");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r\n");
        const std::string entry = line.substr(begin, end - begin + 1);
        if (entry[0] == '#') continue;
        const auto eq = entry.find('=');
        if (entry.substr(0, eq) == "config") {
            throw std::invalid_argument("config files cannot nest");
        }
        expanded.push_back("--" + entry);  // --key=value, or --key for flags
    }
    // keys become --key=value tokens right after the subcommand name
    std::vector<std::string> out{args.front()};
    out.insert(out.end(), expanded.begin(), expanded.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

void print_summary(std::ostream& out, const hawkes::Summary& summary) {
    out << "acceptance_rate=" << hawkes::detail::fmt17(summary.acceptance_rate) << '\n';
    for (const auto& p : summary.parameters) {
        out << p.name << ".est=" << hawkes::detail::fmt17(p.estimate) << '\n'
            << p.name << ".lower=" << hawkes::detail::fmt17(p.lower) << '\n'
            << p.name << ".upper=" << hawkes::detail::fmt17(p.upper) << '\n'
            << p.name << ".se=" << hawkes::detail::fmt17(p.se) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hawkes-process inference from discretely observed counts"};
    app.require_subcommand(1);
    // config-file values are injected ahead of explicit flags; the last
    // occurrence wins, so flags override the file
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // simulate
    KernelFlags sim_kernel;
    double sim_horizon = 100.0;
    std::uint64_t sim_seed = 0;
    std::uint64_t sim_cap = 10'000'000;
    std::string sim_out = "events.csv";
    CLI::App* sim = app.add_subcommand("simulate", "Draw one sample path and write an events CSV");
    add_kernel_options(*sim, sim_kernel, true);
    sim->add_option("--T", sim_horizon, "Censoring time")->required();
    sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    sim->add_option("--cap", sim_cap, "Runaway-path event cap")->capture_default_str();
    sim->add_option("--out", sim_out, "Output events CSV")->capture_default_str();

    // discretize
    std::string disc_events;
    double disc_delta = 1.0;
    double disc_horizon = 0.0;
    std::string disc_out = "counts.csv";
    CLI::App* disc = app.add_subcommand("discretize", "Bin an events CSV into interval counts");
    disc->add_option("--events", disc_events, "Input events CSV")->required();
    disc->add_option("--delta", disc_delta, "Interval length")->required();
    disc->add_option("--horizon", disc_horizon, "Observation horizon")->required();
    disc->add_option("--out", disc_out, "Output counts CSV")->capture_default_str();

    // loglik
    KernelFlags ll_kernel;
    std::string ll_counts;
    int ll_particles = 256;
    std::uint64_t ll_seed = 0;
    int ll_reps = 1;
    bool ll_no_collapse = false;
    std::string ll_fast = "auto";
    CLI::App* ll = app.add_subcommand("loglik", "SMC log-likelihood estimate(s) at fixed parameters");
    add_kernel_options(*ll, ll_kernel, true);
    ll->add_option("--counts", ll_counts, "Counts CSV")->required();
    ll->add_option("--J", ll_particles, "Particle count")->capture_default_str();
    ll->add_option("--seed", ll_seed, "RNG seed")->capture_default_str();
    ll->add_option("--reps", ll_reps, "Number of independent estimates to print")->capture_default_str();
    ll->add_flag("--no-collapse", ll_no_collapse, "Skip zero-run collapsing preprocessing");
    ll->add_option("--fast-path", ll_fast, "Exponential epsilon-state path: auto|on|off")
        ->check(CLI::IsMember({"auto", "on", "off"}))
        ->capture_default_str();

    // oracle
    KernelFlags or_kernel;
    std::string or_counts;
    std::int64_t or_sims = 1'000'000;
    std::uint64_t or_seed = 0;
    int or_threads = default_threads();
    CLI::App* orc = app.add_subcommand("oracle", "Brute-force Monte Carlo probability of the observed counts");
    add_kernel_options(*orc, or_kernel, true);
    orc->add_option("--counts", or_counts, "Counts CSV (grid and target counts)")->required();
    orc->add_option("--sims", or_sims, "Number of simulated paths")->capture_default_str();
    orc->add_option("--seed", or_seed, "RNG seed")->capture_default_str();
    orc->add_option("--threads", or_threads, "Worker threads")->capture_default_str();

    // fit
    KernelFlags fit_kernel;
    std::string fit_counts;
    int fit_particles = 256;
    int fit_iterations = 50000;
    int fit_burn_in = 1000;
    double fit_sigma = 0.05;
    std::uint64_t fit_seed = 0;
    std::string fit_init;
    std::string fit_chain = "chain.csv";
    std::string fit_summary = "summary.txt";
    bool fit_no_collapse = false;
    std::string fit_fast = "auto";
    CLI::App* fit = app.add_subcommand("fit", "PMMH posterior sampling; writes chain CSV and summary");
    add_kernel_options(*fit, fit_kernel, false);
    fit->add_option("--counts", fit_counts, "Counts CSV")->required();
    fit->add_option("--J", fit_particles, "Particle count")->capture_default_str();
    fit->add_option("--iterations", fit_iterations, "Chain length after the initial state")->capture_default_str();
    fit->add_option("--burn-in", fit_burn_in, "Iterations discarded by the summary")->capture_default_str();
    fit->add_option("--sigma", fit_sigma, "Random-walk sd on the transformed scale")->capture_default_str();
    fit->add_option("--seed", fit_seed, "RNG seed")->capture_default_str();
    fit->add_option("--init", fit_init, "Comma-separated transformed-scale start (default: standard normal draw)");
    fit->add_option("--chain", fit_chain, "Output chain CSV")->capture_default_str();
    fit->add_option("--summary", fit_summary, "Output summary file")->capture_default_str();
    fit->add_flag("--no-collapse", fit_no_collapse, "Skip zero-run collapsing preprocessing");
    fit->add_option("--fast-path", fit_fast, "Exponential epsilon-state path: auto|on|off")
        ->check(CLI::IsMember({"auto", "on", "off"}))
        ->capture_default_str();

    // summarize
    std::string sum_chain;
    int sum_burn_in = 1000;
    std::string sum_out;
    CLI::App* sum = app.add_subcommand("summarize", "Summarize an existing chain CSV");
    sum->add_option("--chain", sum_chain, "Input chain CSV")->required();
    sum->add_option("--burn-in", sum_burn_in, "Iterations to discard")->capture_default_str();
    sum->add_option("--out", sum_out, "Optional output summary file");

    static std::string config_sink;  // consumed by expand_config_args; declared for --help
    for (CLI::App* sub : {sim, disc, ll, orc, fit, sum}) {
        sub->add_option("--config", config_sink,
                        "Flat key=value config file mirroring this subcommand's flags");
    }

    try {
        std::vector<std::string> args = expand_config_args(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }

    try {
        if (*sim) {
            const hawkes::HawkesParams params = build_params(sim_kernel);
            hawkes::RngStream rng(sim_seed);
            const hawkes::EventHistory path = hawkes::simulate_hawkes(params, sim_horizon, rng, sim_cap);
            hawkes::save_events(path, sim_out);
            std::cout << "events=" << path.times.size() << " out=" << sim_out << '\n';
        } else if (*disc) {
            std::vector<double> events = hawkes::load_events(disc_events);
            if (!(disc_delta > 0.0)) throw std::invalid_argument("--delta must be positive");
            const int bins = static_cast<int>(disc_horizon / disc_delta + 1e-9);
            if (bins < 1) throw std::invalid_argument("--horizon must cover at least one interval");
            std::vector<double> grid(static_cast<std::size_t>(bins) + 1);
            for (int i = 0; i <= bins; ++i) grid[static_cast<std::size_t>(i)] = i * disc_delta;
            const double horizon = std::max(grid.back(), events.empty() ? 0.0 : events.back());
            const hawkes::EventHistory path(std::move(events), horizon);
            hawkes::save_counts(hawkes::discretize_counts(path, grid), disc_out);
            std::cout << "intervals=" << bins << " out=" << disc_out << '\n';
        } else if (*ll) {
            const hawkes::HawkesParams params = build_params(ll_kernel);
            hawkes::CountData data = hawkes::load_counts(ll_counts);
            if (!ll_no_collapse) data = hawkes::collapse_zero_runs(data);
            if (ll_reps < 1) throw std::invalid_argument("--reps must be >= 1");
            hawkes::SmcConfig cfg;
            cfg.num_particles = ll_particles;
            cfg.exp_fast_path = use_fast_path(ll_fast, params.kernel.family());
            const hawkes::RngStream base(ll_seed);
            for (int rep = 0; rep < ll_reps; ++rep) {
                cfg.seed = base.substream_key(static_cast<std::uint64_t>(rep));
                std::cout << hawkes::detail::fmt17(hawkes::smc_loglik(params, data, cfg)) << '\n';
            }
        } else if (*orc) {
            const hawkes::HawkesParams params = build_params(or_kernel);
            const hawkes::CountData data = hawkes::load_counts(or_counts);
            const hawkes::OracleEstimate est = hawkes::brute_force_prob(
                params, data.times, data.counts, or_sims, or_seed, or_threads);
            std::cout << "probability=" << hawkes::detail::fmt17(est.probability) << '\n'
                      << "standard_error=" << hawkes::detail::fmt17(est.standard_error) << '\n'
                      << "n_sims=" << est.n_sims << '\n';
        } else if (*fit) {
            const hawkes::KernelFamily family = parse_family(fit_kernel.family);
            hawkes::CountData data = hawkes::load_counts(fit_counts);
            if (!fit_no_collapse) data = hawkes::collapse_zero_runs(data);
            hawkes::PmmhConfig config;
            config.iterations = fit_iterations;
            config.burn_in = fit_burn_in;
            config.step_sigma = fit_sigma;
            config.seed = fit_seed;
            config.smc.num_particles = fit_particles;
            config.smc.exp_fast_path = use_fast_path(fit_fast, family);
            if (!fit_init.empty()) config.init = parse_init(fit_init);
            const hawkes::ChainOutput chain = hawkes::pmmh_run(config, family, data);
            hawkes::save_chain(chain, fit_chain);
            const hawkes::Summary summary = hawkes::summarize_chain(chain, fit_burn_in);
            hawkes::save_summary(summary, fit_summary);
            print_summary(std::cout, summary);
        } else if (*sum) {
            const hawkes::ChainOutput chain = hawkes::load_chain(sum_chain);
            const hawkes::Summary summary = hawkes::summarize_chain(chain, sum_burn_in);
            if (!sum_out.empty()) hawkes::save_summary(summary, sum_out);
            print_summary(std::cout, summary);
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
