#include "pca/grassmann.hpp"
#include "pca/ising.hpp"
#include "pca/scenario.hpp"
#include "pca/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace pca;

namespace {

int cmd_run(const std::string& config, const std::string& out_dir) {
    const auto cfg = ScenarioConfig::load(config);
    const auto res = run_scenario(cfg, out_dir);
    std::cerr << "ran " << config << " (" << res.method << ", " << cfg.n_half_steps << " half steps)\n";
    if (cfg.outputs.observables_csv.empty() && !res.observables.empty()) write_observables_csv(std::cout, res.observables);
    return 0;
}

int cmd_expect(const std::string& config) {
    const auto cfg = ScenarioConfig::load(config);
    if (cfg.observables.empty()) throw InvalidSpec("expect needs at least one observable in the config");
    write_observables_csv(std::cout, evaluate_scenario(cfg).observables);
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    int failed = 0;
    for (const auto& r : run_suite(parse_suite(suite), seed)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.suite << ": " << r.name;
        if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
        std::cout << '\n';
        failed += !r.passed;
    }
    std::cout << (failed ? std::to_string(failed) + " check(s) failed\n" : "all checks passed\n");
    return failed ? 1 : 0;
}

int cmd_extract(const std::string& model, double g_value, const std::string& parity_name) {
    const Parity parity = parse_parity(parity_name);
    StepOperatorExtraction ex;
    if (parse_model(model) == Model::free) {
        if (g_value != std::floor(g_value) || std::abs(g_value) > 1e15)
            throw InvalidSpec("--g must be an integer (coefficients are exact integers)");
        ex = extract_step_operator(local_factor_free(static_cast<std::int64_t>(g_value), parity), 2, parity);
    } else {
        ex = extract_step_operator(local_factor_interacting(), 4, parity);
    }
    const std::size_t d = ex.dim();
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) std::cout << (c ? "," : "") << ex.at(r, c);
        std::cout << '\n';
    }
    std::cerr << "eta = " << ex.eta << '\n';
    const auto uj = ex.unique_jump();
    std::cerr << "unique jump: " << (uj ? "yes" : "no") << '\n';
    if (const auto gauge = sign_gauge_search(ex)) {
        std::cerr << "gauge: " << to_string(gauge->kind) << " (similarity possible: "
                  << (gauge->similarity_possible ? "yes" : "no") << ")\n";
        auto signs = [](const std::vector<std::int8_t>& v) {
            std::string s;
            for (auto x : v) s += x > 0 ? '+' : '-';
            return s;
        };
        std::cerr << "d_out: " << signs(gauge->d_out) << "\nd_in:  " << signs(gauge->d_in) << '\n';
        const Model m = parse_model(model);
        const SignedPermutation rule = m == Model::free ? from_block_rule(Model::free) : from_block_rule(m);
        std::cerr << "gauged operator equals the block rule: " << (gauge->gauged == rule ? "yes" : "no") << '\n';
    } else {
        std::cerr << "gauge: none\n";
    }
    return 0;
}

struct IsingArgs {
    double beta = 1.0;
    long long sweeps = 10000;
    long long burn_in = 1000;
    std::uint64_t seed = 1;
    int n_x = 2;
    int T = 4;
    std::string initial;
    int chains = 4;
    int replicas = 1;
    bool enumerate = false;
};

int cmd_ising(const IsingArgs& a) {
    const LayerConfig init = a.initial.empty() ? LayerConfig(a.n_x) : LayerConfig::from_string(a.initial);
    if (init.n_x() != a.n_x) throw InvalidSpec("--initial length differs from --nx");
    const auto obs = field_observables::defaults();
    MetropolisOptions opt;
    opt.beta = a.beta;
    opt.sweeps = a.sweeps;
    opt.burn_in = a.burn_in;
    opt.seed = a.seed;
    opt.n_chains = a.chains;
    opt.replicas = a.replicas;
    const auto m = metropolis_sample(init, a.T, opt, obs);
    std::cout << "# boundary: " << m.boundary << ", initial layer " << init.to_string() << '\n';
    std::cout << "# beta " << a.beta << ", sweeps " << m.sweeps << " x " << m.n_chains << " chains, seed " << m.seed
              << ", replicas " << a.replicas << ", acceptance " << m.acceptance_rate;
    if (a.replicas > 1) std::cout << ", swap rate " << m.swap_rate;
    std::cout << '\n';
    std::cout << "method,observable,value,stderr\n";
    std::cout.precision(12);
    for (std::size_t i = 0; i < m.names.size(); ++i)
        std::cout << "metropolis," << m.names[i] << ',' << m.mean[i] << ',' << m.error[i] << '\n';
    if (a.enumerate) {
        const auto e = enumerate_boltzmann(init, a.T, a.beta, obs);
        for (std::size_t i = 0; i < e.names.size(); ++i)
            std::cout << "exact," << e.names[i] << ',' << e.expectations[i] << ",0\n";
    }
    return 0;
}

int cmd_bench(int n_x, long long steps, const std::string& baseline_file, bool write_baseline, double threshold) {
    const auto r = measure_half_step_rate(n_x, steps);
    std::cout << "n_x " << r.n_x << ", " << r.n_half_steps << " half steps in " << r.seconds << " s: "
              << r.site_updates_per_second << " site-updates/s\n";
    if (baseline_file.empty()) return 0;
    if (write_baseline) {
        std::ofstream out(baseline_file);
        nlohmann::json j = {{"n_x", n_x}, {"n_half_steps", steps}, {"site_updates_per_second", r.site_updates_per_second}};
        out << j.dump(2) << '\n';
        std::cout << "baseline written to " << baseline_file << '\n';
        return 0;
    }
    std::ifstream in(baseline_file);
    if (!in) throw std::runtime_error("cannot read baseline " + baseline_file);
    const double base = nlohmann::json::parse(in).at("site_updates_per_second").get<double>();
    const bool ok = r.site_updates_per_second >= threshold * base;
    std::cout << "baseline " << base << ", ratio " << r.site_updates_per_second / base << (ok ? " ok\n" : " REGRESSION\n");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cellular automaton for an interacting fermion model"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(library_version()));

    std::string config, out_dir = ".";
    auto* run = app.add_subcommand("run", "Run a scenario config");
    run->add_option("config", config, "Scenario JSON file")->required();
    run->add_option("--out", out_dir, "Directory for output files");

    std::string expect_config;
    auto* expect = app.add_subcommand("expect", "Print observable expectations for a scenario");
    expect->add_option("config", expect_config, "Scenario JSON file")->required();

    std::string suite = "all";
    std::uint64_t verify_seed = 1;
    auto* verify = app.add_subcommand("verify", "Run self-check suites");
    verify->add_option("--suite", suite, "conservation, equivalence, ising or all")
        ->check(CLI::IsMember({"conservation", "equivalence", "ising", "all"}));
    verify->add_option("--seed", verify_seed);

    std::string model = "interacting", parity = "even";
    double g = 1.0;
    auto* extract = app.add_subcommand("extract-op", "Extract a step operator from its Grassmann local factor");
    extract->add_option("--model", model)->check(CLI::IsMember({"free", "interacting"}));
    extract->add_option("--g", g, "Quartic coupling of the free factor (integer)");
    extract->add_option("--parity", parity)->check(CLI::IsMember({"even", "odd"}));

    IsingArgs ia;
    auto* ising = app.add_subcommand("ising", "Metropolis sampling of the generalized Ising model");
    ising->add_option("--beta", ia.beta);
    ising->add_option("--sweeps", ia.sweeps);
    ising->add_option("--burn-in", ia.burn_in);
    ising->add_option("--seed", ia.seed);
    ising->add_option("--nx", ia.n_x);
    ising->add_option("--T", ia.T, "Number of free time layers");
    ising->add_option("--initial", ia.initial, "Fixed boundary layer, e.g. R. (default empty)");
    ising->add_option("--chains", ia.chains);
    ising->add_option("--replicas", ia.replicas, "Replica-exchange ladder size (1 = plain Metropolis)");
    ising->add_flag("--enumerate", ia.enumerate, "Also print the exact enumeration (tiny lattices)");

    int bench_nx = 4096;
    long long bench_steps = 20000;
    std::string baseline;
    bool write_baseline = false;
    double threshold = 0.5;
    auto* bench = app.add_subcommand("bench", "Measure packed half-step throughput");
    bench->add_option("--nx", bench_nx);
    bench->add_option("--steps", bench_steps);
    bench->add_option("--baseline", baseline, "Baseline JSON to compare against (or write)");
    bench->add_flag("--write-baseline", write_baseline);
    bench->add_option("--threshold", threshold, "Fraction of the baseline that must be reached");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(config, out_dir);
        if (*expect) return cmd_expect(expect_config);
        if (*verify) return cmd_verify(suite, verify_seed);
        if (*extract) return cmd_extract(model, g, parity);
        if (*ising) return cmd_ising(ia);
        if (*bench) return cmd_bench(bench_nx, bench_steps, baseline, write_baseline, threshold);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
