#include "pca/verify.hpp"

#include "pca/automaton.hpp"
#include "pca/grassmann.hpp"
#include "pca/ising.hpp"
#include "pca/operators.hpp"
#include "pca/rng.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace pca {

namespace {

LayerConfig random_layer(int n_x, CounterRng& rng) {
    LayerConfig l(n_x);
    for (int x = 0; x < n_x; ++x) l.set_site_bits(x, static_cast<unsigned>(rng.below(4)));
    return l;
}

int parity_of_count(int c) { return c & 1; }

std::vector<CheckResult> conservation_suite(std::uint64_t seed) {
    std::vector<CheckResult> out;
    const int n_x = 64, n_traj = 20;
    const long long steps = 2000;
    int bad_movers = 0, bad_parity = 0;
    for (int i = 0; i < n_traj; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        LayerConfig l = random_layer(n_x, rng);
        const int r0 = l.right_movers(0), l0 = l.left_movers(0);
        const int pr = parity_of_count(l.count(Color::R)), pi = parity_of_count(l.count(Color::I));
        for (long long k = 0; k < steps; ++k) {
            half_step_in_place(l, parity_of(k), Model::interacting);
            bad_movers += l.right_movers(k + 1) != r0 || l.left_movers(k + 1) != l0;
            bad_parity += parity_of_count(l.count(Color::R)) != pr || parity_of_count(l.count(Color::I)) != pi;
        }
    }
    out.push_back({"conservation", "mover counts", bad_movers == 0, std::to_string(bad_movers) + " violations"});
    out.push_back({"conservation", "color parities", bad_parity == 0, std::to_string(bad_parity) + " violations"});

    int bad_inverse = 0, bad_kernel = 0;
    for (int i = 0; i < 200; ++i) {
        CounterRng rng(seed, 1000 + static_cast<std::uint64_t>(i));
        const LayerConfig l = random_layer(256, rng);
        const auto tr = evolve(l, 101);
        bad_inverse += evolve_backward(tr.layers.back(), 101, Model::interacting, Parity::even) != l;
        for (Parity p : {Parity::even, Parity::odd})
            for (Model m : {Model::free, Model::interacting}) bad_kernel += half_step(l, p, m) != half_step_reference(l, p, m);
    }
    out.push_back({"conservation", "forward then inverse", bad_inverse == 0, std::to_string(bad_inverse) + " mismatches"});
    out.push_back({"conservation", "packed kernel vs reference", bad_kernel == 0, std::to_string(bad_kernel) + " mismatches"});
    return out;
}

std::vector<CheckResult> equivalence_suite() {
    std::vector<CheckResult> out;
    bool free_ok = true;
    for (std::int64_t g : {0, 1, 2}) {
        for (Parity p : {Parity::even, Parity::odd}) {
            const auto s = extract_step_operator(local_factor_free(g, p), 2, p);
            // transport of the single-occupied states, g - 1 on the empty (odd) or full (even) state
            const int sgn = p == Parity::even ? -1 : 1;
            for (std::size_t r = 0; r < 4; ++r) {
                for (std::size_t c = 0; c < 4; ++c) {
                    std::int64_t want = 0;
                    if ((r == 1 && c == 2) || (r == 2 && c == 1)) want = sgn;
                    if (r == 0 && c == 0) want = p == Parity::even ? 1 : g - 1;
                    if (r == 3 && c == 3) want = p == Parity::even ? g - 1 : 1;
                    free_ok = free_ok && s.at(r, c) == want;
                }
            }
        }
    }
    out.push_back({"equivalence", "free step operator at g = 0, 1, 2", free_ok, ""});

    const auto g2 = sign_gauge_search(extract_step_operator(local_factor_free(2, Parity::even), 2, Parity::even));
    out.push_back({"equivalence", "free g = 2 gauges to the switch rule",
                   g2 && g2->gauged == from_block_rule(Model::free), ""});

    const auto ex = extract_step_operator(local_factor_interacting(), 4, Parity::even);
    const auto uj = ex.unique_jump();
    out.push_back({"equivalence", "interacting operator is unique-jump", uj.has_value(), ""});
    const auto gauge = sign_gauge_search(ex);
    const bool eq = gauge && gauge->gauged == from_block_rule(Model::interacting);
    out.push_back({"equivalence", "interacting operator gauges to the rule table", eq,
                   gauge ? "gauge " + std::string(to_string(gauge->kind)) : "no gauge"});

    bool lift_ok = true;
    for (Parity p : {Parity::even, Parity::odd}) {
        const auto lifted = lift_to_lattice(two_color_block_rule(Model::interacting), block_partition(p, 4), 4);
        for (std::uint64_t i = 0; i < lifted.dim(); ++i)
            lift_ok = lift_ok && lifted.target(i) == half_step(LayerConfig::from_index(4, i), p).to_index();
    }
    out.push_back({"equivalence", "lifted operator matches the automaton at n_x = 4", lift_ok, ""});
    return out;
}

std::vector<CheckResult> ising_suite() {
    std::vector<CheckResult> out;
    const auto& table = block_rule_table(Model::interacting);
    int bad = 0;
    for (double beta : {1.0, 5.0, 20.0}) {
        for (unsigned in = 0; in < 16; ++in) {
            for (unsigned up = 0; up < 16; ++up) {
                const auto tr = BlockTransition::from_layers(BlockState(in), BlockState(up));
                const double a = block_action(tr, beta);
                const bool allowed = table[in] == up;
                bad += allowed ? a != 0.0 : a < 2.0 * beta;
            }
        }
    }
    out.push_back({"ising", "block action vanishes exactly on automaton transitions", bad == 0,
                   std::to_string(bad) + " mismatches"});
    const DenseOperator s = limit_step_operator(20.0);
    double worst = 0.0;
    bool targets = true;
    for (std::size_t c = 0; c < 16; ++c) {
        for (std::size_t r = 0; r < 16; ++r) {
            if (table[c] == r) targets = targets && s(r, c) == 1.0;
            else worst = std::max(worst, s(r, c));
        }
    }
    std::ostringstream d;
    d << "largest off-target entry " << worst;
    out.push_back({"ising", "beta = 20 limit operator", targets && worst <= std::exp(-40.0), d.str()});

    const auto init = LayerConfig::from_string("R.");
    const auto e = enumerate_boltzmann(init, 4, 20.0, {field_observables::on_trajectory()});
    out.push_back({"ising", "large beta concentrates on the trajectory", e.expectations[0] > 1.0 - 1e-12, ""});
    return out;
}

} // namespace

Suite parse_suite(std::string_view s) {
    if (s == "conservation") return Suite::conservation;
    if (s == "equivalence") return Suite::equivalence;
    if (s == "ising") return Suite::ising;
    if (s == "all") return Suite::all;
    throw std::invalid_argument("unknown suite '" + std::string(s) + "'");
}

ThroughputResult measure_half_step_rate(int n_x, long long n_half_steps, int repeats, std::uint64_t seed) {
    CounterRng rng(seed, 0);
    const LayerConfig start = random_layer(n_x, rng);
    ThroughputResult best;
    best.n_x = n_x;
    best.n_half_steps = n_half_steps;
    for (int r = 0; r < std::max(1, repeats); ++r) {
        LayerConfig l = start;
        const auto t0 = std::chrono::steady_clock::now();
        for (long long k = 0; k < n_half_steps; ++k) half_step_in_place(l, parity_of(k), Model::interacting);
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::uint64_t sum = 0;
        for (auto w : l.words()) sum = splitmix64(sum ^ w);
        const double rate = static_cast<double>(n_x) * static_cast<double>(n_half_steps) / dt;
        if (rate > best.site_updates_per_second) {
            best.seconds = dt;
            best.site_updates_per_second = rate;
        }
        best.checksum = sum;
    }
    return best;
}

std::vector<CheckResult> run_suite(Suite suite, std::uint64_t seed) {
    std::vector<CheckResult> out;
    auto append = [&](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
    if (suite == Suite::conservation || suite == Suite::all) append(conservation_suite(seed));
    if (suite == Suite::equivalence || suite == Suite::all) append(equivalence_suite());
    if (suite == Suite::ising || suite == Suite::all) append(ising_suite());
    return out;
}

} // namespace pca
