#include "pca/ising.hpp"

#include "pca/rng.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace pca {

namespace {

struct Corner {
    int r, i;
};

Corner corner(unsigned site_bits) { return {int(site_bits & 1u), int((site_bits >> 1) & 1u)}; }

} // namespace

double l_free(const BlockTransition& tr, double beta) noexcept {
    return 2.0 * beta * std::popcount(static_cast<unsigned>(tr.tau_out.bits ^ tr.tau_in.bits));
}

int l2_term(const BlockTransition& tr) noexcept {
    const Corner n1 = corner(tr.tau_in.left()), n2 = corner(tr.tau_in.right());
    const Corner p1 = corner(tr.tau_out.left()), p2 = corner(tr.tau_out.right());
    return (p1.r * p2.i - p1.i * p2.r) * (n1.r * n2.i - n1.i * n2.r) +
           (p1.r * p2.r - p1.i * p2.i) * (n1.r * n2.r - n1.i * n2.i);
}

double l_int(const BlockTransition& tr, double beta) noexcept {
    const Corner n1 = corner(tr.tau_in.left()), n2 = corner(tr.tau_in.right());
    const Corner p1 = corner(tr.tau_out.left()), p2 = corner(tr.tau_out.right());
    const int proj = projector_single(p1.r, p1.i) * projector_single(p2.r, p2.i) * projector_single(n1.r, n1.i) *
                     projector_single(n2.r, n2.i);
    if (proj == 0) return 0.0;
    return 8.0 * beta * l2_term(tr);
}

double block_action(const BlockTransition& tr, double beta) noexcept { return l_free(tr, beta) + l_int(tr, beta); }

DenseOperator limit_step_operator(double beta) {
    DenseOperator s(16);
    for (unsigned rho = 0; rho < 16; ++rho) {
        for (unsigned tau = 0; tau < 16; ++tau) {
            s(tau, rho) = std::exp(-block_action(BlockTransition::from_layers(BlockState(rho), BlockState(tau)), beta));
        }
    }
    return s;
}

IsingField::IsingField(const LayerConfig& initial, int T_) : n_x(initial.n_x()), T(T_) {
    require_valid_n_x(n_x);
    if (T < 0) throw InvalidSpec("T must be non-negative");
    layers.assign(static_cast<std::size_t>(T) + 1, LayerConfig(n_x));
    layers[0] = initial;
}

IsingField IsingField::from_trajectory(const Trajectory& tr) {
    if (tr.layers.empty()) throw InvalidSpec("empty trajectory");
    if (tr.start_parity != Parity::even) throw InvalidSpec("Ising fields start with an even step");
    IsingField f(tr.layers.front(), static_cast<int>(tr.layers.size()) - 1);
    f.layers = tr.layers;
    return f;
}

std::uint64_t IsingField::index() const {
    if (n_free_bits() > 63) throw InvalidSpec("field too large to index");
    std::uint64_t idx = 0;
    const int bits = 2 * n_x;
    for (int k = T; k >= 1; --k) idx = (idx << bits) | layers[k].to_index();
    return idx;
}

IsingField IsingField::from_index(const LayerConfig& initial, int T, std::uint64_t index) {
    IsingField f(initial, T);
    if (f.n_free_bits() > 63) throw InvalidSpec("field too large to index");
    const int bits = 2 * f.n_x;
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1u;
    for (int k = 1; k <= T; ++k) {
        f.layers[k] = LayerConfig::from_index(f.n_x, index & mask);
        index >>= bits;
    }
    return f;
}

BlockTransition block_at(const IsingField& f, int step, const SitePair& pair) {
    const LayerConfig& lo = f.layers[step];
    const LayerConfig& up = f.layers[step + 1];
    return BlockTransition::from_layers(BlockState::from_sites(lo.site_bits(pair.left), lo.site_bits(pair.right)),
                                        BlockState::from_sites(up.site_bits(pair.left), up.site_bits(pair.right)));
}

namespace {

template <typename F>
void for_each_block(const IsingField& f, F&& fn) {
    const BlockPartition even = block_partition(Parity::even, f.n_x);
    const BlockPartition odd = block_partition(Parity::odd, f.n_x);
    for (int k = 0; k < f.T; ++k) {
        for (const SitePair& p : (k % 2 == 0 ? even : odd).pairs) fn(block_at(f, k, p));
    }
}

} // namespace

double total_action(const IsingField& f, double beta) {
    double s = 0.0;
    for_each_block(f, [&](const BlockTransition& tr) { s += block_action(tr, beta); });
    return s;
}

int count_violations(const IsingField& f) {
    int v = 0;
    for_each_block(f, [&](const BlockTransition& tr) { v += block_action(tr, 1.0) != 0.0; });
    return v;
}

double violation_density(const IsingField& f) {
    return f.n_blocks() == 0 ? 0.0 : static_cast<double>(count_violations(f)) / static_cast<double>(f.n_blocks());
}

namespace field_observables {

FieldObservable violation_density() {
    return {"violation_density", [](const IsingField& f) { return pca::violation_density(f); }};
}

FieldObservable on_trajectory() {
    return {"on_trajectory", [](const IsingField& f) {
                LayerConfig cur = f.layers[0];
                for (int k = 0; k < f.T; ++k) {
                    half_step_in_place(cur, parity_of(k), Model::interacting);
                    if (!(cur == f.layers[k + 1])) return 0.0;
                }
                return 1.0;
            }};
}

FieldObservable final_particle_number() {
    return {"final_N", [](const IsingField& f) { return double(f.layers.back().count()); }};
}

std::vector<FieldObservable> defaults() { return {violation_density(), on_trajectory(), final_particle_number()}; }

} // namespace field_observables

EnumerationResult enumerate_boltzmann(const LayerConfig& initial, int T, double beta,
                                      const std::vector<FieldObservable>& obs) {
    IsingField probe(initial, T);
    if (probe.n_free_bits() > kMaxEnumerationBits) {
        throw InvalidSpec("enumeration limited to " + std::to_string(kMaxEnumerationBits) + " free bits");
    }
    const std::size_t n = std::size_t{1} << probe.n_free_bits();
    EnumerationResult r;
    r.beta = beta;
    r.probabilities.resize(n);
    std::vector<double> action(n);
    double s_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        action[i] = total_action(IsingField::from_index(initial, T, i), beta);
        s_min = std::min(s_min, action[i]);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.probabilities[i] = std::exp(-(action[i] - s_min));
        z += r.probabilities[i];
    }
    for (auto& p : r.probabilities) p /= z;
    for (const auto& o : obs) r.names.push_back(o.name);
    r.expectations.assign(obs.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (r.probabilities[i] == 0.0) continue;
        const IsingField f = IsingField::from_index(initial, T, i);
        for (std::size_t j = 0; j < obs.size(); ++j) r.expectations[j] += r.probabilities[i] * obs[j].value(f);
    }
    return r;
}

SitePair block_containing(int step, int x, int n_x) {
    if (step % 2 == 0) {
        const int l = x - (x % 2);
        return {l, l + 1};
    }
    const int r = x + (x % 2);
    return {(r - 1 + n_x) % n_x, r % n_x};
}

double flip_delta_action(const IsingField& f, int layer, std::size_t bit, double beta) {
    if (layer < 1 || layer > f.T || bit >= 2 * static_cast<std::size_t>(f.n_x)) {
        throw InvalidSpec("flip outside the free part of the field");
    }
    const int x = static_cast<int>(bit / 2);
    const unsigned mask = 1u << (bit % 2);
    double delta = 0.0;
    for (int step : {layer - 1, layer}) {
        if (step >= f.T) continue;
        const SitePair p = block_containing(step, x, f.n_x);
        const BlockTransition before = block_at(f, step, p);
        BlockTransition after = before;
        // the flipped site sits in the upper layer of step layer-1 and the lower layer of step layer
        const unsigned shift = (p.left == x) ? 0u : 2u;
        if (step == layer - 1) {
            after = BlockTransition::from_layers(before.tau_in, BlockState(before.upper().bits ^ (mask << shift)));
        } else {
            after.tau_in = BlockState(before.tau_in.bits ^ (mask << shift));
        }
        delta += block_action(after, beta) - block_action(before, beta);
    }
    return delta;
}

MetropolisResult metropolis_sample(const LayerConfig& initial, int T, const MetropolisOptions& opt,
                                   const std::vector<FieldObservable>& obs) {
    if (opt.n_batches < 1 || opt.n_chains < 1 || opt.n_batches * opt.n_chains < 2 || opt.sweeps < opt.n_batches) {
        throw InvalidSpec("need sweeps >= n_batches and at least two batches in total");
    }
    if (opt.burn_in < 0 || !(opt.beta >= 0.0) || opt.replicas < 1) throw InvalidSpec("invalid Metropolis options");
    const IsingField start = IsingField::from_trajectory(evolve(initial, T, Model::interacting, Parity::even));
    const int bits_per_layer = 2 * start.n_x;

    MetropolisResult r;
    r.sweeps = opt.sweeps;
    r.seed = opt.seed;
    r.n_chains = opt.n_chains;
    for (const auto& o : obs) r.names.push_back(o.name);
    if (opt.record_histogram) {
        if (start.n_free_bits() > kMaxEnumerationBits) throw InvalidSpec("histogram requires a tiny lattice");
        r.histogram.assign(std::size_t{1} << start.n_free_bits(), 0);
    }
    // replica k runs at beta * k / (R - 1); the last one is the target
    const int n_rep = opt.replicas;
    std::vector<double> betas(n_rep, opt.beta);
    for (int k = 0; k + 1 < n_rep; ++k) betas[k] = opt.beta * k / (n_rep - 1);
    r.betas = betas;

    const long long batch_len = opt.sweeps / opt.n_batches;
    const long long measured = batch_len * opt.n_batches;
    // batch means of every chain, pooled
    std::vector<std::vector<double>> batch_mean;
    long long accepted = 0, proposed = 0, swaps_accepted = 0, swaps_proposed = 0;
    // Random scan: each proposal picks one of the free bits or, with probability 1/(N+1),
    // a null move; the null move keeps the chain aperiodic when every flip is accepted.
    const std::uint32_t n_choices = static_cast<std::uint32_t>(start.n_free_bits()) + 1u;

    for (int chain = 0; chain < opt.n_chains; ++chain) {
        std::vector<IsingField> rep(n_rep, start);
        // action at beta = 1 of each replica; the action is linear in beta
        std::vector<double> unit_action(n_rep, 0.0);
        CounterRng rng(opt.seed, static_cast<std::uint64_t>(chain));
        std::vector<double> sum(obs.size(), 0.0);
        for (long long sweep = 0; sweep < opt.burn_in + measured; ++sweep) {
            for (int k = 0; k < n_rep; ++k) {
                IsingField& f = rep[k];
                for (std::size_t p = 0; p < f.n_free_bits(); ++p) {
                    const std::uint32_t choice = rng.below(n_choices);
                    const bool target = k + 1 == n_rep;
                    proposed += target;
                    if (choice + 1u == n_choices) {
                        accepted += target;
                        continue;
                    }
                    const int layer = 1 + static_cast<int>(choice) / bits_per_layer;
                    const std::size_t b = choice % static_cast<std::uint32_t>(bits_per_layer);
                    const double unit_delta = flip_delta_action(f, layer, b, 1.0);
                    const double delta = betas[k] * unit_delta;
                    if (delta <= 0.0 || rng.uniform() < std::exp(-delta)) {
                        f.layers[layer].flip_bit(b);
                        unit_action[k] += unit_delta;
                        accepted += target;
                    }
                }
            }
            for (int k = 0; k + 1 < n_rep; ++k) {
                ++swaps_proposed;
                const double log_ratio = (betas[k + 1] - betas[k]) * (unit_action[k + 1] - unit_action[k]);
                if (log_ratio >= 0.0 || rng.uniform() < std::exp(log_ratio)) {
                    std::swap(rep[k], rep[k + 1]);
                    std::swap(unit_action[k], unit_action[k + 1]);
                    ++swaps_accepted;
                }
            }
            if (sweep < opt.burn_in) continue;
            const IsingField& f = rep.back();
            for (std::size_t j = 0; j < obs.size(); ++j) sum[j] += obs[j].value(f);
            if (opt.record_histogram) ++r.histogram[f.index()];
            if ((sweep - opt.burn_in + 1) % batch_len == 0) {
                for (auto& v : sum) v /= static_cast<double>(batch_len);
                batch_mean.push_back(sum);
                sum.assign(obs.size(), 0.0);
            }
        }
    }

    r.acceptance_rate = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
    r.swap_rate = swaps_proposed ? static_cast<double>(swaps_accepted) / static_cast<double>(swaps_proposed) : 0.0;
    r.mean.assign(obs.size(), 0.0);
    r.error.assign(obs.size(), 0.0);
    const double nb = static_cast<double>(batch_mean.size());
    for (std::size_t j = 0; j < obs.size(); ++j) {
        double mean = 0.0;
        for (const auto& bm : batch_mean) mean += bm[j];
        mean /= nb;
        double var = 0.0;
        for (const auto& bm : batch_mean) var += (bm[j] - mean) * (bm[j] - mean);
        r.mean[j] = mean;
        r.error[j] = std::sqrt(var / (nb - 1) / nb);
    }
    return r;
}

} // namespace pca
