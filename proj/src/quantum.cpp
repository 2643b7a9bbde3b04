#include "pca/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pca {

void require_exact_size(int n_x) {
    require_valid_n_x(n_x);
    if (n_x > kMaxExactSites) {
        throw InvalidSpec("exact evolution supports n_x <= " + std::to_string(kMaxExactSites) + ", got " +
                          std::to_string(n_x));
    }
}

double WaveFunction::norm_squared() const {
    std::vector<double> sq(amplitudes.size());
    std::transform(amplitudes.begin(), amplitudes.end(), sq.begin(), [](double v) { return v * v; });
    std::sort(sq.begin(), sq.end());
    double s = 0.0;
    for (double v : sq) s += v;
    return s;
}

WaveFunction from_sharp_config(const LayerConfig& layer, long long m_t) {
    require_exact_size(layer.n_x());
    WaveFunction wf;
    wf.n_x = layer.n_x();
    wf.m_t = m_t;
    wf.amplitudes.assign(std::size_t{1} << (2 * layer.n_x()), 0.0);
    wf.amplitudes[layer.to_index()] = 1.0;
    return wf;
}

WaveFunction from_distribution(int n_x, std::span<const double> p, std::optional<std::span<const std::int8_t>> signs,
                               long long m_t) {
    require_exact_size(n_x);
    const std::size_t dim = std::size_t{1} << (2 * n_x);
    if (p.size() != dim) throw DimensionMismatch("probability vector length != 2^(2 n_x)");
    if (signs && signs->size() != dim) throw DimensionMismatch("sign vector length != 2^(2 n_x)");
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw std::invalid_argument("probabilities must be nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("probabilities do not sum to 1");
    WaveFunction wf;
    wf.n_x = n_x;
    wf.m_t = m_t;
    wf.amplitudes.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        double s = 1.0;
        if (signs) {
            const int v = (*signs)[i];
            if (v != 1 && v != -1) throw std::invalid_argument("signs must be +-1");
            s = v;
        }
        wf.amplitudes[i] = s * std::sqrt(p[i]);
    }
    return wf;
}

ExactEvolver::ExactEvolver(int n_x, Model model) : n_x_(n_x), model_(model) {
    require_exact_size(n_x);
    const SignedPermutation rule = two_color_block_rule(model);
    even_ = lift_to_lattice(rule, block_partition(Parity::even, n_x), n_x);
    odd_ = lift_to_lattice(rule, block_partition(Parity::odd, n_x), n_x);
}

void ExactEvolver::evolve_in_place(WaveFunction& wf, long long n_half_steps) const {
    if (wf.n_x != n_x_) throw DimensionMismatch("wave function and evolver lattice sizes differ");
    if (n_half_steps < 0) throw std::invalid_argument("n_half_steps must be non-negative");
    std::vector<double> scratch(wf.dim());
    for (long long k = 0; k < n_half_steps; ++k) {
        step(wf.parity()).apply(wf.amplitudes, scratch);
        wf.amplitudes.swap(scratch);
        ++wf.m_t;
    }
}

WaveFunction evolve_wf(const WaveFunction& wf, long long n_half_steps, Model model) {
    WaveFunction out = wf;
    ExactEvolver(wf.n_x, model).evolve_in_place(out, n_half_steps);
    return out;
}

std::vector<double> probabilities(const WaveFunction& wf) {
    std::vector<double> p(wf.dim());
    std::transform(wf.amplitudes.begin(), wf.amplitudes.end(), p.begin(), [](double v) { return v * v; });
    return p;
}

std::vector<double> observable_values(const DiagonalObservable& obs, int n_x, long long m_t) {
    require_exact_size(n_x);
    const std::size_t dim = std::size_t{1} << (2 * n_x);
    std::vector<double> a(dim);
    for (std::size_t i = 0; i < dim; ++i) a[i] = obs.value(LayerConfig::from_index(n_x, i), m_t);
    return a;
}

double expectation(const WaveFunction& wf, const DiagonalObservable& obs) {
    double s = 0.0;
    for (std::size_t i = 0; i < wf.dim(); ++i) {
        const double q = wf.amplitudes[i];
        if (q == 0.0) continue;
        s += obs.value(LayerConfig::from_index(wf.n_x, i), wf.m_t) * q * q;
    }
    return s;
}

namespace observables {

DiagonalObservable particle_number() {
    return {"N", [](const LayerConfig& l, long long) { return double(l.count()); }};
}

DiagonalObservable color_count(Color c) {
    return {c == Color::R ? "N_R" : "N_I", [c](const LayerConfig& l, long long) { return double(l.count(c)); }};
}

DiagonalObservable right_movers() {
    return {"right_movers", [](const LayerConfig& l, long long t) { return double(l.right_movers(t)); }};
}

DiagonalObservable left_movers() {
    return {"left_movers", [](const LayerConfig& l, long long t) { return double(l.left_movers(t)); }};
}

DiagonalObservable color_parity(Color c) {
    return {c == Color::R ? "parity_R" : "parity_I",
            [c](const LayerConfig& l, long long) { return double(l.count(c) % 2); }};
}

DiagonalObservable occupation(int site, Color c) {
    return {std::string(c == Color::R ? "n_R(" : "n_I(") + std::to_string(site) + ")",
            [site, c](const LayerConfig& l, long long) {
                if (site < 0 || site >= l.n_x()) throw InvalidSpec("observable site outside the lattice");
                return l.get(site, c) ? 1.0 : 0.0;
            }};
}

DiagonalObservable parse(const std::string& name) {
    if (name == "N") return particle_number();
    if (name == "N_R") return color_count(Color::R);
    if (name == "N_I") return color_count(Color::I);
    if (name == "right_movers") return right_movers();
    if (name == "left_movers") return left_movers();
    if (name == "parity_R") return color_parity(Color::R);
    if (name == "parity_I") return color_parity(Color::I);
    if (name.size() > 5 && (name.rfind("n_R(", 0) == 0 || name.rfind("n_I(", 0) == 0) && name.back() == ')') {
        const std::string digits = name.substr(4, name.size() - 5);
        if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
            return occupation(std::stoi(digits), name[2] == 'R' ? Color::R : Color::I);
        }
    }
    throw InvalidSpec("unknown observable '" + name + "'");
}

} // namespace observables

OneParticleState::OneParticleState(int n_x_) : n_x(n_x_) {
    require_valid_n_x(n_x);
    right.assign(n_x, 0.0);
    left.assign(n_x, 0.0);
}

OneParticleState OneParticleState::delta(int n_x, int site, std::complex<double> amp) {
    OneParticleState s(n_x);
    if (site < 0 || site >= n_x) throw InvalidSpec("site outside the lattice");
    (site % 2 == 0 ? s.right : s.left)[site] = amp;
    return s;
}

OneParticleState OneParticleState::plane_wave(int n_x, int component, int k) {
    if (component != 1 && component != 2) throw InvalidSpec("component must be 1 or 2");
    OneParticleState s(n_x);
    const double p = 2.0 * std::numbers::pi * k / n_x;
    const double norm = 1.0 / std::sqrt(n_x / 2.0);
    auto& comp = component == 1 ? s.right : s.left;
    for (int x = component - 1; x < n_x; x += 2) comp[x] = std::polar(norm, p * x);
    return s;
}

double OneParticleState::norm_squared() const noexcept {
    double s = 0.0;
    for (int x = 0; x < n_x; ++x) s += std::norm(right[x]) + std::norm(left[x]);
    return s;
}

OneParticleState one_particle_double_step(const OneParticleState& s, Model model) {
    OneParticleState out(s.n_x);
    for (int x = 0; x < s.n_x; ++x) {
        const std::complex<double> amp = x % 2 == 0 ? s.right[x] : s.left[x];
        if (amp == 0.0) continue;
        for (Color c : {Color::R, Color::I}) {
            LayerConfig l(s.n_x);
            l.set(x, c, true);
            const LayerConfig moved = double_step(l, model);
            int dest = -1;
            for (int y = 0; y < s.n_x; ++y) {
                if (moved.get(y, c)) dest = y;
            }
            if (dest < 0 || moved.count() != 1) throw std::logic_error("single particle changed color or vanished");
            const double part = c == Color::R ? amp.real() : amp.imag();
            auto& comp = dest % 2 == 0 ? out.right : out.left;
            comp[dest] += c == Color::R ? std::complex<double>(part, 0.0) : std::complex<double>(0.0, part);
        }
    }
    return out;
}

DispersionResult dispersion_check(int n_x) {
    require_valid_n_x(n_x);
    DispersionResult r;
    for (int component : {1, 2}) {
        for (int k = 0; k < n_x / 2; ++k) {
            const double p = 2.0 * std::numbers::pi * k / n_x;
            const std::complex<double> expected = std::polar(1.0, component == 1 ? -2.0 * p : 2.0 * p);
            const OneParticleState in = OneParticleState::plane_wave(n_x, component, k);
            const OneParticleState out = one_particle_double_step(in);
            const auto& ci = component == 1 ? in.right : in.left;
            const auto& co = component == 1 ? out.right : out.left;
            const auto& other = component == 1 ? out.left : out.right;
            std::complex<double> overlap = 0.0;
            for (int x = 0; x < n_x; ++x) {
                overlap += std::conj(ci[x]) * co[x];
                r.max_deviation = std::max(r.max_deviation, std::abs(co[x] - expected * ci[x]));
                r.max_deviation = std::max(r.max_deviation, std::abs(other[x]));
            }
            (component == 1 ? r.right_eigenvalues : r.left_eigenvalues).push_back(overlap);
        }
    }
    return r;
}

ProductDistribution ProductDistribution::independent(int n_x, double p_red, double p_green) {
    require_valid_n_x(n_x);
    ProductDistribution d;
    const double r = p_red, g = p_green;
    d.site_probs.assign(n_x, {(1 - r) * (1 - g), r * (1 - g), (1 - r) * g, r * g});
    d.validate();
    return d;
}

ProductDistribution ProductDistribution::sharp(const LayerConfig& layer) {
    ProductDistribution d;
    d.site_probs.assign(layer.n_x(), {0.0, 0.0, 0.0, 0.0});
    for (int x = 0; x < layer.n_x(); ++x) d.site_probs[x][layer.site_bits(x)] = 1.0;
    return d;
}

void ProductDistribution::validate() const {
    require_valid_n_x(n_x());
    for (const auto& site : site_probs) {
        double total = 0.0;
        for (double v : site) {
            if (!(v >= 0.0) || v > 1.0) throw std::invalid_argument("site probabilities must lie in [0, 1]");
            total += v;
        }
        if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("site probabilities do not sum to 1");
    }
}

LayerConfig ProductDistribution::draw(CounterRng& rng) const {
    LayerConfig l(n_x());
    for (int x = 0; x < n_x(); ++x) {
        const double u = rng.uniform();
        double acc = 0.0;
        unsigned state = 3;
        for (unsigned s = 0; s < 4; ++s) {
            acc += site_probs[x][s];
            if (u < acc) {
                state = s;
                break;
            }
        }
        // guard against rounding in the cumulative sum: never pick a zero-probability state
        while (site_probs[x][state] == 0.0 && state > 0) --state;
        l.set_site_bits(x, state);
    }
    return l;
}

std::vector<double> ProductDistribution::joint() const {
    require_exact_size(n_x());
    const std::size_t dim = std::size_t{1} << (2 * n_x());
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        double v = 1.0;
        for (int x = 0; x < n_x() && v != 0.0; ++x) v *= site_probs[x][(i >> (2 * x)) & 3u];
        p[i] = v;
    }
    return p;
}

SampleEstimates sample_evolve(const ProductDistribution& dist, long long n_samples, long long n_half_steps,
                              const std::vector<DiagonalObservable>& obs, std::uint64_t seed, Model model) {
    dist.validate();
    if (n_samples < 1) throw std::invalid_argument("n_samples must be positive");
    if (n_half_steps < 0) throw std::invalid_argument("n_half_steps must be non-negative");
    const std::size_t n_layers = static_cast<std::size_t>(n_half_steps) + 1;
    SampleEstimates est;
    est.seed = seed;
    est.n_samples = n_samples;
    for (const auto& o : obs) est.names.push_back(o.name);
    for (std::size_t k = 0; k < n_layers; ++k) est.times.push_back(static_cast<long long>(k));
    // Welford accumulators
    std::vector<std::vector<double>> mean(n_layers, std::vector<double>(obs.size(), 0.0));
    std::vector<std::vector<double>> m2(n_layers, std::vector<double>(obs.size(), 0.0));

    for (long long i = 0; i < n_samples; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        LayerConfig layer = dist.draw(rng);
        const double n = static_cast<double>(i + 1);
        for (std::size_t k = 0; k < n_layers; ++k) {
            if (k > 0) half_step_in_place(layer, parity_of(static_cast<long long>(k - 1)), model);
            for (std::size_t j = 0; j < obs.size(); ++j) {
                const double v = obs[j].value(layer, static_cast<long long>(k));
                const double d = v - mean[k][j];
                mean[k][j] += d / n;
                m2[k][j] += d * (v - mean[k][j]);
            }
        }
    }
    est.mean = mean;
    est.std_error.assign(n_layers, std::vector<double>(obs.size(), 0.0));
    if (n_samples > 1) {
        const double n = static_cast<double>(n_samples);
        for (std::size_t k = 0; k < n_layers; ++k)
            for (std::size_t j = 0; j < obs.size(); ++j) est.std_error[k][j] = std::sqrt(m2[k][j] / (n - 1) / n);
    }
    return est;
}

} // namespace pca
