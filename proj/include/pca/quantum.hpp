#pragma once

#include "pca/automaton.hpp"
#include "pca/operators.hpp"
#include "pca/rng.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pca {

inline constexpr int kMaxExactSites = kMaxLiftedBits / 2;

// Real classical wave function over all 2^(2 n_x) layers of a small lattice.
// Index = LayerConfig::to_index(); m_t is the time of the layer, and the next
// half step has parity parity_of(m_t).
struct WaveFunction {
    int n_x = 0;
    long long m_t = 0;
    std::vector<double> amplitudes;

    std::size_t dim() const noexcept { return amplitudes.size(); }
    Parity parity() const noexcept { return parity_of(m_t); }
    // Sum of squares accumulated in sorted order, so any permutation of the
    // components gives a bit-identical result.
    double norm_squared() const;
};

void require_exact_size(int n_x);

WaveFunction from_sharp_config(const LayerConfig& layer, long long m_t = 0);
// q = signs * sqrt(p). p must be nonnegative and sum to 1 within 1e-12.
WaveFunction from_distribution(int n_x, std::span<const double> p,
                               std::optional<std::span<const std::int8_t>> signs = std::nullopt,
                               long long m_t = 0);

// Lifted half-step permutations for one lattice size and model, built once.
class ExactEvolver {
public:
    ExactEvolver(int n_x, Model model = Model::interacting);

    int n_x() const noexcept { return n_x_; }
    Model model() const noexcept { return model_; }
    const SignedPermutation& step(Parity p) const noexcept { return p == Parity::even ? even_ : odd_; }

    void evolve_in_place(WaveFunction& wf, long long n_half_steps) const;

private:
    int n_x_;
    Model model_;
    SignedPermutation even_, odd_;
};

WaveFunction evolve_wf(const WaveFunction& wf, long long n_half_steps, Model model = Model::interacting);

std::vector<double> probabilities(const WaveFunction& wf);

// A_tau as a function of the decoded layer and its time m_t.
struct DiagonalObservable {
    std::string name;
    std::function<double(const LayerConfig&, long long)> value;
};

double expectation(const WaveFunction& wf, const DiagonalObservable& obs);
std::vector<double> observable_values(const DiagonalObservable& obs, int n_x, long long m_t);

namespace observables {
DiagonalObservable particle_number();
DiagonalObservable color_count(Color c);
DiagonalObservable right_movers();
DiagonalObservable left_movers();
DiagonalObservable color_parity(Color c);
DiagonalObservable occupation(int site, Color c);
// Parses names such as "N", "N_R", "N_I", "right_movers", "left_movers",
// "parity_R", "parity_I", "n_R(3)", "n_I(0)".
DiagonalObservable parse(const std::string& name);
} // namespace observables

// One-particle sector at even time. Component 1 (right movers) lives on even sites,
// component 2 (left movers) on odd sites; amplitude = q_R + i q_I.
struct OneParticleState {
    int n_x = 0;
    std::vector<std::complex<double>> right; // indexed by site, zero on odd sites
    std::vector<std::complex<double>> left;  // indexed by site, zero on even sites

    explicit OneParticleState(int n_x_ = 2);
    static OneParticleState delta(int n_x, int site, std::complex<double> amp = 1.0);
    // e^{ipx} / sqrt(n_x / 2) on the component's sublattice, p = 2 pi k / n_x.
    static OneParticleState plane_wave(int n_x, int component, int k);

    double norm_squared() const noexcept;
};

// One double step of the automaton restricted to single-particle layers.
OneParticleState one_particle_double_step(const OneParticleState& s, Model model = Model::interacting);

struct DispersionResult {
    double max_deviation = 0.0;
    // eigenvalue measured on each plane wave, k in [0, n_x/2)
    std::vector<std::complex<double>> right_eigenvalues, left_eigenvalues;
};

// Plane waves on both sublattices against e^{-2ip} (right) and e^{+2ip} (left).
DispersionResult dispersion_check(int n_x);

// Independent per-site distribution over the four site states (index = R | I << 1).
struct ProductDistribution {
    std::vector<std::array<double, 4>> site_probs;

    static ProductDistribution independent(int n_x, double p_red, double p_green);
    static ProductDistribution sharp(const LayerConfig& layer);
    int n_x() const noexcept { return static_cast<int>(site_probs.size()); }
    void validate() const;
    LayerConfig draw(CounterRng& rng) const;
    // Full probability vector; requires an exact-size lattice.
    std::vector<double> joint() const;
};

struct SampleEstimates {
    std::vector<std::string> names;
    std::vector<long long> times;         // m_t per recorded layer
    std::vector<std::vector<double>> mean;   // [layer][observable]
    std::vector<std::vector<double>> std_error; // [layer][observable], standard error of the mean
    std::uint64_t seed = 0;
    long long n_samples = 0;
};

// Draws layers from dist, evolves each deterministically from m_t = 0 and averages the
// observables at every layer. Sample i uses stream i of the counter generator.
SampleEstimates sample_evolve(const ProductDistribution& dist, long long n_samples, long long n_half_steps,
                              const std::vector<DiagonalObservable>& obs, std::uint64_t seed,
                              Model model = Model::interacting);

} // namespace pca
