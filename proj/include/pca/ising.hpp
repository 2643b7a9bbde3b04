#pragma once

#include "pca/automaton.hpp"
#include "pca/operators.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pca {

// One block between layer t (lower) and t+1 (upper). tau_out uses primed indexing:
// primed site 1 = upper-right corner (low nibble), primed site 2 = upper-left corner.
struct BlockTransition {
    BlockState tau_in;
    BlockState tau_out;

    // upper is in ordinary left/right indexing.
    static BlockTransition from_layers(BlockState lower, BlockState upper) noexcept {
        return {lower, upper.swapped()};
    }
    BlockState upper() const noexcept { return tau_out.swapped(); }
};

// 2 beta per occupation bit differing from diagonal transport (lower-left -> upper-right,
// lower-right -> upper-left).
double l_free(const BlockTransition& tr, double beta) noexcept;

// 1 iff exactly one of the two colors is present.
constexpr int projector_single(int n_R, int n_I) noexcept { return n_R * (1 - n_I) + n_I * (1 - n_R); }

// The color-exchange term L^(2), in units where the prefactor is 1.
int l2_term(const BlockTransition& tr) noexcept;
double l_int(const BlockTransition& tr, double beta) noexcept;
double block_action(const BlockTransition& tr, double beta) noexcept;

// exp(-block_action) as a 16x16 matrix, rows = upper state, columns = lower state.
DenseOperator limit_step_operator(double beta);

// Spacetime spin field: layers[0] is the fixed boundary, layers[1..T] are free.
// Periodic in x; the block between layers k and k+1 uses parity parity_of(k).
struct IsingField {
    int n_x = 0;
    int T = 0;
    std::vector<LayerConfig> layers;

    IsingField() = default;
    IsingField(const LayerConfig& initial, int T);
    static IsingField from_trajectory(const Trajectory& tr);

    std::size_t n_free_bits() const noexcept { return static_cast<std::size_t>(T) * 2 * n_x; }
    std::size_t n_blocks() const noexcept { return static_cast<std::size_t>(T) * n_x / 2; }
    // Free bits packed layer by layer (layer 1 first), only for n_free_bits <= 63.
    std::uint64_t index() const;
    static IsingField from_index(const LayerConfig& initial, int T, std::uint64_t index);
};

BlockTransition block_at(const IsingField& f, int step, const SitePair& pair);
double total_action(const IsingField& f, double beta);
int count_violations(const IsingField& f);
double violation_density(const IsingField& f);

// The block of the given step that contains site x.
SitePair block_containing(int step, int x, int n_x);
// Change of total_action when one free bit (layer >= 1) is flipped; touches at most two blocks.
double flip_delta_action(const IsingField& f, int layer, std::size_t bit, double beta);

struct FieldObservable {
    std::string name;
    std::function<double(const IsingField&)> value;
};

namespace field_observables {
FieldObservable violation_density();
// 1 if the field equals the automaton trajectory from its boundary layer
FieldObservable on_trajectory();
FieldObservable final_particle_number();
std::vector<FieldObservable> defaults();
} // namespace field_observables

inline constexpr std::size_t kMaxEnumerationBits = 24;

struct EnumerationResult {
    double beta = 0.0;
    std::vector<double> probabilities; // indexed by IsingField::index()
    std::vector<std::string> names;
    std::vector<double> expectations;
};

// Exact Boltzmann distribution exp(-S) / Z over all free fields.
EnumerationResult enumerate_boltzmann(const LayerConfig& initial, int T, double beta,
                                      const std::vector<FieldObservable>& obs);

struct MetropolisOptions {
    double beta = 1.0;
    long long sweeps = 10000;
    long long burn_in = 1000;
    std::uint64_t seed = 1;
    int n_batches = 20; // per chain
    int n_chains = 4;   // independent chains, chain c uses stream c of the seed
    // Replica exchange over the ladder beta * k / (replicas - 1); 1 = plain Metropolis.
    int replicas = 1;
    bool record_histogram = false; // per-configuration visit counts, tiny lattices only
};

struct MetropolisResult {
    std::vector<std::string> names;
    std::vector<double> mean;
    std::vector<double> error; // batch means standard error
    double acceptance_rate = 0.0;
    long long sweeps = 0; // per chain
    std::uint64_t seed = 0;
    int n_chains = 0;
    std::vector<double> betas; // replica ladder, target last
    double swap_rate = 0.0;
    std::vector<std::uint64_t> histogram;
    std::string boundary = "fixed initial layer, free final layer";
};

// Random-scan single-spin-flip Metropolis; every chain starts from the automaton trajectory.
// With replicas > 1, neighbouring replicas attempt a configuration swap after each sweep and
// measurements are taken on the target replica.
// A sweep is n_free_bits proposals; one measurement per sweep after burn-in. The error is the
// standard error over the batch means of all chains.
MetropolisResult metropolis_sample(const LayerConfig& initial, int T, const MetropolisOptions& opt,
                                   const std::vector<FieldObservable>& obs);

} // namespace pca
