#pragma once

#include "pca/lattice.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pca {

enum class Model : std::uint8_t { free, interacting };
enum class Color : std::uint8_t { R = 0, I = 1 };

std::string_view to_string(Model m) noexcept;
Model parse_model(std::string_view s);

// Occupancy of one two-site block.
// bit 0 = n_R(left), bit 1 = n_I(left), bit 2 = n_R(right), bit 3 = n_I(right).
struct BlockState {
    std::uint8_t bits = 0;

    constexpr BlockState() = default;
    constexpr explicit BlockState(unsigned v) : bits(static_cast<std::uint8_t>(v & 0xFu)) {}

    constexpr unsigned left() const noexcept { return bits & 0x3u; }
    constexpr unsigned right() const noexcept { return (bits >> 2) & 0x3u; }
    static constexpr BlockState from_sites(unsigned left, unsigned right) noexcept {
        return BlockState((left & 0x3u) | ((right & 0x3u) << 2));
    }
    constexpr BlockState swapped() const noexcept { return from_sites(right(), left()); }

    friend constexpr bool operator==(BlockState, BlockState) = default;
};

// Two-bit free switch gate: bit 0 = left occupancy, bit 1 = right occupancy.
constexpr unsigned block_update_free(unsigned pair) noexcept {
    pair &= 0x3u;
    return ((pair & 1u) << 1) | ((pair >> 1) & 1u);
}

// Rules 1-3 of the interacting automaton.
constexpr BlockState block_update_interacting(BlockState b) noexcept {
    switch (b.bits) {
        case 0x9: // R left, I right
        case 0x6: // I left, R right
            return b;
        case 0x5: // R, R -> I, I
            return BlockState(0xA);
        case 0xA:
            return BlockState(0x5);
        default:
            return b.swapped();
    }
}

using BlockRuleTable = std::array<std::uint8_t, 16>;

// The 16-entry update table for a two-color block. The free model switches each
// color independently; the interacting model applies rules 1-3.
const BlockRuleTable& block_rule_table(Model m) noexcept;

// Bit-packed occupation numbers of one time slice.
// Layout: bit 2x = n_R(x), bit 2x+1 = n_I(x); padding bits are zero.
class LayerConfig {
public:
    LayerConfig() = default;
    explicit LayerConfig(int n_x);

    // Parses one glyph per site: '.' empty, 'R' red, 'G' green, '#' both.
    static LayerConfig from_string(std::string_view glyphs);
    // Only for n_x <= 32.
    static LayerConfig from_index(int n_x, std::uint64_t index);

    int n_x() const noexcept { return n_x_; }
    std::size_t n_bits() const noexcept { return 2 * static_cast<std::size_t>(n_x_); }

    std::span<std::uint64_t> words() noexcept { return words_; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    bool get(int site, Color c) const noexcept;
    void set(int site, Color c, bool occupied) noexcept;
    unsigned site_bits(int site) const noexcept;
    void set_site_bits(int site, unsigned bits) noexcept;
    void flip_bit(std::size_t bit) noexcept;

    int count() const noexcept;
    int count(Color c) const noexcept;
    // Particles on the right-mover sublattice when this layer sits at time m_t.
    int right_movers(long long m_t) const noexcept;
    int left_movers(long long m_t) const noexcept;

    // Only for n_x <= 32.
    std::uint64_t to_index() const;
    std::string to_string() const;

    friend bool operator==(const LayerConfig&, const LayerConfig&) = default;

private:
    int n_x_ = 0;
    std::vector<std::uint64_t> words_;
};

char site_glyph(unsigned bits) noexcept;

// Packed kernel: per-byte lookup built from block_rule_table.
void half_step_in_place(LayerConfig& layer, Parity parity, Model model);
LayerConfig half_step(const LayerConfig& layer, Parity parity, Model model = Model::interacting);

// Per-block scalar implementation over block_partition(); the oracle for the packed kernel.
LayerConfig half_step_reference(const LayerConfig& layer, Parity parity,
                                Model model = Model::interacting);

// half_step(even) followed by half_step(odd).
LayerConfig double_step(const LayerConfig& layer, Model model = Model::interacting);

// Every block rule is an involution, so the inverse of a half step is the same half step.
LayerConfig invert_half_step(const LayerConfig& layer, Parity parity,
                             Model model = Model::interacting);

struct Trajectory {
    std::vector<LayerConfig> layers;
    Parity start_parity = Parity::even;
    Model model = Model::interacting;

    // Parity of the half step that produces layers[k+1] from layers[k].
    Parity step_parity(std::size_t k) const noexcept {
        return (k % 2 == 0) ? start_parity : flip(start_parity);
    }
    // Time index m_t of layers[k], with layers[0] at m_t = 0 (even start) or 1 (odd start).
    long long time_of(std::size_t k) const noexcept {
        return static_cast<long long>(k) + to_int(start_parity);
    }
};

Trajectory evolve(const LayerConfig& initial, long long n_half_steps,
                  Model model = Model::interacting, Parity start_parity = Parity::even);

// Runs a trajectory backwards from its last layer; returns the recovered initial layer.
LayerConfig evolve_backward(const LayerConfig& final_layer, long long n_half_steps,
                            Model model, Parity start_parity);

struct SiteWindow {
    int min_offset;
    int max_offset;
    friend bool operator==(const SiteWindow&, const SiteWindow&) = default;
};

// Sites at time t that can influence the watched block after n double steps, as offsets
// from the block's even site x. For n >= 1 the watched block is the odd-parity pair
// (x-1, x) written by the last half step; for n = 0 it is the even pair (x, x+1).
SiteWindow influence_window(int n_double_steps);

// Four corners of one block in spacetime, each a 2-bit site value (R | I << 1).
// lower = layer t, upper = layer t+1.
struct CornerPattern {
    unsigned lower_left = 0, lower_right = 0, upper_left = 0, upper_right = 0;

    static CornerPattern from_transition(BlockState in, BlockState out) noexcept {
        return {in.left(), in.right(), out.left(), out.right()};
    }
    BlockState lower() const noexcept { return BlockState::from_sites(lower_left, lower_right); }
    BlockState upper() const noexcept { return BlockState::from_sites(upper_left, upper_right); }

    friend bool operator==(const CornerPattern&, const CornerPattern&) = default;
};

// True when the upper corners are the block update of the lower ones.
bool is_valid_transition(const CornerPattern& c, Model model = Model::interacting) noexcept;

// Quarter turn of the (x, t) square: lower-left -> lower-right -> upper-right -> upper-left.
CornerPattern rotate_quarter(const CornerPattern& c) noexcept;
// Exchange of the x and t axes (reflection through the diagonal).
CornerPattern transpose_axes(const CornerPattern& c) noexcept;

// CSV with header t,x,n_R,n_I; one row per site per layer, t = layer index.
void write_trajectory_csv(std::ostream& out, const Trajectory& tr);
std::vector<LayerConfig> read_trajectory_csv(std::istream& in);

} // namespace pca
