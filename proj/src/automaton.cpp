#include "pca/automaton.hpp"

#include <bit>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace pca {

std::string_view to_string(Model m) noexcept {
    return m == Model::free ? "free" : "interacting";
}

Model parse_model(std::string_view s) {
    if (s == "free") return Model::free;
    if (s == "interacting") return Model::interacting;
    throw InvalidSpec("model must be 'free' or 'interacting', got '" + std::string(s) + "'");
}

namespace {

BlockRuleTable make_table(Model m) {
    BlockRuleTable t{};
    for (unsigned s = 0; s < 16; ++s) {
        BlockState b(s);
        if (m == Model::interacting) {
            t[s] = block_update_interacting(b).bits;
        } else {
            // One switch gate per color.
            const unsigned red = block_update_free((b.bits & 1u) | ((b.bits >> 1) & 2u));
            const unsigned green = block_update_free(((b.bits >> 1) & 1u) | ((b.bits >> 2) & 2u));
            t[s] = static_cast<std::uint8_t>((red & 1u) | ((green & 1u) << 1) | ((red & 2u) << 1) |
                                             ((green & 2u) << 2));
        }
    }
    return t;
}

using ByteTable = std::array<std::uint8_t, 256>;

ByteTable make_byte_table(const BlockRuleTable& t) {
    ByteTable bt{};
    for (unsigned v = 0; v < 256; ++v) {
        bt[v] = static_cast<std::uint8_t>(t[v & 0xFu] | (t[v >> 4] << 4));
    }
    return bt;
}

const ByteTable& byte_table(Model m) noexcept {
    static const ByteTable free_bt = make_byte_table(block_rule_table(Model::free));
    static const ByteTable inter_bt = make_byte_table(block_rule_table(Model::interacting));
    return m == Model::free ? free_bt : inter_bt;
}

inline std::uint64_t apply_bytes(std::uint64_t w, const ByteTable& bt) noexcept {
    std::uint64_t r = 0;
    for (int k = 0; k < 64; k += 8) {
        r |= static_cast<std::uint64_t>(bt[(w >> k) & 0xFFu]) << k;
    }
    return r;
}

// new site j = old site j+1 (periodic).
void rotate_down_one_site(std::span<std::uint64_t> w, std::size_t n_bits) noexcept {
    const std::size_t nw = w.size();
    const std::uint64_t carry = w[0] & 0x3u;
    for (std::size_t i = 0; i < nw; ++i) {
        w[i] = (w[i] >> 2) | (i + 1 < nw ? (w[i + 1] << 62) : 0);
    }
    const std::size_t top = n_bits - 2;
    w[top / 64] |= carry << (top % 64);
}

// new site j = old site j-1 (periodic).
void rotate_up_one_site(std::span<std::uint64_t> w, std::size_t n_bits) noexcept {
    const std::size_t nw = w.size();
    const std::size_t top = n_bits - 2;
    const std::uint64_t carry = (w[top / 64] >> (top % 64)) & 0x3u;
    w[top / 64] &= ~(std::uint64_t{0x3} << (top % 64));
    for (std::size_t i = nw; i-- > 0;) {
        w[i] = (w[i] << 2) | (i > 0 ? (w[i - 1] >> 62) : 0);
    }
    w[0] |= carry;
}

} // namespace

const BlockRuleTable& block_rule_table(Model m) noexcept {
    static const BlockRuleTable free_t = make_table(Model::free);
    static const BlockRuleTable inter_t = make_table(Model::interacting);
    return m == Model::free ? free_t : inter_t;
}

// ---------------------------------------------------------------------------
// LayerConfig

LayerConfig::LayerConfig(int n_x) : n_x_(n_x) {
    require_valid_n_x(n_x);
    words_.assign((2 * static_cast<std::size_t>(n_x) + 63) / 64, 0);
}

LayerConfig LayerConfig::from_string(std::string_view glyphs) {
    LayerConfig layer(static_cast<int>(glyphs.size()));
    for (int x = 0; x < layer.n_x(); ++x) {
        switch (glyphs[static_cast<std::size_t>(x)]) {
            case '.': break;
            case 'R': layer.set_site_bits(x, 1); break;
            case 'G': layer.set_site_bits(x, 2); break;
            case '#': layer.set_site_bits(x, 3); break;
            default:
                throw InvalidSpec("unknown site glyph '" + std::string(1, glyphs[static_cast<std::size_t>(x)]) +
                                  "' (expected . R G #)");
        }
    }
    return layer;
}

LayerConfig LayerConfig::from_index(int n_x, std::uint64_t index) {
    LayerConfig layer(n_x);
    if (layer.n_bits() > 64) throw InvalidSpec("from_index requires n_x <= 32");
    if (layer.n_bits() < 64 && (index >> layer.n_bits()) != 0) {
        throw InvalidSpec("configuration index out of range");
    }
    layer.words_[0] = index;
    return layer;
}

bool LayerConfig::get(int site, Color c) const noexcept {
    const std::size_t bit = 2 * static_cast<std::size_t>(site) + static_cast<std::size_t>(c);
    return (words_[bit / 64] >> (bit % 64)) & 1u;
}

void LayerConfig::set(int site, Color c, bool occupied) noexcept {
    const std::size_t bit = 2 * static_cast<std::size_t>(site) + static_cast<std::size_t>(c);
    const std::uint64_t mask = std::uint64_t{1} << (bit % 64);
    if (occupied) {
        words_[bit / 64] |= mask;
    } else {
        words_[bit / 64] &= ~mask;
    }
}

unsigned LayerConfig::site_bits(int site) const noexcept {
    const std::size_t bit = 2 * static_cast<std::size_t>(site);
    return static_cast<unsigned>((words_[bit / 64] >> (bit % 64)) & 0x3u);
}

void LayerConfig::set_site_bits(int site, unsigned bits) noexcept {
    const std::size_t bit = 2 * static_cast<std::size_t>(site);
    std::uint64_t& w = words_[bit / 64];
    w = (w & ~(std::uint64_t{0x3} << (bit % 64))) | (std::uint64_t{bits & 0x3u} << (bit % 64));
}

void LayerConfig::flip_bit(std::size_t bit) noexcept {
    words_[bit / 64] ^= std::uint64_t{1} << (bit % 64);
}

int LayerConfig::count() const noexcept {
    int n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
}

int LayerConfig::count(Color c) const noexcept {
    const std::uint64_t mask = c == Color::R ? 0x5555555555555555ULL : 0xAAAAAAAAAAAAAAAAULL;
    int n = 0;
    for (auto w : words_) n += std::popcount(w & mask);
    return n;
}

int LayerConfig::right_movers(long long m_t) const noexcept {
    // Even sites occupy bits 4k, 4k+1; odd sites bits 4k+2, 4k+3.
    const bool even_sites = (m_t % 2 == 0);
    const std::uint64_t mask = even_sites ? 0x3333333333333333ULL : 0xCCCCCCCCCCCCCCCCULL;
    int n = 0;
    for (auto w : words_) n += std::popcount(w & mask);
    return n;
}

int LayerConfig::left_movers(long long m_t) const noexcept { return count() - right_movers(m_t); }

std::uint64_t LayerConfig::to_index() const {
    if (n_bits() > 64) throw InvalidSpec("to_index requires n_x <= 32");
    return words_[0];
}

char site_glyph(unsigned bits) noexcept {
    static constexpr char glyphs[4] = {'.', 'R', 'G', '#'};
    return glyphs[bits & 0x3u];
}

std::string LayerConfig::to_string() const {
    std::string s(static_cast<std::size_t>(n_x_), '.');
    for (int x = 0; x < n_x_; ++x) s[static_cast<std::size_t>(x)] = site_glyph(site_bits(x));
    return s;
}

// ---------------------------------------------------------------------------
// Evolution

void half_step_in_place(LayerConfig& layer, Parity parity, Model model) {
    const ByteTable& bt = byte_table(model);
    auto w = layer.words();
    if (parity == Parity::odd) rotate_down_one_site(w, layer.n_bits());
    for (auto& word : w) word = apply_bytes(word, bt);
    if (parity == Parity::odd) rotate_up_one_site(w, layer.n_bits());
}

LayerConfig half_step(const LayerConfig& layer, Parity parity, Model model) {
    LayerConfig out = layer;
    half_step_in_place(out, parity, model);
    return out;
}

LayerConfig half_step_reference(const LayerConfig& layer, Parity parity, Model model) {
    const BlockRuleTable& table = block_rule_table(model);
    LayerConfig out(layer.n_x());
    for (const SitePair& p : block_partition(parity, layer.n_x()).pairs) {
        const BlockState in = BlockState::from_sites(layer.site_bits(p.left), layer.site_bits(p.right));
        const BlockState next(table[in.bits]);
        out.set_site_bits(p.left, next.left());
        out.set_site_bits(p.right, next.right());
    }
    return out;
}

LayerConfig double_step(const LayerConfig& layer, Model model) {
    LayerConfig out = layer;
    half_step_in_place(out, Parity::even, model);
    half_step_in_place(out, Parity::odd, model);
    return out;
}

LayerConfig invert_half_step(const LayerConfig& layer, Parity parity, Model model) {
    return half_step(layer, parity, model);
}

Trajectory evolve(const LayerConfig& initial, long long n_half_steps, Model model, Parity start_parity) {
    if (n_half_steps < 0) throw InvalidSpec("n_half_steps must be non-negative");
    Trajectory tr;
    tr.start_parity = start_parity;
    tr.model = model;
    tr.layers.reserve(static_cast<std::size_t>(n_half_steps) + 1);
    tr.layers.push_back(initial);
    Parity p = start_parity;
    for (long long k = 0; k < n_half_steps; ++k) {
        LayerConfig next = tr.layers.back();
        half_step_in_place(next, p, model);
        tr.layers.push_back(std::move(next));
        p = flip(p);
    }
    return tr;
}

LayerConfig evolve_backward(const LayerConfig& final_layer, long long n_half_steps, Model model,
                            Parity start_parity) {
    LayerConfig layer = final_layer;
    for (long long k = n_half_steps; k-- > 0;) {
        const Parity p = (k % 2 == 0) ? start_parity : flip(start_parity);
        layer = invert_half_step(layer, p, model);
    }
    return layer;
}

SiteWindow influence_window(int n_double_steps) {
    if (n_double_steps < 0) throw InvalidSpec("n_double_steps must be non-negative");
    if (n_double_steps == 0) return {0, 1};
    return {-2 * n_double_steps, 2 * n_double_steps - 1};
}

bool is_valid_transition(const CornerPattern& c, Model model) noexcept {
    return block_rule_table(model)[c.lower().bits] == c.upper().bits;
}

CornerPattern rotate_quarter(const CornerPattern& c) noexcept {
    CornerPattern r;
    r.lower_right = c.lower_left;
    r.upper_right = c.lower_right;
    r.upper_left = c.upper_right;
    r.lower_left = c.upper_left;
    return r;
}

CornerPattern transpose_axes(const CornerPattern& c) noexcept {
    CornerPattern r = c;
    r.lower_right = c.upper_left;
    r.upper_left = c.lower_right;
    return r;
}

// ---------------------------------------------------------------------------
// CSV

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
    out << "t,x,n_R,n_I\n";
    for (std::size_t t = 0; t < tr.layers.size(); ++t) {
        const LayerConfig& layer = tr.layers[t];
        for (int x = 0; x < layer.n_x(); ++x) {
            out << t << ',' << x << ',' << int(layer.get(x, Color::R)) << ','
                << int(layer.get(x, Color::I)) << '\n';
        }
    }
}

std::vector<LayerConfig> read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "t,x,n_R,n_I") {
        throw InvalidSpec("trajectory CSV must start with header t,x,n_R,n_I");
    }
    std::map<long, std::map<int, unsigned>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        long t = 0;
        int x = 0, nr = 0, ni = 0;
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(ls >> t >> c1 >> x >> c2 >> nr >> c3 >> ni) || c1 != ',' || c2 != ',' || c3 != ',' ||
            (nr != 0 && nr != 1) || (ni != 0 && ni != 1)) {
            throw InvalidSpec("malformed trajectory CSV row: " + line);
        }
        rows[t][x] = static_cast<unsigned>(nr) | (static_cast<unsigned>(ni) << 1);
    }
    std::vector<LayerConfig> layers;
    long expected_t = 0;
    for (const auto& [t, sites] : rows) {
        if (t != expected_t++) throw InvalidSpec("trajectory CSV has a gap in t");
        LayerConfig layer(static_cast<int>(sites.size()));
        int expected_x = 0;
        for (const auto& [x, bits] : sites) {
            if (x != expected_x++) throw InvalidSpec("trajectory CSV has a gap in x");
            layer.set_site_bits(x, bits);
        }
        layers.push_back(std::move(layer));
    }
    return layers;
}

} // namespace pca
