#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pca {

// Raised for lattice sizes and other specifications the model cannot represent.
class InvalidSpec : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Parity : std::uint8_t { even = 0, odd = 1 };

constexpr Parity flip(Parity p) noexcept { return p == Parity::even ? Parity::odd : Parity::even; }
constexpr int to_int(Parity p) noexcept { return static_cast<int>(p); }
constexpr Parity parity_of(long long v) noexcept { return (v % 2 == 0) ? Parity::even : Parity::odd; }

std::string_view to_string(Parity p) noexcept;
Parity parse_parity(std::string_view s);

enum class Mover : std::uint8_t { right, left };

// Right movers live on the sublattice with m_t + m_x even.
constexpr Mover mover_class(long long m_t, long long m_x) noexcept {
    return ((m_t + m_x) % 2 == 0) ? Mover::right : Mover::left;
}

// One spatial layer: n_x sites on a periodic ring, two colors per site.
// Lattice spacing is 1; coordinates are x = index.
struct LatticeSpec {
    int n_x = 2;

    explicit LatticeSpec(int sites);

    constexpr int n_colors() const noexcept { return 2; }
    int wrap(long long x) const noexcept;
};

struct SitePair {
    int left;
    int right;
    friend bool operator==(const SitePair&, const SitePair&) = default;
};

struct BlockPartition {
    Parity parity;
    std::vector<SitePair> pairs;
};

// even: (x, x+1) for even x.  odd: (x-1, x) for even x, wrapping (n_x-1, 0).
BlockPartition block_partition(Parity parity, int n_x);

void require_valid_n_x(int n_x);

} // namespace pca
