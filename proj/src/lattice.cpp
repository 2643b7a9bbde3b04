#include "pca/lattice.hpp"

namespace pca {

std::string_view to_string(Parity p) noexcept {
    return p == Parity::even ? "even" : "odd";
}

Parity parse_parity(std::string_view s) {
    if (s == "even") return Parity::even;
    if (s == "odd") return Parity::odd;
    throw InvalidSpec("parity must be 'even' or 'odd', got '" + std::string(s) + "'");
}

void require_valid_n_x(int n_x) {
    if (n_x < 2 || n_x % 2 != 0) {
        throw InvalidSpec("n_x must be an even integer >= 2, got " + std::to_string(n_x));
    }
}

LatticeSpec::LatticeSpec(int sites) : n_x(sites) { require_valid_n_x(n_x); }

int LatticeSpec::wrap(long long x) const noexcept {
    long long r = x % n_x;
    return static_cast<int>(r < 0 ? r + n_x : r);
}

BlockPartition block_partition(Parity parity, int n_x) {
    require_valid_n_x(n_x);
    BlockPartition bp{parity, {}};
    bp.pairs.reserve(static_cast<std::size_t>(n_x / 2));
    for (int x = 0; x < n_x; x += 2) {
        if (parity == Parity::even) {
            bp.pairs.push_back({x, x + 1});
        } else {
            bp.pairs.push_back({x == 0 ? n_x - 1 : x - 1, x});
        }
    }
    return bp;
}

} // namespace pca
