#include "doctest.h"
#include "pca/operators.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace pca;

TEST_CASE("from_block_rule") {
    const auto f = from_block_rule(Model::free);
    REQUIRE(f.dim() == 4);
    // switch operator: (0,0) and (1,1) fixed, (1,0) <-> (0,1)
    const int expected[4][4] = {{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) CHECK(f.entry(r, c) == expected[r][c]);
    const auto s = from_block_rule(Model::interacting);
    REQUIRE(s.dim() == 16);
    CHECK(s.entry(10, 5) == 1);
    CHECK(s.target(5) == 10);
    CHECK(s.entry(0, 0) == 1);
    CHECK(s.is_nonnegative());
    CHECK(s.is_symmetric());
}

TEST_CASE("compose") {
    const auto f = from_block_rule(Model::free);
    CHECK(compose(f, f) == SignedPermutation::identity(4));
    SignedPermutation p({2, 0, 3, 1}, {1, -1, -1, 1});
    CHECK(compose(p, p.transpose()) == SignedPermutation::identity(4));
    CHECK(compose(p.transpose(), p) == SignedPermutation::identity(4));
    CHECK_THROWS_AS(compose(p, SignedPermutation::identity(3)), DimensionMismatch);
    // signs multiply along the path
    SignedPermutation a({1, 0}, {-1, 1});
    SignedPermutation b({1, 0}, {1, 1});
    const auto ab = compose(a, b);
    CHECK(ab.target(0) == 0);
    CHECK(ab.sign(0) == 1);
    CHECK(ab.sign(1) == -1);
}

TEST_CASE("SignedPermutation validation") {
    CHECK_THROWS(SignedPermutation({0, 0}, {1, 1}));
    CHECK_THROWS(SignedPermutation({0, 1}, {1, 2}));
    CHECK_THROWS_AS(SignedPermutation({0, 1}, {1}), DimensionMismatch);
}

TEST_CASE("signed permutations preserve the norm") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<std::uint32_t> target(64);
    for (std::uint32_t i = 0; i < 64; ++i) target[i] = i;
    std::shuffle(target.begin(), target.end(), rng);
    std::vector<std::int8_t> sign(64);
    for (auto& s : sign) s = (rng() & 1) ? 1 : -1;
    SignedPermutation p(target, sign);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> q(64);
        for (auto& v : q) v = nd(rng);
        const auto out = p.apply(q);
        double a = 0, b = 0;
        for (double v : q) a += v * v;
        for (double v : out) b += v * v;
        CHECK(b == doctest::Approx(a).epsilon(1e-14));
    }
}

TEST_CASE("lift_to_lattice agrees with the automaton on every layer") {
    for (int n_x : {2, 4, 6, 8}) {
        for (Model m : {Model::free, Model::interacting}) {
            for (Parity p : {Parity::even, Parity::odd}) {
                const auto lifted = lift_to_lattice(two_color_block_rule(m), block_partition(p, n_x), n_x);
                REQUIRE(lifted.dim() == (std::size_t{1} << (2 * n_x)));
                for (std::uint64_t rho = 0; rho < lifted.dim(); ++rho) {
                    const auto layer = LayerConfig::from_index(n_x, rho);
                    REQUIRE(lifted.target(rho) == half_step(layer, p, m).to_index());
                    REQUIRE(lifted.sign(rho) == 1);
                }
            }
        }
    }
}

TEST_CASE("composed lifts equal double_step on n_x = 4") {
    const int n_x = 4;
    const auto rule = from_block_rule(Model::interacting);
    const auto se = lift_to_lattice(rule, block_partition(Parity::even, n_x), n_x);
    const auto so = lift_to_lattice(rule, block_partition(Parity::odd, n_x), n_x);
    const auto ds = compose(so, se);
    for (std::uint64_t rho = 0; rho < 256; ++rho) {
        CHECK(ds.target(rho) == double_step(LayerConfig::from_index(n_x, rho)).to_index());
    }
}

TEST_CASE("lift of the identity and of the one-bit free gate") {
    const auto id = lift_to_lattice(SignedPermutation::identity(16), block_partition(Parity::odd, 4), 4);
    CHECK(id == SignedPermutation::identity(256));
    // one occupation bit per site: even sublattice particles move one site right
    const auto f = lift_to_lattice(from_block_rule(Model::free), block_partition(Parity::even, 4), 4);
    REQUIRE(f.dim() == 16);
    CHECK(f.target(0b0001) == 0b0010);
    CHECK(f.target(0b0100) == 0b1000);
    CHECK(f.target(0b0101) == 0b1010);
    CHECK(f.target(0b0011) == 0b0011);
    CHECK_THROWS_AS(lift_to_lattice(from_block_rule(Model::interacting), block_partition(Parity::even, 14), 14),
                    InvalidSpec);
    CHECK_THROWS_AS(lift_to_lattice(SignedPermutation::identity(8), block_partition(Parity::even, 4), 4),
                    DimensionMismatch);
}

TEST_CASE("w_matrix") {
    for (Model m : {Model::free, Model::interacting}) {
        const int n_x = m == Model::free ? 4 : 2;
        const auto rule = two_color_block_rule(m);
        const auto se = lift_to_lattice(rule, block_partition(Parity::even, n_x), n_x);
        const auto so = lift_to_lattice(rule, block_partition(Parity::odd, n_x), n_x);
        const auto w = w_matrix(se, so, 0.5);
        CHECK(w.antisymmetry_defect() == 0.0);
        // oracle: (P - P^T) / (4 eps) from the dense product
        const auto p = multiply(DenseOperator::from(so), DenseOperator::from(se));
        const auto pt = p.transpose();
        for (std::size_t r = 0; r < p.dim(); ++r)
            for (std::size_t c = 0; c < p.dim(); ++c) CHECK(w(r, c) == (p(r, c) - pt(r, c)) / 2.0);
    }
    const auto id = SignedPermutation::identity(16);
    const auto zero = w_matrix(id, id);
    for (double v : zero.entries()) CHECK(v == 0.0);
    CHECK_THROWS(w_matrix(SignedPermutation({1, 2, 0}, {1, 1, 1}), SignedPermutation::identity(3)));
}

TEST_CASE("operator csv") {
    std::ostringstream os;
    write_operator_csv(os, SignedPermutation({1, 0}, {-1, 1}));
    CHECK(os.str() == "0,1\n-1,0\n");
}
