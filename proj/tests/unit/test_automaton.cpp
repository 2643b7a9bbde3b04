#include "doctest.h"
#include "pca/automaton.hpp"

#include <random>
#include <set>
#include <sstream>

using namespace pca;

namespace {

LayerConfig random_layer(int n_x, std::mt19937_64& rng) {
    LayerConfig l(n_x);
    std::bernoulli_distribution coin(0.5);
    for (int x = 0; x < n_x; ++x) {
        l.set(x, Color::R, coin(rng));
        l.set(x, Color::I, coin(rng));
    }
    return l;
}

} // namespace

TEST_CASE("free switch gate") {
    CHECK(block_update_free(0b01) == 0b10);
    CHECK(block_update_free(0b10) == 0b01);
    CHECK(block_update_free(0b00) == 0b00);
    CHECK(block_update_free(0b11) == 0b11);
}

TEST_CASE("interacting block rules, listed state by state") {
    // rule 1: one red and one green on different sites stay put
    CHECK(block_update_interacting(BlockState(9)).bits == 9);
    CHECK(block_update_interacting(BlockState(6)).bits == 6);
    // rule 2: two reds become two greens and back
    CHECK(block_update_interacting(BlockState(5)).bits == 10);
    CHECK(block_update_interacting(BlockState(10)).bits == 5);
    // rule 3: everything else switches site
    const std::pair<unsigned, unsigned> rule3[] = {{0, 0},  {1, 4},  {4, 1},  {2, 8},  {8, 2},  {3, 12},
                                                   {12, 3}, {7, 13}, {13, 7}, {11, 14}, {14, 11}, {15, 15}};
    for (auto [in, out] : rule3) CHECK(block_update_interacting(BlockState(in)).bits == out);
}

TEST_CASE("block rules are involutive permutations") {
    for (Model m : {Model::free, Model::interacting}) {
        const auto& t = block_rule_table(m);
        std::set<unsigned> image(t.begin(), t.end());
        CHECK(image.size() == 16);
        for (unsigned s = 0; s < 16; ++s) CHECK(t[t[s]] == s);
    }
    for (unsigned s = 0; s < 16; ++s) {
        const unsigned l = s & 3, r = s >> 2;
        const unsigned want = (block_update_free(((l & 1) | ((r & 1) << 1))) & 1) |
                              ((block_update_free(((l >> 1) | ((r >> 1) << 1))) & 1) << 1) |
                              ((block_update_free(((l & 1) | ((r & 1) << 1))) >> 1) << 2) |
                              ((block_update_free(((l >> 1) | ((r >> 1) << 1))) >> 1) << 3);
        CHECK(block_rule_table(Model::free)[s] == want);
    }
}

TEST_CASE("LayerConfig round trips") {
    auto l = LayerConfig::from_string("R.G#");
    CHECK(l.to_string() == "R.G#");
    CHECK(l.count() == 4);
    CHECK(l.count(Color::R) == 2);
    CHECK(l.count(Color::I) == 2);
    CHECK(LayerConfig::from_index(4, l.to_index()) == l);
    CHECK_THROWS_AS(LayerConfig::from_string("RGB."), InvalidSpec);
    CHECK_THROWS_AS(LayerConfig::from_string("R.G"), InvalidSpec);
    LayerConfig big(100);
    big.set(99, Color::I, true);
    CHECK(big.site_bits(99) == 2);
    CHECK(big.count() == 1);
}

TEST_CASE("half_step examples") {
    CHECK(half_step(LayerConfig(8), Parity::even) == LayerConfig(8));
    CHECK(half_step(LayerConfig::from_string("RRRRRR"), Parity::even) == LayerConfig::from_string("GGGGGG"));
    CHECK(half_step(LayerConfig::from_string("R..."), Parity::even) == LayerConfig::from_string(".R.."));
    CHECK(half_step(LayerConfig::from_string("R..."), Parity::odd) == LayerConfig::from_string("...R"));
}

TEST_CASE("double_step examples") {
    CHECK(double_step(LayerConfig::from_string("RRRRRR")) == LayerConfig::from_string("RRRRRR"));
    CHECK(double_step(LayerConfig::from_string("R.......")) == LayerConfig::from_string("..R....."));
    CHECK(double_step(LayerConfig::from_string("..R.....")) == LayerConfig::from_string("....R..."));
    CHECK(double_step(LayerConfig::from_string("######")) == LayerConfig::from_string("######"));
    // n_x = 2: both partitions use the same pair
    CHECK(double_step(LayerConfig::from_string("R.")) == LayerConfig::from_string("R."));
    CHECK(half_step(LayerConfig::from_string("R."), Parity::odd) == LayerConfig::from_string(".R"));
}

TEST_CASE("packed kernel equals per-block reference") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 10000; ++trial) {
        const int n_x = 2 * static_cast<int>(1 + rng() % 128);
        const LayerConfig l = random_layer(n_x, rng);
        const Parity p = (trial % 2) ? Parity::odd : Parity::even;
        const Model m = (trial % 3) ? Model::interacting : Model::free;
        REQUIRE(half_step(l, p, m) == half_step_reference(l, p, m));
    }
}

TEST_CASE("invert_half_step restores every layer") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        const LayerConfig l = random_layer(64, rng);
        const Parity p = (trial % 2) ? Parity::odd : Parity::even;
        CHECK(invert_half_step(half_step(l, p), p) == l);
    }
    auto tr = evolve(random_layer(30, rng), 57, Model::interacting, Parity::odd);
    CHECK(evolve_backward(tr.layers.back(), 57, Model::interacting, Parity::odd) == tr.layers.front());
}

TEST_CASE("evolve alternates parity from the stored start") {
    auto l = LayerConfig::from_string("R.G.#...");
    for (Parity start : {Parity::even, Parity::odd}) {
        auto tr = evolve(l, 9, Model::interacting, start);
        REQUIRE(tr.layers.size() == 10);
        LayerConfig cur = l;
        for (std::size_t k = 0; k + 1 < tr.layers.size(); ++k) {
            cur = half_step_reference(cur, tr.step_parity(k));
            CHECK(tr.layers[k + 1] == cur);
        }
    }
}

TEST_CASE("conservation per half step") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        LayerConfig l = random_layer(32, rng);
        long long t = trial % 2;
        const int total = l.count(), right = l.right_movers(t), left = l.left_movers(t);
        const int red_par = l.count(Color::R) % 2, green_par = l.count(Color::I) % 2;
        for (int k = 0; k < 20; ++k, ++t) {
            l = half_step(l, parity_of(t));
            CHECK(l.count() == total);
            CHECK(l.right_movers(t + 1) == right);
            CHECK(l.left_movers(t + 1) == left);
            CHECK(l.count(Color::R) % 2 == red_par);
            CHECK(l.count(Color::I) % 2 == green_par);
        }
    }
}

TEST_CASE("right_movers counts the (m_t + x) even sublattice") {
    auto l = LayerConfig::from_string("#R.G");
    CHECK(l.right_movers(0) == 2); // site 0 has two particles, site 2 empty
    CHECK(l.left_movers(0) == 2);
    CHECK(l.right_movers(1) == 2);
    auto one = LayerConfig::from_string(".R..");
    CHECK(one.right_movers(0) == 0);
    CHECK(one.right_movers(1) == 1);
}

TEST_CASE("influence window matches bit-flip experiment") {
    CHECK(influence_window(0) == SiteWindow{0, 1});
    CHECK(influence_window(1) == SiteWindow{-2, 1});
    CHECK(influence_window(2) == SiteWindow{-4, 3});
    const int n_x = 24, x = 12;
    std::mt19937_64 rng(2024);
    for (int n = 0; n <= 3; ++n) {
        const int l_site = n == 0 ? x : x - 1, r_site = n == 0 ? x + 1 : x;
        std::set<int> influencing;
        for (int trial = 0; trial < 200; ++trial) {
            const LayerConfig base = random_layer(n_x, rng);
            LayerConfig ref = base;
            for (int k = 0; k < n; ++k) ref = double_step(ref);
            for (std::size_t bit = 0; bit < base.n_bits(); ++bit) {
                LayerConfig f = base;
                f.flip_bit(bit);
                for (int k = 0; k < n; ++k) f = double_step(f);
                if (f.site_bits(l_site) != ref.site_bits(l_site) || f.site_bits(r_site) != ref.site_bits(r_site)) {
                    influencing.insert(static_cast<int>(bit / 2) - x);
                }
            }
        }
        const SiteWindow w = influence_window(n);
        REQUIRE(!influencing.empty());
        CHECK(*influencing.begin() == w.min_offset);
        CHECK(*influencing.rbegin() == w.max_offset);
        CHECK(static_cast<int>(influencing.size()) == w.max_offset - w.min_offset + 1);
    }
}

TEST_CASE("rotation property of corner patterns") {
    int valid = 0;
    for (unsigned in = 0; in < 16; ++in) {
        for (unsigned out = 0; out < 16; ++out) {
            const auto c = CornerPattern::from_transition(BlockState(in), BlockState(out));
            if (!is_valid_transition(c)) continue;
            ++valid;
            CornerPattern r = c;
            for (int k = 0; k < 4; ++k) {
                r = rotate_quarter(r);
                CHECK(is_valid_transition(r));
            }
            CHECK(r == c);
            CHECK(is_valid_transition(transpose_axes(c)));
        }
    }
    CHECK(valid == 16);
    // rule 1 and rule 2 exchange under a quarter turn
    auto r = rotate_quarter(CornerPattern::from_transition(BlockState(9), BlockState(9)));
    CHECK(r.lower().bits == 5);
    CHECK(r.upper().bits == 10);
}

TEST_CASE("trajectory csv round trip") {
    auto tr = evolve(LayerConfig::from_string("R.G.#..."), 6);
    std::stringstream ss;
    write_trajectory_csv(ss, tr);
    const std::string text = ss.str();
    CHECK(text.rfind("t,x,n_R,n_I\n", 0) == 0);
    CHECK(read_trajectory_csv(ss) == tr.layers);
}
