#include "doctest.h"
#include "pca/quantum.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace pca;

TEST_CASE("from_sharp_config") {
    const auto e = from_sharp_config(LayerConfig(4));
    CHECK(e.amplitudes[0] == 1.0);
    CHECK(e.norm_squared() == 1.0);
    const auto l = LayerConfig::from_string("R.#G");
    const auto wf = from_sharp_config(l);
    for (std::size_t i = 0; i < wf.dim(); ++i) CHECK(wf.amplitudes[i] == (i == l.to_index() ? 1.0 : 0.0));
    CHECK_THROWS_AS(from_sharp_config(LayerConfig(14)), InvalidSpec);
}

TEST_CASE("sharp states follow the automaton trajectory") {
    std::mt19937_64 rng(5);
    for (int n_x : {2, 4, 6, 8}) {
        const ExactEvolver ev(n_x);
        for (int trial = 0; trial < 20; ++trial) {
            const auto layer = LayerConfig::from_index(n_x, rng() % (std::uint64_t{1} << (2 * n_x)));
            auto wf = from_sharp_config(layer);
            const auto tr = evolve(layer, 12);
            for (std::size_t k = 1; k < tr.layers.size(); ++k) {
                ev.evolve_in_place(wf, 1);
                CHECK(wf.amplitudes[tr.layers[k].to_index()] == 1.0);
                CHECK(wf.norm_squared() == 1.0);
            }
        }
    }
}

TEST_CASE("sharp evolution agrees configuration by configuration for 2 n_x <= 16") {
    for (int n_x : {2, 4, 6, 8}) {
        const ExactEvolver ev(n_x);
        const std::size_t dim = std::size_t{1} << (2 * n_x);
        for (Parity p : {Parity::even, Parity::odd}) {
            for (std::size_t i = 0; i < dim; ++i) {
                REQUIRE(ev.step(p).target(i) == half_step(LayerConfig::from_index(n_x, i), p).to_index());
            }
        }
    }
}

TEST_CASE("from_distribution") {
    std::vector<double> p(16, 0.0);
    p[0] = p[3] = p[5] = p[9] = 0.25;
    const auto wf = from_distribution(2, p);
    CHECK(wf.amplitudes[3] == 0.5);
    CHECK(probabilities(wf) == p);
    std::vector<double> sharp(16, 0.0);
    sharp[7] = 1.0;
    CHECK(from_distribution(2, sharp).amplitudes == from_sharp_config(LayerConfig::from_index(2, 7)).amplitudes);
    std::vector<std::int8_t> signs(16, 1);
    signs[3] = -1;
    const auto signed_wf = from_distribution(2, p, std::span<const std::int8_t>(signs));
    CHECK(signed_wf.amplitudes[3] == -0.5);
    CHECK(probabilities(signed_wf) == p);
    p[0] = 0.3;
    CHECK_THROWS(from_distribution(2, p));
    CHECK_THROWS_AS(from_distribution(2, std::vector<double>(8, 0.125)), DimensionMismatch);
}

TEST_CASE("uniform superposition is invariant") {
    const std::size_t dim = 256;
    const auto wf = from_distribution(4, std::vector<double>(dim, 1.0 / dim));
    const auto out = evolve_wf(wf, 7);
    CHECK(out.amplitudes == wf.amplitudes);
    CHECK(out.m_t == 7);
}

TEST_CASE("half-filled A superposition of two phases revives with period 2") {
    const auto a0 = LayerConfig::from_string("RRRRRR");
    const auto a1 = half_step(a0, Parity::even);
    std::vector<double> p(std::size_t{1} << 12, 0.0);
    p[a0.to_index()] = 0.5;
    p[a1.to_index()] = 0.5;
    const auto wf = from_distribution(6, p);
    const auto one = evolve_wf(wf, 1);
    CHECK(one.amplitudes[a1.to_index()] == doctest::Approx(std::sqrt(0.5)));
    const auto two = evolve_wf(wf, 2);
    CHECK(two.amplitudes == wf.amplitudes);
}

TEST_CASE("expectation values") {
    const auto l = LayerConfig::from_string("R.#G..");
    CHECK(expectation(from_sharp_config(l), observables::particle_number()) == 4.0);
    // n_R(0) on half-filled A alternates in time
    auto wf = from_sharp_config(LayerConfig::from_string("RRRR"));
    const ExactEvolver ev(4);
    for (int t = 0; t < 6; ++t) {
        CHECK(expectation(wf, observables::occupation(0, Color::R)) == (t % 2 == 0 ? 1.0 : 0.0));
        CHECK(expectation(wf, observables::occupation(0, Color::I)) == (t % 2 == 0 ? 0.0 : 1.0));
        ev.evolve_in_place(wf, 1);
    }
}

TEST_CASE("conserved expectations along a random signed wave function") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    const int n_x = 6;
    WaveFunction wf;
    wf.n_x = n_x;
    wf.amplitudes.resize(std::size_t{1} << (2 * n_x));
    double norm = 0.0;
    for (auto& q : wf.amplitudes) {
        q = nd(rng);
        norm += q * q;
    }
    for (auto& q : wf.amplitudes) q /= std::sqrt(norm);
    const std::vector<DiagonalObservable> conserved = {
        observables::right_movers(), observables::left_movers(), observables::color_parity(Color::R),
        observables::color_parity(Color::I), observables::particle_number()};
    std::vector<double> initial;
    for (const auto& o : conserved) initial.push_back(expectation(wf, o));
    const double n0 = wf.norm_squared();
    const ExactEvolver ev(n_x);
    for (int k = 0; k < 10; ++k) {
        ev.evolve_in_place(wf, 1);
        CHECK(wf.norm_squared() == n0);
        for (std::size_t j = 0; j < conserved.size(); ++j) {
            CHECK(expectation(wf, conserved[j]) == doctest::Approx(initial[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("observable parsing") {
    CHECK(observables::parse("n_R(3)").name == "n_R(3)");
    CHECK(observables::parse("right_movers").name == "right_movers");
    CHECK_THROWS_AS(observables::parse("n_X(3)"), InvalidSpec);
    CHECK_THROWS_AS(observables::parse("n_R()"), InvalidSpec);
    CHECK_THROWS_AS(observables::parse("energy"), InvalidSpec);
}

TEST_CASE("one particle double step") {
    const auto d = one_particle_double_step(OneParticleState::delta(8, 0));
    CHECK(d.right[2] == std::complex<double>(1.0, 0.0));
    CHECK(d.norm_squared() == 1.0);
    const auto g = one_particle_double_step(OneParticleState::delta(8, 3, {0.0, 1.0}));
    CHECK(g.left[1] == std::complex<double>(0.0, 1.0));
    const auto wrap = one_particle_double_step(OneParticleState::delta(8, 1, {0.6, 0.8}));
    CHECK(wrap.left[7] == std::complex<double>(0.6, 0.8));
    const auto z = one_particle_double_step(OneParticleState(8));
    CHECK(z.norm_squared() == 0.0);
    for (int k = 0; k < 4; ++k) {
        const auto pw = OneParticleState::plane_wave(8, 1, k);
        CHECK(pw.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
        const auto out = one_particle_double_step(pw);
        const std::complex<double> phase = std::polar(1.0, -2.0 * 2.0 * std::numbers::pi * k / 8.0);
        for (int x = 0; x < 8; x += 2) CHECK(std::abs(out.right[x] - phase * pw.right[x]) < 1e-12);
    }
}

TEST_CASE("dispersion") {
    for (int n_x : {8, 16}) {
        const auto r = dispersion_check(n_x);
        CHECK(r.max_deviation <= 1e-12);
        CHECK(std::abs(r.right_eigenvalues[0] - 1.0) < 1e-12);
        CHECK(std::abs(r.left_eigenvalues[0] - 1.0) < 1e-12);
    }
}

TEST_CASE("sampling with a sharp distribution has zero variance") {
    const auto layer = LayerConfig::from_string("R.G.#...");
    const auto est = sample_evolve(ProductDistribution::sharp(layer), 50, 6,
                                   {observables::occupation(1, Color::R), observables::particle_number()}, 9);
    const auto tr = evolve(layer, 6);
    for (std::size_t k = 0; k < tr.layers.size(); ++k) {
        CHECK(est.mean[k][0] == (tr.layers[k].get(1, Color::R) ? 1.0 : 0.0));
        CHECK(est.mean[k][1] == 4.0);
        CHECK(est.std_error[k][0] == 0.0);
    }
}

TEST_CASE("sampling is reproducible and matches exact evolution") {
    const int n_x = 6;
    auto dist = ProductDistribution::independent(n_x, 0.3, 0.6);
    dist.site_probs[2] = {0.1, 0.6, 0.2, 0.1};
    const std::vector<DiagonalObservable> obs = {observables::occupation(0, Color::R),
                                                 observables::occupation(3, Color::I),
                                                 observables::right_movers()};
    const auto a = sample_evolve(dist, 20000, 4, obs, 42);
    const auto b = sample_evolve(dist, 20000, 4, obs, 42);
    CHECK(a.mean == b.mean);
    auto wf = from_distribution(n_x, dist.joint());
    const ExactEvolver ev(n_x);
    for (std::size_t k = 0; k < a.mean.size(); ++k) {
        for (std::size_t j = 0; j < obs.size(); ++j) {
            const double exact = expectation(wf, obs[j]);
            CHECK(std::abs(a.mean[k][j] - exact) <= 3.0 * a.std_error[k][j]);
        }
        ev.evolve_in_place(wf, 1);
    }
    CHECK_THROWS(ProductDistribution::independent(n_x, 1.5, 0.1));
}
