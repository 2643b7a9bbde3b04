#include "pca/automaton.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>

#ifndef PCA_GOLDEN_DIR
#error "PCA_GOLDEN_DIR must point at tests/golden"
#endif

using namespace pca;

TEST_CASE("packed evolution reproduces the golden trajectories") {
    std::ifstream mf(std::string(PCA_GOLDEN_DIR) + "/manifest.json");
    REQUIRE(mf.good());
    const auto manifest = nlohmann::json::parse(mf);
    REQUIRE(manifest.size() == 3);
    for (const auto& c : manifest) {
        const std::string file = c.at("file").get<std::string>();
        CAPTURE(file);
        std::ifstream in(std::string(PCA_GOLDEN_DIR) + "/" + file);
        REQUIRE(in.good());
        const auto golden = read_trajectory_csv(in);
        const auto tr = evolve(LayerConfig::from_string(c.at("initial").get<std::string>()),
                               c.at("n_half_steps").get<long long>(), parse_model(c.at("model").get<std::string>()),
                               parse_parity(c.at("start_parity").get<std::string>()));
        CHECK(golden.size() == tr.layers.size());
        CHECK(golden == tr.layers);
    }
}
