#pragma once

#include "pca/automaton.hpp"
#include "pca/quantum.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pca {

inline constexpr int kScenarioSchemaVersion = 1;

std::string_view library_version() noexcept;

enum class Vacuum : std::uint8_t { empty, filled, half_A_red, half_A_green, half_B_1, half_B_2 };

std::string_view to_string(Vacuum v) noexcept;
Vacuum parse_vacuum(std::string_view s);

// Sharp vacuum layer. half_B_1 has red on even sites, half_B_2 green on even sites.
LayerConfig make_vacuum(Vacuum v, int n_x);

struct Insertion {
    enum class Kind : std::uint8_t { particle, hole };
    int site = 0;
    Color color = Color::R;
    Kind kind = Kind::particle;
};

// Adds particles or removes them. Throws InvalidSpec for out-of-range sites, a particle
// placed on an occupied slot, a hole in an empty slot, or two insertions on the same slot.
void apply_insertions(LayerConfig& layer, const std::vector<Insertion>& ins);

enum class EvalMethod : std::uint8_t { automatic, exact, sample };

struct ScenarioOutputs {
    std::string trajectory_csv;
    std::string observables_csv;
    std::string ascii;
    std::string ppm;
    std::string metadata;
};

// JSON schema version 1. Exactly one of layer, vacuum or distribution describes the
// initial state; insertions apply to sharp states only.
struct ScenarioConfig {
    int n_x = 0;
    Model model = Model::interacting;
    // Phase of the block tiling at t_in: the first half step uses this parity.
    Parity start_parity = Parity::even;

    std::optional<std::string> layer;
    std::optional<Vacuum> vacuum;
    std::vector<Insertion> insertions;
    std::optional<ProductDistribution> distribution;

    long long n_half_steps = 0;
    std::vector<std::string> observables;
    EvalMethod method = EvalMethod::automatic;
    long long n_samples = 10000;
    std::uint64_t seed = 1;
    ScenarioOutputs outputs;

    bool is_sharp() const noexcept { return !distribution.has_value(); }

    // Throws InvalidSpec on unknown keys, missing fields or a wrong schema version.
    static ScenarioConfig from_json(const nlohmann::json& j);
    static ScenarioConfig load(const std::filesystem::path& file);
    nlohmann::json to_json() const;
};

LayerConfig build_initial(const ScenarioConfig& cfg);
ProductDistribution build_distribution(const ScenarioConfig& cfg);

enum class VacuumLabel : std::uint8_t { A, B, defect, non_vacuum, boundary };

char label_glyph(VacuumLabel l) noexcept;
std::string_view to_string(VacuumLabel l) noexcept;

// Label of the cell (k, x) from the 2x2 window of layers k, k+1 and sites x, x+1 (periodic).
// defect: the cell itself is empty or doubly occupied.
// A: all four cells singly occupied, colors equal along x and flipped from k to k+1.
// B: all four singly occupied, colors alternating along x and unchanged from k to k+1.
VacuumLabel classify_vacuum(const std::vector<LayerConfig>& layers, std::size_t k, int x);

// labels[k][x] for every layer; the last layer is boundary.
std::vector<std::vector<VacuumLabel>> classify_all(const std::vector<LayerConfig>& layers);

// A maximal run of non-vacuum or defect cells separating two vacuum regions in one layer.
struct DomainWall {
    int first = 0; // first site of the run
    int last = 0;  // last site, may be below first when the run wraps
    VacuumLabel left = VacuumLabel::A;
    VacuumLabel right = VacuumLabel::A;
    bool has_defect = false;
};

// Walls of one labelled layer, scanning the ring once from a vacuum cell.
std::vector<DomainWall> domain_walls(const std::vector<VacuumLabel>& row);

enum class RenderFormat : std::uint8_t { ascii, ppm };

RenderFormat parse_render_format(std::string_view s);

// One glyph or pixel per cell, latest layer on top. ascii uses the layer glyphs
// (. R G #); ppm is binary P6 with empty white, R red, I green and both black.
std::string render_spacetime(const std::vector<LayerConfig>& layers, RenderFormat format);

struct ObservableRow {
    long long t = 0;
    std::string observable;
    double value = 0.0;
    double std_error = 0.0;
};

struct ScenarioResult {
    std::optional<Trajectory> trajectory;   // sharp runs
    std::vector<ObservableRow> observables; // ordered by t, then by config order
    std::string method;                     // "automaton", "exact" or "sample"
    nlohmann::json metadata;
};

// Distribution runs: exact wave-function evolution when n_x <= kMaxExactSites (or
// method = exact), sampling otherwise.
ScenarioResult evaluate_scenario(const ScenarioConfig& cfg);

// CSV header t,observable,value,stderr.
void write_observables_csv(std::ostream& out, const std::vector<ObservableRow>& rows);

// Evaluates and writes every configured output below out_dir; returns the result.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

} // namespace pca
