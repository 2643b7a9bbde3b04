#include "pca/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#ifndef PCA_VERSION
#define PCA_VERSION "0.0.0"
#endif

namespace pca {

using nlohmann::json;

std::string_view library_version() noexcept { return PCA_VERSION; }

namespace {

constexpr std::pair<Vacuum, std::string_view> kVacuumNames[] = {
    {Vacuum::empty, "empty"},           {Vacuum::filled, "filled"},
    {Vacuum::half_A_red, "half_A_red"}, {Vacuum::half_A_green, "half_A_green"},
    {Vacuum::half_B_1, "half_B_1"},     {Vacuum::half_B_2, "half_B_2"},
};

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!j.is_object()) throw InvalidSpec(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw InvalidSpec("unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw InvalidSpec("missing '" + std::string(key) + "' in " + where);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidSpec("wrong type for '" + std::string(key) + "' in " + where);
    }
}

Color parse_color(const std::string& s) {
    if (s == "R") return Color::R;
    if (s == "I" || s == "G") return Color::I;
    throw InvalidSpec("unknown color '" + s + "' (expected R, G or I)");
}

std::string_view color_name(Color c) { return c == Color::R ? "R" : "G"; }

EvalMethod parse_method(const std::string& s) {
    if (s == "auto") return EvalMethod::automatic;
    if (s == "exact") return EvalMethod::exact;
    if (s == "sample") return EvalMethod::sample;
    throw InvalidSpec("unknown method '" + s + "'");
}

std::string_view method_name(EvalMethod m) {
    switch (m) {
        case EvalMethod::exact: return "exact";
        case EvalMethod::sample: return "sample";
        default: return "auto";
    }
}

// Single color of a singly occupied site, or -1.
int single_color(unsigned bits) {
    if (bits == 1u) return 0;
    if (bits == 2u) return 1;
    return -1;
}

} // namespace

std::string_view to_string(Vacuum v) noexcept {
    for (const auto& [k, name] : kVacuumNames)
        if (k == v) return name;
    return "?";
}

Vacuum parse_vacuum(std::string_view s) {
    for (const auto& [k, name] : kVacuumNames)
        if (name == s) return k;
    throw InvalidSpec("unknown vacuum '" + std::string(s) + "'");
}

LayerConfig make_vacuum(Vacuum v, int n_x) {
    LayerConfig l(n_x);
    for (int x = 0; x < n_x; ++x) {
        unsigned bits = 0;
        switch (v) {
            case Vacuum::empty: bits = 0; break;
            case Vacuum::filled: bits = 3; break;
            case Vacuum::half_A_red: bits = 1; break;
            case Vacuum::half_A_green: bits = 2; break;
            case Vacuum::half_B_1: bits = (x % 2 == 0) ? 1 : 2; break;
            case Vacuum::half_B_2: bits = (x % 2 == 0) ? 2 : 1; break;
        }
        l.set_site_bits(x, bits);
    }
    return l;
}

void apply_insertions(LayerConfig& layer, const std::vector<Insertion>& ins) {
    std::set<std::pair<int, int>> seen;
    for (const auto& i : ins) {
        if (i.site < 0 || i.site >= layer.n_x())
            throw InvalidSpec("insertion site " + std::to_string(i.site) + " outside the lattice");
        if (!seen.insert({i.site, static_cast<int>(i.color)}).second)
            throw InvalidSpec("conflicting insertions at site " + std::to_string(i.site));
        const bool occupied = layer.get(i.site, i.color);
        if (i.kind == Insertion::Kind::particle && occupied)
            throw InvalidSpec("particle insertion on an occupied slot at site " + std::to_string(i.site));
        if (i.kind == Insertion::Kind::hole && !occupied)
            throw InvalidSpec("hole insertion on an empty slot at site " + std::to_string(i.site));
        layer.set(i.site, i.color, i.kind == Insertion::Kind::particle);
    }
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
    reject_unknown_keys(j,
                        {"schema_version", "lattice", "model", "start_parity", "initial", "n_half_steps",
                         "observables", "method", "n_samples", "seed", "outputs"},
                        "scenario");
    if (get_field<int>(j, "schema_version", "scenario") != kScenarioSchemaVersion)
        throw InvalidSpec("unsupported schema_version (expected 1)");

    ScenarioConfig c;
    const json& lat = j.at("lattice");
    reject_unknown_keys(lat, {"n_x"}, "lattice");
    c.n_x = get_field<int>(lat, "n_x", "lattice");
    require_valid_n_x(c.n_x);

    if (j.contains("model")) c.model = parse_model(get_field<std::string>(j, "model", "scenario"));
    if (j.contains("start_parity"))
        c.start_parity = parse_parity(get_field<std::string>(j, "start_parity", "scenario"));

    if (!j.contains("initial")) throw InvalidSpec("missing 'initial' in scenario");
    const json& ini = j.at("initial");
    reject_unknown_keys(ini, {"layer", "vacuum", "insertions", "distribution"}, "initial");
    const int kinds = int(ini.contains("layer")) + int(ini.contains("vacuum")) + int(ini.contains("distribution"));
    if (kinds != 1) throw InvalidSpec("initial needs exactly one of layer, vacuum, distribution");
    if (ini.contains("layer")) {
        c.layer = get_field<std::string>(ini, "layer", "initial");
        if (static_cast<int>(c.layer->size()) != c.n_x) throw InvalidSpec("initial layer length differs from n_x");
    }
    if (ini.contains("vacuum")) c.vacuum = parse_vacuum(get_field<std::string>(ini, "vacuum", "initial"));
    if (ini.contains("insertions")) {
        if (ini.contains("distribution")) throw InvalidSpec("insertions apply to sharp initial states only");
        for (const json& e : ini.at("insertions")) {
            reject_unknown_keys(e, {"site", "color", "kind"}, "insertion");
            Insertion in;
            in.site = get_field<int>(e, "site", "insertion");
            in.color = parse_color(get_field<std::string>(e, "color", "insertion"));
            const auto kind = e.contains("kind") ? get_field<std::string>(e, "kind", "insertion") : "particle";
            if (kind == "particle") in.kind = Insertion::Kind::particle;
            else if (kind == "hole") in.kind = Insertion::Kind::hole;
            else throw InvalidSpec("unknown insertion kind '" + kind + "'");
            c.insertions.push_back(in);
        }
    }
    if (ini.contains("distribution")) {
        const json& d = ini.at("distribution");
        reject_unknown_keys(d, {"p_red", "p_green", "sites"}, "distribution");
        if (d.contains("sites")) {
            if (d.contains("p_red") || d.contains("p_green"))
                throw InvalidSpec("distribution takes either sites or p_red/p_green");
            ProductDistribution pd;
            pd.site_probs = get_field<std::vector<std::array<double, 4>>>(d, "sites", "distribution");
            if (pd.n_x() != c.n_x) throw InvalidSpec("distribution sites differ from n_x");
            c.distribution = pd;
        } else {
            c.distribution = ProductDistribution::independent(c.n_x, get_field<double>(d, "p_red", "distribution"),
                                                              get_field<double>(d, "p_green", "distribution"));
        }
        try {
            c.distribution->validate();
        } catch (const std::invalid_argument& e) {
            throw InvalidSpec(e.what());
        }
    }

    c.n_half_steps = get_field<long long>(j, "n_half_steps", "scenario");
    if (c.n_half_steps < 0) throw InvalidSpec("n_half_steps must be non-negative");
    if (j.contains("observables")) c.observables = get_field<std::vector<std::string>>(j, "observables", "scenario");
    for (const auto& name : c.observables) observables::parse(name);
    if (j.contains("method")) c.method = parse_method(get_field<std::string>(j, "method", "scenario"));
    if (j.contains("n_samples")) c.n_samples = get_field<long long>(j, "n_samples", "scenario");
    if (c.n_samples < 1) throw InvalidSpec("n_samples must be positive");
    if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed", "scenario");

    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        reject_unknown_keys(o, {"trajectory_csv", "observables_csv", "ascii", "ppm", "metadata"}, "outputs");
        auto opt = [&](const char* k) { return o.contains(k) ? get_field<std::string>(o, k, "outputs") : std::string(); };
        c.outputs = {opt("trajectory_csv"), opt("observables_csv"), opt("ascii"), opt("ppm"), opt("metadata")};
    }
    if (c.is_sharp()) build_initial(c);
    return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open scenario file " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidSpec(std::string("scenario is not valid JSON: ") + e.what());
    }
    return from_json(j);
}

json ScenarioConfig::to_json() const {
    json j;
    j["schema_version"] = kScenarioSchemaVersion;
    j["lattice"] = {{"n_x", n_x}};
    j["model"] = std::string(to_string(model));
    j["start_parity"] = std::string(to_string(start_parity));
    json ini = json::object();
    if (layer) ini["layer"] = *layer;
    if (vacuum) ini["vacuum"] = std::string(to_string(*vacuum));
    if (!insertions.empty()) {
        json arr = json::array();
        for (const auto& i : insertions)
            arr.push_back({{"site", i.site},
                           {"color", std::string(color_name(i.color))},
                           {"kind", i.kind == Insertion::Kind::particle ? "particle" : "hole"}});
        ini["insertions"] = arr;
    }
    if (distribution) ini["distribution"] = {{"sites", distribution->site_probs}};
    j["initial"] = ini;
    j["n_half_steps"] = n_half_steps;
    j["observables"] = observables;
    j["method"] = std::string(method_name(method));
    j["n_samples"] = n_samples;
    j["seed"] = seed;
    json o = json::object();
    auto put = [&](const char* k, const std::string& v) {
        if (!v.empty()) o[k] = v;
    };
    put("trajectory_csv", outputs.trajectory_csv);
    put("observables_csv", outputs.observables_csv);
    put("ascii", outputs.ascii);
    put("ppm", outputs.ppm);
    put("metadata", outputs.metadata);
    j["outputs"] = o;
    return j;
}

LayerConfig build_initial(const ScenarioConfig& cfg) {
    if (!cfg.is_sharp()) throw InvalidSpec("scenario has a distribution, not a sharp initial layer");
    LayerConfig l;
    if (cfg.layer) {
        l = LayerConfig::from_string(*cfg.layer);
    } else if (cfg.vacuum) {
        l = make_vacuum(*cfg.vacuum, cfg.n_x);
    } else {
        throw InvalidSpec("scenario has no initial state");
    }
    if (l.n_x() != cfg.n_x) throw InvalidSpec("initial layer length differs from n_x");
    apply_insertions(l, cfg.insertions);
    return l;
}

ProductDistribution build_distribution(const ScenarioConfig& cfg) {
    if (cfg.distribution) return *cfg.distribution;
    return ProductDistribution::sharp(build_initial(cfg));
}

char label_glyph(VacuumLabel l) noexcept {
    switch (l) {
        case VacuumLabel::A: return 'A';
        case VacuumLabel::B: return 'B';
        case VacuumLabel::defect: return '*';
        case VacuumLabel::non_vacuum: return '-';
        default: return ' ';
    }
}

std::string_view to_string(VacuumLabel l) noexcept {
    switch (l) {
        case VacuumLabel::A: return "A";
        case VacuumLabel::B: return "B";
        case VacuumLabel::defect: return "defect";
        case VacuumLabel::non_vacuum: return "non-vacuum";
        default: return "boundary";
    }
}

VacuumLabel classify_vacuum(const std::vector<LayerConfig>& layers, std::size_t k, int x) {
    if (k >= layers.size()) throw std::out_of_range("layer index outside the trajectory");
    const LayerConfig& lo = layers[k];
    const int n = lo.n_x();
    if (x < 0 || x >= n) throw std::out_of_range("site outside the lattice");
    const unsigned here = lo.site_bits(x);
    if (here == 0u || here == 3u) return VacuumLabel::defect;
    if (k + 1 >= layers.size()) return VacuumLabel::boundary;
    const LayerConfig& hi = layers[k + 1];
    const int xr = (x + 1) % n;
    const int c00 = single_color(here), c01 = single_color(lo.site_bits(xr));
    const int c10 = single_color(hi.site_bits(x)), c11 = single_color(hi.site_bits(xr));
    if (c01 < 0 || c10 < 0 || c11 < 0) return VacuumLabel::non_vacuum;
    if (c00 == c01 && c10 == c11 && c10 != c00) return VacuumLabel::A;
    if (c00 != c01 && c10 == c00 && c11 == c01) return VacuumLabel::B;
    return VacuumLabel::non_vacuum;
}

std::vector<std::vector<VacuumLabel>> classify_all(const std::vector<LayerConfig>& layers) {
    std::vector<std::vector<VacuumLabel>> out(layers.size());
    for (std::size_t k = 0; k < layers.size(); ++k) {
        out[k].resize(layers[k].n_x());
        for (int x = 0; x < layers[k].n_x(); ++x) out[k][x] = classify_vacuum(layers, k, x);
    }
    return out;
}

std::vector<DomainWall> domain_walls(const std::vector<VacuumLabel>& row) {
    const int n = static_cast<int>(row.size());
    auto is_vac = [&](int x) { return row[x] == VacuumLabel::A || row[x] == VacuumLabel::B; };
    int start = -1;
    for (int x = 0; x < n && start < 0; ++x)
        if (is_vac(x) && !is_vac((x + 1) % n)) start = x;
    std::vector<DomainWall> walls;
    if (start < 0) return walls;
    int i = 0;
    while (i < n) {
        const int x = (start + i) % n;
        if (is_vac(x) && !is_vac((x + 1) % n)) {
            DomainWall w;
            w.left = row[x];
            w.first = (x + 1) % n;
            int j = 1;
            while (!is_vac((x + j) % n)) {
                w.has_defect = w.has_defect || row[(x + j) % n] == VacuumLabel::defect;
                ++j;
            }
            w.last = (x + j - 1) % n;
            w.right = row[(x + j) % n];
            walls.push_back(w);
            i += j;
        } else {
            ++i;
        }
    }
    return walls;
}

RenderFormat parse_render_format(std::string_view s) {
    if (s == "ascii") return RenderFormat::ascii;
    if (s == "ppm") return RenderFormat::ppm;
    throw InvalidSpec("unknown render format '" + std::string(s) + "'");
}

std::string render_spacetime(const std::vector<LayerConfig>& layers, RenderFormat format) {
    const int n = layers.empty() ? 0 : layers.front().n_x();
    std::string out;
    if (format == RenderFormat::ascii) {
        for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
            out += it->to_string();
            out += '\n';
        }
        return out;
    }
    static constexpr unsigned char palette[4][3] = {{255, 255, 255}, {220, 30, 30}, {30, 150, 30}, {0, 0, 0}};
    out = "P6\n" + std::to_string(n) + " " + std::to_string(layers.size()) + "\n255\n";
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
        for (int x = 0; x < n; ++x) {
            const auto* rgb = palette[it->site_bits(x)];
            out.append(reinterpret_cast<const char*>(rgb), 3);
        }
    }
    return out;
}

void write_observables_csv(std::ostream& out, const std::vector<ObservableRow>& rows) {
    out << "t,observable,value,stderr\n";
    out.precision(17);
    for (const auto& r : rows) out << r.t << ',' << r.observable << ',' << r.value << ',' << r.std_error << '\n';
}

ScenarioResult evaluate_scenario(const ScenarioConfig& cfg) {
    std::vector<DiagonalObservable> obs;
    for (const auto& name : cfg.observables) obs.push_back(observables::parse(name));

    ScenarioResult res;
    json meta;
    meta["version"] = std::string(library_version());
    meta["schema_version"] = kScenarioSchemaVersion;
    meta["model"] = std::string(to_string(cfg.model));
    meta["start_parity"] = std::string(to_string(cfg.start_parity));
    meta["n_x"] = cfg.n_x;
    meta["n_half_steps"] = cfg.n_half_steps;
    meta["seed"] = cfg.seed;

    if (cfg.is_sharp()) {
        res.method = "automaton";
        res.trajectory = evolve(build_initial(cfg), cfg.n_half_steps, cfg.model, cfg.start_parity);
        const Trajectory& tr = *res.trajectory;
        for (std::size_t k = 0; k < tr.layers.size(); ++k) {
            const long long m_t = tr.time_of(k);
            for (const auto& o : obs) res.observables.push_back({m_t, o.name, o.value(tr.layers[k], m_t), 0.0});
        }
    } else {
        const ProductDistribution dist = build_distribution(cfg);
        const bool exact = cfg.method == EvalMethod::exact ||
                           (cfg.method == EvalMethod::automatic && cfg.n_x <= kMaxExactSites);
        const long long m0 = to_int(cfg.start_parity);
        if (exact) {
            res.method = "exact";
            const ExactEvolver ev(cfg.n_x, cfg.model);
            const auto p = dist.joint();
            WaveFunction wf = from_distribution(cfg.n_x, p, std::nullopt, m0);
            for (long long k = 0; k <= cfg.n_half_steps; ++k) {
                if (k > 0) ev.evolve_in_place(wf, 1);
                for (const auto& o : obs) res.observables.push_back({wf.m_t, o.name, expectation(wf, o), 0.0});
            }
        } else {
            if (cfg.start_parity != Parity::even) throw InvalidSpec("sampling runs start at even parity");
            res.method = "sample";
            const auto est = sample_evolve(dist, cfg.n_samples, cfg.n_half_steps, obs, cfg.seed, cfg.model);
            for (std::size_t k = 0; k < est.times.size(); ++k)
                for (std::size_t i = 0; i < obs.size(); ++i)
                    res.observables.push_back({est.times[k], est.names[i], est.mean[k][i], est.std_error[k][i]});
            meta["n_samples"] = cfg.n_samples;
        }
    }
    meta["method"] = res.method;
    meta["config"] = cfg.to_json();
    res.metadata = meta;
    return res;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << bytes;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

} // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    ScenarioResult res = evaluate_scenario(cfg);
    const auto& o = cfg.outputs;
    const bool needs_trajectory = !o.trajectory_csv.empty() || !o.ascii.empty() || !o.ppm.empty();
    if (needs_trajectory && !res.trajectory) throw InvalidSpec("trajectory outputs need a sharp initial state");
    if (!o.trajectory_csv.empty()) {
        std::ostringstream s;
        write_trajectory_csv(s, *res.trajectory);
        write_file(out_dir / o.trajectory_csv, s.str());
    }
    if (!o.ascii.empty()) write_file(out_dir / o.ascii, render_spacetime(res.trajectory->layers, RenderFormat::ascii));
    if (!o.ppm.empty()) write_file(out_dir / o.ppm, render_spacetime(res.trajectory->layers, RenderFormat::ppm));
    if (!o.observables_csv.empty()) {
        std::ostringstream s;
        write_observables_csv(s, res.observables);
        write_file(out_dir / o.observables_csv, s.str());
    }
    if (!o.metadata.empty()) write_file(out_dir / o.metadata, res.metadata.dump(2) + "\n");
    return res;
}

} // namespace pca
