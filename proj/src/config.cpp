#include "vibtrans/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#ifndef VIBTRANS_DATA_DIR
#define VIBTRANS_DATA_DIR "data"
#endif

namespace vibtrans::config {

namespace {

using nlohmann::json;

/// Tracks which keys of an object were consumed so leftovers can be rejected.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_, "expected an object");
    }

    const std::string& path() const { return path_; }
    std::string sub(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

    bool has(std::string_view key) const { return node_.contains(std::string(key)); }

    const json& get(std::string_view key) {
        used_.insert(std::string(key));
        if (!has(key)) throw ConfigError(sub(key), "missing required field");
        return node_[std::string(key)];
    }

    double quantity(std::string_view key, std::string_view unit) { return units::quantity(get(key), sub(key), unit); }
    double quantity(std::string_view key, std::string_view unit, double fallback) {
        return has(key) ? quantity(key, unit) : (used_.insert(std::string(key)), fallback);
    }

    double number(std::string_view key) {
        const json& v = get(key);
        if (!v.is_number()) throw ConfigError(sub(key), "expected a dimensionless number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(sub(key), "value must be finite");
        return d;
    }
    double number(std::string_view key, double fallback) { return has(key) ? number(key) : fallback; }

    long long integer(std::string_view key) {
        const json& v = get(key);
        if (!v.is_number_integer()) throw ConfigError(sub(key), "expected an integer");
        return v.get<long long>();
    }
    long long integer(std::string_view key, long long fallback) { return has(key) ? integer(key) : fallback; }

    std::string string(std::string_view key) {
        const json& v = get(key);
        if (!v.is_string()) throw ConfigError(sub(key), "expected a string");
        return v.get<std::string>();
    }
    std::string string(std::string_view key, std::string fallback) { return has(key) ? string(key) : fallback; }

    bool boolean(std::string_view key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = get(key);
        if (!v.is_boolean()) throw ConfigError(sub(key), "expected true or false");
        return v.get<bool>();
    }

    void mark(std::string_view key) { used_.insert(std::string(key)); }

    void finish() const {
        for (const auto& [key, _] : node_.items())
            if (!used_.count(key)) throw ConfigError(sub(key), "unknown key");
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> used_;
};

template <class F>
auto rethrow_at(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(path, e.what());
    } catch (const std::runtime_error& e) {
        throw ConfigError(path, e.what());
    }
}

std::string_view convention_name(twosite::Convention c) {
    return c == twosite::Convention::Effective ? "effective" : "doubled_hopping";
}

twosite::Convention convention_from(const std::string& s, const std::string& path) {
    if (s == "effective") return twosite::Convention::Effective;
    if (s == "doubled_hopping") return twosite::Convention::DoubledHopping;
    throw ConfigError(path, "unknown convention '" + s + "' (expected effective or doubled_hopping)");
}

twosite::TwoSiteParams parse_twosite(const json& node, const std::string& path) {
    Section s(node, path);
    twosite::TwoSiteParams p;
    p.delta = s.quantity("delta", "rad/ps");
    p.j = s.quantity("j", "rad/ps");
    p.g = s.quantity("g", "rad/ps");
    p.alpha = s.number("alpha");
    p.omega = s.quantity("omega", "rad/ps", 0.0);
    p.convention = convention_from(s.string("convention", "effective"), s.sub("convention"));
    s.finish();
    rethrow_at(path, [&] { p.validate(); return 0; });
    return p;
}

json twosite_json(const twosite::TwoSiteParams& p) {
    return {
        {"delta", units::quantity_json(p.delta, "rad/ps")},
        {"j", units::quantity_json(p.j, "rad/ps")},
        {"g", units::quantity_json(p.g, "rad/ps")},
        {"alpha", p.alpha},
        {"omega", units::quantity_json(p.omega, "rad/ps")},
        {"convention", std::string(convention_name(p.convention))},
    };
}

// --- quantized ----------------------------------------------------------------

std::string_view analysis_name(QuantizedAnalysis a) {
    switch (a) {
    case QuantizedAnalysis::Trajectory: return "trajectory";
    case QuantizedAnalysis::Deviation: return "deviation";
    case QuantizedAnalysis::Witness: return "witness";
    }
    return "trajectory";
}

std::string_view preset_name(SystemPreset p) {
    switch (p) {
    case SystemPreset::Donor: return "donor";
    case SystemPreset::Acceptor: return "acceptor";
    case SystemPreset::Plus: return "plus";
    case SystemPreset::Minus: return "minus";
    }
    return "donor";
}

SystemPreset preset_from(const std::string& s, const std::string& path) {
    for (SystemPreset p : {SystemPreset::Donor, SystemPreset::Acceptor, SystemPreset::Plus, SystemPreset::Minus})
        if (preset_name(p) == s) return p;
    throw ConfigError(path, "unknown system state '" + s + "' (expected donor, acceptor, plus or minus)");
}

quantized::PhononKind parse_phonon(const json& node, const std::string& path) {
    Section s(node, path);
    const std::string kind = s.string("state", "coherent");
    quantized::PhononKind out;
    if (kind == "coherent") {
        out = quantized::Coherent{s.number("alpha", 0.0)};
    } else if (kind == "displaced_thermal") {
        out = quantized::DisplacedThermal{s.number("alpha", 0.0), s.number("nbar")};
    } else if (kind == "number") {
        const long long n = s.integer("n");
        if (n < 0) throw ConfigError(s.sub("n"), "must be >= 0");
        out = quantized::Number{static_cast<int>(n)};
    } else {
        throw ConfigError(s.sub("state"), "unknown phonon state '" + kind + "' (expected coherent, displaced_thermal or number)");
    }
    s.finish();
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (!std::is_same_v<T, quantized::Number>)
                if (!(k.alpha >= 0.0)) throw ConfigError(s.sub("alpha"), "must be >= 0");
            if constexpr (std::is_same_v<T, quantized::DisplacedThermal>)
                if (!(k.nbar >= 0.0)) throw ConfigError(s.sub("nbar"), "must be >= 0");
        },
        out);
    return out;
}

int default_cutoff(const quantized::PhononKind& kind) {
    return std::visit(
        [](const auto& k) -> int {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, quantized::Coherent>) return quantized::coherent_cutoff(k.alpha);
            else if constexpr (std::is_same_v<T, quantized::DisplacedThermal>)
                return quantized::displaced_thermal_cutoff(k.alpha, k.nbar);
            else return k.n + 10;
        },
        kind);
}

json phonon_json(const quantized::PhononKind& kind) {
    return std::visit(
        [](const auto& k) -> json {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, quantized::Coherent>) return {{"state", "coherent"}, {"alpha", k.alpha}};
            else if constexpr (std::is_same_v<T, quantized::DisplacedThermal>)
                return {{"state", "displaced_thermal"}, {"alpha", k.alpha}, {"nbar", k.nbar}};
            else return {{"state", "number"}, {"n", k.n}};
        },
        kind);
}

QuantizedBlock parse_quantized(const json& node, const std::string& path) {
    Section s(node, path);
    QuantizedBlock b;
    b.delta = s.quantity("delta", "rad/ps");
    b.j = s.quantity("j", "rad/ps");
    b.phonon.g = s.quantity("g", "rad/ps");
    b.phonon.omega = s.quantity("omega", "rad/ps");
    if (!(b.phonon.omega >= 0.0)) throw ConfigError(s.sub("omega"), "must be >= 0");
    if (s.has("phonon")) b.phonon_state = parse_phonon(s.get("phonon"), s.sub("phonon"));
    b.phonon.n_max = static_cast<int>(s.integer("n_max", default_cutoff(b.phonon_state)));
    if (b.phonon.n_max < 1) throw ConfigError(s.sub("n_max"), "must be >= 1");
    b.system = preset_from(s.string("system", "donor"), s.sub("system"));

    const std::string analysis = s.string("analysis", "trajectory");
    if (analysis == "trajectory") b.analysis = QuantizedAnalysis::Trajectory;
    else if (analysis == "deviation") b.analysis = QuantizedAnalysis::Deviation;
    else if (analysis == "witness") b.analysis = QuantizedAnalysis::Witness;
    else throw ConfigError(s.sub("analysis"), "unknown analysis '" + analysis + "' (expected trajectory, deviation or witness)");

    if (s.has("witness_states")) {
        const json& w = s.get("witness_states");
        if (!w.is_array() || w.size() != 2 || !w[0].is_string() || !w[1].is_string())
            throw ConfigError(s.sub("witness_states"), "expected two system state names");
        b.witness_a = preset_from(w[0].get<std::string>(), s.sub("witness_states") + "[0]");
        b.witness_b = preset_from(w[1].get<std::string>(), s.sub("witness_states") + "[1]");
    }
    s.finish();

    if (!(b.j >= 0.0)) throw ConfigError(s.sub("j"), "must be >= 0 rad/ps");
    if (b.analysis == QuantizedAnalysis::Deviation) {
        if (!std::holds_alternative<quantized::Coherent>(b.phonon_state))
            throw ConfigError(s.sub("phonon.state"), "deviation analysis requires a coherent phonon state");
        if (b.system != SystemPreset::Donor) throw ConfigError(s.sub("system"), "deviation analysis starts from donor");
        if (!(b.j > 0.0)) throw ConfigError(s.sub("j"), "deviation analysis needs j > 0");
    }
    return b;
}

json quantized_json(const QuantizedBlock& b) {
    return {
        {"delta", units::quantity_json(b.delta, "rad/ps")},
        {"j", units::quantity_json(b.j, "rad/ps")},
        {"g", units::quantity_json(b.phonon.g, "rad/ps")},
        {"omega", units::quantity_json(b.phonon.omega, "rad/ps")},
        {"n_max", b.phonon.n_max},
        {"phonon", phonon_json(b.phonon_state)},
        {"system", std::string(preset_name(b.system))},
        {"analysis", std::string(analysis_name(b.analysis))},
        {"witness_states", {std::string(preset_name(b.witness_a)), std::string(preset_name(b.witness_b))}},
    };
}

// --- fmo ------------------------------------------------------------------------

json read_json_file(const std::filesystem::path& file, const std::string& path) {
    std::ifstream in(file);
    if (!in) throw ConfigError(path, "cannot open '" + file.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path, std::string("invalid JSON in '") + file.string() + "': " + e.what());
    }
}

int site_index(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError(path, "expected a site index 1..7");
    const long long k = v.get<long long>();
    if (k < 1 || k > fmo::kSites) throw ConfigError(path, "site index must be in 1..7, got " + std::to_string(k));
    return static_cast<int>(k);
}

fmo::InitialStateSpec parse_initial(const json& node, const std::string& path) {
    Section s(node, path);
    const std::string kind = s.string("kind");
    fmo::InitialStateSpec out;
    if (kind == "uniform") {
        out = fmo::init::Uniform{};
    } else if (kind == "site") {
        out = fmo::init::Site{site_index(s.get("site"), s.sub("site"))};
    } else if (kind == "backprop") {
        fmo::init::Backprop b;
        b.site = s.has("site") ? site_index(s.get("site"), s.sub("site")) : 3;
        b.t_star_fs = s.quantity("t_star", "fs", 220.0);
        out = b;
    } else if (kind == "explicit") {
        const json& a = s.get("amplitudes");
        if (!a.is_array() || a.size() != fmo::kSites) throw ConfigError(s.sub("amplitudes"), "expected 7 [re, im] pairs");
        fmo::init::Explicit e;
        double norm = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string ip = s.sub("amplitudes") + "[" + std::to_string(i) + "]";
            if (!a[i].is_array() || a[i].size() != 2 || !a[i][0].is_number() || !a[i][1].is_number())
                throw ConfigError(ip, "expected [re, im]");
            e.amplitudes[i] = {a[i][0].get<double>(), a[i][1].get<double>()};
            norm += std::norm(e.amplitudes[i]);
        }
        if (std::abs(std::sqrt(norm) - 1.0) > 1e-10)
            throw ConfigError(s.sub("amplitudes"), "amplitudes must be normalised (norm " + units::format_double(std::sqrt(norm)) + ")");
        out = e;
    } else {
        throw ConfigError(s.sub("kind"), "unknown initial state '" + kind + "' (expected uniform, site, backprop or explicit)");
    }
    s.finish();
    return out;
}

json initial_json(const fmo::InitialStateSpec& spec) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, fmo::init::Uniform>) return {{"kind", "uniform"}};
            else if constexpr (std::is_same_v<T, fmo::init::Site>) return {{"kind", "site"}, {"site", v.site}};
            else if constexpr (std::is_same_v<T, fmo::init::Backprop>)
                return {{"kind", "backprop"}, {"site", v.site}, {"t_star", units::quantity_json(v.t_star_fs, "fs")}};
            else {
                json a = json::array();
                for (const auto& c : v.amplitudes) a.push_back({c.real(), c.imag()});
                return {{"kind", "explicit"}, {"amplitudes", a}};
            }
        },
        spec);
}

std::optional<fmo::ResonanceTarget> parse_resonance(const std::string& s, const std::string& path) {
    if (s == "none") return std::nullopt;
    if (s == "mean") return fmo::MeanEnergy{};
    if (s.rfind("site:", 0) == 0) {
        const std::string rest = s.substr(5);
        char* end = nullptr;
        const long k = std::strtol(rest.c_str(), &end, 10);
        if (end != rest.c_str() && *end == '\0' && k >= 1 && k <= fmo::kSites) return fmo::SiteEnergy{static_cast<int>(k)};
    }
    throw ConfigError(path, "expected none, mean or site:<1..7>, got '" + s + "'");
}

std::string resonance_string(const std::optional<fmo::ResonanceTarget>& r) {
    if (!r) return "none";
    if (std::holds_alternative<fmo::MeanEnergy>(*r)) return "mean";
    return "site:" + std::to_string(std::get<fmo::SiteEnergy>(*r).site);
}

FmoBlock parse_fmo(const json& node, const std::string& path, const ParseOptions& options) {
    Section s(node, path);
    FmoBlock b;
    const bool inline_params = s.has("site_energies") || s.has("couplings") || s.has("label");
    if (s.has("hamiltonian_file")) {
        if (inline_params) throw ConfigError(path, "give either hamiltonian_file or inline site_energies/couplings, not both");
        std::filesystem::path file = s.string("hamiltonian_file");
        if (file.is_relative()) file = options.base_dir / file;
        b.params = fmo::load_fmo(read_json_file(file, s.sub("hamiltonian_file")), s.sub("hamiltonian_file"));
    } else if (inline_params) {
        json inline_block = json::object();
        for (const char* key : {"label", "site_energies", "couplings"})
            if (s.has(key)) inline_block[key] = s.get(key);
        b.params = fmo::load_fmo(inline_block, path);
    } else {
        b.params = fmo::load_fmo(read_json_file(default_fmo_data_file(), path), path);
    }
    b.resonance = parse_resonance(s.string("resonance", "mean"), s.sub("resonance"));
    if (s.has("initial")) b.initial = parse_initial(s.get("initial"), s.sub("initial"));
    if (s.has("capture_site")) b.capture_site = site_index(s.get("capture_site"), s.sub("capture_site"));
    b.coherences = s.boolean("coherences", false);
    s.finish();
    return b;
}

json fmo_json(const FmoBlock& b) {
    json j = fmo::to_json(b.params);
    j["resonance"] = resonance_string(b.resonance);
    j["initial"] = initial_json(b.initial);
    j["capture_site"] = b.capture_site;
    j["coherences"] = b.coherences;
    return j;
}

// --- sweep / estimate -------------------------------------------------------------

bool dimensioned_axis(errorbudget::Axis a) {
    return a == errorbudget::Axis::DetuningError || a == errorbudget::Axis::DriveFrequency;
}

SweepBlock parse_sweep(const json& node, const std::string& path, std::optional<std::uint64_t> seed) {
    Section s(node, path);
    SweepBlock b;
    b.spec.base = parse_twosite(s.get("base"), s.sub("base"));
    const std::string axis = s.string("axis");
    b.spec.axis = rethrow_at(s.sub("axis"), [&] { return errorbudget::axis_from_name(axis); });
    if (dimensioned_axis(b.spec.axis)) {
        b.spec.grid = units::quantity_array(s.get("grid"), s.sub("grid"), "rad/ps");
    } else {
        const json& g = s.get("grid");
        if (!g.is_array() || g.empty()) throw ConfigError(s.sub("grid"), "expected a non-empty array of dimensionless numbers");
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!g[k].is_number()) throw ConfigError(s.sub("grid") + "[" + std::to_string(k) + "]", "expected a number");
            b.spec.grid.push_back(g[k].get<double>());
        }
    }
    const long long default_samples = b.spec.axis == errorbudget::Axis::AlphaSpread ? 1000 : 1;
    const long long samples = s.integer("samples", default_samples);
    if (samples < 1 || samples > 100'000'000) throw ConfigError(s.sub("samples"), "must be in 1..1e8");
    b.spec.samples = static_cast<int>(samples);
    s.finish();

    b.spec.seed = seed;
    if (b.spec.axis == errorbudget::Axis::AlphaSpread && !seed)
        throw ConfigError("seed", "alpha_spread sweeps require a seed");
    rethrow_at(path, [&] { b.spec.validate(); return 0; });
    if (b.spec.axis == errorbudget::Axis::AlphaSpread)
        for (double v : b.spec.grid)
            if (v < 0.0) throw ConfigError(s.sub("grid"), "alpha spread values must be >= 0");
    const double residual = b.spec.base.effective_detuning();
    if (std::abs(residual) > 1e-9 * std::max(1.0, std::abs(b.spec.base.delta)))
        throw ConfigError(s.sub("base"), "sweep base must be at resonance (delta = g alpha); residual " +
                                             units::format_double(residual) + " rad/ps");
    return b;
}

json sweep_json(const SweepBlock& b) {
    json j{
        {"base", twosite_json(b.spec.base)},
        {"axis", std::string(errorbudget::axis_name(b.spec.axis))},
        {"samples", b.spec.samples},
    };
    if (dimensioned_axis(b.spec.axis)) j["grid"] = units::quantity_array_json(b.spec.grid, "rad/ps");
    else j["grid"] = b.spec.grid;
    return j;
}

EstimateBlock parse_estimate(const json& node, const std::string& path) {
    Section s(node, path);
    EstimateBlock d;
    EstimateBlock b;
    b.mass_kg = s.quantity("mass", "kg", d.mass_kg);
    b.coherence_length_m = s.quantity("coherence_length", "m", d.coherence_length_m);
    b.temperature_K = s.quantity("temperature", "K", d.temperature_K);
    b.flux_W_per_m2 = s.quantity("flux", "W/m^2", d.flux_W_per_m2);
    b.area_m2 = s.quantity("area", "m^2", d.area_m2);
    b.duration_s = s.quantity("duration", "s", d.duration_s);
    b.phonon_energy_J = s.quantity("phonon_energy", "J", d.phonon_energy_J);
    b.wavenumber_cm = s.quantity("wavenumber", "cm^-1", d.wavenumber_cm);
    s.finish();
    const std::pair<const char*, double> positive[] = {
        {"mass", b.mass_kg}, {"coherence_length", b.coherence_length_m}, {"temperature", b.temperature_K},
        {"flux", b.flux_W_per_m2}, {"area", b.area_m2}, {"duration", b.duration_s},
        {"phonon_energy", b.phonon_energy_J},
    };
    for (const auto& [key, v] : positive)
        if (!(v > 0.0)) throw ConfigError(s.sub(key), "must be > 0");
    return b;
}

json estimate_json(const EstimateBlock& b) {
    return {
        {"mass", units::quantity_json(b.mass_kg, "kg")},
        {"coherence_length", units::quantity_json(b.coherence_length_m, "m")},
        {"temperature", units::quantity_json(b.temperature_K, "K")},
        {"flux", units::quantity_json(b.flux_W_per_m2, "W/m^2")},
        {"area", units::quantity_json(b.area_m2, "m^2")},
        {"duration", units::quantity_json(b.duration_s, "s")},
        {"phonon_energy", units::quantity_json(b.phonon_energy_J, "J")},
        {"wavenumber", units::quantity_json(b.wavenumber_cm, "cm^-1")},
    };
}

std::optional<TimeGrid> default_time_grid(Model m) {
    switch (m) {
    case Model::TwoSite: return TimeGrid{10000.0, 1.0};
    case Model::Quantized: return TimeGrid{5000.0, 10.0};
    case Model::Fmo: return TimeGrid{1000.0, 1.0};
    default: return std::nullopt;
    }
}

std::string_view format_name(OutputFormat f) {
    return f == OutputFormat::Csv ? "csv" : "json";
}

void fnv1a(std::uint64_t& h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
}

} // namespace

std::string_view model_name(Model m) {
    switch (m) {
    case Model::TwoSite: return "twosite";
    case Model::Quantized: return "quantized";
    case Model::Fmo: return "fmo";
    case Model::Sweep: return "sweep";
    case Model::Estimate: return "estimate";
    }
    return "twosite";
}

std::optional<Model> model_from_name(std::string_view name) {
    for (Model m : {Model::TwoSite, Model::Quantized, Model::Fmo, Model::Sweep, Model::Estimate})
        if (model_name(m) == name) return m;
    return std::nullopt;
}

std::filesystem::path default_fmo_data_file() {
    return std::filesystem::path(VIBTRANS_DATA_DIR) / "fmo_default.json";
}

RunConfig parse_config(std::string_view text, const ParseOptions& options) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config_json(doc, options);
}

RunConfig parse_config_json(const json& doc, const ParseOptions& options) {
    Section top(doc, "");
    RunConfig cfg;

    std::vector<Model> present;
    for (Model m : {Model::TwoSite, Model::Quantized, Model::Fmo, Model::Sweep, Model::Estimate})
        if (top.has(model_name(m))) present.push_back(m);
    if (present.empty()) throw ConfigError("", "no model block (expected one of twosite, quantized, fmo, sweep, estimate)");
    if (present.size() > 1)
        throw ConfigError(std::string(model_name(present[1])), "exactly one model block is allowed; also found " +
                                                                   std::string(model_name(present[0])));
    cfg.model = present.front();
    if (top.has("model")) {
        const std::string named = top.string("model");
        if (named != model_name(cfg.model))
            throw ConfigError("model", "names '" + named + "' but the model block is '" + std::string(model_name(cfg.model)) + "'");
    }

    if (top.has("seed")) {
        const json& sv = top.get("seed");
        if (!sv.is_number_integer() || (sv.is_number_integer() && !sv.is_number_unsigned() && sv.get<long long>() < 0))
            throw ConfigError("seed", "expected a non-negative 64-bit integer");
        cfg.seed = sv.get<std::uint64_t>();
    }

    const std::string key(model_name(cfg.model));
    const json& block = top.get(key);
    switch (cfg.model) {
    case Model::TwoSite: cfg.block = TwoSiteBlock{parse_twosite(block, key)}; break;
    case Model::Quantized: cfg.block = parse_quantized(block, key); break;
    case Model::Fmo: cfg.block = parse_fmo(block, key, options); break;
    case Model::Sweep: cfg.block = parse_sweep(block, key, cfg.seed); break;
    case Model::Estimate: cfg.block = parse_estimate(block, key); break;
    }

    const std::optional<TimeGrid> grid_default = default_time_grid(cfg.model);
    if (top.has("time_grid")) {
        if (!grid_default) throw ConfigError("time_grid", "not used by model " + key);
        Section g(top.get("time_grid"), "time_grid");
        TimeGrid tg;
        tg.t_max_fs = g.quantity("t_max", "fs", grid_default->t_max_fs);
        tg.dt_fs = g.quantity("dt", "fs", grid_default->dt_fs);
        g.finish();
        if (!(tg.dt_fs > 0.0)) throw ConfigError("time_grid.dt", "must be > 0");
        if (!(tg.t_max_fs >= tg.dt_fs)) throw ConfigError("time_grid.t_max", "must be >= dt");
        if (tg.t_max_fs / tg.dt_fs > 5e7) throw ConfigError("time_grid", "more than 5e7 time points");
        cfg.time_grid = tg;
    } else {
        cfg.time_grid = grid_default;
    }

    cfg.output.path = "vibtrans_" + key + ".csv";
    if (top.has("output")) {
        Section o(top.get("output"), "output");
        const std::string fmt = o.string("format", "csv");
        if (fmt == "csv") cfg.output.format = OutputFormat::Csv;
        else if (fmt == "json") cfg.output.format = OutputFormat::Json;
        else throw ConfigError("output.format", "expected csv or json, got '" + fmt + "'");
        cfg.output.path = o.string("path", "vibtrans_" + key + "." + fmt);
        if (cfg.output.path.empty()) throw ConfigError("output.path", "must not be empty");
        o.finish();
    }
    top.finish();
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    ParseOptions options;
    options.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return parse_config(ss.str(), options);
}

json to_json(const RunConfig& cfg) {
    json j;
    j["model"] = std::string(model_name(cfg.model));
    const std::string key(model_name(cfg.model));
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, TwoSiteBlock>) j[key] = twosite_json(b.params);
            else if constexpr (std::is_same_v<T, QuantizedBlock>) j[key] = quantized_json(b);
            else if constexpr (std::is_same_v<T, FmoBlock>) j[key] = fmo_json(b);
            else if constexpr (std::is_same_v<T, SweepBlock>) j[key] = sweep_json(b);
            else j[key] = estimate_json(b);
        },
        cfg.block);
    if (cfg.time_grid)
        j["time_grid"] = {{"t_max", units::quantity_json(cfg.time_grid->t_max_fs, "fs")},
                          {"dt", units::quantity_json(cfg.time_grid->dt_fs, "fs")}};
    j["output"] = {{"path", cfg.output.path}, {"format", std::string(format_name(cfg.output.format))}};
    if (cfg.seed) j["seed"] = *cfg.seed;
    return j;
}

std::string serialize_config(const RunConfig& cfg) {
    return to_json(cfg).dump(2);
}

std::string config_hash(const RunConfig& cfg) {
    json j = to_json(cfg);
    j.erase("output");
    std::uint64_t h = 0xCBF29CE484222325ULL;
    fnv1a(h, j.dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace vibtrans::config
