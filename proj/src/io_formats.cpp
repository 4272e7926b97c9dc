#include "kerrsim/io_formats.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace kerrsim::io {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

double get_num(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw ConfigError(std::string("config: missing or non-numeric field '") + key + "'");
    }
    return j[key].get<double>();
}

double get_num_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(std::string("config: non-numeric field '") + key + "'");
    return j[key].get<double>();
}

} // namespace

json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    return j;
}

void apply_override(json& config, const std::string& dotted_key, const std::string& value) {
    json* node = &config;
    std::stringstream ss(dotted_key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("override: empty key");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (...) {
        parsed = value;   // plain string
    }
    (*node)[parts.back()] = parsed;
}

void require_schema_version(const json& config) {
    if (!config.contains("schema_version") || config["schema_version"] != SCHEMA_VERSION) {
        throw ConfigError("config: schema_version " + std::to_string(SCHEMA_VERSION) + " required");
    }
}

std::string content_hash(const json& config) {
    const std::string dump = config.dump();   // object keys are sorted by construction
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016" PRIx64, h);
    return buf;
}

circuit::CircuitConstants parse_constants(const json& j) {
    circuit::CircuitConstants k;
    k.ejmax_a = get_num(j, "ejmax_a");
    k.ejmax_b = get_num(j, "ejmax_b");
    k.ejmax_c = get_num(j, "ejmax_c");
    k.d_a = get_num(j, "d_a");
    k.d_b = get_num(j, "d_b");
    k.d_c = get_num(j, "d_c");
    k.c = get_num(j, "c");
    k.c1g = get_num(j, "c1g");
    k.c2g = get_num(j, "c2g");
    k.cc = get_num(j, "cc");
    try {
        k.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return k;
}

circuit::FluxConfig parse_flux(const json& j) {
    circuit::FluxConfig f;
    f.phi_a = get_num_or(j, "phi_a", 0.0);
    f.phi_b = get_num_or(j, "phi_b", 0.0);
    f.phi_dc = get_num_or(j, "phi_dc", 0.0);
    f.phi_ac = get_num_or(j, "phi_ac", 0.0);
    f.omega_m = get_num_or(j, "omega_m", 0.0);
    if (j.contains("crosstalk_matrix")) {
        const auto& m = j["crosstalk_matrix"];
        if (!m.is_array() || m.size() != 9) {
            throw ConfigError("config: crosstalk_matrix must be a flat 3x3 array");
        }
        for (std::size_t i = 0; i < 9; ++i) f.crosstalk[i] = m[i].get<double>();
    }
    try {
        f.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return f;
}

dyn::DissipationSpec parse_dissipation(const json& j) {
    dyn::DissipationSpec d;
    d.kappa_a = get_num_or(j, "kappa_a", 0.0);
    d.kappa_b = get_num_or(j, "kappa_b", 0.0);
    d.kappa_s = get_num_or(j, "kappa_s", 0.0);
    d.nbar_a = get_num_or(j, "nbar_a", 0.0);
    d.nbar_b = get_num_or(j, "nbar_b", 0.0);
    d.nbar_s = get_num_or(j, "nbar_s", 0.0);
    try {
        d.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return d;
}

circuit::DerivedParams parse_derived_params(const json& j) {
    circuit::DerivedParams p;
    p.omega_a = get_num(j, "omega_a");
    p.omega_b = get_num(j, "omega_b");
    p.alpha_a = get_num(j, "alpha_a");
    p.alpha_b = get_num(j, "alpha_b");
    p.v = get_num(j, "v");
    p.j_ac = get_num(j, "j_ac");
    p.omega_s = get_num_or(j, "omega_s", 0.0);
    p.alpha_s = get_num_or(j, "alpha_s", 0.0);
    p.v_as = get_num_or(j, "v_as", 0.0);
    p.v_bs = get_num_or(j, "v_bs", 0.0);
    p.jn_a = get_num_or(j, "jn_a", 0.0);
    p.jn_b = get_num_or(j, "jn_b", 0.0);
    p.jn_s = get_num_or(j, "jn_s", 0.0);
    p.j1_dc = get_num_or(j, "j1_dc", 0.0);
    p.j2_dc = get_num_or(j, "j2_dc", 0.0);
    p.j_ac_approx = get_num_or(j, "j_ac_approx", p.j_ac);
    return p;
}

json derived_params_to_json(const circuit::DerivedParams& p) {
    return json{{"omega_a", p.omega_a},
                {"omega_b", p.omega_b},
                {"omega_s", p.omega_s},
                {"omega_a_simple", p.omega_a_simple},
                {"omega_b_simple", p.omega_b_simple},
                {"alpha_a", p.alpha_a},
                {"alpha_b", p.alpha_b},
                {"alpha_s", p.alpha_s},
                {"v", p.v},
                {"v_as", p.v_as},
                {"v_bs", p.v_bs},
                {"j1_dc", p.j1_dc},
                {"j2_dc", p.j2_dc},
                {"j_ac", p.j_ac},
                {"j_ac_approx", p.j_ac_approx},
                {"jn_a", p.jn_a},
                {"jn_b", p.jn_b},
                {"jn_s", p.jn_s},
                {"ej_a_eff", p.ej_a_eff},
                {"ej_b_eff", p.ej_b_eff},
                {"ej_c_dc", p.ej_c_dc}};
}

circuit::DerivedParams resolve_params(const json& config,
                                      std::optional<std::pair<circuit::CircuitConstants,
                                                              circuit::FluxConfig>>* source) {
    if (!config.contains("params")) throw ConfigError("config: missing 'params' section");
    const json& pj = config["params"];
    if (pj.contains("derived")) {
        if (source) source->reset();
        return parse_derived_params(pj["derived"]);
    }
    if (pj.contains("constants") && pj.contains("flux")) {
        const auto constants = parse_constants(pj["constants"]);
        const auto flux = parse_flux(pj["flux"]);
        if (source) *source = std::make_pair(constants, flux);
        try {
            return circuit::derive_params(constants, flux);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    throw ConfigError("config: params must contain 'derived' or 'constants' + 'flux'");
}

sweep::GridSpec parse_grid(const json& j, double auto_center) {
    sweep::GridSpec g;
    if (j.contains("min") && j.contains("max")) {
        g.min = get_num(j, "min");
        g.max = get_num(j, "max");
    } else if (j.contains("span")) {
        double center = auto_center;
        if (j.contains("center") && j["center"].is_number()) center = j["center"].get<double>();
        const double span = get_num(j, "span");
        g.min = center - 0.5 * span;
        g.max = center + 0.5 * span;
    } else {
        throw ConfigError("config: grid needs min/max or center/span");
    }
    if (!j.contains("count") || !j["count"].is_number_integer()) {
        throw ConfigError("config: grid needs integer count");
    }
    g.count = j["count"].get<int>();
    try {
        g.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return g;
}

sweep::SweepConfig parse_sweep_config(const json& config, ham::Sideband kind, int workers) {
    if (!config.contains("sweep")) throw ConfigError("config: missing 'sweep' section");
    const json& sj = config["sweep"];

    sweep::SweepConfig c;
    c.kind = kind;
    c.params = resolve_params(config, &c.source);
    c.dissipation = config.contains("dissipation") ? parse_dissipation(config["dissipation"])
                                                   : dyn::DissipationSpec{};
    c.probe = sj.contains("probe") ? ops::mode_from_name(sj["probe"].get<std::string>())
                                   : (kind == ham::Sideband::RSB ? ops::Mode::B : ops::Mode::A);
    c.eps_d = get_num(sj, "eps_d");
    if (sj.contains("dims")) {
        for (const auto& d : sj["dims"]) c.dims.push_back(d.get<int>());
    } else {
        c.dims = {6, 6};
    }
    c.include_sloshing = sj.value("include_sloshing", false);
    c.occupation_terms = sj.value("occupation_terms", false);
    c.workers = workers;

    const double sideband = (kind == ham::Sideband::RSB)
                                ? std::abs(c.params.omega_a - c.params.omega_b)
                                : c.params.omega_a + c.params.omega_b + c.params.v;
    const double probe_freq = (c.probe == ops::Mode::A) ? c.params.omega_a : c.params.omega_b;
    if (!sj.contains("omega_m") || !sj.contains("omega_d")) {
        throw ConfigError("config: sweep needs omega_m and omega_d grids");
    }
    c.omega_m = parse_grid(sj["omega_m"], sideband);
    c.omega_d = parse_grid(sj["omega_d"], probe_freq);
    try {
        c.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

sweep::RegimeMapConfig parse_regime_config(const json& config) {
    sweep::RegimeMapConfig c;
    if (config.contains("regime_map")) {
        const json& rj = config["regime_map"];
        if (rj.contains("phi_dc")) c.phi_dc = parse_grid(rj["phi_dc"], 0.0);
        c.transmon_scan = rj.value("transmon_scan", c.transmon_scan);
        c.phi_ac_lo_ratio = get_num_or(rj, "phi_ac_lo_ratio", c.phi_ac_lo_ratio);
        c.phi_ac_hi_ratio = get_num_or(rj, "phi_ac_hi_ratio", c.phi_ac_hi_ratio);
        if (rj.contains("markers")) {
            for (const auto& m : rj["markers"]) {
                sweep::RegimeMarker mk;
                mk.phi_dc = get_num(m, "phi_dc");
                mk.j = get_num_or(m, "j", 0.0);
                mk.v = get_num_or(m, "v", 0.0);
                mk.label = m.value("label", "");
                c.markers.push_back(mk);
            }
        }
    }
    return c;
}

sweep::PhaseMapConfig parse_phase_config(const json& config, int workers) {
    if (!config.contains("phase_map")) throw ConfigError("config: missing 'phase_map' section");
    const json& pj = config["phase_map"];
    sweep::PhaseMapConfig c;
    c.alpha = get_num(pj, "alpha");
    c.v = get_num(pj, "v");
    c.j2 = parse_grid(pj["j2"], 0.0);
    c.delta = parse_grid(pj["delta"], 0.0);
    c.eps_d = get_num_or(pj, "eps_d", 0.0);
    c.dims = pj.value("dims", 10);
    c.workers = workers;
    return c;
}

FitConfig parse_fit_config(const json& config) {
    if (!config.contains("fit")) throw ConfigError("config: missing 'fit' section");
    const json& fj = config["fit"];
    FitConfig c;
    c.input_csv = fj.value("input_csv", "");
    const std::string model = fj.value("model", "repulsion");
    if (model == "repulsion") c.model = spectral::ModelKind::Repulsion;
    else if (model == "attraction") c.model = spectral::ModelKind::Attraction;
    else throw ConfigError("config: fit model must be 'repulsion' or 'attraction'");
    const std::string pol = fj.value("polarity", "peaks");
    if (pol == "peaks") c.polarity = spectral::Polarity::Peaks;
    else if (pol == "dips") c.polarity = spectral::Polarity::Dips;
    else if (pol == "both") c.polarity = spectral::Polarity::Both;
    else throw ConfigError("config: fit polarity must be peaks/dips/both");
    c.min_prominence = get_num_or(fj, "min_prominence", 0.1);
    c.fit_v = fj.value("fit_v", false);
    c.noise_sigma = get_num_or(fj, "noise_sigma", 0.0);
    if (!fj.contains("initial")) throw ConfigError("config: fit needs an 'initial' guess");
    const json& ij = fj["initial"];
    c.initial.kind = c.model;
    c.initial.omega_a = get_num(ij, "omega_a");
    c.initial.omega_b = get_num(ij, "omega_b");
    c.initial.j = get_num(ij, "j");
    c.initial.v = get_num_or(ij, "v", 0.0);
    return c;
}

void write_spectral_csv(const sweep::SpectralMap& map, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "omega_m,omega_d,re_amp,im_amp,amp_norm,nphot,g2,error\n";
    for (std::size_t i = 0; i < map.omega_m.size(); ++i) {
        for (std::size_t j = 0; j < map.omega_d.size(); ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            out << fmt_double(map.omega_m[i]) << ',' << fmt_double(map.omega_d[j]) << ','
                << fmt_double(map.amp(ii, jj).real()) << ',' << fmt_double(map.amp(ii, jj).imag()) << ','
                << fmt_double(map.amp_norm(ii, jj)) << ',' << fmt_double(map.nphot(ii, jj)) << ','
                << fmt_double(map.g2(ii, jj)) << ','
                << csv_escape(map.cell_errors[i * map.omega_d.size() + j]) << '\n';
        }
    }
}

void write_regime_csv(const sweep::RegimeMap& map, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "phi_dc,v_min,v_max,j_min,j_max\n";
    for (std::size_t i = 0; i < map.phi_dc.size(); ++i) {
        out << fmt_double(map.phi_dc[i]) << ',' << fmt_double(map.v_min[i]) << ','
            << fmt_double(map.v_max[i]) << ',' << fmt_double(map.j_min[i]) << ','
            << fmt_double(map.j_max[i]) << '\n';
    }
}

void write_phase_csv(const sweep::PhaseMap& map, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "j2,delta,nphot,g2,error\n";
    for (std::size_t i = 0; i < map.j2.size(); ++i) {
        for (std::size_t j = 0; j < map.delta.size(); ++j) {
            out << fmt_double(map.j2[i]) << ',' << fmt_double(map.delta[j]) << ','
                << fmt_double(map.nphot(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
                << ','
                << fmt_double(map.g2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
                << ',' << csv_escape(map.cell_errors[i * map.delta.size() + j]) << '\n';
        }
    }
}

void write_fit_json(const spectral::FitResult& fit, std::size_t n_points,
                    const std::filesystem::path& path) {
    json j{{"model",
            {{"kind", fit.model.kind == spectral::ModelKind::Repulsion ? "repulsion" : "attraction"},
             {"omega_a", fit.model.omega_a},
             {"omega_b", fit.model.omega_b},
             {"j", fit.model.j},
             {"v", fit.model.v}}},
           {"sigma",
            {{"omega_a", fit.sigma_omega_a},
             {"omega_b", fit.sigma_omega_b},
             {"j", fit.sigma_j},
             {"v", fit.sigma_v}}},
           {"residual_norm", fit.residual_norm},
           {"iterations", fit.iterations},
           {"converged", fit.converged},
           {"n_points", n_points}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_sidecar(const json& resolved_config, const std::string& command,
                   const std::vector<std::string>& outputs, const std::filesystem::path& path) {
    json j{{"schema_version", SCHEMA_VERSION},
           {"command", command},
           {"config", resolved_config},
           {"input_hash", content_hash(resolved_config)},
           {"outputs", outputs}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

sweep::SpectralMap read_spectral_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV " + path.string());

    std::vector<double> wm, wd;
    std::vector<std::array<double, 7>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 7> vals{};
        std::stringstream ss(line);
        std::string field;
        for (int k = 0; k < 7 && std::getline(ss, field, ','); ++k) {
            try {
                vals[static_cast<std::size_t>(k)] = std::stod(field);
            } catch (...) {
                vals[static_cast<std::size_t>(k)] = std::numeric_limits<double>::quiet_NaN();
            }
        }
        if (wm.empty() || vals[0] != wm.back()) wm.push_back(vals[0]);
        if (wm.size() == 1) wd.push_back(vals[1]);
        rows.push_back(vals);
    }
    sweep::SpectralMap map;
    map.omega_m = wm;
    map.omega_d = wd;
    const auto nm = static_cast<Eigen::Index>(wm.size());
    const auto nd = static_cast<Eigen::Index>(wd.size());
    if (rows.size() != static_cast<std::size_t>(nm * nd)) {
        throw std::runtime_error("CSV is not a complete grid: " + path.string());
    }
    map.amp.resize(nm, nd);
    map.amp_norm.resize(nm, nd);
    map.nphot.resize(nm, nd);
    map.g2.resize(nm, nd);
    map.cell_errors.assign(rows.size(), "");
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(r) / nd;
        const auto j = static_cast<Eigen::Index>(r) % nd;
        map.amp(i, j) = {rows[r][2], rows[r][3]};
        map.amp_norm(i, j) = rows[r][4];
        map.nphot(i, j) = rows[r][5];
        map.g2(i, j) = rows[r][6];
    }
    return map;
}

} // namespace kerrsim::io
