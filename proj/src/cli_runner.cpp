#include "kerrsim/cli_runner.hpp"

#include "kerrsim/io_formats.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>

namespace kerrsim::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("KERRSIM_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 0;   // harness falls back to hardware concurrency
}

void emit_error(const std::string& kind, const std::string& message) {
    json j{{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << j.dump() << '\n';
}

int cmd_derive(const json& config, const fs::path& out_dir) {
    std::optional<std::pair<circuit::CircuitConstants, circuit::FluxConfig>> source;
    const auto params = io::resolve_params(config, &source);
    json out = io::derived_params_to_json(params);
    if (source) {
        out["modulation_small_signal_ok"] = !source->second.modulation_warning();
        if (source->second.modulation_warning()) {
            std::cerr << "warning: sin(pi*phi_dc) >> sin(pi*phi_ac) does not hold at this operating point\n";
        }
    }
    std::cout << out.dump(2) << '\n';
    std::ofstream f(out_dir / "derived_params.json");
    f << out.dump(2) << '\n';
    io::write_sidecar(config, "derive", {"derived_params.json"}, out_dir / "derived_params.sidecar.json");
    return 0;
}

int cmd_sweep(const json& config, ham::Sideband kind, int workers, const fs::path& out_dir) {
    const auto cfg = io::parse_sweep_config(config, kind, workers);
    const auto map = sweep::sweep_sideband(cfg);
    const std::string name = (kind == ham::Sideband::RSB) ? "sweep_rsb" : "sweep_bsb";
    io::write_spectral_csv(map, out_dir / (name + ".csv"));
    io::write_sidecar(config, name, {name + ".csv"}, out_dir / (name + ".sidecar.json"));

    int poisoned = 0;
    for (const auto& e : map.cell_errors) {
        if (!e.empty()) ++poisoned;
    }
    std::cout << name << ": " << map.omega_m.size() << "x" << map.omega_d.size() << " grid, "
              << poisoned << " poisoned cells -> " << (out_dir / (name + ".csv")).string() << '\n';
    return 0;
}

int cmd_regime(const json& config, const fs::path& out_dir) {
    circuit::CircuitConstants constants = circuit::CircuitConstants::paper_device();
    if (config.contains("params") && config["params"].contains("constants")) {
        constants = io::parse_constants(config["params"]["constants"]);
    }
    const auto cfg = io::parse_regime_config(config);
    const auto map = sweep::regime_map(constants, cfg);
    io::write_regime_csv(map, out_dir / "regime_map.csv");
    io::write_sidecar(config, "regime-map", {"regime_map.csv"}, out_dir / "regime_map.sidecar.json");
    std::cout << "regime-map: " << map.phi_dc.size() << " flux points -> "
              << (out_dir / "regime_map.csv").string() << '\n';
    return 0;
}

int cmd_phase(const json& config, int workers, const fs::path& out_dir) {
    const auto cfg = io::parse_phase_config(config, workers);
    const auto map = sweep::phase_map(cfg);
    io::write_phase_csv(map, out_dir / "phase_map.csv");
    io::write_sidecar(config, "phase-map", {"phase_map.csv"}, out_dir / "phase_map.sidecar.json");
    std::cout << "phase-map: " << map.j2.size() << "x" << map.delta.size() << " grid -> "
              << (out_dir / "phase_map.csv").string() << '\n';
    return 0;
}

int cmd_fit(const json& config, unsigned long long seed, const fs::path& out_dir) {
    const auto cfg = io::parse_fit_config(config);
    if (cfg.input_csv.empty()) throw io::ConfigError("config: fit.input_csv required");
    const auto map = io::read_spectral_csv(cfg.input_csv);

    auto peaks = spectral::extract_peaks(map.omega_m, map.omega_d, map.norm_columns(), cfg.polarity,
                                         cfg.min_prominence);
    if (cfg.noise_sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
        for (auto& col : peaks.columns) {
            for (auto& p : col) p.center += noise(rng);
        }
    }
    spectral::FitOptions opts;
    opts.fit_v = cfg.fit_v;
    const auto fit = spectral::fit_levels(peaks, cfg.model, cfg.initial, opts);
    io::write_fit_json(fit, peaks.total(), out_dir / "fit_result.json");
    io::write_sidecar(config, "fit", {"fit_result.json"}, out_dir / "fit_result.sidecar.json");
    std::cout << "fit: J = " << fit.model.j << " GHz, V = " << fit.model.v << " GHz, residual "
              << fit.residual_norm << " -> " << (out_dir / "fit_result.json").string() << '\n';
    return 0;
}

// Built-in oracle suite: quick independent checks of the dynamics stack.
int cmd_validate() {
    struct Row {
        std::string name;
        double value, expected, tolerance;
        bool pass;
    };
    std::vector<Row> rows;
    auto check = [&](const std::string& name, double value, double expected, double tol) {
        rows.push_back({name, value, expected, tol, std::abs(value - expected) <= tol});
    };

    // pure decay of <n> at rate 2*pi*kappa
    {
        const auto lay = ops::ModeLayout::single(ops::Mode::A, 4);
        const ops::QOperator h(lay, ops::Matrix::Zero(4, 4));
        dyn::DissipationSpec diss;
        diss.kappa_a = 0.05;
        const auto r = dyn::evolve(h, diss, ops::fock_state(lay, {1}), 10.0);
        const double expected = std::exp(-ham::TWO_PI * 0.05 * 10.0);
        check("pure_decay", r.n_a.back(), expected, 1e-5 * expected);
    }
    // driven linear cavity Lorentzian occupation
    {
        const auto lay = ops::ModeLayout::single(ops::Mode::A, 14);
        const double delta = 0.003, eps = 0.001, kappa = 0.004;
        const auto a = ops::destroy(lay, ops::Mode::A);
        const ops::QOperator h = ham::TWO_PI * (delta * (a.adjoint() * a) + eps * (a.adjoint() + a));
        dyn::DissipationSpec diss;
        diss.kappa_a = kappa;
        const auto ss = dyn::steady_state(h, diss);
        const double n = ops::expect(a.adjoint() * a, ss.state).real();
        const double expected = eps * eps / (delta * delta + 0.25 * kappa * kappa);
        check("driven_cavity_lorentzian", n, expected, 0.01 * expected);
    }
    // steady_state equals long-time evolution for a Kerr + drive cavity
    {
        const auto lay = ops::ModeLayout::single(ops::Mode::A, 10);
        const double kappa = 0.05;
        const auto a = ops::destroy(lay, ops::Mode::A);
        const ops::QOperator h =
            ham::TWO_PI * (-0.1 * (a.adjoint() * a.adjoint() * a * a) + 0.02 * (a.adjoint() + a));
        dyn::DissipationSpec diss;
        diss.kappa_a = kappa;
        const auto ss = dyn::steady_state(h, diss);
        const auto ev = dyn::evolve(h, diss, ops::fock_state(lay, {0}), 20.0 / (ham::TWO_PI * kappa));
        check("steady_vs_evolve", ev.n_a.back(),
              ops::expect(a.adjoint() * a, ss.state).real(), 1e-4);
    }
    // g2 fixed points: coherent 1, thermal 2, Fock 0
    {
        const auto lay = ops::ModeLayout::single(ops::Mode::A, 20);
        const auto coh = ops::QState::from_ket(lay, ops::coherent_vector(20, {0.5, 0.0}));
        check("g2_coherent", dyn::g2_zero(coh, ops::Mode::A), 1.0, 1e-6);
        const auto th = ops::QState::from_density(lay, ops::thermal_matrix(20, 0.2));
        check("g2_thermal", dyn::g2_zero(th, ops::Mode::A), 2.0, 1e-6);
        check("g2_fock1", dyn::g2_zero(ops::fock_state(lay, {1}), ops::Mode::A), 0.0, 1e-12);
    }
    // truncation ladder on a weakly driven linear cavity converges immediately
    {
        const auto builder = [](const std::vector<int>& dims) {
            const auto lay = ops::ModeLayout::single(ops::Mode::A, dims[0]);
            const auto a = ops::destroy(lay, ops::Mode::A);
            const ops::QOperator h = ham::TWO_PI * (0.001 * (a.adjoint() + a));
            dyn::DissipationSpec diss;
            diss.kappa_a = 0.01;
            return ops::expect(a.adjoint() * a, dyn::steady_state(h, diss).state).real();
        };
        const auto res = dyn::converge_truncation(builder, {4}, 0.01, 16);
        check("truncation_ladder_dims", res.dims[0], 4.0, 0.0);
    }
    // rotating frame vs lab-frame oracle at scaled-up rates
    {
        auto constants = circuit::CircuitConstants::paper_device();
        circuit::FluxConfig flux;
        flux.phi_a = 0.11091972334275574;
        flux.phi_b = 0.4749955699148244;
        flux.phi_dc = 0.34858558795070177;
        flux.phi_ac = flux.phi_dc / 17.531236521246974;
        const auto lay = ops::ModeLayout::two_mode(3, 3);
        const auto p_probe = circuit::derive_params(constants, flux);
        flux.omega_m = p_probe.omega_a - p_probe.omega_b;
        const double omega_d = p_probe.omega_b;
        ham::LabFrameModel lab(constants, flux, ops::Mode::B, omega_d, 0.004, lay);
        const auto p = lab.rwa_equivalent_params();
        ham::FrameSpec frame;
        frame.kind = ham::Sideband::RSB;
        frame.omega_m = flux.omega_m;
        frame.omega_d = omega_d;
        frame.eps_d = 0.004;
        frame.probe = ops::Mode::B;
        frame.occupation_terms = false;
        const auto set = ham::build_rotating_frame(p, lay, frame);
        dyn::DissipationSpec diss;
        diss.kappa_a = diss.kappa_b = 0.02;
        const auto ss = dyn::steady_state(set.total(), diss);
        const auto b = ops::destroy(lay, ops::Mode::B);
        const double rot = std::abs(ops::expect(b, ss.state));

        dyn::EvolveOptions opts;
        opts.rtol = 1e-6;
        opts.output_points = 200;
        const double t_run = 3.0 / (ham::TWO_PI * 0.02);
        const auto ev = dyn::evolve_time_dependent([&](double t) { return lab.hamiltonian_at(t); },
                                                   lay, diss, ss.state, t_run, opts);
        double mean = 0.0;
        int cnt = 0;
        for (std::size_t k = ev.times.size() * 3 / 4; k < ev.times.size(); ++k) {
            mean += std::abs(ev.b_expect[k]);
            ++cnt;
        }
        mean /= cnt;
        check("frame_consistency", mean, rot, 0.02 * rot);
    }

    bool all = true;
    for (const auto& r : rows) {
        all = all && r.pass;
        std::printf("%-28s %14.8g  expected %14.8g  tol %10.3g  %s\n", r.name.c_str(), r.value,
                    r.expected, r.tolerance, r.pass ? "PASS" : "FAIL");
    }
    return all ? 0 : 3;
}

} // namespace

int run(const RunConfig& rc) {
    try {
        const fs::path out_dir(rc.out_dir);
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        const int workers = resolve_workers(rc.workers);

        if (rc.command == "validate") return cmd_validate();

        if (rc.config_path.empty()) throw io::ConfigError("config: --config PATH required");
        json config = io::load_config(rc.config_path);
        for (const auto& [k, v] : rc.overrides) io::apply_override(config, k, v);
        io::require_schema_version(config);

        if (rc.command == "derive") return cmd_derive(config, out_dir);
        if (rc.command == "sweep-rsb") return cmd_sweep(config, ham::Sideband::RSB, workers, out_dir);
        if (rc.command == "sweep-bsb") return cmd_sweep(config, ham::Sideband::BSB, workers, out_dir);
        if (rc.command == "regime-map") return cmd_regime(config, out_dir);
        if (rc.command == "phase-map") return cmd_phase(config, workers, out_dir);
        if (rc.command == "fit") return cmd_fit(config, rc.seed, out_dir);
        throw io::ConfigError("unknown command: " + rc.command);
    } catch (const io::ConfigError& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("numerical", e.what());
        return 3;
    }
}

} // namespace kerrsim::cli
