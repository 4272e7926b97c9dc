// spectroscopy_harness.hpp — 2D sideband spectroscopy maps, flux-regime maps,
// and photon-number/g2 phase maps over parallel grid sweeps
#pragma once

#include "kerrsim/circuit_model.hpp"
#include "kerrsim/hamiltonian_builder.hpp"
#include "kerrsim/lindblad_dynamics.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace kerrsim::sweep {

using circuit::CircuitConstants;
using circuit::DerivedParams;
using circuit::FluxConfig;
using ops::Mode;

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 0;

    void validate() const;
    std::vector<double> values() const;
};

struct SweepConfig {
    ham::Sideband kind = ham::Sideband::RSB;
    GridSpec omega_m;            // axis 1, GHz
    GridSpec omega_d;            // axis 2, GHz
    Mode probe = Mode::B;
    double eps_d = 0.0;          // GHz
    std::vector<int> dims;       // per mode (A, B[, S])
    bool include_sloshing = false;
    bool occupation_terms = false;
    dyn::DissipationSpec dissipation;
    DerivedParams params;        // resolved effective parameters
    // set when params came from a circuit description (echoed in metadata)
    std::optional<std::pair<CircuitConstants, FluxConfig>> source;
    int workers = 0;             // 0 = hardware concurrency

    void validate() const;
    ops::ModeLayout layout() const;
};

// Column-major grids: index [i, j] = (omega_m_i, omega_d_j).
struct SpectralMap {
    std::vector<double> omega_m;
    std::vector<double> omega_d;
    Eigen::MatrixXcd amp;        // steady <c> of the probed mode
    Eigen::MatrixXd amp_norm;    // |<c>| normalized per omega_m column
    Eigen::MatrixXd nphot;       // <c^t c>
    Eigen::MatrixXd g2;          // NaN when undefined
    std::vector<std::string> cell_errors;   // row-major i*Nd + j, empty = ok

    const std::string& error_at(int i, int j) const;
    std::vector<std::vector<double>> norm_columns() const;
};

SpectralMap sweep_sideband(const SweepConfig& config);

// --------------------------- regime map (interaction strengths vs flux) -----

struct RegimeMarker {
    double phi_dc = 0.0;
    double j = 0.0;       // GHz
    double v = 0.0;       // GHz
    std::string label;
};

struct RegimeMapConfig {
    GridSpec phi_dc{0.01, 0.50, 61};
    int transmon_scan = 41;       // grid per transmon flux axis in [0, 0.5]
    double phi_ac_lo_ratio = 100.0;   // Phi_AC = Phi_DC / ratio
    double phi_ac_hi_ratio = 10.0;
    std::vector<RegimeMarker> markers;
};

struct RegimeMap {
    std::vector<double> phi_dc;
    std::vector<double> v_min, v_max;   // cross-Kerr band, GHz
    std::vector<double> j_min, j_max;   // modulated-coupling band, GHz
    std::vector<RegimeMarker> markers;
};

RegimeMap regime_map(const CircuitConstants& constants, const RegimeMapConfig& config);

// --------------------------- phase map (kappa units) ------------------------

struct PhaseMapConfig {
    double alpha = 0.0;      // self-Kerr per mode, kappa units (negative for transmons)
    double v = 0.0;          // cross-Kerr, kappa units
    GridSpec j2;             // two-mode squeezing strength grid, kappa units
    GridSpec delta;          // pump detuning from the sum-frequency condition, kappa units
    double eps_d = 0.0;      // optional probe drive on mode a
    int dims = 10;           // per-mode truncation
    int workers = 0;
    double truncation_flag_population = 1e-3;   // top-level population that marks a cell
};

struct PhaseMap {
    std::vector<double> j2;
    std::vector<double> delta;
    Eigen::MatrixXd nphot;   // <a^t a>
    Eigen::MatrixXd g2;      // NaN when undefined (vacuum)
    std::vector<std::string> cell_errors;   // row-major i*Nd + j

    const std::string& error_at(int i, int j) const;
};

PhaseMap phase_map(const PhaseMapConfig& config);

// Run fn(i) for i in [0, n) on `workers` threads (0 = hardware concurrency).
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

} // namespace kerrsim::sweep
