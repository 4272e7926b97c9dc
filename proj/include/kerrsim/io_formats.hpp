// io_formats.hpp — JSON config schema (version 1), CSV grid emission, sidecars
#pragma once

#include "kerrsim/spectral_analysis.hpp"
#include "kerrsim/spectroscopy_harness.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

// vendored single-header nlohmann/json
#include "json.hpp"

namespace kerrsim::io {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int SCHEMA_VERSION = 1;

json load_config(const std::filesystem::path& path);
void apply_override(json& config, const std::string& dotted_key, const std::string& value);
void require_schema_version(const json& config);

// 64-bit FNV-1a over the canonical (sorted-key) dump.
std::string content_hash(const json& config);

// --------------------------- config -> structs ------------------------------

circuit::CircuitConstants parse_constants(const json& j);
circuit::FluxConfig parse_flux(const json& j);
dyn::DissipationSpec parse_dissipation(const json& j);
circuit::DerivedParams parse_derived_params(const json& j);
json derived_params_to_json(const circuit::DerivedParams& p);

// Resolves "params": either {"derived": {...}} or {"constants": {...}, "flux": {...}}.
// Returns the effective parameters; fills `source` when circuit-derived.
circuit::DerivedParams resolve_params(const json& config,
                                      std::optional<std::pair<circuit::CircuitConstants,
                                                              circuit::FluxConfig>>* source);

// Grid entries accept {min,max,count} or {center,span,count}; center may be
// the string "auto" (sideband frequency on axis 1, probed mode frequency on
// axis 2).
sweep::GridSpec parse_grid(const json& j, double auto_center);

sweep::SweepConfig parse_sweep_config(const json& config, ham::Sideband kind, int workers);
sweep::RegimeMapConfig parse_regime_config(const json& config);
sweep::PhaseMapConfig parse_phase_config(const json& config, int workers);

struct FitConfig {
    std::string input_csv;
    spectral::ModelKind model = spectral::ModelKind::Repulsion;
    spectral::Polarity polarity = spectral::Polarity::Peaks;
    double min_prominence = 0.1;
    spectral::LevelModel initial;
    bool fit_v = false;
    double noise_sigma = 0.0;    // Gaussian noise on peak centers, GHz
};
FitConfig parse_fit_config(const json& config);

// --------------------------- emission ---------------------------------------

void write_spectral_csv(const sweep::SpectralMap& map, const std::filesystem::path& path);
void write_regime_csv(const sweep::RegimeMap& map, const std::filesystem::path& path);
void write_phase_csv(const sweep::PhaseMap& map, const std::filesystem::path& path);
void write_fit_json(const spectral::FitResult& fit, std::size_t n_points,
                    const std::filesystem::path& path);

// Sidecar with the full resolved config and a content hash of the inputs.
void write_sidecar(const json& resolved_config, const std::string& command,
                   const std::vector<std::string>& outputs, const std::filesystem::path& path);

// Reads a spectral CSV back (schema produced by write_spectral_csv).
sweep::SpectralMap read_spectral_csv(const std::filesystem::path& path);

} // namespace kerrsim::io
