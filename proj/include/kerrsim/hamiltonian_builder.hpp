// hamiltonian_builder.hpp — static, sideband, drive, and rotating-frame Hamiltonians
//
// Inputs are plain GHz; every returned operator is angular (multiplied by 2*pi),
// with time measured in ns.
#pragma once

#include "kerrsim/circuit_model.hpp"
#include "kerrsim/operator_algebra.hpp"

#include <functional>
#include <stdexcept>

namespace kerrsim::ham {

using ops::Mode;
using ops::ModeLayout;
using ops::QOperator;
using circuit::CircuitConstants;
using circuit::DerivedParams;
using circuit::FluxConfig;

inline constexpr double TWO_PI = 6.28318530717958647692;

struct InvalidFrameError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Sideband { None, RSB, BSB };

const char* sideband_name(Sideband s);

// Co-rotating frame specification for a sideband drive experiment.
struct FrameSpec {
    Sideband kind = Sideband::None;
    double omega_m = 0.0;   // modulation frequency, GHz
    double omega_d = 0.0;   // probe drive frequency, GHz
    double eps_d = 0.0;     // drive amplitude, GHz
    Mode probe = Mode::B;
    bool occupation_terms = true;
};

struct HamiltonianSet {
    QOperator h_static;
    QOperator h_int;
    QOperator h_drive;
    double detuning_a = 0.0;   // GHz, frame detunings entering h_static
    double detuning_b = 0.0;

    QOperator total() const { return h_static + h_int + h_drive; }
};

// H_DC: mode frequencies, self-Kerr, cross-Kerr (plus sloshing terms when the
// layout carries mode S). Diagonal in the Fock basis.
QOperator build_h_dc(const DerivedParams& p, const ModeLayout& layout);

// Sideband interaction: (J_AC + Jn_A a^t a + ...) x (a^t b + a b^t) for RSB,
// (a^t b^t + a b) for BSB. The non-commuting prefactor is symmetrized as
// (1/2){prefactor, coupling}.
QOperator build_sideband(const DerivedParams& p, const ModeLayout& layout, Sideband kind,
                         bool occupation_terms);

// Probe drive 2*pi*eps_d (c^t + c) on the given mode.
QOperator build_drive(double eps_d, Mode m, const ModeLayout& layout);

// Time-independent Hamiltonian in the co-rotating frame.
// RSB probing B: frame (omega_d + omega_m, omega_d); BSB probing A:
// frame (omega_d, omega_m - omega_d). Kerr terms are frame-invariant.
HamiltonianSet build_rotating_frame(const DerivedParams& p, const ModeLayout& layout,
                                    const FrameSpec& frame);

// --------------------------- lab-frame oracle -------------------------------

// Two-mode lab-frame model with the coupler Josephson energy explicitly
// modulated in time; used to validate the rotating-frame construction.
// All derived parameters are recomputed from E_J^C(t) at every evaluation.
class LabFrameModel {
public:
    LabFrameModel(const CircuitConstants& constants, const FluxConfig& flux,
                  Mode probe, double omega_d, double eps_d, const ModeLayout& layout);

    // E_J^C(t) from the modulated total flux (static asymmetry factor).
    double ej_c_at(double t_ns) const;
    // Full angular H(t): Kerr oscillators + modulated J1/J2 + lab-frame drive.
    ops::Matrix hamiltonian_at(double t_ns) const;

    const ModeLayout& layout() const { return layout_; }

    // Effective parameters of the matching rotating-frame model: Fourier
    // harmonics of the modulated parameter set over one modulation period
    // (static values = zeroth harmonic, J equivalent = half the first cosine
    // harmonic of J1).
    DerivedParams rwa_equivalent_params(int quadrature_points = 256) const;

private:
    CircuitConstants constants_;
    FluxConfig flux_;
    circuit::ChargingEnergies ce_;
    Mode probe_;
    double omega_d_;
    double eps_d_;
    ModeLayout layout_;
    double ej_a_bare_ = 0.0, ej_b_bare_ = 0.0;
    // cached mode operators
    ops::Matrix num_a_, num_b_, kerr_a_, kerr_b_, cross_, hop_, tms_, drive_op_lower_;
};

} // namespace kerrsim::ham
