// circuit_model.hpp — device constants and flux biases -> effective Hamiltonian parameters
//
// All energies and frequencies are plain (non-angular) E/h in GHz; capacitances
// in fF; fluxes in units of Phi_0. Conversion to angular frequency happens once,
// in the Hamiltonian builders.
#pragma once

#include <array>
#include <stdexcept>

namespace kerrsim::circuit {

struct InvalidCircuitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fabricated device parameters. C is the series junction/shunt capacitance of
// each transmon, C1g/C2g the gate capacitances, Cc the coupling capacitor.
struct CircuitConstants {
    double ejmax_a = 0.0;   // GHz
    double ejmax_b = 0.0;
    double ejmax_c = 0.0;
    double d_a = 0.0;       // junction asymmetries in [0, 1)
    double d_b = 0.0;
    double d_c = 0.0;
    double c = 0.0;         // fF
    double c1g = 0.0;
    double c2g = 0.0;
    double cc = 0.0;

    void validate() const;

    // SI values: EJ 23.01/23.01/7.75 GHz, d 0.50/0.50/0.051, C 39/61/87/20 fF.
    static CircuitConstants paper_device();
};

// Operating point: static fluxes plus coupler modulation.
struct FluxConfig {
    double phi_a = 0.0;     // Phi_0 units
    double phi_b = 0.0;
    double phi_dc = 0.0;
    double phi_ac = 0.0;    // modulation amplitude, Phi_0 units
    double omega_m = 0.0;   // modulation frequency, GHz

    // Linear map applied to (phi_a, phi_b, phi_dc) when provided; identity by default.
    std::array<double, 9> crosstalk = {1, 0, 0, 0, 1, 0, 0, 0, 1};

    void validate() const;
    std::array<double, 3> effective_static_fluxes() const;
    // True when sin(pi*phi_dc) >> sin(pi*phi_ac) fails (small-modulation validity).
    bool modulation_warning() const;
};

struct ChargingEnergies {
    double ec = 0.0;        // shared transmon charging energy, GHz
    double ec_c = 0.0;      // capacitive coupling energy, GHz
    double ec_s = 0.0;      // sloshing-mode charging energy, GHz
    // intermediates, fF (det_c_prime in fF^4)
    double tilde_c = 0.0;
    double tilde_c_s = 0.0;
    double tilde_c_r = 0.0;
    double tilde_c_abs = 0.0;
    double tilde_c_abr = 0.0;
    double det_c_prime = 0.0;
};

// Every symbol of the effective Hamiltonian at one operating point.
struct DerivedParams {
    double omega_a = 0.0, omega_b = 0.0, omega_s = 0.0;    // GHz
    double omega_a_simple = 0.0, omega_b_simple = 0.0;     // sqrt(8 EJ EC) - EC diagnostic
    double alpha_a = 0.0, alpha_b = 0.0, alpha_s = 0.0;    // GHz, negative
    double v = 0.0;                                        // cross-Kerr, GHz
    double v_as = 0.0, v_bs = 0.0;                         // transmon-sloshing cross-Kerr
    double j1_dc = 0.0, j2_dc = 0.0;                       // static hopping / squeezing
    double j_ac = 0.0;                                     // full modulated coupling
    double j_ac_approx = 0.0;                              // leading-order approximation
    double jn_a = 0.0, jn_b = 0.0, jn_s = 0.0;             // occupation-dependent corrections
    double ej_a_eff = 0.0, ej_b_eff = 0.0, ej_c_dc = 0.0;  // flux-dressed (incl. +EJ_C/4 shift)
    double kappa_a = 0.0, kappa_b = 0.0;                   // carried through for convenience
};

// e^2/(2h) in GHz*fF: E_C[GHz] = EC_CONVERSION / C[fF] for a single capacitance.
inline constexpr double EC_CONVERSION = 19.3702294935;

// Flux-tunable Josephson energy of a split junction:
// EJmax*|cos(pi*phi)|*sqrt(1 + d^2 tan^2(pi*phi)); at phi = 0.5 exactly, EJmax*d.
double josephson_energy(double ejmax, double d, double phi);

// Closed-form charging energies from the circuit capacitance network.
// The Q_A Q_B coefficient uses the true determinant of the transformed
// capacitance matrix; degenerate networks throw InvalidCircuitError.
ChargingEnergies charging_energies(const CircuitConstants& constants);

// Static effective parameters for given dressed Josephson energies (coupler
// value supplied explicitly so modulation oracles can reuse the closed forms).
DerivedParams derive_static(const CircuitConstants& constants, const ChargingEnergies& ce,
                            double ej_a, double ej_b, double ej_c);

// Full parameter set at an operating point, modulated couplings included.
DerivedParams derive_params(const CircuitConstants& constants, const FluxConfig& flux);

// Occupation-corrected total coupling strength J~ = J_AC + sum_i Jn_i n_i.
double jtilde(const DerivedParams& p, double n_a, double n_b, double n_s);

} // namespace kerrsim::circuit
