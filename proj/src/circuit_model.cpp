#include "kerrsim/circuit_model.hpp"

#include <cmath>
#include <limits>

namespace kerrsim::circuit {

namespace {
constexpr double PI = 3.14159265358979323846;
}

void CircuitConstants::validate() const {
    if (ejmax_a <= 0 || ejmax_b <= 0 || ejmax_c <= 0) {
        throw std::invalid_argument("CircuitConstants: Josephson energies must be positive");
    }
    auto bad_d = [](double d) { return d < 0.0 || d >= 1.0; };
    if (bad_d(d_a) || bad_d(d_b) || bad_d(d_c)) {
        throw std::invalid_argument("CircuitConstants: asymmetries must lie in [0, 1)");
    }
    if (c <= 0 || c1g <= 0 || c2g <= 0 || cc <= 0) {
        throw std::invalid_argument("CircuitConstants: capacitances must be positive");
    }
}

CircuitConstants CircuitConstants::paper_device() {
    CircuitConstants k;
    k.ejmax_a = 23.01;
    k.ejmax_b = 23.01;
    k.ejmax_c = 7.75;
    k.d_a = 0.50;
    k.d_b = 0.50;
    k.d_c = 0.051;
    k.c = 39.0;
    k.c1g = 61.0;
    k.c2g = 87.0;
    k.cc = 20.0;
    return k;
}

void FluxConfig::validate() const {
    if (phi_ac < 0.0) throw std::invalid_argument("FluxConfig: phi_ac must be >= 0");
}

std::array<double, 3> FluxConfig::effective_static_fluxes() const {
    const std::array<double, 3> in = {phi_a, phi_b, phi_dc};
    std::array<double, 3> out = {0, 0, 0};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) out[i] += crosstalk[static_cast<std::size_t>(3 * i + j)] * in[static_cast<std::size_t>(j)];
    }
    return out;
}

bool FluxConfig::modulation_warning() const {
    const double s_dc = std::abs(std::sin(PI * phi_dc));
    const double s_ac = std::abs(std::sin(PI * phi_ac));
    return s_dc < 10.0 * s_ac;
}

double josephson_energy(double ejmax, double d, double phi) {
    if (ejmax <= 0.0) throw std::invalid_argument("josephson_energy: ejmax must be positive");
    if (d < 0.0 || d >= 1.0) throw std::invalid_argument("josephson_energy: d must lie in [0, 1)");
    const double c = std::cos(PI * phi);
    if (c == 0.0) return ejmax * d;   // half-quantum limit
    const double t = std::tan(PI * phi);
    return ejmax * std::abs(c) * std::sqrt(1.0 + d * d * t * t);
}

ChargingEnergies charging_energies(const CircuitConstants& k) {
    k.validate();
    const double c = k.c, c1g = k.c1g, c2g = k.c2g, cc = k.cc;

    ChargingEnergies ce;
    // determinant of the transformed 4x4 capacitance matrix
    ce.det_c_prime = (c * c1g + c * c2g + c1g * c2g) *
                     (c * c1g + c * c2g + 2.0 * c * cc + c1g * c2g + 2.0 * c1g * cc) / 4.0;
    const double denom = c1g * c2g * (c1g + c2g) + c1g * cc * (c1g + 2.0 * c2g) +
                         c * (c1g + c2g) * (c1g + c2g + 2.0 * cc);
    ce.tilde_c = 4.0 * ce.det_c_prime / denom;
    ce.tilde_c_s = 2.0 * (c1g * (c2g + 2.0 * cc) + c * (c1g + c2g + 2.0 * cc)) /
                   (4.0 * c + c1g + c2g + 2.0 * cc);
    ce.tilde_c_r = 2.0 * (c1g * c2g + c * (c1g + c2g)) / (4.0 * c + c1g + c2g);
    ce.tilde_c_abs = 2.0 * (c1g * (c2g + 2.0 * cc) + c * (c1g + c2g + 2.0 * cc)) /
                     (c2g - c1g + 2.0 * cc);
    // diverges for symmetric gates; 1/tilde_c_abr -> 0 is the meaningful limit
    ce.tilde_c_abr = (c2g == c1g) ? std::numeric_limits<double>::infinity()
                                  : 2.0 * (c1g * c2g + c * (c1g + c2g)) / (c2g - c1g);

    if (ce.tilde_c <= 0.0 || ce.tilde_c_s <= 0.0 || ce.tilde_c_r <= 0.0 || ce.det_c_prime <= 0.0) {
        throw InvalidCircuitError("charging_energies: invalid-circuit, nonpositive effective capacitance");
    }

    const double rigid = ce.tilde_c_r / (ce.tilde_c_abr * ce.tilde_c_abr);
    ce.ec = EC_CONVERSION * (1.0 / ce.tilde_c - rigid);
    ce.ec_c = EC_CONVERSION * (cc * c1g * c1g / (2.0 * ce.det_c_prime) - 2.0 * rigid);
    ce.ec_s = EC_CONVERSION / ce.tilde_c_s;
    if (ce.ec <= 0.0 || ce.ec_s <= 0.0) {
        throw InvalidCircuitError("charging_energies: invalid-circuit, nonpositive charging energy");
    }
    return ce;
}

DerivedParams derive_static(const CircuitConstants& constants, const ChargingEnergies& ce,
                            double ej_a, double ej_b, double ej_c) {
    (void)constants;
    DerivedParams p;
    const double ec = ce.ec, ec_s = ce.ec_s;

    p.ej_c_dc = ej_c;
    p.ej_a_eff = ej_a + ej_c / 4.0;   // modified Josephson energy due to the coupler
    p.ej_b_eff = ej_b + ej_c / 4.0;
    const double ea = p.ej_a_eff, eb = p.ej_b_eff;
    const double gm = std::sqrt(ea * eb);

    p.v = -ej_c * ec / (8.0 * gm);
    p.v_as = -0.5 * std::sqrt(ec * ec_s * ej_c / ea);
    p.v_bs = -0.5 * std::sqrt(ec * ec_s * ej_c / eb);

    p.alpha_a = -ec * (1.0 - ej_c / 16.0 * (1.0 / ea - 1.0 / gm));
    p.alpha_b = -ec * (1.0 - ej_c / 16.0 * (1.0 / eb - 1.0 / gm));
    p.alpha_s = -ec_s;

    p.omega_a = std::sqrt(8.0 * ea * ec) + p.alpha_a + 0.5 * (p.v + p.v_as);
    p.omega_b = std::sqrt(8.0 * eb * ec) + p.alpha_b + 0.5 * (p.v + p.v_bs);
    p.omega_a_simple = std::sqrt(8.0 * ea * ec) - ec;
    p.omega_b_simple = std::sqrt(8.0 * eb * ec) - ec;
    p.omega_s = std::sqrt(8.0 * ej_c * ec_s) + p.alpha_s -
                0.25 * std::sqrt(ej_c * ec * ec_s) * (1.0 / std::sqrt(ea) + 1.0 / std::sqrt(eb));

    const double pref = std::pow(ea * eb * ec * ec / 4.0, 0.25);
    p.j1_dc = pref * (ce.ec_c / ec - ej_c / (2.0 * gm));
    p.j2_dc = -pref * (ce.ec_c / ec + ej_c / (2.0 * gm));
    return p;
}

DerivedParams derive_params(const CircuitConstants& constants, const FluxConfig& flux) {
    constants.validate();
    flux.validate();
    const ChargingEnergies ce = charging_energies(constants);
    const auto phis = flux.effective_static_fluxes();

    const double ej_a = josephson_energy(constants.ejmax_a, constants.d_a, phis[0]);
    const double ej_b = josephson_energy(constants.ejmax_b, constants.d_b, phis[1]);
    const double ej_c = josephson_energy(constants.ejmax_c, constants.d_c, phis[2]);

    DerivedParams p = derive_static(constants, ce, ej_a, ej_b, ej_c);

    const double ea = p.ej_a_eff, eb = p.ej_b_eff;
    const double ec = ce.ec, ec_s = ce.ec_s;
    const double drive = PI * flux.phi_ac * constants.ejmax_c * std::sin(PI * phis[2]);

    p.j_ac_approx = drive / (4.0 * std::sqrt(2.0)) * std::pow(ec * ec / (ea * eb), 0.25);
    p.j_ac = drive / 8.0 *
             (std::pow(4.0 * ec * ec / (ea * eb), 0.25) -
              ec / 12.0 * (std::pow(1.0 / (ea * ea * ea * eb), 0.25) + std::pow(1.0 / (ea * eb * eb * eb), 0.25)) -
              std::pow(ec * ec * ec_s * ec_s / (ej_c * ej_c * ea * eb), 0.25));
    p.jn_a = drive / 24.0 * ec * std::pow(1.0 / (ea * ea * ea * eb), 0.25);
    p.jn_b = drive / 24.0 * ec * std::pow(1.0 / (ea * eb * eb * eb), 0.25);
    p.jn_s = drive / 2.0 * std::pow(ec * ec * ec_s * ec_s / (ej_c * ej_c * ea * eb), 0.25);
    return p;
}

double jtilde(const DerivedParams& p, double n_a, double n_b, double n_s) {
    if (n_a < 0.0 || n_b < 0.0 || n_s < 0.0) {
        throw std::invalid_argument("jtilde: occupations must be >= 0");
    }
    return p.j_ac + p.jn_a * n_a + p.jn_b * n_b + p.jn_s * n_s;
}

} // namespace kerrsim::circuit
