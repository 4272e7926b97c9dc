#include "kerrsim/hamiltonian_builder.hpp"

#include <cmath>

namespace kerrsim::ham {

using ops::Matrix;

const char* sideband_name(Sideband s) {
    switch (s) {
        case Sideband::None: return "none";
        case Sideband::RSB: return "rsb";
        case Sideband::BSB: return "bsb";
    }
    return "?";
}

QOperator build_h_dc(const DerivedParams& p, const ModeLayout& layout) {
    if (!layout.has(Mode::A) || !layout.has(Mode::B)) {
        throw std::invalid_argument("build_h_dc: layout must contain modes A and B");
    }
    const QOperator a = ops::destroy(layout, Mode::A);
    const QOperator b = ops::destroy(layout, Mode::B);
    const QOperator na = a.adjoint() * a;
    const QOperator nb = b.adjoint() * b;

    QOperator h = p.omega_a * na + p.omega_b * nb +
                  0.5 * p.alpha_a * (a.adjoint() * a.adjoint() * a * a) +
                  0.5 * p.alpha_b * (b.adjoint() * b.adjoint() * b * b) +
                  p.v * (na * nb);
    if (layout.has(Mode::S)) {
        const QOperator s = ops::destroy(layout, Mode::S);
        const QOperator ns = s.adjoint() * s;
        h = h + p.omega_s * ns + 0.5 * p.alpha_s * (s.adjoint() * s.adjoint() * s * s) +
            p.v_as * (na * ns) + p.v_bs * (nb * ns);
    }
    return TWO_PI * h;
}

QOperator build_sideband(const DerivedParams& p, const ModeLayout& layout, Sideband kind,
                         bool occupation_terms) {
    if (kind == Sideband::None) {
        return {layout, Matrix::Zero(layout.dim(), layout.dim())};
    }
    const QOperator a = ops::destroy(layout, Mode::A);
    const QOperator b = ops::destroy(layout, Mode::B);
    const QOperator coupling = (kind == Sideband::RSB) ? (a.adjoint() * b + a * b.adjoint())
                                                       : (a.adjoint() * b.adjoint() + a * b);
    if (!occupation_terms) {
        return TWO_PI * p.j_ac * coupling;
    }
    QOperator prefactor = p.j_ac * ops::identity(layout) +
                          p.jn_a * (a.adjoint() * a) + p.jn_b * (b.adjoint() * b);
    if (layout.has(Mode::S)) {
        const QOperator s = ops::destroy(layout, Mode::S);
        prefactor = prefactor + p.jn_s * (s.adjoint() * s);
    }
    // prefactor and coupling do not commute; symmetrize to stay Hermitian
    return TWO_PI * 0.5 * anticommutator(prefactor, coupling);
}

QOperator build_drive(double eps_d, Mode m, const ModeLayout& layout) {
    if (eps_d < 0.0) throw std::invalid_argument("build_drive: eps_d must be >= 0");
    const QOperator c = ops::destroy(layout, m);
    return TWO_PI * eps_d * (c.adjoint() + c);
}

HamiltonianSet build_rotating_frame(const DerivedParams& p, const ModeLayout& layout,
                                    const FrameSpec& frame) {
    if (frame.kind == Sideband::None) {
        throw InvalidFrameError("build_rotating_frame: invalid-frame, sideband kind required");
    }
    const double diff = std::abs(p.omega_a - p.omega_b);
    const double sum = p.omega_a + p.omega_b + p.v;
    const double to_diff = std::abs(frame.omega_m - diff);
    const double to_sum = std::abs(frame.omega_m - sum);
    if (frame.kind == Sideband::RSB && to_diff > to_sum) {
        throw InvalidFrameError("build_rotating_frame: invalid-frame, omega_m is not near |omega_A - omega_B|");
    }
    if (frame.kind == Sideband::BSB && to_sum > to_diff) {
        throw InvalidFrameError("build_rotating_frame: invalid-frame, omega_m is not near omega_A + omega_B + V");
    }

    // frame frequencies per mode
    double nu_a = 0.0, nu_b = 0.0;
    if (frame.kind == Sideband::RSB) {
        // hopping a^t b rotates at nu_a - nu_b = omega_m
        if (frame.probe == Mode::B) {
            nu_b = frame.omega_d;
            nu_a = frame.omega_d + frame.omega_m;
        } else {
            nu_a = frame.omega_d;
            nu_b = frame.omega_d - frame.omega_m;
        }
    } else {
        // squeezing a^t b^t rotates at nu_a + nu_b = omega_m
        if (frame.probe == Mode::A) {
            nu_a = frame.omega_d;
            nu_b = frame.omega_m - frame.omega_d;
        } else {
            nu_b = frame.omega_d;
            nu_a = frame.omega_m - frame.omega_d;
        }
    }

    DerivedParams shifted = p;
    shifted.omega_a = p.omega_a - nu_a;
    shifted.omega_b = p.omega_b - nu_b;

    HamiltonianSet set;
    set.detuning_a = shifted.omega_a;
    set.detuning_b = shifted.omega_b;
    set.h_static = build_h_dc(shifted, layout);
    set.h_int = build_sideband(p, layout, frame.kind, frame.occupation_terms);
    set.h_drive = build_drive(frame.eps_d, frame.probe, layout);
    return set;
}

// --------------------------- lab-frame oracle -------------------------------

LabFrameModel::LabFrameModel(const CircuitConstants& constants, const FluxConfig& flux,
                             Mode probe, double omega_d, double eps_d, const ModeLayout& layout)
    : constants_(constants), flux_(flux), ce_(circuit::charging_energies(constants)),
      probe_(probe), omega_d_(omega_d), eps_d_(eps_d), layout_(layout) {
    if (layout_.has(Mode::S)) {
        throw std::invalid_argument("LabFrameModel: two-mode oracle, layout must not contain S");
    }
    const auto phis = flux_.effective_static_fluxes();
    ej_a_bare_ = circuit::josephson_energy(constants_.ejmax_a, constants_.d_a, phis[0]);
    ej_b_bare_ = circuit::josephson_energy(constants_.ejmax_b, constants_.d_b, phis[1]);

    const QOperator a = ops::destroy(layout_, Mode::A);
    const QOperator b = ops::destroy(layout_, Mode::B);
    num_a_ = (a.adjoint() * a).mat;
    num_b_ = (b.adjoint() * b).mat;
    kerr_a_ = (a.adjoint() * a.adjoint() * a * a).mat;
    kerr_b_ = (b.adjoint() * b.adjoint() * b * b).mat;
    cross_ = num_a_ * num_b_;
    hop_ = (a.adjoint() * b + a * b.adjoint()).mat;
    tms_ = (a.adjoint() * b.adjoint() + a * b).mat;
    drive_op_lower_ = (probe_ == Mode::A) ? a.mat : b.mat;
}

double LabFrameModel::ej_c_at(double t_ns) const {
    constexpr double PI = 3.14159265358979323846;
    const auto phis = flux_.effective_static_fluxes();
    const double phi_dc = phis[2];
    const double c = std::cos(PI * phi_dc);
    const double t = std::tan(PI * phi_dc);
    const double osc = c - PI * flux_.phi_ac * std::sin(PI * phi_dc) * std::cos(TWO_PI * flux_.omega_m * t_ns);
    return constants_.ejmax_c * std::abs(osc) * std::sqrt(1.0 + constants_.d_c * constants_.d_c * t * t);
}

ops::Matrix LabFrameModel::hamiltonian_at(double t_ns) const {
    const DerivedParams pt = circuit::derive_static(constants_, ce_, ej_a_bare_, ej_b_bare_, ej_c_at(t_ns));
    const DerivedParams p0 = circuit::derive_static(constants_, ce_, ej_a_bare_, ej_b_bare_,
                                                    ej_c_at(0.25 / flux_.omega_m));
    // Static J1/J2 offsets are dropped: only the modulation-activated parts are
    // part of the model the rotating frame represents. The quarter-period point
    // gives the unmodulated coupler energy (cos(omega_m t) = 0 there).
    const double j_hop = pt.j1_dc - p0.j1_dc;
    const double j_tms = pt.j2_dc - p0.j2_dc;

    Matrix h = pt.omega_a * num_a_ + pt.omega_b * num_b_ +
               0.5 * pt.alpha_a * kerr_a_ + 0.5 * pt.alpha_b * kerr_b_ +
               pt.v * cross_ + j_hop * hop_ + j_tms * tms_;
    const ops::Complex phase = std::exp(ops::Complex(0.0, -TWO_PI * omega_d_ * t_ns));
    h += eps_d_ * (phase * drive_op_lower_.adjoint() + std::conj(phase) * drive_op_lower_);
    return TWO_PI * h;
}

DerivedParams LabFrameModel::rwa_equivalent_params(int quadrature_points) const {
    const double period = 1.0 / flux_.omega_m;
    const int n = quadrature_points;
    DerivedParams mean{};
    double j_first = 0.0;
    const DerivedParams p0 = circuit::derive_static(constants_, ce_, ej_a_bare_, ej_b_bare_,
                                                    ej_c_at(0.25 * period));
    for (int k = 0; k < n; ++k) {
        const double t = period * k / n;
        const DerivedParams pt = circuit::derive_static(constants_, ce_, ej_a_bare_, ej_b_bare_, ej_c_at(t));
        mean.omega_a += pt.omega_a;
        mean.omega_b += pt.omega_b;
        mean.alpha_a += pt.alpha_a;
        mean.alpha_b += pt.alpha_b;
        mean.v += pt.v;
        j_first += (pt.j1_dc - p0.j1_dc) * std::cos(TWO_PI * k / n);
    }
    DerivedParams out = circuit::derive_params(constants_, flux_);
    out.omega_a = mean.omega_a / n;
    out.omega_b = mean.omega_b / n;
    out.alpha_a = mean.alpha_a / n;
    out.alpha_b = mean.alpha_b / n;
    out.v = mean.v / n;
    // J equivalent = half the first cosine harmonic of the modulated hopping
    out.j_ac = (2.0 * j_first / n) / 2.0;
    out.jn_a = out.jn_b = out.jn_s = 0.0;
    return out;
}

} // namespace kerrsim::ham
