#include "kerrsim/spectroscopy_harness.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace kerrsim::sweep {

namespace {
constexpr double NAN_D = std::numeric_limits<double>::quiet_NaN();
}

void GridSpec::validate() const {
    if (count < 2) throw std::invalid_argument("GridSpec: count must be >= 2");
    if (!(max > min)) throw std::invalid_argument("GridSpec: grid must be strictly increasing");
}

std::vector<double> GridSpec::values() const {
    validate();
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        v[static_cast<std::size_t>(i)] = min + (max - min) * i / (count - 1);
    }
    return v;
}

void SweepConfig::validate() const {
    omega_m.validate();
    omega_d.validate();
    if (eps_d < 0.0) throw std::invalid_argument("SweepConfig: eps_d must be >= 0");
    const std::size_t need = include_sloshing ? 3 : 2;
    if (dims.size() != need) {
        throw std::invalid_argument("SweepConfig: dims must list one truncation per mode");
    }
    if (kind == ham::Sideband::None) {
        throw std::invalid_argument("SweepConfig: sideband kind required");
    }
}

ops::ModeLayout SweepConfig::layout() const {
    if (include_sloshing) return ops::ModeLayout::three_mode(dims[0], dims[1], dims[2]);
    return ops::ModeLayout::two_mode(dims[0], dims[1]);
}

const std::string& SpectralMap::error_at(int i, int j) const {
    return cell_errors[static_cast<std::size_t>(i) * omega_d.size() + static_cast<std::size_t>(j)];
}

std::vector<std::vector<double>> SpectralMap::norm_columns() const {
    std::vector<std::vector<double>> cols(omega_m.size());
    for (std::size_t i = 0; i < omega_m.size(); ++i) {
        cols[i].resize(omega_d.size());
        for (std::size_t j = 0; j < omega_d.size(); ++j) {
            cols[i][j] = amp_norm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return cols;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    int nw = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    nw = std::max(1, std::min(nw, n));
    if (nw == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

SpectralMap sweep_sideband(const SweepConfig& config) {
    config.validate();
    const ops::ModeLayout layout = config.layout();
    const auto wm = config.omega_m.values();
    const auto wd = config.omega_d.values();
    const int nm = static_cast<int>(wm.size());
    const int nd = static_cast<int>(wd.size());

    SpectralMap map;
    map.omega_m = wm;
    map.omega_d = wd;
    map.amp.setZero(nm, nd);
    map.amp_norm.setZero(nm, nd);
    map.nphot.setConstant(nm, nd, NAN_D);
    map.g2.setConstant(nm, nd, NAN_D);
    map.cell_errors.assign(static_cast<std::size_t>(nm) * static_cast<std::size_t>(nd), "");

    parallel_for(nm * nd, config.workers, [&](int cell) {
        const int i = cell / nd;
        const int j = cell % nd;
        try {
            ham::FrameSpec frame;
            frame.kind = config.kind;
            frame.omega_m = wm[static_cast<std::size_t>(i)];
            frame.omega_d = wd[static_cast<std::size_t>(j)];
            frame.eps_d = config.eps_d;
            frame.probe = config.probe;
            frame.occupation_terms = config.occupation_terms;
            const ham::HamiltonianSet set = ham::build_rotating_frame(config.params, layout, frame);
            const auto ss = dyn::steady_state(set.total(), config.dissipation);

            const ops::QOperator c = ops::destroy(layout, config.probe);
            map.amp(i, j) = ops::expect(c, ss.state);
            map.nphot(i, j) = ops::expect(c.adjoint() * c, ss.state).real();
            try {
                map.g2(i, j) = dyn::g2_zero(ss.state, config.probe);
            } catch (const dyn::UndefinedG2Error&) {
                // vacuum cell: g2 stays NaN, not an error
            }
        } catch (const std::exception& e) {
            map.cell_errors[static_cast<std::size_t>(cell)] = e.what();
            map.amp(i, j) = ops::Complex(NAN_D, NAN_D);
        }
    });

    // per-column normalization by the column maximum over valid cells
    for (int i = 0; i < nm; ++i) {
        double cmax = 0.0;
        for (int j = 0; j < nd; ++j) {
            const double v = std::abs(map.amp(i, j));
            if (std::isfinite(v)) cmax = std::max(cmax, v);
        }
        for (int j = 0; j < nd; ++j) {
            const double v = std::abs(map.amp(i, j));
            map.amp_norm(i, j) = (cmax > 0.0 && std::isfinite(v)) ? v / cmax : NAN_D;
        }
    }
    return map;
}

RegimeMap regime_map(const CircuitConstants& constants, const RegimeMapConfig& config) {
    constants.validate();
    if (config.phi_dc.count < 16) {
        throw std::invalid_argument("regime_map: resolution must be >= 16");
    }
    const auto phis = config.phi_dc.values();
    const int nt = std::max(2, config.transmon_scan);

    RegimeMap out;
    out.phi_dc = phis;
    out.markers = config.markers;
    out.v_min.assign(phis.size(), 0.0);
    out.v_max.assign(phis.size(), 0.0);
    out.j_min.assign(phis.size(), 0.0);
    out.j_max.assign(phis.size(), 0.0);

    for (std::size_t k = 0; k < phis.size(); ++k) {
        const double phi_dc = phis[k];
        double v_lo = std::numeric_limits<double>::infinity(), v_hi = -v_lo;
        double j_lo = v_lo, j_hi = -v_lo;
        for (int ia = 0; ia < nt; ++ia) {
            for (int ib = 0; ib < nt; ++ib) {
                FluxConfig f;
                f.phi_a = 0.5 * ia / (nt - 1);
                f.phi_b = 0.5 * ib / (nt - 1);
                f.phi_dc = phi_dc;
                f.phi_ac = phi_dc / config.phi_ac_lo_ratio;
                const DerivedParams lo = circuit::derive_params(constants, f);
                v_lo = std::min(v_lo, lo.v);
                v_hi = std::max(v_hi, lo.v);
                // J_AC is exactly linear in phi_ac, so the band ends are the
                // ratio endpoints
                j_lo = std::min(j_lo, lo.j_ac);
                j_hi = std::max(j_hi, lo.j_ac * config.phi_ac_lo_ratio / config.phi_ac_hi_ratio);
            }
        }
        out.v_min[k] = v_lo;
        out.v_max[k] = v_hi;
        out.j_min[k] = j_lo;
        out.j_max[k] = j_hi;
    }
    return out;
}

const std::string& PhaseMap::error_at(int i, int j) const {
    return cell_errors[static_cast<std::size_t>(i) * delta.size() + static_cast<std::size_t>(j)];
}

PhaseMap phase_map(const PhaseMapConfig& config) {
    if (config.dims < 3) throw std::invalid_argument("phase_map: dims must be >= 3");
    const auto j2v = config.j2.values();
    const auto dv = config.delta.values();
    const int nj = static_cast<int>(j2v.size());
    const int nd = static_cast<int>(dv.size());
    const ops::ModeLayout layout = ops::ModeLayout::two_mode(config.dims, config.dims);

    // kappa = 1 sets the unit; the steady state only depends on H/kappa
    dyn::DissipationSpec diss;
    diss.kappa_a = 1.0;
    diss.kappa_b = 1.0;

    const ops::QOperator a = ops::destroy(layout, Mode::A);
    const ops::QOperator b = ops::destroy(layout, Mode::B);
    const ops::QOperator na = a.adjoint() * a;
    const ops::QOperator nb = b.adjoint() * b;
    const ops::QOperator kerr = a.adjoint() * a.adjoint() * a * a + b.adjoint() * b.adjoint() * b * b;
    const ops::QOperator cross = na * nb;
    const ops::QOperator tms = a.adjoint() * b.adjoint() + a * b;
    const ops::QOperator drive = a.adjoint() + a;
    const ops::QOperator num_sum = na + nb;

    PhaseMap map;
    map.j2 = j2v;
    map.delta = dv;
    map.nphot.setConstant(nj, nd, NAN_D);
    map.g2.setConstant(nj, nd, NAN_D);
    map.cell_errors.assign(static_cast<std::size_t>(nj) * static_cast<std::size_t>(nd), "");

    parallel_for(nj * nd, config.workers, [&](int cell) {
        const int i = cell / nd;
        const int j = cell % nd;
        try {
            const double j2 = j2v[static_cast<std::size_t>(i)];
            const double delta = dv[static_cast<std::size_t>(j)];
            const ops::QOperator h = ham::TWO_PI * (-0.5 * delta * num_sum + 0.5 * config.alpha * kerr +
                                                    config.v * cross + j2 * tms + config.eps_d * drive);
            const auto ss = dyn::steady_state(h, diss);
            map.nphot(i, j) = ops::expect(na, ss.state).real();
            try {
                map.g2(i, j) = dyn::g2_zero(ss.state, Mode::A);
            } catch (const dyn::UndefinedG2Error&) {
                map.cell_errors[static_cast<std::size_t>(cell)] = "vacuum";
            }
            // population stranded at the truncation edge marks an unconverged cell
            double top = 0.0;
            const ops::Matrix rho = ss.state.density();
            const int dim = config.dims;
            for (int x = 0; x < dim; ++x) {
                top += rho((dim - 1) * dim + x, (dim - 1) * dim + x).real();
                top += rho(x * dim + (dim - 1), x * dim + (dim - 1)).real();
            }
            if (top > config.truncation_flag_population) {
                map.cell_errors[static_cast<std::size_t>(cell)] = "truncation";
            }
        } catch (const std::exception& e) {
            map.cell_errors[static_cast<std::size_t>(cell)] = e.what();
        }
    });
    return map;
}

} // namespace kerrsim::sweep
