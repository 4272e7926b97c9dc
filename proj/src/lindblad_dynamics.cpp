#include "kerrsim/lindblad_dynamics.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace kerrsim::dyn {

namespace {
constexpr double TWO_PI = ham::TWO_PI;
}

double DissipationSpec::kappa_for(Mode m) const {
    switch (m) {
        case Mode::A: return kappa_a;
        case Mode::B: return kappa_b;
        case Mode::S: return kappa_s;
    }
    return 0.0;
}

double DissipationSpec::nbar_for(Mode m) const {
    switch (m) {
        case Mode::A: return nbar_a;
        case Mode::B: return nbar_b;
        case Mode::S: return nbar_s;
    }
    return 0.0;
}

void DissipationSpec::validate() const {
    if (kappa_a < 0 || kappa_b < 0 || kappa_s < 0 || nbar_a < 0 || nbar_b < 0 || nbar_s < 0) {
        throw std::invalid_argument("DissipationSpec: kappa and nbar must be >= 0");
    }
}

std::vector<CollapseOp> collapse_operators(const ModeLayout& layout, const DissipationSpec& diss) {
    diss.validate();
    std::vector<CollapseOp> out;
    for (Mode m : layout.modes) {
        const double kappa = diss.kappa_for(m);
        if (kappa <= 0.0) continue;
        const double nbar = diss.nbar_for(m);
        const QOperator c = ops::destroy(layout, m);
        out.push_back({c.mat, TWO_PI * kappa * (1.0 + nbar)});
        if (nbar > 0.0) out.push_back({c.mat.adjoint(), TWO_PI * kappa * nbar});
    }
    return out;
}

namespace {

struct Rhs {
    const std::function<Matrix(double)>* h_of_t = nullptr;   // either this...
    const Matrix* h_static = nullptr;                        // ...or this
    std::vector<CollapseOp> cops;
    std::vector<Matrix> cdag;      // c^t
    std::vector<Matrix> cdag_c;    // c^t c

    void prepare() {
        cdag.reserve(cops.size());
        cdag_c.reserve(cops.size());
        for (const auto& c : cops) {
            cdag.push_back(c.op.adjoint());
            cdag_c.push_back(cdag.back() * c.op);
        }
    }

    Matrix operator()(double t, const Matrix& rho) const {
        const Complex i_unit(0.0, 1.0);
        Matrix h = h_static ? *h_static : (*h_of_t)(t);
        Matrix d = -i_unit * (h * rho - rho * h);
        for (std::size_t k = 0; k < cops.size(); ++k) {
            d.noalias() += cops[k].rate * (cops[k].op * rho * cdag[k] -
                                           0.5 * (cdag_c[k] * rho + rho * cdag_c[k]));
        }
        return d;
    }
};

// Dormand-Prince 5(4) coefficients
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, double rtol, double atol) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < err.cols(); ++j) {
        for (Eigen::Index i = 0; i < err.rows(); ++i) {
            const double scale = atol + rtol * std::max(std::abs(y0(i, j)), std::abs(y1(i, j)));
            worst = std::max(worst, std::abs(err(i, j)) / scale);
        }
    }
    return worst;
}

struct Recorder {
    const ModeLayout* layout;
    Matrix op_a, op_b, na, nb, g2num_a, g2num_b;
    bool has_a = false, has_b = false;

    explicit Recorder(const ModeLayout& lay) : layout(&lay) {
        if (lay.has(Mode::A)) {
            has_a = true;
            const QOperator a = ops::destroy(lay, Mode::A);
            op_a = a.mat;
            na = (a.adjoint() * a).mat;
            g2num_a = (a.adjoint() * a.adjoint() * a * a).mat;
        }
        if (lay.has(Mode::B)) {
            has_b = true;
            const QOperator b = ops::destroy(lay, Mode::B);
            op_b = b.mat;
            nb = (b.adjoint() * b).mat;
            g2num_b = (b.adjoint() * b.adjoint() * b * b).mat;
        }
    }

    static double g2_of(const Matrix& rho, const Matrix& num, const Matrix& g2num) {
        const double n = (rho * num).trace().real();
        if (n <= 1e-12) return std::numeric_limits<double>::quiet_NaN();
        return (rho * g2num).trace().real() / (n * n);
    }

    void record(double t, const Matrix& rho, EvolutionResult& r) const {
        r.times.push_back(t);
        if (has_a) {
            r.a_expect.push_back((rho * op_a).trace());
            r.n_a.push_back((rho * na).trace().real());
            r.g2_a.push_back(g2_of(rho, na, g2num_a));
        }
        if (has_b) {
            r.b_expect.push_back((rho * op_b).trace());
            r.n_b.push_back((rho * nb).trace().real());
            r.g2_b.push_back(g2_of(rho, nb, g2num_b));
        }
        r.max_trace_deviation = std::max(r.max_trace_deviation, std::abs(rho.trace().real() - 1.0));
        double min_diag = 0.0;
        for (Eigen::Index i = 0; i < rho.rows(); ++i) min_diag = std::min(min_diag, rho(i, i).real());
        r.min_population = std::min(r.min_population, min_diag);
    }
};

EvolutionResult integrate(const Rhs& rhs, const ModeLayout& layout, const QState& rho0,
                          double t_final, const EvolveOptions& opts) {
    if (t_final <= 0.0) throw std::invalid_argument("evolve: t_final must be positive");
    Matrix y = rho0.density();
    const Recorder rec(layout);

    EvolutionResult result;
    const int n_out = std::max(2, opts.output_points);
    const double dt_out = t_final / (n_out - 1);
    rec.record(0.0, y, result);

    double t = 0.0;
    double dt = opts.dt_hint > 0.0 ? opts.dt_hint : dt_out / 16.0;
    const double dt_min = t_final * 1e-14;

    Matrix k1 = rhs(t, y);
    for (int out = 1; out < n_out; ++out) {
        const double t_stop = out * dt_out;
        while (t < t_stop - 1e-15 * t_final) {
            dt = std::min(dt, t_stop - t);
            if (dt < dt_min) {
                throw StiffnessError("evolve: step-size underflow; the problem is too stiff at this "
                                     "tolerance (consider larger kappa*dt scaling or a smaller Hilbert space)");
            }
            const Matrix k2 = rhs(t + C2 * dt, y + dt * (A21 * k1));
            const Matrix k3 = rhs(t + C3 * dt, y + dt * (A31 * k1 + A32 * k2));
            const Matrix k4 = rhs(t + C4 * dt, y + dt * (A41 * k1 + A42 * k2 + A43 * k3));
            const Matrix k5 = rhs(t + C5 * dt, y + dt * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
            const Matrix k6 = rhs(t + dt, y + dt * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
            const Matrix y5 = y + dt * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
            const Matrix k7 = rhs(t + dt, y5);
            const Matrix err = dt * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

            const double en = error_norm(err, y, y5, opts.rtol, opts.atol);
            if (en <= 1.0) {
                t += dt;
                y = y5;
                k1 = k7;   // FSAL
                ++result.steps;
                dt *= std::clamp(0.9 * std::pow(std::max(en, 1e-12), -0.2), 1.0, 5.0);
            } else {
                dt *= std::clamp(0.9 * std::pow(en, -0.2), 0.2, 0.9);
            }
        }
        rec.record(t_stop, y, result);
    }

    result.residual = rhs(t, y).cwiseAbs().maxCoeff();
    // steady when observables drifted < 1e-6 relative over the last quarter
    const std::size_t n = result.times.size();
    if (n >= 8) {
        auto drift = [&](const std::vector<double>& v) {
            if (v.empty()) return 0.0;
            const double last = v.back(), prev = v[n - 1 - n / 4];
            const double scale = std::max({std::abs(last), std::abs(prev), 1e-12});
            return std::abs(last - prev) / scale;
        };
        double worst = std::max(drift(result.n_a), drift(result.n_b));
        result.steady = worst < 1e-6;
    }

    y = 0.5 * (y + y.adjoint().eval());
    result.final_state = QState::from_density(layout, std::move(y));
    return result;
}

} // namespace

EvolutionResult evolve(const QOperator& h, const DissipationSpec& diss, const QState& rho0,
                       double t_final, const EvolveOptions& opts) {
    if (!(h.layout == rho0.layout)) throw std::invalid_argument("evolve: layout mismatch");
    h.assert_hermitian(1e-9);
    Rhs rhs;
    rhs.h_static = &h.mat;
    rhs.cops = collapse_operators(h.layout, diss);
    rhs.prepare();
    return integrate(rhs, h.layout, rho0, t_final, opts);
}

EvolutionResult evolve_time_dependent(const std::function<Matrix(double)>& h_of_t,
                                      const ModeLayout& layout, const DissipationSpec& diss,
                                      const QState& rho0, double t_final, const EvolveOptions& opts) {
    if (!(layout == rho0.layout)) throw std::invalid_argument("evolve: layout mismatch");
    Rhs rhs;
    rhs.h_of_t = &h_of_t;
    rhs.cops = collapse_operators(layout, diss);
    rhs.prepare();
    return integrate(rhs, layout, rho0, t_final, opts);
}

SteadyStateResult steady_state(const QOperator& h, const DissipationSpec& diss) {
    const ModeLayout& layout = h.layout;
    for (Mode m : layout.modes) {
        if (m != Mode::S && diss.kappa_for(m) <= 0.0) {
            throw DegenerateLiouvillianError(
                "steady_state: degenerate-liouvillian, every oscillator mode needs kappa > 0");
        }
    }
    const auto cops = collapse_operators(layout, diss);
    const int d = layout.dim();
    const int n = d * d;
    const Complex i_unit(0.0, 1.0);

    // column-major vec: vec(A rho B) = (B^T kron A) vec(rho)
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 8);
    auto add_left = [&](const Matrix& a, Complex scale) {   // rho -> a rho
        for (int c = 0; c < d; ++c) {
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    const Complex v = a(i, j);
                    if (v != 0.0) trip.emplace_back(c * d + i, c * d + j, scale * v);
                }
            }
        }
    };
    auto add_right = [&](const Matrix& b, Complex scale) {  // rho -> rho b
        for (int c = 0; c < d; ++c) {
            for (int cp = 0; cp < d; ++cp) {
                const Complex v = b(cp, c);
                if (v == 0.0) continue;
                for (int i = 0; i < d; ++i) trip.emplace_back(c * d + i, cp * d + i, scale * v);
            }
        }
    };
    auto add_both = [&](const Matrix& a, const Matrix& b, Complex scale) {   // rho -> a rho b
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                const Complex av = a(i, j);
                if (av == 0.0) continue;
                for (int cp = 0; cp < d; ++cp) {
                    for (int c = 0; c < d; ++c) {
                        const Complex bv = b(cp, c);
                        if (bv != 0.0) trip.emplace_back(c * d + i, cp * d + j, scale * av * bv);
                    }
                }
            }
        }
    };

    add_left(h.mat, -i_unit);
    add_right(h.mat, i_unit);
    for (const auto& c : cops) {
        const Matrix cd = c.op.adjoint();
        const Matrix cdc = cd * c.op;
        add_both(c.op, cd, c.rate);
        add_left(cdc, -0.5 * c.rate);
        add_right(cdc, -0.5 * c.rate);
    }

    Eigen::SparseMatrix<Complex> l_full(n, n);
    l_full.setFromTriplets(trip.begin(), trip.end());

    double l_norm = 0.0;
    for (int k = 0; k < l_full.outerSize(); ++k) {
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(l_full, k); it; ++it) {
            l_norm = std::max(l_norm, std::abs(it.value()));
        }
    }

    // replace row 0 by the trace constraint
    std::vector<Eigen::Triplet<Complex>> trip2;
    trip2.reserve(trip.size() + static_cast<std::size_t>(d));
    for (int k = 0; k < l_full.outerSize(); ++k) {
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(l_full, k); it; ++it) {
            if (it.row() != 0) trip2.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (int k = 0; k < d; ++k) trip2.emplace_back(0, k * d + k, Complex(1.0, 0.0));
    Eigen::SparseMatrix<Complex> l_sys(n, n);
    l_sys.setFromTriplets(trip2.begin(), trip2.end());
    l_sys.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
    lu.compute(l_sys);
    if (lu.info() != Eigen::Success) {
        throw DegenerateLiouvillianError("steady_state: degenerate-liouvillian, factorization failed");
    }
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    b(0) = 1.0;
    const Eigen::VectorXcd x = lu.solve(b);
    if (!x.allFinite()) {
        throw DegenerateLiouvillianError("steady_state: degenerate-liouvillian, singular system");
    }

    Matrix rho = Eigen::Map<const Matrix>(x.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint().eval());
    rho /= rho.trace().real();

    SteadyStateResult out;
    const Eigen::VectorXcd res = l_full * Eigen::Map<const Eigen::VectorXcd>(rho.data(), n);
    out.residual = res.cwiseAbs().maxCoeff();
    out.liouvillian_norm = l_norm;
    out.state = QState::from_density(layout, std::move(rho));
    return out;
}

double g2_zero(const QState& state, Mode m) {
    const QOperator c = ops::destroy(state.layout, m);
    const QOperator num = c.adjoint() * c;
    const double n = ops::expect(num, state).real();
    if (n <= 1e-12) {
        throw UndefinedG2Error("g2_zero: undefined-g2, mode occupation vanishes");
    }
    const double numerator = ops::expect(c.adjoint() * c.adjoint() * c * c, state).real();
    return numerator / (n * n);
}

TruncationResult converge_truncation(const std::function<double(const std::vector<int>&)>& builder,
                                     std::vector<int> start_dims, double tol, int dim_ceiling) {
    for (int dim : start_dims) {
        if (dim < 3) throw std::invalid_argument("converge_truncation: start dims must be >= 3");
    }
    std::vector<int> dims = std::move(start_dims);
    double value = builder(dims);
    std::vector<std::pair<std::vector<int>, double>> trend = {{dims, value}};
    while (true) {
        std::vector<int> next = dims;
        for (int& dim : next) dim += 2;
        if (*std::max_element(next.begin(), next.end()) > dim_ceiling) {
            std::string msg = "converge_truncation: no-convergence at dim ceiling; trend:";
            for (const auto& [dd, vv] : trend) {
                msg += " [" + std::to_string(dd[0]) + "]=" + std::to_string(vv);
            }
            throw NoConvergenceError(msg);
        }
        const double next_value = builder(next);
        trend.emplace_back(next, next_value);
        const double scale = std::max(std::abs(next_value), 1e-300);
        if (std::abs(next_value - value) / scale < tol) {
            return {dims, value};
        }
        dims = next;
        value = next_value;
    }
}

} // namespace kerrsim::dyn
