#include "kerrsim/spectral_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kerrsim::spectral {

std::pair<double, double> eigenfreqs_repulsion(double omega_a, double omega_b, double j) {
    if (j < 0.0) throw std::invalid_argument("eigenfreqs_repulsion: J must be >= 0");
    const double mean = 0.5 * (omega_a + omega_b);
    const double rad = std::sqrt(0.25 * (omega_a - omega_b) * (omega_a - omega_b) + j * j);
    return {mean + rad, mean - rad};
}

std::pair<std::complex<double>, std::complex<double>>
eigenfreqs_attraction(double omega_a, double omega_b, double j) {
    if (j < 0.0) throw std::invalid_argument("eigenfreqs_attraction: J must be >= 0");
    const double mean = 0.5 * (omega_a + omega_b);
    const double disc = 0.25 * (omega_a - omega_b) * (omega_a - omega_b) - j * j;
    if (disc >= 0.0) {
        const double rad = std::sqrt(disc);
        return {{mean + rad, 0.0}, {mean - rad, 0.0}};
    }
    const double rad = std::sqrt(-disc);
    return {{mean, rad}, {mean, -rad}};
}

BranchPair kerr_shifted_branches(const LevelModel& model, int n_a, int n_b) {
    if (n_a < 0 || n_a > 1 || n_b < 0 || n_b > 1) {
        throw std::invalid_argument("kerr_shifted_branches: occupations must be 0 or 1");
    }
    const double wa = model.omega_a + model.alpha_a * n_a + model.v * n_b;
    const double wb = model.omega_b + model.alpha_b * n_b + model.v * n_a;
    BranchPair out;
    out.n_a = n_a;
    out.n_b = n_b;
    if (model.kind == ModelKind::Repulsion) {
        const auto [hi, lo] = eigenfreqs_repulsion(wa, wb, model.j);
        out.upper = hi;
        out.lower = lo;
    } else {
        std::tie(out.upper, out.lower) = eigenfreqs_attraction(wa, wb, model.j);
    }
    return out;
}

std::size_t PeakSet::total() const {
    std::size_t n = 0;
    for (const auto& c : columns) n += c.size();
    return n;
}

namespace {

// prominence of a local maximum: height above the higher of the two minima
// separating it from higher ground (or the column edge)
double prominence_at(const std::vector<double>& y, std::size_t k) {
    const double yk = y[k];
    double left_min = yk, right_min = yk;
    for (std::size_t i = k; i-- > 0;) {
        if (y[i] > yk) break;
        left_min = std::min(left_min, y[i]);
    }
    for (std::size_t i = k + 1; i < y.size(); ++i) {
        if (y[i] > yk) break;
        right_min = std::min(right_min, y[i]);
    }
    return yk - std::max(left_min, right_min);
}

void find_extrema(const std::vector<double>& axis2, const std::vector<double>& col, bool dips,
                  double min_prominence, std::vector<Peak>& out) {
    const std::size_t n = col.size();
    const double cmax = *std::max_element(col.begin(), col.end());
    const double cmin = *std::min_element(col.begin(), col.end());
    const double range = cmax - cmin;
    if (range <= 0.0) return;

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = dips ? (cmax - col[i]) : col[i];

    const double h = axis2[1] - axis2[0];
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!(y[k] >= y[k - 1] && y[k] > y[k + 1])) continue;
        if (prominence_at(y, k) < min_prominence * range) continue;

        double offset = 0.0, curv = 0.0;
        if (!dips && y[k - 1] > 0.0 && y[k] > 0.0 && y[k + 1] > 0.0) {
            const double l0 = std::log(y[k - 1]), l1 = std::log(y[k]), l2 = std::log(y[k + 1]);
            const double denom = l0 - 2.0 * l1 + l2;
            if (denom < 0.0) {
                offset = 0.5 * (l0 - l2) / denom;
                curv = denom / (h * h);
            }
        } else {
            const double denom = y[k - 1] - 2.0 * y[k] + y[k + 1];
            if (denom < 0.0) {
                offset = 0.5 * (y[k - 1] - y[k + 1]) / denom;
                curv = denom / (h * h) / std::max(y[k], 1e-300);
            }
        }
        offset = std::clamp(offset, -0.5, 0.5);
        Peak p;
        p.center = axis2[k] + offset * h;
        p.width = curv < 0.0 ? std::sqrt(8.0 / -curv) : 0.0;
        p.amplitude = dips ? col[k] : y[k];
        p.dip = dips;
        out.push_back(p);
    }
}

} // namespace

PeakSet extract_peaks(const std::vector<double>& axis1, const std::vector<double>& axis2,
                      const std::vector<std::vector<double>>& columns, Polarity polarity,
                      double min_prominence) {
    if (axis2.size() < 5) {
        throw std::invalid_argument("extract_peaks: need at least 5 drive-axis points per column");
    }
    if (columns.size() != axis1.size()) {
        throw std::invalid_argument("extract_peaks: column count does not match axis1");
    }
    PeakSet set;
    set.axis1 = axis1;
    set.columns.resize(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != axis2.size()) {
            throw std::invalid_argument("extract_peaks: column length does not match axis2");
        }
        bool usable = true;
        for (double v : columns[c]) {
            if (!std::isfinite(v)) usable = false;
        }
        if (!usable) continue;   // poisoned column -> empty entry, never abort
        if (polarity != Polarity::Dips) find_extrema(axis2, columns[c], false, min_prominence, set.columns[c]);
        if (polarity != Polarity::Peaks) find_extrema(axis2, columns[c], true, min_prominence, set.columns[c]);
        std::sort(set.columns[c].begin(), set.columns[c].end(),
                  [](const Peak& x, const Peak& y) { return x.center < y.center; });
    }
    return set;
}

std::vector<double> model_branches(const LevelModel& model, ModelKind kind, bool with_v_family,
                                   double omega_m) {
    std::vector<double> out;
    if (kind == ModelKind::Repulsion) {
        const auto [hi, lo] = eigenfreqs_repulsion(model.omega_a - omega_m, model.omega_b, model.j);
        out = {hi, lo};
    } else {
        const double idler = omega_m - model.omega_b;
        const auto base = eigenfreqs_attraction(model.omega_a, idler, model.j);
        out = {base.first.real(), base.second.real()};
        if (with_v_family) {
            const auto shifted = eigenfreqs_attraction(model.omega_a + model.v, idler, model.j);
            out.push_back(shifted.first.real());
            out.push_back(shifted.second.real());
        }
    }
    return out;
}

Eigen::VectorXd levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    Eigen::VectorXd theta, int max_iterations, int* iterations_out, bool* converged_out,
    Eigen::MatrixXd* jacobian_out) {
    const int n = static_cast<int>(theta.size());
    Eigen::VectorXd r = residuals(theta);
    double cost = r.squaredNorm();
    double lambda = 1e-4;
    bool converged = false;
    int iter = 0;

    Eigen::MatrixXd jac(r.size(), n);
    auto numeric_jacobian = [&](const Eigen::VectorXd& th, const Eigen::VectorXd& r0) {
        for (int k = 0; k < n; ++k) {
            const double step = 1e-7 * std::max(1.0, std::abs(th(k)));
            Eigen::VectorXd tp = th;
            tp(k) += step;
            jac.col(k) = (residuals(tp) - r0) / step;
        }
    };

    for (; iter < max_iterations; ++iter) {
        numeric_jacobian(theta, r);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;
        if (!jtj.allFinite()) throw IllPosedError("fit: ill-posed, non-finite normal equations");

        bool stepped = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            for (int k = 0; k < n; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            const Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
            if (!delta.allFinite()) throw IllPosedError("fit: ill-posed, degenerate Jacobian");
            const Eigen::VectorXd trial = theta + delta;
            const Eigen::VectorXd rt = residuals(trial);
            const double trial_cost = rt.squaredNorm();
            if (trial_cost < cost) {
                const double rel_impr = (cost - trial_cost) / std::max(cost, 1e-300);
                const double rel_step = delta.norm() / std::max(theta.norm(), 1e-300);
                theta = trial;
                r = rt;
                cost = trial_cost;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel_impr < 1e-12 || rel_step < 1e-11) converged = true;
                break;
            }
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
        if (!stepped || converged) {
            converged = true;
            break;
        }
    }
    numeric_jacobian(theta, r);
    if (iterations_out) *iterations_out = iter;
    if (converged_out) *converged_out = converged;
    if (jacobian_out) *jacobian_out = jac;
    return theta;
}

FitResult fit_levels(const PeakSet& peaks, ModelKind kind, const LevelModel& initial,
                     const FitOptions& opts) {
    std::vector<std::pair<double, double>> pts;   // (omega_m, peak center)
    for (std::size_t c = 0; c < peaks.columns.size(); ++c) {
        for (const Peak& p : peaks.columns[c]) pts.emplace_back(peaks.axis1[c], p.center);
    }
    if (pts.size() < 8) {
        throw std::invalid_argument("fit_levels: need at least 8 peak points spanning the crossing");
    }

    const bool fit_v = opts.fit_v && kind == ModelKind::Attraction;
    const int n_params = fit_v ? 4 : 3;

    auto unpack = [&](const Eigen::VectorXd& th) {
        LevelModel m = initial;
        m.kind = kind;
        m.omega_a = th(0);
        m.omega_b = th(1);
        m.j = std::abs(th(2));
        if (fit_v) m.v = th(3);
        return m;
    };
    auto residuals = [&](const Eigen::VectorXd& th) {
        const LevelModel m = unpack(th);
        Eigen::VectorXd r(static_cast<Eigen::Index>(pts.size()));
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto branches = model_branches(m, kind, fit_v, pts[i].first);
            double best = std::numeric_limits<double>::infinity();
            for (double b : branches) {
                const double dv = pts[i].second - b;
                if (std::abs(dv) < std::abs(best)) best = dv;
            }
            if (opts.huber_delta > 0.0 && std::abs(best) > opts.huber_delta) {
                best = std::copysign(std::sqrt(opts.huber_delta * (2.0 * std::abs(best) - opts.huber_delta)),
                                     best);
            }
            r(static_cast<Eigen::Index>(i)) = best;
        }
        return r;
    };

    Eigen::VectorXd theta0(n_params);
    theta0(0) = initial.omega_a;
    theta0(1) = initial.omega_b;
    theta0(2) = initial.j;
    if (fit_v) theta0(3) = initial.v;

    int iters = 0;
    bool converged = false;
    Eigen::MatrixXd jac;
    const Eigen::VectorXd theta =
        levenberg_marquardt(residuals, theta0, opts.max_iterations, &iters, &converged, &jac);
    if (!converged) {
        throw FitFailedError("fit_levels: fit-failed, no convergence in " +
                             std::to_string(opts.max_iterations) + " iterations");
    }

    FitResult out;
    out.model = unpack(theta);
    out.iterations = iters;
    out.converged = converged;
    const Eigen::VectorXd r = residuals(theta);
    out.residual_norm = r.norm();

    // 1-sigma uncertainties from the residual covariance at the optimum
    const int dof = std::max<int>(1, static_cast<int>(pts.size()) - n_params);
    const double s2 = r.squaredNorm() / dof;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::MatrixXd cov = s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
    out.sigma_omega_a = std::sqrt(std::max(0.0, cov(0, 0)));
    out.sigma_omega_b = std::sqrt(std::max(0.0, cov(1, 1)));
    out.sigma_j = std::sqrt(std::max(0.0, cov(2, 2)));
    if (fit_v) out.sigma_v = std::sqrt(std::max(0.0, cov(3, 3)));
    return out;
}

} // namespace kerrsim::spectral
