// spectral_analysis.hpp — analytic level models, peak extraction, nonlinear fits
//
// Everything here works in plain GHz on (modulation frequency, drive frequency)
// coordinates.
#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace kerrsim::spectral {

struct FitFailedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IllPosedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ModelKind { Repulsion, Attraction };

// Coupled-mode eigenfrequencies. Repulsion: (wA+wB)/2 +- sqrt(((wA-wB)/2)^2 + J^2).
std::pair<double, double> eigenfreqs_repulsion(double omega_a, double omega_b, double j);
// Attraction: (wA+wB)/2 +- sqrt(((wA-wB)/2)^2 - J^2); complex inside |wA-wB| < 2J.
std::pair<std::complex<double>, std::complex<double>>
eigenfreqs_attraction(double omega_a, double omega_b, double j);

struct LevelModel {
    ModelKind kind = ModelKind::Repulsion;
    double omega_a = 0.0;
    double omega_b = 0.0;
    double j = 0.0;
    double v = 0.0;
    double alpha_a = 0.0;   // only used by Kerr-shifted branches
    double alpha_b = 0.0;
};

// Branch pair with the occupation labels that produced it.
struct BranchPair {
    int n_a = 0, n_b = 0;
    std::complex<double> upper, lower;
};

// Eigenfrequencies with Kerr-shifted mode frequencies
// (wA -> wA + alpha_A n_A + V n_B, wB -> wB + alpha_B n_B + V n_A).
BranchPair kerr_shifted_branches(const LevelModel& model, int n_a, int n_b);

// --------------------------- peak extraction --------------------------------

enum class Polarity { Peaks, Dips, Both };

struct Peak {
    double center = 0.0;
    double width = 0.0;
    double amplitude = 0.0;
    bool dip = false;
};

struct PeakSet {
    std::vector<double> axis1;                // modulation frequency per column
    std::vector<std::vector<Peak>> columns;   // extracted features per column
    std::size_t total() const;
};

// Local extrema per column, refined by a 3-point parabolic fit of the
// log-magnitude (dips are located on the inverted signal). Columns with
// nothing above the prominence threshold produce empty entries.
PeakSet extract_peaks(const std::vector<double>& axis1, const std::vector<double>& axis2,
                      const std::vector<std::vector<double>>& columns, Polarity polarity,
                      double min_prominence);

// --------------------------- model fitting ----------------------------------

struct FitResult {
    LevelModel model;
    double sigma_omega_a = 0.0, sigma_omega_b = 0.0, sigma_j = 0.0, sigma_v = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct FitOptions {
    int max_iterations = 200;
    bool fit_v = false;          // include the V-shifted branch family (attraction maps)
    double huber_delta = 0.0;    // 0 disables robust weighting
};

// Drive-frequency loci as functions of modulation frequency. Repulsion maps
// place the moving oscillator at omega_A - omega_m; attraction maps place the
// idler at omega_m - omega_B, with an additional V-shifted family when fit_v
// is set (occupation n_B = 1 on the probed mode).
std::vector<double> model_branches(const LevelModel& model, ModelKind kind, bool with_v_family,
                                   double omega_m);

// Levenberg-Marquardt fit of extracted peak centers to the nearest model
// branch. Uncertainties come from the residual covariance at the optimum.
FitResult fit_levels(const PeakSet& peaks, ModelKind kind, const LevelModel& initial,
                     const FitOptions& opts = {});

// Small dense LM solver used by fit_levels; exposed for reuse and testing.
Eigen::VectorXd levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    Eigen::VectorXd theta0, int max_iterations, int* iterations_out, bool* converged_out,
    Eigen::MatrixXd* jacobian_out = nullptr);

} // namespace kerrsim::spectral
