// lindblad_dynamics.hpp — open-system time evolution, steady states, correlation observables
#pragma once

#include "kerrsim/operator_algebra.hpp"
#include "kerrsim/hamiltonian_builder.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace kerrsim::dyn {

using ops::Complex;
using ops::Matrix;
using ops::Mode;
using ops::ModeLayout;
using ops::QOperator;
using ops::QState;

struct StiffnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateLiouvillianError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UndefinedG2Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Energy-decay linewidths (GHz, non-angular) and thermal occupations per mode.
struct DissipationSpec {
    double kappa_a = 0.0;
    double kappa_b = 0.0;
    double kappa_s = 0.0;
    double nbar_a = 0.0;
    double nbar_b = 0.0;
    double nbar_s = 0.0;

    double kappa_for(Mode m) const;
    double nbar_for(Mode m) const;
    void validate() const;
};

// Collapse operator with its angular rate 2*pi*kappa*(1+nbar) etc.
struct CollapseOp {
    Matrix op;
    double rate = 0.0;   // rad/ns
};

std::vector<CollapseOp> collapse_operators(const ModeLayout& layout, const DissipationSpec& diss);

struct EvolutionResult {
    std::vector<double> times;                  // ns
    std::vector<Complex> a_expect, b_expect;
    std::vector<double> n_a, n_b, g2_a, g2_b;   // g2 entries NaN when undefined
    QState final_state;
    bool steady = false;
    double residual = 0.0;                      // max |drho/dt| at the final state
    double max_trace_deviation = 0.0;
    double min_population = 0.0;                // most negative diagonal entry seen
    std::size_t steps = 0;
};

struct EvolveOptions {
    double rtol = 1e-7;
    double atol = 1e-10;
    int output_points = 400;
    double dt_hint = 0.0;   // initial step, ns; 0 = auto
};

// Integrate drho/dt = -i[H, rho] + sum_k rate_k D[c_k] rho with an embedded
// Dormand-Prince 5(4) pair and PI step control. H is the full angular
// Hamiltonian; observables are recorded on a uniform output grid.
EvolutionResult evolve(const QOperator& h, const DissipationSpec& diss, const QState& rho0,
                       double t_final, const EvolveOptions& opts = {});

// Time-dependent variant for lab-frame oracles.
EvolutionResult evolve_time_dependent(const std::function<Matrix(double)>& h_of_t,
                                      const ModeLayout& layout, const DissipationSpec& diss,
                                      const QState& rho0, double t_final,
                                      const EvolveOptions& opts = {});

// Direct steady-state solve: vectorize the Liouvillian, replace one row with
// the trace constraint, sparse-LU solve, re-Hermitize. The residual
// max |L rho| and the Liouvillian max-norm are reported through `residual`.
struct SteadyStateResult {
    QState state;
    double residual = 0.0;
    double liouvillian_norm = 0.0;
};

SteadyStateResult steady_state(const QOperator& h, const DissipationSpec& diss);

// g2(0) = <c^t c^t c c> / <c^t c>^2; throws UndefinedG2Error when <c^t c> <= 1e-12.
double g2_zero(const QState& state, Mode m);

// Increase every mode dimension by 2 until the observable changes by less than
// tol (relative); returns the first converged dims and the observable there.
struct TruncationResult {
    std::vector<int> dims;
    double value = 0.0;
};
TruncationResult converge_truncation(const std::function<double(const std::vector<int>&)>& builder,
                                     std::vector<int> start_dims, double tol = 0.01,
                                     int dim_ceiling = 16);

} // namespace kerrsim::dyn
