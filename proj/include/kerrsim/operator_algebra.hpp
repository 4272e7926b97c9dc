// operator_algebra.hpp — truncated-Fock-space operators on up to three bosonic modes
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace kerrsim::ops {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Mode labels. Ordering in tensor products is always A, B, S.
enum class Mode { A, B, S };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

// Per-mode truncation dimensions for a subset of (A, B, S), in that order.
struct ModeLayout {
    std::vector<Mode> modes;
    std::vector<int> dims;

    ModeLayout() = default;
    ModeLayout(std::vector<Mode> m, std::vector<int> d);

    static ModeLayout single(Mode m, int dim);
    static ModeLayout two_mode(int dim_a, int dim_b);
    static ModeLayout three_mode(int dim_a, int dim_b, int dim_s);

    int dim() const;                 // total Hilbert dimension
    bool has(Mode m) const;
    int index_of(Mode m) const;      // position in `modes`, throws if absent
    int dim_of(Mode m) const;

    bool operator==(const ModeLayout& other) const = default;
};

// Dense complex operator tied to a layout.
struct QOperator {
    ModeLayout layout;
    Matrix mat;

    QOperator() = default;
    QOperator(ModeLayout lay, Matrix m);

    int dim() const { return static_cast<int>(mat.rows()); }
    QOperator adjoint() const { return {layout, mat.adjoint()}; }
    bool is_hermitian(double tol = 1e-12) const;
    // Verifies max |H - H^dag| <= tol, throws otherwise.
    void assert_hermitian(double tol = 1e-12) const;
};

QOperator operator+(const QOperator& x, const QOperator& y);
QOperator operator-(const QOperator& x, const QOperator& y);
QOperator operator*(const QOperator& x, const QOperator& y);
QOperator operator*(Complex c, const QOperator& x);
QOperator operator*(double c, const QOperator& x);

QOperator commutator(const QOperator& x, const QOperator& y);
QOperator anticommutator(const QOperator& x, const QOperator& y);

// Ket or density matrix on a layout. Constructors validate:
// ket norm = 1 +- 1e-12, trace = 1 +- 1e-9, min eigenvalue >= -1e-9.
struct QState {
    enum class Kind { Ket, Density };

    ModeLayout layout;
    Kind kind = Kind::Ket;
    Vector ket;     // valid when kind == Ket
    Matrix rho;     // valid when kind == Density

    static QState from_ket(ModeLayout lay, Vector psi);
    static QState from_density(ModeLayout lay, Matrix rho);

    Matrix density() const;          // rho or |psi><psi|
};

// --------------------------- single-mode building blocks --------------------

// Lowering operator, entries sqrt(n) at (n-1, n). Throws invalid-dimension for dim < 2.
Matrix destroy_matrix(int dim);
Matrix number_matrix(int dim);
// Truncated coherent state |alpha>, renormalized after truncation.
Vector coherent_vector(int dim, Complex alpha);
// Bose-Einstein diagonal density with mean occupation nbar.
Matrix thermal_matrix(int dim, double nbar);

QOperator destroy(const ModeLayout& layout, Mode m);   // embedded on the full space
QOperator identity(const ModeLayout& layout);

// --------------------------- composition ------------------------------------

Matrix kron(const Matrix& x, const Matrix& y);

// Embed a single-mode operator on the full space: kron with identities on the
// other modes, mode ordering fixed as (A, B, S).
QOperator embed(const Matrix& op, Mode m, const ModeLayout& layout);

// --------------------------- functionals ------------------------------------

Complex expect(const QOperator& op, const QState& state);

// Trace out all modes not in `keep`; preserves trace to 1e-12.
QState partial_trace(const QState& state, const std::vector<Mode>& keep);

// Fock basis state |n_0, n_1, ...> with one occupation per layout mode.
QState fock_state(const ModeLayout& layout, const std::vector<int>& occupation);

} // namespace kerrsim::ops
