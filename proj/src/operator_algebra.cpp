#include "kerrsim/operator_algebra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace kerrsim::ops {

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::A: return "A";
        case Mode::B: return "B";
        case Mode::S: return "S";
    }
    return "?";
}

Mode mode_from_name(const std::string& name) {
    if (name == "A" || name == "a") return Mode::A;
    if (name == "B" || name == "b") return Mode::B;
    if (name == "S" || name == "s") return Mode::S;
    throw std::invalid_argument("unknown mode label: " + name);
}

ModeLayout::ModeLayout(std::vector<Mode> m, std::vector<int> d)
    : modes(std::move(m)), dims(std::move(d)) {
    if (modes.size() != dims.size() || modes.empty()) {
        throw std::invalid_argument("ModeLayout: modes/dims size mismatch");
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (dims[i] < 2) throw std::invalid_argument("ModeLayout: invalid-dimension, dims must be >= 2");
        for (std::size_t j = i + 1; j < modes.size(); ++j) {
            if (modes[i] == modes[j]) throw std::invalid_argument("ModeLayout: duplicate mode label");
            if (modes[i] > modes[j]) throw std::invalid_argument("ModeLayout: modes must be ordered (A, B, S)");
        }
    }
}

ModeLayout ModeLayout::single(Mode m, int dim) { return ModeLayout({m}, {dim}); }
ModeLayout ModeLayout::two_mode(int da, int db) { return ModeLayout({Mode::A, Mode::B}, {da, db}); }
ModeLayout ModeLayout::three_mode(int da, int db, int ds) {
    return ModeLayout({Mode::A, Mode::B, Mode::S}, {da, db, ds});
}

int ModeLayout::dim() const {
    int d = 1;
    for (int x : dims) d *= x;
    return d;
}

bool ModeLayout::has(Mode m) const {
    return std::find(modes.begin(), modes.end(), m) != modes.end();
}

int ModeLayout::index_of(Mode m) const {
    auto it = std::find(modes.begin(), modes.end(), m);
    if (it == modes.end()) {
        throw std::invalid_argument(std::string("mode ") + mode_name(m) + " not in layout");
    }
    return static_cast<int>(it - modes.begin());
}

int ModeLayout::dim_of(Mode m) const { return dims[static_cast<std::size_t>(index_of(m))]; }

QOperator::QOperator(ModeLayout lay, Matrix m) : layout(std::move(lay)), mat(std::move(m)) {
    if (mat.rows() != mat.cols() || mat.rows() != layout.dim()) {
        throw std::invalid_argument("QOperator: matrix size does not match layout dimension");
    }
}

bool QOperator::is_hermitian(double tol) const {
    return (mat - mat.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void QOperator::assert_hermitian(double tol) const {
    const double dev = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
    if (dev > tol) {
        throw std::runtime_error("operator not Hermitian, max |H - H^dag| = " + std::to_string(dev));
    }
}

namespace {
void check_same_layout(const QOperator& x, const QOperator& y, const char* what) {
    if (!(x.layout == y.layout)) throw std::invalid_argument(std::string(what) + ": layout mismatch");
}
} // namespace

QOperator operator+(const QOperator& x, const QOperator& y) {
    check_same_layout(x, y, "operator+");
    return {x.layout, x.mat + y.mat};
}
QOperator operator-(const QOperator& x, const QOperator& y) {
    check_same_layout(x, y, "operator-");
    return {x.layout, x.mat - y.mat};
}
QOperator operator*(const QOperator& x, const QOperator& y) {
    check_same_layout(x, y, "operator*");
    return {x.layout, x.mat * y.mat};
}
QOperator operator*(Complex c, const QOperator& x) { return {x.layout, c * x.mat}; }
QOperator operator*(double c, const QOperator& x) { return {x.layout, c * x.mat}; }

QOperator commutator(const QOperator& x, const QOperator& y) {
    check_same_layout(x, y, "commutator");
    return {x.layout, x.mat * y.mat - y.mat * x.mat};
}
QOperator anticommutator(const QOperator& x, const QOperator& y) {
    check_same_layout(x, y, "anticommutator");
    return {x.layout, x.mat * y.mat + y.mat * x.mat};
}

QState QState::from_ket(ModeLayout lay, Vector psi) {
    if (psi.size() != lay.dim()) throw std::invalid_argument("QState: ket size does not match layout");
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-12) {
        throw std::invalid_argument("QState: ket norm deviates from 1 by " + std::to_string(std::abs(norm - 1.0)));
    }
    QState s;
    s.layout = std::move(lay);
    s.kind = Kind::Ket;
    s.ket = std::move(psi);
    return s;
}

QState QState::from_density(ModeLayout lay, Matrix rho) {
    if (rho.rows() != rho.cols() || rho.rows() != lay.dim()) {
        throw std::invalid_argument("QState: density size does not match layout");
    }
    const double tr_dev = std::abs(rho.trace() - Complex(1.0, 0.0));
    if (tr_dev > 1e-9) throw std::invalid_argument("QState: trace deviates from 1 by " + std::to_string(tr_dev));
    const double herm_dev = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > 1e-9) throw std::invalid_argument("QState: density not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
    if (es.eigenvalues().minCoeff() < -1e-9) {
        throw std::invalid_argument("QState: density not PSD, min eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
    }
    QState s;
    s.layout = std::move(lay);
    s.kind = Kind::Density;
    s.rho = std::move(rho);
    return s;
}

Matrix QState::density() const {
    if (kind == Kind::Density) return rho;
    return ket * ket.adjoint();
}

Matrix destroy_matrix(int dim) {
    if (dim < 2) throw std::invalid_argument("destroy: invalid-dimension, dim must be >= 2");
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return m;
}

Matrix number_matrix(int dim) {
    if (dim < 2) throw std::invalid_argument("number: invalid-dimension, dim must be >= 2");
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
    return m;
}

Vector coherent_vector(int dim, Complex alpha) {
    Vector v(dim);
    Complex amp(1.0, 0.0);
    v(0) = amp;
    for (int n = 1; n < dim; ++n) {
        amp *= alpha / std::sqrt(static_cast<double>(n));
        v(n) = amp;
    }
    v /= v.norm();
    return v;
}

Matrix thermal_matrix(int dim, double nbar) {
    if (nbar < 0.0) throw std::invalid_argument("thermal: nbar must be >= 0");
    Matrix m = Matrix::Zero(dim, dim);
    if (nbar == 0.0) {
        m(0, 0) = 1.0;
        return m;
    }
    const double q = nbar / (1.0 + nbar);
    double w = 1.0, total = 0.0;
    for (int n = 0; n < dim; ++n) {
        m(n, n) = w;
        total += w;
        w *= q;
    }
    m /= total;
    return m;
}

Matrix kron(const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        }
    }
    return out;
}

QOperator embed(const Matrix& op, Mode m, const ModeLayout& layout) {
    const int idx = layout.index_of(m);
    if (op.rows() != op.cols() || op.rows() != layout.dims[static_cast<std::size_t>(idx)]) {
        throw std::invalid_argument("embed: operator dimension does not match layout mode dimension");
    }
    Matrix out = Matrix::Identity(1, 1);
    for (std::size_t k = 0; k < layout.modes.size(); ++k) {
        if (static_cast<int>(k) == idx) {
            out = kron(out, op);
        } else {
            out = kron(out, Matrix::Identity(layout.dims[k], layout.dims[k]));
        }
    }
    return {layout, std::move(out)};
}

QOperator destroy(const ModeLayout& layout, Mode m) {
    return embed(destroy_matrix(layout.dim_of(m)), m, layout);
}

QOperator identity(const ModeLayout& layout) {
    return {layout, Matrix::Identity(layout.dim(), layout.dim())};
}

Complex expect(const QOperator& op, const QState& state) {
    if (!(op.layout == state.layout)) throw std::invalid_argument("expect: layout mismatch");
    if (state.kind == QState::Kind::Ket) {
        return state.ket.adjoint() * op.mat * state.ket;
    }
    return (state.rho * op.mat).trace();
}

QState partial_trace(const QState& state, const std::vector<Mode>& keep) {
    const ModeLayout& lay = state.layout;
    std::vector<bool> keep_flag(lay.modes.size(), false);
    for (Mode m : keep) keep_flag[static_cast<std::size_t>(lay.index_of(m))] = true;

    std::vector<Mode> kept_modes;
    std::vector<int> kept_dims;
    int dim_keep = 1, dim_drop = 1;
    for (std::size_t k = 0; k < lay.modes.size(); ++k) {
        if (keep_flag[k]) {
            kept_modes.push_back(lay.modes[k]);
            kept_dims.push_back(lay.dims[k]);
            dim_keep *= lay.dims[k];
        } else {
            dim_drop *= lay.dims[k];
        }
    }
    if (kept_modes.empty()) throw std::invalid_argument("partial_trace: must keep at least one mode");

    const Matrix rho = state.density();
    const int n = static_cast<int>(lay.modes.size());

    // strides of each mode in the flattened index (row-major over modes)
    std::vector<int> stride(lay.modes.size());
    int acc = 1;
    for (int k = n - 1; k >= 0; --k) {
        stride[static_cast<std::size_t>(k)] = acc;
        acc *= lay.dims[static_cast<std::size_t>(k)];
    }
    std::vector<int> kept_idx, drop_idx;
    for (std::size_t k = 0; k < lay.modes.size(); ++k) (keep_flag[k] ? kept_idx : drop_idx).push_back(static_cast<int>(k));

    auto full_index = [&](int keep_i, int drop_i) {
        int full = 0;
        int rest = keep_i;
        for (int k = static_cast<int>(kept_idx.size()) - 1; k >= 0; --k) {
            const int d = lay.dims[static_cast<std::size_t>(kept_idx[static_cast<std::size_t>(k)])];
            full += (rest % d) * stride[static_cast<std::size_t>(kept_idx[static_cast<std::size_t>(k)])];
            rest /= d;
        }
        rest = drop_i;
        for (int k = static_cast<int>(drop_idx.size()) - 1; k >= 0; --k) {
            const int d = lay.dims[static_cast<std::size_t>(drop_idx[static_cast<std::size_t>(k)])];
            full += (rest % d) * stride[static_cast<std::size_t>(drop_idx[static_cast<std::size_t>(k)])];
            rest /= d;
        }
        return full;
    };

    Matrix out = Matrix::Zero(dim_keep, dim_keep);
    for (int i = 0; i < dim_keep; ++i) {
        for (int j = 0; j < dim_keep; ++j) {
            Complex sum(0.0, 0.0);
            for (int t = 0; t < dim_drop; ++t) {
                sum += rho(full_index(i, t), full_index(j, t));
            }
            out(i, j) = sum;
        }
    }
    return QState::from_density(ModeLayout(kept_modes, kept_dims), std::move(out));
}

QState fock_state(const ModeLayout& layout, const std::vector<int>& occupation) {
    if (occupation.size() != layout.modes.size()) {
        throw std::invalid_argument("fock_state: one occupation per mode required");
    }
    int idx = 0;
    for (std::size_t k = 0; k < occupation.size(); ++k) {
        if (occupation[k] < 0 || occupation[k] >= layout.dims[k]) {
            throw std::invalid_argument("fock_state: occupation outside truncation");
        }
        idx = idx * layout.dims[k] + occupation[k];
    }
    Vector v = Vector::Zero(layout.dim());
    v(idx) = 1.0;
    return QState::from_ket(layout, std::move(v));
}

} // namespace kerrsim::ops
