#include "lacc/complexmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lacc/errors.hpp"

namespace lacc {

namespace {

// Keeps kron results (and hence everything downstream) at desk scale.
constexpr std::size_t kMaxDim = 4096;

void check_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InputError("DimensionMismatch",
                         std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

}  // namespace

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::dagger() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

cplx ComplexMatrix::trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const cplx& v : a_) m = std::max(m, std::abs(v));
    return m;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const cplx& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

double ComplexMatrix::hermiticity_error() const {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
}

bool ComplexMatrix::all_finite() const {
    for (const cplx& v : a_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    check_same_shape(*this, o, "add");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    check_same_shape(*this, o, "subtract");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (cplx& v : a_) v *= s;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw InputError("DimensionMismatch", "matmul: " + std::to_string(a.cols()) +
                                                  " inner vs " + std::to_string(b.rows()));
    }
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

double PureState::norm() const {
    double s = 0.0;
    for (const cplx& v : amp) s += std::norm(v);
    return std::sqrt(s);
}

PureState PureState::normalized() const {
    const double n = norm();
    PureState out(dim());
    if (n == 0.0) return out;
    for (std::size_t i = 0; i < dim(); ++i) out.amp[i] = amp[i] / n;
    return out;
}

void validate_pure_state(const PureState& s) {
    if (s.dim() == 0) throw InputError("DimensionMismatch", "empty state vector");
    const double n = s.norm();
    if (std::abs(n - 1.0) > 1e-12) {
        throw InputError("ValidationError",
                         "state norm " + std::to_string(n) + " deviates from 1 beyond 1e-12");
    }
}

cplx inner(const PureState& a, const PureState& b) {
    if (a.dim() != b.dim())
        throw InputError("DimensionMismatch", "inner product of dims " + std::to_string(a.dim()) +
                                                  " and " + std::to_string(b.dim()));
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
    return s;
}

ComplexMatrix outer(const PureState& a) {
    ComplexMatrix m(a.dim(), a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) m(i, j) = a.amp[i] * std::conj(a.amp[j]);
    return m;
}

PureState apply(const ComplexMatrix& m, const PureState& s) {
    if (m.cols() != s.dim())
        throw InputError("DimensionMismatch", "apply: matrix cols " + std::to_string(m.cols()) +
                                                  " vs state dim " + std::to_string(s.dim()));
    PureState out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * s.amp[j];
        out.amp[i] = acc;
    }
    return out;
}

double expectation_value(const ComplexMatrix& m, const PureState& s) {
    if (m.rows() != s.dim() || m.cols() != s.dim())
        throw InputError("DimensionMismatch", "expectation_value: matrix " + std::to_string(m.rows()) +
                                                  "x" + std::to_string(m.cols()) + " vs state dim " +
                                                  std::to_string(s.dim()));
    cplx acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const cplx cb = std::conj(s.amp[i]);
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) acc += cb * m(i, j) * s.amp[j];
    }
    return acc.real();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() * b.rows() > kMaxDim || a.cols() * b.cols() > kMaxDim) {
        throw InputError("SizeCap", "kron result " + std::to_string(a.rows() * b.rows()) + "x" +
                                        std::to_string(a.cols() * b.cols()) + " exceeds dimension cap " +
                                        std::to_string(kMaxDim));
    }
    ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == 0.0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return c;
}

PureState kron(const PureState& a, const PureState& b) {
    if (a.dim() * b.dim() > kMaxDim)
        throw InputError("SizeCap", "kron state dim " + std::to_string(a.dim() * b.dim()) +
                                        " exceeds dimension cap " + std::to_string(kMaxDim));
    PureState out(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) out.amp[i * b.dim() + j] = a.amp[i] * b.amp[j];
    return out;
}

namespace {

double offdiag_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += 2.0 * std::norm(a(i, j));
    return std::sqrt(s);
}

EighResult jacobi_impl(const ComplexMatrix& h, bool want_vectors) {
    if (h.rows() != h.cols())
        throw InputError("DimensionMismatch", "eigh of non-square " + std::to_string(h.rows()) +
                                                  "x" + std::to_string(h.cols()) + " matrix");
    const std::size_t n = h.rows();
    // Work on the Hermitian average; stored matrices may carry ~eps asymmetry.
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));

    ComplexMatrix v;
    if (want_vectors) v = ComplexMatrix::identity(n);

    constexpr double kTol = 1e-13;
    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    while (offdiag_norm(a) >= kTol) {
        if (sweep++ >= kMaxSweeps) {
            throw ConsistencyError("NoConvergence",
                                   "Jacobi off-diagonal norm " + std::to_string(offdiag_norm(a)) +
                                       " after " + std::to_string(kMaxSweeps) + " sweeps");
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = std::abs(a(p, q));
                if (apq == 0.0) continue;
                // Unitary plane rotation annihilating a_pq; the stable root of
                // t^2 + 2*tau*t - 1 = 0 keeps |t| <= 1.
                const cplx u = a(p, q) / apq;
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(tau * tau + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const cplx su = s * u;
                const cplx sub = s * std::conj(u);
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - sub * aiq;
                    a(i, q) = su * aip + c * aiq;
                    a(p, i) = std::conj(a(i, p));
                    a(q, i) = std::conj(a(i, q));
                }
                a(p, p) = a(p, p).real() - t * apq;
                a(q, q) = a(q, q).real() + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                if (want_vectors) {
                    for (std::size_t i = 0; i < n; ++i) {
                        const cplx vip = v(i, p), viq = v(i, q);
                        v(i, p) = c * vip - sub * viq;
                        v(i, q) = su * vip + c * viq;
                    }
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

    EighResult r;
    r.eigenvalues.resize(n);
    for (std::size_t k = 0; k < n; ++k) r.eigenvalues[k] = a(order[k], order[k]).real();
    if (want_vectors) {
        r.eigenvectors = ComplexMatrix(n, n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) r.eigenvectors(i, k) = v(i, order[k]);
    }
    return r;
}

}  // namespace

EighResult jacobi_eigh(const ComplexMatrix& hermitian) { return jacobi_impl(hermitian, true); }

std::vector<double> jacobi_eigenvalues(const ComplexMatrix& hermitian) {
    return jacobi_impl(hermitian, false).eigenvalues;
}

}
