#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace lacc {

using cplx = std::complex<double>;

// Dense row-major complex matrix.  Everything in this project lives in
// Hilbert spaces of dimension <= 4096, so no sparsity or blocking anywhere.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static ComplexMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] bool empty() const { return a_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    [[nodiscard]] ComplexMatrix dagger() const;
    [[nodiscard]] cplx trace() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] double frobenius_norm() const;
    // max_ij |a_ij - conj(a_ji)|, zero for exactly Hermitian input
    [[nodiscard]] double hermiticity_error() const;
    [[nodiscard]] bool all_finite() const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(cplx s);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

// State vector.  Kept as a bare struct: normalization is a boundary-level
// contract (validate where data enters), not an invariant of every temporary.
struct PureState {
    std::vector<cplx> amp;

    PureState() = default;
    explicit PureState(std::size_t dim) : amp(dim) {}
    PureState(std::initializer_list<cplx> a) : amp(a) {}

    [[nodiscard]] std::size_t dim() const { return amp.size(); }
    [[nodiscard]] double norm() const;
    [[nodiscard]] PureState normalized() const;
};

// Throws InputError if the norm deviates from 1 by more than 1e-12.
void validate_pure_state(const PureState& s);

[[nodiscard]] cplx inner(const PureState& a, const PureState& b);   // <a|b>
[[nodiscard]] ComplexMatrix outer(const PureState& a);              // |a><a|
[[nodiscard]] PureState apply(const ComplexMatrix& m, const PureState& s);
[[nodiscard]] double expectation_value(const ComplexMatrix& m, const PureState& s);  // Re <s|m|s>

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
PureState kron(const PureState& a, const PureState& b);

struct EighResult {
    std::vector<double> eigenvalues;  // descending
    ComplexMatrix eigenvectors;       // columns match eigenvalue order
};

// Cyclic complex Jacobi diagonalization of a Hermitian matrix.  Converges
// when the off-diagonal Frobenius norm drops below 1e-13; throws
// ConsistencyError("NoConvergence") after 100 sweeps.
EighResult jacobi_eigh(const ComplexMatrix& hermitian);
// Same iteration without accumulating eigenvectors (hot path for spectra).
std::vector<double> jacobi_eigenvalues(const ComplexMatrix& hermitian);

}
