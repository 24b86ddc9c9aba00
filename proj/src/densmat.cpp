#include "lacc/densmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lacc/errors.hpp"

namespace lacc {

namespace {

std::size_t product_of(const std::vector<std::size_t>& dims) {
    std::size_t p = 1;
    for (std::size_t d : dims) p *= d;
    return p;
}

void check_dims(const ComplexMatrix& m, const std::vector<std::size_t>& dims) {
    if (dims.empty()) throw InputError("DimensionMismatch", "empty dims list");
    for (std::size_t d : dims)
        if (d == 0) throw InputError("DimensionMismatch", "zero party dimension");
    const std::size_t n = product_of(dims);
    if (m.rows() != m.cols() || m.rows() != n) {
        throw InputError("DimensionMismatch",
                         "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                             " but dims multiply to " + std::to_string(n));
    }
    if (n > 4096) throw InputError("SizeCap", "total dimension " + std::to_string(n) + " exceeds 4096");
}

// Accumulation noise floor: below this, "renormalizing" would only churn bits.
double trace_noise_floor(std::size_t n) {
    return 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n);
}

}  // namespace

DensityMatrix validate_density_matrix(ComplexMatrix m, std::vector<std::size_t> dims) {
    return DensityMatrix(std::move(m), std::move(dims));
}

DensityMatrix::DensityMatrix(ComplexMatrix m, std::vector<std::size_t> dims)
    : dims_(std::move(dims)), m_(std::move(m)) {
    check_dims(m_, dims_);
    if (!m_.all_finite()) throw InputError("ValidationError", "matrix has non-finite entries");

    const double herm = m_.hermiticity_error();
    if (herm > 1e-10)
        throw InputError("NonHermitian", "hermiticity deviation " + std::to_string(herm) + " exceeds 1e-10");

    const double tr = m_.trace().real();
    const double tr_dev = std::abs(tr - 1.0);
    if (tr_dev > 1e-10)
        throw InputError("TraceDeviation", "trace " + std::to_string(tr) + " deviates from 1 beyond 1e-10");

    const auto evals = jacobi_eigenvalues(m_);
    const double min_eig = evals.back();
    if (min_eig < -1e-10)
        throw InputError("NegativeEigenvalue",
                         "smallest eigenvalue " + std::to_string(min_eig) + " below -1e-10");

    // Repair only when something is genuinely off; clean input stays untouched.
    if (min_eig < -1e-14) {
        EighResult full = jacobi_eigh(m_);
        double clamped_trace = 0.0;
        for (double& ev : full.eigenvalues) {
            if (ev < 0.0) ev = 0.0;
            clamped_trace += ev;
        }
        ComplexMatrix rebuilt(dim(), dim());
        for (std::size_t k = 0; k < dim(); ++k) {
            const double lam = full.eigenvalues[k] / clamped_trace;
            if (lam == 0.0) continue;
            for (std::size_t i = 0; i < dim(); ++i)
                for (std::size_t j = 0; j < dim(); ++j)
                    rebuilt(i, j) += lam * full.eigenvectors(i, k) * std::conj(full.eigenvectors(j, k));
        }
        m_ = std::move(rebuilt);
    } else if (tr_dev > trace_noise_floor(dim())) {
        m_ *= cplx(1.0 / tr, 0.0);
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi, std::vector<std::size_t> dims) {
    validate_pure_state(psi);
    DensityMatrix d;
    d.dims_ = std::move(dims);
    d.m_ = outer(psi);
    check_dims(d.m_, d.dims_);
    return d;
}

DensityMatrix DensityMatrix::maximally_mixed(std::vector<std::size_t> dims) {
    DensityMatrix d;
    d.dims_ = std::move(dims);
    const std::size_t n = product_of(d.dims_);
    if (n == 0 || n > 4096) throw InputError("SizeCap", "bad total dimension " + std::to_string(n));
    d.m_ = ComplexMatrix::identity(n);
    d.m_ *= cplx(1.0 / static_cast<double>(n), 0.0);
    return d;
}

std::vector<double> DensityMatrix::eigenvalues() const {
    auto evals = jacobi_eigenvalues(m_);
    for (double& e : evals) e = std::clamp(e, 0.0, 1.0);
    return evals;
}

EighResult DensityMatrix::eigh() const {
    EighResult r = jacobi_eigh(m_);
    for (double& e : r.eigenvalues) e = std::clamp(e, 0.0, 1.0);
    return r;
}

double DensityMatrix::purity() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = 0; j < dim(); ++j) s += std::norm(m_(i, j));
    return s;
}

DensityMatrix DensityMatrix::partial_trace(std::size_t keep) const {
    if (dims_.size() != 2)
        throw InputError("BadPartyIndex", "partial trace needs a bipartite state, have " +
                                              std::to_string(dims_.size()) + " parties");
    if (keep >= 2)
        throw InputError("BadPartyIndex", "party index " + std::to_string(keep) + " out of range");
    const std::size_t da = dims_[0], db = dims_[1];
    const std::size_t dk = (keep == 0) ? da : db;
    ComplexMatrix out(dk, dk);
    if (keep == 0) {
        for (std::size_t i = 0; i < da; ++i)
            for (std::size_t j = 0; j < da; ++j) {
                cplx acc = 0.0;
                for (std::size_t b = 0; b < db; ++b) acc += m_(i * db + b, j * db + b);
                out(i, j) = acc;
            }
    } else {
        for (std::size_t i = 0; i < db; ++i)
            for (std::size_t j = 0; j < db; ++j) {
                cplx acc = 0.0;
                for (std::size_t a = 0; a < da; ++a) acc += m_(a * db + i, a * db + j);
                out(i, j) = acc;
            }
    }
    return DensityMatrix(std::move(out), {dk});
}

ConditionalResult conditional_operator(const ComplexMatrix& sigma,
                                       const std::vector<std::size_t>& dims,
                                       const PureState& alpha) {
    if (dims.size() != 2)
        throw InputError("DimensionMismatch", "conditional operator needs a bipartite state");
    const std::size_t da = dims[0], db = dims[1];
    if (sigma.rows() != da * db || sigma.cols() != da * db)
        throw InputError("DimensionMismatch", "matrix dim " + std::to_string(sigma.rows()) +
                                                  " does not match dims product " + std::to_string(da * db));
    if (alpha.dim() != da)
        throw InputError("DimensionMismatch", "projector state dim " + std::to_string(alpha.dim()) +
                                                  " vs party dimension " + std::to_string(da));

    ComplexMatrix cond(db, db);
    for (std::size_t i = 0; i < db; ++i)
        for (std::size_t j = 0; j < db; ++j) {
            cplx acc = 0.0;
            for (std::size_t a = 0; a < da; ++a) {
                const cplx ca = std::conj(alpha.amp[a]);
                if (ca == 0.0) continue;
                for (std::size_t ap = 0; ap < da; ++ap)
                    acc += ca * sigma(a * db + i, ap * db + j) * alpha.amp[ap];
            }
            cond(i, j) = acc;
        }

    ConditionalResult r;
    r.weight = cond.trace().real();
    if (r.weight < 1e-14) {
        r.weight = 0.0;
        r.state = ComplexMatrix(db, db);
        r.defined = false;
        return r;
    }
    cond *= cplx(1.0 / r.weight, 0.0);
    r.state = std::move(cond);
    r.defined = true;
    return r;
}

ComplexMatrix swap_parties(const ComplexMatrix& m, const std::vector<std::size_t>& dims) {
    if (dims.size() != 2) throw InputError("DimensionMismatch", "party swap needs a bipartite state");
    const std::size_t da = dims[0], db = dims[1];
    if (m.rows() != da * db || m.cols() != da * db)
        throw InputError("DimensionMismatch", "matrix dim does not match dims product");
    ComplexMatrix out(da * db, da * db);
    for (std::size_t a = 0; a < da; ++a)
        for (std::size_t b = 0; b < db; ++b)
            for (std::size_t ap = 0; ap < da; ++ap)
                for (std::size_t bp = 0; bp < db; ++bp)
                    out(b * da + a, bp * da + ap) = m(a * db + b, ap * db + bp);
    return out;
}

}
