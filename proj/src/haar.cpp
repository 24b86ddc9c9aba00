#include "lacc/haar.hpp"

#include <cmath>
#include <string>

#include "lacc/errors.hpp"

namespace lacc {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n) {
    if (n < 1) throw InputError("ValidationError", "Gauss-Legendre order must be >= 1");
    std::vector<double> x(n), w(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess
        double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                const double jj = static_cast<double>(j);
                p0 = ((2.0 * jj + 1.0) * z * p1 - jj * p2) / (jj + 1.0);
            }
            pp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    return {x, w};
}

QuadratureGrid bloch_grid(std::size_t n_theta, std::size_t n_phi) {
    if (n_theta < 2 || n_phi < 2)
        throw InputError("ValidationError", "Bloch grid needs at least 2 nodes per angle");
    auto [x, w] = gauss_legendre(n_theta);
    QuadratureGrid grid;
    grid.n_theta = n_theta;
    grid.n_phi = n_phi;
    grid.nodes.reserve(n_theta * n_phi);
    for (std::size_t i = 0; i < n_theta; ++i) {
        const double theta = std::acos(x[i]);
        const double c = std::cos(0.5 * theta);
        const double s = std::sin(0.5 * theta);
        const double weight = w[i] / (2.0 * static_cast<double>(n_phi));
        for (std::size_t j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n_phi);
            QuadratureGrid::Node node;
            node.state = PureState{cplx(c, 0.0), cplx(s * std::cos(phi), s * std::sin(phi))};
            node.weight = weight;
            node.theta = theta;
            node.phi = phi;
            grid.nodes.push_back(std::move(node));
        }
    }
    return grid;
}

PureState sample_pure_state(std::size_t dim, Rng& rng) {
    if (dim == 0) throw InputError("DimensionMismatch", "dimension 0 state requested");
    PureState s(dim);
    double n = 0.0;
    do {
        for (std::size_t i = 0; i < dim; ++i) s.amp[i] = rng.complex_normal();
        n = s.norm();
    } while (n == 0.0);
    for (cplx& a : s.amp) a /= n;
    return s;
}

ComplexMatrix sample_haar_unitary(std::size_t dim, Rng& rng) {
    if (dim == 0) throw InputError("DimensionMismatch", "dimension 0 unitary requested");
    ComplexMatrix g(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) g(i, j) = rng.complex_normal();
    // modified Gram-Schmidt over columns
    for (std::size_t k = 0; k < dim; ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            cplx proj = 0.0;
            for (std::size_t i = 0; i < dim; ++i) proj += std::conj(g(i, j)) * g(i, k);
            for (std::size_t i = 0; i < dim; ++i) g(i, k) -= proj * g(i, j);
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) nrm += std::norm(g(i, k));
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < dim; ++i) g(i, k) /= nrm;
    }
    return g;
}

std::vector<PureState> sample_local_product_basis(const std::vector<std::size_t>& dims, Rng& rng) {
    if (dims.empty()) throw InputError("DimensionMismatch", "no parties");
    std::vector<ComplexMatrix> locals;
    locals.reserve(dims.size());
    std::size_t total = 1;
    for (std::size_t d : dims) {
        locals.push_back(sample_haar_unitary(d, rng));
        total *= d;
    }
    std::vector<PureState> basis;
    basis.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        // decode the row-major outcome index into per-party column choices
        std::vector<std::size_t> digits(dims.size());
        std::size_t rem = idx;
        for (std::size_t p = dims.size(); p-- > 0;) {
            digits[p] = rem % dims[p];
            rem /= dims[p];
        }
        PureState el{cplx(1.0, 0.0)};
        for (std::size_t p = 0; p < dims.size(); ++p) {
            PureState col(dims[p]);
            for (std::size_t i = 0; i < dims[p]; ++i) col.amp[i] = locals[p](i, digits[p]);
            el = kron(el, col);
        }
        basis.push_back(std::move(el));
    }
    return basis;
}

std::vector<PureState> product_basis_from(const ComplexMatrix& u, const ComplexMatrix& v) {
    std::vector<PureState> basis;
    basis.reserve(u.cols() * v.cols());
    for (std::size_t i = 0; i < u.cols(); ++i) {
        PureState a(u.rows());
        for (std::size_t r = 0; r < u.rows(); ++r) a.amp[r] = u(r, i);
        for (std::size_t j = 0; j < v.cols(); ++j) {
            PureState b(v.rows());
            for (std::size_t r = 0; r < v.rows(); ++r) b.amp[r] = v(r, j);
            basis.push_back(kron(a, b));
        }
    }
    return basis;
}

std::vector<PureState> basis_from_unitary(const ComplexMatrix& u) {
    std::vector<PureState> basis(u.cols(), PureState(u.rows()));
    for (std::size_t y = 0; y < u.cols(); ++y)
        for (std::size_t i = 0; i < u.rows(); ++i) basis[y].amp[i] = u(i, y);
    return basis;
}

DensityMatrix sample_density_matrix(std::vector<std::size_t> dims, Rng& rng) {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    ComplexMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
    ComplexMatrix m = g * g.dagger();
    m *= cplx(1.0 / m.trace().real(), 0.0);
    return DensityMatrix(std::move(m), std::move(dims));
}

}
