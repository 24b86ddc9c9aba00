#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lacc/complexmat.hpp"
#include "lacc/densmat.hpp"
#include "lacc/rng.hpp"

namespace lacc {

// Gauss-Legendre nodes and weights on [-1, 1]; weights sum to 2.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n);

// Deterministic integration grid over qubit pure states: Gauss-Legendre in
// cos(theta), uniform trapezoid in phi.  Weights sum to 1, so sums over the
// grid approximate the normalized Haar average.
struct QuadratureGrid {
    struct Node {
        PureState state;  // cos(t/2)|0> + e^{i phi} sin(t/2)|1>
        double weight;
        double theta;
        double phi;
    };
    std::vector<Node> nodes;
    std::size_t n_theta = 0, n_phi = 0;
};

QuadratureGrid bloch_grid(std::size_t n_theta, std::size_t n_phi);

// Normalized vector of complex standard normals: exactly Haar on the sphere.
PureState sample_pure_state(std::size_t dim, Rng& rng);

// Gram-Schmidt of a Ginibre matrix; the positive-real R diagonal this
// produces is the phase convention that makes the distribution Haar.
ComplexMatrix sample_haar_unitary(std::size_t dim, Rng& rng);

// Complete product basis {U|j> (x) V|k> (x) ...} from independent local Haar
// unitaries, one per party; element order is the row-major index convention.
std::vector<PureState> sample_local_product_basis(const std::vector<std::size_t>& dims, Rng& rng);

// columns(u) tensor columns(v), for externally supplied local bases
std::vector<PureState> product_basis_from(const ComplexMatrix& u, const ComplexMatrix& v);

// The columns of a unitary as a list of states.
std::vector<PureState> basis_from_unitary(const ComplexMatrix& u);

// Full-rank random state G G^dag / tr, G Ginibre.
DensityMatrix sample_density_matrix(std::vector<std::size_t> dims, Rng& rng);

}
