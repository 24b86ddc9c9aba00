#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lacc/complexmat.hpp"
#include "lacc/densmat.hpp"
#include "lacc/rng.hpp"

namespace lacc {

// Finite labeled mixture {p_x, rho_x} on a fixed multiparty Hilbert space.
struct Ensemble {
    std::string label;
    std::vector<std::size_t> dims;
    std::vector<double> probs;
    std::vector<DensityMatrix> members;

    [[nodiscard]] std::size_t size() const { return probs.size(); }
    [[nodiscard]] std::size_t dim() const;
    [[nodiscard]] ComplexMatrix average() const;       // sum p_x rho_x, raw
    [[nodiscard]] DensityMatrix average_state() const; // same, validated
};

// Mixture of (not necessarily orthogonal) pure states; the seed object for
// the copy-string and distillation constructions.
struct PureDecomposition {
    std::string label;
    std::vector<std::size_t> dims;
    std::vector<double> probs;
    std::vector<PureState> states;

    [[nodiscard]] std::size_t size() const { return probs.size(); }
};

// JSON I/O.  Schema: {"label": str, "dims": [int...], "members":
// [{"prob": num, "matrix": [[[re,im],...],...]} | {"prob": num, "ket": [[re,im],...]}]}.
// Ket members become projectors at parse time.
Ensemble parse_ensemble(const nlohmann::json& doc);
Ensemble load_ensemble_file(const std::string& path);
nlohmann::json serialize_ensemble(const Ensemble& e);

// Same schema restricted to ket members.
PureDecomposition parse_decomposition(const nlohmann::json& doc);
PureDecomposition load_decomposition_file(const std::string& path);

// Member-wise partial trace onto one party.
Ensemble marginal_ensemble(const Ensemble& e, std::size_t party);
// dims (dA,dB) -> (dB,dA) with members reordered accordingly
Ensemble swap_ensemble_parties(const Ensemble& e);

// The three Bell states (|00>+|11>)/sqrt2, (|00>-|11>)/sqrt2, (|01>+|10>)/sqrt2,
// equal probabilities.
Ensemble bell3_ensemble();
// |00>,|01>,|10>,|11>,|++>,|+->,|-+>,|--> with probability 1/8 each.
Ensemble product8_ensemble();
// Four orthonormal two-qubit states built from Bloch-like parameters
// a = sin(t/2)cos(p/2), b = sin(t/2)sin(p/2), c = cos(t/2) in the
// {|00>,|11>,|10>} coordinates, plus |01>; equal probabilities.
// Throws DegenerateParameters when a = b = c.
Ensemble e1_ensemble(double theta, double phi);

PureDecomposition bell_diagonal_decomposition(double p0, double p1, double p2, double p3);
PureDecomposition pure_product_decomposition();

// Mixture of m-fold tensor strings |psi_i1> x ... x |psi_im> with
// probabilities p_i1...p_im, regrouped so all A factors form one party and
// all B factors the other.  Ket-level; cheap even at large m.
std::vector<std::pair<double, PureState>> string_kets(const PureDecomposition& d, std::size_t m);
// party dims of the regrouped strings: (dA^m, dB^m)
std::vector<std::size_t> string_dims(const PureDecomposition& d, std::size_t m);
// Materialized ensemble of string projectors; throws SizeCap when the member
// matrices would not fit at desk scale.
Ensemble string_ensemble(const PureDecomposition& d, std::size_t m);

// Compress party A through a 2 x dA isometry V: members (V x I) rho (V x I)^dag,
// renormalized, probabilities reweighted by surviving trace mass; members with
// weight below 1e-12 are dropped.
Ensemble project_to_2xn(const Ensemble& e, const ComplexMatrix& isometry);
// default isometry: first two computational basis vectors of A
ComplexMatrix default_isometry(std::size_t da);

// Seeded fixture: mixed members from Ginibre states, Dirichlet-ish probabilities.
Ensemble random_ensemble(const std::vector<std::size_t>& dims, std::size_t n_members, Rng& rng);

}
