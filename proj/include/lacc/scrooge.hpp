#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lacc/complexmat.hpp"
#include "lacc/densmat.hpp"
#include "lacc/ensembles.hpp"
#include "lacc/rng.hpp"

namespace lacc {

// Simplex density of the rho-averaged ensemble over squared amplitudes in the
// eigenbasis: N! / (lambda_1...lambda_N (sum_i x_i/lambda_i)^(N+1)), with
// everything restricted to the support of the spectrum.  Mass requested off
// the support raises InputError("SupportMismatch").
double scrooge_density(const std::vector<double>& x, const std::vector<double>& lambda);

// Weighted draw from the rho-averaged ensemble: |s> = rho^(1/2)|phi> up to
// normalization for Haar |phi> on the support, importance weight <phi|rho|phi>.
struct ScroogeSample {
    std::vector<PureState> states;  // in the original computational basis
    std::vector<double> weights;    // normalized to sum 1
    DensityMatrix source;
    std::uint64_t seed = 0;
    std::size_t support_dim = 0;
};

ScroogeSample sample_scrooge(const DensityMatrix& rho, std::size_t n_samples, const Rng& rng,
                             int threads = 1);

enum class ScroogeBasisMode { product, global };

struct ConstancyStats {
    double mean = 0.0;                  // per-basis I_M averaged over bases, bits
    double std_error = 0.0;             // of the mean, over bases
    double spread = 0.0;                // max - min per-basis I_M
    double discretization_sigma = 0.0;  // finite-sample noise scale from half-sample splits
    bool constant_within_noise = false; // spread explained by discretization noise
    std::vector<double> per_basis;
};

// I_M of the weighted sample ensemble over random complete bases (product or
// global).  Each basis also gets an even/odd half-sample split; the rms
// half-delta calibrates how much spread the discretization alone produces.
ConstancyStats constancy_check(const ScroogeSample& s, std::size_t n_bases, const Rng& rng,
                               ScroogeBasisMode mode, int threads = 1);

// The weighted sample as a first-class ensemble (members become projectors);
// intended for modest sample sizes.
Ensemble scrooge_to_ensemble(const ScroogeSample& s);

}
