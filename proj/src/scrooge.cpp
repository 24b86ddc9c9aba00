#include "lacc/scrooge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lacc/errors.hpp"
#include "lacc/haar.hpp"
#include "lacc/parallel.hpp"

namespace lacc {

namespace {

constexpr double kSupportEps = 1e-12;

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

double scrooge_density(const std::vector<double>& x, const std::vector<double>& lambda) {
    if (x.size() != lambda.size())
        throw InputError("DimensionMismatch", "point has " + std::to_string(x.size()) +
                                                  " coordinates, spectrum " +
                                                  std::to_string(lambda.size()));
    double sum = 0.0;
    for (double v : x) {
        if (v < -1e-12)
            throw InputError("NegativeProbability", "coordinate " + std::to_string(v));
        sum += std::max(v, 0.0);
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InputError("ValidationError", "coordinates sum to " + std::to_string(sum));

    std::size_t support = 0;
    double log_product = 0.0, ratio = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (lambda[i] > kSupportEps) {
            ++support;
            log_product += std::log(lambda[i]);
            ratio += std::max(x[i], 0.0) / lambda[i];
        } else if (x[i] > 1e-12) {
            throw InputError("SupportMismatch", "coordinate " + std::to_string(i) +
                                                    " carries mass " + std::to_string(x[i]) +
                                                    " outside the spectrum's support");
        }
    }
    if (support == 0) throw InputError("ValidationError", "spectrum has empty support");
    const double n = static_cast<double>(support);
    return std::exp(std::lgamma(n + 1.0) - log_product -
                    (n + 1.0) * std::log(ratio));
}

ScroogeSample sample_scrooge(const DensityMatrix& rho, std::size_t n_samples, const Rng& rng,
                             int threads) {
    if (n_samples < 1) throw InputError("ValidationError", "need at least one sample");
    const EighResult eig = rho.eigh();
    const std::size_t dim = rho.dim();
    std::size_t support = 0;
    while (support < dim && eig.eigenvalues[support] > kSupportEps) ++support;
    if (support == 0) throw InputError("ValidationError", "state has empty support");

    std::vector<double> root_lam(support);
    for (std::size_t k = 0; k < support; ++k) root_lam[k] = std::sqrt(eig.eigenvalues[k]);

    ScroogeSample out{std::vector<PureState>(n_samples, PureState(dim)),
                      std::vector<double>(n_samples, 0.0), rho, rng.seed(), support};

    run_streams(n_samples, threads, [&](std::size_t s, std::size_t begin, std::size_t end) {
        Rng stream_rng = rng.split(s);
        std::vector<cplx> z(support);
        for (std::size_t i = begin; i < end; ++i) {
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (cplx& v : z) {
                    v = stream_rng.complex_normal();
                    norm2 += std::norm(v);
                }
            } while (norm2 == 0.0);
            // <z|rho|z>; over norm2 it is the weight <phi|rho|phi>, and its
            // square root normalizes the distorted state rho^(1/2)|phi>
            double distorted = 0.0;
            for (std::size_t k = 0; k < support; ++k)
                distorted += eig.eigenvalues[k] * std::norm(z[k]);
            const double scale = 1.0 / std::sqrt(distorted);
            // |s> = rho^(1/2)|phi> renormalized, mapped back from the eigenbasis
            PureState& state = out.states[i];
            for (std::size_t j = 0; j < dim; ++j) {
                cplx acc = 0.0;
                for (std::size_t k = 0; k < support; ++k)
                    acc += eig.eigenvectors(j, k) * (root_lam[k] * z[k] * scale);
                state.amp[j] = acc;
            }
            out.weights[i] = distorted / norm2;
        }
    });

    double total = 0.0;
    for (double w : out.weights) total += w;
    for (double& w : out.weights) w /= total;
    return out;
}

namespace {

// I_M of the weighted sample against one basis, plus the even/odd half-sample
// values, in a single pass.
struct BasisMi {
    double full = 0.0;
    double even = 0.0;
    double odd = 0.0;
};

BasisMi sample_basis_mi(const ScroogeSample& s, const std::vector<PureState>& basis,
                        double even_mass, double odd_mass) {
    const std::size_t n_out = basis.size();
    std::vector<double> marg(n_out, 0.0), marg_e(n_out, 0.0), marg_o(n_out, 0.0);
    double cond = 0.0, cond_e = 0.0, cond_o = 0.0;
    std::vector<double> row(n_out);
    for (std::size_t x = 0; x < s.states.size(); ++x) {
        const double w = s.weights[x];
        double px = 0.0;
        for (std::size_t y = 0; y < n_out; ++y) {
            const double v = w * std::norm(inner(basis[y], s.states[x]));
            row[y] = v;
            px += v;
        }
        for (std::size_t y = 0; y < n_out; ++y) marg[y] += row[y];
        for (std::size_t y = 0; y < n_out; ++y) cond -= xlog2x(row[y]);
        cond += xlog2x(px);
        const bool even = (x % 2 == 0);
        const double mass = even ? even_mass : odd_mass;
        if (mass <= 0.0) continue;
        std::vector<double>& half_marg = even ? marg_e : marg_o;
        double& half_cond = even ? cond_e : cond_o;
        for (std::size_t y = 0; y < n_out; ++y) half_marg[y] += row[y] / mass;
        for (std::size_t y = 0; y < n_out; ++y) half_cond -= xlog2x(row[y] / mass);
        half_cond += xlog2x(px / mass);
    }
    BasisMi mi;
    for (std::size_t y = 0; y < n_out; ++y) mi.full -= xlog2x(marg[y]);
    mi.full -= cond;
    for (std::size_t y = 0; y < n_out; ++y) mi.even -= xlog2x(marg_e[y]);
    mi.even -= cond_e;
    for (std::size_t y = 0; y < n_out; ++y) mi.odd -= xlog2x(marg_o[y]);
    mi.odd -= cond_o;
    return mi;
}

}  // namespace

ConstancyStats constancy_check(const ScroogeSample& s, std::size_t n_bases, const Rng& rng,
                               ScroogeBasisMode mode, int threads) {
    if (n_bases == 0) throw InputError("ValidationError", "need at least one basis draw");
    double even_mass = 0.0, odd_mass = 0.0;
    for (std::size_t x = 0; x < s.weights.size(); ++x)
        (x % 2 == 0 ? even_mass : odd_mass) += s.weights[x];

    std::vector<BasisMi> results(n_bases);
    const std::vector<std::size_t>& dims = s.source.dims();
    run_streams(n_bases, threads, [&](std::size_t stream, std::size_t begin, std::size_t end) {
        Rng stream_rng = rng.split(stream);
        for (std::size_t b = begin; b < end; ++b) {
            const std::vector<PureState> basis =
                mode == ScroogeBasisMode::product
                    ? sample_local_product_basis(dims, stream_rng)
                    : basis_from_unitary(sample_haar_unitary(s.source.dim(), stream_rng));
            results[b] = sample_basis_mi(s, basis, even_mass, odd_mass);
        }
    });

    ConstancyStats stats;
    stats.per_basis.reserve(n_bases);
    Welford mean;
    double lo = results[0].full, hi = results[0].full, delta2 = 0.0;
    for (const BasisMi& r : results) {
        stats.per_basis.push_back(r.full);
        mean.add(r.full);
        lo = std::min(lo, r.full);
        hi = std::max(hi, r.full);
        const double d = r.even - r.odd;
        delta2 += d * d;
    }
    stats.mean = mean.mean;
    stats.std_error = mean.std_error();
    stats.spread = hi - lo;
    const bool have_halves = even_mass > 0.0 && odd_mass > 0.0;
    stats.discretization_sigma =
        have_halves ? 0.5 * std::sqrt(delta2 / static_cast<double>(n_bases)) : 0.0;
    stats.constant_within_noise = stats.spread <= 8.0 * stats.discretization_sigma + 1e-9;
    return stats;
}

Ensemble scrooge_to_ensemble(const ScroogeSample& s) {
    Ensemble e;
    e.label = "scrooge";
    e.dims = s.source.dims();
    e.probs = s.weights;
    e.members.reserve(s.states.size());
    for (const PureState& st : s.states)
        e.members.push_back(DensityMatrix::from_pure(st, e.dims));
    return e;
}

}
