#include "lacc/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lacc/ensembles.hpp"
#include "lacc/errors.hpp"

namespace lacc {

namespace {

constexpr double kLog2E = 1.4426950408889634;  // 1/ln 2

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

std::vector<double> checked_probabilities(const std::vector<double>& p) {
    std::vector<double> q;
    q.reserve(p.size());
    double sum = 0.0;
    for (double v : p) {
        if (v < -1e-12)
            throw InputError("NegativeProbability", "probability " + std::to_string(v) + " below -1e-12");
        q.push_back(v < 0.0 ? 0.0 : v);
        sum += q.back();
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InputError("ValidationError",
                         "probabilities sum to " + std::to_string(sum) + ", off 1 beyond 1e-9");
    return q;
}

}  // namespace

double shannon_entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : checked_probabilities(p)) h -= xlog2x(v);
    return h;
}

double binary_entropy(double p) { return shannon_entropy({p, 1.0 - p}); }

double von_neumann_entropy(const DensityMatrix& rho) { return shannon_entropy(rho.eigenvalues()); }

namespace {

// Snapping a k-node cluster to its mean costs O(span); leaving it to the
// divided-difference recurrence costs O(eps / span^(k-1)) of roundoff.  The
// two balance at span ~ eps^(1/k); clamp so exact-degeneracy semantics stay
// at 1e-9 and no genuinely spread spectrum is ever collapsed.
double merge_threshold(std::size_t k) {
    constexpr double kLongEps = 1.1e-19;
    return std::clamp(std::pow(kLongEps, 1.0 / static_cast<double>(k)), 1e-9, 1e-5);
}

// Merge [lo, hi) to its mean when the whole span is below the size threshold,
// otherwise split at the widest gap and treat both halves independently.
void merge_clusters(std::vector<double>& lam, std::size_t lo, std::size_t hi) {
    const std::size_t k = hi - lo;
    if (k < 2) return;
    if (lam[hi - 1] - lam[lo] <= merge_threshold(k)) {
        double mean = 0.0;
        for (std::size_t i = lo; i < hi; ++i) mean += lam[i];
        mean /= static_cast<double>(k);
        for (std::size_t i = lo; i < hi; ++i) lam[i] = mean;
        return;
    }
    std::size_t cut = lo + 1;
    for (std::size_t i = lo + 1; i < hi; ++i)
        if (lam[i] - lam[i - 1] > lam[cut] - lam[cut - 1]) cut = i;
    merge_clusters(lam, lo, cut);
    merge_clusters(lam, cut, hi);
}

}  // namespace

double subentropy(const std::vector<double>& spectrum) {
    std::vector<double> lam = checked_probabilities(spectrum);
    const std::size_t d = lam.size();
    if (d == 1) return 0.0;
    std::sort(lam.begin(), lam.end());

    // Group near-coincident nodes so confluence below is detected by exact
    // equality; chains further apart than the largest threshold never merge.
    for (std::size_t i = 0; i < d;) {
        std::size_t j = i + 1;
        while (j < d && lam[j] - lam[j - 1] <= merge_threshold(d)) ++j;
        merge_clusters(lam, i, j);
        i = j;
    }

    // g(x) = x^d log2 x, g(0) = 0.  m-th derivative for x > 0:
    //   (fall_m * x^(d-m) * ln x + c_m * x^(d-m)) / ln 2
    // with fall_m the falling factorial d(d-1)...(d-m+1) and
    // c_{m+1} = (d-m) c_m + fall_m.  All derivatives up to order d-1 vanish
    // at 0.  Extended precision buys three digits of headroom against the
    // cancellation that small unmerged gaps feed into the recurrence.
    std::vector<long double> fall(d), cc(d), fact(d);
    fall[0] = 1.0L;
    cc[0] = 0.0L;
    fact[0] = 1.0L;
    for (std::size_t m = 0; m + 1 < d; ++m) {
        const long double dm = static_cast<long double>(d - m);
        fall[m + 1] = fall[m] * dm;
        cc[m + 1] = dm * cc[m] + fall[m];
        fact[m + 1] = fact[m] * static_cast<long double>(m + 1);
    }
    const long double dd = static_cast<long double>(d);
    auto g = [&](long double x) { return x > 0.0L ? std::pow(x, dd) * std::log2(x) : 0.0L; };
    auto g_deriv = [&](long double x, std::size_t m) {
        if (x <= 0.0L) return 0.0L;  // orders < d only
        const long double xp = std::pow(x, dd - static_cast<long double>(m));
        return (fall[m] * xp * std::log(x) + cc[m] * xp) * static_cast<long double>(kLog2E);
    };

    std::vector<long double> table(d);
    for (std::size_t i = 0; i < d; ++i) table[i] = g(static_cast<long double>(lam[i]));
    for (std::size_t m = 1; m < d; ++m) {
        for (std::size_t i = 0; i + m < d; ++i) {
            const long double gap =
                static_cast<long double>(lam[i + m]) - static_cast<long double>(lam[i]);
            table[i] = (gap == 0.0L) ? g_deriv(lam[i], m) / fact[m]
                                     : (table[i + 1] - table[i]) / gap;
        }
    }
    // Q >= 0 mathematically; rounding can leave a -1e-16 residue.
    return std::max(0.0, -static_cast<double>(table[0]));
}

double subentropy_direct(const std::vector<double>& spectrum) {
    const std::vector<double> lam = checked_probabilities(spectrum);
    // The partial-fraction factors grow like 1/gap^(d-1) and mostly cancel in
    // the sum; extended precision keeps that cancellation below the
    // tolerances this cross-check is held to.
    long double q = 0.0L;
    for (std::size_t k = 0; k < lam.size(); ++k) {
        if (lam[k] <= 0.0) continue;
        const long double x = lam[k];
        long double prod = 1.0L;
        for (std::size_t l = 0; l < lam.size(); ++l)
            if (l != k) prod *= x / (x - static_cast<long double>(lam[l]));
        q -= prod * x * std::log2(x);
    }
    return static_cast<double>(q);
}

double harmonic_log_constant(std::size_t n) {
    double s = 0.0;
    for (std::size_t k = n; k >= 2; --k) s += 1.0 / static_cast<double>(k);
    return kLog2E * s;
}

double OutcomeTable::mutual_information() const {
    double total = 0.0;
    std::size_t n_out = 0;
    for (const auto& row : joint) {
        n_out = std::max(n_out, row.size());
        for (double v : row) {
            if (v < -1e-12)
                throw InputError("NegativeProbability", "joint entry " + std::to_string(v));
            total += std::max(v, 0.0);
        }
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InputError("ValidationError", "joint table sums to " + std::to_string(total));

    std::vector<double> marginal(n_out, 0.0);
    double h_cond = 0.0;  // sum_x p_x H(Y|x), assembled from unnormalized rows
    for (const auto& row : joint) {
        double px = 0.0;
        for (double v : row) px += std::max(v, 0.0);
        for (std::size_t y = 0; y < row.size(); ++y) {
            const double v = std::max(row[y], 0.0);
            marginal[y] += v;
            h_cond -= xlog2x(v);
        }
        h_cond += xlog2x(px);  // -sum v log(v/px) = -sum v log v + px log px
    }
    double h_marg = 0.0;
    for (double v : marginal) h_marg -= xlog2x(v);
    return h_marg - h_cond;
}

OutcomeTable outcome_table(const Ensemble& e, const std::vector<PureState>& basis) {
    OutcomeTable t;
    t.joint.resize(e.size());
    for (std::size_t x = 0; x < e.size(); ++x) {
        t.joint[x].resize(basis.size());
        const ComplexMatrix& m = e.members[x].matrix();
        for (std::size_t y = 0; y < basis.size(); ++y) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < m.rows(); ++i) {
                const cplx cb = std::conj(basis[y].amp[i]);
                if (cb == 0.0) continue;
                for (std::size_t j = 0; j < m.cols(); ++j) acc += cb * m(i, j) * basis[y].amp[j];
            }
            t.joint[x][y] = e.probs[x] * std::max(acc.real(), 0.0);
        }
    }
    return t;
}

double mutual_information_of_basis(const Ensemble& e, const std::vector<PureState>& basis) {
    const std::size_t dim = e.dim();
    if (basis.size() != dim)
        throw InputError("IncompleteBasis", "basis has " + std::to_string(basis.size()) +
                                                " elements for dimension " + std::to_string(dim));
    for (const PureState& b : basis)
        if (b.dim() != dim)
            throw InputError("IncompleteBasis", "basis element dimension mismatch");
    double gram_dev = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j) {
            const cplx g = inner(basis[i], basis[j]);
            gram_dev = std::max(gram_dev, std::abs(g - (i == j ? cplx(1.0) : cplx(0.0))));
        }
    if (gram_dev > 1e-9)
        throw InputError("NonOrthonormal", "Gram deviation " + std::to_string(gram_dev) + " exceeds 1e-9");
    return outcome_table(e, basis).mutual_information();
}

}
