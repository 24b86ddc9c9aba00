#include "lacc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "lacc/entropy.hpp"
#include "lacc/errors.hpp"
#include "lacc/haar.hpp"
#include "lacc/parallel.hpp"

namespace lacc {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Search {
    double value = 0.0;
    std::vector<double> params;
    std::size_t evals = 0;
    bool converged = false;
};

// Compass pattern search: probe +-h along every coordinate, move to the best
// improving probe, halve h when none improves, stop at h < 1e-4.  A spent
// budget returns the best point so far with converged = false.
Search compass_search(const std::function<double(const std::vector<double>&)>& f,
                      std::vector<double> start, std::size_t max_evals) {
    Search s;
    s.params = std::move(start);
    s.value = f(s.params);
    s.evals = 1;
    double h = 0.4;
    std::vector<double> probe;
    while (h >= 1e-4) {
        double best_v = s.value;
        std::size_t best_i = 0;
        double best_step = 0.0;
        bool improved = false;
        for (std::size_t i = 0; i < s.params.size(); ++i) {
            for (const double sign : {1.0, -1.0}) {
                if (s.evals >= max_evals) {
                    if (improved) {
                        s.params[best_i] += best_step;
                        s.value = best_v;
                    }
                    return s;
                }
                probe = s.params;
                probe[i] += sign * h;
                const double v = f(probe);
                ++s.evals;
                if (v > best_v) {
                    best_v = v;
                    best_i = i;
                    best_step = sign * h;
                    improved = true;
                }
            }
        }
        if (improved) {
            s.params[best_i] += best_step;
            s.value = best_v;
        } else {
            h *= 0.5;
        }
    }
    s.converged = true;
    return s;
}

OptimizationResult multi_restart(const std::function<double(const std::vector<double>&)>& f,
                                 const std::function<std::vector<double>(std::size_t)>& start_at,
                                 std::size_t budget) {
    constexpr std::size_t kRestarts = 32;
    OptimizationResult res;
    bool all_converged = true;
    std::size_t remaining = budget;
    for (std::size_t r = 0; r < kRestarts && remaining > 0; ++r) {
        // every restart may draw on the whole leftover budget, so a
        // non-converged result always means the budget truly ran out
        const Search s = compass_search(f, start_at(r), remaining);
        remaining -= std::min(s.evals, remaining);
        res.evals_used += s.evals;
        ++res.restarts_used;
        all_converged = all_converged && s.converged;
        if (res.restarts_used == 1 || s.value > res.value) {
            res.value = s.value;
            res.params = s.params;
        }
    }
    res.converged = all_converged && res.restarts_used == kRestarts;
    res.value = std::max(res.value, 0.0);
    return res;
}

}  // namespace

BasisAverage average_product_basis_mi(const Ensemble& e, std::size_t n_bases, const Rng& rng,
                                      int threads) {
    if (n_bases == 0) throw InputError("ValidationError", "need at least one basis draw");
    std::vector<Welford> acc(kStreams);
    run_streams(n_bases, threads, [&](std::size_t s, std::size_t b, std::size_t end) {
        Rng stream_rng = rng.split(s);
        Welford w;
        for (std::size_t i = b; i < end; ++i) {
            const auto basis = sample_local_product_basis(e.dims, stream_rng);
            w.add(mutual_information_of_basis(e, basis));
        }
        acc[s] = w;
    });
    Welford total;
    for (const Welford& w : acc) total.merge(w);
    BasisAverage out;
    out.mean = total.mean;
    out.std_error = total.std_error();
    out.n_bases = n_bases;
    return out;
}

ComplexMatrix givens_unitary(std::size_t dim, const std::vector<double>& angles) {
    if (dim == 0) throw InputError("DimensionMismatch", "dimension must be positive");
    if (angles.size() != dim * (dim - 1))
        throw InputError("DimensionMismatch", "need " + std::to_string(dim * (dim - 1)) +
                                                  " angles for dimension " + std::to_string(dim) +
                                                  ", got " + std::to_string(angles.size()));
    ComplexMatrix u = ComplexMatrix::identity(dim);
    std::size_t k = 0;
    for (std::size_t i = 0; i + 1 < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) {
            const double c = std::cos(angles[k]);
            const double s = std::sin(angles[k]);
            const cplx phase(std::cos(angles[k + 1]), std::sin(angles[k + 1]));
            k += 2;
            // right-multiply by the two-level rotation: only columns i, j move
            for (std::size_t r = 0; r < dim; ++r) {
                const cplx ui = u(r, i), uj = u(r, j);
                u(r, i) = c * ui - s * std::conj(phase) * uj;
                u(r, j) = s * phase * ui + c * uj;
            }
        }
    return u;
}

std::vector<PureState> TwoStepProtocol::alice_basis() const {
    const double c = std::cos(0.5 * alice_theta);
    const double s = std::sin(0.5 * alice_theta);
    const cplx phase(std::cos(alice_phi), std::sin(alice_phi));
    PureState a0(2), a1(2);
    a0.amp = {cplx(c), phase * s};
    a1.amp = {-std::conj(phase) * s, cplx(c)};
    return {a0, a1};
}

TwoStepProtocol unpack_two_step(const std::vector<double>& params, std::size_t d_b) {
    const std::size_t per_bob = d_b * (d_b - 1);
    if (params.size() != 2 + 2 * per_bob)
        throw InputError("DimensionMismatch", "two-step parameter vector needs " +
                                                  std::to_string(2 + 2 * per_bob) + " entries, got " +
                                                  std::to_string(params.size()));
    TwoStepProtocol p;
    p.alice_theta = params[0];
    p.alice_phi = params[1];
    p.bob_angles.assign(params.begin() + 2, params.end());
    return p;
}

double two_step_mutual_information(const Ensemble& e, const TwoStepProtocol& p) {
    if (e.dims.size() != 2 || e.dims[0] != 2)
        throw InputError("DimensionMismatch", "two-step protocol needs a qubit first party");
    const std::size_t db = e.dims[1];
    const std::size_t per_bob = db * (db - 1);
    const auto alice = p.alice_basis();

    OutcomeTable t;
    t.joint.assign(e.size(), std::vector<double>(2 * db, 0.0));
    for (std::size_t r = 0; r < 2; ++r) {
        const std::vector<double> slice(p.bob_angles.begin() + static_cast<std::ptrdiff_t>(r * per_bob),
                                        p.bob_angles.begin() + static_cast<std::ptrdiff_t>((r + 1) * per_bob));
        const auto bob = basis_from_unitary(givens_unitary(db, slice));
        for (std::size_t y = 0; y < db; ++y) {
            const PureState product = kron(alice[r], bob[y]);
            for (std::size_t x = 0; x < e.size(); ++x)
                t.joint[x][r * db + y] =
                    e.probs[x] * std::max(expectation_value(e.members[x].matrix(), product), 0.0);
        }
    }
    return t.mutual_information();
}

OptimizationResult optimize_two_step_locc(const Ensemble& e, std::size_t budget, const Rng& rng) {
    if (e.dims.size() != 2 || e.dims[0] != 2)
        throw InputError("DimensionMismatch", "two-step protocol needs a qubit first party");
    const std::size_t db = e.dims[1];
    const std::size_t n_params = 2 + 2 * db * (db - 1);
    const auto objective = [&](const std::vector<double>& v) {
        return two_step_mutual_information(e, unpack_two_step(v, db));
    };
    // First half of the restarts sweeps Alice's measurement axis over a fixed
    // 4x4 angle grid with Bob at the computational basis; the rest are random.
    const auto start_at = [&](std::size_t r) {
        std::vector<double> start(n_params, 0.0);
        if (r < 16) {
            start[0] = kPi * (static_cast<double>(r % 4) + 0.5) / 4.0;
            start[1] = 2.0 * kPi * (static_cast<double>(r / 4) + 0.5) / 4.0;
        } else {
            Rng rr = rng.split(100 + r);
            for (double& v : start) v = 2.0 * kPi * rr.uniform();
        }
        return start;
    };
    return multi_restart(objective, start_at, budget);
}

OptimizationResult optimize_global_orthogonal(const Ensemble& e, std::size_t budget, const Rng& rng) {
    const std::size_t dim = e.dim();
    if (dim > 16)
        throw InputError("SizeCap",
                         "global basis search capped at dimension 16, got " + std::to_string(dim));
    const std::size_t n_params = dim * (dim - 1);
    const auto objective = [&](const std::vector<double>& v) {
        return outcome_table(e, basis_from_unitary(givens_unitary(dim, v))).mutual_information();
    };
    const auto start_at = [&](std::size_t r) {
        std::vector<double> start(n_params, 0.0);
        if (r > 0) {
            Rng rr = rng.split(200 + r);
            for (double& v : start) v = 2.0 * kPi * rr.uniform();
        }
        return start;
    };
    return multi_restart(objective, start_at, budget);
}

}
