#include "lacc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "lacc/entropy.hpp"
#include "lacc/errors.hpp"
#include "lacc/haar.hpp"
#include "lacc/parallel.hpp"
#include "lacc/rng.hpp"

namespace lacc {

namespace {

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

nlohmann::json quad_params(const EvalParams& p) {
    return {{"n_theta", p.n_theta}, {"n_phi", p.n_phi}};
}

nlohmann::json mc_params(const EvalParams& p) {
    return {{"n_samples", p.n_samples}, {"seed", p.seed}};
}

void require_bipartite(const std::vector<std::size_t>& dims, const char* what) {
    if (dims.size() != 2)
        throw InputError("DimensionMismatch", std::string(what) + " needs a bipartite system");
}

bool qubit_on_either_side(const std::vector<std::size_t>& dims) {
    return dims.size() == 2 && (dims[0] == 2 || dims[1] == 2);
}

void require_quadrature_supported(const std::vector<std::size_t>& dims) {
    if (dims.size() != 2 || dims[0] != 2)
        throw InputError("QuadratureUnsupported",
                         "the grid route integrates over a qubit first party only; "
                         "swap parties or use the sampled route");
}

// Bloch-node integrand w(alpha) (Q(conditional) - log2 w(alpha)); zero where
// the conditional weight underflows.
double node_term(const ComplexMatrix& sigma, const std::vector<std::size_t>& dims,
                 const PureState& alpha) {
    const ConditionalResult c = conditional_operator(sigma, dims, alpha);
    if (!c.defined) return 0.0;
    return c.weight * (subentropy(jacobi_eigenvalues(c.state)) - std::log2(c.weight));
}

PureState sample_product_state(const std::vector<std::size_t>& dims, Rng& rng) {
    PureState s = sample_pure_state(dims[0], rng);
    for (std::size_t k = 1; k < dims.size(); ++k) s = kron(s, sample_pure_state(dims[k], rng));
    return s;
}

// Weighted node sum over the grid, threaded over fixed streams and merged in
// stream order so the total is independent of the thread count.
double quadrature_sum(const QuadratureGrid& grid, int threads,
                      const std::function<double(const PureState&)>& f) {
    std::vector<double> partial(kStreams, 0.0);
    run_streams(grid.nodes.size(), threads, [&](std::size_t s, std::size_t b, std::size_t e) {
        double acc = 0.0;
        for (std::size_t i = b; i < e; ++i) acc += grid.nodes[i].weight * f(grid.nodes[i].state);
        partial[s] = acc;
    });
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

Welford mc_accumulate(const EvalParams& p, const std::function<double(Rng&)>& sample) {
    if (p.n_samples < 100)
        throw BudgetError("SampleBudgetTooSmall",
                          "need at least 100 samples, got " + std::to_string(p.n_samples));
    const Rng root(p.seed);
    std::vector<Welford> acc(kStreams);
    run_streams(p.n_samples, p.threads, [&](std::size_t s, std::size_t b, std::size_t e) {
        Rng rng = root.split(s);
        Welford w;
        for (std::size_t i = b; i < e; ++i) w.add(sample(rng));
        acc[s] = w;
    });
    Welford total;
    for (const Welford& w : acc) total.merge(w);
    return total;
}

}  // namespace

std::string method_name(Method m) {
    return m == Method::quadrature ? "quadrature" : "monte_carlo";
}

nlohmann::json BoundReport::to_json() const {
    return {{"name", name},           {"value_bits", value}, {"std_error_bits", std_error},
            {"method", method},       {"params", params},    {"flags", flags}};
}

BoundReport holevo_chi(const Ensemble& e) {
    double chi = von_neumann_entropy(e.average_state());
    for (std::size_t x = 0; x < e.size(); ++x) chi -= e.probs[x] * von_neumann_entropy(e.members[x]);
    BoundReport r;
    r.name = "chi";
    r.value = chi;
    r.method = "exact";
    r.params = nlohmann::json::object();
    return r;
}

BoundReport subentropy_gap(const Ensemble& e) {
    double gap = subentropy(e.average_state().eigenvalues());
    for (std::size_t x = 0; x < e.size(); ++x) gap -= e.probs[x] * subentropy(e.members[x].eigenvalues());
    BoundReport r;
    r.name = "lambda";
    r.value = gap;
    r.method = "exact";
    r.params = nlohmann::json::object();
    return r;
}

BoundReport local_chi(const Ensemble& e, double e_out) {
    require_bipartite(e.dims, "chi_L");
    if (e_out < 0.0)
        throw InputError("NegativeEoutTerm",
                         "output entanglement term must be >= 0, got " + std::to_string(e_out));
    const DensityMatrix avg = e.average_state();
    const double marginals =
        von_neumann_entropy(avg.partial_trace(0)) + von_neumann_entropy(avg.partial_trace(1));
    double member_a = 0.0, member_b = 0.0;
    for (std::size_t x = 0; x < e.size(); ++x) {
        member_a += e.probs[x] * von_neumann_entropy(e.members[x].partial_trace(0));
        member_b += e.probs[x] * von_neumann_entropy(e.members[x].partial_trace(1));
    }
    BoundReport r;
    r.name = "chi_L";
    r.value = marginals - std::max(member_a, member_b) - e_out;
    r.method = "exact";
    r.params = {{"e_out", e_out}};
    return r;
}

BoundReport local_subentropy(const DensityMatrix& state, const EvalParams& params) {
    require_bipartite(state.dims(), "Q_L");
    BoundReport r;
    r.name = "Q_L";
    r.method = method_name(params.method);
    if (params.method == Method::quadrature) {
        require_quadrature_supported(state.dims());
        const QuadratureGrid grid = bloch_grid(params.n_theta, params.n_phi);
        const double sum = quadrature_sum(grid, params.threads, [&](const PureState& alpha) {
            return node_term(state.matrix(), state.dims(), alpha);
        });
        r.value = 2.0 * sum + harmonic_log_constant(state.dims()[1]);
        r.params = quad_params(params);
    } else {
        const double d_total = static_cast<double>(state.dim());
        const Welford w = mc_accumulate(params, [&](Rng& rng) {
            const PureState s = sample_product_state(state.dims(), rng);
            return -d_total * xlog2x(std::max(expectation_value(state.matrix(), s), 0.0));
        });
        r.value = w.mean;
        r.std_error = w.std_error();
        r.params = mc_params(params);
    }
    return r;
}

BoundReport local_subentropy_gap(const Ensemble& e, const EvalParams& params) {
    BoundReport r;
    r.name = "lambda_L";
    r.method = method_name(params.method);
    if (!qubit_on_either_side(e.dims)) r.flags.push_back("separable-only");
    const DensityMatrix avg = e.average_state();
    if (params.method == Method::quadrature) {
        require_quadrature_supported(e.dims);
        const QuadratureGrid grid = bloch_grid(params.n_theta, params.n_phi);
        // Shared nodes for the average and the members: the harmonic offsets of
        // the two local-subentropy terms cancel identically.
        const double sum = quadrature_sum(grid, params.threads, [&](const PureState& alpha) {
            double v = node_term(avg.matrix(), e.dims, alpha);
            for (std::size_t x = 0; x < e.size(); ++x)
                v -= e.probs[x] * node_term(e.members[x].matrix(), e.dims, alpha);
            return v;
        });
        r.value = 2.0 * sum;
        r.params = quad_params(params);
    } else {
        const double d_total = static_cast<double>(e.dim());
        // Common random product states for the average and member terms.
        const Welford w = mc_accumulate(params, [&](Rng& rng) {
            const PureState s = sample_product_state(e.dims, rng);
            double f_avg = 0.0, members = 0.0;
            for (std::size_t x = 0; x < e.size(); ++x) {
                const double f = std::max(expectation_value(e.members[x].matrix(), s), 0.0);
                f_avg += e.probs[x] * f;
                members += e.probs[x] * xlog2x(f);
            }
            return -d_total * (xlog2x(f_avg) - members);
        });
        r.value = w.mean;
        r.std_error = w.std_error();
        r.params = mc_params(params);
    }
    return r;
}

BoundReport local_subentropy_gap_product_form(const Ensemble& e, const EvalParams& params) {
    require_bipartite(e.dims, "product-form lambda_L");
    const DensityMatrix avg = e.average_state();
    const DensityMatrix avg_a = avg.partial_trace(0);
    const DensityMatrix avg_b = avg.partial_trace(1);

    const ComplexMatrix product = kron(avg_a.matrix(), avg_b.matrix());
    double dev = 0.0;
    for (std::size_t i = 0; i < product.rows(); ++i)
        for (std::size_t j = 0; j < product.cols(); ++j)
            dev = std::max(dev, std::abs(avg.matrix()(i, j) - product(i, j)));
    if (dev > 1e-8)
        throw InputError("AverageNotProduct", "ensemble average deviates from the product of its "
                                              "marginals by " + std::to_string(dev));

    const double first = subentropy(avg_a.eigenvalues()) + subentropy(avg_b.eigenvalues()) +
                         harmonic_log_constant(e.dims[0]);

    BoundReport r;
    r.name = "lambda_L";
    r.method = method_name(params.method);
    r.flags.push_back("product-average");
    double member_term = 0.0;
    if (params.method == Method::quadrature) {
        require_quadrature_supported(e.dims);
        const QuadratureGrid grid = bloch_grid(params.n_theta, params.n_phi);
        member_term = 2.0 * quadrature_sum(grid, params.threads, [&](const PureState& alpha) {
            double v = 0.0;
            for (std::size_t x = 0; x < e.size(); ++x)
                v += e.probs[x] * node_term(e.members[x].matrix(), e.dims, alpha);
            return v;
        });
        r.value = first - member_term;
        r.params = quad_params(params);
    } else {
        const double d_a = static_cast<double>(e.dims[0]);
        const Welford w = mc_accumulate(params, [&](Rng& rng) {
            const PureState alpha = sample_pure_state(e.dims[0], rng);
            double v = 0.0;
            for (std::size_t x = 0; x < e.size(); ++x)
                v += e.probs[x] * node_term(e.members[x].matrix(), e.dims, alpha);
            return d_a * v;
        });
        member_term = w.mean;
        r.value = first - member_term;
        r.std_error = w.std_error();
        r.params = mc_params(params);
    }

    // The two routes evaluate the same quantity; disagreement beyond combined
    // error bars means a broken assumption, not a statistic.
    const BoundReport direct = local_subentropy_gap(e, params);
    const double tol =
        5.0 * std::sqrt(r.std_error * r.std_error + direct.std_error * direct.std_error) + 1e-6;
    if (std::abs(r.value - direct.value) > tol)
        throw ConsistencyError("ConsistencyFailure",
                               "product-form route gives " + std::to_string(r.value) +
                                   ", direct route " + std::to_string(direct.value) +
                                   ", tolerance " + std::to_string(tol));
    return r;
}

BoundReport distillation_bound(const PureDecomposition& d, std::size_t m,
                               const ComplexMatrix& isometry, const EvalParams& params) {
    require_bipartite(d.dims, "distillation bound");
    if (m < 1) throw InputError("ValidationError", "copy count must be >= 1");

    const std::size_t db = d.dims[1];
    ComplexMatrix acc(d.dims[0] * db, d.dims[0] * db);
    double member_marginal = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const DensityMatrix psi = DensityMatrix::from_pure(d.states[i], d.dims);
        const ComplexMatrix& pm = psi.matrix();
        for (std::size_t r = 0; r < pm.rows(); ++r)
            for (std::size_t c = 0; c < pm.cols(); ++c) acc(r, c) += d.probs[i] * pm(r, c);
        member_marginal += d.probs[i] * von_neumann_entropy(psi.partial_trace(0));
    }
    const DensityMatrix avg(std::move(acc), d.dims);
    const double entropy_a = von_neumann_entropy(avg.partial_trace(0));
    const double entropy_b = von_neumann_entropy(avg.partial_trace(1));

    const auto sdims = string_dims(d, m);
    if (isometry.rows() != 2 || isometry.cols() != sdims[0])
        throw InputError("NonIsometric", "need a 2x" + std::to_string(sdims[0]) +
                                             " compression, got " + std::to_string(isometry.rows()) +
                                             "x" + std::to_string(isometry.cols()));
    const ComplexMatrix gram = isometry * isometry.dagger();
    double gdev = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            gdev = std::max(gdev, std::abs(gram(i, j) - (i == j ? cplx(1.0) : cplx(0.0))));
    if (gdev > 1e-10)
        throw InputError("NonIsometric", "compression rows not orthonormal, deviation " +
                                             std::to_string(gdev));

    // Compress the A side of every m-copy string at the ket level; the full
    // string ensemble is never materialized.
    Ensemble projected;
    projected.label = d.label + " x" + std::to_string(m) + " ->2xn";
    projected.dims = {2, sdims[1]};
    double kept = 0.0;
    for (auto& [prob, ket] : string_kets(d, m)) {
        PureState out(2 * sdims[1]);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t b = 0; b < sdims[1]; ++b) {
                cplx v = 0.0;
                for (std::size_t a = 0; a < sdims[0]; ++a) {
                    const cplx va = isometry(r, a);
                    if (va != 0.0) v += va * ket.amp[a * sdims[1] + b];
                }
                out.amp[r * sdims[1] + b] = v;
            }
        const double weight = out.norm() * out.norm();
        const double mass = prob * weight;
        if (mass < 1e-12) continue;
        const double scale = 1.0 / out.norm();
        for (cplx& v : out.amp) v *= scale;
        projected.probs.push_back(mass);
        projected.members.push_back(DensityMatrix::from_pure(out, projected.dims));
        kept += mass;
    }
    if (projected.members.empty())
        throw InputError("ValidationError", "compression annihilated every copy string");
    for (double& p : projected.probs) p /= kept;

    const BoundReport lam = local_subentropy_gap(projected, params);
    BoundReport r;
    r.name = "distill_D";
    r.value = entropy_a + entropy_b - member_marginal - lam.value / static_cast<double>(m);
    r.std_error = lam.std_error / static_cast<double>(m);
    r.method = lam.method;
    r.params = lam.params;
    r.params["m"] = m;
    r.flags = lam.flags;
    return r;
}

HashingCheck hashing_compatibility_check(const PureDecomposition& d, const EvalParams& params) {
    if (d.dims != std::vector<std::size_t>{2, 2} || d.size() != 4)
        throw InputError("NotBellDiagonal", "expected the four Bell states on two qubits");
    const PureDecomposition canon = bell_diagonal_decomposition(0.25, 0.25, 0.25, 0.25);
    for (std::size_t i = 0; i < 4; ++i) {
        const double overlap = std::abs(inner(d.states[i], canon.states[i]));
        if (std::abs(overlap - 1.0) > 1e-9)
            throw InputError("NotBellDiagonal", "member " + std::to_string(i) +
                                                    " is not the expected Bell state (overlap " +
                                                    std::to_string(overlap) + ")");
    }
    ComplexMatrix id2 = ComplexMatrix::identity(2);
    const BoundReport bound = distillation_bound(d, 1, id2, params);
    HashingCheck check;
    check.bound = bound.value;
    check.std_error = bound.std_error;
    check.yield = 1.0 - shannon_entropy(d.probs);
    check.compatible = check.bound >= check.yield - 3.0 * check.std_error - 1e-9;
    return check;
}

}
