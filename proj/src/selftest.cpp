#include "lacc/selftest.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lacc/bounds.hpp"
#include "lacc/ensembles.hpp"
#include "lacc/entropy.hpp"
#include "lacc/errors.hpp"
#include "lacc/haar.hpp"
#include "lacc/oracle.hpp"
#include "lacc/rng.hpp"
#include "lacc/scrooge.hpp"

namespace lacc {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CliRun {
    int exit_code = -1;
    std::string out;
};

CliRun run_cli(const std::string& command) {
    CliRun r;
    FILE* pipe = ::popen((command + " 2>/dev/null").c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
    return r;
}

double find_report_value(const nlohmann::json& doc, const std::string& name, const char* field) {
    for (const auto& rep : doc.at("reports"))
        if (rep.at("name") == name) return rep.at(field).get<double>();
    throw std::runtime_error("report " + name + " missing from CLI output");
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// The 14 ensembles shared by the oracle-agreement criteria: the three
// built-in families plus seeded random 2x2 and 2x3 mixtures.
std::vector<Ensemble> oracle_test_ensembles() {
    std::vector<Ensemble> list;
    list.push_back(bell3_ensemble());
    list.push_back(product8_ensemble());
    list.push_back(e1_ensemble(0.0, kPi / 4.0));
    list.push_back(e1_ensemble(kPi / 2.0, kPi / 4.0));
    const Rng root(42);
    for (std::size_t i = 0; i < 5; ++i) {
        Rng r = root.split(i);
        list.push_back(random_ensemble({2, 2}, 3, r));
        list.back().label = "random-2x2-" + std::to_string(i);
    }
    for (std::size_t i = 0; i < 5; ++i) {
        Rng r = root.split(100 + i);
        list.push_back(random_ensemble({2, 3}, 3, r));
        list.back().label = "random-2x3-" + std::to_string(i);
    }
    return list;
}

// 1: front-door bell-state run with the pinned grid reproduces the reference
// lower bound and the unit chi_L, inside the wall-clock budget.
CriterionResult criterion_bell_state(const std::string& cli) {
    CriterionResult c;
    const auto t0 = std::chrono::steady_clock::now();
    const CliRun run =
        run_cli(cli + " bounds --ensemble bell3 --method quadrature --ntheta 64 --nphi 64");
    c.seconds = elapsed_since(t0);
    if (run.exit_code != 0) {
        c.detail = "exit code " + std::to_string(run.exit_code);
        return c;
    }
    const nlohmann::json doc = nlohmann::json::parse(run.out, nullptr, false);
    if (doc.is_discarded()) {
        c.detail = "unparseable CLI output";
        return c;
    }
    const double lam = find_report_value(doc, "lambda_L", "value_bits");
    const double chi_l = find_report_value(doc, "chi_L", "value_bits");
    const bool lam_ok = std::abs(lam - 0.2516) <= 1e-3;
    const bool chi_ok = std::abs(chi_l - 1.0) <= 1e-9;
    const bool time_ok = c.seconds < 5.0;
    c.pass = lam_ok && chi_ok && time_ok;
    c.detail = "lambda_L=" + fmt(lam) + " (want 0.2516 +- 1e-3), chi_L=" + fmt(chi_l) +
               " (want 1 +- 1e-9), budget 5 s";
    return c;
}

// 2: the random product-basis average agrees with the analytic value on
// every test ensemble, within the oracle's own error bars.
CriterionResult criterion_oracle_agreement(const std::vector<Ensemble>& list,
                                           std::vector<double>& quad_values, int threads) {
    CriterionResult c;
    const auto t0 = std::chrono::steady_clock::now();
    EvalParams qp;
    qp.threads = threads;
    double worst = 0.0;
    std::string worst_label;
    bool all_ok = true;
    quad_values.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
        const BoundReport quad = local_subentropy_gap(list[i], qp);
        quad_values.push_back(quad.value);
        const BasisAverage oracle =
            average_product_basis_mi(list[i], 10000, Rng(7).split(i), threads);
        const double pulls =
            std::abs(oracle.mean - quad.value) / std::max(oracle.std_error, 1e-12);
        if (pulls > worst) {
            worst = pulls;
            worst_label = list[i].label;
        }
        all_ok = all_ok && std::abs(oracle.mean - quad.value) <= 3.0 * oracle.std_error + 1e-9;
    }
    c.seconds = elapsed_since(t0);
    const bool time_ok = c.seconds < 120.0;
    c.pass = all_ok && time_ok;
    c.detail = "worst |oracle - analytic| = " + fmt(worst) + " std errors (" + worst_label +
               "), limit 3; budget 120 s";
    return c;
}

// 3: the achievable two-step protocol meets or beats the analytic average.
CriterionResult criterion_two_step(const std::vector<Ensemble>& list,
                                   const std::vector<double>& quad_values) {
    CriterionResult c;
    if (quad_values.size() != list.size()) {
        c.detail = "analytic values from the previous criterion are unavailable";
        return c;
    }
    const auto t0 = std::chrono::steady_clock::now();
    double worst_margin = 1e300;
    std::string worst_label;
    bool all_ok = true;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const OptimizationResult opt = optimize_two_step_locc(list[i], 20000, Rng(11).split(i));
        // the reference value is deterministic, so the only slack is the
        // grid-truncation scale of the analytic route
        const double margin = opt.value - quad_values[i];
        if (margin < worst_margin) {
            worst_margin = margin;
            worst_label = list[i].label;
        }
        all_ok = all_ok && margin >= -1e-6;
    }
    c.seconds = elapsed_since(t0);
    c.pass = all_ok;
    c.detail = "worst (protocol - analytic) margin = " + fmt(worst_margin) + " bits (" +
               worst_label + "), floor -1e-6";
    return c;
}

// 4: subentropy reference values, and agreement between the stable and the
// product-form evaluations on well-separated spectra.
CriterionResult criterion_subentropy() {
    CriterionResult c;
    const auto t0 = std::chrono::steady_clock::now();
    const double q10 = subentropy({1.0, 0.0});
    const double err_half = std::abs(subentropy({0.5, 0.5}) - 0.278652479555518296);
    const double err_third = std::abs(subentropy({2.0 / 3.0, 1.0 / 3.0}) - 0.251629167387822848);

    Rng rng(5);
    double worst = 0.0;
    for (std::size_t trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 2 + trial % 5;
        std::vector<double> lam(d);
        bool separated = false;
        while (!separated) {
            double sum = 0.0;
            for (double& v : lam) {
                v = 0.05 + rng.uniform();
                sum += v;
            }
            for (double& v : lam) v /= sum;
            separated = true;
            for (std::size_t a = 0; a < d && separated; ++a)
                for (std::size_t b = a + 1; b < d; ++b)
                    if (std::abs(lam[a] - lam[b]) < 1e-3) {
                        separated = false;
                        break;
                    }
        }
        worst = std::max(worst, std::abs(subentropy(lam) - subentropy_direct(lam)));
    }
    c.seconds = elapsed_since(t0);
    c.pass = q10 == 0.0 && err_half <= 1e-9 && err_third <= 1e-9 && worst <= 1e-10;
    c.detail = "Q(1,0)=" + fmt(q10) + ", Q(1/2,1/2) err=" + fmt(err_half) +
               ", Q(2/3,1/3) err=" + fmt(err_third) + ", worst route gap=" + fmt(worst) +
               " over 1000 spectra (limit 1e-10)";
    return c;
}

// 5: bound ordering 0 <= lambda_L <= chi and lambda <= chi on random
// ensembles across the supported shapes.
CriterionResult criterion_sandwich(int threads) {
    CriterionResult c;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::vector<std::size_t>> shapes = {{2, 2}, {2, 3}, {3, 3}};
    const Rng root(31);
    bool all_ok = true;
    std::string first_bad;
    for (std::size_t i = 0; i < 50; ++i) {
        Rng r = root.split(i);
        const auto& dims = shapes[i % shapes.size()];
        const Ensemble e = random_ensemble(dims, 3, r);
        EvalParams p;
        p.threads = threads;
        const bool wide = dims[0] != 2 && dims[1] != 2;  // no qubit side: sampled route only
        if (wide) {
            p.method = Method::monte_carlo;
            p.n_samples = 50000;
            p.seed = 900 + i;
        }
        const BoundReport lam_l = local_subentropy_gap(e, p);
        const BoundReport chi = holevo_chi(e);
        const BoundReport lam = subentropy_gap(e);
        const double slack = 3.0 * lam_l.std_error + 1e-9;
        bool ok = lam_l.value >= -slack && lam_l.value <= chi.value + slack &&
                  lam.value <= chi.value + 1e-9;
        if (wide) {
            const auto& fl = lam_l.flags;
            ok = ok && std::find(fl.begin(), fl.end(), "separable-only") != fl.end();
        }
        if (!ok && first_bad.empty())
            first_bad = "ensemble " + std::to_string(i) + " (" + std::to_string(dims[0]) + "x" +
                        std::to_string(dims[1]) + "): lambda_L=" + fmt(lam_l.value) +
                        " chi=" + fmt(chi.value) + " lambda=" + fmt(lam.value);
        all_ok = all_ok && ok;
    }
    c.seconds = elapsed_since(t0);
    c.pass = all_ok;
    c.detail = all_ok ? "50 random ensembles ordered within error bars" : first_bad;
    return c;
}

// 6: the rho-averaged ensemble recovers its source state, its per-basis
// mutual information spread shrinks at the sampling rate, and product bases
// see the same mean as global ones.
CriterionResult criterion_scrooge(int threads) {
    CriterionResult c;
    const auto t0 = std::chrono::steady_clock::now();
    bool all_ok = true;
    std::string detail;
    for (std::size_t k = 0; k < 3; ++k) {
        Rng state_rng = Rng(21).split(k);
        const DensityMatrix rho = sample_density_matrix({2, 2}, state_rng);

        const std::vector<std::size_t> sizes = {1000, 10000, 100000};
        std::vector<double> spreads;
        std::optional<ScroogeSample> big;
        for (std::size_t j = 0; j < sizes.size(); ++j) {
            ScroogeSample s = sample_scrooge(rho, sizes[j], Rng(22).split(10 * k + j), threads);
            // one shared basis set across sizes isolates the sample-size effect
            const ConstancyStats stats =
                constancy_check(s, 50, Rng(23).split(k), ScroogeBasisMode::product, threads);
            spreads.push_back(stats.spread);
            if (j + 1 == sizes.size()) big.emplace(std::move(s));
        }

        // (a) weighted empirical average returns the source state
        ComplexMatrix avg(rho.dim(), rho.dim());
        for (std::size_t i = 0; i < big->states.size(); ++i) {
            const PureState& st = big->states[i];
            for (std::size_t a = 0; a < rho.dim(); ++a)
                for (std::size_t b = 0; b < rho.dim(); ++b)
                    avg(a, b) += big->weights[i] * st.amp[a] * std::conj(st.amp[b]);
        }
        double recovery = 0.0;
        for (std::size_t a = 0; a < rho.dim(); ++a)
            for (std::size_t b = 0; b < rho.dim(); ++b)
                recovery = std::max(recovery, std::abs(avg(a, b) - rho.matrix()(a, b)));
        const double mc_scale = 1.0 / std::sqrt(static_cast<double>(big->states.size()));
        const bool recovery_ok = recovery <= 5.0 * mc_scale;

        // (b) spread shrinks like the sampling noise: monotone, and a factor
        // 10 over two decades with 3x slack
        const bool shrink_ok = spreads[1] <= spreads[0] && spreads[2] <= spreads[1] &&
                               spreads[2] <= 0.3 * spreads[0];

        // (c) product and global bases see the same mean; 1e-4 covers the
        // finite-sample bias shared by the two estimators
        const ConstancyStats prod =
            constancy_check(*big, 50, Rng(24).split(k), ScroogeBasisMode::product, threads);
        const ConstancyStats glob =
            constancy_check(*big, 50, Rng(25).split(k), ScroogeBasisMode::global, threads);
        const double sigma =
            std::sqrt(prod.std_error * prod.std_error + glob.std_error * glob.std_error);
        const bool modes_ok = std::abs(prod.mean - glob.mean) <= 3.0 * sigma + 1e-4;

        if (!(recovery_ok && shrink_ok && modes_ok) && detail.empty())
            detail = "state " + std::to_string(k) + ": recovery=" + fmt(recovery) + " (limit " +
                     fmt(5.0 * mc_scale) + "), spreads " + fmt(spreads[0]) + " / " +
                     fmt(spreads[1]) + " / " + fmt(spreads[2]) + ", mode gap=" +
                     fmt(std::abs(prod.mean - glob.mean)) + " vs " + fmt(3.0 * sigma + 1e-4);
        all_ok = all_ok && recovery_ok && shrink_ok && modes_ok;
    }
    c.seconds = elapsed_since(t0);
    const bool time_ok = c.seconds < 300.0;
    c.pass = all_ok && time_ok;
    c.detail = (all_ok ? "recovery, spread scaling, and mode agreement hold on 3 states"
                       : detail) +
               "; budget 300 s";
    return c;
}

// 7: the one-copy distillation bound never undercuts the hashing yield on
// Bell-diagonal mixtures, and vanishes for a pure product.
CriterionResult criterion_distillation(int threads) {
    CriterionResult c;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::vector<double>> mixtures = {{1.0, 0.0, 0.0, 0.0},
                                                       {0.5, 0.5, 0.0, 0.0},
                                                       {0.7, 0.1, 0.1, 0.1},
                                                       {0.25, 0.25, 0.25, 0.25},
                                                       {0.4, 0.3, 0.2, 0.1}};
    EvalParams p;
    p.threads = threads;
    bool all_ok = true;
    std::string detail;
    for (const auto& m : mixtures) {
        const PureDecomposition d = bell_diagonal_decomposition(m[0], m[1], m[2], m[3]);
        const HashingCheck check = hashing_compatibility_check(d, p);
        if (!check.compatible && detail.empty())
            detail = "mixture (" + fmt(m[0]) + "," + fmt(m[1]) + "," + fmt(m[2]) + "," +
                     fmt(m[3]) + "): bound " + fmt(check.bound) + " < yield " + fmt(check.yield);
        all_ok = all_ok && check.compatible;
    }
    const BoundReport pure =
        distillation_bound(pure_product_decomposition(), 1, default_isometry(2), p);
    const bool pure_ok = pure.value <= 1e-9;
    if (!pure_ok && detail.empty()) detail = "pure product bound " + fmt(pure.value) + " > 0";
    c.seconds = elapsed_since(t0);
    c.pass = all_ok && pure_ok;
    c.detail = c.pass ? "5 Bell-diagonal mixtures compatible; pure product bound " +
                            fmt(pure.value)
                      : detail;
    return c;
}

// 8: the ensemble-family sweep is finite, continuous, inside the bound
// window, and byte-identical across reruns.
CriterionResult criterion_sweep(const std::string& cli) {
    CriterionResult c;
    const auto t0 = std::chrono::steady_clock::now();
    const std::string cmd =
        cli + " sweep-e1 --phi 0.7853981633974483 --steps 100 --seed 0 --format csv";
    const CliRun first = run_cli(cmd);
    const CliRun second = run_cli(cmd);
    c.seconds = elapsed_since(t0);
    if (first.exit_code != 0 || second.exit_code != 0) {
        c.detail = "exit codes " + std::to_string(first.exit_code) + " / " +
                   std::to_string(second.exit_code);
        return c;
    }
    const bool identical = first.out == second.out;

    std::vector<double> values, errors;
    std::istringstream lines(first.out);
    std::string line;
    bool header = true;
    std::size_t degenerate = 0;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string f;
        while (std::getline(row, f, ',')) fields.push_back(f);
        while (fields.size() < 4) fields.emplace_back();
        if (!fields[3].empty()) {
            ++degenerate;
            continue;
        }
        values.push_back(std::stod(fields[1]));
        errors.push_back(fields[2].empty() ? 0.0 : std::stod(fields[2]));
    }

    bool window_ok = values.size() + degenerate == 100 && !values.empty();
    double max_delta = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double slack = 3.0 * errors[i] + 1e-9;
        window_ok = window_ok && values[i] >= -slack && values[i] <= 2.0 + slack;
        if (i > 0) max_delta = std::max(max_delta, std::abs(values[i] - values[i - 1]));
    }
    const bool smooth_ok = max_delta < 0.05;
    c.pass = identical && window_ok && smooth_ok;
    c.detail = std::to_string(values.size()) + " rows (+" + std::to_string(degenerate) +
               " degenerate), max step " + fmt(max_delta) + " (limit 0.05), window [0, 2], " +
               (identical ? "reruns byte-identical" : "RERUNS DIFFER");
    return c;
}

// 9: grid and sampled routes agree, and the product-average route either
// matches the direct one or refuses loudly.
CriterionResult criterion_cross_method(const std::vector<Ensemble>& list,
                                       const std::vector<double>& quad_values, int threads) {
    CriterionResult c;
    if (quad_values.size() != list.size()) {
        c.detail = "analytic values from criterion 2 are unavailable";
        return c;
    }
    const auto t0 = std::chrono::steady_clock::now();
    bool all_ok = true;
    double worst = 0.0;
    std::string worst_label;
    for (std::size_t i = 0; i < list.size(); ++i) {
        EvalParams mp;
        mp.method = Method::monte_carlo;
        mp.seed = 500 + i;
        mp.threads = threads;
        const BoundReport mc = local_subentropy_gap(list[i], mp);
        const double sigma = mc.std_error + 1e-9;
        const double pulls = std::abs(mc.value - quad_values[i]) / sigma;
        if (pulls > worst) {
            worst = pulls;
            worst_label = list[i].label;
        }
        all_ok = all_ok && pulls <= 3.0;
    }

    // the product-average route must agree where the average is a product...
    bool product_ok = true;
    for (const Ensemble* e : {&list[1], &list[2]}) {  // product8 and an orthonormal family
        EvalParams qp;
        qp.threads = threads;
        try {
            const BoundReport pf = local_subentropy_gap_product_form(*e, qp);
            const double direct = local_subentropy_gap(*e, qp).value;
            product_ok = product_ok && std::abs(pf.value - direct) <= 2e-6;
        } catch (const Error&) {
            product_ok = false;
        }
    }

    // ...and refuse loudly when a coarse grid breaks the cross-check.  Two
    // product members sharing a skewed A factor make the average-state
    // integrand strongly curved, which a 2x2 grid cannot represent.
    bool refusal_ok = false;
    {
        ComplexMatrix a(2, 2), b0(2, 2), b1(2, 2);
        a(0, 0) = 0.9;
        a(1, 1) = 0.1;
        b0(0, 0) = 1.0;
        b1(1, 1) = 1.0;
        Ensemble skew;
        skew.label = "skewed-product-pair";
        skew.dims = {2, 2};
        skew.probs = {0.5, 0.5};
        skew.members.push_back(DensityMatrix(kron(a, b0), {2, 2}));
        skew.members.push_back(DensityMatrix(kron(a, b1), {2, 2}));
        EvalParams coarse;
        coarse.n_theta = 2;
        coarse.n_phi = 2;
        try {
            (void)local_subentropy_gap_product_form(skew, coarse);
        } catch (const ConsistencyError& err) {
            refusal_ok = err.kind() == "ConsistencyFailure";
        }
    }
    c.seconds = elapsed_since(t0);
    c.pass = all_ok && product_ok && refusal_ok;
    c.detail = "worst grid-vs-sampled pull " + fmt(worst) + " std errors (" + worst_label +
               ", limit 3), product-average route " + (product_ok ? "agrees" : "DISAGREES") +
               ", coarse-grid refusal " + (refusal_ok ? "raised" : "MISSING");
    return c;
}

}  // namespace

int run_selftest(std::ostream& out, const std::string& cli_path, int threads) {
    std::vector<double> quad_values;
    const std::vector<Ensemble> shared = oracle_test_ensembles();

    struct Entry {
        int index;
        const char* name;
        std::function<CriterionResult()> run;
    };
    const std::vector<Entry> criteria = {
        {1, "bell-state bounds via the front door", [&] { return criterion_bell_state(cli_path); }},
        {2, "random-basis oracle equals the analytic average",
         [&] { return criterion_oracle_agreement(shared, quad_values, threads); }},
        {3, "two-step protocol achieves the average",
         [&] { return criterion_two_step(shared, quad_values); }},
        {4, "subentropy reference values", [] { return criterion_subentropy(); }},
        {5, "bound ordering on random ensembles", [&] { return criterion_sandwich(threads); }},
        {6, "rho-averaged ensemble saturation", [&] { return criterion_scrooge(threads); }},
        {7, "distillation bound vs hashing yield",
         [&] { return criterion_distillation(threads); }},
        {8, "ensemble-family sweep reproduction", [&] { return criterion_sweep(cli_path); }},
        {9, "route agreement across methods",
         [&] { return criterion_cross_method(shared, quad_values, threads); }},
    };

    int failures = 0;
    for (const auto& entry : criteria) {
        CriterionResult r;
        try {
            r = entry.run();
        } catch (const Error& err) {
            r.pass = false;
            r.detail = err.kind() + ": " + err.what();
        } catch (const std::exception& ex) {
            r.pass = false;
            r.detail = std::string("exception: ") + ex.what();
        }
        r.index = entry.index;
        r.name = entry.name;
        if (!r.pass) ++failures;
        std::ostringstream secs;
        secs.precision(1);
        secs << std::fixed << r.seconds;
        out << (r.pass ? "[PASS]" : "[FAIL]") << " criterion " << r.index << " (" << secs.str()
            << " s) " << r.name << ": " << r.detail << "\n";
    }
    out << (failures == 0 ? "all 9 criteria passed"
                          : std::to_string(failures) + " of 9 criteria FAILED")
        << "\n";
    return failures;
}

}
