#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lacc/bounds.hpp"
#include "lacc/densmat.hpp"
#include "lacc/ensembles.hpp"
#include "lacc/errors.hpp"
#include "lacc/haar.hpp"
#include "lacc/oracle.hpp"
#include "lacc/rng.hpp"
#include "lacc/scrooge.hpp"
#include "lacc/selftest.hpp"
#include "lacc/version.hpp"

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

struct Config {
    std::string ensemble;
    std::string method = "quadrature";
    std::size_t ntheta = 64;
    std::size_t nphi = 64;
    std::size_t samples = 200000;
    std::size_t bases = 512;
    std::size_t budget = 50000;
    std::uint64_t seed = 0;
    std::string out;
    std::string format;  // per-command default filled in later
    int threads = 0;     // 0: pick from hardware

    // sweep
    double phi = kPi / 4.0;
    double theta_min = 0.0;
    double theta_max = kPi;
    std::size_t steps = 100;

    // scrooge
    std::string rho;
    std::string mode = "product";

    // distill
    std::string decomposition;
    std::size_t copies = 1;
    std::string isometry;
    double e_out = 0.0;
};

int resolved_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

lacc::Method parse_method(const std::string& name) {
    if (name == "quadrature") return lacc::Method::quadrature;
    if (name == "mc" || name == "monte_carlo") return lacc::Method::monte_carlo;
    throw lacc::InputError("ValidationError", "unknown method: " + name);
}

lacc::EvalParams eval_params(const Config& cfg) {
    lacc::EvalParams p;
    p.method = parse_method(cfg.method);
    p.n_theta = cfg.ntheta;
    p.n_phi = cfg.nphi;
    p.n_samples = cfg.samples;
    p.seed = cfg.seed;
    p.threads = resolved_threads(cfg.threads);
    return p;
}

std::vector<std::string> split_colon(const std::string& s) {
    std::vector<std::string> parts;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, ':')) parts.push_back(part);
    return parts;
}

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw lacc::InputError("ValidationError", "cannot parse " + what + ": '" + s + "'");
    }
}

lacc::Ensemble resolve_ensemble(const std::string& spec) {
    if (spec.empty()) throw lacc::InputError("ValidationError", "no ensemble given");
    if (spec == "bell3") return lacc::bell3_ensemble();
    if (spec == "product8") return lacc::product8_ensemble();
    if (spec.rfind("e1:", 0) == 0) {
        const auto parts = split_colon(spec);
        if (parts.size() != 3)
            throw lacc::InputError("ValidationError", "builtin form is e1:theta:phi, got " + spec);
        return lacc::e1_ensemble(parse_number(parts[1], "theta"), parse_number(parts[2], "phi"));
    }
    return lacc::load_ensemble_file(spec);
}

lacc::PureDecomposition resolve_decomposition(const std::string& spec) {
    if (spec.empty()) throw lacc::InputError("ValidationError", "no decomposition given");
    if (spec == "pureproduct") return lacc::pure_product_decomposition();
    if (spec.rfind("belldiag:", 0) == 0) {
        const auto parts = split_colon(spec);
        if (parts.size() != 5)
            throw lacc::InputError("ValidationError",
                                   "builtin form is belldiag:p0:p1:p2:p3, got " + spec);
        return lacc::bell_diagonal_decomposition(
            parse_number(parts[1], "p0"), parse_number(parts[2], "p1"),
            parse_number(parts[3], "p2"), parse_number(parts[4], "p3"));
    }
    return lacc::load_decomposition_file(spec);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw lacc::InputError("ValidationError", "cannot open output file " + path);
    f << content;
}

json envelope(const char* command, const Config& cfg) {
    json doc;
    doc["tool"] = "lacc";
    doc["version"] = lacc::kToolVersion;
    doc["command"] = command;
    doc["seed"] = cfg.seed;
    return doc;
}

double ms_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

int cmd_bounds(const Config& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    lacc::Ensemble e = resolve_ensemble(cfg.ensemble);
    const lacc::EvalParams p = eval_params(cfg);

    // the analytic grid walks the first party's sphere, so put a qubit there
    // when only the second party has one; every reported quantity is
    // symmetric under the relabeling
    bool swapped = false;
    if (p.method == lacc::Method::quadrature && e.dims.size() == 2 && e.dims[0] != 2 &&
        e.dims[1] == 2) {
        e = lacc::swap_ensemble_parties(e);
        swapped = true;
    }

    json doc = envelope("bounds", cfg);
    doc["ensemble"] = e.label;
    doc["dims"] = e.dims;
    doc["parties_swapped"] = swapped;

    std::vector<lacc::BoundReport> reports;
    reports.push_back(lacc::holevo_chi(e));
    reports.push_back(lacc::subentropy_gap(e));
    reports.push_back(lacc::local_chi(e, cfg.e_out));
    reports.push_back(lacc::local_subentropy(e.average_state(), p));
    reports.push_back(lacc::local_subentropy_gap(e, p));
    // when the average factorizes, the independent product-form route runs
    // too; its internal cross-check escalates any disagreement to exit 3
    try {
        reports.push_back(lacc::local_subentropy_gap_product_form(e, p));
    } catch (const lacc::InputError& err) {
        if (err.kind() != "AverageNotProduct") throw;
    }
    json rep_json = json::array();
    for (const auto& r : reports) rep_json.push_back(r.to_json());
    doc["reports"] = rep_json;

    const lacc::BoundReport& lam_l = reports[4];
    const lacc::BoundReport& chi = reports[0];
    const lacc::BoundReport& chi_l = reports[2];

    json oracle;
    const lacc::BasisAverage avg = lacc::average_product_basis_mi(
        e, cfg.bases, lacc::Rng(cfg.seed).split(1000), p.threads);
    oracle["basis_average"] = {
        {"mean_bits", avg.mean}, {"std_error_bits", avg.std_error}, {"n_bases", avg.n_bases}};

    const bool qubit_side =
        e.dims.size() == 2 && (e.dims[0] == 2 || e.dims[1] == 2);
    double locc = 0.0;
    if (qubit_side) {
        const lacc::Ensemble eo = e.dims[0] == 2 ? e : lacc::swap_ensemble_parties(e);
        const lacc::OptimizationResult two_step =
            lacc::optimize_two_step_locc(eo, cfg.budget, lacc::Rng(cfg.seed).split(2000));
        locc = two_step.value;
        oracle["two_step_locc"] = {{"value_bits", two_step.value},
                                   {"converged", two_step.converged},
                                   {"evals_used", two_step.evals_used},
                                   {"restarts_used", two_step.restarts_used}};
    }
    doc["oracle"] = oracle;

    const double tol = 3.0 * lam_l.std_error + 1e-6;
    json sandwich;
    sandwich["lambda_L"] = lam_l.value;
    sandwich["oracle_locc"] = qubit_side ? json(locc) : json(nullptr);
    sandwich["chi_L"] = chi_l.value;
    sandwich["chi"] = chi.value;
    const double upper = std::min(chi_l.value, chi.value);
    sandwich["consistent"] = qubit_side
                                 ? (lam_l.value <= locc + tol && locc <= upper + tol)
                                 : (lam_l.value <= upper + tol);
    doc["sandwich"] = sandwich;

    if (cfg.format == "csv") {
        std::string csv = "name,value_bits,std_error_bits,method,flags\r\n";
        for (const auto& r : reports) {
            std::string flags;
            for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
            csv += r.name + "," + fmt17(r.value) + "," + fmt17(r.std_error) + "," + r.method +
                   "," + flags + "\r\n";
        }
        write_output(cfg.out, csv);
        return 0;
    }
    doc["wall_ms"] = ms_since(t0);
    write_output(cfg.out, doc.dump(2) + "\n");
    return 0;
}

int cmd_sweep_e1(const Config& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.steps == 0) throw lacc::InputError("ValidationError", "steps must be positive");
    const lacc::EvalParams base = eval_params(cfg);

    struct Row {
        double theta = 0.0;
        double value = 0.0;
        double std_error = 0.0;
        bool degenerate = false;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < cfg.steps; ++i) {
        Row row;
        row.theta = cfg.steps == 1
                        ? cfg.theta_min
                        : cfg.theta_min + (cfg.theta_max - cfg.theta_min) *
                                              static_cast<double>(i) /
                                              static_cast<double>(cfg.steps - 1);
        try {
            const lacc::Ensemble e = lacc::e1_ensemble(row.theta, cfg.phi);
            lacc::EvalParams p = base;
            p.seed = lacc::Rng(cfg.seed).split(i).seed();
            const lacc::BoundReport r = lacc::local_subentropy_gap(e, p);
            row.value = r.value;
            row.std_error = r.std_error;
        } catch (const lacc::InputError& err) {
            if (err.kind() != "DegenerateParameters") throw;
            row.degenerate = true;
        }
        rows.push_back(row);
    }

    if (cfg.format == "json") {
        json doc = envelope("sweep-e1", cfg);
        doc["phi"] = cfg.phi;
        json arr = json::array();
        for (const auto& row : rows) {
            json r = {{"theta", row.theta}, {"flag", row.degenerate ? "degenerate" : ""}};
            if (!row.degenerate) {
                r["lambda_L"] = row.value;
                r["std_error"] = row.std_error;
            }
            arr.push_back(r);
        }
        doc["rows"] = arr;
        doc["wall_ms"] = ms_since(t0);
        write_output(cfg.out, doc.dump(2) + "\n");
        return 0;
    }

    std::string csv = "theta,lambda_L,std_error,flag\r\n";
    for (const auto& row : rows) {
        if (row.degenerate)
            csv += fmt17(row.theta) + ",,,degenerate\r\n";
        else
            csv += fmt17(row.theta) + "," + fmt17(row.value) + "," + fmt17(row.std_error) +
                   ",\r\n";
    }
    write_output(cfg.out, csv);
    return 0;
}

int cmd_scrooge(const Config& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const int threads = resolved_threads(cfg.threads);

    lacc::DensityMatrix rho = [&] {
        if (!cfg.rho.empty()) {
            const auto parts = split_colon(cfg.rho);
            if (parts.size() == 3 && (parts[0] == "mixed" || parts[0] == "random")) {
                const auto da = static_cast<std::size_t>(parse_number(parts[1], "dA"));
                const auto db = static_cast<std::size_t>(parse_number(parts[2], "dB"));
                if (da < 1 || db < 1)
                    throw lacc::InputError("ValidationError", "party dims must be positive");
                if (parts[0] == "mixed") return lacc::DensityMatrix::maximally_mixed({da, db});
                lacc::Rng r = lacc::Rng(cfg.seed).split(999);
                return lacc::sample_density_matrix({da, db}, r);
            }
            throw lacc::InputError("ValidationError",
                                   "rho form is mixed:dA:dB or random:dA:dB, got " + cfg.rho);
        }
        return resolve_ensemble(cfg.ensemble).average_state();
    }();

    const lacc::ScroogeSample s =
        lacc::sample_scrooge(rho, cfg.samples, lacc::Rng(cfg.seed), threads);
    const lacc::ScroogeBasisMode mode = [&] {
        if (cfg.mode == "product") return lacc::ScroogeBasisMode::product;
        if (cfg.mode == "global") return lacc::ScroogeBasisMode::global;
        throw lacc::InputError("ValidationError", "mode must be product or global");
    }();
    const lacc::ConstancyStats stats =
        lacc::constancy_check(s, cfg.bases, lacc::Rng(cfg.seed).split(1), mode, threads);

    lacc::ComplexMatrix avg(rho.dim(), rho.dim());
    for (std::size_t i = 0; i < s.states.size(); ++i)
        avg += s.weights[i] * lacc::outer(s.states[i]);
    const lacc::ComplexMatrix delta = avg - rho.matrix();
    const double recovery = delta.max_abs();

    json doc = envelope("scrooge", cfg);
    doc["params"] = {{"n_samples", cfg.samples}, {"n_bases", cfg.bases}, {"mode", cfg.mode}};
    doc["rho"] = {{"dims", rho.dims()}, {"support_dim", s.support_dim}};
    doc["results"] = {{"mean_bits", stats.mean},
                      {"std_error_bits", stats.std_error},
                      {"spread_bits", stats.spread},
                      {"discretization_sigma_bits", stats.discretization_sigma},
                      {"constant_within_noise", stats.constant_within_noise},
                      {"recovery_error", recovery}};
    doc["wall_ms"] = ms_since(t0);
    write_output(cfg.out, doc.dump(2) + "\n");
    return 0;
}

int cmd_distill(const Config& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const lacc::PureDecomposition d = resolve_decomposition(cfg.decomposition);
    const lacc::EvalParams p = eval_params(cfg);

    lacc::ComplexMatrix isometry;
    if (cfg.isometry.empty()) {
        isometry = lacc::default_isometry(lacc::string_dims(d, cfg.copies)[0]);
    } else {
        std::ifstream f(cfg.isometry);
        if (!f)
            throw lacc::InputError("ValidationError", "cannot open isometry file " + cfg.isometry);
        json doc;
        try {
            f >> doc;
        } catch (const json::exception& ex) {
            throw lacc::InputError("SchemaError", std::string("isometry file: ") + ex.what());
        }
        if (!doc.is_object() || !doc.contains("matrix") || !doc["matrix"].is_array())
            throw lacc::InputError("SchemaError", "isometry file needs a top-level matrix array");
        const auto& m = doc["matrix"];
        const std::size_t rows = m.size();
        const std::size_t cols = rows > 0 && m[0].is_array() ? m[0].size() : 0;
        isometry = lacc::ComplexMatrix(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            if (!m[i].is_array() || m[i].size() != cols)
                throw lacc::InputError("SchemaError", "isometry rows must have equal length");
            for (std::size_t j = 0; j < cols; ++j) {
                const auto& cell = m[i][j];
                if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
                    !cell[1].is_number())
                    throw lacc::InputError("SchemaError",
                                           "isometry entries must be [re, im] pairs");
                isometry(i, j) = lacc::cplx(cell[0].get<double>(), cell[1].get<double>());
            }
        }
    }

    const lacc::BoundReport bound = lacc::distillation_bound(d, cfg.copies, isometry, p);

    json doc = envelope("distill", cfg);
    doc["decomposition"] = d.label;
    doc["dims"] = d.dims;
    doc["copies"] = cfg.copies;
    doc["report"] = bound.to_json();

    if (cfg.copies == 1) {
        try {
            const lacc::HashingCheck check = lacc::hashing_compatibility_check(d, p);
            doc["hashing"] = {{"bound_bits", check.bound},
                              {"std_error_bits", check.std_error},
                              {"yield_bits", check.yield},
                              {"compatible", check.compatible}};
        } catch (const lacc::InputError& err) {
            if (err.kind() != "NotBellDiagonal") throw;
        }
    }
    doc["wall_ms"] = ms_since(t0);
    write_output(cfg.out, doc.dump(2) + "\n");
    return 0;
}

int cmd_selftest(const Config& cfg, const std::string& argv0) {
    std::string cli = argv0;
    char buf[4096];
    const ssize_t n = ::readlink("/proc/self/exe", buf, sizeof buf - 1);
    if (n > 0) {
        buf[n] = '\0';
        cli = buf;
    }
    const int failures = lacc::run_selftest(std::cout, cli, resolved_threads(cfg.threads));
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bounds on locally accessible quantum information"};
    app.require_subcommand(1);
    Config cfg;

    const auto add_eval_flags = [&](CLI::App* sub) {
        sub->add_option("--method", cfg.method, "quadrature | mc")
            ->check(CLI::IsMember({"quadrature", "mc", "monte_carlo"}));
        sub->add_option("--ntheta", cfg.ntheta, "polar grid nodes");
        sub->add_option("--nphi", cfg.nphi, "azimuthal grid nodes");
        sub->add_option("--samples", cfg.samples, "Monte Carlo sample budget");
        sub->add_option("--seed", cfg.seed, "root random seed (default 0)");
        sub->add_option("--threads", cfg.threads, "worker thread cap (default: hardware)");
        sub->add_option("--out", cfg.out, "output file (default stdout)");
        sub->add_option("--format", cfg.format, "json | csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* bounds = app.add_subcommand("bounds", "All bounds and oracles for one ensemble");
    bounds->add_option("--ensemble", cfg.ensemble, "file path or bell3 | product8 | e1:theta:phi")
        ->required();
    add_eval_flags(bounds);
    bounds->add_option("--bases", cfg.bases, "random product bases for the oracle average");
    bounds->add_option("--budget", cfg.budget, "protocol optimizer evaluation budget");
    bounds->add_option("--eout", cfg.e_out, "mean output entanglement term of chi_L");

    CLI::App* sweep = app.add_subcommand("sweep-e1", "Lower-bound curve over the e1 family");
    add_eval_flags(sweep);
    sweep->add_option("--phi", cfg.phi, "family parameter phi (default pi/4)");
    sweep->add_option("--theta-min", cfg.theta_min, "sweep start (default 0)");
    sweep->add_option("--theta-max", cfg.theta_max, "sweep end (default pi)");
    sweep->add_option("--steps", cfg.steps, "number of rows (default 100)");

    CLI::App* scrooge = app.add_subcommand("scrooge", "Sample a rho-averaged ensemble and test "
                                                      "measurement-information constancy");
    scrooge->add_option("--ensemble", cfg.ensemble,
                        "source ensemble; its average state is sampled");
    add_eval_flags(scrooge);
    scrooge->add_option("--rho", cfg.rho, "direct source state: mixed:dA:dB | random:dA:dB");
    scrooge->add_option("--bases", cfg.bases, "bases for the constancy check");
    scrooge->add_option("--mode", cfg.mode, "basis family: product | global")
        ->check(CLI::IsMember({"product", "global"}));

    CLI::App* distill = app.add_subcommand("distill", "Distillation rate bound for a pure-state "
                                                      "decomposition");
    distill
        ->add_option("--decomposition", cfg.decomposition,
                     "file path or belldiag:p0:p1:p2:p3 | pureproduct")
        ->required();
    add_eval_flags(distill);
    distill->add_option("--m", cfg.copies, "copies per block (default 1)");
    distill->add_option("--isometry", cfg.isometry, "JSON file with a 2 x dA^m matrix");

    CLI::App* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
    selftest->add_option("--threads", cfg.threads, "worker thread cap (default: hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        json err = {{"error", {{"kind", "UsageError"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    }

    // scrooge runs are sample-heavy per basis; trim the defaults to desk scale
    if (scrooge->parsed()) {
        if (scrooge->count("--samples") == 0) cfg.samples = 20000;
        if (scrooge->count("--bases") == 0) cfg.bases = 50;
    }

    try {
        if (bounds->parsed()) return cmd_bounds(cfg);
        if (sweep->parsed()) return cmd_sweep_e1(cfg);
        if (scrooge->parsed()) return cmd_scrooge(cfg);
        if (distill->parsed()) return cmd_distill(cfg);
        return cmd_selftest(cfg, argv[0]);
    } catch (const lacc::Error& e) {
        json err = {{"error", {{"kind", e.kind()}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        if (dynamic_cast<const lacc::ConsistencyError*>(&e) != nullptr) return 3;
        if (dynamic_cast<const lacc::BudgetError*>(&e) != nullptr) return 4;
        return 2;
    } catch (const std::exception& e) {
        json err = {{"error", {{"kind", "InternalError"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
}
