#include "lacc/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "lacc/errors.hpp"
#include "lacc/haar.hpp"

namespace lacc {

namespace {

constexpr std::size_t kMaxDim = 4096;
// member-matrix storage guard for materialized string ensembles (complex entries)
constexpr std::size_t kMaxStoredEntries = std::size_t{1} << 26;

std::size_t product_of(const std::vector<std::size_t>& dims) {
    std::size_t p = 1;
    for (std::size_t d : dims) p *= d;
    return p;
}

double noise_floor(std::size_t n) {
    return 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<std::size_t>(n, 1));
}

// Shared probability hygiene: reject genuinely bad sums, renormalize real
// drift, leave clean vectors bit-identical.
void settle_probabilities(std::vector<double>& probs, const char* what) {
    double sum = 0.0;
    for (double p : probs) {
        if (p < -1e-12)
            throw InputError("ValidationError",
                             std::string(what) + ": negative probability " + std::to_string(p));
        sum += std::max(p, 0.0);
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InputError("ValidationError", std::string(what) + ": probabilities sum to " +
                                                std::to_string(sum) + ", off 1 beyond 1e-9");
    for (double& p : probs)
        if (p < 0.0) p = 0.0;
    if (std::abs(sum - 1.0) > noise_floor(probs.size()))
        for (double& p : probs) p /= sum;
}

nlohmann::json number_pair(const cplx& v) { return nlohmann::json::array({v.real(), v.imag()}); }

cplx parse_number_pair(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError("SchemaError", where + ": expected [re, im] number pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::size_t Ensemble::dim() const { return product_of(dims); }

ComplexMatrix Ensemble::average() const {
    ComplexMatrix acc(dim(), dim());
    for (std::size_t x = 0; x < size(); ++x) {
        const ComplexMatrix& m = members[x].matrix();
        const double p = probs[x];
        for (std::size_t i = 0; i < acc.rows(); ++i)
            for (std::size_t j = 0; j < acc.cols(); ++j) acc(i, j) += p * m(i, j);
    }
    return acc;
}

DensityMatrix Ensemble::average_state() const { return DensityMatrix(average(), dims); }

Ensemble parse_ensemble(const nlohmann::json& doc) {
    if (!doc.is_object()) throw InputError("SchemaError", "ensemble document must be a JSON object");
    if (!doc.contains("dims")) throw InputError("SchemaError", "missing \"dims\"");
    if (!doc.contains("members")) throw InputError("SchemaError", "missing \"members\"");

    Ensemble e;
    if (doc.contains("label")) {
        if (!doc["label"].is_string()) throw InputError("SchemaError", "\"label\" must be a string");
        e.label = doc["label"].get<std::string>();
    }
    if (!doc["dims"].is_array() || doc["dims"].empty())
        throw InputError("SchemaError", "\"dims\" must be a non-empty array");
    for (const auto& d : doc["dims"]) {
        if (!d.is_number_unsigned() || d.get<std::size_t>() == 0)
            throw InputError("SchemaError", "\"dims\" entries must be positive integers");
        e.dims.push_back(d.get<std::size_t>());
    }
    const std::size_t n = product_of(e.dims);
    if (n > kMaxDim)
        throw InputError("SizeCap", "total dimension " + std::to_string(n) + " exceeds 4096");

    if (!doc["members"].is_array() || doc["members"].empty())
        throw InputError("SchemaError", "\"members\" must be a non-empty array");

    std::size_t idx = 0;
    for (const auto& mj : doc["members"]) {
        const std::string where = "member " + std::to_string(idx);
        if (!mj.is_object() || !mj.contains("prob") || !mj["prob"].is_number())
            throw InputError("SchemaError", where + ": expected an object with a numeric \"prob\"");
        e.probs.push_back(mj["prob"].get<double>());

        const bool has_matrix = mj.contains("matrix");
        const bool has_ket = mj.contains("ket");
        if (has_matrix == has_ket)
            throw InputError("SchemaError", where + ": exactly one of \"matrix\" or \"ket\" required");

        try {
            if (has_ket) {
                const auto& kj = mj["ket"];
                if (!kj.is_array() || kj.size() != n)
                    throw InputError("SchemaError", where + ": ket must have " + std::to_string(n) +
                                                        " amplitude pairs");
                PureState psi(n);
                for (std::size_t i = 0; i < n; ++i)
                    psi.amp[i] = parse_number_pair(kj[i], where + " ket[" + std::to_string(i) + "]");
                e.members.push_back(DensityMatrix::from_pure(psi, e.dims));
            } else {
                const auto& rows = mj["matrix"];
                if (!rows.is_array() || rows.size() != n)
                    throw InputError("SchemaError",
                                     where + ": matrix must have " + std::to_string(n) + " rows");
                ComplexMatrix m(n, n);
                for (std::size_t i = 0; i < n; ++i) {
                    if (!rows[i].is_array() || rows[i].size() != n)
                        throw InputError("SchemaError", where + ": row " + std::to_string(i) +
                                                            " must have " + std::to_string(n) + " entries");
                    for (std::size_t j = 0; j < n; ++j)
                        m(i, j) = parse_number_pair(rows[i][j], where + " entry");
                }
                e.members.push_back(DensityMatrix(std::move(m), e.dims));
            }
        } catch (const InputError& err) {
            if (err.kind() == "SchemaError") throw;
            throw InputError("ValidationError", where + ": " + err.what());
        }
        ++idx;
    }
    settle_probabilities(e.probs, "ensemble");
    return e;
}

Ensemble load_ensemble_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("SchemaError", "cannot open ensemble file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("SchemaError", path + ": " + e.what());
    }
    return parse_ensemble(doc);
}

nlohmann::json serialize_ensemble(const Ensemble& e) {
    nlohmann::json doc;
    doc["label"] = e.label;
    doc["dims"] = e.dims;
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t x = 0; x < e.size(); ++x) {
        nlohmann::json mj;
        mj["prob"] = e.probs[x];
        const ComplexMatrix& m = e.members[x].matrix();
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(number_pair(m(i, j)));
            rows.push_back(std::move(row));
        }
        mj["matrix"] = std::move(rows);
        members.push_back(std::move(mj));
    }
    doc["members"] = std::move(members);
    return doc;
}

PureDecomposition parse_decomposition(const nlohmann::json& doc) {
    if (!doc.is_object()) throw InputError("SchemaError", "decomposition document must be a JSON object");
    if (!doc.contains("dims") || !doc.contains("members"))
        throw InputError("SchemaError", "missing \"dims\" or \"members\"");
    PureDecomposition d;
    if (doc.contains("label") && doc["label"].is_string()) d.label = doc["label"].get<std::string>();
    for (const auto& dj : doc["dims"]) {
        if (!dj.is_number_unsigned() || dj.get<std::size_t>() == 0)
            throw InputError("SchemaError", "\"dims\" entries must be positive integers");
        d.dims.push_back(dj.get<std::size_t>());
    }
    if (d.dims.size() != 2) throw InputError("SchemaError", "decomposition must be bipartite");
    const std::size_t n = product_of(d.dims);
    std::size_t idx = 0;
    for (const auto& mj : doc["members"]) {
        const std::string where = "member " + std::to_string(idx);
        if (!mj.is_object() || !mj.contains("prob") || !mj["prob"].is_number())
            throw InputError("SchemaError", where + ": expected numeric \"prob\"");
        if (!mj.contains("ket"))
            throw InputError("ValidationError", where + ": decompositions need \"ket\" members");
        const auto& kj = mj["ket"];
        if (!kj.is_array() || kj.size() != n)
            throw InputError("SchemaError",
                             where + ": ket must have " + std::to_string(n) + " amplitude pairs");
        PureState psi(n);
        for (std::size_t i = 0; i < n; ++i) psi.amp[i] = parse_number_pair(kj[i], where);
        try {
            validate_pure_state(psi);
        } catch (const InputError& err) {
            throw InputError("ValidationError", where + ": " + err.what());
        }
        d.probs.push_back(mj["prob"].get<double>());
        d.states.push_back(std::move(psi));
        ++idx;
    }
    if (d.states.empty()) throw InputError("SchemaError", "\"members\" must be non-empty");
    settle_probabilities(d.probs, "decomposition");
    return d;
}

PureDecomposition load_decomposition_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("SchemaError", "cannot open decomposition file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("SchemaError", path + ": " + e.what());
    }
    return parse_decomposition(doc);
}

Ensemble marginal_ensemble(const Ensemble& e, std::size_t party) {
    Ensemble out;
    out.label = e.label + (party == 0 ? " [A]" : " [B]");
    out.probs = e.probs;
    for (const DensityMatrix& m : e.members) out.members.push_back(m.partial_trace(party));
    out.dims = {out.members.front().dim()};
    return out;
}

Ensemble swap_ensemble_parties(const Ensemble& e) {
    if (e.dims.size() != 2) throw InputError("DimensionMismatch", "party swap needs a bipartite ensemble");
    Ensemble out;
    out.label = e.label;
    out.dims = {e.dims[1], e.dims[0]};
    out.probs = e.probs;
    for (const DensityMatrix& m : e.members)
        out.members.emplace_back(swap_parties(m.matrix(), e.dims), out.dims);
    return out;
}

namespace {

PureState two_qubit_ket(std::initializer_list<cplx> amps) {
    PureState s(4);
    std::copy(amps.begin(), amps.end(), s.amp.begin());
    return s;
}

}  // namespace

Ensemble bell3_ensemble() {
    const double r = 1.0 / std::sqrt(2.0);
    Ensemble e;
    e.label = "bell3";
    e.dims = {2, 2};
    e.probs = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    e.members.push_back(DensityMatrix::from_pure(two_qubit_ket({r, 0.0, 0.0, r}), e.dims));
    e.members.push_back(DensityMatrix::from_pure(two_qubit_ket({r, 0.0, 0.0, -r}), e.dims));
    e.members.push_back(DensityMatrix::from_pure(two_qubit_ket({0.0, r, r, 0.0}), e.dims));
    return e;
}

Ensemble product8_ensemble() {
    Ensemble e;
    e.label = "product8";
    e.dims = {2, 2};
    const double r = 1.0 / std::sqrt(2.0);
    const PureState z0{cplx(1.0), cplx(0.0)}, z1{cplx(0.0), cplx(1.0)};
    const PureState plus{cplx(r), cplx(r)}, minus{cplx(r), cplx(-r)};
    for (const auto* a : {&z0, &z1})
        for (const auto* b : {&z0, &z1}) e.members.push_back(DensityMatrix::from_pure(kron(*a, *b), e.dims));
    for (const auto* a : {&plus, &minus})
        for (const auto* b : {&plus, &minus})
            e.members.push_back(DensityMatrix::from_pure(kron(*a, *b), e.dims));
    e.probs.assign(8, 1.0 / 8.0);
    return e;
}

Ensemble e1_ensemble(double theta, double phi) {
    const double a = std::sin(0.5 * theta) * std::cos(0.5 * phi);
    const double b = std::sin(0.5 * theta) * std::sin(0.5 * phi);
    const double c = std::cos(0.5 * theta);

    // second member direction: (a,b,c) x (1,1,1), zero exactly when a=b=c
    double v2[3] = {b - c, c - a, a - b};
    const double n2 = std::sqrt(v2[0] * v2[0] + v2[1] * v2[1] + v2[2] * v2[2]);
    if (n2 < 1e-9)
        throw InputError("DegenerateParameters",
                         "coefficients (a,b,c) = (" + std::to_string(a) + "," + std::to_string(b) + "," +
                             std::to_string(c) + ") are equal; second member undefined");
    for (double& v : v2) v /= n2;
    const double v1[3] = {a, b, c};
    double v3[3] = {v1[1] * v2[2] - v1[2] * v2[1], v1[2] * v2[0] - v1[0] * v2[2],
                    v1[0] * v2[1] - v1[1] * v2[0]};
    const double n3 = std::sqrt(v3[0] * v3[0] + v3[1] * v3[1] + v3[2] * v3[2]);
    for (double& v : v3) v /= n3;

    // real coordinate frame {|00>, |11>, |10>}
    auto embed = [](const double* v) {
        return two_qubit_ket({cplx(v[0]), cplx(0.0), cplx(v[2]), cplx(v[1])});
    };
    Ensemble e;
    {
        std::ostringstream lbl;
        lbl << "e1(theta=" << theta << ",phi=" << phi << ")";
        e.label = lbl.str();
    }
    e.dims = {2, 2};
    e.probs.assign(4, 0.25);
    e.members.push_back(DensityMatrix::from_pure(embed(v1), e.dims));
    e.members.push_back(DensityMatrix::from_pure(embed(v2), e.dims));
    e.members.push_back(DensityMatrix::from_pure(embed(v3), e.dims));
    e.members.push_back(DensityMatrix::from_pure(two_qubit_ket({0.0, 1.0, 0.0, 0.0}), e.dims));
    return e;
}

PureDecomposition bell_diagonal_decomposition(double p0, double p1, double p2, double p3) {
    const double r = 1.0 / std::sqrt(2.0);
    PureDecomposition d;
    d.label = "bell-diagonal";
    d.dims = {2, 2};
    d.probs = {p0, p1, p2, p3};
    settle_probabilities(d.probs, "bell-diagonal weights");
    d.states.push_back(two_qubit_ket({r, 0.0, 0.0, r}));    // (|00>+|11>)/sqrt2
    d.states.push_back(two_qubit_ket({r, 0.0, 0.0, -r}));   // (|00>-|11>)/sqrt2
    d.states.push_back(two_qubit_ket({0.0, r, r, 0.0}));    // (|01>+|10>)/sqrt2
    d.states.push_back(two_qubit_ket({0.0, r, -r, 0.0}));   // (|01>-|10>)/sqrt2
    return d;
}

PureDecomposition pure_product_decomposition() {
    PureDecomposition d;
    d.label = "pure-product";
    d.dims = {2, 2};
    d.probs = {1.0};
    d.states.push_back(two_qubit_ket({1.0, 0.0, 0.0, 0.0}));
    return d;
}

std::vector<std::size_t> string_dims(const PureDecomposition& d, std::size_t m) {
    std::size_t da = 1, db = 1;
    for (std::size_t k = 0; k < m; ++k) {
        da *= d.dims[0];
        db *= d.dims[1];
    }
    return {da, db};
}

std::vector<std::pair<double, PureState>> string_kets(const PureDecomposition& d, std::size_t m) {
    if (m < 1) throw InputError("ValidationError", "copy count must be >= 1");
    const std::size_t k = d.size();
    const std::size_t da = d.dims[0], db = d.dims[1];
    const std::size_t single = da * db;

    double dim_check = 1.0, count_check = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        dim_check *= static_cast<double>(single);
        count_check *= static_cast<double>(k);
    }
    if (dim_check > 4096.0)
        throw InputError("SizeCap", "string dimension " + std::to_string(dim_check) + " exceeds 4096");
    if (count_check > 4096.0)
        throw InputError("SizeCap", "string count " + std::to_string(count_check) + " exceeds 4096");

    const auto dims = string_dims(d, m);
    const std::size_t dam = dims[0], dbm = dims[1];
    std::size_t total = 1;
    for (std::size_t i = 0; i < m; ++i) total *= single;
    std::size_t n_strings = 1;
    for (std::size_t i = 0; i < m; ++i) n_strings *= k;

    std::vector<std::pair<double, PureState>> out;
    out.reserve(n_strings);
    std::vector<std::size_t> choice(m);
    for (std::size_t s = 0; s < n_strings; ++s) {
        std::size_t rem = s;
        double prob = 1.0;
        for (std::size_t copy = m; copy-- > 0;) {
            choice[copy] = rem % k;
            rem /= k;
            prob *= d.probs[choice[copy]];
        }
        PureState ket(dam * dbm);
        for (std::size_t j = 0; j < total; ++j) {
            // decode the natural (A1 B1 A2 B2 ...) index, copy 0 most significant
            std::size_t jr = j, aidx = 0, bidx = 0;
            cplx amp = 1.0;
            std::size_t scale = total;
            for (std::size_t copy = 0; copy < m; ++copy) {
                scale /= single;
                const std::size_t jc = jr / scale;
                jr %= scale;
                amp *= d.states[choice[copy]].amp[jc];
                aidx = aidx * da + jc / db;
                bidx = bidx * db + jc % db;
                if (amp == 0.0) break;
            }
            if (amp != 0.0) ket.amp[aidx * dbm + bidx] = amp;
        }
        out.emplace_back(prob, std::move(ket));
    }
    return out;
}

Ensemble string_ensemble(const PureDecomposition& d, std::size_t m) {
    auto kets = string_kets(d, m);
    const auto dims = string_dims(d, m);
    const std::size_t dim = dims[0] * dims[1];
    if (kets.size() * dim * dim > kMaxStoredEntries)
        throw InputError("SizeCap", "string ensemble needs " + std::to_string(kets.size() * dim * dim) +
                                        " stored matrix entries, over the desk-scale cap");
    Ensemble e;
    e.label = d.label + " x" + std::to_string(m);
    e.dims = dims;
    for (auto& [p, ket] : kets) {
        e.probs.push_back(p);
        e.members.push_back(DensityMatrix::from_pure(ket, dims));
    }
    settle_probabilities(e.probs, "string ensemble");
    return e;
}

ComplexMatrix default_isometry(std::size_t da) {
    if (da < 2) throw InputError("DimensionMismatch", "cannot select a 2-dim subspace of dimension " +
                                                          std::to_string(da));
    ComplexMatrix v(2, da);
    v(0, 0) = 1.0;
    v(1, 1) = 1.0;
    return v;
}

Ensemble project_to_2xn(const Ensemble& e, const ComplexMatrix& isometry) {
    if (e.dims.size() != 2) throw InputError("DimensionMismatch", "projection needs a bipartite ensemble");
    const std::size_t da = e.dims[0], db = e.dims[1];
    if (isometry.rows() != 2 || isometry.cols() != da)
        throw InputError("NonIsometric", "isometry must be 2x" + std::to_string(da) + ", got " +
                                             std::to_string(isometry.rows()) + "x" +
                                             std::to_string(isometry.cols()));
    const ComplexMatrix gram = isometry * isometry.dagger();
    double dev = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            dev = std::max(dev, std::abs(gram(i, j) - (i == j ? cplx(1.0) : cplx(0.0))));
    if (dev > 1e-10)
        throw InputError("NonIsometric", "rows not orthonormal, deviation " + std::to_string(dev));

    Ensemble out;
    out.label = e.label + " ->2xn";
    out.dims = {2, db};
    for (std::size_t x = 0; x < e.size(); ++x) {
        const ComplexMatrix& m = e.members[x].matrix();
        ComplexMatrix proj(2 * db, 2 * db);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t rp = 0; rp < 2; ++rp)
                for (std::size_t i = 0; i < db; ++i)
                    for (std::size_t j = 0; j < db; ++j) {
                        cplx acc = 0.0;
                        for (std::size_t a = 0; a < da; ++a) {
                            const cplx va = isometry(r, a);
                            if (va == 0.0) continue;
                            for (std::size_t ap = 0; ap < da; ++ap)
                                acc += va * m(a * db + i, ap * db + j) * std::conj(isometry(rp, ap));
                        }
                        proj(r * db + i, rp * db + j) = acc;
                    }
        const double w = proj.trace().real();
        const double mass = e.probs[x] * w;
        if (mass < 1e-12) continue;
        proj *= cplx(1.0 / w, 0.0);
        out.probs.push_back(mass);
        out.members.emplace_back(std::move(proj), out.dims);
    }
    if (out.members.empty())
        throw InputError("ValidationError", "projection annihilated every ensemble member");
    double total = 0.0;
    for (double p : out.probs) total += p;
    for (double& p : out.probs) p /= total;
    return out;
}

Ensemble random_ensemble(const std::vector<std::size_t>& dims, std::size_t n_members, Rng& rng) {
    Ensemble e;
    e.label = "random";
    e.dims = dims;
    double sum = 0.0;
    for (std::size_t i = 0; i < n_members; ++i) {
        e.probs.push_back(0.2 + rng.uniform());
        sum += e.probs.back();
        e.members.push_back(sample_density_matrix(dims, rng));
    }
    for (double& p : e.probs) p /= sum;
    return e;
}

}
