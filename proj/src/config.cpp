#include "qincompat/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qincompat::config {

using nlohmann::json;

namespace {

Complex parse_complex(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InvalidInput(where + ": complex entries must be [re, im] pairs");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

ComplexVector parse_vector(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw InvalidInput(where + ": expected a non-empty array");
    ComplexVector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = parse_complex(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

ComplexMatrix parse_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw InvalidInput(where + ": expected a non-empty array");
    const std::size_t rows = j.size();
    ComplexMatrix m;
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || row.size() != rows)
            throw InvalidInput(where + ": matrix must be square, row " + std::to_string(r) +
                               " has wrong length");
        if (r == 0) m.resize(rows, rows);
        for (std::size_t c = 0; c < rows; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_complex(
                row[c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

json dump_complex(Complex z) { return json::array({z.real(), z.imag()}); }

json dump_vector(const ComplexVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(dump_complex(v[i]));
    return out;
}

json dump_matrix(const ComplexMatrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(dump_complex(m(r, c)));
        out.push_back(row);
    }
    return out;
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("config: ") + e.what());  // includes the byte offset
    }
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

const json& require(const json& j, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) throw InvalidInput("config: missing field '" + key + "'");
    return *it;
}

model::StatisticalModel model_from_json(const json& j) {
    const Eigen::Index dim = require(j, "dimension").get<Eigen::Index>();
    if (dim < 2) throw InvalidInput("config: dimension must be >= 2");
    const int d = require(j, "parameters").get<int>();

    model::NoiseSpec noise = model::NoiseSpec::none();
    if (j.contains("noise")) {
        const json& jn = j["noise"];
        const std::string kind = require(jn, "kind").get<std::string>();
        if (kind == "none") {
            noise = model::NoiseSpec::none();
        } else if (kind == "global-depolarizing") {
            noise = model::NoiseSpec::global_depolarizing(require(jn, "lambda").get<double>());
        } else if (kind == "local-depolarizing") {
            std::vector<Eigen::Index> sites;
            for (const auto& s : require(jn, "site_dims")) sites.push_back(s.get<Eigen::Index>());
            noise = model::NoiseSpec::local_depolarizing(require(jn, "lambda").get<double>(), sites);
        } else {
            throw InvalidInput("config: noise.kind '" + kind + "' unknown");
        }
    }

    const json& jg = require(j, "generators");
    if (!jg.is_array() || static_cast<int>(jg.size()) != d)
        throw InvalidInput("config: generators must list exactly 'parameters' matrices");
    std::vector<HermitianMatrix> gens;
    for (std::size_t k = 0; k < jg.size(); ++k)
        gens.emplace_back(parse_matrix(jg[k], "generators[" + std::to_string(k) + "]"));
    model::GeneratorSet gset(std::move(gens));

    if (noise.kind == model::NoiseKind::LocalDepolarizing && gset.dim() == 2 && dim > 2) {
        // Per-site generators: one copy per qubit.
        gset = model::lift_local_generators(gset, static_cast<int>(noise.site_dims.size()));
    }
    if (gset.dim() != dim)
        throw InvalidInput("config: generator dimension " + std::to_string(gset.dim()) +
                           " does not match 'dimension'");

    const json& jp = require(j, "probe");
    std::optional<model::DensityMatrix> probe;
    if (jp.contains("pure")) {
        ComplexVector psi = parse_vector(jp["pure"], "probe.pure");
        if (psi.size() != dim) throw InvalidInput("config: probe.pure has wrong dimension");
        if (std::abs(psi.norm() - 1.0) > 1e-8)
            throw InvalidInput("config: probe.pure is not normalized");
        probe = model::DensityMatrix::pure(psi);
    } else if (jp.contains("mixed")) {
        ComplexMatrix rho = parse_matrix(jp["mixed"], "probe.mixed");
        if (rho.rows() != dim) throw InvalidInput("config: probe.mixed has wrong dimension");
        probe = model::DensityMatrix(rho);
    } else {
        throw InvalidInput("config: probe needs 'pure' or 'mixed'");
    }

    const json& jt = require(j, "theta");
    if (!jt.is_array() || static_cast<int>(jt.size()) != d)
        throw InvalidInput("config: theta must have 'parameters' entries");
    RealVector theta(d);
    for (int i = 0; i < d; ++i) theta[i] = jt[i].get<double>();

    return model::StatisticalModel(std::move(*probe), std::move(gset), noise, theta);
}

}  // namespace

model::StatisticalModel parse_model(const std::string& json_text) {
    return model_from_json(parse_text(json_text));
}

model::StatisticalModel load_model_file(const std::string& path) {
    return model_from_json(load_json(path));
}

std::string serialize_model(const model::StatisticalModel& m, int indent) {
    json j;
    j["dimension"] = m.dim();
    j["parameters"] = m.parameter_count();
    json gens = json::array();
    for (int k = 0; k < m.generators.count(); ++k) gens.push_back(dump_matrix(m.generators[k].mat()));
    j["generators"] = gens;

    // A rank-one probe is written back in its compact pure form.
    auto ed = matcore::eig_hermitian(HermitianMatrix(m.probe.mat()));
    if (m.probe.purity() > 1.0 - 1e-12) {
        j["probe"]["pure"] = dump_vector(ed.eigenvectors.col(m.dim() - 1));
    } else {
        j["probe"]["mixed"] = dump_matrix(m.probe.mat());
    }

    json theta = json::array();
    for (int i = 0; i < m.parameter_count(); ++i) theta.push_back(m.theta[i]);
    j["theta"] = theta;

    switch (m.noise.kind) {
        case model::NoiseKind::None:
            j["noise"]["kind"] = "none";
            break;
        case model::NoiseKind::GlobalDepolarizing:
            j["noise"]["kind"] = "global-depolarizing";
            j["noise"]["lambda"] = m.noise.lambda;
            break;
        case model::NoiseKind::LocalDepolarizing:
            j["noise"]["kind"] = "local-depolarizing";
            j["noise"]["lambda"] = m.noise.lambda;
            j["noise"]["site_dims"] = m.noise.site_dims;
            break;
    }
    return j.dump(indent) + "\n";
}

void write_model_file(const model::StatisticalModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("config: cannot write '" + path + "'");
    out << serialize_model(m);
}

model::GeneratorSet load_generators_file(const std::string& path) {
    json j = load_json(path);
    const json& jg = require(j, "generators");
    if (!jg.is_array() || jg.empty()) throw InvalidInput("config: generators must be non-empty");
    std::vector<HermitianMatrix> gens;
    for (std::size_t k = 0; k < jg.size(); ++k)
        gens.emplace_back(parse_matrix(jg[k], "generators[" + std::to_string(k) + "]"));
    return model::GeneratorSet(std::move(gens));
}

std::vector<ComplexVector> load_states_file(const std::string& path) {
    json j = load_json(path);
    const json& js = require(j, "states");
    if (!js.is_array() || js.empty()) throw InvalidInput("config: states must be non-empty");
    std::vector<ComplexVector> states;
    for (std::size_t k = 0; k < js.size(); ++k)
        states.push_back(parse_vector(js[k], "states[" + std::to_string(k) + "]"));
    return states;
}

}  // namespace qincompat::config
