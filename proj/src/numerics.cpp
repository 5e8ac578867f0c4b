#include "qincompat/numerics.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "qincompat/errors.hpp"

namespace qincompat {

namespace {
NumericsConfig g_active{};
}

const NumericsConfig& NumericsConfig::active() { return g_active; }

void NumericsConfig::set_active(const NumericsConfig& cfg) { g_active = cfg; }

NumericsConfig load_numerics_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("numerics config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput("numerics config: " + std::string(e.what()));
    }

    NumericsConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "hermiticity_silent_tol") cfg.hermiticity_silent_tol = value.get<double>();
        else if (key == "hermiticity_error_tol") cfg.hermiticity_error_tol = value.get<double>();
        else if (key == "psd_clamp_rel") cfg.psd_clamp_rel = value.get<double>();
        else if (key == "phi_taylor_threshold") cfg.phi_taylor_threshold = value.get<double>();
        else if (key == "support_rel_tol") cfg.support_rel_tol = value.get<double>();
        else if (key == "offsupport_tol") cfg.offsupport_tol = value.get<double>();
        else if (key == "singular_fisher_rel") cfg.singular_fisher_rel = value.get<double>();
        else if (key == "trace_tol") cfg.trace_tol = value.get<double>();
        else if (key == "traceless_tol") cfg.traceless_tol = value.get<double>();
        else if (key == "unitary_tol") cfg.unitary_tol = value.get<double>();
        else if (key == "sdp_gap_tol") cfg.sdp_gap_tol = value.get<double>();
        else if (key == "sdp_feas_tol") cfg.sdp_feas_tol = value.get<double>();
        else if (key == "sdp_max_iter") cfg.sdp_max_iter = value.get<int>();
        else throw InvalidInput("numerics config: unknown key '" + key + "'");
    }
    NumericsConfig::set_active(cfg);
    return cfg;
}

}  // namespace qincompat
