#pragma once

#include <string>

namespace qincompat {

// Shared numeric tolerances. All values are absolute unless the name says
// relative ("_rel" entries are multiplied by a matrix-norm scale at the point
// of use). The process-wide instance can be replaced from a JSON file, see
// load_numerics_file().
struct NumericsConfig {
    // Hermitian construction: asymmetry up to this is silently symmetrized ...
    double hermiticity_silent_tol = 1e-12;
    // ... above this it is an input error.
    double hermiticity_error_tol = 1e-6;

    // Eigenvalues of nominally PSD matrices in [-psd_clamp_rel * ||M||, 0] are
    // clamped to zero before taking powers / square roots.
    double psd_clamp_rel = 1e-12;

    // phi(z) = (e^z - 1)/z switches to its Taylor series below this |z|.
    double phi_taylor_threshold = 1e-4;

    // Support cut for density-matrix eigenvalues, relative to the largest one.
    double support_rel_tol = 1e-12;

    // Off-support component of d(rho) larger than this is a non-differentiable model.
    double offsupport_tol = 1e-8;

    // lambda_min(F) <= singular_fisher_rel * ||F|| marks the Fisher matrix singular.
    double singular_fisher_rel = 1e-10;

    double trace_tol = 1e-10;      // |Tr(rho) - 1|
    double traceless_tol = 1e-10;  // |Tr(H)| for generators
    double unitary_tol = 1e-10;    // ||U U^dag - 1||_F

    // SDP solver defaults (per-call options can override).
    double sdp_gap_tol = 1e-8;
    double sdp_feas_tol = 1e-8;
    int sdp_max_iter = 200;

    static const NumericsConfig& active();
    static void set_active(const NumericsConfig& cfg);
};

// Parse a JSON numerics file (any subset of the field names above) and install
// it as the active configuration. Throws InvalidInput on unknown keys.
NumericsConfig load_numerics_file(const std::string& path);

inline const NumericsConfig& numerics() { return NumericsConfig::active(); }

}  // namespace qincompat
