#include "qincompat/cli_app.hpp"

#include <cstdio>
#include <cstdlib>

#include <CLI11.hpp>

#include "qincompat/config.hpp"
#include "qincompat/designs.hpp"
#include "qincompat/sweep.hpp"

namespace qincompat::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitSolver = 2;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

void print_report(const holevo::IncompatReport& rep, std::ostream& out) {
    out << "I      = " << fmt(rep.incompatibility) << "\n"
        << "Istar  = " << fmt(rep.istar) << "\n"
        << "r      = " << fmt(rep.r) << "\n"
        << "C_S    = " << fmt(rep.c_s_identity) << "  (G = identity)\n"
        << "C_H    = " << fmt(rep.c_h_identity) << "\n"
        << "C_Z    = " << fmt(rep.c_z_identity) << "\n"
        << "r_sep  " << (rep.separable_exact ? "= " : ">= ") << fmt(rep.separable_bound)
        << (rep.separable_exact ? "  (exact, D = 2)" : "  (lower bound)") << "\n"
        << "sdp    : " << sdp::to_string(rep.sdp_status) << ", gap " << rep.sdp_gap
        << ", iterations " << rep.sdp_iterations << "\n";
}

int cmd_report(const std::string& model_path, const std::string& out_csv,
               const holevo::HolevoOptions& opts, int workers, std::ostream& out,
               std::ostream& err) {
    auto model = config::load_model_file(model_path);
    auto enc = model::encode(model);
    auto rep = holevo::r_figure(enc, opts);
    print_report(rep, out);
    if (!out_csv.empty()) {
        sweep::SweepRow row;
        row.lambda = model.noise.kind == model::NoiseKind::None ? 1.0 : model.noise.lambda;
        row.incompatibility = rep.incompatibility;
        row.istar = rep.istar;
        row.r = rep.r;
        row.c_s = rep.c_s_identity;
        row.c_h = rep.c_h_identity;
        row.c_z = rep.c_z_identity;
        row.purity = enc.rho_theta.purity();
        row.status = sdp::to_string(rep.sdp_status);
        sweep::write_csv_file({row}, out_csv);
    }
    if (rep.sdp_status != sdp::Status::Optimal) {
        err << "solver did not reach optimality: " << sdp::to_string(rep.sdp_status) << "\n";
        return kExitSolver;
    }
    (void)workers;
    return kExitOk;
}

int cmd_sweep(const std::string& model_path, const sweep::SweepSpec& spec,
              const std::string& out_csv, int workers, const holevo::HolevoOptions& opts,
              std::ostream& out, std::ostream& err) {
    auto model = config::load_model_file(model_path);
    auto rows = sweep::run_sweep(model, spec, workers, opts);
    if (out_csv.empty()) {
        sweep::write_csv(rows, out);
    } else {
        sweep::write_csv_file(rows, out_csv);
    }
    int failures = 0;
    for (const auto& row : rows)
        if (row.status != "ok" && row.status != "undefined") ++failures;
    if (failures > 0) {
        err << failures << " grid point(s) did not solve cleanly (see status column)\n";
        return kExitSolver;
    }
    return kExitOk;
}

int cmd_design(const std::string& kind, const std::string& generators_path,
               const std::string& states_path, const std::string& variant,
               const std::vector<double>& theta_in, const std::vector<int>& subset,
               const std::vector<int>& signs, const std::vector<double>& phases1,
               const std::vector<double>& phases2, const std::string& out_path, bool run_sdp,
               const holevo::HolevoOptions& opts, std::ostream& out, std::ostream& err) {
    auto gens = config::load_generators_file(generators_path);
    RealVector theta = RealVector::Zero(gens.count());
    if (!theta_in.empty()) {
        if (static_cast<int>(theta_in.size()) != gens.count())
            throw InvalidInput("design: theta length must match the number of generators");
        for (int i = 0; i < gens.count(); ++i) theta[i] = theta_in[i];
    }

    std::optional<model::StatisticalModel> constructed;
    if (kind == "max-entangled") {
        if (variant == "ancilla")
            constructed = designs::ancilla_model(gens, theta);
        else if (variant == "double")
            constructed = designs::double_model(gens, theta);
        else
            throw InvalidInput("design: --variant must be 'ancilla' or 'double'");
    } else if (kind == "antiparallel") {
        if (gens.count() != 2)
            throw InvalidInput("design: antiparallel construction needs exactly two generators");
        auto heff = model::effective_generators(gens, theta);
        designs::AntiparallelSpec spec;
        if (subset.empty()) {
            spec = designs::AntiparallelSpec::simple(1);
        } else {
            spec.subset = subset;
            spec.signs = signs.empty() ? std::vector<int>(subset.size(), 0) : signs;
            spec.phases1 = phases1.empty() ? std::vector<double>(subset.size(), 0.0) : phases1;
            spec.phases2 = phases2.empty() ? std::vector<double>(subset.size(), 0.0) : phases2;
        }
        designs::AntiparallelPair pair;
        try {
            pair = designs::antiparallel_pair(heff[0], heff[1], spec);
        } catch (const NoConstructionNeeded& e) {
            out << "no construction needed: " << e.what() << "\n";
            return kExitOk;
        }
        ComplexVector product(pair.psi1.size() * pair.psi2.size());
        for (Eigen::Index a = 0; a < pair.psi1.size(); ++a)
            for (Eigen::Index b = 0; b < pair.psi2.size(); ++b)
                product[a * pair.psi2.size() + b] = pair.psi1[a] * pair.psi2[b];
        std::vector<HermitianMatrix> lifted;
        const ComplexMatrix id = matcore::identity(gens.dim());
        for (int j = 0; j < gens.count(); ++j)
            lifted.emplace_back(matcore::kron(gens[j].mat(), id) +
                                matcore::kron(id, gens[j].mat()));
        constructed = model::StatisticalModel(model::DensityMatrix::pure(product),
                                              model::GeneratorSet(std::move(lifted)),
                                              model::NoiseSpec::none(), theta);
    } else if (kind == "basis-product") {
        if (states_path.empty())
            throw InvalidInput("design: basis-product needs --states");
        auto states = config::load_states_file(states_path);
        auto cert = designs::basis_product_compatibility(states, gens, theta);
        // Rebuild the model for writing (the certificate call validates inputs).
        ComplexVector product = states.at(0);
        for (std::size_t i = 1; i < states.size(); ++i) {
            ComplexVector next(product.size() * states[i].size());
            for (Eigen::Index a = 0; a < product.size(); ++a)
                for (Eigen::Index b = 0; b < states[i].size(); ++b)
                    next[a * states[i].size() + b] = product[a] * states[i][b];
            product = next;
        }
        constructed = model::StatisticalModel(
            model::DensityMatrix::pure(product),
            model::lift_local_generators(gens, static_cast<int>(states.size())),
            model::NoiseSpec::none(), theta);
        out << "certificate: " << designs::to_string(cert.verdict) << "  (||A||_F = " << cert.a_norm
            << ")\n";
        if (!out_path.empty()) config::write_model_file(*constructed, out_path);
        return kExitOk;
    } else {
        throw InvalidInput("design: --kind must be max-entangled, antiparallel or basis-product");
    }

    auto cert = designs::certify(*constructed, run_sdp, opts);
    out << "certificate: " << designs::to_string(cert.verdict) << "  (||A||_F = " << cert.a_norm;
    if (cert.sdp_r) out << ", r = " << fmt(*cert.sdp_r);
    out << ")\n";
    if (!out_path.empty()) {
        config::write_model_file(*constructed, out_path);
        out << "model written to " << out_path << "\n";
    }
    (void)err;
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (const char* env = std::getenv("QINCOMPAT_NUMERICS")) {
        try {
            load_numerics_file(env);
        } catch (const Error& e) {
            err << e.what() << "\n";
            return kExitInput;
        }
    }

    CLI::App app{"quantum multiparameter estimation incompatibility toolbox"};
    app.require_subcommand(1);

    double gap_tol = numerics().sdp_gap_tol;
    double feas_tol = numerics().sdp_feas_tol;
    int workers = 0;
    app.add_option("--gap-tol", gap_tol, "SDP duality-gap tolerance");
    app.add_option("--feas-tol", feas_tol, "SDP feasibility tolerance");
    app.add_option("--workers", workers, "worker threads (0: all available)");

    auto* report = app.add_subcommand("report", "single-point incompatibility report");
    std::string report_model, report_out;
    report->add_option("--model", report_model, "model config (JSON)")->required();
    report->add_option("--out", report_out, "also write a one-row CSV");

    auto* sweep_cmd = app.add_subcommand("sweep", "noise sweep to CSV");
    std::string sweep_model, sweep_out;
    sweep::SweepSpec spec;
    sweep_cmd->add_option("--model", sweep_model, "model config (JSON)")->required();
    sweep_cmd->add_option("--from", spec.lambda_from, "first lambda")->required();
    sweep_cmd->add_option("--to", spec.lambda_to, "last lambda")->required();
    sweep_cmd->add_option("--steps", spec.steps, "grid points (>= 2)")->required();
    sweep_cmd->add_option("--out", sweep_out, "output CSV path (default: stdout)");

    auto* design = app.add_subcommand("design", "construct a compatible model");
    std::string design_kind, design_gens, design_states, design_variant = "ancilla", design_out;
    std::vector<double> design_theta, design_phases1, design_phases2;
    std::vector<int> design_subset, design_signs;
    bool design_sdp = false;
    design->add_option("--kind", design_kind, "max-entangled | antiparallel | basis-product")
        ->required();
    design->add_option("--generators", design_gens, "generator file (JSON)")->required();
    design->add_option("--states", design_states, "orthonormal states file (basis-product)");
    design->add_option("--variant", design_variant, "max-entangled: ancilla | double");
    design->add_option("--theta", design_theta, "working point (default: 0)");
    design->add_option("--subset", design_subset, "antiparallel: 1-based commutator blocks");
    design->add_option("--signs", design_signs, "antiparallel: s_j in {0,1}");
    design->add_option("--phases1", design_phases1, "antiparallel: phases of psi1");
    design->add_option("--phases2", design_phases2, "antiparallel: phases of psi2");
    design->add_option("--out", design_out, "write the constructed model config here");
    design->add_flag("--sdp", design_sdp, "also certify through the SDP");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help() << "\n";
            return kExitOk;
        }
        err << "argument error: " << e.what() << "\n";
        return kExitInput;
    }

    holevo::HolevoOptions opts;
    opts.sdp.gap_tol = gap_tol;
    opts.sdp.feas_tol = feas_tol;
    opts.sdp.threads = workers;

    try {
        if (*report) return cmd_report(report_model, report_out, opts, workers, out, err);
        if (*sweep_cmd) return cmd_sweep(sweep_model, spec, sweep_out, workers, opts, out, err);
        if (*design)
            return cmd_design(design_kind, design_gens, design_states, design_variant,
                              design_theta, design_subset, design_signs, design_phases1,
                              design_phases2, design_out, design_sdp, opts, out, err);
    } catch (const InvalidInput& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitInput;
}

}  // namespace qincompat::cli
