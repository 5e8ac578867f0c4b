#include "qincompat/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qincompat::sweep {

const char* const kCsvHeader = "lambda,I,Istar,r,C_S,C_H,C_Z,purity,status";

namespace {

model::StatisticalModel with_lambda(const model::StatisticalModel& base, double lambda) {
    model::NoiseSpec noise = base.noise;
    noise.lambda = lambda;
    return model::StatisticalModel(base.probe, base.generators, noise, base.theta);
}

}  // namespace

SweepRow evaluate_point(const model::StatisticalModel& base, double lambda,
                        const Quantities& quantities, const holevo::HolevoOptions& opts) {
    SweepRow row;
    row.lambda = lambda;
    if (std::abs(lambda) < 1e-12) {
        // Fully depolarized: no information quantities exist at this point.
        row.status = "undefined";
        if (quantities.purity) row.purity = 1.0 / static_cast<double>(base.dim());
        return row;
    }

    try {
        model::StatisticalModel m = with_lambda(base, lambda);
        auto enc = model::encode(m);
        if (quantities.purity) row.purity = enc.rho_theta.purity();
        auto bundle = estimation::info_bundle(enc);
        if (quantities.istar) row.istar = estimation::istar(bundle);
        if (quantities.scalar_bounds) {
            auto g = estimation::WeightMatrix::identity(m.parameter_count());
            row.c_s = estimation::c_s(g, bundle.fisher);
            row.c_z = estimation::c_z(g, bundle);
        }
        if (quantities.incompatibility || quantities.scalar_bounds) {
            auto report = holevo::r_figure(enc, opts);
            if (report.sdp_status != sdp::Status::Optimal) {
                row.status = sdp::to_string(report.sdp_status);
                return row;
            }
            if (quantities.incompatibility) {
                row.r = report.r;
                row.incompatibility = report.incompatibility;
            }
            if (quantities.scalar_bounds) row.c_h = report.c_h_identity;
        }
    } catch (const Error& e) {
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

std::vector<SweepRow> run_sweep(const model::StatisticalModel& base, const SweepSpec& spec,
                                int workers, const holevo::HolevoOptions& opts) {
    if (spec.steps < 2) throw InvalidInput("run_sweep: steps must be >= 2");
    if (!(spec.lambda_from < spec.lambda_to)) throw InvalidInput("run_sweep: empty lambda range");
    if (base.noise.kind == model::NoiseKind::None)
        throw InvalidInput("run_sweep: model has no noise parameter to sweep");
    // Both endpoints must be admissible for this noise kind and dimension.
    for (double l : {spec.lambda_from, spec.lambda_to}) {
        model::NoiseSpec check = base.noise;
        check.lambda = l;
        check.validate(base.dim());
    }

    std::vector<double> grid(spec.steps);
    for (int i = 0; i < spec.steps; ++i)
        grid[i] = spec.lambda_from +
                  (spec.lambda_to - spec.lambda_from) * i / static_cast<double>(spec.steps - 1);

    std::vector<SweepRow> rows(spec.steps);
#ifdef _OPENMP
    const int nthreads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
    for (int i = 0; i < spec.steps; ++i)
        rows[i] = evaluate_point(base, grid[i], spec.quantities, opts);
    return rows;
}

namespace {

std::string format_field(const std::optional<double>& v) {
    if (!v) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", *v);
    return buf;
}

}  // namespace

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << kCsvHeader << "\n";
    char buf[40];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%.12g", row.lambda);
        out << buf << ',' << format_field(row.incompatibility) << ',' << format_field(row.istar)
            << ',' << format_field(row.r) << ',' << format_field(row.c_s) << ','
            << format_field(row.c_h) << ',' << format_field(row.c_z) << ','
            << format_field(row.purity) << ',' << row.status << "\n";
    }
}

void write_csv_file(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // '\n' endings on every platform
    if (!out) throw InvalidInput("write_csv_file: cannot write '" + path + "'");
    write_csv(rows, out);
}

}  // namespace qincompat::sweep
