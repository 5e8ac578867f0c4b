#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qincompat/holevo.hpp"

namespace qincompat::sweep {

struct Quantities {
    bool incompatibility = true;  // I (and r, same SDP)
    bool istar = true;
    bool scalar_bounds = true;  // C_S, C_H, C_Z at the identity weight
    bool purity = true;
};

struct SweepSpec {
    double lambda_from = 0.0;
    double lambda_to = 1.0;
    int steps = 2;  // >= 2, endpoints inclusive
    Quantities quantities;
};

struct SweepRow {
    double lambda = 0.0;
    std::optional<double> incompatibility, istar, r, c_s, c_h, c_z, purity;
    std::string status = "ok";  // ok | undefined | <solver status>
};

// Evaluate one model point at a given noise strength.
SweepRow evaluate_point(const model::StatisticalModel& base, double lambda,
                        const Quantities& quantities, const holevo::HolevoOptions& opts = {});

// Grid evaluation, parallel over points up to `workers` (0: all available).
// Rows come back ordered by grid index whatever the completion order; a
// failing point gets a status string and the run continues.
std::vector<SweepRow> run_sweep(const model::StatisticalModel& base, const SweepSpec& spec,
                                int workers = 0, const holevo::HolevoOptions& opts = {});

extern const char* const kCsvHeader;  // "lambda,I,Istar,r,C_S,C_H,C_Z,purity,status"

// 12 significant digits, '.' decimal separator, '\n' line endings. Undefined
// quantities (the lambda = 0 point) are empty fields.
void write_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_csv_file(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace qincompat::sweep
