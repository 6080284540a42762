#pragma once

#include "femwarp/deformation_spec.hpp"
#include "femwarp/quality.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace femwarp {

/// Flat `key=value` lines, one per field, in a fixed order.
void write_quality(std::ostream& out, const Mesh& mesh, const QualityReport& quality);
void write_run_report(std::ostream& out, const DeformationSpec& spec, const RunResult& run);

struct SweepRow {
    double param = 0.0;
    WarpOutcome outcome = WarpOutcome::success;
    std::size_t reversals = 0;
    int n_factorizations = 0;
};

/// Header `param,outcome,reversals,n_factorizations`, LF line endings.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Parameter of the last SUCCESS row before the first REVERSED row, or
/// nothing when the first row already reversed.
[[nodiscard]] std::optional<double> last_success(const std::vector<SweepRow>& rows);

/// Sweep parameters are printed with 12 significant digits so a grid such
/// as 0:1:0.1 reads back as written.
[[nodiscard]] std::string format_param(double value);

}  // namespace femwarp
