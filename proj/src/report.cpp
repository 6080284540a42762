#include "femwarp/report.hpp"

#include "femwarp/mesh_io.hpp"

#include <cstdio>
#include <ostream>

namespace femwarp {

namespace {

void stats(std::ostream& out, const char* name, const Stats& s)
{
    out << name << "_min=" << format_double(s.min) << '\n'
        << name << "_max=" << format_double(s.max) << '\n'
        << name << "_mean=" << format_double(s.mean) << '\n';
}

}  // namespace

std::string format_param(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value == 0.0 ? 0.0 : value);
    return buf;
}

void write_quality(std::ostream& out, const Mesh& mesh, const QualityReport& q)
{
    out << "dim=" << mesh.dim() << '\n'
        << "num_nodes=" << mesh.num_nodes() << '\n'
        << "num_elements=" << mesh.num_elements() << '\n'
        << "num_boundary=" << mesh.boundary_ids().size() << '\n'
        << "h=" << format_double(q.h) << '\n'
        << "reversals=" << q.reversals << '\n'
        << "near_degenerate=" << q.near_degenerate << '\n';
    stats(out, "measure", q.measure);
    stats(out, "aspect", q.aspect);
    stats(out, "inverse_mean_ratio", q.inverse_mean_ratio);
}

void write_run_report(std::ostream& out, const DeformationSpec& spec, const RunResult& run)
{
    const auto& r = run.report;
    std::size_t accepted = 0;
    for (const auto& step : r.steps)
        accepted += step.accepted ? 1 : 0;
    out << "outcome=" << to_string(r.outcome) << '\n'
        << "algorithm=" << to_string(spec.algorithm) << '\n'
        << "scheme=" << to_string(spec.scheme) << '\n'
        << "motion=" << to_string(spec.motion) << '\n'
        << "reversals=" << r.reversals << '\n'
        << "n_factorizations=" << r.n_factorizations << '\n'
        << "t_reached=" << format_double(r.t_reached) << '\n'
        << "steps_tried=" << r.steps.size() << '\n'
        << "steps_accepted=" << accepted << '\n'
        << "untangler_used=" << (run.untangler_used ? 1 : 0) << '\n';
    if (run.untangle) {
        out << "untangle_outcome=" << to_string(run.untangle->outcome) << '\n'
            << "untangle_sweeps=" << run.untangle->sweeps << '\n';
    }
    if (run.failed_frame)
        out << "failed_frame=" << *run.failed_frame << '\n';
    write_quality(out, run.mesh, r.quality);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "param,outcome,reversals,n_factorizations\n";
    for (const auto& row : rows)
        out << format_param(row.param) << ',' << to_string(row.outcome) << ',' << row.reversals << ','
            << row.n_factorizations << '\n';
}

std::optional<double> last_success(const std::vector<SweepRow>& rows)
{
    std::optional<double> best;
    for (const auto& row : rows) {
        if (row.outcome != WarpOutcome::success)
            break;
        best = row.param;
    }
    return best;
}

}  // namespace femwarp
