#include "hypflow/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

namespace hypflow {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string label(const InequalityReport& r) {
    std::string s = r.name;
    if (r.k >= 0 && r.name != "thm14") s += " k=" + std::to_string(r.k);
    if (r.m >= 0 && r.name != "thm14") s += (r.name == "conj11" || r.name == "conj12" ? " l=" : " m=") + std::to_string(r.m);
    return s;
}

}  // namespace

void write_reports_csv(std::ostream& out, std::span<const InequalityReport> reports) {
    out << "name,k,m,shape_id,resolution,lhs,rhs,slack,relative_slack,tolerance,verdict,hypothesis_ok,exploratory,"
           "rhs_alt,rhs_agreement,note\n";
    const auto old = out.precision(17);
    for (const auto& r : reports) {
        out << r.name << ',' << r.k << ',' << r.m << ',' << csv_field(r.shape_id) << ',' << csv_field(r.resolution) << ','
            << r.lhs << ',' << r.rhs << ',' << r.slack << ',' << r.relative_slack << ',' << r.tolerance << ','
            << to_string(r.verdict) << ',' << (r.hypothesis_ok ? 1 : 0) << ',' << (r.exploratory ? 1 : 0) << ','
            << r.rhs_alt << ',' << r.rhs_agreement << ',' << csv_field(r.note) << '\n';
    }
    out.precision(old);
}

void write_reports_text(std::ostream& out, std::span<const InequalityReport> reports) {
    std::map<std::string, int> tally;
    std::size_t wid = 10, wlab = 12;
    for (const auto& r : reports) {
        wid = std::max(wid, r.shape_id.size());
        wlab = std::max(wlab, label(r).size());
    }
    out << std::left << std::setw(static_cast<int>(wid)) << "shape" << "  " << std::setw(static_cast<int>(wlab)) << "check"
        << "  " << std::right << std::setw(14) << "lhs" << std::setw(14) << "rhs" << std::setw(12) << "rel_slack"
        << "  verdict\n";
    for (const auto& r : reports) {
        out << std::left << std::setw(static_cast<int>(wid)) << r.shape_id << "  " << std::setw(static_cast<int>(wlab))
            << label(r) << "  " << std::right << std::setprecision(8) << std::setw(14) << r.lhs << std::setw(14) << r.rhs
            << std::setprecision(3) << std::scientific << std::setw(12) << r.relative_slack << std::defaultfloat << "  "
            << to_string(r.verdict) << (r.exploratory ? " (exploratory)" : "");
        if (!r.note.empty()) out << "  [" << r.note << "]";
        out << '\n';
        ++tally[(r.exploratory ? "exploratory " : "") + to_string(r.verdict)];
    }
    out << "verdicts:";
    for (const auto& [k, v] : tally) out << ' ' << k << '=' << v;
    out << '\n';
    out << std::setprecision(6);
}

void write_audit_text(std::ostream& out, const AuditReport& audit) {
    out << "monotonicity audit: " << audit.samples << " samples, " << audit.samples_static_convex
        << " with nonnegative static margin\n";
    for (const auto& row : audit.rows) {
        const char* dir = row.claim.direction > 0 ? "non-decreasing" : row.claim.direction < 0 ? "non-increasing" : "constant";
        out << "  " << std::left << std::setw(5) << row.claim.functional << std::right << ' ' << std::setw(14) << dir
            << "  worst step " << std::setprecision(3) << std::scientific << row.worst_violation << " ("
            << row.worst_ratio << " of tolerance)" << std::defaultfloat << "  "
            << (row.gated ? "gated" : row.holds ? "holds" : "VIOLATED") << '\n';
    }
    out << std::setprecision(6);
}

void write_consistency_text(std::ostream& out, const ConsistencyReport& rep) {
    out << "variational consistency (centered differences vs surface integrals):\n";
    for (const auto& row : rep.rows) {
        out << "  " << std::left << std::setw(5) << row.name << std::right << std::setprecision(3) << std::scientific
            << "  max|err| " << row.max_abs_error << "  max|rate| " << row.max_abs_rate << "  rel " << row.max_relative_error
            << std::defaultfloat << '\n';
    }
    out << std::setprecision(6);
}

void write_flow_summary(std::ostream& out, const FlowResult& res, const FlowSpec& spec) {
    const auto& st = res.state;
    out << "flow: " << spec.describe() << '\n';
    out << "grid: " << st.graph.grid().describe() << '\n';
    out << "status: " << to_string(res.status);
    if (!res.message.empty()) out << " (" << res.message << ")";
    out << '\n';
    out << std::setprecision(10);
    out << "t: " << st.t << "  steps: " << st.steps << "  last dt: " << st.dt << '\n';
    if (!st.monitors.empty()) {
        const auto& a = st.monitors.front();
        const auto& b = st.monitors.back();
        out << "max|Dphi|^2: " << a.max_grad_sq << " -> " << b.max_grad_sq << '\n';
        out << "min static margin: " << a.min_static_margin << " -> " << b.min_static_margin << '\n';
        double drift = 0.0;
        for (const auto& m : st.monitors) drift = std::max(drift, std::abs(m.functionals.Wl[0] / a.functionals.Wl[0] - 1.0));
        out << "Wl0: " << a.functionals.Wl[0] << " -> " << b.functionals.Wl[0] << "  (max relative drift " << drift << ")\n";
        out << "fitted decay rate: " << res.alpha_fit << "  run-min rate bound: " << res.alpha_hat << '\n';
        out << "mean radius at end: " << res.r_inf;
        if (spec.family == FlowFamily::weighted_vol_preserving) out << "  predicted: " << res.r_inf_predicted;
        out << '\n';
    }
    const auto b = c0_barrier(st.steps_log);
    out << "C0 barrier: rise of max phi " << b.max_rise_of_max << ", drop of min phi " << b.max_drop_of_min << " -> "
        << (b.holds() ? "holds" : "VIOLATED") << '\n';
    out << std::setprecision(6);
}

}  // namespace hypflow
