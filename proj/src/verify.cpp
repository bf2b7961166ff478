#include "hypflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "hypflow/errors.hpp"

namespace hypflow {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::equality: return "equality";
        case Verdict::fail: return "fail";
        case Verdict::informational: return "informational";
    }
    return "?";
}

namespace {

int min_cone_index(const CurvatureField& f) {
    int c = std::numeric_limits<int>::max();
    for (const auto& nc : f.nodes) c = std::min(c, nc.cone_index);
    return c;
}

InequalityReport make_report(const Snapshot& s, std::string name, int k, int m) {
    InequalityReport r;
    r.name = std::move(name);
    r.k = k;
    r.m = m;
    r.shape_id = s.shape_id;
    r.resolution = s.resolution();
    return r;
}

void classify(InequalityReport& r, const Snapshot& s, const Tolerances& tol, bool identity = false) {
    r.slack = r.lhs - r.rhs;
    r.relative_slack = r.lhs != 0.0 ? r.slack / std::abs(r.lhs) : r.slack;
    const double h2 = s.h * s.h;
    const double tol_eq = tol.equality * h2 * std::abs(r.lhs);
    const double tol_fail = tol.fail * h2 * std::abs(r.lhs);
    r.tolerance = tol_eq;
    if (!r.hypothesis_ok) {
        r.verdict = Verdict::informational;
    } else if (identity) {
        r.verdict = std::abs(r.slack) <= tol_eq ? Verdict::equality : Verdict::fail;
    } else if (r.slack < -tol_fail) {
        r.verdict = Verdict::fail;
    } else if (std::abs(r.slack) <= tol_eq) {
        r.verdict = Verdict::equality;
    } else {
        r.verdict = Verdict::pass;
    }
}

// lhs >= h_target(inverse of source profile at value); a DomainError turns the report informational.
void set_profile_bound(InequalityReport& r, int n, int target, int source, bool source_weighted, double value) {
    try {
        r.rhs = ball_profile(n, target, true, ball_profile_inverse(n, source, source_weighted, value));
    } catch (const DomainError& e) {
        r.hypothesis_ok = false;
        r.note = std::string("profile inverse undefined: ") + e.what();
    }
}

void gate_static_convex(InequalityReport& r, const Snapshot& s, const Tolerances& tol) {
    if (!s.static_convex(tol)) {
        r.hypothesis_ok = false;
        std::ostringstream os;
        os << "not static convex (min static margin " << s.field.min_static_margin() << ")";
        r.note = os.str();
    }
}

}  // namespace

Snapshot::Snapshot(RadialGraph g, std::string id)
    : graph(std::move(g)), field(curvature(graph)), shape_id(std::move(id)), h(graph.grid().h()) {
    record = evaluate_functionals(field, graph);
}

bool Snapshot::static_convex(const Tolerances& tol) const {
    return field.min_static_margin() >= -tol.hypothesis * h * h;
}

InequalityReport check_thm13(const Snapshot& s, int k, const Tolerances& tol) {
    const int n = s.n();
    if (k < 1 || k > n + 1) throw InvalidInput("thm13 needs 1 <= k <= n+1");
    auto r = make_report(s, "thm13", k, -1);
    r.lhs = s.record.Wl[static_cast<std::size_t>(k)];
    const double wl0 = s.record.Wl[0];
    set_profile_bound(r, n, k, 0, true, wl0);
    if (r.hypothesis_ok) {
        r.rhs_alt = weighted_bound_explicit(n, k, wl0);
        r.rhs_agreement = std::abs(r.rhs_alt - r.rhs) / std::abs(r.rhs);
    }
    gate_static_convex(r, s, tol);
    classify(r, s, tol);
    return r;
}

InequalityReport check_thm14(const Snapshot& s, const Tolerances& tol) {
    auto r = make_report(s, "thm14", 0, 0);
    r.lhs = s.record.Wl[0];
    set_profile_bound(r, s.n(), 0, 0, false, s.record.W[0]);
    classify(r, s, tol);
    return r;
}

InequalityReport check_thm15(const Snapshot& s, int k, int m, const Tolerances& tol) {
    const int n = s.n();
    if (k < 0 || k > n || m < 0 || m > k) throw InvalidInput("thm15 needs 0 <= m <= k <= n");
    auto r = make_report(s, "thm15", k, m);
    r.lhs = s.record.Wl[static_cast<std::size_t>(k + 1)];
    set_profile_bound(r, n, k + 1, m, false, s.record.W[static_cast<std::size_t>(m)]);
    gate_static_convex(r, s, tol);
    classify(r, s, tol);
    return r;
}

InequalityReport check_minkowski(const Snapshot& s, int k, const Tolerances& tol) {
    if (k < 1 || k > s.n()) throw InvalidInput("minkowski needs 1 <= k <= n");
    auto r = make_report(s, "minkowski", k, -1);
    r.lhs = s.record.Wl[static_cast<std::size_t>(k)];
    r.rhs = r.lhs - s.record.minkowski_residuals[static_cast<std::size_t>(k - 1)];
    classify(r, s, tol, true);
    return r;
}

InequalityReport check_heintze_karcher(const Snapshot& s, const Tolerances& tol) {
    auto r = make_report(s, "heintze_karcher", -1, -1);
    double lhs = 0.0, rhs = 0.0;
    for (const auto& nc : s.field.nodes) {
        if (!(nc.E[1] > 0.0)) {
            r.hypothesis_ok = false;
            r.note = "not mean convex";
            break;
        }
        lhs += nc.lambda_prime / nc.E[1] * nc.area_weight;
        rhs += nc.u * nc.area_weight;
    }
    r.lhs = lhs;
    r.rhs = rhs;
    classify(r, s, tol);
    return r;
}

InequalityReport check_newton_maclaurin(const Snapshot& s, int k, const Tolerances& tol) {
    const int n = s.n();
    if (k < 1 || k > n - 1) throw InvalidInput("newton_maclaurin needs 1 <= k <= n-1");
    auto r = make_report(s, "newton_maclaurin", k, -1);
    double worst = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& nc : s.field.nodes) {
        if (nc.cone_index < k) continue;
        const double lhs = nc.E[static_cast<std::size_t>(k)] * nc.E[static_cast<std::size_t>(k)];
        const double rhs = nc.E[static_cast<std::size_t>(k + 1)] * nc.E[static_cast<std::size_t>(k - 1)];
        const double rel = (lhs - rhs) / lhs;
        if (rel < worst) {
            worst = rel;
            r.lhs = lhs;
            r.rhs = rhs;
        }
        any = true;
    }
    if (!any) {
        r.hypothesis_ok = false;
        r.note = "no node in the cone";
    }
    classify(r, s, tol);
    return r;
}

const std::vector<std::string>& all_check_names() {
    static const std::vector<std::string> names{"thm13", "thm14", "thm15", "minkowski", "heintze_karcher", "newton_maclaurin"};
    return names;
}

std::vector<InequalityReport> run_checks(const Snapshot& s, std::span<const std::string> names, const Tolerances& tol) {
    const int n = s.n();
    std::vector<InequalityReport> out;
    for (const auto& name : names) {
        if (name == "thm13") {
            for (int k = 1; k <= n + 1; ++k) out.push_back(check_thm13(s, k, tol));
        } else if (name == "thm14") {
            out.push_back(check_thm14(s, tol));
        } else if (name == "thm15") {
            for (int k = 0; k <= n; ++k) {
                for (int m = 0; m <= k; ++m) out.push_back(check_thm15(s, k, m, tol));
            }
        } else if (name == "minkowski") {
            for (int k = 1; k <= n; ++k) out.push_back(check_minkowski(s, k, tol));
        } else if (name == "heintze_karcher") {
            out.push_back(check_heintze_karcher(s, tol));
        } else if (name == "newton_maclaurin") {
            for (int k = 1; k <= n - 1; ++k) out.push_back(check_newton_maclaurin(s, k, tol));
        } else {
            throw InvalidInput("unknown check: " + name);
        }
    }
    return out;
}

std::vector<InequalityReport> probe_conjectures(const Snapshot& s, const Tolerances& tol) {
    const int n = s.n();
    const int cone = min_cone_index(s.field);
    std::vector<InequalityReport> out;
    auto cone_gate = [&](InequalityReport& r, int need) {
        if (cone < need) {
            r.hypothesis_ok = false;
            r.note = "not " + std::to_string(need) + "-convex";
        }
    };
    for (int k = 1; k <= n + 1; ++k) {
        for (int l = 0; l < k; ++l) {
            const double lhs = s.record.Wl[static_cast<std::size_t>(k)];
            const double src = s.record.Wl[static_cast<std::size_t>(l)];
            if (l >= 1) {
                auto r = make_report(s, "conj11", k, l);
                r.lhs = lhs;
                set_profile_bound(r, n, k, l, true, src);
                if (r.hypothesis_ok) gate_static_convex(r, s, tol);
                classify(r, s, tol);
                r.exploratory = true;
                out.push_back(r);
            }
            auto r = make_report(s, "conj12", k, l);
            r.lhs = lhs;
            set_profile_bound(r, n, k, l, true, src);
            if (r.hypothesis_ok) cone_gate(r, k - 1);
            classify(r, s, tol);
            r.exploratory = true;
            out.push_back(r);
        }
    }
    for (int k = 0; k <= n; ++k) {
        for (int m = 0; m <= k; ++m) {
            auto r = make_report(s, "conj13", k, m);
            r.lhs = s.record.Wl[static_cast<std::size_t>(k + 1)];
            set_profile_bound(r, n, k + 1, m, false, s.record.W[static_cast<std::size_t>(m)]);
            if (r.hypothesis_ok) cone_gate(r, k);
            classify(r, s, tol);
            r.exploratory = true;
            out.push_back(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<MonotoneClaim> monotone_claims(const FlowSpec& spec, int n) {
    std::vector<MonotoneClaim> out;
    const auto& sp = spec.speed;
    switch (spec.family) {
        case FlowFamily::weighted_vol_preserving:
            if (sp.kind == SpeedKind::mean && sp.phi.kind == PhiKind::identity) {
                out.push_back({"Wl0", 0, false});
                out.push_back({"W0", +1, false});
                for (int k = 1; k <= n - 1; ++k) out.push_back({"Wl" + std::to_string(k), -1, true});
            }
            break;
        case FlowFamily::sx_inverse: {
            const bool inverse = sp.phi.kind == PhiKind::neg_inv_power && sp.phi.p == 1.0;
            int j = 0;
            if (sp.kind == SpeedKind::mean) j = 1;
            if (sp.kind == SpeedKind::quotient && sp.l == sp.k - 1) j = sp.k;
            if (inverse && j >= 1) {
                out.push_back({"Wl0", +1, true});
                out.push_back({"Wl" + std::to_string(j + 1), -1, true});
                for (int m = 1; m <= j; ++m) out.push_back({"W" + std::to_string(m), +1, true});
            }
            break;
        }
        case FlowFamily::bgl:
            out.push_back({"W" + std::to_string(sp.k), 0, false});
            break;
    }
    return out;
}

bool AuditReport::all_hold() const {
    return std::all_of(rows.begin(), rows.end(), [](const AuditRow& r) { return r.gated || r.holds; });
}

AuditReport monotonicity_audit(std::span<const MonitorSample> monitors, const FlowSpec& spec, double h,
                               const Tolerances& tol) {
    AuditReport rep;
    rep.samples = monitors.size();
    if (monitors.empty()) return rep;
    const int n = monitors.front().functionals.n;
    const double h2 = h * h;
    for (const auto& m : monitors) {
        if (m.min_static_margin >= -tol.hypothesis * h2) ++rep.samples_static_convex;
    }
    const bool convex_throughout = rep.samples_static_convex == rep.samples;
    for (const auto& claim : monotone_claims(spec, n)) {
        const bool weighted = claim.functional.rfind("Wl", 0) == 0;
        const auto idx = static_cast<std::size_t>(std::stoi(claim.functional.substr(weighted ? 2 : 1)));
        auto value = [&](const MonitorSample& s) { return weighted ? s.functionals.Wl[idx] : s.functionals.W[idx]; };
        AuditRow row;
        row.claim = claim;
        row.gated = claim.needs_static_convex && !convex_throughout;
        for (std::size_t q = 1; q < monitors.size(); ++q) {
            const double a = value(monitors[q - 1]), b = value(monitors[q]);
            const double dt = monitors[q].t - monitors[q - 1].t;
            double violation = 0.0;
            if (claim.direction > 0) violation = a - b;
            else if (claim.direction < 0) violation = b - a;
            else violation = std::abs(b - a);
            const double allowed = tol.monotone * h2 * dt * std::max(std::abs(a), std::abs(b));
            row.worst_violation = std::max(row.worst_violation, violation);
            if (allowed > 0.0) row.worst_ratio = std::max(row.worst_ratio, violation / allowed);
            if (violation > allowed) row.holds = false;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------

std::vector<CorpusItem> default_corpus() {
    std::vector<CorpusItem> out;
    auto fmt = [](double x) {
        std::ostringstream os;
        os << x;
        return os.str();
    };
    for (double r0 : {0.5, 1.0, 2.0}) out.push_back({"centered_r" + fmt(r0), CenteredSphere{r0}});
    for (double d : {0.1, 0.3, 0.5}) out.push_back({"offcenter_d" + fmt(d), OffcenterSphere{1.0, d}});
    for (double e : {0.02, 0.05, 0.1}) {
        for (int m : {2, 3}) out.push_back({"perturbed_e" + fmt(e) + "_m" + std::to_string(m), PerturbedSphere{1.0, e, m}});
    }
    return out;
}

std::size_t CorpusResult::failures() const {
    return static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(), [](const InequalityReport& r) {
        return r.counts_as_failure();
    }));
}

CorpusResult run_corpus(std::span<const CorpusItem> items, const SphereGrid& grid, std::span<const std::string> checks,
                        const Tolerances& tol, bool exploratory) {
    CorpusResult res;
    for (const auto& item : items) {
        std::optional<Snapshot> snap;
        try {
            snap.emplace(make_shape(item.shape, grid), item.id);
        } catch (const Error& e) {
            InequalityReport r;
            r.name = "shape";
            r.shape_id = item.id;
            r.resolution = grid.describe();
            r.hypothesis_ok = false;
            r.note = e.what();
            res.reports.push_back(r);
            continue;
        }
        auto reps = run_checks(*snap, checks, tol);
        res.reports.insert(res.reports.end(), reps.begin(), reps.end());
        if (exploratory) {
            auto probes = probe_conjectures(*snap, tol);
            res.reports.insert(res.reports.end(), probes.begin(), probes.end());
        }
    }
    return res;
}

}  // namespace hypflow
