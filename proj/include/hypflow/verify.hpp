#pragma once

// Inequality checks on static shapes and monotonicity audits of flow runs.

#include <span>
#include <string>
#include <vector>

#include "hypflow/flows.hpp"
#include "hypflow/functionals.hpp"
#include "hypflow/hypersurface.hpp"

namespace hypflow {

enum class Verdict { pass, equality, fail, informational };

std::string to_string(Verdict v);

/// Multipliers c in c * h^2, scaled by |lhs| for inequalities and by |value|
/// for monotone series.
struct Tolerances {
    double equality = 10.0;
    double fail = 10.0;
    double monotone = 10.0;
    /// Static convexity is accepted when min static_margin >= -hypothesis * h^2.
    double hypothesis = 10.0;
};

/// A shape with its curvature field and functionals evaluated once.
struct Snapshot {
    Snapshot(RadialGraph graph, std::string shape_id);

    RadialGraph graph;
    CurvatureField field;
    FunctionalRecord record;
    std::string shape_id;
    double h = 0.0;

    int n() const noexcept { return field.n; }
    std::string resolution() const { return graph.grid().describe(); }
    bool static_convex(const Tolerances& tol) const;
};

struct InequalityReport {
    std::string name;  // thm13, thm14, thm15, minkowski, heintze_karcher, newton_maclaurin, conj11..13
    int k = -1;
    int m = -1;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double relative_slack = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::informational;
    bool hypothesis_ok = true;
    /// Conjecture probes: verdicts are recorded but never count as failures.
    bool exploratory = false;
    /// Second evaluation of the bound (explicit form for thm13) and its relative disagreement.
    double rhs_alt = 0.0;
    double rhs_agreement = 0.0;
    std::string shape_id;
    std::string resolution;
    std::string note;

    bool counts_as_failure() const noexcept { return verdict == Verdict::fail && !exploratory; }
};

/// Wl_k >= h_k(h_0^{-1}(Wl_0)), 1 <= k <= n+1, static convex.
InequalityReport check_thm13(const Snapshot& s, int k, const Tolerances& tol = {});
/// Wl_0 >= h_0(f_0^{-1}(W_0)), star-shaped.
InequalityReport check_thm14(const Snapshot& s, const Tolerances& tol = {});
/// Wl_{k+1} >= h_{k+1}(f_m^{-1}(W_m)), 0 <= m <= k <= n, static convex.
InequalityReport check_thm15(const Snapshot& s, int k, int m, const Tolerances& tol = {});
/// Identity Wl_k = integral of u E_k, 1 <= k <= n.
InequalityReport check_minkowski(const Snapshot& s, int k, const Tolerances& tol = {});
/// integral of lambda'/E_1 >= integral of u, mean convex.
InequalityReport check_heintze_karcher(const Snapshot& s, const Tolerances& tol = {});
/// Worst node of E_k^2 >= E_{k-1} E_{k+1} over nodes in Gamma_k^+, 1 <= k <= n-1.
InequalityReport check_newton_maclaurin(const Snapshot& s, int k, const Tolerances& tol = {});

/// Every index combination of the named checks.
std::vector<InequalityReport> run_checks(const Snapshot& s, std::span<const std::string> names, const Tolerances& tol = {});
const std::vector<std::string>& all_check_names();

/// Open conjectures: general l (static convex), (k-1)-convex and k-convex
/// star-shaped variants.  Reports are marked exploratory.
std::vector<InequalityReport> probe_conjectures(const Snapshot& s, const Tolerances& tol = {});

// ---------------------------------------------------------------------------

struct MonotoneClaim {
    std::string functional;  // "W<m>" or "Wl<k>"
    /// +1 non-decreasing, -1 non-increasing, 0 constant.
    int direction = 0;
    bool needs_static_convex = false;
};

/// Functionals the theory makes monotone along the given flow.
std::vector<MonotoneClaim> monotone_claims(const FlowSpec& spec, int n);

struct AuditRow {
    MonotoneClaim claim;
    /// Largest step against the claimed direction, and the largest such step
    /// divided by its tolerance c h^2 dt |value|.
    double worst_violation = 0.0;
    double worst_ratio = 0.0;
    bool holds = true;
    /// Hypothesis failed somewhere along the run; the row is informational.
    bool gated = false;
};

struct AuditReport {
    std::vector<AuditRow> rows;
    std::size_t samples = 0;
    /// Samples with lambda' kappa_i - u >= -tol, the sign the integrand bounds rely on.
    std::size_t samples_static_convex = 0;
    bool all_hold() const;
};

AuditReport monotonicity_audit(std::span<const MonitorSample> monitors, const FlowSpec& spec, double h,
                               const Tolerances& tol = {});

// ---------------------------------------------------------------------------

struct CorpusItem {
    std::string id;
    ShapeSpec shape;
};

/// Centered spheres r0 in {0.5, 1, 2}; off-center spheres rho = 1, d in
/// {0.1, 0.3, 0.5}; perturbed spheres eps in {0.02, 0.05, 0.1}, m in {2, 3}.
std::vector<CorpusItem> default_corpus();

struct CorpusResult {
    std::vector<InequalityReport> reports;
    std::size_t failures() const;
};

CorpusResult run_corpus(std::span<const CorpusItem> items, const SphereGrid& grid, std::span<const std::string> checks,
                        const Tolerances& tol = {}, bool exploratory = false);

}  // namespace hypflow
