#pragma once

// Locally constrained curvature flows of radial graphs, integrated in the
// nonparametric form d(phi)/dt = F v / lambda with explicit RK4.

#include <array>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hypflow/functionals.hpp"
#include "hypflow/hypersurface.hpp"
#include "hypflow/symfun.hpp"

namespace hypflow {

enum class FlowFamily {
    weighted_vol_preserving,  // Phi(1) - Phi(u F / lambda')
    sx_inverse,               // Phi(lambda' / u) - Phi(F)
    bgl,                      // lambda' E_{k-1} / E_k - u, k = speed.k
};

std::string to_string(FlowFamily f);

struct FlowSpec {
    FlowFamily family = FlowFamily::weighted_vol_preserving;
    SpeedFunctionSpec speed;
    double t_end = 10.0;
    /// Fraction of the RK4 stability limit used for the time step, in (0, 1].
    double cfl = 0.7;
    /// Overrides the CFL controller when positive.
    double fixed_dt = 0.0;
    /// Monitor cadence in flow time; samples land exactly on multiples.
    double sample_dt = 0.05;
    double convergence_threshold = 1e-10;
    /// Damp longitude modes the latitude spacing cannot resolve near the poles (full2d).
    bool polar_filter = true;

    /// F = E_1 in the weighted-volume-preserving family.
    static FlowSpec locally_mcf();
    /// 1/F - u/lambda' with F = (E_k/E_l)^{1/(k-l)}.
    static FlowSpec sx_inverse_flow(int k, int l);

    void validate(int n) const;
    std::string describe() const;
};

/// Per-node normal speed; throws ConeViolation carrying the node index.
std::vector<double> speed_field(const FlowSpec& spec, const CurvatureField& field);

struct NodeSpeed {
    double F = 0.0;
    /// max_i(-dF/dkappa_i) / lambda^2, the diffusion coefficient of the phi equation.
    double diffusion = 0.0;
};
NodeSpeed node_speed(const FlowSpec& spec, const NodeCurvature& nc, int n);
NodeSpeed node_speed(const FlowSpec& spec, const NodeCurvature& nc, const SymmetricPoint& sp);

struct MonitorSample {
    double t = 0.0;
    double min_phi = 0.0;
    double max_phi = 0.0;
    double max_grad_sq = 0.0;
    double min_static_margin = 0.0;
    /// Minimum over nodes of 2(n-1)/(n lambda lambda' v).
    double alpha_bound = 0.0;
    double max_abs_speed = 0.0;
    double mean_radius = 0.0;
    FunctionalRecord functionals;
    /// Surface-integral right-hand sides of the variation formulas.
    VariationRates rates;
};

/// One entry per accepted step, taken from the state at the start of the step.
struct StepLog {
    double t = 0.0;
    double dt = 0.0;
    double min_phi = 0.0;
    double max_phi = 0.0;
    double max_grad_sq = 0.0;
    double min_static_margin = 0.0;
};

struct FlowState {
    RadialGraph graph;
    double t = 0.0;
    double dt = 0.0;
    long steps = 0;
    std::vector<MonitorSample> monitors;
    std::vector<StepLog> steps_log;
};

enum class FlowStatus { converged, reached_t_end, cone_violation, blow_up, lost_star_shape };

std::string to_string(FlowStatus s);

struct FlowResult {
    explicit FlowResult(FlowState s) : state(std::move(s)) {}

    FlowState state;
    FlowStatus status = FlowStatus::reached_t_end;
    std::string message;
    long failure_node = -1;
    /// Fitted exponential rate of max|D phi|^2 over the last half of the monitors.
    double alpha_fit = 0.0;
    /// Run minimum of the pointwise rate bound.
    double alpha_hat = 0.0;
    double r_inf = 0.0;
    /// h_0^{-1}(Wl_0(Omega_0)), meaningful for weighted_vol_preserving.
    double r_inf_predicted = 0.0;

    bool aborted() const noexcept {
        return status == FlowStatus::cone_violation || status == FlowStatus::blow_up ||
               status == FlowStatus::lost_star_shape;
    }
};

/// Explicit RK4 integrator with reusable buffers.
class FlowStepper {
public:
    FlowStepper(const SphereGrid& grid, FlowSpec spec);
    ~FlowStepper();
    FlowStepper(const FlowStepper&) = delete;
    FlowStepper& operator=(const FlowStepper&) = delete;

    /// Stable step for the current state.
    double stable_dt(std::span<const double> phi);
    /// Advances phi by one RK4 step of size dt.  Throws on cone violation or
    /// loss of star-shapedness; NaN is reported by returning false.
    bool step(std::vector<double>& phi, double dt);
    /// Statistics of the state passed to the most recent stable_dt call.
    const StepLog& last_stats() const noexcept { return stats_; }

private:
    double tendency(std::span<const double> phi, std::span<double> out, bool record);

    SphereGrid grid_;
    FlowSpec spec_;
    std::vector<NodeDerivatives> derivs_;
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
    StepLog stats_;
    double d_max_ = 0.0;
    bool k1_fresh_ = false;
    struct Filter;
    std::unique_ptr<Filter> filter_;
};

MonitorSample sample_state(const RadialGraph& graph, const FlowSpec& spec, double t);

FlowResult run(const RadialGraph& initial, const FlowSpec& spec);

/// Least-squares slope of -ln(max|D phi|^2) over the last half of the samples.
double fit_decay_rate(std::span<const MonitorSample> monitors);

struct ConsistencyRow {
    std::string name;  // "W<k>" or "Wl<k>"
    double max_abs_error = 0.0;
    double max_abs_rate = 0.0;
    /// Largest |measured - rhs| / (|rhs| + h^2 max(max|rhs|, max|value| / T)) over
    /// interior samples, T the sampled time span.
    double max_relative_error = 0.0;
};
struct ConsistencyReport {
    std::vector<ConsistencyRow> rows;
    double worst_relative() const;
};

/// Centered time differences of the monitored functionals against the
/// surface-integral rates.  Needs at least three samples at uniform spacing.
ConsistencyReport variational_consistency(std::span<const MonitorSample> monitors, double h);

struct BarrierReport {
    /// Largest per-step increase of max phi and decrease of min phi.
    double max_rise_of_max = 0.0;
    double max_drop_of_min = 0.0;
    bool holds(double slack = 1e-8) const { return max_rise_of_max <= slack && max_drop_of_min <= slack; }
};
BarrierReport c0_barrier(std::span<const StepLog> log);

/// Monitor CSV: header row and one row per sample.
void write_monitors_csv(std::ostream& out, std::span<const MonitorSample> monitors, int n);

}  // namespace hypflow
