#include "hypflow/flows.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hypflow/errors.hpp"

namespace hypflow {

namespace {

// Real-axis extent of the RK4 stability region.
constexpr double kRk4Limit = 2.785;

std::string node_position(const SphereGrid& grid, std::size_t a) {
    const int j = static_cast<int>(a / static_cast<std::size_t>(grid.n_xi()));
    const int i = static_cast<int>(a % static_cast<std::size_t>(grid.n_xi()));
    std::ostringstream os;
    os << "(j=" << j << ", i=" << i << ", theta=" << grid.theta(j);
    if (grid.mode() == GridMode::full2d) os << ", xi=" << grid.xi(i);
    os << ")";
    return os.str();
}

std::string node_label(const SphereGrid& grid, std::size_t a) {
    return "node " + std::to_string(a) + " " + node_position(grid, a);
}

}  // namespace

std::string to_string(FlowFamily f) {
    switch (f) {
        case FlowFamily::weighted_vol_preserving: return "weighted_vol_preserving";
        case FlowFamily::sx_inverse: return "sx_inverse";
        case FlowFamily::bgl: return "bgl";
    }
    return "?";
}

std::string to_string(FlowStatus s) {
    switch (s) {
        case FlowStatus::converged: return "converged";
        case FlowStatus::reached_t_end: return "reached_t_end";
        case FlowStatus::cone_violation: return "cone_violation";
        case FlowStatus::blow_up: return "blow_up";
        case FlowStatus::lost_star_shape: return "lost_star_shape";
    }
    return "?";
}

FlowSpec FlowSpec::locally_mcf() {
    FlowSpec s;
    s.family = FlowFamily::weighted_vol_preserving;
    s.speed = SpeedFunctionSpec::mean();
    return s;
}

FlowSpec FlowSpec::sx_inverse_flow(int k, int l) {
    FlowSpec s;
    s.family = FlowFamily::sx_inverse;
    s.speed = SpeedFunctionSpec::quotient(k, l, PhiFunction::neg_inv_power(1.0));
    return s;
}

void FlowSpec::validate(int n) const {
    speed.validate(n);
    if (family == FlowFamily::bgl && (speed.k < 1 || speed.k > n)) throw InvalidInput("bgl flow needs 1 <= k <= n");
    if (!(t_end > 0.0)) throw InvalidInput("t_end must be positive");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidInput("cfl must lie in (0, 1]");
    if (!(sample_dt > 0.0)) throw InvalidInput("sample_dt must be positive");
    if (fixed_dt < 0.0) throw InvalidInput("fixed_dt must be non-negative");
}

std::string FlowSpec::describe() const {
    std::ostringstream os;
    os << to_string(family) << " speed=" << speed.describe() << " t_end=" << t_end << " cfl=" << cfl
       << " sample_dt=" << sample_dt;
    if (fixed_dt > 0.0) os << " fixed_dt=" << fixed_dt;
    return os.str();
}

NodeSpeed node_speed(const FlowSpec& spec, const NodeCurvature& nc, int n) {
    return node_speed(spec, nc, eval_elementary(std::span<const double>(nc.kappa.data(), static_cast<std::size_t>(n))));
}

NodeSpeed node_speed(const FlowSpec& spec, const NodeCurvature& nc, const SymmetricPoint& sp) {
    const int n = sp.n();
    const PhiFunction& phi = spec.speed.phi;
    const bool needs_positive = phi.kind != PhiKind::identity;
    NodeSpeed out;
    double d = 0.0;
    switch (spec.family) {
        case FlowFamily::weighted_vol_preserving: {
            const SpeedValue sv = eval_speed(spec.speed, sp);
            const double s = nc.u * sv.F / nc.lambda_prime;
            if (needs_positive && !(s > 0.0)) throw ConeViolation("speed argument is not positive", sp.cone_index);
            out.F = phi.value(1.0) - phi.value(s);
            const double dphi = phi.d1(s) * nc.u / nc.lambda_prime;
            for (int i = 0; i < n; ++i) d = std::max(d, dphi * sv.dF[static_cast<std::size_t>(i)]);
            break;
        }
        case FlowFamily::sx_inverse: {
            const SpeedValue sv = eval_speed(spec.speed, sp);
            if (needs_positive && !(sv.F > 0.0)) throw ConeViolation("curvature function is not positive", sp.cone_index);
            out.F = phi.value(nc.lambda_prime / nc.u) - phi.value(sv.F);
            const double dphi = phi.d1(sv.F);
            for (int i = 0; i < n; ++i) d = std::max(d, dphi * sv.dF[static_cast<std::size_t>(i)]);
            break;
        }
        case FlowFamily::bgl: {
            const int k = spec.speed.k;
            if (sp.cone_index < k) {
                throw ConeViolation("curvature vector outside Gamma_" + std::to_string(k) + "^+", sp.cone_index);
            }
            const double ek = sp.E(k), ekm = sp.E(k - 1);
            out.F = nc.lambda_prime * ekm / ek - nc.u;
            for (int i = 0; i < n; ++i) {
                d = std::max(d, nc.lambda_prime * (ekm * sp.dE(k, i) - sp.dE(k - 1, i) * ek) / (ek * ek));
            }
            break;
        }
    }
    out.diffusion = d / (nc.lambda * nc.lambda);
    return out;
}

std::vector<double> speed_field(const FlowSpec& spec, const CurvatureField& field) {
    std::vector<double> out(field.nodes.size());
    for (std::size_t a = 0; a < field.nodes.size(); ++a) {
        try {
            out[a] = node_speed(spec, field.nodes[a], field.n).F;
        } catch (const ConeViolation& e) {
            throw ConeViolation(std::string(e.what()) + " at node " + std::to_string(a), e.cone_index(),
                                static_cast<long>(a));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

struct FlowStepper::Filter {
    int nt = 0, nx = 0;
    std::vector<int> cutoff;  // highest kept wavenumber per row, -1 if the row is untouched
    double* in = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr, bwd = nullptr;

    Filter(const SphereGrid& grid) : nt(grid.n_theta()), nx(grid.n_xi()), cutoff(static_cast<std::size_t>(nt), -1) {
        const double ratio = grid.h_xi() / grid.h_theta();
        bool any = false;
        for (int j = 0; j < nt; ++j) {
            const double bound = std::sin(grid.theta(j)) * ratio;
            if (bound >= 1.0) continue;
            const int kc = static_cast<int>(std::floor(2.0 * std::asin(bound) / grid.h_xi() + 1e-12));
            if (kc < nx / 2) {
                cutoff[static_cast<std::size_t>(j)] = kc;
                any = true;
            }
        }
        if (!any) return;
        in = fftw_alloc_real(static_cast<std::size_t>(nx));
        spec = fftw_alloc_complex(static_cast<std::size_t>(nx / 2 + 1));
        fwd = fftw_plan_dft_r2c_1d(nx, in, spec, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(nx, spec, in, FFTW_ESTIMATE);
    }
    ~Filter() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (in) fftw_free(in);
        if (spec) fftw_free(spec);
    }

    void apply(std::span<double> f) const {
        if (!fwd) return;
        for (int j = 0; j < nt; ++j) {
            const int kc = cutoff[static_cast<std::size_t>(j)];
            if (kc < 0) continue;
            double* row = f.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(nx);
            std::copy(row, row + nx, in);
            fftw_execute(fwd);
            for (int k = kc + 1; k <= nx / 2; ++k) {
                spec[k][0] = 0.0;
                spec[k][1] = 0.0;
            }
            fftw_execute(bwd);
            for (int i = 0; i < nx; ++i) row[i] = in[i] / nx;
        }
    }
};

FlowStepper::FlowStepper(const SphereGrid& grid, FlowSpec spec)
    : grid_(grid),
      spec_(std::move(spec)),
      derivs_(grid.size()),
      k1_(grid.size()),
      k2_(grid.size()),
      k3_(grid.size()),
      k4_(grid.size()),
      tmp_(grid.size()) {
    if (grid_.mode() == GridMode::full2d && spec_.polar_filter) filter_ = std::make_unique<Filter>(grid_);
}

FlowStepper::~FlowStepper() = default;

double FlowStepper::tendency(std::span<const double> phi, std::span<double> out, bool record) {
    const int n = grid_.dim();
    detail::fill_derivatives(grid_, phi, derivs_);
    double dmax = 0.0;
    if (record) {
        stats_.min_phi = std::numeric_limits<double>::infinity();
        stats_.max_phi = -std::numeric_limits<double>::infinity();
        stats_.max_grad_sq = 0.0;
        stats_.min_static_margin = std::numeric_limits<double>::infinity();
    }
    for (int j = 0; j < grid_.n_theta(); ++j) {
        const double w = grid_.sigma_weight(j);
        for (int i = 0; i < grid_.n_xi(); ++i) {
            const std::size_t a = grid_.index(j, i);
            const double r = radius_from_phi(phi[a]);
            SymmetricPoint sp;
            const NodeCurvature nc = detail::node_curvature(n, grid_.mode(), r, w, derivs_[a], &sp);
            NodeSpeed ns;
            try {
                ns = node_speed(spec_, nc, sp);
            } catch (const ConeViolation& e) {
                throw ConeViolation(std::string(e.what()) + " at " + node_label(grid_, a), e.cone_index(),
                                    static_cast<long>(a));
            }
            out[a] = ns.F * nc.v / nc.lambda;
            dmax = std::max(dmax, ns.diffusion);
            if (record) {
                stats_.min_phi = std::min(stats_.min_phi, phi[a]);
                stats_.max_phi = std::max(stats_.max_phi, phi[a]);
                stats_.max_grad_sq = std::max(stats_.max_grad_sq, nc.grad_sq);
                stats_.min_static_margin = std::min(stats_.min_static_margin, nc.static_margin);
            }
        }
    }
    if (filter_) filter_->apply(out);
    return dmax;
}

double FlowStepper::stable_dt(std::span<const double> phi) {
    d_max_ = tendency(phi, k1_, true);
    k1_fresh_ = true;
    const double ht = grid_.h_theta();
    double lam;
    if (grid_.mode() == GridMode::axisym) {
        lam = (2.0 * grid_.dim() + 2.0) / (ht * ht);
    } else if (filter_) {
        lam = 8.0 / (ht * ht);
    } else {
        const double sx = std::sin(grid_.theta(0)) * grid_.h_xi();
        lam = 4.0 / (ht * ht) + 4.0 / (sx * sx);
    }
    if (!(d_max_ > 0.0)) return std::numeric_limits<double>::infinity();
    return spec_.cfl * kRk4Limit / (d_max_ * lam);
}

bool FlowStepper::step(std::vector<double>& phi, double dt) {
    const std::size_t m = phi.size();
    auto finite = [](std::span<const double> x) {
        return std::all_of(x.begin(), x.end(), [](double y) { return std::isfinite(y); });
    };
    try {
        if (!k1_fresh_) tendency(phi, k1_, false);
        k1_fresh_ = false;
        for (std::size_t a = 0; a < m; ++a) tmp_[a] = phi[a] + 0.5 * dt * k1_[a];
        if (!finite(tmp_)) return false;
        tendency(tmp_, k2_, false);
        for (std::size_t a = 0; a < m; ++a) tmp_[a] = phi[a] + 0.5 * dt * k2_[a];
        if (!finite(tmp_)) return false;
        tendency(tmp_, k3_, false);
        for (std::size_t a = 0; a < m; ++a) tmp_[a] = phi[a] + dt * k3_[a];
        if (!finite(tmp_)) return false;
        tendency(tmp_, k4_, false);
        for (std::size_t a = 0; a < m; ++a) tmp_[a] = phi[a] + dt / 6.0 * (k1_[a] + 2.0 * k2_[a] + 2.0 * k3_[a] + k4_[a]);
        if (!finite(tmp_)) return false;
    } catch (const DegenerateMetric&) {
        return false;
    }
    phi.swap(tmp_);
    return true;
}

// ---------------------------------------------------------------------------

MonitorSample sample_state(const RadialGraph& graph, const FlowSpec& spec, double t) {
    const SphereGrid& grid = graph.grid();
    const int n = grid.dim();
    const CurvatureField field = curvature(graph);
    std::vector<double> speed;
    try {
        speed = speed_field(spec, field);
    } catch (const ConeViolation& e) {
        throw ConeViolation(std::string(e.what()) + " " + node_position(grid, static_cast<std::size_t>(e.node())),
                            e.cone_index(), e.node());
    }
    MonitorSample s;
    s.t = t;
    const auto phi = graph.phi();
    s.min_phi = *std::min_element(phi.begin(), phi.end());
    s.max_phi = *std::max_element(phi.begin(), phi.end());
    s.max_grad_sq = field.max_grad_sq();
    s.min_static_margin = field.min_static_margin();
    s.alpha_bound = std::numeric_limits<double>::infinity();
    for (const auto& nc : field.nodes) {
        s.alpha_bound = std::min(s.alpha_bound, 2.0 * (n - 1) / (n * nc.lambda * nc.lambda_prime * nc.v));
    }
    for (double f : speed) s.max_abs_speed = std::max(s.max_abs_speed, std::abs(f));
    double wr = 0.0, ws = 0.0;
    const auto r = graph.r();
    for (int j = 0; j < grid.n_theta(); ++j) {
        for (int i = 0; i < grid.n_xi(); ++i) {
            wr += r[grid.index(j, i)] * grid.sigma_weight(j);
            ws += grid.sigma_weight(j);
        }
    }
    s.mean_radius = wr / ws;
    s.functionals = evaluate_functionals(field, graph, t);
    s.rates = variation_rates(field, speed);
    return s;
}

double fit_decay_rate(std::span<const MonitorSample> monitors) {
    std::vector<double> ts, ys;
    for (std::size_t q = monitors.size() / 2; q < monitors.size(); ++q) {
        if (monitors[q].max_grad_sq > 1e-300) {
            ts.push_back(monitors[q].t);
            ys.push_back(std::log(monitors[q].max_grad_sq));
        }
    }
    if (ts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = static_cast<double>(ts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t q = 0; q < ts.size(); ++q) {
        sx += ts[q];
        sy += ys[q];
        sxx += ts[q] * ts[q];
        sxy += ts[q] * ys[q];
    }
    const double den = m * sxx - sx * sx;
    if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return -(m * sxy - sx * sy) / den;
}

FlowResult run(const RadialGraph& initial, const FlowSpec& spec) {
    const SphereGrid& grid = initial.grid();
    const int n = grid.dim();
    spec.validate(n);

    FlowResult res(FlowState{initial, 0.0, 0.0, 0, {}, {}});
    if (spec.family == FlowFamily::weighted_vol_preserving) {
        try {
            res.r_inf_predicted = ball_profile_inverse(n, 0, true, weighted_volume(initial));
        } catch (const DomainError&) {
            res.r_inf_predicted = std::numeric_limits<double>::quiet_NaN();
        }
    }

    FlowStepper stepper(grid, spec);
    std::vector<double> phi(initial.phi().begin(), initial.phi().end());
    FlowState& st = res.state;
    long sample_index = 0;
    double t = 0.0;
    auto next_sample_time = [&] { return sample_index * spec.sample_dt; };
    bool finished = false;

    try {
        while (!finished) {
            if (t >= next_sample_time() - 1e-12 * spec.sample_dt) {
                st.monitors.push_back(sample_state(RadialGraph(grid, phi), spec, t));
                ++sample_index;
            }
            if (t >= spec.t_end - 1e-12 * spec.t_end) {
                res.status = FlowStatus::reached_t_end;
                break;
            }
            double dt = stepper.stable_dt(phi);
            StepLog lg = stepper.last_stats();
            if (lg.max_grad_sq < spec.convergence_threshold) {
                res.status = FlowStatus::converged;
                lg.t = t;
                st.steps_log.push_back(lg);
                break;
            }
            if (spec.fixed_dt > 0.0) dt = spec.fixed_dt;
            const double to_sample = next_sample_time() - t;
            const double to_end = spec.t_end - t;
            bool lands_on_sample = false;
            if (dt >= to_sample) {
                dt = to_sample;
                lands_on_sample = true;
            }
            if (dt >= to_end) dt = to_end;
            if (!stepper.step(phi, dt)) {
                dt *= 0.5;
                lands_on_sample = false;
                if (!stepper.step(phi, dt)) {
                    res.status = FlowStatus::blow_up;
                    res.message = "non-finite state after halving dt at t=" + std::to_string(t);
                    break;
                }
            }
            lg.t = t;
            lg.dt = dt;
            st.steps_log.push_back(lg);
            t = lands_on_sample ? next_sample_time() : t + dt;
            st.dt = dt;
            ++st.steps;
        }
    } catch (const ConeViolation& e) {
        res.status = FlowStatus::cone_violation;
        res.message = e.what();
        res.failure_node = e.node();
    } catch (const NotStarShaped& e) {
        res.status = FlowStatus::lost_star_shape;
        res.message = e.what();
    } catch (const DegenerateMetric& e) {
        res.status = FlowStatus::blow_up;
        res.message = e.what();
    }

    st.t = t;
    st.graph = RadialGraph(grid, phi);
    if (!res.aborted()) {
        if (st.monitors.empty() || st.monitors.back().t < t) st.monitors.push_back(sample_state(st.graph, spec, t));
        const MonitorSample& last = st.monitors.back();
        st.steps_log.push_back(StepLog{t, 0.0, last.min_phi, last.max_phi, last.max_grad_sq, last.min_static_margin});
    }
    if (!st.monitors.empty()) {
        res.alpha_fit = fit_decay_rate(st.monitors);
        res.alpha_hat = std::numeric_limits<double>::infinity();
        for (const auto& m : st.monitors) res.alpha_hat = std::min(res.alpha_hat, m.alpha_bound);
        res.r_inf = st.monitors.back().mean_radius;
    }
    return res;
}

// ---------------------------------------------------------------------------

double ConsistencyReport::worst_relative() const {
    double w = 0.0;
    for (const auto& r : rows) w = std::max(w, r.max_relative_error);
    return w;
}

ConsistencyReport variational_consistency(std::span<const MonitorSample> monitors, double h) {
    if (monitors.size() < 3) throw NeedsMoreSamples("variational consistency needs at least three samples");
    const double dt0 = monitors[1].t - monitors[0].t;
    std::size_t count = 2;
    while (count < monitors.size() &&
           std::abs(monitors[count].t - monitors[count - 1].t - dt0) <= 1e-9 * std::max(1.0, dt0)) {
        ++count;
    }
    if (count < 3 || !(dt0 > 0.0)) throw NeedsMoreSamples("fewer than three uniformly spaced samples");

    const int n = monitors[0].functionals.n;
    const double span = monitors[count - 1].t - monitors[0].t;
    ConsistencyReport rep;
    auto audit = [&](const std::string& name, auto&& value, auto&& rate) {
        ConsistencyRow row;
        row.name = name;
        double max_value = 0.0;
        for (std::size_t q = 1; q + 1 < count; ++q) {
            row.max_abs_rate = std::max(row.max_abs_rate, std::abs(rate(q)));
            max_value = std::max(max_value, std::abs(value(q)));
        }
        const double floor = h * h * std::max(row.max_abs_rate, max_value / span);
        for (std::size_t q = 1; q + 1 < count; ++q) {
            const double measured = (value(q + 1) - value(q - 1)) / (2.0 * dt0);
            const double err = std::abs(measured - rate(q));
            row.max_abs_error = std::max(row.max_abs_error, err);
            const double denom = std::abs(rate(q)) + floor;
            if (denom > 0.0) {
                row.max_relative_error = std::max(row.max_relative_error, err / denom);
            } else if (err > 0.0) {
                row.max_relative_error = std::numeric_limits<double>::infinity();
            }
        }
        rep.rows.push_back(row);
    };
    for (int k = 0; k <= n; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        audit("W" + std::to_string(k), [&](std::size_t q) { return monitors[q].functionals.W[kk]; },
              [&](std::size_t q) { return monitors[q].rates.dW[kk]; });
    }
    for (int k = 0; k <= n + 1; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        audit("Wl" + std::to_string(k), [&](std::size_t q) { return monitors[q].functionals.Wl[kk]; },
              [&](std::size_t q) { return monitors[q].rates.dWl[kk]; });
    }
    return rep;
}

BarrierReport c0_barrier(std::span<const StepLog> log) {
    BarrierReport rep;
    for (std::size_t q = 1; q < log.size(); ++q) {
        rep.max_rise_of_max = std::max(rep.max_rise_of_max, log[q].max_phi - log[q - 1].max_phi);
        rep.max_drop_of_min = std::max(rep.max_drop_of_min, log[q - 1].min_phi - log[q].min_phi);
    }
    return rep;
}

void write_monitors_csv(std::ostream& out, std::span<const MonitorSample> monitors, int n) {
    out << "t,min_phi,max_phi,max_grad_sq,min_static_margin,alpha_bound,max_abs_speed,mean_radius";
    const auto cols = record_columns(n);
    for (std::size_t c = 1; c < cols.size(); ++c) out << ',' << cols[c];
    for (int k = 0; k <= n; ++k) out << ",dW" << k;
    for (int k = 0; k <= n + 1; ++k) out << ",dWl" << k;
    out << '\n';
    const auto old = out.precision(17);
    for (const auto& m : monitors) {
        out << m.t << ',' << m.min_phi << ',' << m.max_phi << ',' << m.max_grad_sq << ',' << m.min_static_margin << ','
            << m.alpha_bound << ',' << m.max_abs_speed << ',' << m.mean_radius << ',';
        std::ostringstream row;
        write_record_row(row, m.functionals);
        const std::string s = row.str();
        out << s.substr(s.find(',') + 1);
        for (double x : m.rates.dW) out << ',' << x;
        for (double x : m.rates.dWl) out << ',' << x;
        out << '\n';
    }
    out.precision(old);
}

}  // namespace hypflow
