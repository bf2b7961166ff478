#include "hypflow/functionals.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "hypflow/errors.hpp"

namespace hypflow {

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double scale = std::max(std::abs(whole), std::numeric_limits<double>::min());
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, rel_tol * scale, 50);
}

}  // namespace

double sinh_power_integral(int n, double r) {
    if (n < 0) throw InvalidInput("negative power");
    if (n <= 4) {
        // I_n = sinh^{n-1} cosh / n - (n-1)/n I_{n-2}
        const double s = std::sinh(r), c = std::cosh(r);
        double i0 = r;
        double i1 = 2.0 * std::sinh(0.5 * r) * std::sinh(0.5 * r);  // cosh r - 1
        if (n == 0) return i0;
        if (n == 1) return i1;
        double prev2 = i0, prev1 = i1, cur = 0.0;
        for (int m = 2; m <= n; ++m) {
            cur = std::pow(s, m - 1) * c / m - (m - 1.0) / m * prev2;
            prev2 = prev1;
            prev1 = cur;
        }
        return cur;
    }
    return integrate([n](double x) { return std::pow(std::sinh(x), n); }, 0.0, r, 1e-13);
}

double enclosed_volume(const RadialGraph& graph) {
    const SphereGrid& grid = graph.grid();
    const auto r = graph.r();
    double vol = 0.0;
    for (int j = 0; j < grid.n_theta(); ++j) {
        for (int i = 0; i < grid.n_xi(); ++i) vol += sinh_power_integral(grid.dim(), r[grid.index(j, i)]) * grid.sigma_weight(j);
    }
    return vol;
}

double weighted_volume(const RadialGraph& graph) {
    const SphereGrid& grid = graph.grid();
    const auto r = graph.r();
    double acc = 0.0;
    for (int j = 0; j < grid.n_theta(); ++j) {
        for (int i = 0; i < grid.n_xi(); ++i) acc += std::pow(std::sinh(r[grid.index(j, i)]), grid.dim() + 1) * grid.sigma_weight(j);
    }
    return acc;
}

std::vector<double> quermassintegrals(const CurvatureField& field, const RadialGraph& graph) {
    const int n = field.n;
    std::vector<double> surf(static_cast<std::size_t>(n + 1), 0.0);  // integral of E_k
    for (const auto& nc : field.nodes) {
        for (int k = 0; k <= n; ++k) surf[static_cast<std::size_t>(k)] += nc.E[static_cast<std::size_t>(k)] * nc.area_weight;
    }
    std::vector<double> W(static_cast<std::size_t>(n + 1), 0.0);
    W[0] = enclosed_volume(graph);
    W[1] = surf[0] / (n + 1);
    for (int k = 1; k + 1 <= n; ++k) {
        W[static_cast<std::size_t>(k + 1)] =
            surf[static_cast<std::size_t>(k)] / (n + 1) - k / (n + 2.0 - k) * W[static_cast<std::size_t>(k - 1)];
    }
    return W;
}

std::vector<double> weighted_integrals(const CurvatureField& field, const RadialGraph& graph) {
    const int n = field.n;
    std::vector<double> Wl(static_cast<std::size_t>(n + 2), 0.0);
    Wl[0] = weighted_volume(graph);
    for (const auto& nc : field.nodes) {
        for (int k = 1; k <= n + 1; ++k) {
            Wl[static_cast<std::size_t>(k)] += nc.lambda_prime * nc.E[static_cast<std::size_t>(k - 1)] * nc.area_weight;
        }
    }
    return Wl;
}

std::vector<double> dual_weighted_integrals(const CurvatureField& field) {
    const int n = field.n;
    std::vector<double> out(static_cast<std::size_t>(n + 2), 0.0);
    for (const auto& nc : field.nodes) {
        for (int k = 0; k <= n + 1; ++k) out[static_cast<std::size_t>(k)] += nc.u * nc.E[static_cast<std::size_t>(k)] * nc.area_weight;
    }
    return out;
}

double heintze_karcher_slack(const CurvatureField& field) {
    double acc = 0.0;
    for (std::size_t a = 0; a < field.nodes.size(); ++a) {
        const auto& nc = field.nodes[a];
        if (!(nc.E[1] > 0.0)) throw ConeViolation("surface is not mean convex", nc.cone_index, static_cast<long>(a));
        acc += (nc.lambda_prime / nc.E[1] - nc.u) * nc.area_weight;
    }
    return acc;
}

FunctionalRecord evaluate_functionals(const CurvatureField& field, const RadialGraph& graph, double t) {
    FunctionalRecord rec;
    rec.t = t;
    rec.n = field.n;
    for (const auto& nc : field.nodes) rec.area += nc.area_weight;
    rec.W = quermassintegrals(field, graph);
    rec.Wl = weighted_integrals(field, graph);
    const auto dual = dual_weighted_integrals(field);
    rec.wl0_boundary = dual[0];
    for (int k = 1; k <= field.n; ++k) {
        rec.minkowski_residuals.push_back(rec.Wl[static_cast<std::size_t>(k)] - dual[static_cast<std::size_t>(k)]);
    }
    try {
        rec.heintze_karcher_slack = heintze_karcher_slack(field);
    } catch (const ConeViolation&) {
        rec.heintze_karcher_slack = std::numeric_limits<double>::quiet_NaN();
    }
    return rec;
}

std::vector<std::string> record_columns(int n) {
    std::vector<std::string> cols{"t", "area"};
    for (int k = 0; k <= n; ++k) cols.push_back("W" + std::to_string(k));
    for (int k = 0; k <= n + 1; ++k) cols.push_back("Wl" + std::to_string(k));
    cols.push_back("Wl0_boundary");
    for (int k = 1; k <= n; ++k) cols.push_back("minkowski" + std::to_string(k));
    cols.push_back("hk_slack");
    return cols;
}

void write_record_row(std::ostream& out, const FunctionalRecord& rec) {
    const auto old = out.precision(17);
    out << rec.t << ',' << rec.area;
    for (double x : rec.W) out << ',' << x;
    for (double x : rec.Wl) out << ',' << x;
    out << ',' << rec.wl0_boundary;
    for (double x : rec.minkowski_residuals) out << ',' << x;
    out << ',' << rec.heintze_karcher_slack;
    out.precision(old);
}

VariationRates variation_rates(const CurvatureField& field, std::span<const double> speed) {
    const int n = field.n;
    if (speed.size() != field.nodes.size()) throw InvalidInput("speed size does not match the field");
    VariationRates vr;
    vr.dW.assign(static_cast<std::size_t>(n + 1), 0.0);
    vr.dWl.assign(static_cast<std::size_t>(n + 2), 0.0);
    for (std::size_t a = 0; a < field.nodes.size(); ++a) {
        const auto& nc = field.nodes[a];
        const double w = speed[a] * nc.area_weight;
        for (int k = 0; k <= n; ++k) {
            vr.dW[static_cast<std::size_t>(k)] += (n + 1.0 - k) / (n + 1.0) * nc.E[static_cast<std::size_t>(k)] * w;
        }
        for (int k = 0; k <= n + 1; ++k) {
            const double em1 = k >= 1 ? nc.E[static_cast<std::size_t>(k - 1)] : 0.0;
            vr.dWl[static_cast<std::size_t>(k)] +=
                (k * nc.u * em1 + (n + 1.0 - k) * nc.lambda_prime * nc.E[static_cast<std::size_t>(k)]) * w;
        }
    }
    return vr;
}

// ---------------------------------------------------------------------------

double ball_profile(int n, int k, bool weighted, double r) {
    if (n < 1 || n > kMaxDim) throw InvalidInput("dimension out of range");
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("ball radius must be finite and non-negative");
    const double w = sphere_area(n);
    const double s = std::sinh(r), c = std::cosh(r);
    if (weighted) {
        if (k < 0 || k > n + 1) throw InvalidInput("weighted profile index out of range");
        return w * std::pow(s, n + 1 - k) * std::pow(c, k);
    }
    if (k < 0 || k > n) throw InvalidInput("quermassintegral profile index out of range");
    double prev = w * sinh_power_integral(n, r);  // f_0
    if (k == 0) return prev;
    double cur = w * std::pow(s, n) / (n + 1);  // f_1
    for (int m = 1; m < k; ++m) {
        // f_{m+1} = omega sinh^n coth^m / (n+1) - m/(n+2-m) f_{m-1}
        const double next = w * std::pow(s, n - m) * std::pow(c, m) / (n + 1) - m / (n + 2.0 - m) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

namespace {

double profile_slope(int n, int k, bool weighted, double r) {
    const double w = sphere_area(n);
    const double s = std::sinh(r), c = std::cosh(r);
    if (weighted) {
        return w * ((n + 1.0 - k) * std::pow(s, n - k) * std::pow(c, k + 1) + k * std::pow(s, n + 2 - k) * std::pow(c, k - 1));
    }
    return (n + 1.0 - k) / (n + 1.0) * w * std::pow(s, n - k) * std::pow(c, k);
}

}  // namespace

double ball_profile_inverse(int n, int k, bool weighted, double value) {
    if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("profile value must be positive and finite");
    auto f = [&](double r) { return ball_profile(n, k, weighted, r); };
    const double r_cap = 600.0 / (n + 1);
    double lo = 0.0, hi = 1.0;
    if (!(value > f(lo))) throw DomainError("profile value below the range of the ball profile");
    while (f(hi) < value) {
        lo = hi;
        hi *= 2.0;
        if (hi > r_cap) throw DomainError("profile value above the numeric range");
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        const double fx = f(x) - value;
        if (fx > 0.0) hi = x; else lo = x;
        const double slope = profile_slope(n, k, weighted, x);
        double next = x - fx / slope;
        if (!(slope > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-14 * std::max(x, 1e-300) || hi - lo <= 1e-15 * hi) return next;
        x = next;
    }
    return x;
}

double weighted_bound_explicit(int n, int k, double wl0) {
    if (k < 1 || k > n + 1) throw InvalidInput("explicit bound needs 1 <= k <= n+1");
    if (!(wl0 > 0.0)) throw DomainError("weighted volume must be positive");
    const double w = sphere_area(n);
    const double q = wl0 / w;
    const double a = std::pow(q, 2.0 / k);
    const double b = std::pow(q, 2.0 * (n - k + 1) / ((n + 1.0) * k));
    return w * std::pow(a + b, 0.5 * k);
}

}  // namespace hypflow
