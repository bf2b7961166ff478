#include "hypflow/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hypflow/errors.hpp"

namespace hypflow {

double phi_from_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw NotStarShaped("radius must be positive and finite");
    const double e = std::exp(-r);
    return std::log1p(-e) - std::log1p(e);
}

double radius_from_phi(double phi) {
    if (!(phi < 0.0) || !std::isfinite(phi)) throw NotStarShaped("phi must be finite and negative");
    return -std::log(std::tanh(-0.5 * phi));
}

RadialGraph::RadialGraph(SphereGrid grid, std::vector<double> phi)
    : grid_(std::move(grid)), phi_(std::move(phi)) {
    if (phi_.size() != grid_.size()) throw InvalidInput("phi size does not match the grid");
    r_.resize(phi_.size());
    for (std::size_t a = 0; a < phi_.size(); ++a) r_[a] = radius_from_phi(phi_[a]);
}

RadialGraph RadialGraph::from_radius(SphereGrid grid, std::span<const double> r) {
    if (r.size() != grid.size()) throw InvalidInput("radius size does not match the grid");
    std::vector<double> phi(r.size());
    for (std::size_t a = 0; a < r.size(); ++a) phi[a] = phi_from_radius(r[a]);
    return RadialGraph(std::move(grid), std::move(phi));
}

// ---------------------------------------------------------------------------

std::vector<NodeDerivatives> sphere_gradient_hessian(const RadialGraph& graph) {
    const SphereGrid& grid = graph.grid();
    if (grid.n_theta() < 8) throw ResolutionError("grid too coarse for second differences");
    std::vector<NodeDerivatives> out(grid.size());
    detail::fill_derivatives(grid, graph.phi(), out);
    return out;
}

namespace detail {

void fill_derivatives(const SphereGrid& grid, std::span<const double> phi, std::span<NodeDerivatives> out) {
    const int nt = grid.n_theta();
    const int nx = grid.n_xi();
    const double ht = grid.h_theta();
    auto at = [&](int j, int i) {
        int jr, ir;
        grid.reflect(j, i, jr, ir);
        return phi[grid.index(jr, ir)];
    };

    if (grid.mode() == GridMode::axisym) {
        for (int j = 0; j < nt; ++j) {
            const double th = grid.theta(j);
            const double fm = at(j - 1, 0), f0 = phi[static_cast<std::size_t>(j)], fp = at(j + 1, 0);
            NodeDerivatives& d = out[static_cast<std::size_t>(j)];
            d.p1 = (fp - fm) / (2.0 * ht);
            d.p2 = 0.0;
            d.h11 = (fp - 2.0 * f0 + fm) / (ht * ht);
            d.h12 = 0.0;
            d.h22 = d.p1 * std::cos(th) / std::sin(th);
        }
        return;
    }

    const double hx = grid.h_xi();
    const int half = nx / 2;
    auto col = [nx](int i) { return i >= nx ? i - nx : (i < 0 ? i + nx : i); };
    for (int j = 0; j < nt; ++j) {
        const double th = grid.theta(j);
        const double s = std::sin(th);
        const double c = std::cos(th);
        // Neighbouring rows, reflected across a pole with a half-turn in xi.
        const int jn = j > 0 ? j - 1 : 0, js = j + 1 < nt ? j + 1 : nt - 1;
        const int shn = j > 0 ? 0 : half, shs = j + 1 < nt ? 0 : half;
        const double* row = phi.data() + grid.index(j, 0);
        const double* rn = phi.data() + grid.index(jn, 0);
        const double* rs = phi.data() + grid.index(js, 0);
        for (int i = 0; i < nx; ++i) {
            const int ie = col(i + 1), iw = col(i - 1);
            const double f0 = row[i];
            const double fn = rn[col(i + shn)], fs = rs[col(i + shs)];
            const double fw = row[iw], fe = row[ie];
            const double ft = (fs - fn) / (2.0 * ht);
            const double ftt = (fs - 2.0 * f0 + fn) / (ht * ht);
            const double fx = (fe - fw) / (2.0 * hx);
            const double fxx = (fe - 2.0 * f0 + fw) / (hx * hx);
            const double ftx = (rs[col(i + 1 + shs)] - rs[col(i - 1 + shs)] - rn[col(i + 1 + shn)] + rn[col(i - 1 + shn)]) /
                               (4.0 * ht * hx);
            NodeDerivatives& d = out[grid.index(j, i)];
            d.p1 = ft;
            d.p2 = fx / s;
            d.h11 = ftt;
            d.h12 = (ftx - (c / s) * fx) / s;
            d.h22 = (fxx + s * c * ft) / (s * s);
        }
    }
}

NodeCurvature node_curvature(int n, GridMode mode, double r, double sigma_weight, const NodeDerivatives& d,
                             SymmetricPoint* sp_out) {
    NodeCurvature nc;
    nc.r = r;
    nc.lambda = std::sinh(r);
    nc.lambda_prime = std::cosh(r);
    const double lam = nc.lambda;
    const double lp = nc.lambda_prime;
    nc.grad_sq = d.p1 * d.p1 + d.p2 * d.p2;
    nc.v = std::sqrt(1.0 + nc.grad_sq);
    nc.u = lam / nc.v;
    const double v = nc.v;

    const double l2 = lam * lam;
    nc.g = {l2 * (1.0 + d.p1 * d.p1), l2 * d.p1 * d.p2, l2 * (1.0 + d.p2 * d.p2)};
    const double det_g = nc.g[0] * nc.g[2] - nc.g[1] * nc.g[1];
    if (!(nc.g[0] > 0.0) || !(det_g > 0.0) || !std::isfinite(det_g)) {
        throw DegenerateMetric("induced metric is not positive definite");
    }
    const double a = lp / (lam * v);
    const double b = lam / v;
    nc.h = {a * nc.g[0] - b * d.h11, a * nc.g[1] - b * d.h12, a * nc.g[2] - b * d.h22};

    // h_i^j = a delta - (1/(lam v)) (delta^{jk} - p^j p^k / v^2) H_{ki}
    const double c = 1.0 / (lam * v);
    const double v2 = v * v;
    const double m11 = 1.0 - d.p1 * d.p1 / v2, m12 = -d.p1 * d.p2 / v2, m22 = 1.0 - d.p2 * d.p2 / v2;
    // W(i, j) = h_i^j
    nc.weingarten[0] = a - c * (m11 * d.h11 + m12 * d.h12);  // (1,1)
    nc.weingarten[1] = -c * (m12 * d.h11 + m22 * d.h12);     // (1,2)
    nc.weingarten[2] = -c * (m11 * d.h12 + m12 * d.h22);     // (2,1)
    nc.weingarten[3] = a - c * (m12 * d.h12 + m22 * d.h22);  // (2,2)

    std::array<double, kMaxDim> kap{};
    if (mode == GridMode::axisym) {
        const double k1 = nc.h[0] / nc.g[0];
        const double k2 = nc.h[2] / nc.g[2];
        kap[0] = k1;
        for (int q = 1; q < n; ++q) kap[static_cast<std::size_t>(q)] = k2;
        std::sort(kap.begin(), kap.begin() + n);
    } else {
        const auto ev = pencil_eigenvalues(nc.h, nc.g);
        kap[0] = ev[0];
        kap[1] = ev[1];
    }
    nc.kappa = kap;

    const SymmetricPoint sp = eval_elementary(std::span<const double>(kap.data(), static_cast<std::size_t>(n)));
    for (int k = 0; k <= n + 1; ++k) nc.E[static_cast<std::size_t>(k)] = sp.E(k);
    nc.cone_index = sp.cone_index;
    nc.static_margin = kap[0] - nc.u / lp;
    nc.area_weight = std::pow(lam, n) * v * sigma_weight;
    if (sp_out) *sp_out = sp;
    return nc;
}

}  // namespace detail

std::array<double, 2> pencil_eigenvalues(const std::array<double, 3>& h, const std::array<double, 3>& g) {
    // Cholesky g = L L^T, then eigenvalues of the symmetric L^{-1} h L^{-T}.
    const double l11 = std::sqrt(g[0]);
    const double l21 = g[1] / l11;
    const double l22sq = g[2] - l21 * l21;
    if (!(g[0] > 0.0) || !(l22sq > 0.0)) throw DegenerateMetric("pencil metric is not positive definite");
    const double l22 = std::sqrt(l22sq);
    // B = L^{-1} h L^{-T}
    const double a11 = h[0] / (l11 * l11);
    const double x = (h[1] - l21 * h[0] / l11) / l11;  // (L^{-1} h)_{21} scaled
    const double a21 = x / l22;
    const double y = h[2] - 2.0 * l21 * h[1] / l11 + l21 * l21 * h[0] / (l11 * l11);
    const double a22 = y / (l22 * l22);
    const double mean = 0.5 * (a11 + a22);
    const double rad = std::hypot(0.5 * (a11 - a22), a21);
    return {mean - rad, mean + rad};
}

CurvatureField curvature(const RadialGraph& graph) {
    const auto derivs = sphere_gradient_hessian(graph);
    return curvature(graph, derivs);
}

CurvatureField curvature(const RadialGraph& graph, std::span<const NodeDerivatives> derivs) {
    const SphereGrid& grid = graph.grid();
    CurvatureField field;
    field.n = grid.dim();
    field.nodes.resize(grid.size());
    const auto r = graph.r();
    for (int j = 0; j < grid.n_theta(); ++j) {
        for (int i = 0; i < grid.n_xi(); ++i) {
            const std::size_t a = grid.index(j, i);
            field.nodes[a] = detail::node_curvature(grid.dim(), grid.mode(), r[a], grid.sigma_weight(j), derivs[a]);
        }
    }
    return field;
}

double CurvatureField::min_static_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& nc : nodes) m = std::min(m, nc.static_margin);
    return m;
}

double CurvatureField::max_grad_sq() const {
    double m = 0.0;
    for (const auto& nc : nodes) m = std::max(m, nc.grad_sq);
    return m;
}

double CurvatureField::max_umbilicity_defect() const {
    double m = 0.0;
    for (const auto& nc : nodes) {
        m = std::max(m, nc.kappa[static_cast<std::size_t>(n - 1)] - nc.kappa[0]);
    }
    return m;
}

// ---------------------------------------------------------------------------

ResidualReport lemma24_residuals(const CurvatureField& field, const RadialGraph& graph) {
    const SphereGrid& grid = graph.grid();
    const int n = grid.dim();
    const int nt = grid.n_theta();
    const int nx = grid.n_xi();
    const double ht = grid.h_theta();
    const auto phi = graph.phi();

    auto phi_at = [&](int j, int i) {
        int jr, ir;
        grid.reflect(j, i, jr, ir);
        return phi[grid.index(jr, ir)];
    };
    auto f_at = [&](int j, int i) { return std::cosh(radius_from_phi(phi_at(j, i))); };

    std::vector<double> lap(grid.size());
    if (grid.mode() == GridMode::axisym) {
        // B = lambda^{n-2} f' / v; the sin^{n-1} weight is differentiated exactly.
        auto flux = [&](int j) {
            const double pt = (phi_at(j + 1, 0) - phi_at(j - 1, 0)) / (2.0 * ht);
            const double ft = (f_at(j + 1, 0) - f_at(j - 1, 0)) / (2.0 * ht);
            const double lam = std::sinh(radius_from_phi(phi_at(j, 0)));
            const double v = std::sqrt(1.0 + pt * pt);
            return std::pow(lam, n - 2) * ft / v;
        };
        for (int j = 0; j < nt; ++j) {
            const NodeCurvature& nc = field.nodes[static_cast<std::size_t>(j)];
            const double th = grid.theta(j);
            const double dB = (flux(j + 1) - flux(j - 1)) / (2.0 * ht);
            const double div = dB + (n - 1) * std::cos(th) / std::sin(th) * flux(j);
            lap[static_cast<std::size_t>(j)] = div / (std::pow(nc.lambda, n) * nc.v);
        }
    } else {
        const double hx = grid.h_xi();
        struct Flux {
            double t, x;
        };
        auto flux = [&](int j, int i) {
            const double s = std::sin(grid.theta(j));
            const double pt = (phi_at(j + 1, i) - phi_at(j - 1, i)) / (2.0 * ht);
            const double px = (phi_at(j, i + 1) - phi_at(j, i - 1)) / (2.0 * hx);
            const double ft = (f_at(j + 1, i) - f_at(j - 1, i)) / (2.0 * ht);
            const double fx = (f_at(j, i + 1) - f_at(j, i - 1)) / (2.0 * hx);
            const double q1 = pt, q2 = px / (s * s);
            const double v2 = 1.0 + pt * pt + px * px / (s * s);
            const double v = std::sqrt(v2);
            const double gtt = 1.0 - q1 * q1 / v2, gtx = -q1 * q2 / v2, gxx = 1.0 / (s * s) - q2 * q2 / v2;
            return Flux{s * v * (gtt * ft + gtx * fx), s * v * (gtx * ft + gxx * fx)};
        };
        for (int j = 0; j < nt; ++j) {
            const double s = std::sin(grid.theta(j));
            for (int i = 0; i < nx; ++i) {
                const NodeCurvature& nc = field.nodes[grid.index(j, i)];
                const double div = (flux(j + 1, i).t - flux(j - 1, i).t) / (2.0 * ht) +
                                   (flux(j, i + 1).x - flux(j, i - 1).x) / (2.0 * hx);
                lap[grid.index(j, i)] = div / (nc.lambda * nc.lambda * s * nc.v);
            }
        }
    }

    ResidualReport rep;
    double wsum = 0.0, acc = 0.0, scale = 0.0;
    for (std::size_t a = 0; a < lap.size(); ++a) {
        const NodeCurvature& nc = field.nodes[a];
        const double res = lap[a] - n * (nc.lambda_prime - nc.u * nc.E[1]);
        rep.max_abs = std::max(rep.max_abs, std::abs(res));
        acc += nc.area_weight * res * res;
        wsum += nc.area_weight;
        scale = std::max(scale, n * nc.lambda_prime);
    }
    rep.rms = std::sqrt(acc / wsum);
    rep.max_rel = rep.max_abs / scale;
    return rep;
}

// ---------------------------------------------------------------------------

std::string describe(const ShapeSpec& shape) {
    std::ostringstream os;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CenteredSphere>) {
                os << "centered_sphere(r0=" << s.r0 << ")";
            } else if constexpr (std::is_same_v<T, OffcenterSphere>) {
                os << "offcenter_sphere(rho=" << s.rho << ",d=" << s.d << ")";
            } else if constexpr (std::is_same_v<T, PerturbedSphere>) {
                os << "perturbed_sphere(r0=" << s.r0 << ",eps=" << s.eps << ",m=" << s.m << ")";
            } else {
                os << "custom_profile(" << s.table.size() << " rows)";
            }
        },
        shape);
    return os.str();
}

double offcenter_radius(double rho, double d, double theta) {
    if (!(rho > 0.0)) throw InvalidShape("sphere radius must be positive");
    if (std::abs(d) >= rho) throw NotStarShaped("origin is not inside the off-center sphere (|d| >= rho)");
    const double cd = std::cosh(d), sd = std::sinh(d), cr = std::cosh(rho), ct = std::cos(theta);
    auto G = [&](double r) { return cd * std::cosh(r) - sd * std::sinh(r) * ct - cr; };
    auto dG = [&](double r) { return cd * std::sinh(r) - sd * std::cosh(r) * ct; };
    double lo = rho - std::abs(d), hi = rho + std::abs(d);
    if (G(lo) >= 0.0) return lo;
    if (G(hi) <= 0.0) return hi;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double gx = G(x);
        if (gx > 0.0) hi = x; else lo = x;
        const double slope = dG(x);
        double next = x - gx / slope;
        if (!(slope > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * std::max(1.0, x)) return next;
        x = next;
    }
    return x;
}

RadialGraph make_shape(const ShapeSpec& shape, const SphereGrid& grid) {
    std::vector<double> r(grid.size());
    auto fill = [&](auto&& radius_at) {
        for (int j = 0; j < grid.n_theta(); ++j) {
            const double rj = radius_at(grid.theta(j));
            for (int i = 0; i < grid.n_xi(); ++i) r[grid.index(j, i)] = rj;
        }
    };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CenteredSphere>) {
                if (!(s.r0 > 0.0)) throw InvalidShape("sphere radius must be positive");
                fill([&](double) { return s.r0; });
            } else if constexpr (std::is_same_v<T, OffcenterSphere>) {
                offcenter_radius(s.rho, s.d, 0.0);  // validates
                fill([&](double th) { return offcenter_radius(s.rho, s.d, th); });
            } else if constexpr (std::is_same_v<T, PerturbedSphere>) {
                if (!(s.r0 > 0.0) || s.m < 0) throw InvalidShape("perturbed sphere needs r0 > 0 and m >= 0");
                if (s.r0 - std::abs(s.eps) <= 0.0) throw InvalidShape("perturbation amplitude too large for positivity");
                fill([&](double th) { return s.r0 + s.eps * std::cos(s.m * th); });
            } else {
                const auto& t = s.table;
                if (t.empty()) throw InvalidShape("custom profile table is empty");
                for (std::size_t q = 0; q < t.size(); ++q) {
                    if (!(t[q].second > 0.0)) throw InvalidShape("custom profile radius must be positive");
                    if (q > 0 && !(t[q].first > t[q - 1].first)) {
                        throw InvalidShape("custom profile angles must be strictly increasing");
                    }
                }
                fill([&](double th) {
                    if (th <= t.front().first) return t.front().second;
                    if (th >= t.back().first) return t.back().second;
                    const auto it = std::upper_bound(t.begin(), t.end(), th,
                                                     [](double x, const auto& row) { return x < row.first; });
                    const auto& b = *it;
                    const auto& a = *(it - 1);
                    const double w = (th - a.first) / (b.first - a.first);
                    return (1.0 - w) * a.second + w * b.second;
                });
            }
        },
        shape);
    return RadialGraph::from_radius(grid, r);
}

CustomProfile read_profile(std::istream& in) {
    CustomProfile prof;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        double th, r;
        if (!(ls >> th >> r)) throw InvalidInput("profile line " + std::to_string(lineno) + ": expected 'theta r'");
        prof.table.emplace_back(th, r);
    }
    return prof;
}

CustomProfile read_profile_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open profile " + path);
    return read_profile(in);
}

void write_profile(std::ostream& out, const RadialGraph& graph) {
    const SphereGrid& grid = graph.grid();
    const auto r = graph.r();
    out << "# " << grid.describe() << "\n";
    out << "# phi = ln tanh(r/2)\n";
    out << std::setprecision(17);
    if (grid.mode() == GridMode::axisym) {
        out << "# theta r\n";
        for (int j = 0; j < grid.n_theta(); ++j) out << grid.theta(j) << ' ' << r[static_cast<std::size_t>(j)] << '\n';
    } else {
        out << "# theta xi r\n";
        for (int j = 0; j < grid.n_theta(); ++j) {
            for (int i = 0; i < grid.n_xi(); ++i) {
                out << grid.theta(j) << ' ' << grid.xi(i) << ' ' << r[grid.index(j, i)] << '\n';
            }
        }
    }
}

}  // namespace hypflow
