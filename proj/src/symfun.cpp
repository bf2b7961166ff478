#include "hypflow/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hypflow/errors.hpp"

namespace hypflow {

namespace {

// Unnormalized sigma_0..sigma_n of kappa, skipping index `skip` (or none).
template <std::size_t N>
int sigma_recurrence(std::span<const double> kappa, int skip, std::array<double, N>& sigma) {
    sigma.fill(0.0);
    sigma[0] = 1.0;
    int m = 0;
    for (int i = 0; i < static_cast<int>(kappa.size()); ++i) {
        if (i == skip) continue;
        ++m;
        const double x = kappa[static_cast<std::size_t>(i)];
        for (int k = m; k >= 1; --k) sigma[static_cast<std::size_t>(k)] += x * sigma[static_cast<std::size_t>(k - 1)];
    }
    return m;
}

}  // namespace

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    k = std::min(k, n - k);
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return std::round(c);
}

CurvatureVector::CurvatureVector(std::span<const double> values) {
    if (values.empty() || values.size() > static_cast<std::size_t>(kMaxDim)) {
        throw InvalidInput("curvature vector length must be in [1, " + std::to_string(kMaxDim) + "]");
    }
    n_ = static_cast<int>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw InvalidInput("curvature vector has a non-finite entry");
        k_[i] = values[i];
    }
}

CurvatureVector::CurvatureVector(std::initializer_list<double> values)
    : CurvatureVector(std::span<const double>(values.begin(), values.size())) {}

SymmetricPoint eval_elementary(std::span<const double> kappa) {
    return eval_elementary(CurvatureVector(kappa));
}

SymmetricPoint eval_elementary(const CurvatureVector& kappa) {
    SymmetricPoint p;
    p.kappa = kappa;
    const int n = kappa.size();
    if (n == 0) throw InvalidInput("empty curvature vector");

    std::array<double, kMaxDim + 1> inv_binom{};
    for (int k = 0; k <= n; ++k) inv_binom[static_cast<std::size_t>(k)] = 1.0 / binomial(n, k);

    std::array<double, kMaxDim + 1> sigma{};
    sigma_recurrence(kappa.values(), -1, sigma);
    for (int k = 0; k <= n; ++k) p.e[static_cast<std::size_t>(k)] = sigma[static_cast<std::size_t>(k)] * inv_binom[static_cast<std::size_t>(k)];
    p.e[0] = 1.0;

    std::array<double, kMaxDim + 1> deleted{};
    for (int i = 0; i < n; ++i) {
        sigma_recurrence(kappa.values(), i, deleted);
        for (int k = 1; k <= n; ++k) {
            p.grad_e[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
                deleted[static_cast<std::size_t>(k - 1)] * inv_binom[static_cast<std::size_t>(k)];
        }
    }

    p.cone_index = 0;
    for (int k = 1; k <= n && p.e[static_cast<std::size_t>(k)] > 0.0; ++k) p.cone_index = k;
    return p;
}

NewtonResiduals newton_identities_check(const SymmetricPoint& p, int k) {
    const int n = p.n();
    if (k < 1 || k > n) throw InvalidInput("Newton identity order out of range");
    double s1 = 0.0, s0 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = p.dE(k, i);
        const double x = p.kappa[i];
        s0 += d;
        s1 += d * x;
        s2 += d * x * x;
    }
    return {s1 - k * p.E(k), s0 - k * p.E(k - 1), s2 - (n * p.E(1) * p.E(k) - (n - k) * p.E(k + 1))};
}

double newton_maclaurin_margin(const SymmetricPoint& p, int k) {
    if (k < 1 || k > p.n() - 1) throw InvalidInput("Newton-MacLaurin index out of range");
    if (p.cone_index < k) throw ConeViolation("curvature vector is not in Gamma_k^+", p.cone_index);
    return p.E(k) * p.E(k) - p.E(k + 1) * p.E(k - 1);
}

// ---------------------------------------------------------------------------

double PhiFunction::value(double s) const {
    switch (kind) {
        case PhiKind::identity: return s;
        case PhiKind::power: return std::pow(s, p);
        case PhiKind::neg_inv_power: return -std::pow(s, -p);
        case PhiKind::log: return std::log(s);
    }
    return s;
}

double PhiFunction::d1(double s) const {
    switch (kind) {
        case PhiKind::identity: return 1.0;
        case PhiKind::power: return p * std::pow(s, p - 1.0);
        case PhiKind::neg_inv_power: return p * std::pow(s, -p - 1.0);
        case PhiKind::log: return 1.0 / s;
    }
    return 1.0;
}

double PhiFunction::d2(double s) const {
    switch (kind) {
        case PhiKind::identity: return 0.0;
        case PhiKind::power: return p * (p - 1.0) * std::pow(s, p - 2.0);
        case PhiKind::neg_inv_power: return -p * (p + 1.0) * std::pow(s, -p - 2.0);
        case PhiKind::log: return -1.0 / (s * s);
    }
    return 0.0;
}

std::string PhiFunction::describe() const {
    std::ostringstream os;
    switch (kind) {
        case PhiKind::identity: os << "identity"; break;
        case PhiKind::power: os << "power(" << p << ")"; break;
        case PhiKind::neg_inv_power: os << "neg_inv_power(" << p << ")"; break;
        case PhiKind::log: os << "log"; break;
    }
    return os.str();
}

void SpeedFunctionSpec::validate(int n) const {
    if (kind == SpeedKind::quotient && !(0 <= l && l < k && k <= n)) {
        throw InvalidInput("quotient speed requires 0 <= l < k <= n");
    }
    if (kind == SpeedKind::mean && n < 1) throw InvalidInput("mean speed requires n >= 1");
    if ((phi.kind == PhiKind::power && !(phi.p > 0.0)) ||
        (phi.kind == PhiKind::neg_inv_power && !(phi.p > 0.0 && phi.p <= 1.0))) {
        throw InvalidInput("Phi exponent outside its admissible range: " + phi.describe());
    }
    for (int i = 0; i <= 60; ++i) {
        const double s = std::pow(10.0, -3.0 + 0.1 * i);
        const double d1 = phi.d1(s);
        const double d2 = phi.d2(s);
        if (!(d1 > 0.0) || d2 * s + 2.0 * d1 < -1e-12 * std::abs(d1)) {
            throw InvalidInput("Phi violates Phi' > 0 or Phi'' s + 2 Phi' >= 0: " + phi.describe());
        }
    }
}

std::string SpeedFunctionSpec::describe() const {
    std::ostringstream os;
    if (kind == SpeedKind::mean) {
        os << "E1";
    } else {
        os << "(E" << k << "/E" << l << ")^(1/" << (k - l) << ")";
    }
    os << " phi=" << phi.describe();
    return os.str();
}

SpeedValue eval_speed(const SpeedFunctionSpec& spec, std::span<const double> kappa) {
    return eval_speed(spec, eval_elementary(kappa));
}

SpeedValue eval_speed(const SpeedFunctionSpec& spec, const SymmetricPoint& p) {
    const int n = p.n();
    SpeedValue out;
    if (spec.kind == SpeedKind::mean) {
        out.F = p.E(1);
        for (int i = 0; i < n; ++i) out.dF[static_cast<std::size_t>(i)] = p.dE(1, i);
        return out;
    }
    const int k = spec.k;
    const int l = spec.l;
    if (k > n || l < 0 || l >= k) throw InvalidInput("quotient speed requires 0 <= l < k <= n");
    if (p.cone_index < k) {
        throw ConeViolation("curvature vector outside Gamma_" + std::to_string(k) + "^+ (cone index " +
                                std::to_string(p.cone_index) + ")",
                            p.cone_index);
    }
    const double ek = p.E(k);
    const double el = p.E(l);
    const double inv = 1.0 / (k - l);
    out.F = (k - l == 1) ? ek / el : std::pow(ek / el, inv);
    for (int i = 0; i < n; ++i) {
        out.dF[static_cast<std::size_t>(i)] = out.F * inv * (p.dE(k, i) / ek - p.dE(l, i) / el);
    }
    return out;
}

bool ConcavityReport::concave(double tol) const {
    return min_hessian_eigenvalue <= tol && max_hessian_eigenvalue <= tol;
}

bool ConcavityReport::inverse_concave(double tol) const {
    return min_inverse_concavity_eigenvalue >= -tol;
}

ConcavityReport concavity_diagnostics(const SpeedFunctionSpec& spec, const SymmetricPoint& p) {
    const int n = p.n();
    for (int i = 0; i < n; ++i) {
        if (!(p.kappa[i] > 0.0)) throw ConeViolation("concavity diagnostics need kappa in the positive cone", p.cone_index);
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += p.kappa[i] * p.kappa[i];
    const double h = 1e-4 * std::sqrt(norm);

    std::array<double, kMaxDim> base{};
    for (int i = 0; i < n; ++i) base[static_cast<std::size_t>(i)] = p.kappa[i];
    auto f_at = [&](int i, double si, int j, double sj) {
        auto x = base;
        x[static_cast<std::size_t>(i)] += si;
        x[static_cast<std::size_t>(j)] += sj;
        return eval_speed(spec, std::span<const double>(x.data(), static_cast<std::size_t>(n))).F;
    };

    Eigen::MatrixXd hess(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = (f_at(i, h, j, h) - f_at(i, h, j, -h) - f_at(i, -h, j, h) + f_at(i, -h, j, -h)) /
                             (4.0 * h * h);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    const SpeedValue sv = eval_speed(spec, p);

    ConcavityReport rep;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess, Eigen::EigenvaluesOnly);
    rep.min_hessian_eigenvalue = es.eigenvalues().minCoeff();
    rep.max_hessian_eigenvalue = es.eigenvalues().maxCoeff();

    Eigen::MatrixXd inv = hess;
    for (int i = 0; i < n; ++i) inv(i, i) += 2.0 * sv.dF[static_cast<std::size_t>(i)] / p.kappa[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(inv, Eigen::EigenvaluesOnly);
    rep.min_inverse_concavity_eigenvalue = es2.eigenvalues().minCoeff();

    bool any_pair = false;
    rep.max_pair_quotient = -HUGE_VAL;
    rep.min_inverse_pair_combination = HUGE_VAL;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double dk = p.kappa[a] - p.kappa[b];
            if (std::abs(dk) < 1e-8) {
                rep.degenerate_spectrum = true;
                continue;
            }
            any_pair = true;
            const double fa = sv.dF[static_cast<std::size_t>(a)];
            const double fb = sv.dF[static_cast<std::size_t>(b)];
            const double q = (fa - fb) / dk;
            rep.max_pair_quotient = std::max(rep.max_pair_quotient, q);
            rep.min_inverse_pair_combination =
                std::min(rep.min_inverse_pair_combination, q + fa / p.kappa[b] + fb / p.kappa[a]);
        }
    }
    if (!any_pair) {
        rep.max_pair_quotient = 0.0;
        rep.min_inverse_pair_combination = 0.0;
    }
    return rep;
}

}  // namespace hypflow
