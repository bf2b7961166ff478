#pragma once

// Normalized elementary symmetric functions of principal curvatures, their
// gradients, Garding cones and the curvature-quotient speed functions.
//
// Conventions: E_k(kappa) = binom(n,k)^{-1} * sigma_k(kappa), E_0 = 1 and
// E_k = 0 for k < 0 or k > n.  The gradient dE_k/dkappa_i is the true
// partial derivative, sigma_{k-1}(kappa | i) / binom(n,k), so that
//   sum_i dE_k/dkappa_i = k E_{k-1}
// holds as an identity.

#include <array>
#include <initializer_list>
#include <span>
#include <string>

namespace hypflow {

/// Largest hypersurface dimension supported by the fixed-capacity containers.
inline constexpr int kMaxDim = 8;

double binomial(int n, int k);

/// Ordered list of n principal curvatures, 1 <= n <= kMaxDim, all finite.
class CurvatureVector {
public:
    CurvatureVector() = default;
    explicit CurvatureVector(std::span<const double> values);
    CurvatureVector(std::initializer_list<double> values);

    int size() const noexcept { return n_; }
    double operator[](int i) const noexcept { return k_[static_cast<std::size_t>(i)]; }
    std::span<const double> values() const noexcept { return {k_.data(), static_cast<std::size_t>(n_)}; }

private:
    std::array<double, kMaxDim> k_{};
    int n_ = 0;
};

struct SymmetricPoint {
    CurvatureVector kappa;
    /// E_0 .. E_n, with one trailing zero so that e[n+1] is addressable.
    std::array<double, kMaxDim + 2> e{};
    /// grad_e[k][i] = dE_k / dkappa_i.
    std::array<std::array<double, kMaxDim>, kMaxDim + 1> grad_e{};
    /// Largest k with E_1..E_k > 0 (0 if E_1 <= 0).
    int cone_index = 0;

    int n() const noexcept { return kappa.size(); }
    double E(int k) const noexcept {
        return (k < 0 || k > n()) ? 0.0 : e[static_cast<std::size_t>(k)];
    }
    double dE(int k, int i) const noexcept {
        return (k <= 0 || k > n()) ? 0.0 : grad_e[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
    }
};

SymmetricPoint eval_elementary(const CurvatureVector& kappa);
SymmetricPoint eval_elementary(std::span<const double> kappa);

struct NewtonResiduals {
    double weighted;     // sum_i dE_k^i kappa_i - k E_k
    double trace;        // sum_i dE_k^i - k E_{k-1}
    double squared;      // sum_i dE_k^i kappa_i^2 - (n E_1 E_k - (n-k) E_{k+1})
};

/// Residuals of the three Newton-tensor identities at order k (1 <= k <= n).
NewtonResiduals newton_identities_check(const SymmetricPoint& p, int k);

/// E_k^2 - E_{k+1} E_{k-1}; requires 1 <= k <= n-1 and kappa in Gamma_k^+.
double newton_maclaurin_margin(const SymmetricPoint& p, int k);

// ---------------------------------------------------------------------------
// Speed functions

enum class PhiKind { identity, power, neg_inv_power, log };

/// Monotone reparametrization Phi applied to the speed.
struct PhiFunction {
    PhiKind kind = PhiKind::identity;
    double p = 1.0;

    double value(double s) const;
    double d1(double s) const;
    double d2(double s) const;
    std::string describe() const;

    static PhiFunction identity() { return {}; }
    static PhiFunction power(double p) { return {PhiKind::power, p}; }
    static PhiFunction neg_inv_power(double p) { return {PhiKind::neg_inv_power, p}; }
    static PhiFunction log() { return {PhiKind::log, 1.0}; }
};

enum class SpeedKind { mean, quotient };

/// F = (E_k / E_l)^{1/(k-l)} (quotient) or F = E_1 (mean), composed with Phi.
struct SpeedFunctionSpec {
    SpeedKind kind = SpeedKind::mean;
    int k = 1;
    int l = 0;
    PhiFunction phi;

    static SpeedFunctionSpec mean(PhiFunction phi = {}) { return {SpeedKind::mean, 1, 0, phi}; }
    static SpeedFunctionSpec quotient(int k, int l, PhiFunction phi = {}) {
        return {SpeedKind::quotient, k, l, phi};
    }

    /// Cone the curvature vector has to lie in for F to be defined.
    int required_cone() const noexcept { return kind == SpeedKind::mean ? 1 : k; }

    /// Throws InvalidInput unless 0 <= l < k <= n and Phi' > 0,
    /// Phi'' s + 2 Phi' >= 0 on a log-spaced sample of s > 0.
    void validate(int n) const;
    std::string describe() const;
};

struct SpeedValue {
    double F = 0.0;
    std::array<double, kMaxDim> dF{};
};

/// Evaluates F and dF/dkappa.  Throws ConeViolation outside Gamma_k^+.
SpeedValue eval_speed(const SpeedFunctionSpec& spec, const SymmetricPoint& p);
SpeedValue eval_speed(const SpeedFunctionSpec& spec, std::span<const double> kappa);
inline SpeedValue eval_speed(const SpeedFunctionSpec& spec, const CurvatureVector& kappa) {
    return eval_speed(spec, eval_elementary(kappa));
}

struct ConcavityReport {
    /// Smallest eigenvalue of the finite-difference Hessian of f.
    double min_hessian_eigenvalue = 0.0;
    /// Largest eigenvalue of the same Hessian; <= 0 up to tolerance iff f is concave here.
    double max_hessian_eigenvalue = 0.0;
    /// Smallest eigenvalue of Hess f + diag(2 f_k / kappa_k).
    double min_inverse_concavity_eigenvalue = 0.0;
    /// max over pairs of (f_k - f_l)/(kappa_k - kappa_l); should be <= 0.
    double max_pair_quotient = 0.0;
    /// min over pairs of the quotient plus f_k/kappa_l + f_l/kappa_k; should be >= 0.
    double min_inverse_pair_combination = 0.0;
    /// Set when two curvatures coincide within 1e-8; pair terms are then skipped.
    bool degenerate_spectrum = false;

    bool concave(double tol = 1e-8) const;
    bool inverse_concave(double tol = 1e-8) const;
};

/// Requires kappa in the positive cone.
ConcavityReport concavity_diagnostics(const SpeedFunctionSpec& spec, const SymmetricPoint& p);

}  // namespace hypflow
