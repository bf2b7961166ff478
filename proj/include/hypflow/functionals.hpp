#pragma once

// Quermassintegrals W_k and weighted curvature integrals Wl_k of the domain
// enclosed by a radial graph, and their values on centered geodesic balls.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hypflow/hypersurface.hpp"

namespace hypflow {

/// Integral of sinh^n over [0, r].
double sinh_power_integral(int n, double r);

/// Vol(Omega) by radial integration over the grid.
double enclosed_volume(const RadialGraph& graph);
/// (n+1) * integral of lambda' over Omega = sum of sinh^{n+1} r over the sphere measure.
double weighted_volume(const RadialGraph& graph);

struct FunctionalRecord {
    double t = 0.0;
    int n = 0;
    double area = 0.0;
    /// W_0 .. W_n
    std::vector<double> W;
    /// Wl_0 .. Wl_{n+1}; Wl_0 in its volume form.
    std::vector<double> Wl;
    /// Boundary form of Wl_0, the integral of u.
    double wl0_boundary = 0.0;
    /// k = 1..n: integral of lambda' E_{k-1} minus integral of u E_k.
    std::vector<double> minkowski_residuals;
    /// NaN when some node is not mean convex.
    double heintze_karcher_slack = 0.0;
};

/// W_0 .. W_n.
std::vector<double> quermassintegrals(const CurvatureField& field, const RadialGraph& graph);
/// Wl_0 .. Wl_{n+1}, Wl_0 in volume form.
std::vector<double> weighted_integrals(const CurvatureField& field, const RadialGraph& graph);
/// Integral of u E_k for k = 0..n+1.
std::vector<double> dual_weighted_integrals(const CurvatureField& field);

/// Integral of (lambda'/E_1 - u).  Throws ConeViolation where E_1 <= 0.
double heintze_karcher_slack(const CurvatureField& field);

FunctionalRecord evaluate_functionals(const CurvatureField& field, const RadialGraph& graph, double t = 0.0);

/// Column names matching write_record_row.
std::vector<std::string> record_columns(int n);
void write_record_row(std::ostream& out, const FunctionalRecord& rec);

/// Time derivatives of W_k and Wl_k under a normal variation with speed F,
/// evaluated from surface integrals.
struct VariationRates {
    std::vector<double> dW;   // k = 0..n
    std::vector<double> dWl;  // k = 0..n+1
};
VariationRates variation_rates(const CurvatureField& field, std::span<const double> speed);

// ---------------------------------------------------------------------------
// Centered geodesic balls

/// f_k(r) = W_k(B_r) (weighted = false) or h_k(r) = Wl_k(B_r) (weighted = true).
/// f_k is defined for 0 <= k <= n, h_k for 0 <= k <= n+1.
double ball_profile(int n, int k, bool weighted, double r);
/// Inverse of ball_profile; throws DomainError for value <= 0 or out of range.
double ball_profile_inverse(int n, int k, bool weighted, double value);

/// h_k(h_0^{-1}(V)) written out as
/// omega_n ((V/omega_n)^{2/k} + (V/omega_n)^{2(n-k+1)/((n+1)k)})^{k/2}, 1 <= k <= n+1.
double weighted_bound_explicit(int n, int k, double wl0);

}  // namespace hypflow
