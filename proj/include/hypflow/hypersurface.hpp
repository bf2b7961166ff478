#pragma once

// Star-shaped hypersurfaces of H^{n+1} written as radial graphs r(theta)
// over S^n, in the variable phi = Psi(r) = ln tanh(r/2) (Psi' = 1/sinh).
//
// All tensors are expressed in the orthonormal frame of the round metric:
// e_1 = d/dtheta, e_2 = (1/sin theta) d/dxi.  In axisym mode the second
// direction stands for the n-1 angular directions, which share one value.

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hypflow/sphere_grid.hpp"
#include "hypflow/symfun.hpp"

namespace hypflow {

/// phi = ln tanh(r/2); defined for r > 0, negative.
double phi_from_radius(double r);
/// Inverse of phi_from_radius; requires phi < 0.
double radius_from_phi(double phi);

class RadialGraph {
public:
    /// Throws NotStarShaped unless every phi is finite and negative.
    RadialGraph(SphereGrid grid, std::vector<double> phi);
    static RadialGraph from_radius(SphereGrid grid, std::span<const double> r);

    const SphereGrid& grid() const noexcept { return grid_; }
    std::span<const double> phi() const noexcept { return phi_; }
    std::span<const double> r() const noexcept { return r_; }

private:
    SphereGrid grid_;
    std::vector<double> phi_;
    std::vector<double> r_;
};

/// Covariant gradient and Hessian of phi on (S^n, sigma), orthonormal frame.
struct NodeDerivatives {
    double p1 = 0.0, p2 = 0.0;
    double h11 = 0.0, h12 = 0.0, h22 = 0.0;
};

/// Centered second-order differences with the Christoffel terms of the
/// round metric.  Throws ResolutionError for n_theta < 8.
std::vector<NodeDerivatives> sphere_gradient_hessian(const RadialGraph& graph);

struct NodeCurvature {
    double r = 0.0;
    double lambda = 0.0;        // sinh r
    double lambda_prime = 0.0;  // cosh r
    double grad_sq = 0.0;       // |D phi|^2
    double v = 1.0;             // sqrt(1 + |D phi|^2)
    double u = 0.0;             // support function lambda / v
    std::array<double, 3> g{};  // induced metric (11, 12, 22)
    std::array<double, 3> h{};  // second fundamental form (11, 12, 22)
    std::array<double, 4> weingarten{};  // h_i^j stored row-major (i, j)
    std::array<double, kMaxDim> kappa{};  // ascending
    std::array<double, kMaxDim + 2> E{};  // E_0..E_n, E_{n+1} = 0
    int cone_index = 0;
    double static_margin = 0.0;  // min kappa - u / lambda'
    double area_weight = 0.0;    // lambda^n v * sigma weight
};

struct CurvatureField {
    int n = 0;
    std::vector<NodeCurvature> nodes;

    double min_static_margin() const;
    double max_grad_sq() const;
    /// Largest spread max kappa - min kappa over all nodes.
    double max_umbilicity_defect() const;
};

/// Full curvature extraction.  Throws DegenerateMetric if the discrete
/// induced metric is not positive definite.
CurvatureField curvature(const RadialGraph& graph);
CurvatureField curvature(const RadialGraph& graph, std::span<const NodeDerivatives> derivs);

/// Eigenvalues (ascending) of the symmetric pencil (h, g) for 2x2 blocks.
std::array<double, 2> pencil_eigenvalues(const std::array<double, 3>& h, const std::array<double, 3>& g);

namespace detail {
// Buffer-reusing kernels shared with the flow stepper.
void fill_derivatives(const SphereGrid& grid, std::span<const double> phi, std::span<NodeDerivatives> out);
NodeCurvature node_curvature(int n, GridMode mode, double r, double sigma_weight, const NodeDerivatives& d,
                             SymmetricPoint* sp_out = nullptr);
}  // namespace detail

struct ResidualReport {
    double max_abs = 0.0;
    /// Area-weighted root mean square.
    double rms = 0.0;
    /// max_abs divided by the largest |n lambda'| on the surface.
    double max_rel = 0.0;
};

/// Residual of Delta_g lambda' = n (lambda' - u E_1), with the induced
/// Laplacian in conservative flux form.
ResidualReport lemma24_residuals(const CurvatureField& field, const RadialGraph& graph);

// ---------------------------------------------------------------------------
// Shapes

struct CenteredSphere {
    double r0;
};
/// Geodesic sphere of radius rho whose center sits at distance d on the polar axis.
struct OffcenterSphere {
    double rho;
    double d;
};
/// r(theta) = r0 + eps cos(m theta).
struct PerturbedSphere {
    double r0;
    double eps;
    int m;
};
/// Piecewise-linear profile r(theta) from a (theta, r) table.
struct CustomProfile {
    std::vector<std::pair<double, double>> table;
};

using ShapeSpec = std::variant<CenteredSphere, OffcenterSphere, PerturbedSphere, CustomProfile>;

std::string describe(const ShapeSpec& shape);

/// Radius of a geodesic sphere (radius rho, center at distance d along
/// theta = 0) in direction theta, from cosh rho = cosh d cosh r - sinh d sinh r cos theta.
/// Safeguarded Newton; throws NotStarShaped if d >= rho.
double offcenter_radius(double rho, double d, double theta);

RadialGraph make_shape(const ShapeSpec& shape, const SphereGrid& grid);

/// Reads a two-column (theta, r) table.  Lines starting with '#' are comments.
CustomProfile read_profile(std::istream& in);
CustomProfile read_profile_file(const std::string& path);

/// Writes the graph as a profile table: (theta, r) in axisym mode and
/// (theta, xi, r) in full2d mode.
void write_profile(std::ostream& out, const RadialGraph& graph);

}  // namespace hypflow
