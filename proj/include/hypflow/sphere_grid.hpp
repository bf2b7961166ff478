#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace hypflow {

/// Area of the unit sphere S^n in R^{n+1}.
double sphere_area(int n);

enum class GridMode { full2d, axisym };

/// Node layout over S^n.
///
/// full2d: n = 2, latitude-longitude grid with n_theta x n_xi nodes at
///   theta_j = (j + 1/2) h_theta, xi_i = i h_xi.  The poles are not nodes;
///   rows beyond a pole are filled by the reflection (-theta, xi) -> (theta, xi + pi).
/// axisym: any n >= 2, functions of the polar angle only, n_theta nodes
///   at the same staggered positions and n_xi = 1.
class SphereGrid {
public:
    static SphereGrid full2d(int n_theta, int n_xi);
    static SphereGrid axisym(int n, int n_theta);

    GridMode mode() const noexcept { return mode_; }
    int dim() const noexcept { return n_; }
    int n_theta() const noexcept { return n_theta_; }
    int n_xi() const noexcept { return n_xi_; }
    double h_theta() const noexcept { return h_theta_; }
    double h_xi() const noexcept { return h_xi_; }
    /// Coarsest angular spacing, the h of the O(h^2) tolerances.
    double h() const noexcept { return mode_ == GridMode::full2d ? std::max(h_theta_, h_xi_) : h_theta_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(n_theta_) * static_cast<std::size_t>(n_xi_); }

    double theta(int j) const noexcept { return (j + 0.5) * h_theta_; }
    double xi(int i) const noexcept { return i * h_xi_; }
    std::size_t index(int j, int i) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_xi_) + static_cast<std::size_t>(i);
    }

    /// Sphere measure carried by a node of row j.  Midpoint weights scaled so
    /// the total equals sphere_area(n) exactly.
    double sigma_weight(int j) const noexcept { return weights_[static_cast<std::size_t>(j)]; }

    /// Multiplicity of the second principal direction (n-1 in axisym mode).
    int second_multiplicity() const noexcept { return mode_ == GridMode::axisym ? n_ - 1 : 1; }

    /// Row/column of an extended-grid position after pole reflection.
    /// j may range over [-2, n_theta + 1].
    void reflect(int j, int i, int& jr, int& ir) const noexcept;

    /// Smallest physical node spacing (the xi spacing next to a pole in full2d).
    double min_spacing() const noexcept;

    std::string describe() const;

private:
    SphereGrid(GridMode mode, int n, int n_theta, int n_xi);

    GridMode mode_;
    int n_;
    int n_theta_;
    int n_xi_;
    double h_theta_;
    double h_xi_;
    std::vector<double> weights_;
};

}  // namespace hypflow
