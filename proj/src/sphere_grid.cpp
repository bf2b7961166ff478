#include "hypflow/sphere_grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hypflow/errors.hpp"
#include "hypflow/symfun.hpp"

namespace hypflow {

double sphere_area(int n) {
    const double a = 0.5 * (n + 1);
    return 2.0 * std::exp(a * std::log(std::numbers::pi) - std::lgamma(a));
}

SphereGrid SphereGrid::full2d(int n_theta, int n_xi) {
    if (n_theta < 8 || n_xi < 8) throw ResolutionError("full2d grid needs at least 8 nodes per direction");
    if (n_xi % 2 != 0) throw InvalidInput("full2d grid needs an even number of longitude nodes");
    return SphereGrid(GridMode::full2d, 2, n_theta, n_xi);
}

SphereGrid SphereGrid::axisym(int n, int n_theta) {
    if (n < 2 || n > kMaxDim) throw InvalidInput("axisymmetric grid needs 2 <= n <= " + std::to_string(kMaxDim));
    if (n_theta < 8) throw ResolutionError("axisymmetric grid needs at least 8 profile nodes");
    return SphereGrid(GridMode::axisym, n, n_theta, 1);
}

SphereGrid::SphereGrid(GridMode mode, int n, int n_theta, int n_xi)
    : mode_(mode),
      n_(n),
      n_theta_(n_theta),
      n_xi_(n_xi),
      h_theta_(std::numbers::pi / n_theta),
      h_xi_(2.0 * std::numbers::pi / n_xi),
      weights_(static_cast<std::size_t>(n_theta)) {
    double total = 0.0;
    for (int j = 0; j < n_theta_; ++j) {
        const double w = std::pow(std::sin(theta(j)), n_ - 1);
        weights_[static_cast<std::size_t>(j)] = w;
        total += w;
    }
    const double scale = sphere_area(n_) / (total * n_xi_);
    for (double& w : weights_) w *= scale;
}

void SphereGrid::reflect(int j, int i, int& jr, int& ir) const noexcept {
    ir = i;
    if (j < 0) {
        jr = -1 - j;
        ir = i + n_xi_ / 2;
    } else if (j >= n_theta_) {
        jr = 2 * n_theta_ - 1 - j;
        ir = i + n_xi_ / 2;
    } else {
        jr = j;
    }
    ir = ((ir % n_xi_) + n_xi_) % n_xi_;
}

double SphereGrid::min_spacing() const noexcept {
    if (mode_ == GridMode::axisym) return h_theta_;
    return std::min(h_theta_, std::sin(theta(0)) * h_xi_);
}

std::string SphereGrid::describe() const {
    std::ostringstream os;
    if (mode_ == GridMode::full2d) {
        os << "full2d " << n_theta_ << "x" << n_xi_;
    } else {
        os << "axisym n=" << n_ << " N=" << n_theta_;
    }
    return os.str();
}

}  // namespace hypflow
