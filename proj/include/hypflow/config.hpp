#pragma once

// Flat key = value run configuration.  '#' starts a comment; blank lines are
// ignored; keys may appear once.  See README for the key list.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hypflow/flows.hpp"
#include "hypflow/hypersurface.hpp"
#include "hypflow/verify.hpp"

namespace hypflow {

struct RunConfig {
    int n = 2;
    GridMode grid_mode = GridMode::full2d;
    int n_theta = 64;
    /// full2d only; 0 means 2 * n_theta.
    int n_xi = 0;
    std::string shape_id;
    ShapeSpec shape = CenteredSphere{1.0};
    std::optional<FlowSpec> flow;
    std::vector<std::string> checks;
    bool exploratory = false;
    std::string output = "run";
    bool plots = true;
    Tolerances tol;

    SphereGrid grid() const { return grid_at(n_theta); }
    /// Same layout at another latitude resolution (n_xi scales along).
    SphereGrid grid_at(int n_theta_level) const;
};

/// Throws ConfigError with the offending line number.  Relative profile
/// paths resolve against base_dir.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace hypflow
