#include "hypflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "hypflow/errors.hpp"

namespace hypflow {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

class Table {
public:
    void add(const std::string& key, const std::string& value, int line) {
        if (entries_.count(key)) throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
        entries_[key] = {value, line, false};
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string str(const std::string& key, const std::string& fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        return it->second.value;
    }

    double real(const std::string& key, double fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        try {
            std::size_t pos = 0;
            const double x = std::stod(it->second.value, &pos);
            if (pos != it->second.value.size()) throw std::invalid_argument("trailing");
            return x;
        } catch (const std::exception&) {
            throw bad(it, "expected a number");
        }
    }

    int integer(const std::string& key, int fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        const std::string& v = it->second.value;
        int x = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw bad(it, "expected an integer");
        return x;
    }

    bool boolean(const std::string& key, bool fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        const std::string& v = it->second.value;
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        throw bad(it, "expected true or false");
    }

    ConfigError error(const std::string& key, const std::string& msg) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return ConfigError(msg);
        return bad(it, msg);
    }

    void reject_unused() const {
        for (const auto& [k, e] : entries_) {
            if (!e.used) throw ConfigError("line " + std::to_string(e.line) + ": unknown or unused key '" + k + "'");
        }
    }

private:
    using Map = std::map<std::string, Entry>;
    static ConfigError bad(Map::const_iterator it, const std::string& msg) {
        return ConfigError("line " + std::to_string(it->second.line) + ": " + it->first + " = '" + it->second.value +
                           "': " + msg);
    }
    Map entries_;
};

PhiFunction parse_phi(Table& t, PhiFunction fallback) {
    if (!t.has("phi")) return fallback;
    const std::string kind = t.str("phi", "");
    const double p = t.real("phi_p", 1.0);
    if (kind == "identity") return PhiFunction::identity();
    if (kind == "power") return PhiFunction::power(p);
    if (kind == "neg_inv_power") return PhiFunction::neg_inv_power(p);
    if (kind == "log") return PhiFunction::log();
    throw t.error("phi", "expected identity, power, neg_inv_power or log");
}

SpeedFunctionSpec parse_speed(Table& t, PhiFunction phi) {
    const std::string kind = t.str("speed", "mean");
    if (kind == "mean") return SpeedFunctionSpec::mean(phi);
    if (kind == "quotient") return SpeedFunctionSpec::quotient(t.integer("k", 1), t.integer("l", 0), phi);
    throw t.error("speed", "expected mean or quotient");
}

}  // namespace

SphereGrid RunConfig::grid_at(int level) const {
    if (grid_mode == GridMode::axisym) return SphereGrid::axisym(n, level);
    const int nx = n_xi > 0 ? static_cast<int>(static_cast<long>(n_xi) * level / n_theta) : 2 * level;
    return SphereGrid::full2d(level, nx);
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    Table t;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        t.add(key, value, line_no);
    }

    RunConfig c;
    c.n = t.integer("n", 2);
    const std::string grid = t.str("grid", "full2d");
    if (grid == "full2d") c.grid_mode = GridMode::full2d;
    else if (grid == "axisym") c.grid_mode = GridMode::axisym;
    else throw t.error("grid", "expected full2d or axisym");
    if (c.grid_mode == GridMode::full2d && c.n != 2) throw t.error("grid", "full2d requires n = 2");
    if (c.n < 2 || c.n > kMaxDim) throw t.error("n", "dimension out of range");
    c.n_theta = t.integer("n_theta", 64);
    c.n_xi = t.integer("n_xi", 0);
    if (c.n_theta < 8) throw t.error("n_theta", "need at least 8 latitude rows");
    if (c.grid_mode == GridMode::axisym && c.n_xi != 0) throw t.error("n_xi", "axisym grids have no longitude");
    if (c.grid_mode == GridMode::full2d && c.n_xi != 0 && (c.n_xi < 8 || c.n_xi % 2 != 0)) {
        throw t.error("n_xi", "need an even longitude count of at least 8");
    }

    const std::string shape = t.str("shape", "centered");
    if (shape == "centered") {
        c.shape = CenteredSphere{t.real("r0", 1.0)};
    } else if (shape == "offcenter") {
        c.shape = OffcenterSphere{t.real("rho", 1.0), t.real("d", 0.3)};
    } else if (shape == "perturbed") {
        c.shape = PerturbedSphere{t.real("r0", 1.0), t.real("eps", 0.05), t.integer("m", 2)};
    } else if (shape == "profile") {
        std::filesystem::path p = t.str("profile_file", "");
        if (p.empty()) throw t.error("shape", "profile shapes need profile_file");
        if (p.is_relative()) p = base_dir / p;
        try {
            c.shape = read_profile_file(p.string());
        } catch (const Error& e) {
            throw ConfigError(std::string("profile_file: ") + e.what());
        }
    } else {
        throw t.error("shape", "expected centered, offcenter, perturbed or profile");
    }
    c.shape_id = t.str("shape_id", describe(c.shape));

    const std::string flow = t.str("flow", "none");
    if (flow != "none") {
        FlowSpec f;
        if (flow == "weighted_vol_preserving" || flow == "locally_mcf") {
            f.family = FlowFamily::weighted_vol_preserving;
            f.speed = parse_speed(t, parse_phi(t, PhiFunction::identity()));
        } else if (flow == "sx_inverse") {
            f.family = FlowFamily::sx_inverse;
            f.speed = parse_speed(t, parse_phi(t, PhiFunction::neg_inv_power(1.0)));
        } else if (flow == "bgl") {
            f.family = FlowFamily::bgl;
            const int k = t.integer("k", 1);
            f.speed = SpeedFunctionSpec::quotient(k, k - 1);
        } else {
            throw t.error("flow", "expected none, weighted_vol_preserving, sx_inverse or bgl");
        }
        f.t_end = t.real("t_end", f.t_end);
        f.cfl = t.real("cfl", f.cfl);
        f.fixed_dt = t.real("fixed_dt", f.fixed_dt);
        f.sample_dt = t.real("sample_dt", f.sample_dt);
        f.convergence_threshold = t.real("convergence_threshold", f.convergence_threshold);
        f.polar_filter = t.boolean("polar_filter", f.polar_filter);
        try {
            f.validate(c.n);
        } catch (const InvalidInput& e) {
            throw ConfigError(std::string("flow: ") + e.what());
        }
        c.flow = f;
    }

    const std::string checks = t.str("checks", "");
    if (checks == "all") {
        c.checks = all_check_names();
    } else {
        std::istringstream is(checks);
        std::string item;
        while (std::getline(is, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            if (std::find(all_check_names().begin(), all_check_names().end(), item) == all_check_names().end()) {
                throw t.error("checks", "unknown check '" + item + "'");
            }
            c.checks.push_back(item);
        }
    }
    c.exploratory = t.boolean("exploratory", false);
    c.output = t.str("output", "run");
    c.plots = t.boolean("plots", true);
    c.tol.equality = t.real("tol_equality", c.tol.equality);
    c.tol.fail = t.real("tol_fail", c.tol.fail);
    c.tol.monotone = t.real("tol_monotone", c.tol.monotone);
    c.tol.hypothesis = t.real("tol_hypothesis", c.tol.hypothesis);
    t.reject_unused();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in, path.parent_path());
}

}  // namespace hypflow
