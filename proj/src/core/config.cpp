#include "core/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/format.hpp"

namespace stochham {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
    return true;
}

double parse_double_or_fail(const ConfigReader& r, const std::string& sec,
                            const std::string& key, const std::string& token) {
    std::string t = trim(token);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        r.fail(sec, key, "expected a number, got '" + t + "'");
    return v;
}

} // namespace

ConfigReader ConfigReader::parse_string(const std::string& text, const std::string& name) {
    ConfigReader r;
    r.name_ = name;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw SpecError(name + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (!valid_name(section))
                throw SpecError(name + ":" + std::to_string(lineno) + ": invalid section name '" +
                                section + "'");
            if (!r.section_lines_.count(section)) r.section_lines_[section] = lineno;
            r.sections_[section]; // ensure the section exists even if empty
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw SpecError(name + ":" + std::to_string(lineno) +
                            ": expected 'key = value' or '[section]'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        size_t hash = value.find_first_of("#;");
        if (hash != std::string::npos) value = trim(value.substr(0, hash));
        if (!valid_name(key))
            throw SpecError(name + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
        if (section.empty())
            throw SpecError(name + ":" + std::to_string(lineno) + ": key '" + key +
                            "' outside any section");
        auto& sec = r.sections_[section];
        if (sec.count(key))
            throw SpecError(name + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                            "' in section [" + section + "] (first at line " +
                            std::to_string(sec[key].line) + ")");
        sec[key] = Entry{value, lineno, false};
    }
    return r;
}

ConfigReader ConfigReader::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

const ConfigReader::Entry* ConfigReader::find(const std::string& section,
                                              const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

bool ConfigReader::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

void ConfigReader::fail(const std::string& section, const std::string& key,
                        const std::string& what) const {
    const Entry* e = find(section, key);
    std::string where = name_;
    if (e) where += ":" + std::to_string(e->line);
    throw SpecError(where + ": key '" + key + "' in [" + section + "]: " + what);
}

const ConfigReader::Entry& ConfigReader::require(const std::string& section,
                                                 const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) {
        std::string where = name_;
        auto s = section_lines_.find(section);
        if (s != section_lines_.end()) where += ":" + std::to_string(s->second);
        throw SpecError(where + ": missing required key '" + key + "' in section [" + section +
                        "]");
    }
    e->consumed = true;
    return *e;
}

std::string ConfigReader::get_string(const std::string& section, const std::string& key) {
    return require(section, key).value;
}

std::string ConfigReader::get_string(const std::string& section, const std::string& key,
                                     const std::string& fallback) {
    if (!has(section, key)) return fallback;
    return get_string(section, key);
}

double ConfigReader::get_double(const std::string& section, const std::string& key) {
    return parse_double_or_fail(*this, section, key, require(section, key).value);
}

double ConfigReader::get_double(const std::string& section, const std::string& key,
                                double fallback) {
    if (!has(section, key)) return fallback;
    return get_double(section, key);
}

int64_t ConfigReader::get_int(const std::string& section, const std::string& key) {
    std::string t = trim(require(section, key).value);
    int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        fail(section, key, "expected an integer, got '" + t + "'");
    return v;
}

int64_t ConfigReader::get_int(const std::string& section, const std::string& key,
                              int64_t fallback) {
    if (!has(section, key)) return fallback;
    return get_int(section, key);
}

uint64_t ConfigReader::get_u64(const std::string& section, const std::string& key) {
    std::string t = trim(require(section, key).value);
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        fail(section, key, "expected an unsigned integer, got '" + t + "'");
    return v;
}

bool ConfigReader::get_bool(const std::string& section, const std::string& key, bool fallback) {
    if (!has(section, key)) return fallback;
    std::string t = trim(require(section, key).value);
    if (t == "true") return true;
    if (t == "false") return false;
    fail(section, key, "expected true or false, got '" + t + "'");
}

std::vector<double> ConfigReader::get_vec(const std::string& section, const std::string& key) {
    std::string raw = require(section, key).value;
    std::vector<double> out;
    size_t pos = 0;
    while (true) {
        size_t comma = raw.find(',', pos);
        std::string token =
            comma == std::string::npos ? raw.substr(pos) : raw.substr(pos, comma - pos);
        if (trim(token).empty()) fail(section, key, "empty vector component");
        out.push_back(parse_double_or_fail(*this, section, key, token));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<double> ConfigReader::get_vec(const std::string& section, const std::string& key,
                                          const std::vector<double>& fallback) {
    if (!has(section, key)) return fallback;
    return get_vec(section, key);
}

void ConfigReader::finish() const {
    std::string problems;
    for (const auto& [sec, entries] : sections_)
        for (const auto& [key, e] : entries)
            if (!e.consumed) {
                if (!problems.empty()) problems += "; ";
                problems += name_ + ":" + std::to_string(e.line) + ": unknown key '" + key +
                            "' in section [" + sec + "]";
            }
    if (!problems.empty()) throw SpecError(problems);
}

size_t SystemDesc::dim() const {
    return kind == SystemKind::custom ? custom.dim() : 1;
}

System SystemDesc::build(const std::string& cache_dir) const {
    switch (kind) {
        case SystemKind::pendulum: return System::make_pendulum(gravity, length);
        case SystemKind::oscillator: return System::make_oscillator(m, chart_tol, cache_dir);
        case SystemKind::custom: return System::make_custom(custom);
    }
    throw SpecError("system: unknown kind");
}

json SystemDesc::to_json() const {
    json j;
    switch (kind) {
        case SystemKind::pendulum:
            j["kind"] = "pendulum";
            j["gravity_m_per_s2"] = gravity;
            j["length_m"] = length;
            break;
        case SystemKind::oscillator:
            j["kind"] = "oscillator";
            j["exponent_m"] = m;
            j["chart_tol"] = chart_tol;
            break;
        case SystemKind::custom:
            j["kind"] = "custom";
            j["base_frequency_per_s"] = custom.base;
            j["modulation_amp"] = custom.amp;
            j["modulation_center"] = custom.center;
            j["modulation_width"] = custom.width;
            break;
    }
    return j;
}

namespace {

std::pair<JumpMeasureSpec, json> parse_jumps(ConfigReader& r, const std::string& sec) {
    JumpMeasureSpec spec;
    json echo;
    if (!r.has(sec, "shape")) {
        echo["shape"] = "none";
        return {spec, echo};
    }
    std::string shape = r.get_string(sec, "shape");
    double mass = r.get_double(sec, "mass_per_s");
    if (!(mass > 0.0)) r.fail(sec, "mass_per_s", "must be positive");
    spec.kind = JumpMeasureSpec::Kind::finite_activity;
    echo["shape"] = shape;
    echo["mass_per_s"] = mass;
    if (shape == "uniform" || shape == "triangular") {
        std::vector<double> support = r.get_vec(sec, "support");
        if (support.size() != 2 || !(support[0] < support[1]))
            r.fail(sec, "support", "expected 'lo, hi' with lo < hi");
        echo["support"] = support;
        if (shape == "uniform") {
            spec.density = PiecewiseLinearDensity::uniform(support[0], support[1], mass);
        } else {
            double peak = r.get_double(sec, "peak");
            if (!(peak > support[0]) || !(peak < support[1]))
                r.fail(sec, "peak", "must lie strictly inside the support");
            echo["peak"] = peak;
            spec.density =
                PiecewiseLinearDensity::triangular(support[0], peak, support[1], mass);
        }
    } else if (shape == "tabulated") {
        std::vector<double> nodes = r.get_vec(sec, "nodes");
        std::vector<double> values = r.get_vec(sec, "values");
        echo["nodes"] = nodes;
        echo["values"] = values;
        try {
            spec.density = PiecewiseLinearDensity::tabulated(nodes, values, mass);
        } catch (const Error& e) {
            r.fail(sec, "nodes", e.what());
        }
    } else {
        r.fail(sec, "shape", "must be uniform, triangular, or tabulated");
    }
    return {spec, echo};
}

std::pair<NoiseModel, json> parse_noise(ConfigReader& r, const std::string& sec, size_t dim) {
    NoiseModel nm;
    json echo;
    std::string kind = r.get_string(sec, "kind", "brownian");
    echo["kind"] = kind;
    if (kind == "brownian") return {nm, echo};
    if (kind != "levy") r.fail(sec, "kind", "must be brownian or levy");
    nm.is_levy = true;
    nm.triplet.dim = static_cast<int>(dim);
    nm.triplet.gamma = r.get_vec(sec, "drift_per_s", std::vector<double>(dim, 0.0));
    if (nm.triplet.gamma.size() != dim)
        r.fail(sec, "drift_per_s", "expected " + std::to_string(dim) + " components");
    nm.triplet.xi = r.get_double(sec, "diffusion", 0.0);
    echo["drift_per_s"] = nm.triplet.gamma;
    echo["diffusion"] = nm.triplet.xi;
    auto [small, small_echo] = parse_jumps(r, sec + ".small_jumps");
    auto [large, large_echo] = parse_jumps(r, sec + ".large_jumps");
    nm.triplet.small_jumps = small;
    nm.triplet.large_jumps = large;
    echo["small_jumps"] = small_echo;
    echo["large_jumps"] = large_echo;
    try {
        nm.triplet.validate();
    } catch (const Error& e) {
        r.fail(sec, "kind", std::string("invalid triplet: ") + e.what());
    }
    return {nm, echo};
}

} // namespace

RunConfig load_run_config(const std::string& path, Command cmd, const CliOverrides& over) {
    ConfigReader r = ConfigReader::parse_file(path);
    RunConfig rc;

    std::string kind = r.get_string("system", "kind");
    if (kind == "pendulum") {
        rc.system.kind = SystemKind::pendulum;
        rc.system.gravity = r.get_double("system", "gravity_m_per_s2", 9.81);
        rc.system.length = r.get_double("system", "length_m", 1.0);
        if (!(rc.system.gravity > 0.0)) r.fail("system", "gravity_m_per_s2", "must be positive");
        if (!(rc.system.length > 0.0)) r.fail("system", "length_m", "must be positive");
    } else if (kind == "oscillator") {
        rc.system.kind = SystemKind::oscillator;
        rc.system.m = static_cast<int>(r.get_int("system", "exponent_m"));
        rc.system.chart_tol = r.get_double("system", "chart_tol", 1e-10);
        if (rc.system.m < 1) r.fail("system", "exponent_m", "must be at least 1");
        if (!(rc.system.chart_tol > 0.0)) r.fail("system", "chart_tol", "must be positive");
    } else if (kind == "custom") {
        rc.system.kind = SystemKind::custom;
        rc.system.custom.base = r.get_vec("system", "base_frequency_per_s");
        rc.system.custom.amp = r.get_double("system", "modulation_amp", 0.0);
        rc.system.custom.center = r.get_double("system", "modulation_center", 0.0);
        rc.system.custom.width = r.get_double("system", "modulation_width", 1.0);
        try {
            rc.system.custom.validate();
        } catch (const Error& e) {
            r.fail("system", "base_frequency_per_s", e.what());
        }
    } else {
        r.fail("system", "kind", "must be pendulum, oscillator, or custom");
    }
    size_t d = rc.system.dim();

    // simulate and verify-clt need the full simulation block; levy-check and
    // period-table only borrow flags from it, so its keys stay optional there.
    bool need_sim = cmd == Command::simulate || cmd == Command::verify_clt;
    rc.sim.I0 = need_sim ? r.get_vec("simulation", "initial_action")
                         : r.get_vec("simulation", "initial_action", std::vector<double>(d, 1.0));
    if (rc.sim.I0.size() != d)
        r.fail("simulation", "initial_action", "expected " + std::to_string(d) + " components");
    rc.sim.theta0 = r.get_vec("simulation", "initial_angle", std::vector<double>(d, 0.0));
    if (rc.sim.theta0.size() != d)
        r.fail("simulation", "initial_angle", "expected " + std::to_string(d) + " components");
    rc.sim.sigma = r.get_double("simulation", "action_intensity", 0.0);
    rc.sim.zeta = r.get_double("simulation", "angle_intensity", 0.0);
    double dt = need_sim ? r.get_double("simulation", "dt_s")
                         : r.get_double("simulation", "dt_s", 1.0);
    if (!(dt > 0.0)) r.fail("simulation", "dt_s", "must be positive");
    rc.sim.interlace = r.get_bool("simulation", "interlace", false);
    std::string policy = r.get_string("simulation", "domain_policy", "abort");
    if (policy == "abort")
        rc.sim.policy = DomainPolicy::abort_replica;
    else if (policy == "reflect")
        rc.sim.policy = DomainPolicy::reflect;
    else if (policy == "clamp")
        rc.sim.policy = DomainPolicy::clamp_at_epsilon;
    else
        r.fail("simulation", "domain_policy", "must be abort, reflect, or clamp");
    rc.sim.grid.t0 = 0.0;
    rc.sim.grid.dt = dt;

    auto [action_nm, action_echo] = parse_noise(r, "action_noise", d);
    auto [angle_nm, angle_echo] = parse_noise(r, "angle_noise", d);
    rc.sim.action_noise = action_nm;
    rc.sim.angle_noise = angle_nm;

    // Consume everything schema-wide so shared configs work for all commands.
    rc.n = r.get_int("statistic", "n", 0);
    rc.delta = r.get_double("statistic", "delta_s", 0.0);
    rc.replicas = r.get_int("statistic", "replicas", 0);
    bool file_has_seed = r.has("statistic", "seed");
    if (file_has_seed) rc.seed = r.get_u64("statistic", "seed");
    double t_end_file = r.get_double("simulation", "t_end_s", 0.0);

    rc.birkhoff.horizon = r.get_double("birkhoff", "horizon_s", 1000.0);
    rc.birkhoff.replicas = r.get_int("birkhoff", "replicas", 200);
    if (!(rc.birkhoff.horizon > 0.0)) r.fail("birkhoff", "horizon_s", "must be positive");
    if (rc.birkhoff.replicas < 2) r.fail("birkhoff", "replicas", "must be at least 2");

    rc.levy_check.t_end = r.get_double("levy_check", "t_end_s", 1.0);
    rc.levy_check.dt = r.get_double("levy_check", "dt_s", 1.0 / 64.0);
    rc.levy_check.u_min = r.get_double("levy_check", "u_min", -3.0);
    rc.levy_check.u_max = r.get_double("levy_check", "u_max", 3.0);
    rc.levy_check.u_count = r.get_int("levy_check", "u_count", 21);
    rc.levy_check.replicas = r.get_int("levy_check", "replicas", 100000);
    if (!(rc.levy_check.t_end > 0.0)) r.fail("levy_check", "t_end_s", "must be positive");
    if (!(rc.levy_check.dt > 0.0)) r.fail("levy_check", "dt_s", "must be positive");
    if (rc.levy_check.u_count < 2) r.fail("levy_check", "u_count", "must be at least 2");
    if (!(rc.levy_check.u_min < rc.levy_check.u_max))
        r.fail("levy_check", "u_min", "must be below u_max");
    if (rc.levy_check.replicas < 2) r.fail("levy_check", "replicas", "must be at least 2");

    rc.period_table.m_min = static_cast<int>(r.get_int("period_table", "m_min", 1));
    rc.period_table.m_max = static_cast<int>(r.get_int("period_table", "m_max", 4));
    if (rc.period_table.m_min < 1) r.fail("period_table", "m_min", "must be at least 1");
    if (rc.period_table.m_max < rc.period_table.m_min)
        r.fail("period_table", "m_max", "must be at least m_min");

    rc.tol.ks = r.get_double("tolerances", "ks", 0.05);
    rc.tol.cf_sup = r.get_double("tolerances", "cf_sup", 0.02);
    rc.tol.cov_sigma = r.get_double("tolerances", "cov_sigma", 3.0);
    if (!(rc.tol.ks > 0.0)) r.fail("tolerances", "ks", "must be positive");
    if (!(rc.tol.cf_sup > 0.0)) r.fail("tolerances", "cf_sup", "must be positive");
    if (!(rc.tol.cov_sigma > 0.0)) r.fail("tolerances", "cov_sigma", "must be positive");

    rc.output.dir = r.get_string("output", "dir", "out");
    rc.output.trajectories = r.get_string("output", "trajectories", "per_replica");
    if (rc.output.trajectories != "per_replica" && rc.output.trajectories != "indexed")
        r.fail("output", "trajectories", "must be per_replica or indexed");
    rc.output.histogram_bins = static_cast<int>(r.get_int("output", "histogram_bins", 40));
    if (rc.output.histogram_bins < 2) r.fail("output", "histogram_bins", "must be at least 2");

    // Command-line overrides.
    if (over.has_seed) rc.seed = over.seed;
    if (over.has_replicas) rc.replicas = over.replicas;
    if (over.has_out) rc.output.dir = over.out;

    // Per-command requirements; the seed is always mandatory (no wall-clock
    // seeding anywhere).
    if (!file_has_seed && !over.has_seed)
        throw SpecError(r.name() + ": missing required key 'seed' in section [statistic] " +
                        "(and no --seed override)");
    if (cmd == Command::verify_clt || cmd == Command::simulate) {
        if (rc.replicas < 2) r.fail("statistic", "replicas", "must be at least 2");
    }
    if (cmd == Command::verify_clt) {
        if (rc.n < 1) r.fail("statistic", "n", "must be at least 1 (required by verify-clt)");
        if (!(rc.delta > 0.0))
            r.fail("statistic", "delta_s", "must be positive (required by verify-clt)");
        double ratio = rc.delta / dt;
        int64_t stride = static_cast<int64_t>(std::llround(ratio));
        if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9)
            r.fail("simulation", "dt_s",
                   "must divide delta_s = " + g17(rc.delta) + " (got dt_s = " + g17(dt) + ")");
        rc.t_end = static_cast<double>(rc.n) * rc.delta;
        rc.sim.grid.steps = rc.n * stride;
        if (t_end_file != 0.0 && std::abs(t_end_file - rc.t_end) > 1e-9 * rc.t_end)
            r.fail("simulation", "t_end_s",
                   "conflicts with n * delta_s = " + g17(rc.t_end) + "; omit it for verify-clt");
    } else if (cmd == Command::simulate) {
        if (!(t_end_file > 0.0))
            r.fail("simulation", "t_end_s", "must be positive (required by simulate)");
        rc.t_end = t_end_file;
        rc.sim.grid.steps = static_cast<int64_t>(std::ceil(t_end_file / dt - 1e-9));
    } else {
        rc.t_end = t_end_file;
        rc.sim.grid.steps = 1; // unused by levy-check / period-table
    }

    if (cmd == Command::levy_check) {
        if (!rc.sim.action_noise.is_levy)
            r.fail("action_noise", "kind",
                   "levy-check validates the [action_noise] triplet; set kind = levy "
                   "(pure Brownian is the triplet with diffusion = 1 and no jumps)");
        if (d != 1)
            throw SpecError(r.name() + ": levy-check requires a 1-dimensional system");
    }

    r.finish();

    // Resolved-config echo (defaults and overrides applied).
    json& j = rc.resolved;
    j["config_file"] = r.name();
    j["system"] = rc.system.to_json();
    json sim;
    sim["initial_action"] = rc.sim.I0;
    sim["initial_angle"] = rc.sim.theta0;
    sim["action_intensity"] = rc.sim.sigma;
    sim["angle_intensity"] = rc.sim.zeta;
    sim["dt_s"] = rc.sim.grid.dt;
    sim["t_end_s"] = rc.t_end;
    sim["steps"] = rc.sim.grid.steps;
    sim["interlace"] = rc.sim.interlace;
    sim["domain_policy"] = policy;
    j["simulation"] = sim;
    j["action_noise"] = action_echo;
    j["angle_noise"] = angle_echo;
    json stat;
    stat["n"] = rc.n;
    stat["delta_s"] = rc.delta;
    stat["replicas"] = rc.replicas;
    stat["seed"] = rc.seed;
    j["statistic"] = stat;
    json bk;
    bk["horizon_s"] = rc.birkhoff.horizon;
    bk["replicas"] = rc.birkhoff.replicas;
    j["birkhoff"] = bk;
    if (cmd == Command::levy_check) {
        json lc;
        lc["t_end_s"] = rc.levy_check.t_end;
        lc["dt_s"] = rc.levy_check.dt;
        lc["u_min"] = rc.levy_check.u_min;
        lc["u_max"] = rc.levy_check.u_max;
        lc["u_count"] = rc.levy_check.u_count;
        lc["replicas"] = rc.levy_check.replicas;
        j["levy_check"] = lc;
    }
    if (cmd == Command::period_table) {
        json pt;
        pt["m_min"] = rc.period_table.m_min;
        pt["m_max"] = rc.period_table.m_max;
        j["period_table"] = pt;
    }
    json tol;
    tol["ks"] = rc.tol.ks;
    tol["cf_sup"] = rc.tol.cf_sup;
    tol["cov_sigma"] = rc.tol.cov_sigma;
    j["tolerances"] = tol;
    json outj;
    outj["dir"] = rc.output.dir;
    outj["trajectories"] = rc.output.trajectories;
    outj["histogram_bins"] = rc.output.histogram_bins;
    j["output"] = outj;
    return rc;
}

} // namespace stochham
