#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/sim.hpp"
#include "core/system.hpp"

#include "json.hpp"

namespace stochham {

using json = nlohmann::ordered_json;

// Parsed key-value config file with [section] and [section.sub] headers,
// '#'/';' comments, and line tracking for precise error messages. Typed
// getters mark keys consumed; finish() rejects anything unconsumed, so
// misspelled keys fail loudly with their line number.
class ConfigReader {
  public:
    static ConfigReader parse_file(const std::string& path);
    static ConfigReader parse_string(const std::string& text, const std::string& name);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key);
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback);
    double get_double(const std::string& section, const std::string& key);
    double get_double(const std::string& section, const std::string& key, double fallback);
    int64_t get_int(const std::string& section, const std::string& key);
    int64_t get_int(const std::string& section, const std::string& key, int64_t fallback);
    uint64_t get_u64(const std::string& section, const std::string& key);
    bool get_bool(const std::string& section, const std::string& key, bool fallback);
    std::vector<double> get_vec(const std::string& section, const std::string& key);
    std::vector<double> get_vec(const std::string& section, const std::string& key,
                                const std::vector<double>& fallback);

    // Throws a spec error naming every unconsumed key with its line.
    void finish() const;

    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& what) const;
    const std::string& name() const { return name_; }

  private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };
    std::string name_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::map<std::string, int> section_lines_;

    const Entry* find(const std::string& section, const std::string& key) const;
    const Entry& require(const std::string& section, const std::string& key);
};

// System parameters as declared in the [system] block; the System itself is
// built later so the oscillator chart can use the run's cache directory.
struct SystemDesc {
    SystemKind kind = SystemKind::pendulum;
    double gravity = 9.81, length = 1.0; // pendulum
    int m = 1;                           // oscillator
    double chart_tol = 1e-10;            // oscillator
    CustomFrequencyMap custom;           // custom

    size_t dim() const;
    System build(const std::string& cache_dir) const;
    json to_json() const;
};

struct Tolerances {
    double ks = 0.05;
    double cf_sup = 0.02;
    double cov_sigma = 3.0; // the "k standard errors" multiplier for covariance windows
};

struct OutputCfg {
    std::string dir = "out";
    std::string trajectories = "per_replica"; // per_replica | indexed
    int histogram_bins = 40;
};

struct BirkhoffCfg {
    double horizon = 1000.0;
    int64_t replicas = 200;
};

struct LevyCheckCfg {
    double t_end = 1.0;
    double dt = 1.0 / 64.0;
    double u_min = -3.0, u_max = 3.0;
    int64_t u_count = 21;
    int64_t replicas = 100000;
};

struct PeriodTableCfg {
    int m_min = 1, m_max = 4;
};

// Fully resolved run configuration: file values + command-line overrides +
// defaults, with a JSON echo of everything that was in effect.
struct RunConfig {
    SystemDesc system;
    SimSpec sim; // grid.steps is set per command (duration differs)
    double t_end = 0.0;
    int64_t n = 0;
    double delta = 0.0;
    int64_t replicas = 0;
    uint64_t seed = 0;
    BirkhoffCfg birkhoff;
    LevyCheckCfg levy_check;
    PeriodTableCfg period_table;
    Tolerances tol;
    OutputCfg output;
    json resolved;
};

struct CliOverrides {
    bool has_seed = false;
    uint64_t seed = 0;
    bool has_replicas = false;
    int64_t replicas = 0;
    bool has_out = false;
    std::string out;
    int threads = 0; // 0 = auto
};

enum class Command { simulate, verify_clt, levy_check, period_table };

// Parses, validates, and resolves a config file for the given command,
// applying overrides. Throws SpecError with file:line context on any
// problem (including dt not dividing delta, caught before simulation).
RunConfig load_run_config(const std::string& path, Command cmd, const CliOverrides& over);

} // namespace stochham
