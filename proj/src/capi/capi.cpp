// C boundary: thin translation layer between the extern-C surface in
// include/stochham/stochham.h and the C++ core. Exceptions are caught here
// and mapped to status codes; messages land in a thread-local buffer.
#include "stochham/stochham.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/oscillator.hpp"
#include "core/report.hpp"
#include "core/rng.hpp"
#include "core/runner.hpp"
#include "core/system.hpp"

namespace {

thread_local std::string g_last_error;

sh_status fail(sh_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

sh_status fail(const stochham::Error& e) {
    g_last_error = e.what();
    return static_cast<sh_status>(static_cast<int>(e.code()));
}

template <typename Fn>
sh_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const stochham::Error& e) {
        return fail(e);
    } catch (const std::bad_alloc&) {
        return fail(SH_ERR_NUMERIC, "out of memory");
    } catch (const std::exception& e) {
        return fail(SH_ERR_NUMERIC, std::string("internal error: ") + e.what());
    } catch (...) {
        return fail(SH_ERR_NUMERIC, "internal error: unknown exception");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

struct sh_rng {
    stochham::Stream stream;
};

struct sh_system {
    stochham::System sys;
};

extern "C" {

const char* sh_last_error(void) { return g_last_error.c_str(); }

const char* sh_version(void) { return stochham::kCodeVersion; }

void sh_string_free(char* s) { std::free(s); }

// ------------------------------------------------------------------- RNG

sh_status sh_rng_create(unsigned long long seed, unsigned long long stream_id, sh_rng** out) {
    if (out == nullptr) return fail(SH_ERR_INVALID_ARGUMENT, "sh_rng_create: out is null");
    *out = nullptr;
    return guarded([&] {
        // Same keying as the library's main ensemble: a C-API stream with the
        // documented (replica, role, summand) id reproduces internal draws.
        uint64_t master = stochham::master_key(seed, stochham::Purpose::main);
        *out = new sh_rng{stochham::Stream(master, stream_id)};
        return SH_OK;
    });
}

sh_status sh_rng_uniform01(sh_rng* rng, double* out) {
    if (rng == nullptr || out == nullptr)
        return fail(SH_ERR_INVALID_ARGUMENT, "sh_rng_uniform01: null argument");
    return guarded([&] {
        *out = rng->stream.uniform01();
        return SH_OK;
    });
}

sh_status sh_rng_normal(sh_rng* rng, double* out) {
    if (rng == nullptr || out == nullptr)
        return fail(SH_ERR_INVALID_ARGUMENT, "sh_rng_normal: null argument");
    return guarded([&] {
        *out = rng->stream.normal();
        return SH_OK;
    });
}

void sh_rng_destroy(sh_rng* rng) { delete rng; }

// --------------------------------------------------------------- systems

sh_status sh_system_pendulum(double gravity, double length, sh_system** out) {
    if (out == nullptr) return fail(SH_ERR_INVALID_ARGUMENT, "sh_system_pendulum: out is null");
    *out = nullptr;
    return guarded([&] {
        *out = new sh_system{stochham::System::make_pendulum(gravity, length)};
        return SH_OK;
    });
}

sh_status sh_system_oscillator(long long m, double chart_tol, const char* cache_dir,
                               sh_system** out) {
    if (out == nullptr) return fail(SH_ERR_INVALID_ARGUMENT, "sh_system_oscillator: out is null");
    *out = nullptr;
    return guarded([&] {
        if (m < 1 || m > 1000000)
            throw stochham::SpecError("oscillator exponent m must be a small positive integer");
        std::string cache = cache_dir == nullptr ? std::string() : std::string(cache_dir);
        *out = new sh_system{
            stochham::System::make_oscillator(static_cast<int>(m), chart_tol, cache)};
        return SH_OK;
    });
}

sh_status sh_system_custom(size_t dim, const double* base, double amp, double center,
                           double width, sh_system** out) {
    if (out == nullptr) return fail(SH_ERR_INVALID_ARGUMENT, "sh_system_custom: out is null");
    *out = nullptr;
    if (base == nullptr && dim > 0)
        return fail(SH_ERR_INVALID_ARGUMENT, "sh_system_custom: base is null");
    return guarded([&] {
        stochham::CustomFrequencyMap map;
        map.base.assign(base, base + dim);
        map.amp = amp;
        map.center = center;
        map.width = width;
        *out = new sh_system{stochham::System::make_custom(std::move(map))};
        return SH_OK;
    });
}

sh_status sh_system_dim(const sh_system* sys, size_t* out) {
    if (sys == nullptr || out == nullptr)
        return fail(SH_ERR_INVALID_ARGUMENT, "sh_system_dim: null argument");
    *out = sys->sys.dim();
    return SH_OK;
}

sh_status sh_system_omega(const sh_system* sys, const double* action, double* omega_out) {
    if (sys == nullptr || action == nullptr || omega_out == nullptr)
        return fail(SH_ERR_INVALID_ARGUMENT, "sh_system_omega: null argument");
    return guarded([&] {
        if (!sys->sys.domain_ok(action))
            throw stochham::DomainError("action is outside the frequency-map domain");
        sys->sys.omega(action, omega_out);
        return SH_OK;
    });
}

void sh_system_destroy(sh_system* sys) { delete sys; }

sh_status sh_oscillator_t_star(long long m, double* out) {
    if (out == nullptr) return fail(SH_ERR_INVALID_ARGUMENT, "sh_oscillator_t_star: out is null");
    return guarded([&] {
        if (m < 1 || m > 1000000)
            throw stochham::SpecError("oscillator exponent m must be a small positive integer");
        *out = stochham::t_star_quadrature(static_cast<int>(m));
        return SH_OK;
    });
}

// -------------------------------------------------------------- commands

sh_status sh_run_command(const char* command, const char* config_path,
                         const sh_run_options* opts, int* pass_out, char** report_json_out,
                         char** report_path_out) {
    if (command == nullptr || config_path == nullptr)
        return fail(SH_ERR_INVALID_ARGUMENT, "sh_run_command: command/config_path is null");
    if (pass_out != nullptr) *pass_out = 0;
    if (report_json_out != nullptr) *report_json_out = nullptr;
    if (report_path_out != nullptr) *report_path_out = nullptr;
    return guarded([&] {
        std::string name(command);
        stochham::Command cmd;
        if (name == "simulate") {
            cmd = stochham::Command::simulate;
        } else if (name == "verify-clt") {
            cmd = stochham::Command::verify_clt;
        } else if (name == "levy-check") {
            cmd = stochham::Command::levy_check;
        } else if (name == "period-table") {
            cmd = stochham::Command::period_table;
        } else {
            throw stochham::SpecError("unknown command '" + name +
                                      "' (expected simulate, verify-clt, levy-check, or "
                                      "period-table)");
        }

        stochham::CliOverrides over;
        int threads = 0;
        if (opts != nullptr) {
            if (opts->out_dir != nullptr) {
                over.has_out = true;
                over.out = opts->out_dir;
            }
            over.has_seed = opts->has_seed != 0;
            over.seed = opts->seed;
            over.has_replicas = opts->has_replicas != 0;
            over.replicas = opts->replicas;
            threads = opts->threads;
        }

        stochham::RunConfig rc = stochham::load_run_config(config_path, cmd, over);
        stochham::RunResult res = stochham::run_command(cmd, rc, threads);

        if (pass_out != nullptr) *pass_out = res.pass ? 1 : 0;
        if (report_json_out != nullptr) *report_json_out = dup_string(res.report.dump(2) + "\n");
        if (report_path_out != nullptr) *report_path_out = dup_string(res.report_path);
        return SH_OK;
    });
}

} // extern "C"
