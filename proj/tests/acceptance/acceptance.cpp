// Acceptance suite. Each invocation checks one criterion (A1..A10), prints
// the measured quantities with their pinned tolerances, ends with a single
//   A<k>: PASS|FAIL
// line, and exits nonzero when the criterion failed.
//
// Usage: acceptance A<k> --configs <dir> --cli <path> --out <dir>
//
// Config-driven criteria run through the public C API (the same path the CLI
// uses); A6 and the A8 duality check drive the core library directly; A10
// launches the CLI binary itself.
#include <sys/wait.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "stochham/stochham.h"

#include "core/clt.hpp"
#include "core/format.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"
#include "core/system.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace stochham;

namespace {

struct Ctx {
    fs::path configs;
    fs::path cli;
    fs::path out;
    int failures = 0;
};

void check(Ctx& ctx, const std::string& what, bool ok) {
    std::printf("  %s -> %s\n", what.c_str(), ok ? "pass" : "FAIL");
    if (!ok) ++ctx.failures;
}

void note(const std::string& text) { std::printf("  note: %s\n", text.c_str()); }

int finish(Ctx& ctx, const char* name) {
    std::printf("%s: %s\n", name, ctx.failures == 0 ? "PASS" : "FAIL");
    return ctx.failures == 0 ? 0 : 1;
}

[[noreturn]] void die(const std::string& msg) {
    std::fprintf(stderr, "acceptance: %s\n", msg.c_str());
    std::exit(3);
}

// Runs one command through the C API with the output redirected under the
// acceptance output root, and returns the parsed report.
json run_cfg(const Ctx& ctx, const char* command, const std::string& cfg_name,
             const std::string& out_name) {
    fs::path cfg = ctx.configs / cfg_name;
    std::string out_dir = (ctx.out / out_name).string();
    sh_run_options opts{};
    opts.out_dir = out_dir.c_str();
    opts.threads = 0;
    int pass = 0;
    char* text = nullptr;
    sh_status st = sh_run_command(command, cfg.string().c_str(), &opts, &pass, &text, nullptr);
    if (st != SH_OK) die(std::string(command) + " on " + cfg.string() + ": " + sh_last_error());
    json j = json::parse(text);
    sh_string_free(text);
    return j;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) die("cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Mat mat1(double v) {
    Mat m(1);
    m.at(0, 0) = v;
    return m;
}

// 21-point frequency grid on [-3, 3], matching the levy-check default.
std::vector<double> cf_grid() {
    std::vector<double> g(21);
    for (int i = 0; i < 21; ++i) g[static_cast<size_t>(i)] = -3.0 + 6.0 * i / 20.0;
    return g;
}

// ------------------------------------------------------------------ A1 --
// Pendulum with g = l (frequency exactly 1) and Brownian noise: normalized
// statistic vs N(0, 1). Gates: KS distance <= 0.05 and empirical variance
// in [0.85, 1.15].
int crit_a1(Ctx& ctx) {
    json r = run_cfg(ctx, "verify-clt", "a1_pendulum.cfg", "a1");
    double cov = r["moments"]["covariance"][0][0].get<double>();
    double ks = r["ks"]["per_coordinate"][0].get<double>();
    check(ctx, strfmt("ks distance %.4f <= 0.05", ks), ks <= 0.05);
    check(ctx, strfmt("variance %.4f in [0.85, 1.15]", cov), cov >= 0.85 && cov <= 1.15);
    int64_t n = r["statistic"]["n"].get<int64_t>();
    double zeta = 0.5, delta = 1.0, harmonic = 0.0;
    for (int64_t k = 1; k <= n; ++k) harmonic += 1.0 / static_cast<double>(k);
    double identity = zeta * zeta * (2.0 * static_cast<double>(n) - harmonic) /
                      (static_cast<double>(n) * delta * delta);
    note(strfmt("the running-average statistic's exact variance is "
                "zeta^2 (2n - H_n) / (n delta^2) = %.4f at n = %lld, not the point "
                "prediction 1; see README.md, 'Known discrepancy'",
                identity, static_cast<long long>(n)));
    return finish(ctx, "A1");
}

// ------------------------------------------------------------------ A2 --
// Oscillator m = 1 at a large action (slowly varying frequency): empirical
// variance within 3 combined standard errors of w_bar^2; KS <= 0.07.
int crit_a2(Ctx& ctx) {
    json r = run_cfg(ctx, "verify-clt", "a2_oscillator.cfg", "a2");
    double w = r["birkhoff"]["w_bar"][0].get<double>();
    double se_w = r["birkhoff"]["se"][0].get<double>();
    double cov = r["moments"]["covariance"][0][0].get<double>();
    double cov_se = r["moments"]["covariance_se"][0][0].get<double>();
    double ks = r["ks"]["per_coordinate"][0].get<double>();
    double pred = w * w;
    double window = 3.0 * std::hypot(cov_se, 2.0 * w * se_w);
    check(ctx,
          strfmt("|variance %.4f - w_bar^2 %.4f| = %.4f <= %.4f", cov, pred,
                 std::abs(cov - pred), window),
          std::abs(cov - pred) <= window);
    check(ctx, strfmt("ks distance %.4f <= 0.07", ks), ks <= 0.07);
    return finish(ctx, "A2");
}

// ------------------------------------------------------------------ A3 --
// Levy angle noise with interlacing on a pendulum base: variance sandwich
// [w^2, w^2 + 2 zeta^2 gamma^2] = [1, 1.0072], widened by 3 combined se.
// The deliberately corrupted companion config must be rejected by the gate.
int crit_a3(Ctx& ctx) {
    json r = run_cfg(ctx, "verify-clt", "a3_levy_sandwich.cfg", "a3");
    double cov = r["moments"]["covariance"][0][0].get<double>();
    double cov_se = r["moments"]["covariance_se"][0][0].get<double>();
    double lower = r["predicted"]["cov_lower"][0][0].get<double>();
    double upper = r["predicted"]["cov_upper"][0][0].get<double>();
    double pred_se = r["predicted"]["cov_se"][0][0].get<double>();
    double window = 3.0 * std::hypot(cov_se, pred_se);
    check(ctx,
          strfmt("variance %.4f in [%.4f - %.4f, %.4f + %.4f]", cov, lower, window, upper,
                 window),
          cov >= lower - window && cov <= upper + window);

    json nc = run_cfg(ctx, "verify-clt", "negative_control.cfg", "negative_control");
    double nc_cov = nc["moments"]["covariance"][0][0].get<double>();
    check(ctx,
          strfmt("negative control (corrupted intensity) rejected: variance %.3f, pass=%s",
                 nc_cov, nc["pass"].get<bool>() ? "true" : "false"),
          nc["pass"].get<bool>() == false);
    return finish(ctx, "A3");
}

// ------------------------------------------------------------------ A4 --
// Two-dimensional custom frequency family calibrated to w_bar = (1, 2) with
// no angle noise: covariance within 3se elementwise of [[1,2],[2,4]], and
// the second eigenvalue consistent with an exactly rank-one limit.
int crit_a4(Ctx& ctx) {
    json r = run_cfg(ctx, "verify-clt", "a4_custom2d.cfg", "a4");
    const double target[2][2] = {{1.0, 2.0}, {2.0, 4.0}};
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
            double c = r["moments"]["covariance"][p][q].get<double>();
            double cov_se = r["moments"]["covariance_se"][p][q].get<double>();
            double pred_se = r["predicted"]["cov_se"][p][q].get<double>();
            double window = 3.0 * std::hypot(cov_se, pred_se);
            check(ctx,
                  strfmt("C[%d][%d] = %.4f within %.4f of %.1f", p, q, c, window,
                         target[p][q]),
                  std::abs(c - target[p][q]) <= window);
        }
    double lam1 = r["eigen"]["values"][0].get<double>(); // descending
    double lam2 = r["eigen"]["values"][1].get<double>();
    double se2 = r["eigen"]["se"][1].get<double>();
    double bound = 5.0 * se2 + 1e-12 * std::max(lam1, 1.0);
    check(ctx, strfmt("second eigenvalue %.3e <= %.3e (rank-one)", lam2, bound), lam2 <= bound);
    return finish(ctx, "A4");
}

// ------------------------------------------------------------------ A5 --
// Two-dimensional Levy case: every covariance element inside the predicted
// sandwich [mu2_pq, mu2_pq + eta2_pq], widened by 3 combined se.
int crit_a5(Ctx& ctx) {
    json r = run_cfg(ctx, "verify-clt", "a5_levy2d.cfg", "a5");
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
            double c = r["moments"]["covariance"][p][q].get<double>();
            double cov_se = r["moments"]["covariance_se"][p][q].get<double>();
            double lower = r["predicted"]["cov_lower"][p][q].get<double>();
            double upper = r["predicted"]["cov_upper"][p][q].get<double>();
            double pred_se = r["predicted"]["cov_se"][p][q].get<double>();
            double window = 3.0 * std::hypot(cov_se, pred_se);
            check(ctx,
                  strfmt("C[%d][%d] = %.4f in [%.4f, %.4f]", p, q, c, lower - window,
                         upper + window),
                  c >= lower - window && c <= upper + window);
        }
    return finish(ctx, "A5");
}

// ------------------------------------------------------------------ A6 --
// Grouped characteristic-function machinery on synthetic independent
// samples: (1) the grouped CF product matches the empirical CF of grouped
// sums; (2) the grouped Gaussian limit matches a sample variance; (3) the
// CF error of a sqrt(n)-normalized contaminated sum halves (+-30%) as the
// contamination decays from n = 100 to n = 10000.
int crit_a6(Ctx& ctx) {
    const std::vector<double> grid = cf_grid();
    const int64_t reps = 100000;

    // Check 1: two groups, 5 draws of N(0.3, 0.2^2) + 3 draws of N(-0.2, 0.3^2).
    {
        GroupSpecD g;
        g.m = {5, 3};
        g.A = {{0.3}, {-0.2}};
        g.Sigma = {mat1(0.04), mat1(0.09)};
        CfModel model;
        model.groups = g;
        model.n = 8;

        Stream st(master_key(1006u, Purpose::main), 1);
        std::vector<double> sums(static_cast<size_t>(reps));
        for (auto& s : sums) {
            double acc = 0.0;
            for (int i = 0; i < 5; ++i) acc += 0.3 + 0.2 * st.normal();
            for (int i = 0; i < 3; ++i) acc += -0.2 + 0.3 * st.normal();
            s = acc;
        }
        SampleSet set{1, sums, {}};
        double sup = 0.0;
        for (double u : grid)
            sup = std::max(sup, std::abs(empirical_cf(set, {u}) - cf_product(model, {u})));
        check(ctx, strfmt("grouped product vs empirical cf: sup gap %.4f <= 0.02", sup),
              sup <= 0.02);
    }

    // Check 2: sparse groups (one active summand out of 8), predicted
    // variance 0.47/8 = 0.05875 vs the sample variance of the normalized sum.
    {
        GroupSpecD g;
        g.m = {1, 7};
        g.A = {{0.0}, {0.0}};
        g.Sigma = {mat1(0.47), mat1(0.0)};
        GaussianLimit lim = gaussian_limit_from_groups(g, 8);

        Stream st(master_key(1006u, Purpose::main), 2);
        std::vector<double> z(static_cast<size_t>(reps));
        for (auto& v : z) v = std::sqrt(0.47) * st.normal() / std::sqrt(8.0);
        Moments m = sample_moments(SampleSet{1, z, {}});
        double gap = std::abs(m.cov.at(0, 0) - lim.cov.at(0, 0));
        double window = 3.0 * m.cov_se.at(0, 0);
        check(ctx,
              strfmt("grouped limit variance %.5f vs sample %.5f: gap %.5f <= %.5f",
                     lim.cov.at(0, 0), m.cov.at(0, 0), gap, window),
              gap <= window);
    }

    // Check 3: scaling. The normalized centered sum is N(0,1) plus a +-2
    // contamination of probability eps_n chosen so the deterministic CF error
    // falls by exactly one half from n = 100 to n = 10000.
    {
        const int64_t reps3 = 200000;
        auto sup_for = [&](double n, uint64_t stream) {
            double eps = 0.05 * std::pow(100.0 / n, std::log(2.0) / std::log(100.0));
            Stream st(master_key(2u, Purpose::main), stream);
            std::vector<double> z(static_cast<size_t>(reps3));
            for (auto& v : z) {
                double g = st.normal();
                double u = st.uniform01();
                if (u < 0.5 * eps)
                    g += 2.0;
                else if (u < eps)
                    g -= 2.0;
                v = g;
            }
            SampleSet set{1, z, {}};
            double sup = 0.0;
            for (double t : grid) {
                std::complex<double> ref(std::exp(-0.5 * t * t), 0.0);
                sup = std::max(sup, std::abs(empirical_cf(set, {t}) - ref));
            }
            return sup;
        };
        double sup_small = sup_for(100.0, 1);
        double sup_large = sup_for(10000.0, 2);
        double ratio = sup_small / sup_large;
        check(ctx,
              strfmt("cf sup error %.4f (n=100) / %.4f (n=10000) = %.2f in [1.4, 2.6]",
                     sup_small, sup_large, ratio),
              ratio >= 1.4 && ratio <= 2.6);
    }
    return finish(ctx, "A6");
}

// ------------------------------------------------------------------ A7 --
// Sampler validity: empirical vs exact characteristic function of the
// simulated endpoint, sup gap <= 0.02 at 1e5 replicas, three triplets.
int crit_a7(Ctx& ctx) {
    const char* cases[3] = {"a7_brownian", "a7_drift_small", "a7_full"};
    for (const char* name : cases) {
        json r = run_cfg(ctx, "levy-check", std::string(name) + ".cfg", name);
        double sup = r["sup_gap"].get<double>();
        check(ctx, strfmt("%s: sup cf gap %.5f <= 0.02", name, sup), sup <= 0.02);
    }
    return finish(ctx, "A7");
}

// ------------------------------------------------------------------ A8 --
// Chart fidelity: the period table matches the quadrature oracle (m = 1
// within 1e-8) and frequency-period duality holds to 1e-6 at 10 pinned
// random actions for m in {1, 2, 3}.
int crit_a8(Ctx& ctx) {
    json r = run_cfg(ctx, "period-table", "a8_periods.cfg", "a8");
    bool all_ok = true;
    for (const auto& row : r["rows"])
        if (row["status"].get<std::string>() != "ok") all_ok = false;
    check(ctx, strfmt("all %zu table rows ok", r["rows"].size()), all_ok);
    double gap1 = r["rows"][0]["gap"].get<double>();
    check(ctx, strfmt("t_star(m=1) gap %.3e <= 1e-8", gap1), gap1 <= 1e-8);

    // Duality check reuses the charts cached by the table run.
    std::string cache = (ctx.out / "a8" / "chart_cache").string();
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m) {
        System sys = System::make_oscillator(m, 1e-10, cache);
        const OscillatorChart& chart = sys.chart();
        Stream rng(master_key(302u, Purpose::main), static_cast<uint64_t>(m));
        for (int i = 0; i < 10; ++i) {
            double I = 0.5 + 4.5 * rng.uniform01();
            double gap = std::abs(chart.frequency(I) * chart.measure_period(I) - 1.0);
            worst = std::max(worst, gap);
        }
    }
    check(ctx, strfmt("max |omega * T - 1| = %.3e <= 1e-6 (30 actions)", worst),
          worst <= 1e-6);
    return finish(ctx, "A8");
}

// ------------------------------------------------------------------ A9 --
// Degenerate scaling: normalizing by n instead of sqrt(n) sends the variance
// to zero; at n = 512 it must be below a quarter of its n = 64 value.
int crit_a9(Ctx& ctx) {
    json r512 = run_cfg(ctx, "verify-clt", "a1_pendulum.cfg", "a9_n512");
    json r64 = run_cfg(ctx, "verify-clt", "a9_pendulum_n64.cfg", "a9_n64");
    double cov512 = r512["moments"]["covariance"][0][0].get<double>();
    double cov64 = r64["moments"]["covariance"][0][0].get<double>();
    // Var(D_n / n) = Var(z) * delta / n with delta = 1.
    double v512 = cov512 / 512.0;
    double v64 = cov64 / 64.0;
    check(ctx,
          strfmt("Var(D/n): %.6f (n=512) / %.6f (n=64) = %.4f < 0.25", v512, v64,
                 v512 / v64),
          v512 < 0.25 * v64);
    return finish(ctx, "A9");
}

// ----------------------------------------------------------------- A10 --
// Determinism through the CLI binary: rerunning the A1 config with the same
// seed into the same directory reproduces every artifact byte for byte.
int crit_a10(Ctx& ctx) {
    fs::path dir = ctx.out / "a10";
    fs::path cfg = ctx.configs / "a1_pendulum.cfg";
    std::string cmd = "\"" + ctx.cli.string() + "\" verify-clt --config \"" + cfg.string() +
                      "\" --out \"" + dir.string() + "\"";

    auto run_once = [&](const char* log_name) {
        std::string full = cmd + " > \"" + (ctx.out / log_name).string() + "\" 2>&1";
        int status = std::system(full.c_str());
        return (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    };

    int code1 = run_once("a10_run1.log");
    // Exit 0 = all gates passed, 1 = run completed with a failed gate; both
    // mean the artifacts were fully written. (The A1 gate verdict is A1's
    // concern, not A10's.)
    check(ctx, strfmt("first run completed (exit %d)", code1), code1 == 0 || code1 == 1);
    std::string report = slurp(dir / "report.json");
    std::string stats = slurp(dir / "statistics.csv");
    std::string hist = slurp(dir / "histogram_z1.svg");

    int code2 = run_once("a10_run2.log");
    check(ctx, strfmt("second run completed (exit %d)", code2), code2 == code1);
    check(ctx, "report.json byte-identical", slurp(dir / "report.json") == report);
    check(ctx, "statistics.csv byte-identical", slurp(dir / "statistics.csv") == stats);
    check(ctx, "histogram_z1.svg byte-identical", slurp(dir / "histogram_z1.svg") == hist);
    return finish(ctx, "A10");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr,
                     "usage: acceptance A<k> --configs <dir> --cli <path> --out <dir>\n");
        return 2;
    }
    Ctx ctx;
    std::string crit = argv[1];
    for (int i = 2; i + 1 < argc; i += 2) {
        std::string flag = argv[i];
        if (flag == "--configs")
            ctx.configs = argv[i + 1];
        else if (flag == "--cli")
            ctx.cli = argv[i + 1];
        else if (flag == "--out")
            ctx.out = argv[i + 1];
        else {
            std::fprintf(stderr, "acceptance: unknown flag %s\n", flag.c_str());
            return 2;
        }
    }
    if (crit.size() < 2 || crit[0] != 'A' || ctx.configs.empty() || ctx.out.empty()) {
        std::fprintf(stderr,
                     "usage: acceptance A<k> --configs <dir> --cli <path> --out <dir>\n");
        return 2;
    }
    fs::create_directories(ctx.out);

    int k = std::atoi(crit.c_str() + 1);
    switch (k) {
        case 1: return crit_a1(ctx);
        case 2: return crit_a2(ctx);
        case 3: return crit_a3(ctx);
        case 4: return crit_a4(ctx);
        case 5: return crit_a5(ctx);
        case 6: return crit_a6(ctx);
        case 7: return crit_a7(ctx);
        case 8: return crit_a8(ctx);
        case 9: return crit_a9(ctx);
        case 10:
            if (ctx.cli.empty()) {
                std::fprintf(stderr, "acceptance: A10 needs --cli\n");
                return 2;
            }
            return crit_a10(ctx);
        default:
            std::fprintf(stderr, "acceptance: unknown criterion %s\n", crit.c_str());
            return 2;
    }
}
