#include "core/runner.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <filesystem>
#include <mutex>
#include <thread>

#include "core/clt.hpp"
#include "core/errors.hpp"
#include "core/format.hpp"
#include "core/oscillator.hpp"
#include "core/stats.hpp"

namespace stochham {

namespace fs = std::filesystem;

namespace {

constexpr double kDiscardBudget = 1e-3;     // max tolerated fraction of domain aborts
constexpr double kPeriodOracleTol = 1e-8;   // T_star vs quadrature oracle
constexpr int kCfGridPoints = 21;           // CF diagnostic grid on [-3, 3]
constexpr double kCfGridRadius = 3.0;
constexpr int kBootstrapResamples = 200;    // eigenvalue standard errors

void run_replicas(int64_t count, int threads, const std::function<void(int64_t)>& fn) {
    int t = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    t = static_cast<int>(std::min<int64_t>(t, count));
    if (t <= 1) {
        for (int64_t r = 0; r < count; ++r) fn(r);
        return;
    }
    std::atomic<int64_t> next{0};
    std::mutex err_mx;
    std::exception_ptr first_err;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(t));
    for (int i = 0; i < t; ++i)
        pool.emplace_back([&] {
            while (true) {
                int64_t r = next.fetch_add(1);
                if (r >= count) return;
                try {
                    fn(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mx);
                    if (!first_err) first_err = std::current_exception();
                    next.store(count);
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_err) std::rethrow_exception(first_err);
}

json mat_json(const Mat& m) {
    json j = json::array();
    for (int p = 0; p < m.n; ++p) {
        json row = json::array();
        for (int q = 0; q < m.n; ++q) row.push_back(m.at(p, q));
        j.push_back(row);
    }
    return j;
}

json system_summary(const System& sys) {
    json j;
    j["dim"] = sys.dim();
    switch (sys.kind()) {
        case SystemKind::pendulum:
            j["kind"] = "pendulum";
            j["omega_per_s"] = sys.pendulum().omega();
            j["period_s"] = sys.pendulum().period();
            break;
        case SystemKind::oscillator: {
            const OscillatorChart& c = sys.chart();
            j["kind"] = "oscillator";
            j["exponent_m"] = c.m();
            j["t_star_s"] = c.t_star();
            j["alpha"] = c.alpha();
            j["beta"] = c.beta();
            j["c"] = c.c();
            j["energy_drift"] = c.energy_drift();
            break;
        }
        case SystemKind::custom:
            j["kind"] = "custom";
            j["frequency_bound_per_s"] = sys.custom().bound();
            break;
    }
    return j;
}

std::vector<std::string> path_header(size_t d) {
    std::vector<std::string> h{"t"};
    for (size_t p = 0; p < d; ++p) h.push_back("I_" + std::to_string(p + 1));
    for (size_t p = 0; p < d; ++p) h.push_back("theta_" + std::to_string(p + 1));
    for (size_t p = 0; p < d; ++p) h.push_back("freq_integral_" + std::to_string(p + 1));
    return h;
}

void append_path_rows(CsvWriter& csv, const ActionAnglePath& path, int64_t replica,
                      bool with_replica_column) {
    size_t d = path.dim;
    for (int64_t k = 0; k <= path.grid.steps; ++k) {
        std::vector<std::string> row;
        row.reserve((with_replica_column ? 2 : 1) + 3 * d);
        if (with_replica_column) row.push_back(std::to_string(replica));
        row.push_back(csv_num(path.grid.time(k)));
        for (size_t p = 0; p < d; ++p) row.push_back(csv_num(path.action(k, p)));
        for (size_t p = 0; p < d; ++p) row.push_back(csv_num(path.angle(k, p)));
        for (size_t p = 0; p < d; ++p) row.push_back(csv_num(path.freq(k, p)));
        csv.row(row);
    }
}

// Bootstrap standard errors of the descending eigenvalues of the sample
// covariance (resampling replicas with replacement; seeded sub-stream, so
// reruns are byte-identical).
Vec bootstrap_eigen_se(const std::vector<double>& values, size_t d, uint64_t master) {
    size_t R = values.size() / d;
    Stream st(master, stream_id(0, Role::standalone, Summand::generic));
    std::vector<Vec> eig(kBootstrapResamples);
    Vec mean(d), draw_mean(d);
    Mat cov(static_cast<int>(d));
    for (int b = 0; b < kBootstrapResamples; ++b) {
        std::vector<size_t> idx(R);
        for (size_t r = 0; r < R; ++r)
            idx[r] = std::min<size_t>(static_cast<size_t>(st.uniform01() * static_cast<double>(R)),
                                      R - 1);
        std::fill(draw_mean.begin(), draw_mean.end(), 0.0);
        for (size_t r = 0; r < R; ++r)
            for (size_t p = 0; p < d; ++p) draw_mean[p] += values[idx[r] * d + p];
        for (size_t p = 0; p < d; ++p) draw_mean[p] /= static_cast<double>(R);
        std::fill(cov.a.begin(), cov.a.end(), 0.0);
        for (size_t r = 0; r < R; ++r)
            for (size_t p = 0; p < d; ++p) {
                double dp = values[idx[r] * d + p] - draw_mean[p];
                for (size_t q = 0; q < d; ++q)
                    cov.at(static_cast<int>(p), static_cast<int>(q)) +=
                        dp * (values[idx[r] * d + q] - draw_mean[q]);
            }
        for (double& v : cov.a) v /= static_cast<double>(R - 1);
        eig[static_cast<size_t>(b)] = jacobi_eigenvalues(cov);
    }
    Vec se(d, 0.0), avg(d, 0.0);
    for (const Vec& e : eig)
        for (size_t p = 0; p < d; ++p) avg[p] += e[p];
    for (size_t p = 0; p < d; ++p) avg[p] /= kBootstrapResamples;
    for (const Vec& e : eig)
        for (size_t p = 0; p < d; ++p) se[p] += (e[p] - avg[p]) * (e[p] - avg[p]);
    for (size_t p = 0; p < d; ++p)
        se[p] = std::sqrt(se[p] / (kBootstrapResamples - 1));
    return se;
}

} // namespace

RunResult run_simulate(const RunConfig& rc, int threads) {
    fs::create_directories(rc.output.dir);
    System sys = rc.system.build(rc.output.dir + "/chart_cache");
    uint64_t mk_main = master_key(rc.seed, Purpose::main);
    size_t d = sys.dim();
    bool indexed = rc.output.trajectories == "indexed";

    std::vector<char> discarded(static_cast<size_t>(rc.replicas), 0);
    std::vector<std::string> files;
    std::mutex mx;

    if (indexed) {
        // Single indexed file: rows must land in replica order, so this mode
        // runs serially by construction.
        CsvWriter csv(rc.output.dir + "/trajectories.csv");
        std::vector<std::string> header{"replica"};
        for (const std::string& h : path_header(d)) header.push_back(h);
        csv.row(header);
        for (int64_t r = 0; r < rc.replicas; ++r) {
            try {
                ActionAnglePath path = simulate(sys, rc.sim, mk_main, static_cast<uint32_t>(r));
                append_path_rows(csv, path, r, true);
            } catch (const DomainError&) {
                discarded[static_cast<size_t>(r)] = 1;
            }
        }
        csv.close();
        files.push_back("trajectories.csv");
    } else {
        run_replicas(rc.replicas, threads, [&](int64_t r) {
            ActionAnglePath path;
            try {
                path = simulate(sys, rc.sim, mk_main, static_cast<uint32_t>(r));
            } catch (const DomainError&) {
                std::lock_guard<std::mutex> lk(mx);
                discarded[static_cast<size_t>(r)] = 1;
                return;
            }
            std::string name = strfmt("trajectory_%06lld.csv", static_cast<long long>(r));
            CsvWriter csv(rc.output.dir + "/" + name);
            csv.row(path_header(d));
            append_path_rows(csv, path, r, false);
            csv.close();
            std::lock_guard<std::mutex> lk(mx);
            files.push_back(name);
        });
        std::sort(files.begin(), files.end());
    }

    int64_t discards = 0;
    for (char c : discarded) discards += c;
    bool budget_ok =
        static_cast<double>(discards) <= kDiscardBudget * static_cast<double>(rc.replicas);

    RunResult res;
    json& j = res.report;
    j["command"] = "simulate";
    j["code_version"] = kCodeVersion;
    j["seed"] = rc.seed;
    j["config"] = rc.resolved;
    j["system_summary"] = system_summary(sys);
    j["replicas_requested"] = rc.replicas;
    j["replicas_written"] = rc.replicas - discards;
    j["discards"] = discards;
    j["discard_budget"] = kDiscardBudget;
    j["discard_budget_exceeded"] = !budget_ok;
    j["files"] = files;
    res.pass = budget_ok;
    j["pass"] = res.pass;
    res.report_path = rc.output.dir + "/metadata.json";
    write_json_file(res.report_path, j);
    return res;
}

RunResult run_verify_clt(const RunConfig& rc, int threads) {
    fs::create_directories(rc.output.dir);
    System sys = rc.system.build(rc.output.dir + "/chart_cache");
    size_t d = sys.dim();
    uint64_t mk_main = master_key(rc.seed, Purpose::main);
    uint64_t mk_birk = master_key(rc.seed, Purpose::birkhoff);
    uint64_t mk_boot = master_key(rc.seed, Purpose::bootstrap);

    BirkhoffResult bk =
        birkhoff_average(sys, rc.sim, rc.birkhoff.horizon, rc.birkhoff.replicas, mk_birk);

    StatisticAccumulator acc(d, rc.n, rc.delta, rc.replicas);
    std::vector<char> discarded(static_cast<size_t>(rc.replicas), 0);
    std::mutex mx;
    run_replicas(rc.replicas, threads, [&](int64_t r) {
        try {
            ActionAnglePath path = simulate(sys, rc.sim, mk_main, static_cast<uint32_t>(r));
            acc.add_path(r, path);
        } catch (const DomainError&) {
            std::lock_guard<std::mutex> lk(mx);
            acc.mark_discarded(r);
            discarded[static_cast<size_t>(r)] = 1;
        }
    });
    int64_t discards = acc.discarded();
    bool budget_ok =
        static_cast<double>(discards) <= kDiscardBudget * static_cast<double>(rc.replicas);
    CltStatistic stat = acc.finalize();

    SampleSet zs{d, stat.normalized, {}};
    Moments mom = sample_moments(zs);
    GaussianLimit pred = predicted_limit(sys, rc.sim, bk.w_bar);
    bool has_bounds = pred.cov_upper.has_value();

    // Standard error of the predicted covariance, propagated (first order)
    // from the Birkhoff standard errors: pred_pq = w_p w_q.
    Mat pred_se(static_cast<int>(d));
    for (size_t p = 0; p < d; ++p)
        for (size_t q = 0; q < d; ++q)
            pred_se.at(static_cast<int>(p), static_cast<int>(q)) =
                std::hypot(bk.w_bar[q] * bk.se[p], bk.w_bar[p] * bk.se[q]);

    // Per-coordinate KS distance. With a point prediction the reference is
    // the predicted marginal; with Levy bounds there is no point prediction,
    // so the shape test uses the empirical variance.
    std::string ks_reference = has_bounds ? "empirical_cov" : "predicted";
    Vec ks(d, 0.0);
    bool ks_pass = true;
    std::vector<double> column(static_cast<size_t>(stat.replicas));
    for (size_t p = 0; p < d; ++p) {
        for (int64_t r = 0; r < stat.replicas; ++r)
            column[static_cast<size_t>(r)] = stat.normalized[static_cast<size_t>(r) * d + p];
        double ref_var = has_bounds ? mom.cov.at(static_cast<int>(p), static_cast<int>(p))
                                    : pred.cov.at(static_cast<int>(p), static_cast<int>(p));
        ks[p] = ks_vs_gaussian(column, 0.0, ref_var);
        if (ks[p] > rc.tol.ks) ks_pass = false;
    }

    // Covariance window: |C - pred| <= k se (point case) or
    // lower - k se <= C <= upper + k se (bounds case), elementwise, with the
    // combined standard error of the estimate and the prediction.
    bool cov_pass = true;
    Mat comb_se(static_cast<int>(d));
    for (size_t p = 0; p < d; ++p)
        for (size_t q = 0; q < d; ++q) {
            int ip = static_cast<int>(p), iq = static_cast<int>(q);
            comb_se.at(ip, iq) = std::hypot(mom.cov_se.at(ip, iq), pred_se.at(ip, iq));
            double window = rc.tol.cov_sigma * comb_se.at(ip, iq);
            double c = mom.cov.at(ip, iq);
            if (has_bounds) {
                if (c < pred.cov_lower->at(ip, iq) - window ||
                    c > pred.cov_upper->at(ip, iq) + window)
                    cov_pass = false;
            } else {
                if (std::abs(c - pred.cov.at(ip, iq)) > window) cov_pass = false;
            }
        }

    // CF diagnostic (reported, not gated): per coordinate, sup over the grid
    // of |empirical CF - Gaussian CF of the reference variance|.
    Vec cf_sup(d, 0.0);
    json cf_grid = json::array();
    for (int i = 0; i < kCfGridPoints; ++i)
        cf_grid.push_back(-kCfGridRadius +
                          2.0 * kCfGridRadius * static_cast<double>(i) / (kCfGridPoints - 1));
    for (size_t p = 0; p < d; ++p) {
        for (int64_t r = 0; r < stat.replicas; ++r)
            column[static_cast<size_t>(r)] = stat.normalized[static_cast<size_t>(r) * d + p];
        SampleSet one{1, column, {}};
        double ref_var = has_bounds ? mom.cov.at(static_cast<int>(p), static_cast<int>(p))
                                    : pred.cov.at(static_cast<int>(p), static_cast<int>(p));
        for (const auto& tj : cf_grid) {
            double t = tj.get<double>();
            std::complex<double> emp = empirical_cf(one, {t});
            std::complex<double> ref = std::exp(std::complex<double>(-0.5 * t * t * ref_var, 0.0));
            cf_sup[p] = std::max(cf_sup[p], std::abs(emp - ref));
        }
    }

    Vec eigenvalues = jacobi_eigenvalues(mom.cov);
    Vec eigen_se = bootstrap_eigen_se(stat.normalized, d, mk_boot);

    // statistics.csv: surviving replicas in index order.
    {
        CsvWriter csv(rc.output.dir + "/statistics.csv");
        std::vector<std::string> header{"replica"};
        for (size_t p = 0; p < d; ++p) header.push_back("D_" + std::to_string(p + 1));
        for (size_t p = 0; p < d; ++p) header.push_back("z_" + std::to_string(p + 1));
        csv.row(header);
        int64_t row_idx = 0;
        for (int64_t r = 0; r < rc.replicas; ++r) {
            if (discarded[static_cast<size_t>(r)]) continue;
            std::vector<std::string> row{std::to_string(r)};
            for (size_t p = 0; p < d; ++p)
                row.push_back(csv_num(stat.raw_sum[static_cast<size_t>(row_idx) * d + p]));
            for (size_t p = 0; p < d; ++p)
                row.push_back(csv_num(stat.normalized[static_cast<size_t>(row_idx) * d + p]));
            csv.row(row);
            ++row_idx;
        }
        csv.close();
    }
    for (size_t p = 0; p < d; ++p) {
        for (int64_t r = 0; r < stat.replicas; ++r)
            column[static_cast<size_t>(r)] = stat.normalized[static_cast<size_t>(r) * d + p];
        double ref_var = has_bounds ? mom.cov.at(static_cast<int>(p), static_cast<int>(p))
                                    : pred.cov.at(static_cast<int>(p), static_cast<int>(p));
        write_histogram_svg(rc.output.dir + "/histogram_z" + std::to_string(p + 1) + ".svg",
                            column, rc.output.histogram_bins, 0.0, ref_var,
                            "normalized statistic z_" + std::to_string(p + 1) + " vs N(0, " +
                                g6(ref_var) + ")");
    }

    RunResult res;
    json& j = res.report;
    j["command"] = "verify-clt";
    j["code_version"] = kCodeVersion;
    j["seed"] = rc.seed;
    j["config"] = rc.resolved;
    j["system_summary"] = system_summary(sys);
    json bj;
    bj["w_bar"] = vec_json(bk.w_bar);
    bj["se"] = vec_json(bk.se);
    bj["horizon_s"] = bk.horizon;
    bj["replicas"] = bk.replicas;
    bj["nonconverged"] = bk.nonconverged;
    bj["substitution_note"] =
        "long-time empirical average substituted for the spatial average of the frequency map";
    j["birkhoff"] = bj;
    json sj;
    sj["n"] = stat.n;
    sj["delta_s"] = stat.delta;
    sj["replicas_requested"] = rc.replicas;
    sj["replicas_used"] = stat.replicas;
    sj["discards"] = discards;
    sj["discard_budget"] = kDiscardBudget;
    sj["centering"] = vec_json(stat.centering);
    sj["centering_se"] = vec_json(stat.centering_se);
    sj["normalization"] = "sqrt(n*delta)";
    j["statistic"] = sj;
    json mj;
    mj["mean"] = vec_json(mom.mean);
    mj["mean_se"] = vec_json(mom.mean_se);
    mj["covariance"] = mat_json(mom.cov);
    mj["covariance_se"] = mat_json(mom.cov_se);
    j["moments"] = mj;
    j["within_path_autocorr_lag1"] = vec_json(stat.autocorr_lag1);
    json pj;
    pj["kind"] = has_bounds ? "bounds" : "point";
    pj["mean"] = vec_json(pred.mean);
    pj["cov"] = mat_json(pred.cov);
    if (has_bounds) {
        pj["cov_lower"] = mat_json(*pred.cov_lower);
        pj["cov_upper"] = mat_json(*pred.cov_upper);
    }
    pj["cov_se"] = mat_json(pred_se);
    j["predicted"] = pj;
    json ej;
    ej["values"] = vec_json(eigenvalues);
    ej["se"] = vec_json(eigen_se);
    j["eigen"] = ej;
    json kj;
    kj["per_coordinate"] = vec_json(ks);
    kj["reference"] = ks_reference;
    kj["threshold"] = rc.tol.ks;
    j["ks"] = kj;
    json cj;
    cj["grid"] = cf_grid;
    cj["sup_error_per_coordinate"] = vec_json(cf_sup);
    cj["reference"] = ks_reference;
    cj["note"] = "diagnostic only, not gated";
    j["cf"] = cj;
    json crit;
    crit["ks"] = ks_pass;
    crit["covariance"] = cov_pass;
    crit["discard_budget"] = budget_ok;
    j["criteria"] = crit;
    res.pass = ks_pass && cov_pass && budget_ok;
    j["pass"] = res.pass;
    res.report_path = rc.output.dir + "/report.json";
    write_json_file(res.report_path, j);
    return res;
}

RunResult run_levy_check(const RunConfig& rc) {
    fs::create_directories(rc.output.dir);
    const LevyTriplet& trip = rc.sim.action_noise.triplet;
    const LevyCheckCfg& lc = rc.levy_check;
    uint64_t mk_main = master_key(rc.seed, Purpose::main);

    TimeGrid grid;
    grid.t0 = 0.0;
    grid.dt = lc.dt;
    grid.steps = static_cast<int64_t>(std::ceil(lc.t_end / lc.dt - 1e-9));
    double t_eff = grid.time(grid.steps);
    bool include_large = !rc.sim.interlace;

    std::vector<double> endpoints(static_cast<size_t>(lc.replicas));
    for (int64_t r = 0; r < lc.replicas; ++r) {
        StreamCtx ctx{mk_main, static_cast<uint32_t>(r), Role::standalone};
        NoisePath path = sample_levy(trip, grid, ctx, rc.sim.interlace);
        endpoints[static_cast<size_t>(r)] = path.at(grid.steps, 0);
    }
    SampleSet set{1, endpoints, {}};

    CsvWriter csv(rc.output.dir + "/levy_check.csv");
    csv.row({"u", "empirical_re", "empirical_im", "exact_re", "exact_im", "gap"});
    double sup_gap = 0.0;
    json rows = json::array();
    for (int64_t i = 0; i < lc.u_count; ++i) {
        double u = lc.u_min + (lc.u_max - lc.u_min) * static_cast<double>(i) /
                                  static_cast<double>(lc.u_count - 1);
        std::complex<double> emp = empirical_cf(set, {u});
        std::complex<double> exact = levy_cf(trip, {u}, t_eff, include_large);
        double gap = std::abs(emp - exact);
        sup_gap = std::max(sup_gap, gap);
        csv.row({csv_num(u), csv_num(emp.real()), csv_num(emp.imag()), csv_num(exact.real()),
                 csv_num(exact.imag()), csv_num(gap)});
        json row;
        row["u"] = u;
        row["gap"] = gap;
        rows.push_back(row);
    }
    csv.close();

    RunResult res;
    json& j = res.report;
    j["command"] = "levy-check";
    j["code_version"] = kCodeVersion;
    j["seed"] = rc.seed;
    j["config"] = rc.resolved;
    j["t_end_effective_s"] = t_eff;
    j["replicas"] = lc.replicas;
    j["include_large_jumps"] = include_large;
    j["sup_gap"] = sup_gap;
    j["tolerance"] = rc.tol.cf_sup;
    j["rows"] = rows;
    res.pass = sup_gap <= rc.tol.cf_sup;
    j["pass"] = res.pass;
    res.report_path = rc.output.dir + "/report.json";
    write_json_file(res.report_path, j);
    return res;
}

RunResult run_period_table(const RunConfig& rc) {
    fs::create_directories(rc.output.dir);
    std::string cache_dir = rc.output.dir + "/chart_cache";

    CsvWriter csv(rc.output.dir + "/period_table.csv");
    csv.row({"m", "t_star", "oracle_t_star", "gap", "energy_drift", "status"});
    json rows = json::array();
    bool all_ok = true;
    for (int m = rc.period_table.m_min; m <= rc.period_table.m_max; ++m) {
        json row;
        row["m"] = m;
        try {
            System sys = System::make_oscillator(m, rc.system.chart_tol, cache_dir);
            const OscillatorChart& chart = sys.chart();
            double oracle = t_star_quadrature(m);
            double gap = std::abs(chart.t_star() - oracle);
            bool ok = gap <= kPeriodOracleTol && chart.energy_drift() <= rc.system.chart_tol;
            csv.row({std::to_string(m), csv_num(chart.t_star()), csv_num(oracle), csv_num(gap),
                     csv_num(chart.energy_drift()), ok ? "ok" : "out_of_tolerance"});
            row["t_star"] = chart.t_star();
            row["oracle_t_star"] = oracle;
            row["gap"] = gap;
            row["energy_drift"] = chart.energy_drift();
            row["status"] = ok ? "ok" : "out_of_tolerance";
            if (!ok) all_ok = false;
        } catch (const Error& e) {
            csv.row({std::to_string(m), "", "", "", "", std::string("failed: ") + e.what()});
            row["status"] = std::string("failed: ") + e.what();
            all_ok = false;
        }
        rows.push_back(row);
    }
    csv.close();

    RunResult res;
    json& j = res.report;
    j["command"] = "period-table";
    j["code_version"] = kCodeVersion;
    j["seed"] = rc.seed;
    j["config"] = rc.resolved;
    j["oracle_tolerance"] = kPeriodOracleTol;
    j["chart_tolerance"] = rc.system.chart_tol;
    j["rows"] = rows;
    res.pass = all_ok;
    j["pass"] = res.pass;
    res.report_path = rc.output.dir + "/report.json";
    write_json_file(res.report_path, j);
    return res;
}

RunResult run_command(Command cmd, const RunConfig& rc, int threads) {
    switch (cmd) {
        case Command::simulate: return run_simulate(rc, threads);
        case Command::verify_clt: return run_verify_clt(rc, threads);
        case Command::levy_check: return run_levy_check(rc);
        case Command::period_table: return run_period_table(rc);
    }
    throw SpecError("unknown command");
}

} // namespace stochham
