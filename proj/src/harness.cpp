#include "pttk/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <sys/utsname.h>
#include <thread>

#include <nlohmann/json.hpp>

#include "pttk/baselines.hpp"
#include "pttk/linalg.hpp"
#include "pttk/par.hpp"
#include "pttk/rng.hpp"
#include "pttk/serialize.hpp"

namespace pttk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<Index> sample_without_replacement(Index population, Index count, Rng& rng) {
    count = std::min(count, population);
    std::vector<Index> idx(static_cast<std::size_t>(population));
    std::iota(idx.begin(), idx.end(), 0);
    for (Index i = 0; i < count; ++i) {
        const Index j = i + rng.uniform_int(population - i);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(count));
    return idx;
}

Matrix gather_rows(const Matrix& m, std::span<const Index> rows) {
    Matrix out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
    return out;
}

} // namespace

RunMode run_mode_from_string(std::string_view s) {
    if (s == "ttk") return RunMode::ttk;
    if (s == "pttk") return RunMode::pttk;
    if (s == "global-1" || s == "global1") return RunMode::global1;
    if (s == "global-2" || s == "global2") return RunMode::global2;
    if (s == "aca-baseline" || s == "aca") return RunMode::aca_baseline;
    throw ConfigError("unknown mode: " + std::string(s));
}

std::string_view to_string(RunMode m) {
    switch (m) {
        case RunMode::ttk: return "ttk";
        case RunMode::pttk: return "pttk";
        case RunMode::global1: return "global-1";
        case RunMode::global2: return "global-2";
        case RunMode::aca_baseline: return "aca-baseline";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (geom.d < 1) throw ConfigError("d must be >= 1");
    if (kernel.theta_arity() != geom.d_theta)
        throw ConfigError("kernel parameter arity does not match theta_box dimension");
    if (static_cast<Index>(geom.source_box.size()) != geom.d ||
        static_cast<Index>(geom.target_box.size()) != geom.d)
        throw ConfigError("source/target box must have d intervals");
    if (static_cast<Index>(geom.theta_box.size()) != geom.d_theta)
        throw ConfigError("theta_box must have one interval per free kernel parameter");
    for (const auto& iv : geom.ordered_intervals())
        if (!(iv.lo < iv.hi)) throw ConfigError("box intervals need lo < hi");
    if (ns < 1 || nt < 1) throw ConfigError("ns and nt must be positive");
    if (n < 2) throw ConfigError("n must be >= 2");
    if (eps_list.empty()) throw ConfigError("need at least one eps value");
    for (double e : eps_list)
        if (!(e > 0.0)) throw ConfigError("eps values must be positive");
    if (theta_samples < 0 || subsample < 0) throw ConfigError("counts must be non-negative");
    if (norm != 'F' && norm != '2') throw ConfigError("norm must be F or 2");
    if ((mode == RunMode::global1 || mode == RunMode::global2)) {
        for (Index i = 0; i < geom.d; ++i) {
            const auto& a = geom.source_box[static_cast<std::size_t>(i)];
            const auto& b = geom.target_box[static_cast<std::size_t>(i)];
            if (a.lo != b.lo || a.hi != b.hi)
                throw ConfigError("global modes require coinciding source and target boxes");
        }
        if (ns != nt) throw ConfigError("global modes require ns == nt");
    }
    if (mode != RunMode::ttk && geom.d_theta == 0 && theta_samples > 0 &&
        (mode == RunMode::pttk || mode == RunMode::aca_baseline))
        throw ConfigError("parametric modes need a parametric kernel (use mode = ttk)");
    if (subsample == 0 && ns * nt > Index(16'000'000))
        throw ConfigError("full-matrix error at this size is too large; set subsample > 0");
}

namespace {

std::vector<Interval> parse_box(const std::string& text) {
    std::vector<Interval> box;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        double lo, hi;
        if (std::sscanf(part.c_str(), "%lf , %lf", &lo, &hi) != 2)
            throw ConfigError("cannot parse interval '" + part + "' (expected lo,hi)");
        box.push_back({lo, hi});
    }
    if (box.empty()) throw ConfigError("empty box specification");
    return box;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

} // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    bool seed_set = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "kernel") cfg.kernel.family = kernel_family_from_string(value);
            else if (key == "ell") cfg.kernel.fixed_ell = std::stod(value);
            else if (key == "nu") cfg.kernel.fixed_nu = std::stod(value);
            else if (key == "d") cfg.geom.d = std::stoll(value);
            else if (key == "source_box") cfg.geom.source_box = parse_box(value);
            else if (key == "target_box") cfg.geom.target_box = parse_box(value);
            else if (key == "theta_box") cfg.geom.theta_box = parse_box(value);
            else if (key == "ns") cfg.ns = std::stoll(value);
            else if (key == "nt") cfg.nt = std::stoll(value);
            else if (key == "n") cfg.n = std::stoll(value);
            else if (key == "eps") {
                cfg.eps_list.clear();
                std::stringstream ss(value);
                std::string tok;
                while (std::getline(ss, tok, ',')) cfg.eps_list.push_back(std::stod(trim(tok)));
            } else if (key == "theta_samples") cfg.theta_samples = std::stoll(value);
            else if (key == "subsample") cfg.subsample = std::stoll(value);
            else if (key == "seed") { cfg.seed = std::stoull(value); seed_set = true; }
            else if (key == "mode") cfg.mode = run_mode_from_string(value);
            else if (key == "output") cfg.output_path = value;
            else if (key == "max_sweeps") cfg.max_sweeps = std::stoll(value);
            else if (key == "norm") {
                if (value != "F" && value != "2") throw ConfigError("norm must be F or 2");
                cfg.norm = value[0];
            } else
                throw ConfigError("unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": bad value for '" + key +
                              "': " + e.what());
        }
    }
    if (!seed_set) {
        if (const char* env = std::getenv("PTTK_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);
    }
    cfg.geom.d_theta = cfg.kernel.theta_arity();
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

Matrix generate_points(const std::vector<Interval>& box, Index count, std::uint64_t seed) {
    Rng rng(seed);
    Matrix pts(count, static_cast<Index>(box.size()));
    for (Index i = 0; i < count; ++i)
        for (std::size_t c = 0; c < box.size(); ++c)
            pts(i, static_cast<Index>(c)) = rng.uniform(box[c].lo, box[c].hi);
    return pts;
}

double relative_error(const Matrix& k, const Matrix& khat, char norm) {
    double num, den;
    if (norm == 'F') {
        num = (k - khat).norm();
        den = k.norm();
    } else if (norm == '2') {
        num = linalg::spectral_norm(k - khat);
        den = linalg::spectral_norm(k);
    } else {
        throw std::invalid_argument("relative_error: norm must be 'F' or '2'");
    }
    if (den == 0.0) throw std::domain_error("relative_error: zero reference norm");
    return num / den;
}

double subsampled_relative_error(const KernelOracle& oracle, const ParametricFactorization& f,
                                 std::span<const double> theta, const Matrix& xs, const Matrix& ys,
                                 std::span<const Index> rows, std::span<const Index> cols,
                                 char norm) {
    const Matrix xsub = rows.empty() ? xs : gather_rows(xs, rows);
    const Matrix ysub = cols.empty() ? ys : gather_rows(ys, cols);
    const Matrix k = par::kernel_matrix(oracle, xsub, ysub, theta);
    const Matrix khat = evaluate(f, theta, rows, cols);
    return relative_error(k, khat, norm);
}

namespace {

struct ThetaTimer {
    // Monotonic clock; online calls below 10 ms are re-run and the median of
    // three repetitions is taken to tame jitter.
    template <typename F>
    static double time_call(F&& fn) {
        auto t0 = Clock::now();
        fn();
        double t = seconds_since(t0);
        if (t < 10e-3) {
            double t2, t3;
            t0 = Clock::now();
            fn();
            t2 = seconds_since(t0);
            t0 = Clock::now();
            fn();
            t3 = seconds_since(t0);
            double a = std::min({t, t2, t3});
            double c = std::max({t, t2, t3});
            t = t + t2 + t3 - a - c;
        }
        return t;
    }
};

std::string ranks_string(const ParametricFactorization& f) {
    std::string s = std::to_string(f.rank_s()) + "/" + std::to_string(f.rank_t());
    return s;
}

struct ErrorStats {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double max = std::numeric_limits<double>::quiet_NaN();
    void absorb(double e, Index count) {
        if (std::isnan(mean)) {
            mean = 0.0;
            max = 0.0;
        }
        mean += e / static_cast<double>(count);
        max = std::max(max, e);
    }
};

} // namespace

namespace {

struct ExperimentContext {
    const ExperimentConfig& cfg;
    KernelOracle oracle;
    Matrix xs, ys;
    Matrix thetas; // theta_samples x d_theta
    std::vector<Index> sub_rows, sub_cols;
    std::uint64_t seed_offline = 0;
};

ExperimentContext make_context(const ExperimentConfig& cfg) {
    std::uint64_t state = cfg.seed;
    const std::uint64_t seed_src = splitmix64(state);
    const std::uint64_t seed_tgt = splitmix64(state);
    const std::uint64_t seed_off = splitmix64(state);
    const std::uint64_t seed_theta = splitmix64(state);
    const std::uint64_t seed_rows = splitmix64(state);
    const std::uint64_t seed_cols = splitmix64(state);

    const bool global = cfg.mode == RunMode::global1 || cfg.mode == RunMode::global2;
    ExperimentContext ctx{cfg, KernelOracle(cfg.kernel, cfg.geom), {}, {}, {}, {}, {}, 0};
    ctx.xs = generate_points(cfg.geom.source_box, cfg.ns, seed_src);
    ctx.ys = global ? ctx.xs : generate_points(cfg.geom.target_box, cfg.nt, seed_tgt);
    if (cfg.geom.d_theta > 0 && cfg.theta_samples > 0)
        ctx.thetas = generate_points(cfg.geom.theta_box, cfg.theta_samples, seed_theta);
    else
        ctx.thetas = Matrix(0, cfg.geom.d_theta);
    if (cfg.subsample > 0) {
        Rng rr(seed_rows), rc(seed_cols);
        ctx.sub_rows = sample_without_replacement(cfg.ns, cfg.subsample, rr);
        ctx.sub_cols = sample_without_replacement(global ? cfg.ns : cfg.nt, cfg.subsample, rc);
    }
    ctx.seed_offline = seed_off;
    return ctx;
}

std::span<const double> theta_row(const Matrix& thetas, Index i) {
    // Rows are not contiguous in column-major storage; copy into a scratch.
    thread_local std::vector<double> buf;
    buf.resize(static_cast<std::size_t>(thetas.cols()));
    for (Index c = 0; c < thetas.cols(); ++c) buf[static_cast<std::size_t>(c)] = thetas(i, c);
    return buf;
}

double factorization_error(const ExperimentContext& ctx, const ParametricFactorization& f,
                           std::span<const double> theta) {
    const auto& cfg = ctx.cfg;
    if (cfg.subsample > 0)
        return subsampled_relative_error(ctx.oracle, f, theta, ctx.xs, ctx.ys, ctx.sub_rows,
                                         ctx.sub_cols, cfg.norm);
    if (cfg.norm == 'F') {
        const Matrix h = online(f, theta);
        const Matrix left = f.s * h;
        const auto acc = par::frobenius_vs_lowrank(ctx.oracle, ctx.xs, ctx.ys, theta, left, f.t);
        if (acc.ref2 == 0.0) throw std::domain_error("relative error: zero reference norm");
        return std::sqrt(acc.diff2 / acc.ref2);
    }
    const Matrix k = par::kernel_matrix(ctx.oracle, ctx.xs, ctx.ys, theta);
    const Matrix khat = evaluate(f, theta, {}, {});
    return relative_error(k, khat, cfg.norm);
}

ResultRow run_factorization_row(const ExperimentContext& ctx, double eps, std::ostream* log) {
    const auto& cfg = ctx.cfg;
    ResultRow row;
    row.kernel = std::string(to_string(cfg.kernel.family));
    row.tol = eps;
    row.seed = cfg.seed;
    row.status = "ok";
    row.online_time_s = std::numeric_limits<double>::quiet_NaN();

    OfflineOptions opts;
    opts.n = cfg.n;
    opts.eps = eps;
    opts.seed = ctx.seed_offline;
    opts.max_sweeps = cfg.max_sweeps;

    const auto t0 = Clock::now();
    const ParametricFactorization f = offline(ctx.oracle, ctx.xs, ctx.ys, opts);
    row.offline_time_s = seconds_since(t0);
    if (!f.converged) row.status = "unconverged";
    row.storage_bytes = serialized_size(f);
    row.ranks = ranks_string(f);
    row.kernel_evals = f.offline_kernel_evals;

    ErrorStats stats;
    if (cfg.geom.d_theta == 0) {
        stats.absorb(factorization_error(ctx, f, {}), 1);
    } else {
        double total_online = 0.0;
        for (Index i = 0; i < ctx.thetas.rows(); ++i) {
            const auto theta = theta_row(ctx.thetas, i);
            Matrix h;
            total_online += ThetaTimer::time_call([&] { h = online(f, theta); });
            stats.absorb(factorization_error(ctx, f, theta), ctx.thetas.rows());
        }
        if (ctx.thetas.rows() > 0)
            row.online_time_s = total_online / static_cast<double>(ctx.thetas.rows());
    }
    row.error_mean = stats.mean;
    row.error_max = stats.max;
    if (log)
        (*log) << "[" << row.kernel << " eps=" << eps << "] ranks " << row.ranks << " err_max "
               << row.error_max << " offline " << row.offline_time_s << "s\n";
    return row;
}

ResultRow run_global_row(const ExperimentContext& ctx, double eps, std::ostream* log) {
    const auto& cfg = ctx.cfg;
    ResultRow row;
    row.kernel = std::string(to_string(cfg.kernel.family));
    row.tol = eps;
    row.seed = cfg.seed;
    row.status = "ok";
    row.online_time_s = std::numeric_limits<double>::quiet_NaN();

    OfflineOptions opts;
    opts.n = cfg.n;
    opts.eps = eps;
    opts.seed = ctx.seed_offline;
    opts.max_sweeps = cfg.max_sweeps;

    const auto t0 = Clock::now();
    const GlobalFactorization g = global_offline(ctx.oracle, ctx.xs, opts);
    row.offline_time_s = seconds_since(t0);
    if (!g.converged) row.status = "unconverged";
    row.storage_bytes = serialized_size(g);
    row.kernel_evals = g.offline_kernel_evals;

    const bool compress = cfg.mode == RunMode::global2;
    ErrorStats stats;
    double total_online = 0.0, mean_rank = 0.0;
    const Index n_theta = std::max<Index>(ctx.thetas.rows(), cfg.geom.d_theta == 0 ? 1 : 0);
    for (Index i = 0; i < n_theta; ++i) {
        const auto theta = cfg.geom.d_theta == 0 ? std::span<const double>{}
                                                 : theta_row(ctx.thetas, i);
        GlobalOnlineResult res;
        total_online += ThetaTimer::time_call([&] { res = global_online(g, theta, eps, compress); });
        mean_rank += static_cast<double>(res.rank) / static_cast<double>(n_theta);

        const Matrix qsub = ctx.sub_rows.empty() ? res.q : gather_rows(res.q, ctx.sub_rows);
        const Matrix khat = qsub * res.w * qsub.transpose();
        const Matrix xsub = ctx.sub_rows.empty() ? ctx.xs : gather_rows(ctx.xs, ctx.sub_rows);
        const Matrix k = par::kernel_matrix(ctx.oracle, xsub, xsub, theta);
        stats.absorb(relative_error(k, khat, cfg.norm), n_theta);
    }
    if (n_theta > 0) row.online_time_s = total_online / static_cast<double>(n_theta);
    row.error_mean = stats.mean;
    row.error_max = stats.max;
    {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%lld/%.1f", static_cast<long long>(g.uncompressed_rank()),
                      mean_rank);
        row.ranks = buf;
    }
    if (log)
        (*log) << "[" << row.kernel << " " << to_string(cfg.mode) << " eps=" << eps << "] rank "
               << row.ranks << " err_mean " << row.error_mean << " offline " << row.offline_time_s
               << "s\n";
    return row;
}

ResultRow run_aca_row(const ExperimentContext& ctx, double eps, std::ostream* log) {
    const auto& cfg = ctx.cfg;
    ResultRow row;
    row.kernel = std::string(to_string(cfg.kernel.family));
    row.tol = eps;
    row.seed = cfg.seed;
    row.status = "ok";
    row.offline_time_s = 0.0;
    row.storage_bytes = 0;
    row.online_time_s = std::numeric_limits<double>::quiet_NaN();

    const std::uint64_t evals0 = ctx.oracle.evaluation_count();
    ErrorStats stats;
    double total = 0.0, mean_rank = 0.0;
    const Index n_theta = std::max<Index>(ctx.thetas.rows(), cfg.geom.d_theta == 0 ? 1 : 0);
    for (Index i = 0; i < n_theta; ++i) {
        std::vector<double> theta;
        if (cfg.geom.d_theta > 0) {
            const auto view = theta_row(ctx.thetas, i);
            theta.assign(view.begin(), view.end());
        }
        KernelMatrixOracle entry(ctx.oracle, ctx.xs, ctx.ys, theta);
        AcaResult res;
        const auto t0 = Clock::now();
        res = aca(entry, eps, std::min(cfg.ns, cfg.nt));
        total += seconds_since(t0);
        if (!res.converged) row.status = "unconverged";
        mean_rank += static_cast<double>(res.rank) / static_cast<double>(n_theta);

        const Matrix asub = ctx.sub_rows.empty() ? res.lr.a : gather_rows(res.lr.a, ctx.sub_rows);
        const Matrix bsub = ctx.sub_cols.empty() ? res.lr.b : gather_rows(res.lr.b, ctx.sub_cols);
        const Matrix khat = asub * bsub.transpose();
        const Matrix xsub = ctx.sub_rows.empty() ? ctx.xs : gather_rows(ctx.xs, ctx.sub_rows);
        const Matrix ysub = ctx.sub_cols.empty() ? ctx.ys : gather_rows(ctx.ys, ctx.sub_cols);
        const Matrix k = par::kernel_matrix(ctx.oracle, xsub, ysub, theta);
        stats.absorb(relative_error(k, khat, cfg.norm), n_theta);
    }
    if (n_theta > 0) row.online_time_s = total / static_cast<double>(n_theta);
    row.error_mean = stats.mean;
    row.error_max = stats.max;
    row.kernel_evals = ctx.oracle.evaluation_count() - evals0;
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", mean_rank);
        row.ranks = buf;
    }
    if (log)
        (*log) << "[" << row.kernel << " aca eps=" << eps << "] mean rank " << row.ranks
               << " err_max " << row.error_max << " per-theta " << row.online_time_s << "s\n";
    return row;
}

} // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
    cfg.validate();
    ExperimentContext ctx = make_context(cfg);

    std::vector<ResultRow> rows;
    for (double eps : cfg.eps_list) {
        try {
            switch (cfg.mode) {
                case RunMode::ttk:
                case RunMode::pttk:
                    rows.push_back(run_factorization_row(ctx, eps, log));
                    break;
                case RunMode::global1:
                case RunMode::global2:
                    rows.push_back(run_global_row(ctx, eps, log));
                    break;
                case RunMode::aca_baseline:
                    rows.push_back(run_aca_row(ctx, eps, log));
                    break;
            }
        } catch (const std::exception& e) {
            ResultRow row;
            row.kernel = std::string(to_string(cfg.kernel.family));
            row.tol = eps;
            row.seed = cfg.seed;
            row.status = std::string("error: ") + e.what();
            row.online_time_s = std::numeric_limits<double>::quiet_NaN();
            row.error_mean = row.error_max = std::numeric_limits<double>::quiet_NaN();
            rows.push_back(std::move(row));
        }
    }
    write_reports(cfg, rows);
    return rows;
}

std::string csv_header() {
    return "kernel,tol,offline_time_s,storage_bytes,online_time_s,error_mean,error_max,ranks,"
           "kernel_evals,seed,status";
}

std::string csv_line(const ResultRow& r) {
    std::string line = r.kernel + "," + fmt_double(r.tol) + "," + fmt_double(r.offline_time_s) +
                       "," + std::to_string(r.storage_bytes) + ",";
    line += std::isnan(r.online_time_s) ? std::string() : fmt_double(r.online_time_s);
    line += "," + fmt_double(r.error_mean) + "," + fmt_double(r.error_max) + "," + r.ranks + "," +
            std::to_string(r.kernel_evals) + "," + std::to_string(r.seed) + "," + r.status;
    return line;
}

void write_reports(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows) {
    {
        std::ofstream csv(cfg.output_path + ".csv");
        if (!csv) throw std::runtime_error("cannot write " + cfg.output_path + ".csv");
        csv << csv_header() << "\n";
        for (const auto& r : rows) csv << csv_line(r) << "\n";
    }

    nlohmann::json j;
    j["config"] = {
        {"kernel", std::string(to_string(cfg.kernel.family))},
        {"d", cfg.geom.d},
        {"d_theta", cfg.geom.d_theta},
        {"ns", cfg.ns},
        {"nt", cfg.nt},
        {"n", cfg.n},
        {"eps", cfg.eps_list},
        {"theta_samples", cfg.theta_samples},
        {"subsample", cfg.subsample},
        {"seed", cfg.seed},
        {"mode", std::string(to_string(cfg.mode))},
        {"max_sweeps", cfg.max_sweeps},
        {"norm", std::string(1, cfg.norm)},
    };
    if (cfg.kernel.fixed_ell) j["config"]["ell"] = *cfg.kernel.fixed_ell;
    if (cfg.kernel.fixed_nu) j["config"]["nu"] = *cfg.kernel.fixed_nu;
    auto boxes = nlohmann::json::array();
    for (const auto& iv : cfg.geom.ordered_intervals()) boxes.push_back({iv.lo, iv.hi});
    j["config"]["boxes_source_theta_target"] = boxes;

    utsname uts{};
    uname(&uts);
    j["hardware"] = {
        {"sysname", uts.sysname},
        {"release", uts.release},
        {"machine", uts.machine},
        {"hardware_concurrency", std::thread::hardware_concurrency()},
#if defined(__VERSION__)
        {"compiler", __VERSION__},
#endif
    };

    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row = {
            {"kernel", r.kernel},          {"tol", r.tol},
            {"offline_time_s", r.offline_time_s}, {"storage_bytes", r.storage_bytes},
            {"error_mean", r.error_mean},  {"error_max", r.error_max},
            {"ranks", r.ranks},            {"kernel_evals", r.kernel_evals},
            {"seed", r.seed},              {"status", r.status},
        };
        if (!std::isnan(r.online_time_s)) row["online_time_s"] = r.online_time_s;
        arr.push_back(row);
    }
    j["rows"] = arr;

    std::ofstream js(cfg.output_path + ".json");
    if (!js) throw std::runtime_error("cannot write " + cfg.output_path + ".json");
    js << j.dump(2) << "\n";
}

} // namespace pttk
