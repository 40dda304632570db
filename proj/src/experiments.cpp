#include "homflow/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "homflow/liealg.hpp"  // least_squares_slope

namespace homflow {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTotal = 3.0 / kPi;  // full measure budget of the cusp family
constexpr double kInf = std::numeric_limits<double>::infinity();

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const size_t idx = std::min(v.size() - 1, size_t(q * double(v.size())));
    return v[idx];
}

double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / double(v.size());
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0;
    const double m = mean_of(v);
    double s2 = 0;
    for (double x : v) s2 += (x - m) * (x - m);
    return std::sqrt(s2 / double(v.size() - 1) / double(v.size()));
}

void append(std::vector<ResultRow>& rows, const std::string& exp, double m_or_t,
            const std::string& stat, double value, double se = 0,
            long long censored = 0) {
    rows.push_back({exp, m_or_t, stat, value, se, censored});
}

void validate_common(const ExperimentConfig& cfg) {
    if (cfg.n_points < 1) throw std::invalid_argument("n_points must be at least 1");
    if (cfg.m_max < 1) throw std::invalid_argument("m_max must be at least 1");
    if (cfg.workers < 1 || cfg.workers > 256)
        throw std::invalid_argument("workers must lie in [1, 256]");
}

// Threshold on the squared shortest lattice vector equivalent to membership
// in the cusp target of measure mu (s < e^-t with mu = (3/pi) e^-t).
double cusp_threshold_for_measure(double mu) { return std::min(1.0, mu / kTotal); }

std::vector<long long> decade_checkpoints(long long m_max) {
    std::vector<long long> out;
    for (long long c = 1000; c <= m_max; c *= 10) out.push_back(c);
    if (out.empty() || out.back() != m_max) out.push_back(m_max);
    return out;
}

std::vector<long long> dyadic_checkpoints(long long m_max) {
    std::vector<long long> out;
    for (long long c = 1; c < m_max; c *= 2) out.push_back(c);
    out.push_back(m_max);
    return out;
}

}  // namespace

// -------------------------------------------------------------- schedules

double MeasureSchedule::mu(long long m) const {
    if (m < 1) throw std::invalid_argument("schedule index must be at least 1");
    double raw = 0;
    switch (kind) {
        case Kind::Harmonic: raw = 1.0 / double(m); break;
        case Kind::Power: raw = c * std::pow(double(m), -eta); break;
        case Kind::Constant: raw = c; break;
    }
    return std::min(kTotal, raw);
}

bool MeasureSchedule::diverges() const {
    switch (kind) {
        case Kind::Harmonic: return true;
        case Kind::Power: return eta <= 1.0;
        case Kind::Constant: return c > 0;
    }
    return false;
}

std::string MeasureSchedule::name() const {
    char buf[96];
    switch (kind) {
        case Kind::Harmonic: return "harmonic";
        case Kind::Power:
            std::snprintf(buf, sizeof buf, "power(c=%.6g,eta=%.6g)", c, eta);
            return buf;
        case Kind::Constant:
            std::snprintf(buf, sizeof buf, "constant(mu=%.6g)", c);
            return buf;
    }
    return "?";
}

MeasureSchedule MeasureSchedule::harmonic() { return {Kind::Harmonic, 1.0, 1.0}; }

MeasureSchedule MeasureSchedule::power(double c, double eta) {
    if (!(c > 0)) throw std::invalid_argument("schedule coefficient must be positive");
    if (eta < 0) throw std::invalid_argument("schedule exponent must be nonnegative");
    return {Kind::Power, c, eta};
}

MeasureSchedule MeasureSchedule::constant(double mu) {
    if (!(mu > 0)) throw std::invalid_argument("constant schedule needs mu > 0");
    return {Kind::Constant, mu, 0.0};
}

// ------------------------------------------------------------- scaffolding

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows, std::uint64_t config_hash,
                        std::uint64_t seed) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "# schema=1 config_hash=%016llx seed=%llu\n",
                  (unsigned long long)config_hash, (unsigned long long)seed);
    out += buf;
    out += "experiment,m_or_t,statistic,value,stderr,n_censored\n";
    for (const ResultRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.12g,%s,%.12g,%.12g,%lld\n",
                      r.experiment.c_str(), r.m_or_t, r.statistic.c_str(), r.value,
                      r.stderr_v, (long long)r.n_censored);
        out += buf;
    }
    return out;
}

void for_each_point(long long n, int workers, std::uint64_t seed,
                    const std::function<void(long long, Xoshiro256pp&)>& body) {
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    const int k = int(std::min<long long>(workers, std::max<long long>(1, n)));
    std::atomic<long long> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto drain = [&] {
        for (;;) {
            const long long i = next.fetch_add(1);
            if (i >= n) return;
            try {
                Xoshiro256pp rng(seed, std::uint64_t(i));
                body(i, rng);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!first_error) first_error = std::current_exception();
                next.store(n);  // stop handing out work
                return;
            }
        }
    };
    if (k == 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(size_t(k));
        for (int w = 0; w < k; ++w) pool.emplace_back(drain);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

// -------------------------------------------------------- hitting-time law

HittingTimeResult run_hitting_time_law(const ExperimentConfig& cfg,
                                       const HittingTimeParams& params) {
    validate_common(cfg);
    if (params.hit_index < 1) throw std::invalid_argument("hit index must be at least 1");
    if (params.mu_schedule.empty())
        throw std::invalid_argument("hitting-time law needs at least one target measure");
    for (double mu : params.mu_schedule) {
        if (!(mu > 0) || mu >= 0.5)
            throw std::invalid_argument(
                "target measure must lie in (0, 0.5): the log law concerns small "
                "targets, and tau for a half-space target carries no information");
    }

    const size_t nmu = params.mu_schedule.size();
    HittingTimeResult res;
    res.per_mu.resize(nmu);
    for (size_t k = 0; k < nmu; ++k) {
        res.per_mu[k].mu = params.mu_schedule[k];
        res.per_mu[k].t = cfg.target.t_for_measure(params.mu_schedule[k]);
        res.per_mu[k].tau.assign(size_t(cfg.n_points), kInf);
    }

    const bool cusp = cfg.target.kind == TargetFamily::Kind::CuspNeighborhood;
    std::vector<double> thr(nmu);
    for (size_t k = 0; k < nmu; ++k)
        thr[k] = cusp ? cusp_threshold_for_measure(params.mu_schedule[k]) : 0.0;

    for_each_point(cfg.n_points, cfg.workers, cfg.seed, [&](long long i, Xoshiro256pp& rng) {
        OrbitWalker w(haar_sample(rng));
        std::vector<int> hits(nmu, 0);
        size_t done = 0;
        for (long long m = 1; m <= cfg.m_max && done < nmu; ++m) {
            w.step(cfg.flow);
            const double s = cusp ? w.shortest_sq() : 0.0;
            for (size_t k = 0; k < nmu; ++k) {
                if (hits[k] >= params.hit_index) continue;
                const bool in = cusp ? (s < thr[k])
                                     : cfg.target.contains_z(w.reduced_z(), res.per_mu[k].t);
                if (in && ++hits[k] == params.hit_index) {
                    res.per_mu[k].tau[size_t(i)] = double(m);
                    ++done;
                }
            }
        }
    });

    for (size_t k = 0; k < nmu; ++k) {
        auto& pm = res.per_mu[k];
        pm.ratio.resize(pm.tau.size());
        const double denom = -std::log(pm.mu);
        for (size_t i = 0; i < pm.tau.size(); ++i) {
            pm.ratio[i] = std::isinf(pm.tau[i]) ? kInf : std::log(pm.tau[i]) / denom;
            if (std::isinf(pm.tau[i])) ++pm.n_censored;
        }
        pm.inconclusive = pm.n_censored == (long long)pm.tau.size();
        pm.q05 = quantile(pm.ratio, 0.05);
        pm.q25 = quantile(pm.ratio, 0.25);
        pm.median = quantile(pm.ratio, 0.50);
        pm.q75 = quantile(pm.ratio, 0.75);
        pm.q95 = quantile(pm.ratio, 0.95);
    }
    return res;
}

std::vector<ResultRow> HittingTimeResult::rows() const {
    std::vector<ResultRow> out;
    for (const auto& pm : per_mu) {
        append(out, "hitting_time", pm.mu, "log_ratio_q05", pm.q05, 0, pm.n_censored);
        append(out, "hitting_time", pm.mu, "log_ratio_q25", pm.q25, 0, pm.n_censored);
        append(out, "hitting_time", pm.mu, "log_ratio_median", pm.median, 0, pm.n_censored);
        append(out, "hitting_time", pm.mu, "log_ratio_q75", pm.q75, 0, pm.n_censored);
        append(out, "hitting_time", pm.mu, "log_ratio_q95", pm.q95, 0, pm.n_censored);
    }
    return out;
}

nlohmann::json HittingTimeResult::summary() const {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& pm : per_mu) {
        per.push_back({{"mu", pm.mu},
                       {"t", pm.t},
                       {"q05", pm.q05},
                       {"q25", pm.q25},
                       {"median", pm.median},
                       {"q75", pm.q75},
                       {"q95", pm.q95},
                       {"n_censored", pm.n_censored},
                       {"inconclusive", pm.inconclusive}});
    }
    return {{"experiment", "hitting_time"}, {"per_mu", per}};
}

// ------------------------------------------------------- cusp-excursion law

LoglawResult run_cusp_loglaw(const ExperimentConfig& cfg) {
    validate_common(cfg);
    LoglawResult res;
    res.pre_asymptotic = cfg.m_max < 1000;
    res.checkpoints = decade_checkpoints(cfg.m_max);
    const size_t nc = res.checkpoints.size();

    // Per point and checkpoint: (max_{j<=m} d_j) / log m.  Track the running
    // minimum of the squared shortest vector; one log at each checkpoint.
    std::vector<std::vector<double>> ratio(nc,
                                           std::vector<double>(size_t(cfg.n_points), 0));
    for_each_point(cfg.n_points, cfg.workers, cfg.seed, [&](long long i, Xoshiro256pp& rng) {
        OrbitWalker w(haar_sample(rng));
        double s_min = 1.0;
        size_t ci = 0;
        for (long long m = 1; m <= cfg.m_max && ci < nc; ++m) {
            w.step(cfg.flow);
            const double s = w.shortest_sq();
            if (s < s_min) s_min = s;
            if (m == res.checkpoints[ci]) {
                const double d_max = s_min < 1.0 ? -std::log(s_min) : 0.0;
                ratio[ci][size_t(i)] = d_max / std::log(double(m));
                ++ci;
            }
        }
    });

    for (size_t c = 0; c < nc; ++c) {
        res.median_ratio.push_back(quantile(ratio[c], 0.50));
        res.q25_ratio.push_back(quantile(ratio[c], 0.25));
        res.q75_ratio.push_back(quantile(ratio[c], 0.75));
    }
    return res;
}

std::vector<ResultRow> LoglawResult::rows() const {
    std::vector<ResultRow> out;
    for (size_t c = 0; c < checkpoints.size(); ++c) {
        append(out, "cusp_loglaw", double(checkpoints[c]), "ratio_median", median_ratio[c]);
        append(out, "cusp_loglaw", double(checkpoints[c]), "ratio_q25", q25_ratio[c]);
        append(out, "cusp_loglaw", double(checkpoints[c]), "ratio_q75", q75_ratio[c]);
    }
    return out;
}

nlohmann::json LoglawResult::summary() const {
    return {{"experiment", "cusp_loglaw"},
            {"checkpoints", checkpoints},
            {"median_ratio", median_ratio},
            {"pre_asymptotic", pre_asymptotic},
            {"final_median_ratio", median_ratio.empty() ? 0.0 : median_ratio.back()}};
}

// --------------------------------------------------- strong Borel-Cantelli

namespace {

double sbc_envelope(double c, double e) {
    const double lg = std::max(1.0, std::log(std::max(e, 1.0)));
    return c * std::sqrt(std::max(e, 0.0)) * lg * lg;
}

}  // namespace

SBCResult run_sbc(const ExperimentConfig& cfg, const MeasureSchedule& schedule,
                  double envelope_c, double min_expected) {
    validate_common(cfg);
    if (!(schedule.mu(1) > 0))
        throw std::invalid_argument("schedule must assign positive measure");
    if (!schedule.diverges())
        throw std::invalid_argument(
            "measure sum converges: by Borel-Cantelli the orbit enters only "
            "finitely many of the targets almost surely, so there is no "
            "almost-sure counting asymptotic to check; use a divergent schedule");
    if (!(envelope_c > 0)) throw std::invalid_argument("envelope constant must be positive");
    if (cfg.target.kind != TargetFamily::Kind::CuspNeighborhood)
        throw std::invalid_argument(
            "step-indexed schedules are implemented for the cusp family");

    SBCResult res;
    res.envelope_c = envelope_c;
    res.checkpoints = dyadic_checkpoints(cfg.m_max);
    const size_t nc = res.checkpoints.size();

    // Shared tables: per-step membership thresholds and expected sums.
    std::vector<double> thr(size_t(cfg.m_max) + 1, 0.0);
    std::vector<double> expected_at(nc, 0.0);
    {
        long double acc = 0;
        size_t ci = 0;
        for (long long m = 1; m <= cfg.m_max; ++m) {
            const double mu = schedule.mu(m);
            thr[size_t(m)] = cusp_threshold_for_measure(mu);
            acc += mu;
            if (ci < nc && m == res.checkpoints[ci]) expected_at[ci++] = double(acc);
        }
    }
    res.expected.assign(expected_at.begin(), expected_at.end());
    if (res.expected.back() < min_expected) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "expected hit count %.3f at m_max is below the minimum %.3f; "
                      "increase m_max or fatten the schedule",
                      res.expected.back(), min_expected);
        throw std::invalid_argument(buf);
    }

    std::vector<std::vector<long long>> counts(
        nc, std::vector<long long>(size_t(cfg.n_points), 0));
    for_each_point(cfg.n_points, cfg.workers, cfg.seed, [&](long long i, Xoshiro256pp& rng) {
        OrbitWalker w(haar_sample(rng));
        long long s_count = 0;
        size_t ci = 0;
        for (long long m = 1; m <= cfg.m_max; ++m) {
            w.step(cfg.flow);
            if (w.shortest_sq() < thr[size_t(m)]) ++s_count;
            if (ci < nc && m == res.checkpoints[ci]) counts[ci++][size_t(i)] = s_count;
        }
    });

    long long violations = 0;
    const long long cells = (long long)nc * cfg.n_points;
    for (size_t c = 0; c < nc; ++c) {
        std::vector<double> ratios(size_t(cfg.n_points));
        long long v = 0;
        const double env = sbc_envelope(envelope_c, res.expected[c]);
        for (size_t i = 0; i < ratios.size(); ++i) {
            ratios[i] = double(counts[c][i]) / res.expected[c];
            if (std::abs(double(counts[c][i]) - res.expected[c]) > env) ++v;
        }
        res.mean_ratio.push_back(mean_of(ratios));
        res.ratio_stderr.push_back(stderr_of(ratios));
        res.violation_frac.push_back(double(v) / double(cfg.n_points));
        violations += v;
    }
    res.counts_at = counts;
    res.final_counts = counts.back();
    res.final_mean_ratio = res.mean_ratio.back();
    res.final_ratio_stderr = res.ratio_stderr.back();
    res.overall_violation_frac = double(violations) / double(cells);
    return res;
}

std::vector<ResultRow> SBCResult::rows() const {
    std::vector<ResultRow> out;
    for (size_t c = 0; c < checkpoints.size(); ++c) {
        append(out, "sbc", double(checkpoints[c]), "expected_hits", expected[c]);
        append(out, "sbc", double(checkpoints[c]), "mean_ratio", mean_ratio[c],
               ratio_stderr[c]);
        append(out, "sbc", double(checkpoints[c]), "envelope_violation_frac",
               violation_frac[c]);
    }
    return out;
}

nlohmann::json SBCResult::summary() const {
    return {{"experiment", "sbc"},
            {"final_expected", expected.back()},
            {"final_mean_ratio", final_mean_ratio},
            {"final_ratio_stderr", final_ratio_stderr},
            {"overall_violation_frac", overall_violation_frac},
            {"envelope_c", envelope_c}};
}

// ---------------------------------------------- eventually-always hitting

EAHResult run_eah(const ExperimentConfig& cfg, double c, double eta) {
    validate_common(cfg);
    if (cfg.target.kind != TargetFamily::Kind::CuspNeighborhood)
        throw std::invalid_argument(
            "step-indexed schedules are implemented for the cusp family");
    const MeasureSchedule sched =
        eta == 0.0 ? MeasureSchedule::constant(c) : MeasureSchedule::power(c, eta);

    EAHResult res;
    res.c = c;
    res.eta = eta;
    res.checkpoints = dyadic_checkpoints(cfg.m_max);
    const size_t nc = res.checkpoints.size();
    std::vector<double> thr_at(nc);  // membership threshold of the target B_{m_c}
    for (size_t ci = 0; ci < nc; ++ci)
        thr_at[ci] = cusp_threshold_for_measure(sched.mu(res.checkpoints[ci]));

    const long long half = cfg.m_max / 2;
    std::vector<int> always_hit(size_t(cfg.n_points), 1);
    std::vector<std::vector<int>> hit_at(nc, std::vector<int>(size_t(cfg.n_points), 0));
    std::vector<std::vector<long long>> count_at(
        nc, std::vector<long long>(size_t(cfg.n_points), 0));

    for_each_point(cfg.n_points, cfg.workers, cfg.seed, [&](long long i, Xoshiro256pp& rng) {
        OrbitWalker w(haar_sample(rng));
        double s_min = 1.0;
        size_t ci = 0;  // first checkpoint >= current step
        for (long long m = 1; m <= cfg.m_max; ++m) {
            w.step(cfg.flow);
            const double s = w.shortest_sq();
            if (s < s_min) s_min = s;
            // Count hits of the fixed targets B_{m_c} for every checkpoint
            // c with m <= m_c; thresholds shrink with c, so stop at the
            // first miss.
            for (size_t k = ci; k < nc && s < thr_at[k]; ++k) ++count_at[k][size_t(i)];
            // "Hit by horizon m": the segment so far has entered B_m.
            if (m > half && always_hit[size_t(i)] &&
                !(s_min < cusp_threshold_for_measure(sched.mu(m))))
                always_hit[size_t(i)] = 0;
            if (ci < nc && m == res.checkpoints[ci]) {
                hit_at[ci][size_t(i)] = s_min < thr_at[ci] ? 1 : 0;
                ++ci;
            }
        }
    });

    for (size_t ci = 0; ci < nc; ++ci) {
        double hf = 0, cr = 0;
        for (long long i = 0; i < cfg.n_points; ++i) {
            hf += hit_at[ci][size_t(i)];
            cr += double(count_at[ci][size_t(i)]) /
                  (double(res.checkpoints[ci]) * sched.mu(res.checkpoints[ci]));
        }
        res.hit_fraction.push_back(hf / double(cfg.n_points));
        res.count_ratio_mean.push_back(cr / double(cfg.n_points));
    }
    double eah = 0;
    for (int v : always_hit) eah += v;
    res.eah_fraction = eah / double(cfg.n_points);
    return res;
}

std::vector<ResultRow> EAHResult::rows() const {
    std::vector<ResultRow> out;
    for (size_t c = 0; c < checkpoints.size(); ++c) {
        append(out, "eah", double(checkpoints[c]), "hit_fraction", hit_fraction[c]);
        append(out, "eah", double(checkpoints[c]), "count_ratio_mean",
               count_ratio_mean[c]);
    }
    append(out, "eah", double(checkpoints.back()), "eah_fraction", eah_fraction);
    return out;
}

nlohmann::json EAHResult::summary() const {
    return {{"experiment", "eah"},
            {"c", c},
            {"eta", eta},
            {"eah_fraction", eah_fraction},
            {"final_hit_fraction", hit_fraction.back()},
            {"final_count_ratio", count_ratio_mean.back()}};
}

// ------------------------------------------------------ mean ergodic rates

MeanErgodicResult run_mean_ergodic(const ExperimentConfig& cfg, double mu_f) {
    validate_common(cfg);
    if (!(mu_f > 0) || !(mu_f < kTotal))
        throw std::invalid_argument(
            "observable must be nondegenerate: its mean must lie strictly "
            "between 0 and the total cusp budget 3/pi");

    MeanErgodicResult res;
    res.mu_f = mu_f;
    for (long long m = 16; m <= 65536 && m <= cfg.m_max; m *= 2) res.ms.push_back(m);
    if (res.ms.empty())
        throw std::invalid_argument("mean ergodic rate needs m_max >= 16");
    const size_t nm = res.ms.size();
    const double thr = cusp_threshold_for_measure(mu_f);

    std::vector<std::vector<double>> sq(nm, std::vector<double>(size_t(cfg.n_points), 0));
    for_each_point(cfg.n_points, cfg.workers, cfg.seed, [&](long long i, Xoshiro256pp& rng) {
        OrbitWalker w(haar_sample(rng));
        long long birkhoff = 0;
        size_t mi = 0;
        for (long long m = 1; m <= res.ms.back(); ++m) {
            w.step(cfg.flow);
            if (w.shortest_sq() < thr) ++birkhoff;
            if (m == res.ms[mi]) {
                const double dev = double(birkhoff) / double(m) - mu_f;
                sq[mi][size_t(i)] = dev * dev;
                ++mi;
            }
        }
    });

    std::vector<double> log_m, log_dev;
    for (size_t mi = 0; mi < nm; ++mi) {
        const double msq = mean_of(sq[mi]);
        const double dev = std::sqrt(msq);
        res.l2_deviation.push_back(dev);
        // Delta method: se(sqrt(X)) = se(X) / (2 sqrt(X)).
        res.l2_stderr.push_back(dev > 0 ? stderr_of(sq[mi]) / (2 * dev) : 0.0);
        log_m.push_back(std::log(double(res.ms[mi])));
        log_dev.push_back(std::log(std::max(dev, 1e-300)));
    }
    res.slope = least_squares_slope(log_m, log_dev);
    return res;
}

std::vector<ResultRow> MeanErgodicResult::rows() const {
    std::vector<ResultRow> out;
    for (size_t mi = 0; mi < ms.size(); ++mi) {
        append(out, "mean_ergodic", double(ms[mi]), "l2_deviation", l2_deviation[mi],
               l2_stderr[mi]);
    }
    append(out, "mean_ergodic", double(ms.back()), "slope", slope);
    return out;
}

nlohmann::json MeanErgodicResult::summary() const {
    return {{"experiment", "mean_ergodic"},
            {"mu_f", mu_f},
            {"slope", slope},
            {"final_l2_deviation", l2_deviation.back()}};
}

// ------------------------------------------------------- correlation decay

MatrixDecayResult run_matrix_decay(const ExperimentConfig& cfg, double mu_phi,
                                   double mu_psi, std::vector<long long> t_grid) {
    validate_common(cfg);
    for (double mu : {mu_phi, mu_psi}) {
        if (!(mu > 0) || !(mu < kTotal))
            throw std::invalid_argument("observable means must lie in (0, 3/pi)");
    }
    if (t_grid.empty()) {
        for (long long t = 1; t <= 1000; t = std::max(t + 1, (t * 8) / 5))
            t_grid.push_back(t);
    }
    for (long long t : t_grid) {
        if (t < 1 || t > 1000)
            throw std::invalid_argument("correlation lags must lie in [1, 1000]");
    }
    std::sort(t_grid.begin(), t_grid.end());
    t_grid.erase(std::unique(t_grid.begin(), t_grid.end()), t_grid.end());

    MatrixDecayResult res;
    res.t_grid = t_grid;
    const size_t nt = t_grid.size();
    const double thr_f = cusp_threshold_for_measure(mu_phi);
    const double thr_g = cusp_threshold_for_measure(mu_psi);

    // Per point: g at time zero, f along the orbit at each lag.
    std::vector<int> g0(size_t(cfg.n_points), 0);
    std::vector<std::vector<int>> ft(nt, std::vector<int>(size_t(cfg.n_points), 0));
    for_each_point(cfg.n_points, cfg.workers, cfg.seed, [&](long long i, Xoshiro256pp& rng) {
        OrbitWalker w(haar_sample(rng));
        g0[size_t(i)] = w.shortest_sq() < thr_g ? 1 : 0;
        size_t ti = 0;
        for (long long m = 1; m <= t_grid.back(); ++m) {
            w.step(cfg.flow);
            if (m == t_grid[ti]) {
                ft[ti][size_t(i)] = w.shortest_sq() < thr_f ? 1 : 0;
                ++ti;
            }
        }
    });

    const double n = double(cfg.n_points);
    double gbar = 0;
    for (int v : g0) gbar += v;
    gbar /= n;
    std::vector<double> usable_logt, usable_t, usable_logc;
    std::vector<double> floors;
    for (size_t ti = 0; ti < nt; ++ti) {
        double fbar = 0, fg = 0;
        for (size_t i = 0; i < size_t(cfg.n_points); ++i) {
            fbar += ft[ti][i];
            fg += ft[ti][i] * g0[i];
        }
        fbar /= n;
        fg /= n;
        const double cov = fg - fbar * gbar;
        // Conservative error bar: spread of the product term, floored at the
        // one-observation scale (an empirical zero is still ~1/n uncertain).
        const double p0 = 1.0 / n;
        const double se = std::sqrt(std::max(fg * (1 - fg), p0 * (1 - p0)) / n);
        res.correlation.push_back(cov);
        res.corr_stderr.push_back(se);
        floors.push_back(3 * se);
        if (std::abs(cov) > 3 * se) {
            usable_logt.push_back(std::log(double(t_grid[ti])));
            usable_t.push_back(double(t_grid[ti]));
            usable_logc.push_back(std::log(std::abs(cov)));
            if (res.fit_lo == 0) res.fit_lo = t_grid[ti];
            res.fit_hi = t_grid[ti];
        }
    }
    res.noise_floor = quantile(floors, 0.5);
    if (usable_logt.size() < 3) {
        res.inconclusive = true;
        return res;
    }
    res.power_exponent = -least_squares_slope(usable_logt, usable_logc);
    res.exp_rate = least_squares_slope(usable_t, usable_logc);
    if (cfg.flow.kind == FlowSpec::Kind::Horocycle) {
        res.consistent = res.power_exponent >= 0.7 && res.power_exponent <= 1.3;
    } else {
        res.consistent = res.exp_rate < 0;
    }
    return res;
}

std::vector<ResultRow> MatrixDecayResult::rows() const {
    std::vector<ResultRow> out;
    for (size_t ti = 0; ti < t_grid.size(); ++ti) {
        append(out, "matrix_decay", double(t_grid[ti]), "correlation", correlation[ti],
               corr_stderr[ti]);
    }
    if (!inconclusive) {
        append(out, "matrix_decay", double(fit_hi), "fit_power_exponent", power_exponent);
        append(out, "matrix_decay", double(fit_hi), "fit_exp_rate", exp_rate);
    }
    append(out, "matrix_decay", double(t_grid.back()), "noise_floor", noise_floor);
    return out;
}

nlohmann::json MatrixDecayResult::summary() const {
    nlohmann::json j{{"experiment", "matrix_decay"},
                     {"inconclusive", inconclusive},
                     {"noise_floor", noise_floor}};
    if (!inconclusive) {
        j["power_exponent"] = power_exponent;
        j["exp_rate"] = exp_rate;
        j["fit_range"] = {fit_lo, fit_hi};
        j["consistent"] = consistent;
    }
    return j;
}

// -------------------------------------------------------- Haar validation

HaarCheckResult run_haar_check(const ExperimentConfig& cfg,
                               std::vector<double> thresholds) {
    validate_common(cfg);
    for (double T : thresholds) {
        if (!(T >= 1.0))
            throw std::invalid_argument("height thresholds must be at least 1");
    }
    HaarCheckResult res;
    res.thresholds = thresholds;
    std::vector<std::vector<int>> above(thresholds.size(),
                                        std::vector<int>(size_t(cfg.n_points), 0));
    for_each_point(cfg.n_points, cfg.workers, cfg.seed, [&](long long i, Xoshiro256pp& rng) {
        const double y = haar_sample(rng).z().imag();
        for (size_t k = 0; k < thresholds.size(); ++k)
            above[k][size_t(i)] = y > thresholds[k] ? 1 : 0;
    });
    for (size_t k = 0; k < thresholds.size(); ++k) {
        double f = 0;
        for (int v : above[k]) f += v;
        f /= double(cfg.n_points);
        res.frequency.push_back(f);
        res.expected.push_back(kTotal / thresholds[k]);
        res.freq_stderr.push_back(std::sqrt(f * (1 - f) / double(cfg.n_points)));
    }
    return res;
}

std::vector<ResultRow> HaarCheckResult::rows() const {
    std::vector<ResultRow> out;
    for (size_t k = 0; k < thresholds.size(); ++k) {
        append(out, "haar_check", thresholds[k], "tail_frequency", frequency[k],
               freq_stderr[k]);
        append(out, "haar_check", thresholds[k], "tail_expected", expected[k]);
    }
    return out;
}

nlohmann::json HaarCheckResult::summary() const {
    return {{"experiment", "haar_check"},
            {"thresholds", thresholds},
            {"frequency", frequency},
            {"expected", expected}};
}

}  // namespace homflow
