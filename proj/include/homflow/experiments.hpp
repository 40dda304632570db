#pragma once

// Monte Carlo experiments for shrinking-target statistics on the modular
// surface: hitting-time log law, cusp-excursion log law, strong
// Borel-Cantelli counts, eventually-always hitting, mean ergodic rates, and
// correlation decay.  Every experiment draws one independent RNG stream per
// sample point, so results are byte-identical across repeat runs and worker
// counts.

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "homflow/modsurface.hpp"

namespace homflow {

// ------------------------------------------------------------ configuration

struct ExperimentConfig {
    FlowSpec flow = FlowSpec::horocycle();
    TargetFamily target = TargetFamily::cusp();
    long long n_points = 100;
    long long m_max = 100000;
    std::uint64_t seed = 0;
    int workers = 1;
};

// Measure schedule mu_m for step-indexed target families.
struct MeasureSchedule {
    enum class Kind { Harmonic, Power, Constant };
    Kind kind = Kind::Harmonic;
    double c = 1.0;    // Power: mu_m = c * m^-eta; Constant: mu_m = c
    double eta = 1.0;  // Power only

    // mu_m, clamped to the total measure so the target level stays >= 0.
    double mu(long long m) const;
    // Does sum_m mu_m diverge?
    bool diverges() const;
    std::string name() const;

    static MeasureSchedule harmonic();              // mu_m = min(3/pi, 1/m)
    static MeasureSchedule power(double c, double eta);
    static MeasureSchedule constant(double mu);
};

// One output record; rows() on each result yields the full CSV content.
struct ResultRow {
    std::string experiment;
    double m_or_t = 0;
    std::string statistic;
    double value = 0;
    double stderr_v = 0;
    long long n_censored = 0;
};

// CSV serialization: "# schema=1 config_hash=... seed=..." comment line,
// canonical header, %.12g values, LF line endings.
std::string rows_to_csv(const std::vector<ResultRow>& rows, std::uint64_t config_hash,
                        std::uint64_t seed);

// FNV-1a 64-bit hash (used to stamp outputs with the configuration they
// came from).
std::uint64_t fnv1a64(const std::string& bytes);

// Deterministic parallel map over point indices: each index gets its own RNG
// stream derived from (seed, index), results must be written to per-index
// slots by the body.  Worker scheduling cannot affect the outcome.
void for_each_point(long long n, int workers, std::uint64_t seed,
                    const std::function<void(long long, Xoshiro256pp&)>& body);

// ------------------------------------------------------- hitting-time law

struct HittingTimeParams {
    std::vector<double> mu_schedule{1e-2, 1e-3, 1e-4};
    int hit_index = 1;  // which hit to time (tau^i)
};

struct HittingTimeResult {
    struct PerMu {
        double mu = 0;
        double t = 0;                // target level with measure mu
        std::vector<double> tau;     // per point; +inf when censored
        std::vector<double> ratio;   // log tau / -log mu; +inf when censored
        double q05 = 0, q25 = 0, median = 0, q75 = 0, q95 = 0;
        long long n_censored = 0;
        bool inconclusive = false;   // every point exhausted the budget
    };
    std::vector<PerMu> per_mu;
    std::vector<ResultRow> rows() const;
    nlohmann::json summary() const;
};

HittingTimeResult run_hitting_time_law(const ExperimentConfig& cfg,
                                       const HittingTimeParams& params = {});

// ------------------------------------------------------ cusp-excursion law

struct LoglawResult {
    std::vector<long long> checkpoints;     // decades up to m_max
    std::vector<double> median_ratio;       // max_{j<=m} d_j / log m, median
    std::vector<double> q25_ratio, q75_ratio;
    bool pre_asymptotic = false;            // horizon too short for the law
    std::vector<ResultRow> rows() const;
    nlohmann::json summary() const;
};

LoglawResult run_cusp_loglaw(const ExperimentConfig& cfg);

// -------------------------------------------------- strong Borel-Cantelli

struct SBCResult {
    std::vector<long long> checkpoints;   // dyadic plus m_max
    std::vector<double> expected;         // E_m = sum_{j<=m} mu_j
    std::vector<double> mean_ratio;       // mean over points of S_m / E_m
    std::vector<double> ratio_stderr;
    std::vector<double> violation_frac;   // envelope violations per checkpoint
    std::vector<std::vector<long long>> counts_at;  // [checkpoint][point] hit counts
    std::vector<long long> final_counts;  // per-point S at m_max
    double final_mean_ratio = 0;
    double final_ratio_stderr = 0;
    double overall_violation_frac = 0;    // over all (point, checkpoint) cells
    double envelope_c = 0;
    std::vector<ResultRow> rows() const;
    nlohmann::json summary() const;
};

// Counts hits of the step-indexed shrinking family B_{mu_m} and compares
// with the expected sum; the envelope is C sqrt(E) (log E)^2 with the log
// floored at 1 so it is meaningful before E exceeds e.  Rejects schedules
// whose measure sum converges (classical Borel-Cantelli already settles
// those: only finitely many hits occur) and horizons with
// E_{m_max} < min_expected.
SBCResult run_sbc(const ExperimentConfig& cfg, const MeasureSchedule& schedule,
                  double envelope_c = 10.0, double min_expected = 10.0);

// --------------------------------------------- eventually-always hitting

struct EAHResult {
    double c = 0, eta = 0;
    std::vector<long long> checkpoints;
    std::vector<double> hit_fraction;      // P(orbit segment has hit B_m)
    std::vector<double> count_ratio_mean;  // #{j<=m in B_m} / (m mu_m), mean
    double eah_fraction = 0;  // points hitting at every m in (m_max/2, m_max]
    std::vector<ResultRow> rows() const;
    nlohmann::json summary() const;
};

EAHResult run_eah(const ExperimentConfig& cfg, double c, double eta);

// ---------------------------------------------------- mean ergodic rates

struct MeanErgodicResult {
    double mu_f = 0;
    std::vector<long long> ms;       // powers of two
    std::vector<double> l2_deviation;  // || S_m/m - mu(f) ||_{L^2}
    std::vector<double> l2_stderr;
    double slope = 0;  // of log deviation against log m
    std::vector<ResultRow> rows() const;
    nlohmann::json summary() const;
};

MeanErgodicResult run_mean_ergodic(const ExperimentConfig& cfg, double mu_f = 0.1);

// ------------------------------------------------------ correlation decay

struct MatrixDecayResult {
    std::vector<long long> t_grid;
    std::vector<double> correlation;  // cov(f(x h_t), g(x)) over Haar x
    std::vector<double> corr_stderr;
    long long fit_lo = 0, fit_hi = 0;  // fitted t-range (inclusive)
    double power_exponent = 0;  // fit of log|corr| against log t
    double exp_rate = 0;        // fit of log|corr| against t
    bool inconclusive = false;  // too few points above the noise floor
    double noise_floor = 0;
    bool consistent = false;  // horocycle: exponent in [0.7, 1.3];
                              // geodesic/custom: exponential rate < 0
    std::vector<ResultRow> rows() const;
    nlohmann::json summary() const;
};

MatrixDecayResult run_matrix_decay(const ExperimentConfig& cfg, double mu_phi = 0.1,
                                   double mu_psi = 0.1,
                                   std::vector<long long> t_grid = {});

// ------------------------------------------------------- Haar validation

struct HaarCheckResult {
    std::vector<double> thresholds;  // heights T
    std::vector<double> frequency;   // empirical mass of {Im z > T}
    std::vector<double> expected;    // (3/pi)/T
    std::vector<double> freq_stderr;
    std::vector<ResultRow> rows() const;
    nlohmann::json summary() const;
};

HaarCheckResult run_haar_check(const ExperimentConfig& cfg,
                               std::vector<double> thresholds = {1.5, 2.0, 4.0});

}  // namespace homflow
