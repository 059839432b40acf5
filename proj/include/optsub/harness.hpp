#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "optsub/samplers.hpp"
#include "optsub/subsample.hpp"
#include "optsub/types.hpp"

namespace optsub {

/// One simulation campaign: the reference setting is d = 50 covariates,
/// compound symmetry, k = 1000, n from 1e3 to 1e7.
struct ExperimentConfig {
    Family family = Family::Normal;
    double nu = 3.0;
    index_t d = 50;
    double rho = 0.5;
    index_t k = 1000;
    std::vector<index_t> n_list = {1000, 10000, 100000, 1000000};
    std::vector<Method> methods = {Method::Full, Method::DOpt, Method::DOptSimplified,
                                   Method::Iboss, Method::Uniform};
    index_t replicates = 200;  // desk default; the reference runs used 1e4
    std::uint64_t seed = 1;
    double sigma_eps = 1.0;
    std::string mode = "det";  // "det" or "mse"
    std::vector<index_t> mse_d_list = {2, 5, 10};

    void validate() const;
    static ExperimentConfig from_stream(std::istream& in, const std::string& name);
    static ExperimentConfig from_file(const std::string& path);
};

struct ExperimentRecord {
    Method method = Method::Full;
    index_t n = 0;
    index_t replicate = 0;
    double standardized_det = 0.0;
    double elapsed_ms_select = 0.0;
    double elapsed_ms_total = 0.0;
};

/// det(mean C matrix)^{1/d} per (method, n) -- the aggregation the
/// reference tables use, alongside the per-replicate determinants.
struct AggregateRecord {
    Method method = Method::Full;
    index_t n = 0;
    index_t count = 0;
    double det_of_mean_matrix = 0.0;
};

struct ExperimentResult {
    std::vector<ExperimentRecord> records;    // sorted by (method, n, replicate)
    std::vector<AggregateRecord> aggregates;  // sorted by (method, n)
};

/// Runs the det-mode campaign: per (n, replicate) generate one data set,
/// apply every configured method, record det(C_slope)^{1/d} and timings.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct SummaryRow {
    Method method = Method::Full;
    index_t n = 0;
    index_t count = 0;
    double mean_det = 0.0;
    double std_det = 0.0;  // population normalization: one record -> 0
    double mean_ms = 0.0;
    double median_ms = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);

struct MseSummaryRow {
    index_t d = 0;
    index_t n = 0;
    double approx_mse = 0.0;  // per-coordinate asymptotic approximation
    double sim_mse = 0.0;     // simulated MSE / d
};

/// MSE-mode campaign (responses generated, least squares fitted) over
/// mse_d_list x n_list with the configured method.
std::vector<MseSummaryRow> run_mse_experiment(const ExperimentConfig& config);

/// Writes one plot-data CSV for the given figure id into out_dir.
///   fig1: alpha,m2,d      (second-moment curves, closed form)
///   fig2: r,f_design,f_radius  (marginal radius densities, d=2, alpha=0.1)
///   fig3: n,approx_mse,sim_mse,d   (needs MSE summary)
///   fig4/fig5/fig6: n,method,det   (needs det summary)
///   fig7: alpha,eff,d     (uniform-subsampling efficiency, closed form)
/// Returns the file path. Throws MissingSeries when the summary lacks
/// the required series.
std::string emit_plot_data(const std::vector<SummaryRow>& summary,
                           const std::vector<MseSummaryRow>& mse_summary,
                           const std::string& figure_id, const std::string& out_dir);

/// Writes a gnuplot-style declarative script covering the emitted files.
std::string emit_plot_script(const std::vector<std::string>& figure_files,
                             const std::string& out_dir);

void write_records_csv(const std::string& path, const std::vector<ExperimentRecord>& records);
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
void write_aggregates_csv(const std::string& path, const std::vector<AggregateRecord>& rows);
void write_mse_csv(const std::string& path, const std::vector<MseSummaryRow>& rows);

struct BenchRow {
    Method method = Method::Full;
    index_t n = 0;
    double median_select_ms = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    // least-squares slope of log(time) vs log(n) per method
    std::vector<std::pair<Method, double>> slopes;
};

/// Times the selection phase (distances + pick) of D-OPT, D-OPT-s and
/// IBOSS over n_list, median of 7 repetitions each.
BenchResult bench_complexity(const ExperimentConfig& config);

void write_bench_csv(const std::string& path, const BenchResult& bench);

}  // namespace optsub
