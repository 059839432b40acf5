#include "optsub/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "optsub/design.hpp"
#include "optsub/estimation.hpp"
#include "optsub/linalg.hpp"
#include "optsub/parallel.hpp"
#include "optsub/special.hpp"

namespace optsub {
namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point start) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// One replicate buffer per worker; large data sets run serially so the
// peak stays at a single n x d block.
constexpr std::size_t kSerialDataBytes = 256ull << 20;

int method_order(Method m) { return static_cast<int>(m); }

}  // namespace

void ExperimentConfig::validate() const {
    if (n_list.empty()) throw ConfigError("config: n_list empty");
    if (replicates < 1) throw ConfigError("config: V < 1");
    if (mode != "det" && mode != "mse") throw ConfigError("config: mode must be det or mse");
    for (index_t n : n_list)
        if (k > n) throw ConfigError("config: k larger than some n in n_list");
    if (mode == "det") {
        if (methods.empty()) throw ConfigError("config: methods empty");
    } else if (mse_d_list.empty()) {
        throw ConfigError("config: mse_d_list empty");
    }
    if (family == Family::StudentT && !(nu > 2.0)) throw ConfigError("config: nu must be > 2");
    if (d >= 2 && (rho <= -1.0 / static_cast<double>(d - 1) || rho >= 1.0))
        throw ConfigError("config: rho outside compound-symmetry validity");
    if (sigma_eps < 0.0) throw ConfigError("config: sigma_eps < 0");
}

ExperimentConfig ExperimentConfig::from_stream(std::istream& in, const std::string& name) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    const auto parse_list = [](const std::string& v) {
        std::vector<std::string> parts;
        std::string cur;
        for (char ch : v) {
            if (ch == ',') {
                parts.push_back(cur);
                cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(ch))) {
                cur += ch;
            }
        }
        if (!cur.empty()) parts.push_back(cur);
        return parts;
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char ch : line)
                if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
            if (blank) continue;
            throw ConfigError(name + ":" + std::to_string(line_no) + ": expected key=value");
        }
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        try {
            if (key == "family") {
                if (value == "normal")
                    cfg.family = Family::Normal;
                else if (value == "t" || value == "student-t")
                    cfg.family = Family::StudentT;
                else
                    throw ConfigError("family must be normal or t");
            } else if (key == "nu") {
                cfg.nu = std::stod(value);
            } else if (key == "d") {
                cfg.d = std::stoull(value);
            } else if (key == "rho") {
                cfg.rho = std::stod(value);
            } else if (key == "k") {
                cfg.k = std::stoull(value);
            } else if (key == "n_list") {
                cfg.n_list.clear();
                for (const auto& p : parse_list(value))
                    cfg.n_list.push_back(std::stoull(p));
            } else if (key == "methods") {
                cfg.methods.clear();
                for (const auto& p : parse_list(value))
                    cfg.methods.push_back(method_from_name(p));
            } else if (key == "V") {
                cfg.replicates = std::stoull(value);
            } else if (key == "seed") {
                cfg.seed = std::stoull(value);
            } else if (key == "sigma_eps") {
                cfg.sigma_eps = std::stod(value);
            } else if (key == "mode") {
                cfg.mode = value;
            } else if (key == "mse_d_list") {
                cfg.mse_d_list.clear();
                for (const auto& p : parse_list(value))
                    cfg.mse_d_list.push_back(std::stoull(p));
            } else {
                throw ConfigError("unknown key '" + key + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(name + ":" + std::to_string(line_no) + ": bad value for '" +
                              key + "': " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config");
    return from_stream(in, path);
}

namespace {

struct ReplicateOutput {
    // per method: det, select ms, total ms
    std::vector<double> det;
    std::vector<double> select_ms;
    std::vector<double> total_ms;
};

CovSpec scenario_cov(const ExperimentConfig& cfg) {
    if (cfg.rho == 0.0) return CovSpec::identity(cfg.d);
    return CovSpec::compound_symmetry(cfg.d, cfg.rho);
}

EllipticalModel scenario_model(const ExperimentConfig& cfg) {
    const CovSpec cov = scenario_cov(cfg);
    return cfg.family == Family::Normal ? EllipticalModel::normal(cov)
                                        : EllipticalModel::student_t(cfg.nu, cov);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.mode != "det") throw ConfigError("run_experiment: config mode must be det");
    const EllipticalModel model = scenario_model(cfg);
    const CovSpec& cov = model.cov;
    const index_t d = cfg.d;
    const index_t n_methods = cfg.methods.size();
    const std::vector<double> unit_variances(d, 1.0);
    const index_t V = cfg.replicates;

    ExperimentResult result;
    result.records.reserve(cfg.n_list.size() * n_methods * V);

    // replicate blocks are fixed by V alone, keeping every reduction
    // order independent of the thread count
    const index_t block_size = std::max<index_t>(1, (V + 63) / 64);
    const index_t n_blocks = (V + block_size - 1) / block_size;

    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        const index_t n = cfg.n_list[ni];
        std::vector<ReplicateOutput> outputs(V);
        // per block, per method: running sum of the C_slope matrices
        std::vector<std::vector<double>> block_csum(n_blocks * n_methods);

        const auto run_block = [&](std::size_t b, std::size_t begin, std::size_t end) {
            thread_local DataMatrix x;
            for (std::size_t slot = b * n_methods; slot < (b + 1) * n_methods; ++slot)
                block_csum[slot].assign(d * d, 0.0);
            for (std::size_t v = begin; v < end; ++v) {
                RngStream rng(cfg.seed, (static_cast<std::uint64_t>(ni) << 40) + v);
                sample_covariates_into(model, n, rng, x);
                ReplicateOutput& out = outputs[v];
                out.det.resize(n_methods);
                out.select_ms.resize(n_methods);
                out.total_ms.resize(n_methods);
                for (index_t mi = 0; mi < n_methods; ++mi) {
                    const Method method = cfg.methods[mi];
                    const auto t0 = clock_type::now();
                    SubsampleResult sel;
                    SlopeCovariance cs;
                    switch (method) {
                        case Method::Full:
                            cs = slope_covariance(x);
                            out.select_ms[mi] = 0.0;
                            break;
                        case Method::DOpt:
                            sel = select_top_k_mahalanobis(x, cov, cfg.k);
                            break;
                        case Method::DOptSimplified:
                            sel = select_top_k_simplified(x, cov.mean, unit_variances, cfg.k);
                            break;
                        case Method::Iboss:
                            sel = select_iboss(x, cfg.k);
                            break;
                        case Method::Uniform:
                            sel = select_uniform(x, cfg.k, rng);
                            break;
                        case Method::Leverage:
                            sel = select_top_k_leverage(x, cfg.k);
                            break;
                        case Method::QuantileThreshold: {
                            const double alpha =
                                static_cast<double>(cfg.k) / static_cast<double>(n);
                            sel = select_quantile_threshold(
                                x, cov, optimal_threshold(cfg.family, d, cfg.nu, alpha));
                            break;
                        }
                    }
                    if (method != Method::Full) {
                        out.select_ms[mi] = sel.elapsed_ms;
                        cs = slope_covariance(x, sel.indices);
                    }
                    out.total_ms[mi] = ms_since(t0);
                    out.det[mi] = cs.standardized_det;
                    double* csum = block_csum[b * n_methods + mi].data();
                    for (index_t e = 0; e < d * d; ++e) csum[e] += cs.matrix[e];
                }
            }
        };

        if (static_cast<std::size_t>(n) * d * sizeof(double) >= kSerialDataBytes) {
            for (index_t b = 0; b < n_blocks; ++b)
                run_block(b, b * block_size, std::min<std::size_t>(V, (b + 1) * block_size));
        } else {
            parallel_blocks(V, block_size, run_block);
        }

        for (index_t mi = 0; mi < n_methods; ++mi) {
            for (index_t v = 0; v < V; ++v)
                result.records.push_back({cfg.methods[mi], n, v, outputs[v].det[mi],
                                          outputs[v].select_ms[mi], outputs[v].total_ms[mi]});
            std::vector<double> mean_c(d * d, 0.0);
            for (index_t b = 0; b < n_blocks; ++b) {
                const double* csum = block_csum[b * n_methods + mi].data();
                for (index_t e = 0; e < d * d; ++e) mean_c[e] += csum[e];
            }
            for (double& v : mean_c) v /= static_cast<double>(V);
            const CholFactor chol = cholesky(mean_c, d);
            result.aggregates.push_back(
                {cfg.methods[mi], n, V,
                 std::exp(cholesky_logdet(chol) / static_cast<double>(d))});
        }
    }

    std::sort(result.records.begin(), result.records.end(),
              [](const ExperimentRecord& a, const ExperimentRecord& b) {
                  if (a.method != b.method) return method_order(a.method) < method_order(b.method);
                  if (a.n != b.n) return a.n < b.n;
                  return a.replicate < b.replicate;
              });
    std::sort(result.aggregates.begin(), result.aggregates.end(),
              [](const AggregateRecord& a, const AggregateRecord& b) {
                  if (a.method != b.method) return method_order(a.method) < method_order(b.method);
                  return a.n < b.n;
              });
    return result;
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
    if (records.empty()) throw EmptyInput("summarize: no records");
    std::map<std::pair<int, index_t>, std::vector<const ExperimentRecord*>> groups;
    for (const auto& r : records) groups[{method_order(r.method), r.n}].push_back(&r);

    std::vector<SummaryRow> rows;
    rows.reserve(groups.size());
    for (auto& [key, recs] : groups) {
        SummaryRow row;
        row.method = recs.front()->method;
        row.n = key.second;
        row.count = recs.size();
        double sum = 0.0;
        double sum_ms = 0.0;
        for (const auto* r : recs) {
            sum += r->standardized_det;
            sum_ms += r->elapsed_ms_select;
        }
        const double m = sum / static_cast<double>(recs.size());
        double ss = 0.0;
        for (const auto* r : recs) {
            const double e = r->standardized_det - m;
            ss += e * e;
        }
        row.mean_det = m;
        row.std_det = std::sqrt(ss / static_cast<double>(recs.size()));
        row.mean_ms = sum_ms / static_cast<double>(recs.size());
        std::vector<double> ms;
        ms.reserve(recs.size());
        for (const auto* r : recs) ms.push_back(r->elapsed_ms_select);
        std::sort(ms.begin(), ms.end());
        row.median_ms = ms[ms.size() / 2];
        rows.push_back(row);
    }
    return rows;
}

std::vector<MseSummaryRow> run_mse_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<MseSummaryRow> rows;
    for (index_t d : cfg.mse_d_list) {
        const CovSpec cov = CovSpec::identity(d);
        for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
            const index_t n = cfg.n_list[ni];
            MseScenario sc;
            sc.family = cfg.family;
            sc.nu = cfg.nu;
            sc.d = d;
            sc.n = n;
            sc.k = cfg.k;
            sc.method = Method::DOpt;
            sc.replicates = cfg.replicates;
            sc.seed = mix64(cfg.seed ^ mix64(d * 1315423911ull + ni));
            sc.sigma_eps = cfg.sigma_eps;
            const MseResult sim = simulate_mse(sc);
            const SlopeCovApprox approx =
                slope_cov_approx(cfg.family, d, cfg.nu, n, cfg.k, cov, cfg.sigma_eps);
            rows.push_back({d, n, approx.per_coord_var, sim.standardized_mse});
        }
    }
    return rows;
}

namespace {

void open_out(std::ofstream& out, const std::string& path) {
    out.open(path);
    if (!out) throw Error(path + ": cannot open for writing");
    out.precision(12);
}

const std::vector<index_t> kFigDims = {1, 2, 5, 10, 50, 1000};

std::vector<double> fig_alpha_grid() {
    std::vector<double> grid;
    for (double a = 0.005; a < 0.9999; a += 0.005) grid.push_back(a);
    return grid;
}

}  // namespace

std::string emit_plot_data(const std::vector<SummaryRow>& summary,
                           const std::vector<MseSummaryRow>& mse_summary,
                           const std::string& figure_id, const std::string& out_dir) {
    const std::string path = out_dir + "/" + figure_id + ".csv";
    std::ofstream out;
    if (figure_id == "fig1") {
        open_out(out, path);
        out << "alpha,m2,d\n";
        for (index_t d : kFigDims)
            for (double a : fig_alpha_grid())
                out << a << ',' << second_moment_normal(d, a) << ',' << d << '\n';
        return path;
    }
    if (figure_id == "fig2") {
        open_out(out, path);
        out << "r,f_design,f_radius\n";
        const double rstar = std::sqrt(chi2_quantile(0.9, 2));
        for (double r = 0.0; r <= 4.0 + 1e-9; r += 0.01) {
            const double fr = 2.0 * r * chi2_density(r * r, 2);
            out << r << ',' << (r >= rstar ? fr : 0.0) << ',' << fr << '\n';
        }
        return path;
    }
    if (figure_id == "fig7") {
        open_out(out, path);
        out << "alpha,eff,d\n";
        for (index_t d : kFigDims)
            for (double a : fig_alpha_grid())
                out << a << ',' << uniform_efficiency(Family::Normal, d, 3.0, a) << ',' << d
                    << '\n';
        return path;
    }
    if (figure_id == "fig3") {
        if (mse_summary.empty()) throw MissingSeries("fig3: no MSE summary");
        open_out(out, path);
        out << "n,approx_mse,sim_mse,d\n";
        for (const auto& r : mse_summary)
            out << r.n << ',' << r.approx_mse << ',' << r.sim_mse << ',' << r.d << '\n';
        return path;
    }
    if (figure_id == "fig4" || figure_id == "fig5" || figure_id == "fig6") {
        if (summary.empty()) throw MissingSeries(figure_id + ": no det summary");
        if (figure_id == "fig6") {
            const bool has_simplified =
                std::any_of(summary.begin(), summary.end(), [](const SummaryRow& r) {
                    return r.method == Method::DOptSimplified;
                });
            if (!has_simplified)
                throw MissingSeries("fig6: summary lacks the dopt-s series");
        }
        open_out(out, path);
        out << "n,method,det\n";
        for (const auto& r : summary)
            out << r.n << ',' << method_name(r.method) << ',' << r.mean_det << '\n';
        return path;
    }
    throw MissingSeries("unknown figure id: " + figure_id);
}

std::string emit_plot_script(const std::vector<std::string>& figure_files,
                             const std::string& out_dir) {
    const std::string path = out_dir + "/plotscript.txt";
    std::ofstream out;
    open_out(out, path);
    out << "# gnuplot script for the emitted figure data\n"
        << "set datafile separator ','\n"
        << "set key outside\n";
    for (const auto& f : figure_files) {
        out << "\nset logscale x\n";
        if (f.find("fig3") != std::string::npos || f.find("fig4") != std::string::npos ||
            f.find("fig5") != std::string::npos || f.find("fig6") != std::string::npos)
            out << "set logscale y\n";
        else
            out << "unset logscale y\n";
        out << "plot '" << f << "' skip 1 using 1:2 with linespoints title '" << f << "'\n";
    }
    return path;
}

void write_records_csv(const std::string& path, const std::vector<ExperimentRecord>& records) {
    std::ofstream out;
    open_out(out, path);
    out << "method,n,replicate_id,standardized_det,elapsed_ms_select,elapsed_ms_total\n";
    for (const auto& r : records)
        out << method_name(r.method) << ',' << r.n << ',' << r.replicate << ','
            << r.standardized_det << ',' << r.elapsed_ms_select << ',' << r.elapsed_ms_total
            << '\n';
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::ofstream out;
    open_out(out, path);
    out << "method,n,V,mean_det,std_det,mean_ms,median_ms\n";
    for (const auto& r : rows)
        out << method_name(r.method) << ',' << r.n << ',' << r.count << ',' << r.mean_det
            << ',' << r.std_det << ',' << r.mean_ms << ',' << r.median_ms << '\n';
}

void write_aggregates_csv(const std::string& path, const std::vector<AggregateRecord>& rows) {
    std::ofstream out;
    open_out(out, path);
    out << "method,n,V,det_of_mean_matrix\n";
    for (const auto& r : rows)
        out << method_name(r.method) << ',' << r.n << ',' << r.count << ','
            << r.det_of_mean_matrix << '\n';
}

void write_mse_csv(const std::string& path, const std::vector<MseSummaryRow>& rows) {
    std::ofstream out;
    open_out(out, path);
    out << "d,n,approx_mse,sim_mse\n";
    for (const auto& r : rows)
        out << r.d << ',' << r.n << ',' << r.approx_mse << ',' << r.sim_mse << '\n';
}

BenchResult bench_complexity(const ExperimentConfig& cfg) {
    if (cfg.n_list.size() < 3) throw ConfigError("bench: need at least 3 sizes in n_list");
    const EllipticalModel model = scenario_model(cfg);
    const CovSpec& cov = model.cov;
    const std::vector<double> unit_variances(cfg.d, 1.0);
    const std::vector<Method> methods = {Method::DOpt, Method::DOptSimplified, Method::Iboss};

    BenchResult bench;
    for (index_t n : cfg.n_list) {
        RngStream rng(cfg.seed, mix64(n));
        const DataMatrix x = sample_covariates(model, n, rng);
        for (Method method : methods) {
            std::vector<double> times;
            for (int rep = 0; rep < 7; ++rep) {
                SubsampleResult sel;
                switch (method) {
                    case Method::DOpt:
                        sel = select_top_k_mahalanobis(x, cov, cfg.k);
                        break;
                    case Method::DOptSimplified:
                        sel = select_top_k_simplified(x, cov.mean, unit_variances, cfg.k);
                        break;
                    default:
                        sel = select_iboss(x, cfg.k);
                        break;
                }
                times.push_back(sel.elapsed_ms);
            }
            std::sort(times.begin(), times.end());
            bench.rows.push_back({method, n, times[times.size() / 2]});
        }
    }

    for (Method method : methods) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        double count = 0.0;
        for (const auto& row : bench.rows) {
            if (row.method != method) continue;
            const double lx = std::log(static_cast<double>(row.n));
            const double ly = std::log(std::max(row.median_select_ms, 1e-6));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            count += 1.0;
        }
        const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
        bench.slopes.emplace_back(method, slope);
    }
    return bench;
}

void write_bench_csv(const std::string& path, const BenchResult& bench) {
    std::ofstream out;
    open_out(out, path);
    out << "method,n,median_select_ms\n";
    for (const auto& r : bench.rows)
        out << method_name(r.method) << ',' << r.n << ',' << r.median_select_ms << '\n';
    out << "# loglog_slopes:";
    for (const auto& [m, s] : bench.slopes) out << ' ' << method_name(m) << '=' << s;
    out << '\n';
}

}  // namespace optsub
