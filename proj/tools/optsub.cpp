// optsub: D-optimal subsampling toolkit.
//   theory    closed-form design quantities over (d, alpha) grids
//   select    subsample a CSV data set
//   simulate  run a simulation campaign from a config file
//   bench     selection-phase timing across data sizes

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "optsub/csv.hpp"
#include "optsub/design.hpp"
#include "optsub/harness.hpp"
#include "optsub/linalg.hpp"
#include "optsub/subsample.hpp"

namespace {

using namespace optsub;

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

Family parse_family(const std::string& name) {
    if (name == "normal") return Family::Normal;
    if (name == "t" || name == "student-t") return Family::StudentT;
    throw ConfigError("family must be normal or t");
}

int cmd_theory(const std::string& d_list, const std::string& alpha_list,
               const std::string& family_name, double nu, std::uint64_t n,
               const std::string& output) {
    const Family family = parse_family(family_name);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!output.empty()) {
        file.open(output);
        if (!file) throw Error(output + ": cannot open for writing");
        out = &file;
    }
    out->precision(12);
    *out << "d,alpha,q,m2,eff_unif,approx_var\n";
    for (const std::string& ds : split_commas(d_list)) {
        const index_t d = std::stoull(ds);
        for (const std::string& as : split_commas(alpha_list)) {
            const double alpha = std::stod(as);
            const double q = optimal_threshold(family, d, nu, alpha);
            const double m2 = second_moment(family, d, nu, alpha);
            const double eff = uniform_efficiency(family, d, nu, alpha);
            const index_t k = static_cast<index_t>(alpha * static_cast<double>(n));
            const SlopeCovApprox approx =
                slope_cov_approx(family, d, nu, n, std::max<index_t>(k, 1),
                                 CovSpec::identity(d));
            *out << d << ',' << alpha << ',' << q << ',' << m2 << ',' << eff << ','
                 << approx.per_coord_var << '\n';
        }
    }
    return 0;
}

int cmd_select(const std::string& input, const std::string& method_name_arg,
               std::int64_t k, double alpha, const std::string& cov_arg,
               std::uint64_t seed, const std::string& family_name, double nu,
               const std::string& output) {
    SelectorConfig config;
    config.method = method_from_name(method_name_arg);
    if (k >= 0) config.k = static_cast<index_t>(k);
    if (alpha >= 0.0) config.alpha = alpha;
    if (!config.k && !config.alpha) throw ConfigError("select: need --k or --alpha");
    if (config.k && config.alpha) throw ConfigError("select: give only one of --k, --alpha");
    config.family = parse_family(family_name);
    config.nu = nu;

    if (cov_arg == "estimated") {
        config.cov_source = CovSource::Estimated;
    } else if (cov_arg.rfind("known:", 0) == 0) {
        config.cov_source = CovSource::Known;
        config.known_cov = read_covspec_csv(cov_arg.substr(6));
    } else if (cov_arg.rfind("pilot:", 0) == 0) {
        config.cov_source = CovSource::EstimatedOnPilot;
        config.pilot_fraction = std::stod(cov_arg.substr(6));
    } else {
        throw ConfigError("select: --cov must be known:FILE, estimated, or pilot:FRAC");
    }

    const DataMatrix x = read_data_csv(input);
    RngStream rng(seed, 0);
    const SubsampleResult result = run_selector(x, config, rng);

    std::ofstream out(output);
    if (!out) throw Error(output + ": cannot open for writing");
    out.precision(6);
    out << "# method=" << method_name(result.method) << " k_achieved=" << result.k_achieved
        << " elapsed_ms=" << std::fixed << result.elapsed_ms << "\n";
    for (index_t i : result.indices) out << i << '\n';
    std::cout << "selected " << result.k_achieved << " of " << x.n << " rows in "
              << result.elapsed_ms << " ms -> " << output << "\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> figures;
    // closed-form figures come along for free
    std::vector<SummaryRow> no_summary;
    std::vector<MseSummaryRow> no_mse;
    figures.push_back(emit_plot_data(no_summary, no_mse, "fig1", out_dir));
    figures.push_back(emit_plot_data(no_summary, no_mse, "fig2", out_dir));
    figures.push_back(emit_plot_data(no_summary, no_mse, "fig7", out_dir));

    if (cfg.mode == "mse") {
        const std::vector<MseSummaryRow> mse = run_mse_experiment(cfg);
        write_mse_csv(out_dir + "/mse.csv", mse);
        figures.push_back(emit_plot_data(no_summary, mse, "fig3", out_dir));
    } else {
        const ExperimentResult result = run_experiment(cfg);
        const std::vector<SummaryRow> summary = summarize(result.records);
        write_records_csv(out_dir + "/records.csv", result.records);
        write_summary_csv(out_dir + "/summary.csv", summary);
        write_aggregates_csv(out_dir + "/detmean.csv", result.aggregates);
        const std::string fig = cfg.family == Family::Normal ? "fig4" : "fig5";
        figures.push_back(emit_plot_data(summary, no_mse, fig, out_dir));
        const bool has_simplified = std::any_of(
            cfg.methods.begin(), cfg.methods.end(),
            [](Method m) { return m == Method::DOptSimplified; });
        if (cfg.family == Family::Normal && has_simplified)
            figures.push_back(emit_plot_data(summary, no_mse, "fig6", out_dir));
    }
    emit_plot_script(figures, out_dir);
    std::cout << "wrote " << figures.size() << " figure files to " << out_dir << "\n";
    return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir) {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ExperimentConfig::from_file(config_path);
    std::filesystem::create_directories(out_dir);
    const BenchResult bench = bench_complexity(cfg);
    write_bench_csv(out_dir + "/bench.csv", bench);
    std::ofstream fig(out_dir + "/fig8.csv");
    fig << "method,n,median_select_ms\n";
    fig.precision(6);
    for (const auto& r : bench.rows)
        fig << method_name(r.method) << ',' << r.n << ',' << r.median_select_ms << '\n';
    for (const auto& [m, slope] : bench.slopes)
        std::cout << method_name(m) << " log-log slope: " << slope << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"D-optimal subsampling for multiple linear regression"};
    app.require_subcommand(1);

    auto* theory = app.add_subcommand("theory", "closed-form design quantities");
    std::string d_list = "1,2,5,10,50,1000";
    std::string alpha_list = "0.001,0.01,0.1,0.5";
    std::string family = "normal";
    double nu = 3.0;
    std::uint64_t theory_n = 1000000;
    std::string theory_out;
    theory->add_option("--d-list", d_list, "comma-separated dimensions");
    theory->add_option("--alpha-list", alpha_list, "comma-separated proportions");
    theory->add_option("--family", family, "normal or t");
    theory->add_option("--nu", nu, "t degrees of freedom");
    theory->add_option("--n", theory_n, "full-data size for approx_var");
    theory->add_option("--output", theory_out, "output CSV (default stdout)");

    auto* select = app.add_subcommand("select", "subsample a CSV data set");
    std::string input, output = "indices.csv", method = "dopt", cov = "estimated";
    std::int64_t k = -1;
    double alpha = -1.0;
    std::uint64_t seed = 1;
    std::string sel_family = "normal";
    double sel_nu = 3.0;
    select->add_option("--input", input, "input data CSV")->required();
    select->add_option("--method", method, "dopt, dopt-s, iboss, unif, leverage, threshold");
    select->add_option("--k", k, "subsample size");
    select->add_option("--alpha", alpha, "subsample proportion");
    select->add_option("--cov", cov, "known:FILE, estimated, or pilot:FRAC");
    select->add_option("--seed", seed, "rng seed");
    select->add_option("--family", sel_family, "covariate family for threshold method");
    select->add_option("--nu", sel_nu, "t degrees of freedom");
    select->add_option("--output", output, "indices output file");

    auto* simulate = app.add_subcommand("simulate", "run a simulation campaign");
    std::string sim_config, sim_out = "out";
    simulate->add_option("--config", sim_config, "key=value config file")->required();
    simulate->add_option("--out", sim_out, "output directory");

    auto* bench = app.add_subcommand("bench", "selection-phase timing");
    std::string bench_config, bench_out = "out";
    bench->add_option("--config", bench_config, "key=value config file");
    bench->add_option("--out", bench_out, "output directory");

    try {
        app.parse(argc, argv);
        if (theory->parsed())
            return cmd_theory(d_list, alpha_list, family, nu, theory_n, theory_out);
        if (select->parsed())
            return cmd_select(input, method, k, alpha, cov, seed, sel_family, sel_nu, output);
        if (simulate->parsed()) return cmd_simulate(sim_config, sim_out);
        if (bench->parsed()) return cmd_bench(bench_config, bench_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const optsub::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const optsub::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const optsub::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
