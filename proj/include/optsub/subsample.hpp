#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "optsub/rng.hpp"
#include "optsub/samplers.hpp"
#include "optsub/types.hpp"

namespace optsub {

enum class Method { DOpt, DOptSimplified, Iboss, Uniform, Leverage, QuantileThreshold, Full };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct SubsampleResult {
    std::vector<index_t> indices;  // sorted ascending, unique
    index_t k_achieved = 0;
    std::optional<std::vector<double>> distances;  // scores of the chosen rows
    double elapsed_ms = 0.0;
    Method method = Method::DOpt;
};

enum class CovSource { Known, Estimated, EstimatedOnPilot };

struct SelectorConfig {
    Method method = Method::DOpt;
    std::optional<index_t> k;
    std::optional<double> alpha;
    CovSource cov_source = CovSource::Estimated;
    std::optional<CovSpec> known_cov;
    std::optional<double> pilot_fraction;  // in (0, 0.5]
    // family of the covariate distribution; only the threshold method
    // needs it (to turn alpha into the quantile q_{1-alpha})
    Family family = Family::Normal;
    double nu = 3.0;
    bool keep_distances = true;
};

/// Algorithm 1: accept row i iff its squared Mahalanobis distance is at
/// least q_threshold. One pass, each decision independent of the rest;
/// the selected count is random with expectation n * alpha at the
/// (1-alpha)-quantile.
SubsampleResult select_quantile_threshold(const DataMatrix& x, const CovSpec& cov,
                                          double q_threshold);

/// Algorithm 2: the k rows of largest Mahalanobis distance, ties broken
/// by lower row index. O(nd) distances for Diagonal/CompoundSymmetry,
/// O(nd^2) for General, plus expected-linear selection.
SubsampleResult select_top_k_mahalanobis(const DataMatrix& x, const CovSpec& cov, index_t k);

/// Algorithm 3: top-k by the variance-only (diagonal) distance.
SubsampleResult select_top_k_simplified(const DataMatrix& x, const std::vector<double>& mean,
                                        const std::vector<double>& variances, index_t k);

/// IBOSS baseline: sweep the covariates in column order, taking the
/// r = floor(k / (2d)) smallest and r largest not-yet-selected rows per
/// column; any remainder is filled round-robin, one extra row per
/// extreme, in the same column order.
SubsampleResult select_iboss(const DataMatrix& x, index_t k);

/// Simple random sample of k rows without replacement.
SubsampleResult select_uniform(const DataMatrix& x, index_t k, RngStream& rng);

/// Top-k by leverage h_i = (d_Sx(x_i, xbar) + 1) / n with moments
/// estimated from X itself; the index set coincides with Mahalanobis
/// selection under estimated moments. Reported scores are the leverages.
SubsampleResult select_top_k_leverage(const DataMatrix& x, index_t k);

/// Dispatch on a SelectorConfig (the CLI entry point). rng feeds the
/// uniform selector and pilot subsampling.
SubsampleResult run_selector(const DataMatrix& x, const SelectorConfig& config,
                             RngStream& rng);

/// Indices of the k largest scores, ties broken by lower index; the
/// returned list is sorted ascending.
std::vector<index_t> top_k_indices(const std::vector<double>& scores, index_t k);

}  // namespace optsub
