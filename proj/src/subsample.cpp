#include "optsub/subsample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "optsub/design.hpp"
#include "optsub/linalg.hpp"

namespace optsub {
namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point start) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

std::vector<double> gather(const std::vector<double>& values,
                           const std::vector<index_t>& indices) {
    std::vector<double> out;
    out.reserve(indices.size());
    for (index_t i : indices) out.push_back(values[i]);
    return out;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::DOpt: return "dopt";
        case Method::DOptSimplified: return "dopt-s";
        case Method::Iboss: return "iboss";
        case Method::Uniform: return "unif";
        case Method::Leverage: return "leverage";
        case Method::QuantileThreshold: return "threshold";
        case Method::Full: return "full";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "dopt") return Method::DOpt;
    if (name == "dopt-s") return Method::DOptSimplified;
    if (name == "iboss") return Method::Iboss;
    if (name == "unif") return Method::Uniform;
    if (name == "leverage") return Method::Leverage;
    if (name == "threshold") return Method::QuantileThreshold;
    if (name == "full") return Method::Full;
    throw ConfigError("unknown method: " + name);
}

std::vector<index_t> top_k_indices(const std::vector<double>& scores, index_t k) {
    const index_t n = scores.size();
    if (k > n) throw KLargerThanN("top_k_indices: k > n");
    std::vector<index_t> order(n);
    std::iota(order.begin(), order.end(), index_t{0});
    const auto better = [&scores](index_t a, index_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    };
    if (k < n) std::nth_element(order.begin(), order.begin() + k, order.end(), better);
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

SubsampleResult select_quantile_threshold(const DataMatrix& x, const CovSpec& cov,
                                          double q_threshold) {
    const auto start = clock_type::now();
    const std::vector<double> dist = mahalanobis_all(x, cov);
    SubsampleResult res;
    res.method = Method::QuantileThreshold;
    std::vector<double> chosen;
    for (index_t i = 0; i < x.n; ++i) {
        if (dist[i] >= q_threshold) {
            res.indices.push_back(i);
            chosen.push_back(dist[i]);
        }
    }
    res.k_achieved = res.indices.size();
    res.distances = std::move(chosen);
    res.elapsed_ms = ms_since(start);
    return res;
}

SubsampleResult select_top_k_mahalanobis(const DataMatrix& x, const CovSpec& cov, index_t k) {
    if (k > x.n) throw KLargerThanN("select_top_k_mahalanobis: k > n");
    const auto start = clock_type::now();
    const std::vector<double> dist = mahalanobis_all(x, cov);
    SubsampleResult res;
    res.method = Method::DOpt;
    res.indices = top_k_indices(dist, k);
    res.k_achieved = k;
    res.distances = gather(dist, res.indices);
    res.elapsed_ms = ms_since(start);
    return res;
}

SubsampleResult select_top_k_simplified(const DataMatrix& x, const std::vector<double>& mean,
                                        const std::vector<double>& variances, index_t k) {
    if (k > x.n) throw KLargerThanN("select_top_k_simplified: k > n");
    const auto start = clock_type::now();
    const std::vector<double> dist = simplified_distance_all(x, mean, variances);
    SubsampleResult res;
    res.method = Method::DOptSimplified;
    res.indices = top_k_indices(dist, k);
    res.k_achieved = k;
    res.distances = gather(dist, res.indices);
    res.elapsed_ms = ms_since(start);
    return res;
}

SubsampleResult select_iboss(const DataMatrix& x, index_t k) {
    const index_t n = x.n;
    const index_t d = x.d;
    if (k > n) throw KLargerThanN("select_iboss: k > n");
    if (k < 2 * d) throw KTooSmall("select_iboss: k < 2d");
    const auto start = clock_type::now();

    const index_t r = k / (2 * d);
    std::vector<char> taken(n, 0);
    index_t remaining = k;

    // (value, index) pairs per column among the not-yet-selected rows;
    // lower index wins ties at either extreme
    std::vector<std::pair<double, index_t>> col;
    col.reserve(n);
    const auto take_extremes = [&](index_t j, index_t lo_count, index_t hi_count) {
        col.clear();
        for (index_t i = 0; i < n; ++i)
            if (!taken[i]) col.emplace_back(x.values[i * d + j], i);
        const index_t m = col.size();
        lo_count = std::min<index_t>(lo_count, std::min(m, remaining));
        if (lo_count > 0) {
            std::nth_element(col.begin(), col.begin() + (lo_count - 1), col.end(),
                             [](const auto& a, const auto& b) {
                                 if (a.first != b.first) return a.first < b.first;
                                 return a.second < b.second;
                             });
            for (index_t t = 0; t < lo_count; ++t) taken[col[t].second] = 1;
            remaining -= lo_count;
        }
        col.clear();
        for (index_t i = 0; i < n; ++i)
            if (!taken[i]) col.emplace_back(x.values[i * d + j], i);
        const index_t m2 = col.size();
        hi_count = std::min<index_t>(hi_count, std::min(m2, remaining));
        if (hi_count > 0) {
            std::nth_element(col.begin(), col.begin() + (hi_count - 1), col.end(),
                             [](const auto& a, const auto& b) {
                                 if (a.first != b.first) return a.first > b.first;
                                 return a.second < b.second;
                             });
            for (index_t t = 0; t < hi_count; ++t) taken[col[t].second] = 1;
            remaining -= hi_count;
        }
    };

    for (index_t j = 0; j < d && remaining > 0; ++j) take_extremes(j, r, r);
    // remainder: one extra row per extreme, cycling through the columns
    while (remaining > 0) {
        const index_t before = remaining;
        for (index_t j = 0; j < d && remaining > 0; ++j) take_extremes(j, 1, 1);
        if (remaining == before) break;  // fewer than k distinct rows available
    }

    SubsampleResult res;
    res.method = Method::Iboss;
    for (index_t i = 0; i < n; ++i)
        if (taken[i]) res.indices.push_back(i);
    res.k_achieved = res.indices.size();
    res.elapsed_ms = ms_since(start);
    return res;
}

SubsampleResult select_uniform(const DataMatrix& x, index_t k, RngStream& rng) {
    const index_t n = x.n;
    if (k > n) throw KLargerThanN("select_uniform: k > n");
    const auto start = clock_type::now();
    std::vector<index_t> pool(n);
    std::iota(pool.begin(), pool.end(), index_t{0});
    for (index_t i = 0; i < k; ++i) {
        const index_t j = i + rng.next_below(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    SubsampleResult res;
    res.method = Method::Uniform;
    res.indices = std::move(pool);
    res.k_achieved = k;
    res.elapsed_ms = ms_since(start);
    return res;
}

SubsampleResult select_top_k_leverage(const DataMatrix& x, index_t k) {
    if (k > x.n) throw KLargerThanN("select_top_k_leverage: k > n");
    const auto start = clock_type::now();
    auto [mean, cov] = streaming_moments(x);
    CovSpec spec = CovSpec::general(std::move(mean), std::move(cov));
    std::vector<double> dist;
    try {
        dist = mahalanobis_all(x, spec);
    } catch (const NotPositiveDefinite&) {
        throw SingularInformation("select_top_k_leverage: empirical dispersion singular");
    }
    SubsampleResult res;
    res.method = Method::Leverage;
    res.indices = top_k_indices(dist, k);
    res.k_achieved = k;
    // leverage via the closed identity, never the n x n hat matrix
    std::vector<double> lev;
    lev.reserve(k);
    const double inv_n = 1.0 / static_cast<double>(x.n);
    for (index_t i : res.indices) lev.push_back((dist[i] + 1.0) * inv_n);
    res.distances = std::move(lev);
    res.elapsed_ms = ms_since(start);
    return res;
}

namespace {

index_t pilot_size(const DataMatrix& x, const SelectorConfig& config) {
    index_t rows;
    if (config.pilot_fraction) {
        const double f = *config.pilot_fraction;
        if (!(f > 0.0 && f <= 0.5)) throw ConfigError("pilot fraction outside (0, 0.5]");
        rows = static_cast<index_t>(std::ceil(f * static_cast<double>(x.n)));
    } else {
        rows = std::max<index_t>(10 * x.d * x.d, 1000);
    }
    return std::min(std::max<index_t>(rows, 2), x.n);
}

std::pair<std::vector<double>, std::vector<double>> moments_for(
    const DataMatrix& x, const SelectorConfig& config, RngStream& rng) {
    if (config.cov_source == CovSource::EstimatedOnPilot) {
        const SubsampleResult pilot = select_uniform(x, pilot_size(x, config), rng);
        MomentAccumulator acc(x.d);
        for (index_t i : pilot.indices) acc.add_rows(x.row(i), 1);
        return {acc.mean(), acc.covariance()};
    }
    return streaming_moments(x);
}

}  // namespace

SubsampleResult run_selector(const DataMatrix& x, const SelectorConfig& config,
                             RngStream& rng) {
    const auto need_k = [&]() -> index_t {
        if (config.k) return *config.k;
        if (config.alpha)
            return static_cast<index_t>(static_cast<double>(x.n) * *config.alpha);
        throw ConfigError("selector needs k or alpha");
    };

    switch (config.method) {
        case Method::Full: {
            SubsampleResult res;
            res.method = Method::Full;
            res.indices.resize(x.n);
            std::iota(res.indices.begin(), res.indices.end(), index_t{0});
            res.k_achieved = x.n;
            return res;
        }
        case Method::Uniform:
            return select_uniform(x, need_k(), rng);
        case Method::Iboss:
            return select_iboss(x, need_k());
        case Method::Leverage:
            return select_top_k_leverage(x, need_k());
        case Method::DOpt: {
            if (config.cov_source == CovSource::Known) {
                if (!config.known_cov) throw ConfigError("dopt: known cov missing");
                return select_top_k_mahalanobis(x, *config.known_cov, need_k());
            }
            auto [mean, cov] = moments_for(x, config, rng);
            return select_top_k_mahalanobis(
                x, CovSpec::general(std::move(mean), std::move(cov)), need_k());
        }
        case Method::DOptSimplified: {
            std::vector<double> mean, variances;
            if (config.cov_source == CovSource::Known) {
                if (!config.known_cov) throw ConfigError("dopt-s: known cov missing");
                mean = config.known_cov->mean;
                const index_t d = config.known_cov->dim();
                variances.resize(d);
                for (index_t j = 0; j < d; ++j)
                    variances[j] = config.known_cov->dispersion[j * d + j];
            } else {
                auto [m, cov] = moments_for(x, config, rng);
                mean = std::move(m);
                variances.resize(x.d);
                for (index_t j = 0; j < x.d; ++j) variances[j] = cov[j * x.d + j];
            }
            return select_top_k_simplified(x, mean, variances, need_k());
        }
        case Method::QuantileThreshold: {
            if (!config.alpha) throw ConfigError("threshold: alpha required");
            const double q = optimal_threshold(config.family, x.d, config.nu, *config.alpha);
            if (config.cov_source == CovSource::Known) {
                if (!config.known_cov) throw ConfigError("threshold: known cov missing");
                return select_quantile_threshold(x, *config.known_cov, q);
            }
            auto [mean, cov] = moments_for(x, config, rng);
            return select_quantile_threshold(
                x, CovSpec::general(std::move(mean), std::move(cov)), q);
        }
    }
    throw ConfigError("run_selector: unhandled method");
}

}  // namespace optsub
