#include "optsub/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "optsub/errors.hpp"

namespace optsub {
namespace {

constexpr int kMaxIter = 200;
constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;

// series expansion of P(a,x), converges fast for x < a+1
double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NonConvergence("gamma_p: series did not converge");
}

// Lentz continued fraction for Q(a,x), x >= a+1
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NonConvergence("gamma_q: continued fraction did not converge");
}

// Lentz continued fraction for the incomplete beta
double beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double md = static_cast<double>(m);
        double aa = md * (b - md) * x / ((qam + 2.0 * md) * (a + 2.0 * md));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + md) * (qab + md) * x / ((a + 2.0 * md) * (qap + 2.0 * md));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) return h;
    }
    throw NonConvergence("beta_i: continued fraction did not converge");
}

// Acklam's rational approximation, accurate to ~1e-9 before refinement
double normal_quantile_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) return -normal_quantile_approx(1.0 - p);
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Safeguarded Newton for an increasing CDF on (0, inf) with cdf(0) = 0.
template <typename Cdf, typename Pdf>
double invert_cdf(double p, double x0, Cdf cdf, Pdf pdf, const char* what) {
    double a = 0.0;
    double b = std::max(x0, 1e-8);
    for (int i = 0; cdf(b) < p; ++i) {
        if (i > 300) throw NonConvergence(what);
        a = b;
        b *= 2.0;
    }
    double x = (x0 > a && x0 < b) ? x0 : 0.5 * (a + b);
    for (int it = 0; it < kMaxIter; ++it) {
        const double err = cdf(x) - p;
        if (std::abs(err) < 1e-13 || (b - a) <= std::abs(x) * kEps + kTiny) return x;
        if (err > 0.0)
            b = x;
        else
            a = x;
        const double deriv = pdf(x);
        if (deriv > 0.0 && std::isfinite(deriv)) {
            const double xn = x - err / deriv;
            x = (xn > a && xn < b) ? xn : 0.5 * (a + b);
        } else {
            x = 0.5 * (a + b);
        }
    }
    if ((b - a) <= std::abs(x) * 1e-10 + kTiny) return x;
    throw NonConvergence(what);
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw InvalidDegrees("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw InvalidDegrees("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double beta_i(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw InvalidDegrees("beta_i: nonpositive shape");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                  a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw Error("normal_quantile: p outside (0,1)");
    double x = normal_quantile_approx(p);
    // two Halley steps against erfc push the error to machine precision
    for (int i = 0; i < 2; ++i) {
        const double e = normal_cdf(x) - p;
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double chi2_density(double w, int d) {
    if (d < 1) throw InvalidDegrees("chi2_density: d < 1");
    if (w < 0.0) return 0.0;
    const double hd = 0.5 * static_cast<double>(d);
    if (w == 0.0) {
        if (d == 1) return std::numeric_limits<double>::max();
        if (d == 2) return 0.5;
        return 0.0;
    }
    return std::exp((hd - 1.0) * std::log(w) - 0.5 * w - hd * std::numbers::ln2 -
                    std::lgamma(hd));
}

double chi2_cdf(double w, int d) {
    if (d < 1) throw InvalidDegrees("chi2_cdf: d < 1");
    if (w <= 0.0) return 0.0;
    return gamma_p(0.5 * static_cast<double>(d), 0.5 * w);
}

double chi2_quantile(double p, int d) {
    if (d < 1) throw InvalidDegrees("chi2_quantile: d < 1");
    if (p <= 0.0 || p >= 1.0) throw Error("chi2_quantile: p outside (0,1)");
    const double dd = static_cast<double>(d);
    // Wilson-Hilferty starting point
    const double z = normal_quantile(p);
    const double t = 1.0 - 2.0 / (9.0 * dd) + z * std::sqrt(2.0 / (9.0 * dd));
    double x0 = dd * t * t * t;
    if (!(x0 > 0.0))
        x0 = 0.5 * dd * std::exp((std::log(p) + std::lgamma(0.5 * dd)) / (0.5 * dd));
    return invert_cdf(
        p, x0, [d](double w) { return chi2_cdf(w, d); },
        [d](double w) { return chi2_density(w, d); }, "chi2_quantile: no convergence");
}

double f_density(double x, double d1, double d2) {
    if (d1 < 1.0 || d2 < 1.0) throw InvalidDegrees("f_density: degrees < 1");
    if (x <= 0.0) return 0.0;
    const double a = 0.5 * d1;
    const double b = 0.5 * d2;
    const double ratio = d1 / d2;
    const double lg = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    return std::exp(lg + a * std::log(ratio) + (a - 1.0) * std::log(x) -
                    (a + b) * std::log1p(ratio * x));
}

double f_cdf(double x, double d1, double d2) {
    if (d1 < 1.0 || d2 < 1.0) throw InvalidDegrees("f_cdf: degrees < 1");
    if (x <= 0.0) return 0.0;
    const double dx = d1 * x;
    return beta_i(0.5 * d1, 0.5 * d2, dx / (dx + d2));
}

double f_quantile(double p, double d1, double d2) {
    if (d1 < 1.0 || d2 < 1.0) throw InvalidDegrees("f_quantile: degrees < 1");
    if (p <= 0.0 || p >= 1.0) throw Error("f_quantile: p outside (0,1)");
    const double x0 = (d2 > 2.0) ? d2 / (d2 - 2.0) : 1.0;
    return invert_cdf(
        p, x0, [d1, d2](double x) { return f_cdf(x, d1, d2); },
        [d1, d2](double x) { return f_density(x, d1, d2); }, "f_quantile: no convergence");
}

}  // namespace optsub
