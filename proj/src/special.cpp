#include "pttk/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pttk {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIt = 20000;
constexpr double kEulerGamma = 0.57721566490153286061;

// Coefficients of 1/Gamma(1+u) = 1 + a1 u + a2 u^2 + a3 u^3 + ...
constexpr double kA1 = kEulerGamma;
constexpr double kA3 = -0.04200263503409523553; // gamma^3/6 - gamma*pi^2/12 + zeta(3)/3

// gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), continuous at mu = 0;
// gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2. Memoized on mu: kernel sweeps
// evaluate many radii at one order.
void gamma_pair(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
    struct Cache {
        double mu = std::numeric_limits<double>::quiet_NaN();
        double gam1, gam2, gampl, gammi;
    };
    thread_local Cache cache;
    if (mu != cache.mu) {
        cache.mu = mu;
        cache.gampl = 1.0 / std::tgamma(1.0 + mu);
        cache.gammi = 1.0 / std::tgamma(1.0 - mu);
        if (std::abs(mu) < 1e-5)
            cache.gam1 = -(kA1 + kA3 * mu * mu);
        else
            cache.gam1 = (cache.gammi - cache.gampl) / (2.0 * mu);
        cache.gam2 = 0.5 * (cache.gammi + cache.gampl);
    }
    gam1 = cache.gam1;
    gam2 = cache.gam2;
    gampl = cache.gampl;
    gammi = cache.gammi;
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, 0 < x <= 2 (Temme's series).
void k_temme(double x, double mu, double& kmu, double& kmu1) {
    const double x2 = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fact = (std::abs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = (std::abs(e) < kEps) ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    gamma_pair(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    const double mu2 = mu * mu;
    for (int i = 1; i <= kMaxIt; ++i) {
        ff = (i * ff + p + q) / (i * i - mu2);
        c *= d / i;
        p /= (i - mu);
        q /= (i + mu);
        const double del = c * ff;
        sum += del;
        const double del1 = c * (p - i * ff);
        sum1 += del1;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    kmu = sum;
    kmu1 = sum1 * 2.0 / x;
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, x > 2 (Thompson-Barnett CF2).
void k_cf2(double x, double mu, double& kmu, double& kmu1) {
    const double mu2 = mu * mu;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= kMaxIt; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    h = a1 * h;
    kmu = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
    kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

} // namespace

double bessel_k(double nu, double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k: requires x > 0");
    nu = std::abs(nu); // K_{-nu} = K_{nu}

    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl; // in [-1/2, 1/2]

    if (x > 705.0) return 0.0; // exp(-x) underflows well before the prefactor matters

    double kmu, kmu1;
    if (x <= 2.0)
        k_temme(x, mu, kmu, kmu1);
    else
        k_cf2(x, mu, kmu, kmu1);

    // Upward recurrence K_{m+1}(x) = 2 m / x * K_m(x) + K_{m-1}(x).
    const double xi2 = 2.0 / x;
    for (int l = 1; l <= nl; ++l) {
        const double knext = (mu + l) * xi2 * kmu1 + kmu;
        kmu = kmu1;
        kmu1 = knext;
    }
    return kmu;
}

} // namespace pttk
