#include "pttk/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "pttk/special.hpp"

namespace pttk {

KernelFamily kernel_family_from_string(std::string_view name) {
    if (name == "biharmonic") return KernelFamily::biharmonic;
    if (name == "laplace3d" || name == "laplace-3d") return KernelFamily::laplace3d;
    if (name == "laplace2d" || name == "laplace-2d") return KernelFamily::laplace2d;
    if (name == "thinplate" || name == "thin-plate") return KernelFamily::thinplate;
    if (name == "thinplate-spline" || name == "thin-plate-spline")
        return KernelFamily::thinplate_spline;
    if (name == "squared-exponential" || name == "se") return KernelFamily::squared_exponential;
    if (name == "multiquadric") return KernelFamily::multiquadric;
    if (name == "exponential") return KernelFamily::exponential;
    if (name == "matern") return KernelFamily::matern;
    throw std::invalid_argument("unknown kernel family: " + std::string(name));
}

std::string_view to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::biharmonic: return "biharmonic";
        case KernelFamily::laplace3d: return "laplace3d";
        case KernelFamily::laplace2d: return "laplace2d";
        case KernelFamily::thinplate: return "thinplate";
        case KernelFamily::thinplate_spline: return "thinplate-spline";
        case KernelFamily::squared_exponential: return "squared-exponential";
        case KernelFamily::multiquadric: return "multiquadric";
        case KernelFamily::exponential: return "exponential";
        case KernelFamily::matern: return "matern";
    }
    return "?";
}

Index KernelSpec::theta_arity() const {
    switch (family) {
        case KernelFamily::biharmonic:
        case KernelFamily::laplace3d:
        case KernelFamily::laplace2d:
        case KernelFamily::thinplate:
            return 0;
        case KernelFamily::thinplate_spline:
        case KernelFamily::squared_exponential:
        case KernelFamily::multiquadric:
        case KernelFamily::exponential:
            return fixed_ell ? 0 : 1;
        case KernelFamily::matern:
            return (fixed_ell ? 0 : 1) + (fixed_nu ? 0 : 1);
    }
    return 0;
}

namespace {

[[noreturn]] void singular_at_origin(KernelFamily family) {
    throw std::domain_error(std::string(to_string(family)) + " kernel is singular at r = 0");
}

double matern(double r, double ell, double nu) {
    if (r == 0.0) return 1.0;
    // Kernel-matrix sweeps fix (ell, nu) and vary r; memoize the radius-free
    // constants.
    struct Cache {
        double nu = -1.0;
        double prefactor, sqrt2nu;
    };
    thread_local Cache cache;
    if (nu != cache.nu) {
        cache.nu = nu;
        cache.prefactor = std::pow(2.0, 1.0 - nu) / std::tgamma(nu);
        cache.sqrt2nu = std::sqrt(2.0 * nu);
    }
    const double z = cache.sqrt2nu * r / ell;
    return cache.prefactor * std::pow(z, nu) * bessel_k(nu, z);
}

} // namespace

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y,
                   std::span<const double> theta) {
    if (x.size() != y.size()) throw std::invalid_argument("kernel_eval: dimension mismatch");
    if (static_cast<Index>(theta.size()) != spec.theta_arity())
        throw std::invalid_argument("kernel_eval: wrong number of parameters");

    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        r2 += diff * diff;
    }
    const double r = std::sqrt(r2);

    std::size_t next = 0;
    auto ell = [&]() { return spec.fixed_ell ? *spec.fixed_ell : theta[next++]; };

    switch (spec.family) {
        case KernelFamily::biharmonic:
            if (r == 0.0) singular_at_origin(spec.family);
            return 1.0 / r2;
        case KernelFamily::laplace3d:
            if (r == 0.0) singular_at_origin(spec.family);
            return 1.0 / r;
        case KernelFamily::laplace2d:
            if (r == 0.0) singular_at_origin(spec.family);
            return -std::log(r);
        case KernelFamily::thinplate:
            return r == 0.0 ? 0.0 : r2 * std::log(r);
        case KernelFamily::thinplate_spline: {
            const double l = ell();
            if (r == 0.0) return 0.0; // limit of t log t as t -> 0
            const double t = r2 / (l * l);
            return t * std::log(t);
        }
        case KernelFamily::squared_exponential: {
            const double l = ell();
            return std::exp(-(r / l) * (r / l));
        }
        case KernelFamily::multiquadric: {
            const double l = ell();
            return std::sqrt(1.0 + (r / l) * (r / l));
        }
        case KernelFamily::exponential: {
            const double l = ell();
            return std::exp(-r / l);
        }
        case KernelFamily::matern: {
            const double l = ell();
            const double nu = spec.fixed_nu ? *spec.fixed_nu : theta[next++];
            return matern(r, l, nu);
        }
    }
    throw std::logic_error("kernel_eval: unreachable");
}

std::vector<Interval> ProblemGeometry::ordered_intervals() const {
    std::vector<Interval> out;
    out.reserve(static_cast<std::size_t>(dims()));
    out.insert(out.end(), source_box.begin(), source_box.end());
    out.insert(out.end(), theta_box.begin(), theta_box.end());
    out.insert(out.end(), target_box.begin(), target_box.end());
    return out;
}

double box_distance(const std::vector<Interval>& bs, const std::vector<Interval>& bt) {
    if (bs.size() != bt.size()) throw std::invalid_argument("box_distance: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < bs.size(); ++i) {
        const double gap = std::max({0.0, bs[i].lo - bt[i].hi, bt[i].lo - bs[i].hi});
        d2 += gap * gap;
    }
    return std::sqrt(d2);
}

KernelOracle::KernelOracle(KernelSpec spec, ProblemGeometry geom)
    : spec_(spec), geom_(std::move(geom)) {
    if (spec_.theta_arity() != geom_.d_theta)
        throw std::invalid_argument("KernelOracle: kernel arity does not match d_theta");
    if (static_cast<Index>(geom_.source_box.size()) != geom_.d ||
        static_cast<Index>(geom_.target_box.size()) != geom_.d ||
        static_cast<Index>(geom_.theta_box.size()) != geom_.d_theta)
        throw std::invalid_argument("KernelOracle: box sizes inconsistent with dimensions");
}

KernelOracle::KernelOracle(KernelSpec spec, ProblemGeometry geom, Fn fn)
    : KernelOracle(spec, std::move(geom)) {
    fn_ = std::move(fn);
}

double KernelOracle::eval(std::span<const double> x, std::span<const double> y,
                          std::span<const double> theta) const {
    count_.fetch_add(1, std::memory_order_relaxed);
    if (fn_) return fn_(x, y, theta);
    return kernel_eval(spec_, x, y, theta);
}

double KernelOracle::f_kappa(std::span<const double> xi) const {
    const Index d = geom_.d, dt = geom_.d_theta;
    if (static_cast<Index>(xi.size()) != geom_.dims())
        throw std::invalid_argument("f_kappa: xi must have 2d + d_theta entries");
    for (Index i = 0; i < d; ++i)
        if (!contains(geom_.source_box[static_cast<std::size_t>(i)], xi[static_cast<std::size_t>(i)]))
            throw std::invalid_argument("f_kappa: x outside source box");
    for (Index i = 0; i < dt; ++i)
        if (!contains(geom_.theta_box[static_cast<std::size_t>(i)], xi[static_cast<std::size_t>(d + i)]))
            throw std::invalid_argument("f_kappa: theta outside parameter box");
    for (Index i = 0; i < d; ++i)
        if (!contains(geom_.target_box[static_cast<std::size_t>(i)], xi[static_cast<std::size_t>(d + dt + i)]))
            throw std::invalid_argument("f_kappa: y outside target box");
    return eval(xi.subspan(0, static_cast<std::size_t>(d)),
                xi.subspan(static_cast<std::size_t>(d + dt), static_cast<std::size_t>(d)),
                xi.subspan(static_cast<std::size_t>(d), static_cast<std::size_t>(dt)));
}

double coefficient_entry(const KernelOracle& oracle, const ChebyshevGrid& grid,
                         std::span<const Index> idx) {
    const Index dims = grid.dims();
    if (static_cast<Index>(idx.size()) != dims)
        throw std::invalid_argument("coefficient_entry: index arity mismatch");
    double xi[16];
    if (dims > 16) throw std::invalid_argument("coefficient_entry: too many dimensions");
    for (Index j = 0; j < dims; ++j) xi[j] = grid.node(j, idx[static_cast<std::size_t>(j)]);
    return oracle.f_kappa(std::span<const double>(xi, static_cast<std::size_t>(dims)));
}

} // namespace pttk
