#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pttk/chebyshev.hpp"
#include "pttk/tensor.hpp"

namespace pttk {

enum class KernelFamily {
    biharmonic,
    laplace3d,
    laplace2d,
    thinplate,
    thinplate_spline,
    squared_exponential,
    multiquadric,
    exponential,
    matern,
};

KernelFamily kernel_family_from_string(std::string_view name);
std::string_view to_string(KernelFamily family);

/// Kernel family plus optionally pinned hyperparameters. The free parameters,
/// in order, are (ell) for the length-scale families and (ell, nu) for
/// Matern; pinning a parameter removes it from theta. biharmonic, laplace and
/// thinplate take no parameters at all.
struct KernelSpec {
    KernelFamily family = KernelFamily::squared_exponential;
    std::optional<double> fixed_ell;
    std::optional<double> fixed_nu; // matern only

    /// Number of free parameters d_theta implied by the family and pins.
    Index theta_arity() const;
};

/// kappa(x, y; theta) per the kernel table, r = |x - y|_2. The Matern
/// prefactor uses Gamma(nu). Families singular at r = 0 (biharmonic,
/// laplace3d, laplace2d) throw std::domain_error naming the family; the two
/// thin-plate forms return the limit 0 there.
double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y,
                   std::span<const double> theta);

struct ProblemGeometry {
    Index d = 0;
    Index d_theta = 0;
    std::vector<Interval> source_box; // d intervals
    std::vector<Interval> target_box; // d intervals
    std::vector<Interval> theta_box;  // d_theta intervals

    Index dims() const { return 2 * d + d_theta; }
    /// Concatenation (source, theta, target) — the interval order of the grid.
    std::vector<Interval> ordered_intervals() const;
};

/// min_{x in Bs, y in Bt} |x - y|_2 (coordinatewise interval gaps); zero iff
/// the boxes intersect.
double box_distance(const std::vector<Interval>& bs, const std::vector<Interval>& bt);

/// Kernel function with its geometry and the D-variate view
/// f_kappa(xi) = kappa(x, y; theta) for xi = (x, theta, y); the variable
/// ordering is what makes the downstream factorization separable.
/// Evaluations increment an atomic counter, so one oracle may be shared by
/// concurrent sweeps.
class KernelOracle {
public:
    using Fn = std::function<double(std::span<const double>, std::span<const double>,
                                    std::span<const double>)>;

    KernelOracle(KernelSpec spec, ProblemGeometry geom);

    /// Overrides the kernel function (tests and extensions); spec/geometry
    /// keep providing the bookkeeping.
    KernelOracle(KernelSpec spec, ProblemGeometry geom, Fn fn);

    KernelOracle(const KernelOracle& other)
        : spec_(other.spec_), geom_(other.geom_), fn_(other.fn_),
          count_(other.count_.load(std::memory_order_relaxed)) {}
    KernelOracle(KernelOracle&& other) noexcept
        : spec_(std::move(other.spec_)), geom_(std::move(other.geom_)), fn_(std::move(other.fn_)),
          count_(other.count_.load(std::memory_order_relaxed)) {}

    double eval(std::span<const double> x, std::span<const double> y,
                std::span<const double> theta) const;

    /// xi ordered (x, theta, y); each coordinate must lie in its box up to
    /// the containment tolerance.
    double f_kappa(std::span<const double> xi) const;

    std::uint64_t evaluation_count() const { return count_.load(std::memory_order_relaxed); }
    void reset_evaluation_count() const { count_.store(0, std::memory_order_relaxed); }

    const KernelSpec& spec() const { return spec_; }
    const ProblemGeometry& geometry() const { return geom_; }

private:
    KernelSpec spec_;
    ProblemGeometry geom_;
    Fn fn_;
    mutable std::atomic<std::uint64_t> count_{0};
};

/// Entry m_{i_1..i_D} = f_kappa at the grid node tuple (0-based indices).
/// This is the entry function handed to the cross approximation, so the
/// coefficient tensor is never materialized.
double coefficient_entry(const KernelOracle& oracle, const ChebyshevGrid& grid,
                         std::span<const Index> idx);

} // namespace pttk
