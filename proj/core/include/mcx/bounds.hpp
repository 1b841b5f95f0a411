#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcx/matrix.hpp"

namespace mcx {

/// Closed-form tail and mean bounds produced by one concentration result.
/// Raw formulas are kept audit-clean; probabilities are clamped to [0, 1]
/// only at the query boundary.
struct BoundSet {
    std::string provenance;
    int dimension = 1;
    double mean_upper = 0.0;
    std::optional<double> mean_lower;
    std::function<double(double)> tail_upper_raw;                 // P(lambda_max >= t)
    std::optional<std::function<double(double)>> tail_lower_raw;  // P(lambda_min <= -t)

    double tail_upper(double t) const;
    double tail_lower(double t) const;
};

/// Scalar summaries consumed by the bound calculators.
struct VarianceSummary {
    double sigma2 = 0.0;  // variance proxy
    double R = 0.0;       // uniform norm bound on summands
    double c = 0.0;
    double v = 0.0;
    double r_of_psi = 0.0;
    double psi = 1.0;
};

/// Concentration under Delta_X <= c X + v I.
BoundSet bounded_concentration(double c, double v, int d);

/// Refined concentration in terms of r(psi).
BoundSet refined_concentration(double r, double psi, int d);

/// Positive root of r theta / (1 - theta^2 / psi) = t.
double theta_star(double t, double psi, double r);

/// Matrix Hoeffding: sigma^2 = ||sum(A_k^2 + E Y_k^2)|| / 2.
std::pair<double, BoundSet> hoeffding(const std::vector<HermitianMatrix>& bounds_sq,
                                      const std::vector<HermitianMatrix>& second_moments);

/// Matrix Bernstein for a uniformly bounded independent sum.
BoundSet bernstein(double sigma2, double R, int d);

/// Bernstein for rectangular summands via the Hermitian dilation.
BoundSet rectangular_bernstein(double row_var, double col_var, double R, int d1, int d2);

/// Chebyshev tail from supplied Schatten moments E||X||_p^p.
double chebyshev_tail(const std::map<double, double>& moments, double t);

/// BDG moment bound: sqrt(2p-1) * (E||Delta_X||_p^p)^(1/2p).  The range
/// 1 < p < 1.5 is rejected unless allow_weak_range is set, in which case the
/// constant degrades to sqrt(4p-2).
double bdg_bound(double p, double delta_moment, bool allow_weak_range = false);

/// Matrix Khintchine.  Pure Rademacher form when second_moment_sum is absent.
double khintchine(double p, const HermitianMatrix& coeff_squares_sum,
                  const std::optional<HermitianMatrix>& second_moment_sum = std::nullopt,
                  bool allow_weak_range = false);

/// Rosenthal for an independent sum of psd matrices (2p-th Schatten moment).
double rosenthal_psd(double p, double mean_norm, double summand_moments,
                     bool allow_weak_range = false);

/// Rosenthal for centered Hermitian summands (4p-th Schatten moment).
double rosenthal_hermitian(double p, double variance_norm, double summand_moments,
                           bool allow_weak_range = false);

/// Bernstein-type bound for a combinatorial sum; returns (sigma2, R, bounds).
struct CombinatorialBernstein {
    double sigma2;
    double R;
    BoundSet bounds;
};
CombinatorialBernstein combinatorial_bernstein(
    const std::vector<std::vector<HermitianMatrix>>& a, int d);

/// Bounded differences for self-reproducing matrix functions.
BoundSet bounded_differences(double s, double L, int d);

/// Trace-mgf estimates under Delta_X <= c X + v I; returns the tight form,
/// with the looser quadratic form also exposed.
struct MgfBound {
    double tight;
    double loose;
};
MgfBound mgf_bound_bounded(double c, double v, double theta);

/// r(psi)-controlled mgf bound, valid on 0 <= theta < sqrt(psi).
double mgf_bound_refined(double r, double psi, double theta);

enum class LaplaceSide { upper_tail, lower_tail, upper_mean, lower_mean };

/// Numerically optimized Laplace transform bound over a log-theta grid
/// (200 points, refined once around the argmin).  A caller who knows the
/// closed-form optimizer may pass it; the result then never exceeds the
/// closed-form value.
double laplace_bounds(const std::function<double(double)>& log_m_bound, double theta_lo,
                      double theta_hi, int d, double t, LaplaceSide side,
                      std::optional<double> closed_form_theta = std::nullopt);

/// Strict Buchholz comparison (2p-1)^p < e^(p-1/2) (2p-1)!!; returns the
/// margin e^(p-1/2) (2p-1)!! - (2p-1)^p computed in long double.
long double buchholz_margin(int p);

}  // namespace mcx
