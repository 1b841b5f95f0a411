#include "mcx/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mcx/linalg.hpp"

namespace mcx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

void check_threshold(double t) {
    if (t < 0) throw std::invalid_argument("tail bound queried at negative threshold");
}

/// Tail for an almost-surely zero ensemble: 1 at t = 0, 0 beyond.
std::function<double(double)> degenerate_tail(int d) {
    return [d](double t) { return t > 0 ? 0.0 : static_cast<double>(d); };
}

}  // namespace

double BoundSet::tail_upper(double t) const {
    check_threshold(t);
    return clamp01(tail_upper_raw(t));
}

double BoundSet::tail_lower(double t) const {
    check_threshold(t);
    if (!tail_lower_raw) throw std::logic_error("BoundSet '" + provenance + "' has no lower tail");
    return clamp01((*tail_lower_raw)(t));
}

BoundSet bounded_concentration(double c, double v, int d) {
    if (v <= 0) throw std::invalid_argument("bounded_concentration: v must be positive");
    if (c < 0) throw std::invalid_argument("bounded_concentration: c must be nonnegative");
    if (d < 1) throw std::invalid_argument("bounded_concentration: d must be >= 1");

    BoundSet b;
    b.provenance = "bounded_concentration";
    b.dimension = d;
    double logd = std::log(static_cast<double>(d));
    b.mean_upper = std::sqrt(2.0 * v * logd) + c * logd;
    b.mean_lower = -std::sqrt(2.0 * v * logd);
    b.tail_lower_raw = [v, d](double t) { return d * std::exp(-t * t / (2.0 * v)); };
    if (c == 0.0) {
        // Analytic limit of both upper forms.
        b.tail_upper_raw = [v, d](double t) { return d * std::exp(-t * t / (2.0 * v)); };
    } else {
        b.tail_upper_raw = [c, v, d](double t) {
            double poisson = d * std::exp(-t / c + (v / (c * c)) * std::log1p(c * t / v));
            double subgamma = d * std::exp(-t * t / (2.0 * v + 2.0 * c * t));
            return std::min(poisson, subgamma);
        };
    }
    return b;
}

BoundSet refined_concentration(double r, double psi, int d) {
    if (psi <= 0) throw std::invalid_argument("refined_concentration: psi must be positive");
    if (r < 0) throw std::invalid_argument("refined_concentration: r must be nonnegative");
    if (d < 1) throw std::invalid_argument("refined_concentration: d must be >= 1");

    BoundSet b;
    b.provenance = "refined_concentration";
    b.dimension = d;
    double logd = std::log(static_cast<double>(d));
    double sqrt_psi = std::sqrt(psi);
    b.mean_upper = std::sqrt(2.0 * r * logd) + logd / sqrt_psi;
    if (r == 0.0) {
        b.tail_upper_raw = [d, sqrt_psi](double t) {
            return t > 0 ? d * std::exp(-t * sqrt_psi / 2.0) : static_cast<double>(d);
        };
    } else {
        b.tail_upper_raw = [r, sqrt_psi, d](double t) {
            return d * std::exp(-t * t / (2.0 * r + 2.0 * t / sqrt_psi));
        };
    }
    return b;
}

double theta_star(double t, double psi, double r) {
    if (t <= 0 || psi <= 0 || r <= 0)
        throw std::invalid_argument("theta_star: all inputs must be positive");
    double a = 4.0 * t * t / (psi * r * r);
    // sqrt(1+a)-1 computed as a/(sqrt(1+a)+1) to avoid cancellation at small a.
    double root = a / (std::sqrt(1.0 + a) + 1.0);
    return (psi * r / (2.0 * t)) * root;
}

std::pair<double, BoundSet> hoeffding(const std::vector<HermitianMatrix>& bounds_sq,
                                      const std::vector<HermitianMatrix>& second_moments) {
    if (bounds_sq.size() != second_moments.size())
        throw std::invalid_argument("hoeffding: list lengths differ");
    if (bounds_sq.empty()) throw std::invalid_argument("hoeffding: empty ensemble");
    int d = bounds_sq.front().dim();
    HermitianMatrix total = HermitianMatrix::zero(d);
    auto accumulate = [&](const HermitianMatrix& m, const char* what) {
        if (m.dim() != d) throw std::invalid_argument(std::string("hoeffding: dimension mismatch in ") + what);
        if (!psd_leq(HermitianMatrix::zero(d), m, 1e-10))
            throw std::invalid_argument(std::string("hoeffding: non-psd ") + what);
        total += m;
    };
    for (const auto& m : bounds_sq) accumulate(m, "bounds_sq");
    for (const auto& m : second_moments) accumulate(m, "second_moments");

    double sigma2 = 0.5 * spectral_norm(total);
    BoundSet b;
    if (sigma2 > 0) {
        b = bounded_concentration(0.0, sigma2, d);
    } else {
        b.dimension = d;
        b.mean_upper = 0.0;
        b.mean_lower = 0.0;
        b.tail_upper_raw = degenerate_tail(d);
        b.tail_lower_raw = degenerate_tail(d);
    }
    b.provenance = "matrix_hoeffding";
    return {sigma2, b};
}

BoundSet bernstein(double sigma2, double R, int d) {
    if (R <= 0) throw std::invalid_argument("bernstein: R must be positive");
    if (sigma2 < 0) throw std::invalid_argument("bernstein: sigma2 must be nonnegative");
    if (d < 1) throw std::invalid_argument("bernstein: d must be >= 1");

    BoundSet b;
    b.provenance = "matrix_bernstein";
    b.dimension = d;
    double logd = std::log(static_cast<double>(d));
    b.mean_upper = std::sqrt(sigma2) * std::sqrt(3.0 * logd) + R * logd;
    if (sigma2 == 0.0) {
        b.tail_upper_raw = degenerate_tail(d);
        b.mean_upper = 0.0;
    } else {
        b.tail_upper_raw = [sigma2, R, d](double t) {
            return d * std::exp(-t * t / (3.0 * sigma2 + 2.0 * R * t));
        };
    }
    return b;
}

BoundSet rectangular_bernstein(double row_var, double col_var, double R, int d1, int d2) {
    if (row_var < 0 || col_var < 0)
        throw std::invalid_argument("rectangular_bernstein: variances must be nonnegative");
    BoundSet b = bernstein(std::max(row_var, col_var), R, d1 + d2);
    b.provenance = "rectangular_bernstein";
    return b;
}

double chebyshev_tail(const std::map<double, double>& moments, double t) {
    if (t <= 0) throw std::invalid_argument("chebyshev_tail: t must be positive");
    if (moments.empty()) throw std::invalid_argument("chebyshev_tail: no moments supplied");
    double best = kInf;
    for (const auto& [p, m] : moments) {
        if (p < 1) throw std::invalid_argument("chebyshev_tail: moment order below 1");
        if (m < 0) throw std::invalid_argument("chebyshev_tail: negative moment");
        best = std::min(best, std::pow(t, -p) * m);
    }
    return std::min(1.0, best);
}

namespace {

void check_moment_order(double p, bool allow_weak_range) {
    if (p < 1) throw std::invalid_argument("moment order p must be >= 1");
    if (p > 1 && p < 1.5 && !allow_weak_range)
        throw std::invalid_argument(
            "moment order in (1, 1.5) carries a weaker constant; enable the opt-in flag to use it");
}

// The weaker constant for 1 < p < 1.5 is sqrt(4p-2) in place of sqrt(2p-1);
// downstream corollaries inherit the same sqrt(2) inflation.
double bdg_constant(double p) { return (p > 1 && p < 1.5) ? std::sqrt(4.0 * p - 2.0) : std::sqrt(2.0 * p - 1.0); }

}  // namespace

double bdg_bound(double p, double delta_moment, bool allow_weak_range) {
    check_moment_order(p, allow_weak_range);
    if (delta_moment < 0) throw std::invalid_argument("bdg_bound: negative moment");
    if (delta_moment == 0) return 0.0;
    return bdg_constant(p) * std::pow(delta_moment, 1.0 / (2.0 * p));
}

double khintchine(double p, const HermitianMatrix& coeff_squares_sum,
                  const std::optional<HermitianMatrix>& second_moment_sum, bool allow_weak_range) {
    check_moment_order(p, allow_weak_range);
    int d = coeff_squares_sum.dim();
    auto require_psd = [d](const HermitianMatrix& m, const char* what) {
        if (!psd_leq(HermitianMatrix::zero(d), m, 1e-10))
            throw std::invalid_argument(std::string("khintchine: non-psd ") + what);
    };
    require_psd(coeff_squares_sum, "coefficient squares");

    HermitianMatrix total = coeff_squares_sum;
    double factor;
    if (second_moment_sum) {
        require_psd(*second_moment_sum, "second moments");
        total += *second_moment_sum;
        factor = bdg_constant(p) / std::sqrt(2.0);  // sqrt(p - 0.5) in the standard range
    } else {
        factor = bdg_constant(p);
    }
    HermitianMatrix root =
        matrix_function(total, [](double x) { return std::sqrt(std::max(x, 0.0)); },
                        Interval{-1e-10, kInf});
    return factor * schatten_norm(root, 2.0 * p);
}

double rosenthal_psd(double p, double mean_norm, double summand_moments, bool allow_weak_range) {
    check_moment_order(p, allow_weak_range);
    if (mean_norm < 0 || summand_moments < 0)
        throw std::invalid_argument("rosenthal_psd: negative input");
    double weak = (p > 1 && p < 1.5) ? std::sqrt(2.0) : 1.0;
    double root = std::sqrt(mean_norm) +
                  weak * std::sqrt(4.0 * p - 2.0) * std::pow(summand_moments, 1.0 / (4.0 * p));
    return root * root;
}

double rosenthal_hermitian(double p, double variance_norm, double summand_moments,
                           bool allow_weak_range) {
    check_moment_order(p, allow_weak_range);
    if (variance_norm < 0 || summand_moments < 0)
        throw std::invalid_argument("rosenthal_hermitian: negative input");
    double weak = (p > 1 && p < 1.5) ? std::sqrt(2.0) : 1.0;
    return weak * std::sqrt(4.0 * p - 1.0) * variance_norm +
           weak * (4.0 * p - 1.0) * std::pow(summand_moments, 1.0 / (4.0 * p));
}

CombinatorialBernstein combinatorial_bernstein(const std::vector<std::vector<HermitianMatrix>>& a,
                                               int d) {
    const size_t n = a.size();
    if (n == 0) throw std::invalid_argument("combinatorial_bernstein: empty array");
    HermitianMatrix total = HermitianMatrix::zero(d);
    HermitianMatrix sq_sum = HermitianMatrix::zero(d);
    double R = 0.0;
    for (const auto& row : a) {
        if (row.size() != n) throw std::invalid_argument("combinatorial_bernstein: ragged array");
        for (const auto& m : row) {
            if (m.dim() != d) throw std::invalid_argument("combinatorial_bernstein: dimension mismatch");
            total += m;
            sq_sum += m.square();
            R = std::max(R, spectral_norm(m));
        }
    }
    if (total.max_abs_entry() > 1e-10)
        throw std::invalid_argument("combinatorial_bernstein: array total is not zero");

    double sigma2 = spectral_norm(sq_sum) / static_cast<double>(n);
    BoundSet b;
    b.provenance = "combinatorial_bernstein";
    b.dimension = d;
    double logd = std::log(static_cast<double>(d));
    if (sigma2 == 0.0) {
        b.mean_upper = 0.0;
        b.tail_upper_raw = degenerate_tail(d);
    } else {
        b.mean_upper = std::sqrt(sigma2) * std::sqrt(12.0 * logd) + 2.0 * std::sqrt(2.0) * R * logd;
        const double c = 4.0 * std::sqrt(2.0) * R;
        b.tail_upper_raw = [sigma2, c, d](double t) {
            return d * std::exp(-t * t / (12.0 * sigma2 + c * t));
        };
    }
    return {sigma2, R, b};
}

BoundSet bounded_differences(double s, double L, int d) {
    if (s <= 0) throw std::invalid_argument("bounded_differences: s must be positive");
    if (L < 0) throw std::invalid_argument("bounded_differences: L must be nonnegative");
    if (d < 1) throw std::invalid_argument("bounded_differences: d must be >= 1");

    BoundSet b;
    b.provenance = "bounded_differences";
    b.dimension = d;
    double logd = std::log(static_cast<double>(d));
    if (L == 0.0) {
        b.mean_upper = 0.0;
        b.tail_upper_raw = degenerate_tail(d);
    } else {
        b.mean_upper = std::sqrt(L * logd / s);
        b.tail_upper_raw = [s, L, d](double t) { return d * std::exp(-s * t * t / L); };
    }
    return b;
}

MgfBound mgf_bound_bounded(double c, double v, double theta) {
    if (c < 0 || v < 0) throw std::invalid_argument("mgf_bound_bounded: c, v must be nonnegative");
    if (theta <= 0 || c == 0.0) {
        double val = v * theta * theta / 2.0;
        return {val, val};
    }
    if (theta >= 1.0 / c)
        throw std::invalid_argument("mgf_bound_bounded: theta outside [0, 1/c)");
    double tight = (v / (c * c)) * (std::log(1.0 / (1.0 - c * theta)) - c * theta);
    double loose = v * theta * theta / (2.0 * (1.0 - c * theta));
    return {tight, loose};
}

double mgf_bound_refined(double r, double psi, double theta) {
    if (psi <= 0) throw std::invalid_argument("mgf_bound_refined: psi must be positive");
    if (r < 0) throw std::invalid_argument("mgf_bound_refined: r must be nonnegative");
    if (theta < 0 || theta * theta >= psi)
        throw std::invalid_argument("mgf_bound_refined: theta outside [0, sqrt(psi))");
    double val = r * theta * theta / (2.0 * (1.0 - theta * theta / psi));
    return val > 1e308 ? kInf : val;
}

namespace {

double laplace_objective(const std::function<double(double)>& log_m, int d, double t,
                         LaplaceSide side, double theta) {
    double logd = std::log(static_cast<double>(d));
    switch (side) {
        case LaplaceSide::upper_tail:
            return d * std::exp(-theta * t + log_m(theta));
        case LaplaceSide::lower_tail:
            // P(lambda_min <= -t) with theta < 0.
            return d * std::exp(theta * t + log_m(theta));
        case LaplaceSide::upper_mean:
            return (logd + log_m(theta)) / theta;
        case LaplaceSide::lower_mean:
            // theta < 0; the quotient is an admissible lower bound, so the
            // best (largest) value is wanted.  Negate so minimization works.
            return -(logd + log_m(theta)) / theta;
    }
    return kInf;
}

}  // namespace

double laplace_bounds(const std::function<double(double)>& log_m_bound, double theta_lo,
                      double theta_hi, int d, double t, LaplaceSide side,
                      std::optional<double> closed_form_theta) {
    bool negative_side = (side == LaplaceSide::lower_tail || side == LaplaceSide::lower_mean);
    bool tail = (side == LaplaceSide::upper_tail || side == LaplaceSide::lower_tail);
    if (tail) check_threshold(t);
    if (tail && t == 0.0) return 1.0;

    // The domain is given in magnitudes; negative-side thetas are mirrored
    // inside the objective evaluation.
    double lo = theta_lo;
    double hi = theta_hi;
    if (!(hi > 0) || !(hi > lo) || lo < 0)
        throw std::invalid_argument("laplace_bounds: empty or invalid theta domain");
    double mag_lo = std::max(lo, hi * 1e-9);

    auto eval = [&](double mag) {
        double theta = negative_side ? -mag : mag;
        double lm = log_m_bound(theta);
        if (!std::isfinite(lm)) return kInf;
        return laplace_objective(log_m_bound, d, t, side, theta);
    };

    const int kGrid = 200;
    auto scan = [&](double a, double b, double& best_mag) {
        double best = kInf;
        double ratio = b / a;
        for (int i = 0; i < kGrid; ++i) {
            double mag = a * std::pow(ratio, static_cast<double>(i) / (kGrid - 1));
            double val = eval(mag);
            if (val < best) {
                best = val;
                best_mag = mag;
            }
        }
        return best;
    };

    double best_mag = mag_lo;
    double best = scan(mag_lo, hi, best_mag);
    // One refinement pass around the argmin.
    double step = std::pow(hi / mag_lo, 1.0 / (kGrid - 1));
    double ref_lo = std::max(mag_lo, best_mag / step);
    double ref_hi = std::min(hi, best_mag * step);
    double ref_mag = best_mag;
    best = std::min(best, scan(ref_lo, ref_hi, ref_mag));
    if (closed_form_theta) best = std::min(best, eval(std::abs(*closed_form_theta)));

    if (!std::isfinite(best) && !tail)
        throw std::invalid_argument("laplace_bounds: curve not finite anywhere on domain");
    if (tail) return clamp01(best);
    return (side == LaplaceSide::lower_mean) ? -best : best;
}

long double buchholz_margin(int p) {
    if (p < 1) throw std::invalid_argument("buchholz_margin: p must be >= 1");
    long double dfact = 1.0L;
    for (int k = 1; k <= p; ++k) dfact *= static_cast<long double>(2 * k - 1);
    long double lhs = powl(static_cast<long double>(2 * p - 1), static_cast<long double>(p));
    long double rhs = expl(static_cast<long double>(p) - 0.5L) * dfact;
    return rhs - lhs;
}

}  // namespace mcx
