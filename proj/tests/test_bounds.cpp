#include <doctest.h>

#include <cmath>
#include <map>

#include "mcx/bounds.hpp"
#include "mcx/linalg.hpp"
#include "mcx/rng.hpp"

using namespace mcx;

namespace {

const double kLog2 = std::log(2.0);

std::pair<double, BoundSet> hoeffding_for_diag_series(int n) {
    // n coefficients diag(1, -1): A_k^2 = I and E Y_k^2 = I.
    std::vector<HermitianMatrix> sq(n, HermitianMatrix::identity(2));
    return hoeffding(sq, sq);
}

}  // namespace

TEST_CASE("BoundSet clamps probabilities and rejects negative thresholds") {
    BoundSet b = bernstein(10.0, 1.0, 2);
    CHECK(b.tail_upper(0.0) == 1.0);  // raw value 2 clamps to 1
    CHECK(b.tail_upper(100.0) > 0.0);
    CHECK(b.tail_upper(100.0) < 1e-10);
    CHECK_THROWS_AS(b.tail_upper(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(b.tail_lower(1.0), std::logic_error);  // no lower tail published
}

TEST_CASE("matrix hoeffding on ten diag(1,-1) coefficients") {
    auto [sigma2, b] = hoeffding_for_diag_series(10);
    CHECK(sigma2 == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(b.dimension == 2);
    CHECK(b.mean_upper == doctest::Approx(std::sqrt(2.0 * 10.0 * kLog2)).epsilon(1e-12));
    CHECK(b.mean_upper == doctest::Approx(3.7232974110647) .epsilon(1e-9));
    CHECK(b.tail_upper(5.0) == doctest::Approx(2.0 * std::exp(-1.25)).epsilon(1e-12));
    CHECK(b.tail_upper(5.0) == doctest::Approx(0.5730095937203) .epsilon(1e-9));
    // Symmetric lower tail is published as well.
    CHECK(b.tail_lower(5.0) == doctest::Approx(2.0 * std::exp(-1.25)).epsilon(1e-12));
}

TEST_CASE("hoeffding input validation") {
    std::vector<HermitianMatrix> one{HermitianMatrix::identity(2)};
    std::vector<HermitianMatrix> two{HermitianMatrix::identity(2), HermitianMatrix::identity(2)};
    CHECK_THROWS_AS(hoeffding(one, two), std::invalid_argument);
    CHECK_THROWS_AS(hoeffding({}, {}), std::invalid_argument);
    std::vector<HermitianMatrix> neg{HermitianMatrix::diagonal({-1.0, 1.0})};
    CHECK_THROWS_AS(hoeffding(neg, one), std::invalid_argument);
}

TEST_CASE("matrix bernstein matches the hand-evaluated tail and refined shape") {
    BoundSet b = bernstein(10.0, 1.0, 2);
    CHECK(b.tail_upper(8.0) == doctest::Approx(2.0 * std::exp(-64.0 / 46.0)).epsilon(1e-12));
    CHECK(b.tail_upper(8.0) == doctest::Approx(0.4975012711730).epsilon(1e-9));
    CHECK(b.mean_upper == doctest::Approx(std::sqrt(30.0 * kLog2) + kLog2).epsilon(1e-12));

    // bernstein(sigma2, R, d) is exactly refined_concentration(1.5 sigma2, 1/R^2, d).
    BoundSet r = refined_concentration(15.0, 1.0, 2);
    for (double t = 0.0; t <= 20.0; t += 0.25) {
        CHECK(b.tail_upper(t) == doctest::Approx(r.tail_upper(t)).epsilon(1e-12));
    }
    CHECK(b.mean_upper == doctest::Approx(r.mean_upper).epsilon(1e-12));

    CHECK_THROWS_AS(bernstein(1.0, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(bernstein(-1.0, 1.0, 2), std::invalid_argument);
}

TEST_CASE("refined concentration tail and the r = 0 limit") {
    BoundSet b = refined_concentration(1.0, 1.0, 1);
    double t = std::sqrt(2.0);
    CHECK(b.tail_upper(t) == doctest::Approx(std::exp(-2.0 / (2.0 + 2.0 * t))).epsilon(1e-12));
    CHECK(b.mean_upper == doctest::Approx(0.0).epsilon(1e-12));  // log d = 0

    BoundSet z = refined_concentration(0.0, 4.0, 3);
    CHECK(z.tail_upper(0.0) == 1.0);
    CHECK(z.tail_upper(2.0) == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(refined_concentration(1.0, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(refined_concentration(-1.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("theta_star solves the stationarity equation exactly") {
    // At t = sqrt(2), psi = 1, r = 1 the positive root is 1/sqrt(2).
    CHECK(theta_star(std::sqrt(2.0), 1.0, 1.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(theta_star(0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(theta_star(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("theta_star plug-back over a wide fuzzed range") {
    CounterRng rng(404);
    for (int i = 0; i < 10000; ++i) {
        // Log-uniform over roughly [0.03, 33] per parameter; wider ranges make
        // the plug-back denominator 1 - theta^2/psi too ill-conditioned for a
        // 1e-10 relative target in double precision.
        double t = std::exp(7.0 * (rng.uniform01() - 0.5));
        double psi = std::exp(7.0 * (rng.uniform01() - 0.5));
        double r = std::exp(7.0 * (rng.uniform01() - 0.5));
        double th = theta_star(t, psi, r);
        REQUIRE(th > 0.0);
        REQUIRE(th < std::sqrt(psi));
        double recovered = r * th / (1.0 - th * th / psi);
        REQUIRE(std::abs(recovered - t) <= 1e-10 * t);
    }
}

TEST_CASE("rectangular bernstein takes the worse of the two variances") {
    // Ten summands eps_k [1, 0]: row variance 10, column variance 10, d1 + d2 = 3.
    BoundSet b = rectangular_bernstein(10.0, 10.0, 1.0, 1, 2);
    CHECK(b.dimension == 3);
    CHECK(b.tail_upper(8.0) == doctest::Approx(3.0 * std::exp(-64.0 / 46.0)).epsilon(1e-12));
    // Asymmetric variances: the max drives the bound.
    BoundSet asym = rectangular_bernstein(4.0, 9.0, 1.0, 2, 2);
    BoundSet ref = rectangular_bernstein(9.0, 9.0, 1.0, 2, 2);
    CHECK(asym.tail_upper(3.0) == doctest::Approx(ref.tail_upper(3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(rectangular_bernstein(-1.0, 1.0, 1.0, 1, 1), std::invalid_argument);
}

TEST_CASE("chebyshev_tail minimizes over the supplied moment orders") {
    std::map<double, double> moments;
    for (int p = 1; p <= 10; ++p) moments[p] = 2.0;
    CHECK(chebyshev_tail(moments, 2.0) == doctest::Approx(2.0 / 1024.0).epsilon(1e-14));
    // At t < 1 higher moments hurt; the p = 1 term wins.
    CHECK(chebyshev_tail(moments, 0.5) == 1.0);  // clamped: 2 / 0.5 = 4 -> 1
    CHECK_THROWS_AS(chebyshev_tail(moments, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(chebyshev_tail({}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(chebyshev_tail({{0.5, 1.0}}, 1.0), std::invalid_argument);
}

TEST_CASE("bdg_bound constants and the weak-range policy") {
    CHECK(bdg_bound(1.0, 16.0) == doctest::Approx(4.0).epsilon(1e-13));  // 1 * 16^(1/2)
    CHECK(bdg_bound(2.0, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
    CHECK(bdg_bound(1.5, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    // 1 < p < 1.5 is rejected unless explicitly allowed, then the constant
    // degrades from sqrt(2p-1) to sqrt(4p-2).
    CHECK_THROWS_AS(bdg_bound(1.2, 1.0), std::invalid_argument);
    CHECK(bdg_bound(1.2, 1.0, true) == doctest::Approx(std::sqrt(2.8)).epsilon(1e-13));
    CHECK_THROWS_AS(bdg_bound(0.9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bdg_bound(2.0, -1.0), std::invalid_argument);
}

TEST_CASE("khintchine for a pure Rademacher series") {
    // Sum of squares 10 I (2x2): bound at p is sqrt(2p-1) ||sqrt(10) I||_2p.
    HermitianMatrix sq = 10.0 * HermitianMatrix::identity(2);
    double expect2 = std::sqrt(3.0) * std::sqrt(10.0) * std::pow(2.0, 0.25);
    CHECK(khintchine(2.0, sq) == doctest::Approx(expect2).epsilon(1e-12));
    CHECK(khintchine(2.0, sq) == doctest::Approx(6.5135556243).epsilon(1e-9));
    CHECK(khintchine(1.0, sq) == doctest::Approx(std::sqrt(10.0) * std::sqrt(2.0)).epsilon(1e-12));
    // Weak range gains a sqrt(2): series constant becomes sqrt(4p-2).
    CHECK_THROWS_AS(khintchine(1.2, sq), std::invalid_argument);
    CHECK(khintchine(1.2, sq, std::nullopt, true) ==
          doctest::Approx(std::sqrt(2.8) * std::sqrt(10.0) * std::pow(2.0, 1.0 / 2.4))
              .epsilon(1e-12));
    // Non-psd square sum is rejected.
    CHECK_THROWS_AS(khintchine(2.0, HermitianMatrix::diagonal({1.0, -1.0})),
                    std::invalid_argument);
}

TEST_CASE("rosenthal bounds at unit inputs") {
    CHECK(rosenthal_psd(1.0, 1.0, 1.0) ==
          doctest::Approx((1.0 + std::sqrt(2.0)) * (1.0 + std::sqrt(2.0))).epsilon(1e-13));
    CHECK(rosenthal_hermitian(1.0, 1.0, 1.0) ==
          doctest::Approx(std::sqrt(3.0) + 3.0).epsilon(1e-13));
    // Weak range p in (1, 1.5) inflates by sqrt(2) per factor.
    CHECK_THROWS_AS(rosenthal_psd(1.2, 1.0, 1.0), std::invalid_argument);
    double weak = rosenthal_hermitian(1.2, 1.0, 1.0, true);
    double base = std::sqrt(4.0 * 1.2 - 1.0) + (4.0 * 1.2 - 1.0);
    CHECK(weak == doctest::Approx(std::sqrt(2.0) * base).epsilon(1e-12));
    CHECK_THROWS_AS(rosenthal_psd(1.0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(rosenthal_hermitian(1.0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("combinatorial bernstein on the 2x2 sign array") {
    std::vector<std::vector<HermitianMatrix>> a{
        {HermitianMatrix::diagonal({1.0}), HermitianMatrix::diagonal({-1.0})},
        {HermitianMatrix::diagonal({-1.0}), HermitianMatrix::diagonal({1.0})}};
    CombinatorialBernstein cb = combinatorial_bernstein(a, 1);
    CHECK(cb.sigma2 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(cb.R == doctest::Approx(1.0).epsilon(1e-12));
    double expect = std::exp(-4.0 / (24.0 + 8.0 * std::sqrt(2.0)));
    CHECK(cb.bounds.tail_upper(2.0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(cb.bounds.tail_upper(2.0) == doctest::Approx(0.8929091314).epsilon(1e-9));

    // Nonzero total is rejected.
    std::vector<std::vector<HermitianMatrix>> bad{
        {HermitianMatrix::diagonal({1.0}), HermitianMatrix::diagonal({1.0})},
        {HermitianMatrix::diagonal({1.0}), HermitianMatrix::diagonal({1.0})}};
    CHECK_THROWS_AS(combinatorial_bernstein(bad, 1), std::invalid_argument);
    CHECK_THROWS_AS(combinatorial_bernstein({}, 1), std::invalid_argument);
}

TEST_CASE("bounded differences tail values") {
    BoundSet b1 = bounded_differences(1.0, 20.0, 1);
    CHECK(b1.tail_upper(5.0) == doctest::Approx(std::exp(-1.25)).epsilon(1e-12));
    CHECK(b1.tail_upper(5.0) == doctest::Approx(0.2865047969).epsilon(1e-9));
    BoundSet b2 = bounded_differences(2.0, 4.0, 2);
    CHECK(b2.tail_upper(2.0) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(bounded_differences(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(bounded_differences(1.0, -1.0, 1), std::invalid_argument);
}

TEST_CASE("bounded concentration: analytic c = 0 limit and the two-regime minimum") {
    BoundSet gauss = bounded_concentration(0.0, 1.0, 1);
    CHECK(gauss.tail_upper(1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(gauss.mean_upper == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(gauss.tail_lower(1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

    BoundSet b = bounded_concentration(1.0, 1.0, 1);
    // The Poisson-type branch wins at t = 1: e^{-1} (1 + 1)^{1} = 2/e.
    double poisson = std::exp(-1.0) * 2.0;
    double subgamma = std::exp(-0.25);
    CHECK(b.tail_upper(1.0) == doctest::Approx(std::min(poisson, subgamma)).epsilon(1e-12));
    CHECK(b.tail_upper(1.0) == doctest::Approx(0.7357588823).epsilon(1e-9));
    CHECK(b.mean_upper == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(bounded_concentration(1.0, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(bounded_concentration(-0.1, 1.0, 1), std::invalid_argument);
}

TEST_CASE("mgf bounds: tight vs loose and the refined form") {
    MgfBound m = mgf_bound_bounded(1.0, 1.0, 0.5);
    CHECK(m.tight == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-12));
    CHECK(m.loose == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.tight <= m.loose);
    CHECK_THROWS_AS(mgf_bound_bounded(1.0, 1.0, 1.0), std::invalid_argument);  // theta = 1/c

    CHECK(mgf_bound_refined(1.0, 1.0, 0.5) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK_THROWS_AS(mgf_bound_refined(1.0, 1.0, 1.0), std::invalid_argument);  // theta = sqrt(psi)
    CHECK_THROWS_AS(mgf_bound_refined(1.0, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("laplace optimization recovers closed forms") {
    // Gaussian log-mgf v theta^2 / 2 with v = 1: lower tail at t = 1 is e^{-1/2}.
    auto gauss = [](double theta) { return theta * theta / 2.0; };
    double lower = laplace_bounds(gauss, 1e-6, 50.0, 1, 1.0, LaplaceSide::lower_tail);
    CHECK(lower == doctest::Approx(std::exp(-0.5)).epsilon(1e-6));

    // Mean bound with v = 10, d = 2: sqrt(2 * 10 * log 2).
    auto gauss10 = [](double theta) { return 10.0 * theta * theta / 2.0; };
    double mean = laplace_bounds(gauss10, 1e-6, 50.0, 2, 0.0, LaplaceSide::upper_mean);
    CHECK(mean == doctest::Approx(std::sqrt(20.0 * kLog2)).epsilon(1e-6));

    // Supplying the closed-form optimizer can only help.
    double with_theta = laplace_bounds(gauss, 1e-6, 50.0, 1, 1.0, LaplaceSide::lower_tail, 1.0);
    CHECK(with_theta == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(with_theta <= lower * (1.0 + 1e-12));

    CHECK_THROWS_AS(laplace_bounds(gauss, 2.0, 1.0, 1, 1.0, LaplaceSide::lower_tail),
                    std::invalid_argument);
}

TEST_CASE("buchholz comparison margin is strictly positive for p up to 20") {
    for (int p = 1; p <= 20; ++p) {
        long double margin = buchholz_margin(p);
        CHECK(margin > 0.0L);
    }
    CHECK_THROWS_AS(buchholz_margin(0), std::invalid_argument);
}
