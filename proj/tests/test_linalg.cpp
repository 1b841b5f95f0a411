#include <doctest.h>

#include <cmath>
#include <complex>

#include "mcx/linalg.hpp"
#include "mcx/rng.hpp"

using namespace mcx;

namespace {

HermitianMatrix pauli_x() {
    Matrix m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return HermitianMatrix::from_matrix(m);
}

HermitianMatrix diag2(double a, double b) {
    return HermitianMatrix::diagonal({a, b});
}

HermitianMatrix random_hermitian(CounterRng& rng, int d) {
    Matrix m(d, d);
    for (int j = 0; j < d; ++j) {
        m(j, j) = rng.normal();
        for (int k = 0; k < j; ++k) {
            cd v{rng.normal(), rng.normal()};
            m(j, k) = v;
            m(k, j) = std::conj(v);
        }
    }
    return HermitianMatrix::from_matrix(m);
}

}  // namespace

TEST_CASE("eig_hermitian solves the 2x2 off-diagonal model exactly") {
    EigenDecomposition e = eig_hermitian(pauli_x());
    CHECK(e.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(e.lambda_min() == e.eigenvalues[0]);
    CHECK(e.lambda_max() == e.eigenvalues[1]);
}

TEST_CASE("eig_hermitian reconstructs random matrices to near machine precision") {
    CounterRng rng(101);
    for (int d : {1, 2, 3, 5, 8}) {
        HermitianMatrix a = random_hermitian(rng, d);
        EigenDecomposition e = eig_hermitian(a);
        Matrix lam(d, d);
        for (int i = 0; i < d; ++i) lam(i, i) = e.eigenvalues[i];
        Matrix recon = e.unitary * lam * e.unitary.adjoint();
        CHECK((recon - a.mat()).frobenius_norm() <= 1e-12 * (1.0 + a.mat().frobenius_norm()));
        // Eigenvalues ascending.
        for (int i = 1; i < d; ++i) CHECK(e.eigenvalues[i] >= e.eigenvalues[i - 1]);
        // Unitarity.
        Matrix qtq = e.unitary.adjoint() * e.unitary;
        CHECK((qtq - Matrix::identity(d)).frobenius_norm() <= 1e-12 * d);
    }
}

TEST_CASE("eig_hermitian rejects non-finite input") {
    HermitianMatrix bad =
        HermitianMatrix::diagonal({std::numeric_limits<double>::quiet_NaN()});
    CHECK_THROWS_AS(eig_hermitian(bad), std::invalid_argument);
}

TEST_CASE("matrix_exp of the off-diagonal model gives cosh/sinh blocks") {
    HermitianMatrix e = matrix_exp(pauli_x());
    CHECK(e(0, 0).real() == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
    CHECK(e(1, 1).real() == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
    CHECK(e(0, 1).real() == doctest::Approx(std::sinh(1.0)).epsilon(1e-12));
    CHECK(traces(e).second == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
}

TEST_CASE("matrix_function enforces the stated domain") {
    HermitianMatrix a = diag2(1.0, -2.0);
    CHECK_THROWS_AS(matrix_function(a, [](double x) { return std::sqrt(x); },
                                    Interval::nonnegative()),
                    std::domain_error);
    HermitianMatrix ok = matrix_function(diag2(4.0, 9.0), [](double x) { return std::sqrt(x); },
                                         Interval::nonnegative());
    CHECK(ok(0, 0).real() == doctest::Approx(2.0));
    CHECK(ok(1, 1).real() == doctest::Approx(3.0));
}

TEST_CASE("matrix_abs flips negative eigenvalues") {
    HermitianMatrix a = matrix_abs(diag2(3.0, -4.0));
    CHECK(a(0, 0).real() == doctest::Approx(3.0));
    CHECK(a(1, 1).real() == doctest::Approx(4.0));
}

TEST_CASE("schatten_norm matches hand values on a diagonal matrix") {
    HermitianMatrix a = diag2(3.0, -4.0);
    CHECK(schatten_norm(a, 1.0) == doctest::Approx(7.0).epsilon(1e-13));
    CHECK(schatten_norm(a, 2.0) == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(schatten_norm(a, std::numeric_limits<double>::infinity()) ==
          doctest::Approx(4.0).epsilon(1e-13));
    CHECK(spectral_norm(a) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK_THROWS_AS(schatten_norm(a, 0.5), std::invalid_argument);
}

TEST_CASE("rectangular schatten_norm uses the dilation singular values") {
    Matrix b(1, 2);
    b(0, 0) = 3.0;
    b(0, 1) = 4.0;  // single singular value 5
    CHECK(schatten_norm(b, 2.0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(schatten_norm(b, 1.0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(spectral_norm(b) == doctest::Approx(5.0).epsilon(1e-12));

    // Square non-Hermitian input also goes through the dilation.
    Matrix r(2, 2);
    r(0, 1) = 1.0;  // nilpotent shift, singular values {1, 0}
    CHECK(schatten_norm(r, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hermitian_dilation has the advertised block structure") {
    Matrix b(1, 2);
    b(0, 0) = 1.0;
    b(0, 1) = 2.0;
    HermitianMatrix h = hermitian_dilation(b);
    REQUIRE(h.dim() == 3);
    CHECK(h(0, 0) == cd{0.0, 0.0});
    CHECK(h(0, 1) == cd{1.0, 0.0});
    CHECK(h(0, 2) == cd{2.0, 0.0});
    CHECK(h(1, 0) == cd{1.0, 0.0});
    // Dilation spectrum is {+sigma, -sigma, 0} with sigma = sqrt(5).
    EigenDecomposition e = eig_hermitian(h);
    CHECK(e.lambda_max() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK(e.lambda_min() == doctest::Approx(-std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("psd_leq orders matrices by lambda_min of the difference") {
    CHECK(psd_leq(diag2(0.0, 0.0), diag2(1.0, 2.0), 1e-12));
    CHECK_FALSE(psd_leq(diag2(1.0, 2.0), diag2(0.0, 0.0), 1e-12));
    CHECK(psd_leq(diag2(1.0, 1.0), diag2(1.0, 1.0), 1e-12));
    CHECK_THROWS_AS(psd_leq(diag2(0, 0), HermitianMatrix::identity(3), 1e-12),
                    std::invalid_argument);
}

TEST_CASE("traces returns both plain and normalized trace") {
    auto [t, tbar] = traces(diag2(1.0, 3.0));
    CHECK(t == doctest::Approx(4.0));
    CHECK(tbar == doctest::Approx(2.0));
}

TEST_CASE("matrix_entropy uses the 0 log 0 convention and rejects negatives") {
    // Maximally mixed 2x2: eigenvalues 1/2, 1/2.
    HermitianMatrix w = diag2(0.5, 0.5);
    CHECK(matrix_entropy(w) == doctest::Approx(0.5 * std::log(0.5)).epsilon(1e-12));
    // A zero eigenvalue contributes nothing.
    CHECK(matrix_entropy(diag2(1.0, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(matrix_entropy(diag2(1.0, -1.0)), std::domain_error);
}
