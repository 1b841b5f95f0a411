#pragma once

#include <functional>
#include <limits>
#include <utility>

#include "mcx/matrix.hpp"

namespace mcx {

/// Spectral factorization A = Q diag(eigenvalues) Q*, eigenvalues ascending.
struct EigenDecomposition {
    std::vector<double> eigenvalues;
    Matrix unitary;

    double lambda_min() const { return eigenvalues.front(); }
    double lambda_max() const { return eigenvalues.back(); }
};

/// Cyclic complex Jacobi eigensolver.  Sweeps until the off-diagonal
/// Frobenius mass drops below 1e-14 * ||A||_F, at most 50 sweeps.
EigenDecomposition eig_hermitian(const HermitianMatrix& a);

/// Real interval used as the domain of a scalar function lifted to matrices.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x >= lo && x <= hi; }
    static Interval all() { return {}; }
    static Interval positive() { return {std::numeric_limits<double>::min(), std::numeric_limits<double>::infinity()}; }
    static Interval nonnegative() { return {0.0, std::numeric_limits<double>::infinity()}; }
};

/// Standard matrix function: applies f to the eigenvalues of a.  Rejects
/// inputs with an eigenvalue outside the stated domain.
HermitianMatrix matrix_function(const HermitianMatrix& a, const std::function<double(double)>& f,
                                Interval domain = Interval::all());

HermitianMatrix matrix_exp(const HermitianMatrix& a);
HermitianMatrix matrix_abs(const HermitianMatrix& a);

/// Schatten p-norm, p >= 1 or infinity.  Hermitian overload uses |eigenvalues|.
double schatten_norm(const HermitianMatrix& a, double p);
/// Rectangular overload: singular values come from the eigenvalues of the
/// Hermitian dilation, which carries {+sigma_i, -sigma_i} plus zeros.
double schatten_norm(const Matrix& b, double p);

/// Spectral norm, ||.||_infinity.
double spectral_norm(const HermitianMatrix& a);
double spectral_norm(const Matrix& b);

/// (trace, trace / d).
std::pair<double, double> traces(const HermitianMatrix& a);

/// Semidefinite order test: true iff lambda_min(b - a) >= -tol.
bool psd_leq(const HermitianMatrix& a, const HermitianMatrix& b, double tol);

/// Block matrix [[0, B], [B*, 0]] of dimension rows + cols.
HermitianMatrix hermitian_dilation(const Matrix& b);

/// Normalized trace of W log W with the 0 log 0 = 0 convention.  Rejects
/// eigenvalues below -1e-12.
double matrix_entropy(const HermitianMatrix& w);

}  // namespace mcx
