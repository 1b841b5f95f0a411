#include "mcx/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mcx {

namespace {

double offdiag_frobenius(const Matrix& a) {
    double s = 0;
    int d = a.rows();
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            if (j != k) s += std::norm(a(j, k));
    return std::sqrt(s);
}

}  // namespace

EigenDecomposition eig_hermitian(const HermitianMatrix& input) {
    const int d = input.dim();
    Matrix a = input.mat();
    if (!a.all_finite()) throw std::invalid_argument("eig_hermitian: non-finite entries");
    Matrix q = Matrix::identity(d);

    const double scale = a.frobenius_norm();
    const double target = 1e-14 * std::max(scale, 1.0);

    for (int sweep = 0; sweep < 50 && offdiag_frobenius(a) > target; ++sweep) {
        for (int p = 0; p < d - 1; ++p) {
            for (int r = p + 1; r < d; ++r) {
                cd apr = a(p, r);
                double mag = std::abs(apr);
                if (mag <= 1e-300) continue;
                // Phase rotation makes the (p,r) pivot real, then a classical
                // Jacobi rotation annihilates it.  The combined unitary acts
                // only on rows/columns p and r.
                cd phase = apr / mag;  // a(p,r) = mag * phase
                double app = a(p, p).real();
                double arr = a(r, r).real();
                double tau = (arr - app) / (2.0 * mag);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                // Column update with V = [[c, s*phase], [-s*conj(phase), c]]
                // applied as A <- V* A V, Q <- Q V.
                cd vpr = s * phase;
                cd vrp = -s * std::conj(phase);
                for (int i = 0; i < d; ++i) {
                    cd aip = a(i, p), air = a(i, r);
                    a(i, p) = aip * c + air * vrp;
                    a(i, r) = aip * vpr + air * c;
                }
                for (int i = 0; i < d; ++i) {
                    cd api = a(p, i), ari = a(r, i);
                    a(p, i) = c * api + std::conj(vrp) * ari;
                    a(r, i) = std::conj(vpr) * api + c * ari;
                }
                a(p, r) = 0.0;
                a(r, p) = 0.0;
                a(p, p) = cd{a(p, p).real(), 0.0};
                a(r, r) = cd{a(r, r).real(), 0.0};
                for (int i = 0; i < d; ++i) {
                    cd qip = q(i, p), qir = q(i, r);
                    q(i, p) = qip * c + qir * vrp;
                    q(i, r) = qip * vpr + qir * c;
                }
            }
        }
    }

    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition e;
    e.eigenvalues.resize(d);
    e.unitary = Matrix(d, d);
    for (int j = 0; j < d; ++j) {
        e.eigenvalues[j] = a(order[j], order[j]).real();
        for (int i = 0; i < d; ++i) e.unitary(i, j) = q(i, order[j]);
    }
    return e;
}

HermitianMatrix matrix_function(const HermitianMatrix& a, const std::function<double(double)>& f,
                                Interval domain) {
    EigenDecomposition e = eig_hermitian(a);
    for (double lam : e.eigenvalues) {
        if (!domain.contains(lam)) {
            std::ostringstream msg;
            msg << "matrix_function: eigenvalue " << lam << " outside function domain ["
                << domain.lo << ", " << domain.hi << "]";
            throw std::domain_error(msg.str());
        }
    }
    const int d = a.dim();
    Matrix fd(d, d);
    for (int i = 0; i < d; ++i) fd(i, i) = f(e.eigenvalues[i]);
    Matrix result = e.unitary * fd * e.unitary.adjoint();
    return HermitianMatrix::from_matrix(result, 1e-9 * (1.0 + result.max_abs_entry()));
}

HermitianMatrix matrix_exp(const HermitianMatrix& a) {
    return matrix_function(a, [](double x) { return std::exp(x); });
}

HermitianMatrix matrix_abs(const HermitianMatrix& a) {
    return matrix_function(a, [](double x) { return std::abs(x); });
}

namespace {

double schatten_from_singular_values(const std::vector<double>& sv, double p) {
    if (p < 1.0) throw std::invalid_argument("schatten_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0;
        for (double s : sv) m = std::max(m, s);
        return m;
    }
    double acc = 0;
    for (double s : sv) acc += std::pow(s, p);
    return std::pow(acc, 1.0 / p);
}

}  // namespace

double schatten_norm(const HermitianMatrix& a, double p) {
    EigenDecomposition e = eig_hermitian(a);
    std::vector<double> sv(e.eigenvalues.size());
    std::transform(e.eigenvalues.begin(), e.eigenvalues.end(), sv.begin(),
                   [](double x) { return std::abs(x); });
    return schatten_from_singular_values(sv, p);
}

double schatten_norm(const Matrix& b, double p) {
    if (b.rows() == b.cols()) {
        // Square input may be Hermitian already; fall through to the dilation
        // only when it is not.
        bool herm = true;
        for (int j = 0; j < b.rows() && herm; ++j)
            for (int k = 0; k <= j; ++k)
                if (std::abs(b(j, k) - std::conj(b(k, j))) > 1e-12 * (1.0 + b.max_abs_entry())) {
                    herm = false;
                    break;
                }
        if (herm) return schatten_norm(HermitianMatrix::from_matrix(b, 1e-12 * (1.0 + b.max_abs_entry())), p);
    }
    // Dilation spectrum is {+sigma_i, -sigma_i} plus |rows - cols| zeros, so
    // sum |lambda|^p = 2 sum sigma_i^p.
    EigenDecomposition e = eig_hermitian(hermitian_dilation(b));
    if (std::isinf(p)) {
        double m = 0;
        for (double lam : e.eigenvalues) m = std::max(m, std::abs(lam));
        return m;
    }
    if (p < 1.0) throw std::invalid_argument("schatten_norm: p must be >= 1");
    double acc = 0;
    for (double lam : e.eigenvalues) acc += std::pow(std::abs(lam), p);
    return std::pow(acc / 2.0, 1.0 / p);
}

double spectral_norm(const HermitianMatrix& a) {
    return schatten_norm(a, std::numeric_limits<double>::infinity());
}

double spectral_norm(const Matrix& b) {
    return schatten_norm(b, std::numeric_limits<double>::infinity());
}

std::pair<double, double> traces(const HermitianMatrix& a) {
    cd t = a.mat().trace();
    return {t.real(), t.real() / a.dim()};
}

bool psd_leq(const HermitianMatrix& a, const HermitianMatrix& b, double tol) {
    if (a.dim() != b.dim()) throw std::invalid_argument("psd_leq: dimension mismatch");
    EigenDecomposition e = eig_hermitian(b - a);
    return e.lambda_min() >= -tol;
}

HermitianMatrix hermitian_dilation(const Matrix& b) {
    const int d1 = b.rows(), d2 = b.cols();
    Matrix m(d1 + d2, d1 + d2);
    for (int i = 0; i < d1; ++i)
        for (int j = 0; j < d2; ++j) {
            m(i, d1 + j) = b(i, j);
            m(d1 + j, i) = std::conj(b(i, j));
        }
    return HermitianMatrix::from_matrix(m);
}

double matrix_entropy(const HermitianMatrix& w) {
    EigenDecomposition e = eig_hermitian(w);
    double acc = 0;
    for (double lam : e.eigenvalues) {
        if (lam < -1e-12)
            throw std::domain_error("matrix_entropy: negative eigenvalue " + std::to_string(lam));
        if (lam > 0) acc += lam * std::log(lam);
    }
    return acc / w.dim();
}

}  // namespace mcx
