#include <cmath>
#include <map>
#include <sstream>

#include "mcx/io.hpp"
#include "mcx/linalg.hpp"
#include "mcx/rng.hpp"
#include "mcx/stein.hpp"
#include "mcx/verify.hpp"

namespace mcx {

namespace {

const int kDims[] = {1, 2, 3, 5, 8};

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

HermitianMatrix random_psd(CounterRng& rng, int d) { return random_hermitian(rng, d).square(); }

Matrix random_rect(CounterRng& rng, int r, int c) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cd{rng.normal(), rng.normal()};
    return m;
}

double real_trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
    return (a.mat() * b.mat()).trace().real();
}

std::string describe(const HermitianMatrix& m) {
    std::ostringstream out;
    out << m.dim() << "x" << m.dim() << " [";
    for (int j = 0; j < m.dim(); ++j)
        for (int k = 0; k < m.dim(); ++k)
            out << format_g(m(j, k).real()) << (m(j, k).imag() ? "+" + format_g(m(j, k).imag()) + "i" : "")
                << ((j + 1 == m.dim() && k + 1 == m.dim()) ? "]" : " ");
    return out.str();
}

bool leq_slack(double lhs, double rhs, double slack = 1e-9) {
    return lhs <= rhs + slack * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

/// Small random spec for the probabilistic properties; always enumerable.
EnsembleSpec random_spec(CounterRng& rng) {
    int family = static_cast<int>(rng.uniform_below(6));
    int d = 1 + static_cast<int>(rng.uniform_below(2));
    int n = 2 + static_cast<int>(rng.uniform_below(2));
    switch (family) {
        case 0: {
            IndependentSumPayload p;
            for (int k = 0; k < n; ++k) {
                HermitianMatrix m = random_hermitian(rng, d);
                if (rng.uniform_below(2) == 0) {
                    p.supports.push_back({{0.5, m}, {0.5, -1.0 * m}});
                } else {
                    // Three-point centered support with unequal weights.
                    HermitianMatrix m2 = random_hermitian(rng, d);
                    HermitianMatrix m3 = (-1.0 / 0.5) * (0.25 * m + 0.25 * m2);
                    p.supports.push_back({{0.25, m}, {0.25, m2}, {0.5, m3}});
                }
            }
            return EnsembleSpec(Family::independent_sum, std::move(p));
        }
        case 1: {
            RademacherSeriesPayload p;
            for (int k = 0; k < n; ++k) p.coefficients.push_back(random_hermitian(rng, d));
            return EnsembleSpec(Family::rademacher_series, std::move(p));
        }
        case 2: {
            CombinatorialSumPayload p;
            p.array.assign(n, std::vector<HermitianMatrix>(n, HermitianMatrix::zero(d)));
            HermitianMatrix total = HermitianMatrix::zero(d);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    p.array[j][k] = random_hermitian(rng, d);
                    total += p.array[j][k];
                }
            total *= 1.0 / (n * n);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) p.array[j][k] -= total;
            return EnsembleSpec(Family::combinatorial_sum, std::move(p));
        }
        case 3: {
            SamplingWithoutReplacementPayload p;
            for (int k = 0; k < n; ++k) p.pool.push_back(random_hermitian(rng, d));
            p.sample_count = 1 + static_cast<int>(rng.uniform_below(n));
            return EnsembleSpec(Family::sampling_without_replacement, std::move(p));
        }
        case 4: {
            PermutedInnerProductPayload p;
            int s = 1 + static_cast<int>(rng.uniform_below(2));
            for (int k = 0; k < n; ++k) {
                p.left.push_back(random_rect(rng, d, s));
                p.right.push_back(random_rect(rng, s, d));
            }
            return EnsembleSpec(Family::permuted_inner_product, std::move(p));
        }
        default: {
            RademacherChaosPayload p;
            p.array.assign(n, std::vector<HermitianMatrix>(n, HermitianMatrix::zero(d)));
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k) {
                    p.array[j][k] = random_hermitian(rng, d);
                    p.array[k][j] = p.array[j][k];
                }
            return EnsembleSpec(Family::rademacher_chaos, std::move(p));
        }
    }
}

std::string fingerprint(const HermitianMatrix& m) {
    std::ostringstream out;
    for (int j = 0; j < m.dim(); ++j)
        for (int k = 0; k < m.dim(); ++k) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.9f,%.9f;", m(j, k).real(), m(j, k).imag());
            out << buf;
        }
    return out.str();
}

using ExpHook = std::function<HermitianMatrix(const HermitianMatrix&, double)>;

HermitianMatrix honest_exp(const HermitianMatrix& a, double theta) {
    return matrix_exp(theta * a);
}

/// Mutation-test stand-in: pairs eigenvalues with the wrong eigenvectors.
HermitianMatrix scrambled_exp(const HermitianMatrix& a, double theta) {
    EigenDecomposition e = eig_hermitian(a);
    int d = a.dim();
    Matrix diag(d, d);
    for (int i = 0; i < d; ++i) diag(i, i) = std::exp(theta * e.eigenvalues[d - 1 - i]);
    return HermitianMatrix::from_matrix(e.unitary * diag * e.unitary.adjoint(), 1e-8);
}

struct Runner {
    CounterRng rng;
    int cases;
    PropertyReport& report;

    void run(const std::string& name, const std::function<std::string(CounterRng&)>& one_case) {
        PropertyResult r;
        r.name = name;
        CounterRng local = rng.split(std::hash<std::string>{}(name));
        for (int i = 0; i < cases; ++i) {
            ++r.cases;
            std::string witness = one_case(local);
            if (!witness.empty()) {
                r.pass = false;
                r.counterexample = "case " + std::to_string(i) + ": " + witness;
                break;
            }
        }
        report.results.push_back(std::move(r));
    }

    int dim(CounterRng& r) { return kDims[r.uniform_below(5)]; }
};

}  // namespace

PropertyReport property_suite(std::uint64_t seed, int cases) {
    return property_suite(seed, cases, FaultInjection{});
}

PropertyReport property_suite(std::uint64_t seed, int cases, const FaultInjection& faults) {
    if (cases < 1) throw std::invalid_argument("property_suite: cases must be >= 1");
    PropertyReport report;
    Runner run{CounterRng(seed), cases, report};
    ExpHook mexp = faults.scramble_matrix_exp ? ExpHook(scrambled_exp) : ExpHook(honest_exp);

    // Trace inequality for the exponential family, both signs of theta.
    run.run("mvti_exponential", [&run, mexp](CounterRng& r) -> std::string {
        int d = run.dim(r);
        HermitianMatrix a = random_hermitian(r, d), b = random_hermitian(r, d);
        for (double sign : {1.0, -1.0}) {
            double theta = sign * (0.1 + r.uniform01());
            HermitianMatrix ea = mexp(a, theta), eb = mexp(b, theta);
            HermitianMatrix diff = a - b;
            double lhs = (diff.mat() * (ea.mat() - eb.mat())).trace().real() / d;
            double rhs =
                0.5 * theta * (diff.square().mat() * (ea.mat() + eb.mat())).trace().real() / d;
            bool ok = sign > 0 ? leq_slack(lhs, rhs) : leq_slack(rhs, lhs);
            if (!ok)
                return "theta=" + format_g(theta) + " lhs=" + format_g(lhs) +
                       " rhs=" + format_g(rhs) + " A=" + describe(a) + " B=" + describe(b);
        }
        return "";
    });

    // Trace inequality for the signed power family, p >= 1.5.
    run.run("mvti_power", [&run](CounterRng& r) -> std::string {
        int d = run.dim(r);
        double p = std::vector<double>{1.5, 2.0, 3.0}[r.uniform_below(3)];
        HermitianMatrix a = random_hermitian(r, d), b = random_hermitian(r, d);
        auto g = [p](double x) { return (x < 0 ? -1.0 : 1.0) * std::pow(std::abs(x), 2 * p - 1); };
        auto hp = [p](double x) { return (2 * p - 1) * std::pow(std::abs(x), 2 * p - 2); };
        HermitianMatrix ga = matrix_function(a, g), gb = matrix_function(b, g);
        HermitianMatrix ha = matrix_function(a, hp), hb = matrix_function(b, hp);
        HermitianMatrix diff = a - b;
        double lhs = (diff.mat() * (ga.mat() - gb.mat())).trace().real() / d;
        double rhs = 0.5 * (diff.square().mat() * (ha.mat() + hb.mat())).trace().real() / d;
        if (!leq_slack(lhs, rhs))
            return "p=" + format_g(p) + " lhs=" + format_g(lhs) + " rhs=" + format_g(rhs) +
                   " A=" + describe(a) + " B=" + describe(b);
        return "";
    });

    // Operator Jensen over empirical measures: mean(X)^2 <= mean(X^2).
    run.run("operator_jensen", [&run](CounterRng& r) -> std::string {
        int d = run.dim(r);
        int count = 2 + static_cast<int>(r.uniform_below(4));
        HermitianMatrix mean = HermitianMatrix::zero(d), mean_sq = HermitianMatrix::zero(d);
        for (int i = 0; i < count; ++i) {
            HermitianMatrix x = random_hermitian(r, d);
            mean += (1.0 / count) * x;
            mean_sq += (1.0 / count) * x.square();
        }
        if (!psd_leq(mean.square(), mean_sq, 1e-10))
            return "mean=" + describe(mean) + " mean_sq=" + describe(mean_sq);
        return "";
    });

    // Convexity of the matrix square.
    run.run("square_convexity", [&run](CounterRng& r) -> std::string {
        int d = run.dim(r);
        HermitianMatrix a = random_hermitian(r, d), b = random_hermitian(r, d);
        HermitianMatrix mid = 0.5 * (a + b);
        HermitianMatrix avg_sq = 0.5 * (a.square() + b.square());
        if (!psd_leq(mid.square(), avg_sq, 1e-10))
            return "A=" + describe(a) + " B=" + describe(b);
        return "";
    });

    // Hoelder trace inequality over conjugate exponent pairs.
    run.run("holder_trace", [&run](CounterRng& r) -> std::string {
        int d = run.dim(r);
        const std::pair<double, double> pairs[] = {
            {1.0, std::numeric_limits<double>::infinity()}, {2.0, 2.0}, {3.0, 1.5}};
        auto [p, q] = pairs[r.uniform_below(3)];
        HermitianMatrix b = random_hermitian(r, d), c = random_hermitian(r, d);
        double lhs = real_trace_product(b, c);
        double rhs = schatten_norm(b, p) * schatten_norm(c, q);
        if (!leq_slack(lhs, rhs))
            return "p=" + format_g(p) + " lhs=" + format_g(lhs) + " rhs=" + format_g(rhs);
        return "";
    });

    // Schwarz-type inequality for finite psd sequences.
    run.run("schwarz_type", [&run](CounterRng& r) -> std::string {
        int d = run.dim(r);
        double p = std::vector<double>{1.0, 1.5, 2.0}[r.uniform_below(3)];
        int count = 1 + static_cast<int>(r.uniform_below(4));
        std::vector<HermitianMatrix> mats;
        HermitianMatrix sum = HermitianMatrix::zero(d), sum_sq = HermitianMatrix::zero(d);
        double moments = 0.0;
        for (int i = 0; i < count; ++i) {
            mats.push_back(random_psd(r, d));
            sum += mats.back();
            sum_sq += mats.back().square();
            moments += std::pow(schatten_norm(mats.back(), 2 * p), 2 * p);
        }
        double lhs = schatten_norm(sum_sq, p);
        double rhs = std::pow(moments, 1.0 / (2 * p)) * schatten_norm(sum, 2 * p);
        if (!leq_slack(lhs, rhs))
            return "p=" + format_g(p) + " lhs=" + format_g(lhs) + " rhs=" + format_g(rhs);
        return "";
    });

    // Young inequality for matrix entropy.
    run.run("entropy_young", [&run](CounterRng& r) -> std::string {
        int d = run.dim(r);
        HermitianMatrix v = random_hermitian(r, d);
        HermitianMatrix p = random_psd(r, d) + 0.01 * HermitianMatrix::identity(d);
        double tr = traces(p).first;
        HermitianMatrix w = (static_cast<double>(d) / tr) * p;  // normalized trace 1
        double lhs = real_trace_product(v, w) / d;
        double rhs = std::log(traces(matrix_exp(v)).second) + matrix_entropy(w);
        if (!leq_slack(lhs, rhs))
            return "lhs=" + format_g(lhs) + " rhs=" + format_g(rhs) + " V=" + describe(v);
        return "";
    });

    // Spectral mapping: eigenvalues of f(A) are f applied to eigenvalues of A.
    run.run("spectral_mapping", [&run](CounterRng& r) -> std::string {
        int d = run.dim(r);
        HermitianMatrix a = random_hermitian(r, d);
        auto f = [](double x) { return std::exp(0.5 * x) + x * x; };
        std::vector<double> mapped = eig_hermitian(a).eigenvalues;
        for (double& x : mapped) x = f(x);
        std::sort(mapped.begin(), mapped.end());
        std::vector<double> actual = eig_hermitian(matrix_function(a, f)).eigenvalues;
        for (int i = 0; i < d; ++i)
            if (std::abs(mapped[i] - actual[i]) > 1e-10 * std::max(1.0, std::abs(mapped[i])))
                return "eigenvalue " + std::to_string(i) + ": " + format_g(mapped[i]) + " vs " +
                       format_g(actual[i]);
        return "";
    });

    // Dilation: norm preservation and the block-diagonal square identity.
    run.run("dilation_identities", [&run](CounterRng& r) -> std::string {
        int d1 = run.dim(r), d2 = run.dim(r);
        Matrix b = random_rect(r, d1, d2);
        HermitianMatrix dil = hermitian_dilation(b);
        double nb = spectral_norm(b), nd = spectral_norm(dil);
        if (std::abs(nb - nd) > 1e-10 * std::max(1.0, nb))
            return "norms " + format_g(nb) + " vs " + format_g(nd);
        HermitianMatrix sq = dil.square();
        Matrix bbs = b * b.adjoint(), bsb = b.adjoint() * b;
        for (int i = 0; i < d1 + d2; ++i)
            for (int j = 0; j < d1 + d2; ++j) {
                cd want{};
                if (i < d1 && j < d1) want = bbs(i, j);
                if (i >= d1 && j >= d1) want = bsb(i - d1, j - d1);
                if (std::abs(sq(i, j) - want) > 1e-12 * std::max(1.0, nb * nb))
                    return "square block mismatch at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")";
            }
        return "";
    });

    // Exact identity E[X - X' | Z] = alpha X over fuzzed models and states.
    run.run("stein_residual", [](CounterRng& r) -> std::string {
        EnsembleSpec spec = random_spec(r);
        SteinPairModel model(spec);
        auto [state, x] = sample(spec, r);
        (void)x;
        double res = model.stein_residual(state);
        if (res > 1e-10)
            return family_name(spec.family()) + " residual " + format_g(res);
        return "";
    });

    // Joint law of (X, X') is symmetric under swap.
    run.run("exchangeable_pair_symmetry", [](CounterRng& r) -> std::string {
        EnsembleSpec spec = random_spec(r);
        SteinPairModel model(spec);
        std::map<std::pair<std::string, std::string>, double> law;
        for_each_state(spec, [&](const EnsembleState& st, double w) {
            std::string fx = fingerprint(spec.assemble(st));
            for (const auto& o : model.replacement_outcomes(st))
                law[{fx, fingerprint(spec.assemble(o.state))}] += w * o.weight;
        });
        for (const auto& [key, weight] : law) {
            auto it = law.find({key.second, key.first});
            double other = it == law.end() ? 0.0 : it->second;
            if (std::abs(weight - other) > 1e-12)
                return family_name(spec.family()) + " asymmetric pair weight " + format_g(weight) +
                       " vs " + format_g(other);
        }
        return "";
    });

    // Exchange identity E[X F(X)] = (2 alpha)^-1 E[(X - X')(F(X) - F(X'))].
    run.run("exchange_identity", [](CounterRng& r) -> std::string {
        EnsembleSpec spec = random_spec(r);
        SteinPairModel model(spec);
        int d = spec.dim();
        const char* fnames[] = {"identity", "square", "exp(0.3x)"};
        int which = static_cast<int>(r.uniform_below(3));
        auto f = [which](const HermitianMatrix& x) {
            if (which == 0) return x;
            if (which == 1) return x.square();
            return matrix_exp(0.3 * x);
        };
        Matrix lhs(d, d), rhs(d, d);
        double scale = 0.0;
        for_each_state(spec, [&](const EnsembleState& st, double w) {
            HermitianMatrix x = spec.assemble(st);
            HermitianMatrix fx = f(x);
            lhs += w * (x.mat() * fx.mat());
            scale = std::max(scale, x.max_abs_entry());
            for (const auto& o : model.replacement_outcomes(st)) {
                HermitianMatrix xp = spec.assemble(o.state);
                rhs += (w * o.weight) * ((x.mat() - xp.mat()) * (fx.mat() - f(xp).mat()));
            }
        });
        rhs *= cd{1.0 / (2.0 * model.alpha()), 0.0};
        double err = (lhs - rhs).max_abs_entry();
        if (err > 1e-9 * std::max(1.0, scale * scale))
            return family_name(spec.family()) + " F=" + fnames[which] + " deviation " +
                   format_g(err);
        return "";
    });

    // E Delta_X = E X^2 entrywise.
    run.run("mean_conditional_variance", [](CounterRng& r) -> std::string {
        EnsembleSpec spec = random_spec(r);
        SteinPairModel model(spec);
        HermitianMatrix mean_delta = HermitianMatrix::zero(spec.dim());
        HermitianMatrix mean_sq = HermitianMatrix::zero(spec.dim());
        double scale = 0.0;
        for_each_state(spec, [&](const EnsembleState& st, double w) {
            mean_delta += w * model.conditional_variance(st);
            HermitianMatrix x = spec.assemble(st);
            mean_sq += w * x.square();
            scale = std::max(scale, x.max_abs_entry());
        });
        double err = (mean_delta - mean_sq).max_abs_entry();
        if (err > 1e-10 * std::max(1.0, scale * scale))
            return family_name(spec.family()) + " deviation " + format_g(err);
        return "";
    });

    // Delta_X <= v I (worst case v) forces (alpha/2) X^2 <= v I.
    run.run("boundedness_consequence", [](CounterRng& r) -> std::string {
        EnsembleSpec spec = random_spec(r);
        SteinPairModel model(spec);
        double v = 0.0;
        for_each_state(spec, [&](const EnsembleState& st, double) {
            v = std::max(v, spectral_norm(model.conditional_variance(st)));
        });
        HermitianMatrix cap = v * HermitianMatrix::identity(spec.dim());
        std::string failure;
        for_each_state(spec, [&](const EnsembleState& st, double) {
            if (!failure.empty()) return;
            HermitianMatrix lhs = (model.alpha() / 2.0) * spec.assemble(st).square();
            if (!psd_leq(lhs, cap, 1e-10 * std::max(1.0, v)))
                failure = family_name(spec.family()) + " violates (alpha/2)X^2 <= vI, v=" +
                          format_g(v);
        });
        return failure;
    });

    // theta_star solves r theta / (1 - theta^2/psi) = t.
    run.run("theta_star_plugback", [](CounterRng& r) -> std::string {
        double t = 0.05 + 10.0 * r.uniform01();
        double psi = 0.05 + 10.0 * r.uniform01();
        double rr = 0.05 + 10.0 * r.uniform01();
        double th = theta_star(t, psi, rr);
        if (!(th > 0.0) || !(th < std::sqrt(psi)))
            return "theta=" + format_g(th) + " outside (0, sqrt(psi))";
        double back = rr * th / (1.0 - th * th / psi);
        if (std::abs(back - t) > 1e-10 * t)
            return "t=" + format_g(t) + " psi=" + format_g(psi) + " r=" + format_g(rr) +
                   " residual " + format_g(back - t);
        return "";
    });

    return report;
}

}  // namespace mcx
