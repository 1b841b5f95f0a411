#include "mcx/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mcx/io.hpp"
#include "mcx/linalg.hpp"
#include "mcx/rng.hpp"
#include "mcx/stein.hpp"

namespace mcx {

namespace {

constexpr double kWilsonZ = 3.0;  // 99.7% confidence
constexpr long long kChunk = 8192;

void validate_config(const SimulationConfig& config) {
    if (config.samples < 1) throw std::invalid_argument("config: samples must be >= 1");
    if (config.workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    auto sorted_nonneg = [](const std::vector<double>& g, const char* name) {
        for (size_t i = 0; i < g.size(); ++i) {
            if (i > 0 && g[i] < g[i - 1])
                throw std::invalid_argument(std::string("config: ") + name + " must be ascending");
        }
    };
    sorted_nonneg(config.t_grid, "t_grid");
    sorted_nonneg(config.theta_grid, "theta_grid");
    for (double t : config.t_grid)
        if (t < 0) throw std::invalid_argument("config: t_grid entries must be nonnegative");
}

double wilson_half_width(long long hits, long long n) {
    double z = kWilsonZ;
    double nn = static_cast<double>(n);
    double p = static_cast<double>(hits) / nn;
    double denom = 1.0 + z * z / nn;
    return z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
}

/// Per-chunk Monte Carlo totals; chunks are combined in index order so the
/// result is bit-identical for any worker count.
struct ChunkTotals {
    std::vector<long long> tail_hits;
    std::vector<double> mgf_sums;
    double lambda_sum = 0.0;
    double lambda_sq_sum = 0.0;
};

struct McTotals {
    std::vector<long long> tail_hits;
    std::vector<double> mgf_sums;
    double lambda_sum = 0.0;
    double lambda_sq_sum = 0.0;
    long long samples = 0;
};

McTotals run_monte_carlo(const EnsembleSpec& spec, const SimulationConfig& config) {
    const long long n = config.samples;
    const long long chunks = (n + kChunk - 1) / kChunk;
    std::vector<ChunkTotals> per_chunk(static_cast<size_t>(chunks));

    auto worker = [&](long long first) {
        for (long long c = first; c < chunks; c += config.workers) {
            CounterRng rng(config.seed, static_cast<std::uint64_t>(c));
            long long count = std::min<long long>(kChunk, n - c * kChunk);
            ChunkTotals totals;
            totals.tail_hits.assign(config.t_grid.size(), 0);
            totals.mgf_sums.assign(config.theta_grid.size(), 0.0);
            for (long long i = 0; i < count; ++i) {
                auto [state, x] = sample(spec, rng);
                double lam = eig_hermitian(x).lambda_max();
                totals.lambda_sum += lam;
                totals.lambda_sq_sum += lam * lam;
                for (size_t j = 0; j < config.t_grid.size(); ++j)
                    if (lam >= config.t_grid[j]) ++totals.tail_hits[j];
                for (size_t j = 0; j < config.theta_grid.size(); ++j)
                    totals.mgf_sums[j] += traces(matrix_exp(config.theta_grid[j] * x)).second;
            }
            per_chunk[static_cast<size_t>(c)] = std::move(totals);
        }
    };

    if (config.workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < config.workers; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }

    McTotals out;
    out.samples = n;
    out.tail_hits.assign(config.t_grid.size(), 0);
    out.mgf_sums.assign(config.theta_grid.size(), 0.0);
    for (const auto& c : per_chunk) {
        for (size_t j = 0; j < out.tail_hits.size(); ++j) out.tail_hits[j] += c.tail_hits[j];
        for (size_t j = 0; j < out.mgf_sums.size(); ++j) out.mgf_sums[j] += c.mgf_sums[j];
        out.lambda_sum += c.lambda_sum;
        out.lambda_sq_sum += c.lambda_sq_sum;
    }
    return out;
}

TailCurve curve_from_totals(const McTotals& totals, const std::vector<double>& t_grid) {
    TailCurve curve;
    curve.method = "monte_carlo";
    for (size_t j = 0; j < t_grid.size(); ++j) {
        double p = static_cast<double>(totals.tail_hits[j]) / totals.samples;
        curve.points.push_back({t_grid[j], p, wilson_half_width(totals.tail_hits[j], totals.samples)});
    }
    return curve;
}

TailCurve exact_curve(const OutcomeTable& table, const std::vector<double>& t_grid) {
    TailCurve curve;
    curve.method = "exact";
    for (double t : t_grid)
        curve.points.push_back({t, exact_statistic(table, {StatKind::tail, t}), 0.0});
    return curve;
}

}  // namespace

TailCurve simulate_tail(const EnsembleSpec& spec, const SimulationConfig& config) {
    validate_config(config);
    if (enumerable(spec, config.enumeration_limit))
        return exact_curve(enumerate_outcomes(spec, config.enumeration_limit), config.t_grid);
    return curve_from_totals(run_monte_carlo(spec, config), config.t_grid);
}

std::string tail_curve_csv(const TailCurve& curve) {
    std::string out = "t,p_hat,half_width,method\n";
    for (const auto& p : curve.points) {
        out += format_g(p.t) + "," + format_g(p.p_hat) + "," + format_g(p.half_width) + "," +
               curve.method + "\n";
    }
    return out;
}

std::map<double, double> empirical_trace_mgf(const EnsembleSpec& spec,
                                             const SimulationConfig& config) {
    validate_config(config);
    std::map<double, double> out;
    if (enumerable(spec, config.enumeration_limit)) {
        OutcomeTable table = enumerate_outcomes(spec, config.enumeration_limit);
        for (double theta : config.theta_grid)
            out[theta] = exact_statistic(table, {StatKind::trace_mgf, theta});
        return out;
    }
    McTotals totals = run_monte_carlo(spec, config);
    for (size_t j = 0; j < config.theta_grid.size(); ++j)
        out[config.theta_grid[j]] = totals.mgf_sums[j] / totals.samples;
    return out;
}

bool BoundReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.skipped && !c.verdict) return false;
    for (const auto& m : moment_checks)
        if (!m.pass) return false;
    return true;
}

bool PropertyReport::all_pass() const {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

namespace {

/// Family scalar summaries feeding psi presets and the Bernstein-shape bounds.
struct FamilyScalars {
    double sigma2 = 0.0;  // variance proxy for the report
    double R = 0.0;       // uniform norm bound on increments / summands
    std::vector<HermitianMatrix> hoeffding_bounds_sq;
    std::vector<HermitianMatrix> second_moments;
    HermitianMatrix coeff_squares_sum = HermitianMatrix::zero(1);
    bool has_coeff_squares = false;
};

FamilyScalars family_scalars(const EnsembleSpec& spec) {
    FamilyScalars s;
    const int d = spec.dim();
    switch (spec.family()) {
        case Family::independent_sum: {
            const auto& p = spec.payload_as<IndependentSumPayload>();
            HermitianMatrix var = HermitianMatrix::zero(d);
            for (const auto& sup : p.supports) {
                double rk = 0.0;
                HermitianMatrix m2 = HermitianMatrix::zero(d);
                for (const auto& wm : sup) {
                    rk = std::max(rk, spectral_norm(wm.matrix));
                    m2 += wm.weight * wm.matrix.square();
                }
                s.R = std::max(s.R, rk);
                HermitianMatrix bound_sq = HermitianMatrix::identity(d);
                bound_sq *= rk * rk;
                s.hoeffding_bounds_sq.push_back(bound_sq);
                s.second_moments.push_back(m2);
                var += m2;
            }
            s.sigma2 = spectral_norm(var);
            break;
        }
        case Family::rademacher_series: {
            const auto& p = spec.payload_as<RademacherSeriesPayload>();
            HermitianMatrix var = HermitianMatrix::zero(d);
            for (const auto& a : p.coefficients) {
                s.R = std::max(s.R, spectral_norm(a));
                HermitianMatrix sq = a.square();
                s.hoeffding_bounds_sq.push_back(sq);
                s.second_moments.push_back(sq);
                var += sq;
            }
            s.sigma2 = spectral_norm(var);
            s.coeff_squares_sum = var;
            s.has_coeff_squares = true;
            break;
        }
        case Family::rademacher_chaos: {
            const auto& p = spec.payload_as<RademacherChaosPayload>();
            int n = spec.coordinates();
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    if (j != k) s.R = std::max(s.R, spectral_norm(p.array[j][k]));
            break;
        }
        default: {
            const auto& a = spec.combinatorial_array();
            HermitianMatrix sq_sum = HermitianMatrix::zero(d);
            for (const auto& row : a)
                for (const auto& m : row) {
                    s.R = std::max(s.R, spectral_norm(m));
                    sq_sum += m.square();
                }
            s.sigma2 = spectral_norm(sq_sum) / static_cast<double>(spec.coordinates());
            break;
        }
    }
    return s;
}

double resolve_psi(const SimulationConfig& config, const EnsembleSpec& spec, double R) {
    if (config.psi) {
        if (*config.psi <= 0) throw std::invalid_argument("config: psi must be positive");
        return *config.psi;
    }
    std::string preset = config.psi_preset;
    if (preset.empty()) preset = spec.is_permutation_family() ? "inv_8R2" : "inv_R2";
    if (R <= 0) return 1.0;  // degenerate ensemble; any psi works
    if (preset == "inv_R2") return 1.0 / (R * R);
    if (preset == "inv_8R2") return 1.0 / (8.0 * R * R);
    throw std::invalid_argument("config: unknown psi preset '" + preset + "'");
}

TailCheck evaluate_tail_check(const std::string& name, const BoundSet& b, const BoundReport& rep) {
    TailCheck c;
    c.name = name;
    c.mean_upper = b.mean_upper;
    c.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& pt : rep.curve.points) {
        double bound = b.tail_upper(pt.t);
        double target = pt.p_hat - kWilsonZ * pt.half_width;
        double margin = bound - target;
        c.tail.push_back(bound);
        c.pass.push_back(margin >= -1e-12);
        c.min_margin = std::min(c.min_margin, margin);
        if (margin < -1e-12) c.verdict = false;
    }
    if (b.mean_upper < rep.mean_statistic - kWilsonZ * rep.mean_half_width - 1e-12)
        c.verdict = false;
    if (c.tail.empty()) c.min_margin = 0.0;
    return c;
}

TailCheck skipped_check(const std::string& name, const std::string& reason) {
    TailCheck c;
    c.name = name;
    c.skipped = true;
    c.skip_reason = reason;
    return c;
}

bool moment_pass(double statistic, double bound) {
    return statistic <= bound * (1.0 + 1e-12) + 1e-12;
}

}  // namespace

BoundReport verify_bounds(const EnsembleSpec& spec, const SimulationConfig& config) {
    validate_config(config);
    SteinPairModel model(spec);

    BoundReport rep;
    rep.d = spec.dim();
    rep.n = spec.coordinates();
    rep.alpha = model.alpha();
    rep.t_grid = config.t_grid;

    const bool exact = enumerable(spec, config.enumeration_limit);
    OutcomeTable table;
    if (exact) {
        table = enumerate_outcomes(spec, config.enumeration_limit);
        rep.curve = exact_curve(table, config.t_grid);
        rep.mean_statistic = exact_statistic(table, {StatKind::mean_lambda_max, 0.0});
        rep.mean_half_width = 0.0;
    } else {
        McTotals totals = run_monte_carlo(spec, config);
        rep.curve = curve_from_totals(totals, config.t_grid);
        double mean = totals.lambda_sum / totals.samples;
        double var = std::max(0.0, totals.lambda_sq_sum / totals.samples - mean * mean);
        rep.mean_statistic = mean;
        rep.mean_half_width = kWilsonZ * std::sqrt(var / totals.samples);
    }

    FamilyScalars fs = family_scalars(spec);
    if (spec.family() == Family::rademacher_chaos && exact) {
        // sigma2 for the summary: norm of E X^2, available exactly via the
        // mean of the conditional variance.
        HermitianMatrix mean_delta = HermitianMatrix::zero(spec.dim());
        for_each_state(
            spec,
            [&](const EnsembleState& st, double w) {
                mean_delta += w * model.conditional_variance(st);
            },
            config.enumeration_limit);
        fs.sigma2 = spectral_norm(mean_delta);
    }
    rep.sigma2 = fs.sigma2;
    rep.R = fs.R;
    rep.psi = resolve_psi(config, spec, fs.R);
    rep.r_psi = exact ? r_psi_exact(model, rep.psi, config.enumeration_limit)
                      : r_psi_monte_carlo(model, rep.psi,
                                          static_cast<int>(std::min<long long>(config.samples, 20000)),
                                          config.seed);

    const Family fam = spec.family();
    const bool sum_family = fam == Family::independent_sum || fam == Family::rademacher_series;

    // Hoeffding.
    if (sum_family) {
        auto [s2, b] = hoeffding(fs.hoeffding_bounds_sq, fs.second_moments);
        (void)s2;
        rep.checks.push_back(evaluate_tail_check("matrix_hoeffding", b, rep));
    } else {
        rep.checks.push_back(
            skipped_check("matrix_hoeffding", "applies to independent sums and series"));
    }

    // Bernstein.
    if (sum_family) {
        if (fs.R > 0) {
            rep.checks.push_back(
                evaluate_tail_check("matrix_bernstein", bernstein(fs.sigma2, fs.R, spec.dim()), rep));
        } else {
            rep.checks.push_back(skipped_check("matrix_bernstein", "degenerate ensemble (R = 0)"));
        }
    } else {
        rep.checks.push_back(
            skipped_check("matrix_bernstein", "applies to independent sums and series"));
    }

    // Refined concentration from the measured r(psi); applicable everywhere.
    rep.checks.push_back(evaluate_tail_check(
        "refined_concentration", refined_concentration(rep.r_psi, rep.psi, spec.dim()), rep));

    // Combinatorial Bernstein.
    if (spec.is_permutation_family()) {
        auto cb = combinatorial_bernstein(spec.combinatorial_array(), spec.dim());
        rep.sigma2 = cb.sigma2;
        rep.R = cb.R;
        rep.checks.push_back(evaluate_tail_check("combinatorial_bernstein", cb.bounds, rep));
    } else {
        rep.checks.push_back(
            skipped_check("combinatorial_bernstein", "applies to permutation families"));
    }

    // Bounded differences for the self-reproducing chaos (s = 2).
    if (fam == Family::rademacher_chaos) {
        const auto& p = spec.payload_as<RademacherChaosPayload>();
        const int n = spec.coordinates();
        double L = 0.0;
        for (int k = 0; k < n; ++k) {
            double lk = 0.0;
            if (exact) {
                for_each_state(
                    spec,
                    [&](const EnsembleState& st, double) {
                        HermitianMatrix bk = HermitianMatrix::zero(spec.dim());
                        for (int j = 0; j < n; ++j)
                            if (j != k) bk += static_cast<double>(st[j]) * p.array[j][k];
                        lk = std::max(lk, 2.0 * spectral_norm(bk.square()));
                    },
                    config.enumeration_limit);
            } else {
                double norm_sum = 0.0;
                for (int j = 0; j < n; ++j)
                    if (j != k) norm_sum += spectral_norm(p.array[j][k]);
                lk = 2.0 * norm_sum * norm_sum;
            }
            L += lk;
        }
        rep.checks.push_back(
            evaluate_tail_check("bounded_differences", bounded_differences(2.0, L, spec.dim()), rep));
    } else {
        rep.checks.push_back(
            skipped_check("bounded_differences", "applies to self-reproducing chaos models"));
    }

    // Schatten-moment comparisons need exact enumeration.
    if (exact) {
        for (double p : {1.0, 1.5, 2.0}) {
            double delta_moment = 0.0;
            for_each_state(
                spec,
                [&](const EnsembleState& st, double w) {
                    delta_moment +=
                        w * std::pow(schatten_norm(model.conditional_variance(st), p), p);
                },
                config.enumeration_limit);
            double stat = std::pow(exact_statistic(table, {StatKind::schatten_moment, 2.0 * p}),
                                   1.0 / (2.0 * p));
            double bound = bdg_bound(p, delta_moment);
            rep.moment_checks.push_back({"bdg", p, stat, bound, moment_pass(stat, bound)});
        }
        if (fs.has_coeff_squares) {
            for (double p : {1.0, 1.5, 2.0}) {
                double stat = std::pow(exact_statistic(table, {StatKind::schatten_moment, 2.0 * p}),
                                       1.0 / (2.0 * p));
                double bound = khintchine(p, fs.coeff_squares_sum);
                rep.moment_checks.push_back({"khintchine", p, stat, bound, moment_pass(stat, bound)});
            }
        }
        if (sum_family) {
            HermitianMatrix var = HermitianMatrix::zero(spec.dim());
            for (const auto& m : fs.second_moments) var += m;
            HermitianMatrix var_root = matrix_function(
                var, [](double x) { return std::sqrt(std::max(x, 0.0)); },
                Interval{-1e-10, std::numeric_limits<double>::infinity()});
            for (double p : {1.0, 1.5, 2.0}) {
                double stat = std::pow(exact_statistic(table, {StatKind::schatten_moment, 4.0 * p}),
                                       1.0 / (4.0 * p));
                double summand_moments = 0.0;
                if (fam == Family::rademacher_series) {
                    for (const auto& a : spec.payload_as<RademacherSeriesPayload>().coefficients)
                        summand_moments += std::pow(schatten_norm(a, 4.0 * p), 4.0 * p);
                } else {
                    for (const auto& sup : spec.payload_as<IndependentSumPayload>().supports)
                        for (const auto& wm : sup)
                            summand_moments +=
                                wm.weight * std::pow(schatten_norm(wm.matrix, 4.0 * p), 4.0 * p);
                }
                double bound =
                    rosenthal_hermitian(p, schatten_norm(var_root, 4.0 * p), summand_moments);
                rep.moment_checks.push_back({"rosenthal", p, stat, bound, moment_pass(stat, bound)});
            }
        }
    }

    return rep;
}

std::string bound_report_json(const BoundReport& rep) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"ensemble\": {\n";
    out << "    \"d\": " << rep.d << ",\n";
    out << "    \"n\": " << rep.n << ",\n";
    out << "    \"alpha\": " << format_g(rep.alpha) << ",\n";
    out << "    \"sigma2\": " << format_g(rep.sigma2) << ",\n";
    out << "    \"R\": " << format_g(rep.R) << ",\n";
    out << "    \"psi\": " << format_g(rep.psi) << ",\n";
    out << "    \"r_psi\": " << format_g(rep.r_psi) << "\n";
    out << "  },\n";
    out << "  \"method\": " << json_quote(rep.curve.method) << ",\n";
    out << "  \"tail\": [";
    for (size_t i = 0; i < rep.curve.points.size(); ++i) {
        const auto& p = rep.curve.points[i];
        if (i) out << ", ";
        out << "[" << format_g(p.t) << ", " << format_g(p.p_hat) << ", " << format_g(p.half_width)
            << "]";
    }
    out << "],\n";
    out << "  \"mean_lambda_max\": " << format_g(rep.mean_statistic) << ",\n";
    out << "  \"mean_half_width\": " << format_g(rep.mean_half_width) << ",\n";
    out << "  \"checks\": [\n";
    for (size_t i = 0; i < rep.checks.size(); ++i) {
        const auto& c = rep.checks[i];
        out << "    {\n";
        out << "      \"name\": " << json_quote(c.name) << ",\n";
        if (c.skipped) {
            out << "      \"skipped\": true,\n";
            out << "      \"reason\": " << json_quote(c.skip_reason) << "\n";
        } else {
            out << "      \"skipped\": false,\n";
            out << "      \"mean_upper\": " << format_g(c.mean_upper) << ",\n";
            out << "      \"tail\": [";
            for (size_t j = 0; j < c.tail.size(); ++j) {
                if (j) out << ", ";
                out << "[" << format_g(rep.t_grid[j]) << ", " << format_g(c.tail[j]) << "]";
            }
            out << "],\n";
            out << "      \"min_margin\": " << format_g(c.min_margin) << ",\n";
            out << "      \"verdict\": " << json_quote(c.verdict ? "PASS" : "FAIL") << "\n";
        }
        out << "    }" << (i + 1 < rep.checks.size() ? "," : "") << "\n";
    }
    out << "  ],\n";
    out << "  \"moment_checks\": [\n";
    for (size_t i = 0; i < rep.moment_checks.size(); ++i) {
        const auto& m = rep.moment_checks[i];
        out << "    {\"name\": " << json_quote(m.name) << ", \"p\": " << format_g(m.p)
            << ", \"statistic\": " << format_g(m.statistic) << ", \"bound\": " << format_g(m.bound)
            << ", \"verdict\": " << json_quote(m.pass ? "PASS" : "FAIL") << "}"
            << (i + 1 < rep.moment_checks.size() ? "," : "") << "\n";
    }
    out << "  ],\n";
    out << "  \"verdict\": " << json_quote(rep.all_pass() ? "PASS" : "FAIL") << "\n";
    out << "}\n";
    return out.str();
}

std::string property_report_text(const PropertyReport& report) {
    std::ostringstream out;
    for (const auto& r : report.results) {
        out << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.cases << " cases)";
        if (!r.pass) out << "\n      counterexample: " << r.counterexample;
        out << "\n";
    }
    out << (report.all_pass() ? "all properties PASS" : "PROPERTY FAILURES PRESENT") << "\n";
    return out.str();
}

}  // namespace mcx
