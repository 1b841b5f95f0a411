#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcx/bounds.hpp"
#include "mcx/ensembles.hpp"

namespace mcx {

/// Shared knobs for simulation and bound verification.
struct SimulationConfig {
    long long samples = 100000;
    std::uint64_t seed = 0;
    std::vector<double> t_grid;
    std::vector<double> theta_grid;
    std::optional<double> psi;  // explicit value wins over the preset
    std::string psi_preset;     // "", "inv_R2", or "inv_8R2"
    int workers = 1;
    std::uint64_t enumeration_limit = 0;  // 0 -> family default
};

/// Tail probabilities of lambda_max over a threshold grid.  half_width is
/// zero for the exact method and the Wilson-score half-width at the 99.7%
/// level for Monte Carlo.
struct TailCurve {
    struct Point {
        double t;
        double p_hat;
        double half_width;
    };
    std::vector<Point> points;
    std::string method;  // "exact" or "monte_carlo"
};

/// Exact curve on enumerable specs, otherwise chunk-deterministic parallel
/// Monte Carlo: identical output for any worker count at a fixed seed.
TailCurve simulate_tail(const EnsembleSpec& spec, const SimulationConfig& config);

/// CSV with header `t,p_hat,half_width,method`, LF endings, %.12g numbers.
std::string tail_curve_csv(const TailCurve& curve);

/// One closed-form bound pitted against the measured tail curve and mean.
struct TailCheck {
    std::string name;
    bool skipped = false;
    std::string skip_reason;
    double mean_upper = 0.0;
    std::vector<double> tail;  // values on the t grid; empty when skipped
    std::vector<bool> pass;    // per grid point
    double min_margin = 0.0;   // min over t of bound - (p_hat - 3 half_width)
    bool verdict = true;
};

/// One Schatten-moment bound compared against an exact enumerated moment.
struct MomentCheck {
    std::string name;
    double p = 0.0;
    double statistic = 0.0;
    double bound = 0.0;
    bool pass = true;
};

struct BoundReport {
    int d = 0;
    int n = 0;
    double alpha = 0.0;
    double sigma2 = 0.0;
    double R = 0.0;
    double psi = 0.0;
    double r_psi = 0.0;
    std::vector<double> t_grid;
    TailCurve curve;
    double mean_statistic = 0.0;
    double mean_half_width = 0.0;
    std::vector<TailCheck> checks;
    std::vector<MomentCheck> moment_checks;

    bool all_pass() const;
};

/// Computes every applicable bound for the spec's family and compares each
/// against exact or Monte Carlo statistics.  Inapplicable bounds appear as
/// skipped entries with a reason.
BoundReport verify_bounds(const EnsembleSpec& spec, const SimulationConfig& config);

/// JSON rendering of a BoundReport (%.12g, stable field order).
std::string bound_report_json(const BoundReport& report);

/// theta -> E tr-bar exp(theta X) on config.theta_grid, exact or Monte Carlo.
std::map<double, double> empirical_trace_mgf(const EnsembleSpec& spec,
                                             const SimulationConfig& config);

struct PropertyResult {
    std::string name;
    int cases = 0;
    bool pass = true;
    std::string counterexample;  // first failing witness, empty on pass
};

struct PropertyReport {
    std::vector<PropertyResult> results;
    bool all_pass() const;
};

/// Mutation-testing hook: deliberately corrupts a dependency of the property
/// suite so the suite's power to detect bugs can itself be tested.
struct FaultInjection {
    // Pairs eigenvalues with the wrong eigenvectors inside the matrix
    // exponential used by the trace inequalities.
    bool scramble_matrix_exp = false;
};

/// Runs every algebraic and probabilistic invariant over fuzzed inputs of
/// dimensions {1,2,3,5,8}; at least `cases` trials per property.
PropertyReport property_suite(std::uint64_t seed, int cases);
PropertyReport property_suite(std::uint64_t seed, int cases, const FaultInjection& faults);

std::string property_report_text(const PropertyReport& report);

}  // namespace mcx
