#pragma once

#include <cstdint>
#include <optional>

#include "mcx/ensembles.hpp"
#include "mcx/matrix.hpp"
#include "mcx/rng.hpp"

namespace mcx {

/// One realized exchangeable draw (X, X').
struct PairSample {
    EnsembleState state;
    HermitianMatrix x;
    HermitianMatrix x_prime;
};

/// One replacement outcome (state', weight) of the exchange construction
/// applied to a fixed auxiliary state.
struct ReplacementOutcome {
    EnsembleState state;
    double weight;
};

/// An ensemble together with its exchangeable-pair construction: scale
/// factor, pair sampler, and exact conditional-variance evaluator.
class SteinPairModel {
public:
    explicit SteinPairModel(EnsembleSpec spec);

    const EnsembleSpec& spec() const { return spec_; }
    double alpha() const { return alpha_; }
    int dim() const { return spec_.dim(); }

    /// Draws the auxiliary state (coordinates ascending), then the exchange
    /// coordinate(s), then the fresh replacement.
    PairSample sample_pair(CounterRng& rng) const;

    /// Exact finite list of replacement outcomes conditioned on a state.
    std::vector<ReplacementOutcome> replacement_outcomes(const EnsembleState& state) const;

    /// Exact conditional variance Delta_X(state).
    HermitianMatrix conditional_variance(const EnsembleState& state) const;

    /// || E[X - X' | Z] - alpha X ||, with the conditional mean computed by
    /// exact averaging over the replacement randomness.
    double stein_residual(const EnsembleState& state) const;

private:
    EnsembleSpec spec_;
    double alpha_;
    std::vector<HermitianMatrix> support_second_moments_;  // independent sums only
};

SteinPairModel build_stein_pair(EnsembleSpec spec);

/// r(psi) = (1/psi) log E tr-bar exp(psi Delta_X), expectation over states
/// taken by full enumeration.
double r_psi_exact(const SteinPairModel& model, double psi, std::uint64_t limit = 0);

/// Monte Carlo estimate of r(psi) with the chunk-free single-stream sampler.
double r_psi_monte_carlo(const SteinPairModel& model, double psi, int samples,
                         std::uint64_t seed);

/// Verifies the self-reproducing identity over every sign state and returns
/// the parameter s; nullopt when H - EH vanishes identically.  Throws when no
/// single s satisfies the identity.
std::optional<double> self_repro_check(const EnsembleSpec& spec, double tol = 1e-9);

}  // namespace mcx
