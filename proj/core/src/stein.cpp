#include "mcx/stein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcx/linalg.hpp"

namespace mcx {

SteinPairModel::SteinPairModel(EnsembleSpec spec) : spec_(std::move(spec)) {
    const int n = spec_.coordinates();
    switch (spec_.family()) {
        case Family::independent_sum:
        case Family::rademacher_series:
            alpha_ = 1.0 / n;
            break;
        case Family::rademacher_chaos:
            alpha_ = 2.0 / n;  // self-reproducing with s = 2
            break;
        default:
            alpha_ = 2.0 / n;  // transposition pair
            break;
    }
    if (spec_.family() == Family::independent_sum) {
        const auto& p = spec_.payload_as<IndependentSumPayload>();
        support_second_moments_.reserve(p.supports.size());
        for (const auto& sup : p.supports) {
            HermitianMatrix m2 = HermitianMatrix::zero(spec_.dim());
            for (const auto& wm : sup) m2 += wm.weight * wm.matrix.square();
            support_second_moments_.push_back(m2);
        }
    }
}

SteinPairModel build_stein_pair(EnsembleSpec spec) { return SteinPairModel(std::move(spec)); }

PairSample SteinPairModel::sample_pair(CounterRng& rng) const {
    auto [state, x] = sample(spec_, rng);
    EnsembleState state_prime = state;
    const int n = spec_.coordinates();
    switch (spec_.family()) {
        case Family::independent_sum: {
            int k = static_cast<int>(rng.uniform_below(n));
            const auto& sup = spec_.payload_as<IndependentSumPayload>().supports[k];
            double u = rng.uniform01();
            double acc = 0;
            int pick = static_cast<int>(sup.size()) - 1;
            for (size_t i = 0; i < sup.size(); ++i) {
                acc += sup[i].weight;
                if (u < acc) {
                    pick = static_cast<int>(i);
                    break;
                }
            }
            state_prime[k] = pick;
            break;
        }
        case Family::rademacher_series:
        case Family::rademacher_chaos: {
            int k = static_cast<int>(rng.uniform_below(n));
            state_prime[k] = rng.rademacher();
            break;
        }
        default: {
            int j = static_cast<int>(rng.uniform_below(n));
            int k = static_cast<int>(rng.uniform_below(n));
            std::swap(state_prime[j], state_prime[k]);
            break;
        }
    }
    return {state, x, spec_.assemble(state_prime)};
}

std::vector<ReplacementOutcome> SteinPairModel::replacement_outcomes(
    const EnsembleState& state) const {
    const int n = spec_.coordinates();
    std::vector<ReplacementOutcome> out;
    switch (spec_.family()) {
        case Family::independent_sum: {
            const auto& p = spec_.payload_as<IndependentSumPayload>();
            for (int k = 0; k < n; ++k)
                for (size_t i = 0; i < p.supports[k].size(); ++i) {
                    EnsembleState s = state;
                    s[k] = static_cast<int>(i);
                    out.push_back({std::move(s), p.supports[k][i].weight / n});
                }
            break;
        }
        case Family::rademacher_series:
        case Family::rademacher_chaos:
            for (int k = 0; k < n; ++k)
                for (int eps : {1, -1}) {
                    EnsembleState s = state;
                    s[k] = eps;
                    out.push_back({std::move(s), 0.5 / n});
                }
            break;
        default:
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    EnsembleState s = state;
                    std::swap(s[j], s[k]);
                    out.push_back({std::move(s), 1.0 / (static_cast<double>(n) * n)});
                }
            break;
    }
    return out;
}

HermitianMatrix SteinPairModel::conditional_variance(const EnsembleState& state) const {
    if (static_cast<int>(state.size()) != spec_.coordinates())
        throw std::invalid_argument("conditional_variance: state length mismatch");
    const int n = spec_.coordinates();
    const int d = spec_.dim();
    HermitianMatrix delta = HermitianMatrix::zero(d);
    switch (spec_.family()) {
        case Family::independent_sum: {
            const auto& p = spec_.payload_as<IndependentSumPayload>();
            for (int k = 0; k < n; ++k) {
                delta += p.supports[k][state[k]].matrix.square();
                delta += support_second_moments_[k];
            }
            delta *= 0.5;
            break;
        }
        case Family::rademacher_series: {
            // Y_k^2 = E Y_k^2 = A_k^2 regardless of the signs.
            const auto& p = spec_.payload_as<RademacherSeriesPayload>();
            for (const auto& a : p.coefficients) delta += a.square();
            break;
        }
        case Family::rademacher_chaos: {
            // E[(H - H^(k))^2 | eps] = 2 (sum_{j != k} eps_j A_jk)^2, so with
            // s = 2 the conditional variance is half the sum of those squares.
            const auto& p = spec_.payload_as<RademacherChaosPayload>();
            for (int k = 0; k < n; ++k) {
                HermitianMatrix bk = HermitianMatrix::zero(d);
                for (int j = 0; j < n; ++j)
                    if (j != k) bk += static_cast<double>(state[j]) * p.array[j][k];
                delta += bk.square();
            }
            delta *= 0.5;
            break;
        }
        default: {
            const auto& a = spec_.combinatorial_array();
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    HermitianMatrix diff = a[j][state[j]] + a[k][state[k]];
                    diff -= a[j][state[k]];
                    diff -= a[k][state[j]];
                    delta += diff.square();
                }
            delta *= 1.0 / (4.0 * n);
            break;
        }
    }
    return delta;
}

double SteinPairModel::stein_residual(const EnsembleState& state) const {
    HermitianMatrix x = spec_.assemble(state);
    HermitianMatrix mean_prime = HermitianMatrix::zero(spec_.dim());
    double total_weight = 0;
    for (const auto& outcome : replacement_outcomes(state)) {
        mean_prime += outcome.weight * spec_.assemble(outcome.state);
        total_weight += outcome.weight;
    }
    if (std::abs(total_weight - 1.0) > 1e-12)
        throw std::logic_error("stein_residual: replacement weights do not sum to 1");
    HermitianMatrix residual = x - mean_prime - alpha_ * x;
    return spectral_norm(residual);
}

double r_psi_exact(const SteinPairModel& model, double psi, std::uint64_t limit) {
    if (psi <= 0) throw std::invalid_argument("r_psi: psi must be positive");
    double expectation = 0;
    for_each_state(
        model.spec(),
        [&](const EnsembleState& state, double w) {
            expectation += w * traces(matrix_exp(psi * model.conditional_variance(state))).second;
        },
        limit);
    return std::log(expectation) / psi;
}

double r_psi_monte_carlo(const SteinPairModel& model, double psi, int samples,
                         std::uint64_t seed) {
    if (psi <= 0) throw std::invalid_argument("r_psi: psi must be positive");
    if (samples < 1) throw std::invalid_argument("r_psi: samples must be >= 1");
    CounterRng rng(seed);
    double acc = 0;
    for (int i = 0; i < samples; ++i) {
        auto [state, x] = sample(model.spec(), rng);
        acc += traces(matrix_exp(psi * model.conditional_variance(state))).second;
    }
    return std::log(acc / samples) / psi;
}

std::optional<double> self_repro_check(const EnsembleSpec& spec, double tol) {
    if (spec.family() != Family::rademacher_series && spec.family() != Family::rademacher_chaos)
        throw std::invalid_argument("self_repro_check: requires a finite Rademacher state");
    if (!enumerable(spec))
        throw std::invalid_argument("self_repro_check: state space too large to enumerate");

    const int n = spec.coordinates();
    std::uint64_t size = spec.state_space_size();

    // EH = 0 for both families (signs are centered), so RHS is H itself.
    std::optional<double> s_value;
    double scale = 0;
    struct Pending {
        HermitianMatrix lhs;
        HermitianMatrix rhs;
        std::string state;
    };
    std::vector<Pending> rows;
    for (std::uint64_t mask = 0; mask < size; ++mask) {
        EnsembleState state(n);
        for (int k = 0; k < n; ++k) state[k] = (mask >> k) & 1 ? 1 : -1;
        HermitianMatrix h = spec.assemble(state);
        HermitianMatrix lhs = HermitianMatrix::zero(spec.dim());
        for (int k = 0; k < n; ++k) {
            EnsembleState plus = state, minus = state;
            plus[k] = 1;
            minus[k] = -1;
            HermitianMatrix cond_mean = 0.5 * (spec.assemble(plus) + spec.assemble(minus));
            lhs += h - cond_mean;
        }
        std::string label;
        for (int e : state) label.push_back(e > 0 ? '+' : '-');
        rows.push_back({lhs, h, label});
        scale = std::max({scale, h.max_abs_entry(), lhs.max_abs_entry()});
    }
    if (scale == 0) return std::nullopt;  // H - EH vanishes identically

    for (const auto& row : rows) {
        double rhs_mag = row.rhs.max_abs_entry();
        if (rhs_mag <= tol * scale) {
            if (row.lhs.max_abs_entry() > tol * scale)
                throw std::runtime_error("self_repro_check: identity fails at state " + row.state);
            continue;
        }
        // Fit s on the largest entry, then verify the whole matrix.
        double candidate = 0;
        double best = 0;
        for (int j = 0; j < spec.dim(); ++j)
            for (int k = 0; k < spec.dim(); ++k) {
                double mag = std::abs(row.rhs(j, k));
                if (mag > best) {
                    best = mag;
                    candidate = (row.lhs(j, k) / row.rhs(j, k)).real();
                }
            }
        if ((row.lhs - candidate * row.rhs).max_abs_entry() > tol * scale)
            throw std::runtime_error("self_repro_check: no scalar s fits state " + row.state);
        if (s_value && std::abs(*s_value - candidate) > tol)
            throw std::runtime_error("self_repro_check: inconsistent s across states (" +
                                     std::to_string(*s_value) + " vs " + std::to_string(candidate) +
                                     " at state " + row.state + ")");
        s_value = candidate;
    }
    return s_value;
}

}  // namespace mcx
