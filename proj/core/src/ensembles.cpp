#include "mcx/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mcx/linalg.hpp"

namespace mcx {

namespace {

// Counts saturate at 2^63 - 1 so they stay representable as signed values.
constexpr std::uint64_t kSaturated = std::numeric_limits<std::int64_t>::max();

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > kSaturated / a) return kSaturated;
    return std::min(a * b, kSaturated);
}

std::uint64_t pow2_saturating(int n) {
    return n >= 63 ? kSaturated : (std::uint64_t{1} << n);
}

std::uint64_t factorial_saturating(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f = saturating_mul(f, static_cast<std::uint64_t>(i));
    return f;
}

std::string join_ints(const EnsembleState& s) {
    std::ostringstream out;
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out << ',';
        out << s[i];
    }
    return out.str();
}

std::string sign_string(const EnsembleState& s) {
    std::string out;
    out.reserve(s.size());
    for (int e : s) out.push_back(e > 0 ? '+' : '-');
    return out;
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::independent_sum: return "independent_sum";
        case Family::rademacher_series: return "rademacher_series";
        case Family::combinatorial_sum: return "combinatorial_sum";
        case Family::sampling_without_replacement: return "sampling_without_replacement";
        case Family::permuted_inner_product: return "permuted_inner_product";
        case Family::rademacher_chaos: return "rademacher_chaos";
    }
    return "unknown";
}

EnsembleSpec::EnsembleSpec(Family family, Payload payload)
    : family_(family), payload_(std::move(payload)) {
    validate(true);
    if (is_permutation_family()) build_combinatorial_array();
}

EnsembleSpec::EnsembleSpec(Family family, Payload payload, UncheckedTag)
    : family_(family), payload_(std::move(payload)) {
    validate(false);
    if (is_permutation_family()) build_combinatorial_array();
}

EnsembleSpec EnsembleSpec::unchecked(Family family, Payload payload) {
    return EnsembleSpec(family, std::move(payload), UncheckedTag{});
}

void EnsembleSpec::validate(bool check_centering) {
    switch (family_) {
        case Family::independent_sum: {
            const auto& p = std::get<IndependentSumPayload>(payload_);
            if (p.supports.empty()) throw SpecError("/supports", "at least one summand required");
            n_ = static_cast<int>(p.supports.size());
            dim_ = 0;
            for (size_t k = 0; k < p.supports.size(); ++k) {
                const auto& sup = p.supports[k];
                std::string base = "/supports/" + std::to_string(k);
                if (sup.empty()) throw SpecError(base, "empty support");
                if (dim_ == 0) dim_ = sup.front().matrix.dim();
                double wsum = 0;
                HermitianMatrix mean = HermitianMatrix::zero(dim_);
                for (size_t i = 0; i < sup.size(); ++i) {
                    std::string path = base + "/" + std::to_string(i);
                    if (sup[i].weight <= 0) throw SpecError(path + "/weight", "weight must be positive");
                    if (sup[i].matrix.dim() != dim_)
                        throw SpecError(path + "/matrix", "dimension mismatch");
                    wsum += sup[i].weight;
                    mean += sup[i].weight * sup[i].matrix;
                }
                if (std::abs(wsum - 1.0) > 1e-12)
                    throw SpecError(base, "support weights sum to " + std::to_string(wsum) +
                                              ", expected 1");
                if (check_centering && mean.max_abs_entry() > 1e-12)
                    throw SpecError(base, "support is not centered: mean entry magnitude " +
                                              std::to_string(mean.max_abs_entry()));
            }
            break;
        }
        case Family::rademacher_series: {
            const auto& p = std::get<RademacherSeriesPayload>(payload_);
            if (p.coefficients.empty()) throw SpecError("/coefficients", "at least one coefficient");
            n_ = static_cast<int>(p.coefficients.size());
            dim_ = p.coefficients.front().dim();
            for (size_t k = 1; k < p.coefficients.size(); ++k)
                if (p.coefficients[k].dim() != dim_)
                    throw SpecError("/coefficients/" + std::to_string(k), "dimension mismatch");
            break;
        }
        case Family::combinatorial_sum: {
            const auto& p = std::get<CombinatorialSumPayload>(payload_);
            if (p.array.empty() || p.array.front().empty())
                throw SpecError("/array", "empty array");
            n_ = static_cast<int>(p.array.size());
            dim_ = p.array.front().front().dim();
            HermitianMatrix total = HermitianMatrix::zero(dim_);
            for (size_t j = 0; j < p.array.size(); ++j) {
                if (p.array[j].size() != static_cast<size_t>(n_))
                    throw SpecError("/array/" + std::to_string(j), "ragged array");
                for (size_t k = 0; k < p.array[j].size(); ++k) {
                    if (p.array[j][k].dim() != dim_)
                        throw SpecError("/array/" + std::to_string(j) + "/" + std::to_string(k),
                                        "dimension mismatch");
                    total += p.array[j][k];
                }
            }
            if (check_centering && total.max_abs_entry() > 1e-10)
                throw SpecError("/array", "array total is not zero: max entry magnitude " +
                                              std::to_string(total.max_abs_entry()));
            break;
        }
        case Family::sampling_without_replacement: {
            const auto& p = std::get<SamplingWithoutReplacementPayload>(payload_);
            if (p.pool.empty()) throw SpecError("/pool", "empty pool");
            n_ = static_cast<int>(p.pool.size());
            dim_ = p.pool.front().dim();
            for (size_t i = 1; i < p.pool.size(); ++i)
                if (p.pool[i].dim() != dim_)
                    throw SpecError("/pool/" + std::to_string(i), "dimension mismatch");
            if (p.sample_count < 1 || p.sample_count > n_)
                throw SpecError("/sample_count", "must lie in [1, pool size]");
            break;
        }
        case Family::permuted_inner_product: {
            const auto& p = std::get<PermutedInnerProductPayload>(payload_);
            if (p.left.empty()) throw SpecError("/left", "empty factor list");
            if (p.left.size() != p.right.size())
                throw SpecError("/right", "left and right lists must have equal length");
            n_ = static_cast<int>(p.left.size());
            int d1 = p.left.front().rows();
            int s = p.left.front().cols();
            int d2 = p.right.front().cols();
            for (size_t i = 0; i < p.left.size(); ++i) {
                if (p.left[i].rows() != d1 || p.left[i].cols() != s)
                    throw SpecError("/left/" + std::to_string(i), "shape mismatch");
                if (p.right[i].rows() != s || p.right[i].cols() != d2)
                    throw SpecError("/right/" + std::to_string(i), "shape mismatch");
            }
            dim_ = d1 + d2;
            break;
        }
        case Family::rademacher_chaos: {
            const auto& p = std::get<RademacherChaosPayload>(payload_);
            if (p.array.size() < 2 || p.array.front().empty())
                throw SpecError("/array", "chaos needs at least two coordinates");
            n_ = static_cast<int>(p.array.size());
            dim_ = p.array.front().front().dim();
            for (size_t j = 0; j < p.array.size(); ++j) {
                if (p.array[j].size() != static_cast<size_t>(n_))
                    throw SpecError("/array/" + std::to_string(j), "ragged array");
                for (size_t k = 0; k < p.array[j].size(); ++k)
                    if (p.array[j][k].dim() != dim_)
                        throw SpecError("/array/" + std::to_string(j) + "/" + std::to_string(k),
                                        "dimension mismatch");
            }
            for (int j = 0; j < n_; ++j)
                for (int k = j + 1; k < n_; ++k)
                    if ((p.array[j][k] - p.array[k][j]).max_abs_entry() > 1e-12)
                        throw SpecError("/array/" + std::to_string(j) + "/" + std::to_string(k),
                                        "chaos array must be symmetric (A_jk = A_kj)");
            break;
        }
    }
}

void EnsembleSpec::build_combinatorial_array() {
    // Base array per family, then row-centering so every permutation realizes
    // the centered statistic and the total vanishes.
    std::vector<std::vector<HermitianMatrix>> base;
    switch (family_) {
        case Family::combinatorial_sum:
            base = std::get<CombinatorialSumPayload>(payload_).array;
            break;
        case Family::sampling_without_replacement: {
            const auto& p = std::get<SamplingWithoutReplacementPayload>(payload_);
            base.assign(n_, std::vector<HermitianMatrix>(n_, HermitianMatrix::zero(dim_)));
            for (int j = 0; j < p.sample_count; ++j)
                for (int k = 0; k < n_; ++k) base[j][k] = p.pool[k];
            break;
        }
        case Family::permuted_inner_product: {
            const auto& p = std::get<PermutedInnerProductPayload>(payload_);
            base.assign(n_, std::vector<HermitianMatrix>(n_, HermitianMatrix::zero(dim_)));
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    base[j][k] = hermitian_dilation(p.left[j] * p.right[k]);
            break;
        }
        default:
            return;
    }
    comb_array_ = base;
    for (int j = 0; j < n_; ++j) {
        HermitianMatrix row_mean = HermitianMatrix::zero(dim_);
        for (int k = 0; k < n_; ++k) row_mean += base[j][k];
        row_mean *= 1.0 / n_;
        for (int k = 0; k < n_; ++k) comb_array_[j][k] -= row_mean;
    }
}

const std::vector<std::vector<HermitianMatrix>>& EnsembleSpec::combinatorial_array() const {
    if (!is_permutation_family())
        throw std::logic_error("combinatorial_array: not a permutation family");
    return comb_array_;
}

std::uint64_t EnsembleSpec::state_space_size() const {
    switch (family_) {
        case Family::independent_sum: {
            std::uint64_t total = 1;
            for (const auto& sup : std::get<IndependentSumPayload>(payload_).supports)
                total = saturating_mul(total, sup.size());
            return total;
        }
        case Family::rademacher_series:
        case Family::rademacher_chaos:
            return pow2_saturating(n_);
        default:
            return factorial_saturating(n_);
    }
}

HermitianMatrix EnsembleSpec::assemble(const EnsembleState& state) const {
    if (static_cast<int>(state.size()) != n_)
        throw std::invalid_argument("assemble: state length mismatch");
    HermitianMatrix x = HermitianMatrix::zero(dim_);
    switch (family_) {
        case Family::independent_sum: {
            const auto& p = std::get<IndependentSumPayload>(payload_);
            for (int k = 0; k < n_; ++k) x += p.supports[k][state[k]].matrix;
            break;
        }
        case Family::rademacher_series: {
            const auto& p = std::get<RademacherSeriesPayload>(payload_);
            for (int k = 0; k < n_; ++k) x += static_cast<double>(state[k]) * p.coefficients[k];
            break;
        }
        case Family::rademacher_chaos: {
            const auto& p = std::get<RademacherChaosPayload>(payload_);
            for (int j = 0; j < n_; ++j)
                for (int k = j + 1; k < n_; ++k)
                    x += static_cast<double>(state[j] * state[k]) * p.array[j][k];
            break;
        }
        default:
            for (int j = 0; j < n_; ++j) x += comb_array_[j][state[j]];
            break;
    }
    return x;
}

std::pair<EnsembleState, HermitianMatrix> sample(const EnsembleSpec& spec, CounterRng& rng) {
    EnsembleState state;
    switch (spec.family()) {
        case Family::independent_sum: {
            const auto& p = spec.payload_as<IndependentSumPayload>();
            state.reserve(spec.coordinates());
            for (const auto& sup : p.supports) {
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
                state.push_back(pick);
            }
            break;
        }
        case Family::rademacher_series:
        case Family::rademacher_chaos:
            state.reserve(spec.coordinates());
            for (int k = 0; k < spec.coordinates(); ++k) state.push_back(rng.rademacher());
            break;
        default:
            state = rng.permutation(spec.coordinates());
            break;
    }
    return {state, spec.assemble(state)};
}

bool enumerable(const EnsembleSpec& spec, std::uint64_t limit) {
    if (limit == 0) limit = spec.is_permutation_family() ? factorial_saturating(8) : 65536;
    return spec.state_space_size() <= limit;
}

void for_each_state(const EnsembleSpec& spec,
                    const std::function<void(const EnsembleState&, double)>& visit,
                    std::uint64_t limit) {
    if (limit == 0) limit = spec.is_permutation_family() ? factorial_saturating(8) : 65536;
    std::uint64_t size = spec.state_space_size();
    if (size > limit)
        throw std::invalid_argument("enumerate: state space has " + std::to_string(size) +
                                    " states, exceeding the limit of " + std::to_string(limit));

    const int n = spec.coordinates();
    switch (spec.family()) {
        case Family::independent_sum: {
            const auto& p = spec.payload_as<IndependentSumPayload>();
            EnsembleState state(n, 0);
            while (true) {
                double w = 1.0;
                for (int k = 0; k < n; ++k) w *= p.supports[k][state[k]].weight;
                visit(state, w);
                int k = n - 1;
                while (k >= 0 && ++state[k] == static_cast<int>(p.supports[k].size())) state[k--] = 0;
                if (k < 0) break;
            }
            break;
        }
        case Family::rademacher_series:
        case Family::rademacher_chaos: {
            double w = 1.0 / static_cast<double>(size);
            for (std::uint64_t mask = 0; mask < size; ++mask) {
                EnsembleState state(n);
                for (int k = 0; k < n; ++k) state[k] = (mask >> k) & 1 ? 1 : -1;
                visit(state, w);
            }
            break;
        }
        default: {
            double w = 1.0 / static_cast<double>(size);
            EnsembleState perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            do {
                visit(perm, w);
            } while (std::next_permutation(perm.begin(), perm.end()));
            break;
        }
    }
}

OutcomeTable enumerate_outcomes(const EnsembleSpec& spec, std::uint64_t limit) {
    OutcomeTable table;
    bool signs = spec.family() == Family::rademacher_series ||
                 spec.family() == Family::rademacher_chaos;
    for_each_state(
        spec,
        [&](const EnsembleState& state, double w) {
            table.entries.push_back(
                {signs ? sign_string(state) : join_ints(state), spec.assemble(state), w});
        },
        limit);
    return table;
}

double exact_statistic(const OutcomeTable& table, const StatQuery& query) {
    double acc = 0;
    for (const auto& e : table.entries) {
        switch (query.kind) {
            case StatKind::mean_lambda_max:
                acc += e.weight * eig_hermitian(e.x).lambda_max();
                break;
            case StatKind::tail:
                if (eig_hermitian(e.x).lambda_max() >= query.arg) acc += e.weight;
                break;
            case StatKind::schatten_moment:
                acc += e.weight * std::pow(schatten_norm(e.x, query.arg), query.arg);
                break;
            case StatKind::trace_mgf:
                acc += e.weight * traces(matrix_exp(query.arg * e.x)).second;
                break;
        }
    }
    return acc;
}

}  // namespace mcx
