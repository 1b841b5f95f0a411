#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "mcx/matrix.hpp"
#include "mcx/rng.hpp"

namespace mcx {

enum class Family {
    independent_sum,
    rademacher_series,
    combinatorial_sum,
    sampling_without_replacement,
    permuted_inner_product,
    rademacher_chaos,
};

std::string family_name(Family f);

struct WeightedMatrix {
    double weight;
    HermitianMatrix matrix;
};

struct IndependentSumPayload {
    // One finite, exactly centered support per summand.
    std::vector<std::vector<WeightedMatrix>> supports;
};
struct RademacherSeriesPayload {
    std::vector<HermitianMatrix> coefficients;
};
struct CombinatorialSumPayload {
    // n x n array with zero total.
    std::vector<std::vector<HermitianMatrix>> array;
};
struct SamplingWithoutReplacementPayload {
    std::vector<HermitianMatrix> pool;
    int sample_count;
};
struct PermutedInnerProductPayload {
    std::vector<Matrix> left;   // d1 x s factors
    std::vector<Matrix> right;  // s x d2 factors
};
struct RademacherChaosPayload {
    // Symmetric array; only entries above the diagonal enter the quadratic form.
    std::vector<std::vector<HermitianMatrix>> array;
};

/// Auxiliary-state realization: signs (+1/-1 per coordinate) for sign
/// families, a permutation of {0..n-1} for permutation families, or a support
/// index per coordinate for independent sums.
using EnsembleState = std::vector<int>;

/// Validated description of a random-matrix model.
class EnsembleSpec {
public:
    using Payload = std::variant<IndependentSumPayload, RademacherSeriesPayload,
                                 CombinatorialSumPayload, SamplingWithoutReplacementPayload,
                                 PermutedInnerProductPayload, RademacherChaosPayload>;

    EnsembleSpec(Family family, Payload payload);

    /// Fault-injection constructor for testing: skips the centering /
    /// zero-total invariants (structure checks still apply), so deliberately
    /// broken models can be built and their diagnostics exercised.
    static EnsembleSpec unchecked(Family family, Payload payload);

    Family family() const { return family_; }
    const Payload& payload() const { return payload_; }
    template <class T>
    const T& payload_as() const { return std::get<T>(payload_); }

    /// Dimension of the realized matrix X (after dilation for the permuted
    /// inner product).
    int dim() const { return dim_; }
    /// Number of auxiliary coordinates (summands, signs, or permutation size).
    int coordinates() const { return n_; }

    bool is_permutation_family() const {
        return family_ == Family::combinatorial_sum ||
               family_ == Family::sampling_without_replacement ||
               family_ == Family::permuted_inner_product;
    }

    /// Number of auxiliary states (2^n, n!, or the support-size product);
    /// saturates at 2^63-1.
    std::uint64_t state_space_size() const;

    /// Realized centered matrix X for a given auxiliary state.
    HermitianMatrix assemble(const EnsembleState& state) const;

    /// Row-centered n x n Hermitian array C with sum_j C[j][pi(j)] = X for
    /// every permutation; defined for permutation families only.
    const std::vector<std::vector<HermitianMatrix>>& combinatorial_array() const;

private:
    struct UncheckedTag {};
    EnsembleSpec(Family family, Payload payload, UncheckedTag);

    void validate(bool check_centering);
    void build_combinatorial_array();

    Family family_;
    Payload payload_;
    int dim_ = 0;
    int n_ = 0;
    std::vector<std::vector<HermitianMatrix>> comb_array_;
};

/// Invalid-spec error carrying a JSON-pointer-style path to the offending
/// field.
class SpecError : public std::runtime_error {
public:
    SpecError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Complete weighted outcome table of an enumerable spec.
struct OutcomeTable {
    struct Entry {
        std::string state;
        HermitianMatrix x;
        double weight;
    };
    std::vector<Entry> entries;
};

std::pair<EnsembleState, HermitianMatrix> sample(const EnsembleSpec& spec, CounterRng& rng);

/// Exhaustive enumeration; refuses when the state space exceeds the limit.
/// Default limits: 2^16 states for sign families, 8! for permutations.
OutcomeTable enumerate_outcomes(const EnsembleSpec& spec, std::uint64_t limit = 0);

bool enumerable(const EnsembleSpec& spec, std::uint64_t limit = 0);

/// Visits every auxiliary state with its probability; refuses (like
/// enumerate_outcomes) when the state space exceeds the limit.
void for_each_state(const EnsembleSpec& spec,
                    const std::function<void(const EnsembleState&, double)>& visit,
                    std::uint64_t limit = 0);

enum class StatKind { mean_lambda_max, tail, schatten_moment, trace_mgf };

struct StatQuery {
    StatKind kind;
    double arg = 0.0;  // threshold t, order p, or theta
};

double exact_statistic(const OutcomeTable& table, const StatQuery& query);

}  // namespace mcx
