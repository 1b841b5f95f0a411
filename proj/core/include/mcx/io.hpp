#pragma once

#include <string>

#include "mcx/bounds.hpp"
#include "mcx/ensembles.hpp"

namespace mcx {

/// Canonical numeric formatting for every text artifact (%.12g).
std::string format_g(double x);

/// Parses an ensemble description from JSON text.  Malformed input throws
/// SpecError whose path() is a JSON pointer to the offending field.
///
/// Schema: {"family": <name>, ...payload}.  Matrices are row-major nested
/// arrays of [re, im] pairs (a bare number is accepted as a real entry).
/// Payload keys: independent_sum -> "supports" (list of lists of
/// {"weight", "matrix"}); rademacher_series -> "coefficients";
/// combinatorial_sum / rademacher_chaos -> "array";
/// sampling_without_replacement -> "pool", "sample_count";
/// permuted_inner_product -> "left", "right".
EnsembleSpec parse_spec_json(const std::string& text);

/// Reads and parses a spec file; IO failures throw std::runtime_error.
EnsembleSpec load_spec_file(const std::string& path);

/// {"provenance": ..., "d": ..., "mean_upper": ..., "mean_lower": ...,
///  "tail": [[t, value], ...]} with %.12g numbers, sampled on t_grid.
/// `indent` is the base indentation of nested lines (two-space steps).
std::string bound_set_json(const BoundSet& b, const std::vector<double>& t_grid, int indent = 0);

/// JSON string escaping (quotes included).
std::string json_quote(const std::string& s);

}  // namespace mcx
