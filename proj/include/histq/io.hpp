#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "histq/consistency.hpp"
#include "histq/divergence.hpp"
#include "histq/quadform.hpp"

namespace histq {

using json = nlohmann::json;

// Matrix: {"rows": r, "cols": c, "data": [[re, im], ...]} row-major.
json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

// Vector: [[re, im], ...]
json to_json(std::span<const complex> v);
ComplexVector vector_from_json(const json& j);

/// A history read from disk: either n single-time projections (homogeneous)
/// or one projection on the d^n-dimensional space.
struct HistorySpec {
  std::size_t single_dim = 0;
  std::size_t order = 0;
  std::optional<HomogeneousHistory> homogeneous;
  std::optional<HistoryProjection> general;

  HistoryProjection projection(std::size_t cap = kDefaultHistoryCap) const;
};

// {"single_time_dim": d, "order": n, "projections": [matrix, ...]}
// or {"single_time_dim": d, "order": n, "projection": matrix}
json to_json(const HomogeneousHistory& h);
json to_json(const HistoryProjection& p);
HistorySpec history_from_json(const json& j, double tol = kValidationTol);

// {"matrix": matrix} or {"weights": [...], "vectors": matrix with the vectors as columns}
json to_json(const DensityOperator& rho);
DensityOperator density_from_json(const json& j, double tol = kValidationTol);

// {"order": n, "dim": d, "terms": [[matrix x n], ...]}
json to_json(const SimpleTensorSum& z);
SimpleTensorSum tensor_sum_from_json(const json& j);

// {"members": [history, ...]}
HistoryFamily family_from_json(const json& j, std::size_t history_cap = kDefaultHistoryCap,
                               double tol = kValidationTol);

json to_json(const AxiomReport& r);
json to_json(const ConsistencyReport& r);
json to_json(const DecoherenceValue& v);
json to_json(complex z);

struct RunConfig {
  std::size_t single_dim = 2;
  std::size_t order = 2;
  double validation_tol = kValidationTol;
  double arithmetic_tol = kArithmeticTol;
  double consistency_tol = 1e-9;
  std::size_t materialize_cap = kDefaultMaterializeCap;
  std::size_t history_cap = kDefaultHistoryCap;
  std::uint64_t seed = 0;
  std::string format = "json";
  TruncationSchedule schedule = TruncationSchedule::doubling(4, 512);

  /// Throws ValidationError on non-positive caps or tolerances, d < 2,
  /// an unknown format, or an invalid schedule.
  void validate() const;
};

json to_json(const RunConfig& c);
/// Keys absent from j keep the defaults.
RunConfig config_from_json(const json& j);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Shortest round-trip decimal form, '.' as separator regardless of locale.
std::string format_double(double x);

/// Minimal CSV writer: fields are numbers or plain identifiers, never quoted.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& fields);
  std::string str() const { return out_; }

 private:
  std::size_t columns_;
  std::string out_;
};

}  // namespace histq
