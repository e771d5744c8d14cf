#include "histq/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "histq/errors.hpp"

namespace histq {

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("complex number must be [re, im]");
  const double re = j[0].get<double>(), im = j[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) throw ValidationError("complex number is not finite");
  return {re, im};
}

std::size_t size_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ValidationError(std::string("field \"") + key + "\" must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

json to_json(complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (const complex& z : m.data()) data.push_back(to_json(z));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  return guarded("matrix", [&] {
    if (!j.is_object()) throw ValidationError("matrix must be an object");
    const std::size_t rows = size_field(j, "rows"), cols = size_field(j, "cols");
    if (rows == 0 || cols == 0) throw ValidationError("matrix dimensions must be positive");
    const json& data = j.at("data");
    if (!data.is_array() || data.size() != rows * cols)
      throw ShapeError("matrix data has " + std::to_string(data.size()) + " entries, expected " +
                       std::to_string(rows * cols));
    std::vector<complex> values;
    values.reserve(data.size());
    for (const auto& z : data) values.push_back(complex_from_json(z));
    return ComplexMatrix(rows, cols, std::move(values));
  });
}

json to_json(std::span<const complex> v) {
  json out = json::array();
  for (const complex& z : v) out.push_back(to_json(z));
  return out;
}

ComplexVector vector_from_json(const json& j) {
  return guarded("vector", [&] {
    if (!j.is_array()) throw ValidationError("vector must be an array of [re, im]");
    ComplexVector v;
    for (const auto& z : j) v.push_back(complex_from_json(z));
    return v;
  });
}

HistoryProjection HistorySpec::projection(std::size_t cap) const {
  if (general) return *general;
  return embed_homogeneous(*homogeneous, cap);
}

json to_json(const HomogeneousHistory& h) {
  json ps = json::array();
  for (const auto& p : h.projections()) ps.push_back(to_json(p.matrix()));
  return {{"single_time_dim", h.single_dim()}, {"order", h.order()}, {"projections", std::move(ps)}};
}

json to_json(const HistoryProjection& p) {
  return {{"single_time_dim", p.single_dim()}, {"order", p.order()}, {"projection", to_json(p.matrix())}};
}

HistorySpec history_from_json(const json& j, double tol) {
  return guarded("history", [&] {
    if (!j.is_object()) throw ValidationError("history must be an object");
    HistorySpec hs;
    hs.single_dim = size_field(j, "single_time_dim");
    hs.order = size_field(j, "order");
    if (hs.single_dim == 0 || hs.order == 0) throw ValidationError("history dimensions must be positive");
    if (j.contains("projections")) {
      const json& ps = j.at("projections");
      if (!ps.is_array() || ps.size() != hs.order)
        throw ShapeError("history lists " + std::to_string(ps.size()) + " projections for order " +
                         std::to_string(hs.order));
      std::vector<Projection> projections;
      for (const auto& p : ps) {
        Projection proj = Projection::validate(matrix_from_json(p), tol);
        if (proj.dim() != hs.single_dim) throw ShapeError("single-time projection has the wrong dimension");
        projections.push_back(std::move(proj));
      }
      hs.homogeneous.emplace(std::move(projections));
    } else if (j.contains("projection")) {
      hs.general.emplace(Projection::validate(matrix_from_json(j.at("projection")), tol), hs.single_dim,
                           hs.order);
    } else {
      throw ValidationError("history needs \"projections\" or \"projection\"");
    }
    return hs;
  });
}

json to_json(const DensityOperator& rho) {
  return {{"weights", rho.weights()}, {"vectors", to_json(rho.vectors())}};
}

DensityOperator density_from_json(const json& j, double tol) {
  return guarded("density", [&] {
    if (!j.is_object()) throw ValidationError("density must be an object");
    if (j.contains("matrix")) return DensityOperator::from_matrix(matrix_from_json(j.at("matrix")), tol);
    if (j.contains("weights") && j.contains("vectors")) {
      std::vector<double> w = j.at("weights").get<std::vector<double>>();
      return DensityOperator::from_spectral(std::move(w), matrix_from_json(j.at("vectors")));
    }
    throw ValidationError("density needs \"matrix\" or \"weights\" and \"vectors\"");
  });
}

json to_json(const SimpleTensorSum& z) {
  json terms = json::array();
  for (std::size_t i = 0; i < z.size(); ++i) {
    json t = json::array();
    for (std::size_t s = 0; s < z.order(); ++s) t.push_back(to_json(z.factor(i, s)));
    terms.push_back(std::move(t));
  }
  return {{"order", z.order()}, {"dim", z.dim()}, {"terms", std::move(terms)}};
}

SimpleTensorSum tensor_sum_from_json(const json& j) {
  return guarded("tensor sum", [&] {
    if (!j.is_object()) throw ValidationError("tensor sum must be an object");
    SimpleTensorSum z(size_field(j, "order"), size_field(j, "dim"));
    for (const auto& t : j.at("terms")) {
      std::vector<ComplexMatrix> factors;
      for (const auto& f : t) factors.push_back(matrix_from_json(f));
      z.add_term(factors);
    }
    return z;
  });
}

HistoryFamily family_from_json(const json& j, std::size_t history_cap, double tol) {
  return guarded("family", [&] {
    if (!j.is_object() || !j.contains("members")) throw ValidationError("family needs \"members\"");
    std::vector<HistoryProjection> members;
    for (const auto& m : j.at("members")) members.push_back(history_from_json(m, tol).projection(history_cap));
    return HistoryFamily(std::move(members), tol);
  });
}

json to_json(const AxiomReport& r) {
  return {{"evaluator", r.evaluator},
          {"samples", r.samples},
          {"seed", r.seed},
          {"tol", r.tol},
          {"hermiticity", r.hermiticity},
          {"positivity", r.positivity},
          {"normalization", r.normalization},
          {"additivity", r.additivity},
          {"homogeneous_checks", r.homogeneous_checks},
          {"general_checks", r.general_checks},
          {"passed", r.passed()}};
}

json to_json(const ConsistencyReport& r) {
  return {{"consistent", r.consistent},
          {"tol", r.tol},
          {"max_re_offdiag", r.max_re_offdiag},
          {"worst_pair", {r.worst_pair[0], r.worst_pair[1]}},
          {"pairs_checked", r.pairs_checked},
          {"probabilities", r.probabilities},
          {"prob_sum", r.prob_sum},
          {"unphysical", r.unphysical}};
}

json to_json(const DecoherenceValue& v) {
  json sums = json::array();
  for (const complex& s : v.partial_sums) sums.push_back(to_json(s));
  json out = {{"verdict", v.verdict()}, {"cutoffs", v.cutoffs}, {"partial_sums", std::move(sums)}};
  out["value"] = v.finite() ? to_json(v.value) : json(nullptr);
  return out;
}

void RunConfig::validate() const {
  if (single_dim < 2) throw ValidationError("single-time dimension must be at least 2");
  if (order < 1) throw ValidationError("order must be at least 1");
  if (!(validation_tol > 0) || !(arithmetic_tol > 0) || !(consistency_tol > 0))
    throw ValidationError("tolerances must be positive");
  if (materialize_cap == 0 || history_cap == 0) throw ValidationError("size caps must be positive");
  if (format != "json" && format != "csv") throw ValidationError("format must be json or csv");
  schedule.validate();
}

json to_json(const RunConfig& c) {
  return {{"d", c.single_dim},
          {"n", c.order},
          {"validation_tol", c.validation_tol},
          {"arithmetic_tol", c.arithmetic_tol},
          {"consistency_tol", c.consistency_tol},
          {"materialize_cap", c.materialize_cap},
          {"history_cap", c.history_cap},
          {"seed", c.seed},
          {"format", c.format},
          {"cutoffs", c.schedule.cutoffs},
          {"convergence_threshold", c.schedule.convergence_threshold},
          {"divergence_threshold", c.schedule.divergence_threshold}};
}

RunConfig config_from_json(const json& j) {
  return guarded("config", [&] {
    if (!j.is_object()) throw ValidationError("config must be an object");
    static const char* known[] = {"d", "n", "validation_tol", "arithmetic_tol", "consistency_tol",
                                  "materialize_cap", "history_cap", "seed", "format", "cutoffs",
                                  "convergence_threshold", "divergence_threshold"};
    for (const auto& [key, _] : j.items()) {
      if (std::find(std::begin(known), std::end(known), key) == std::end(known))
        throw ValidationError("unknown config key \"" + key + "\"");
    }
    RunConfig c;
    if (j.contains("d")) c.single_dim = size_field(j, "d");
    if (j.contains("n")) c.order = size_field(j, "n");
    if (j.contains("validation_tol")) c.validation_tol = j.at("validation_tol").get<double>();
    if (j.contains("arithmetic_tol")) c.arithmetic_tol = j.at("arithmetic_tol").get<double>();
    if (j.contains("consistency_tol")) c.consistency_tol = j.at("consistency_tol").get<double>();
    if (j.contains("materialize_cap")) c.materialize_cap = size_field(j, "materialize_cap");
    if (j.contains("history_cap")) c.history_cap = size_field(j, "history_cap");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("format")) c.format = j.at("format").get<std::string>();
    if (j.contains("cutoffs")) c.schedule.cutoffs = j.at("cutoffs").get<std::vector<std::size_t>>();
    if (j.contains("convergence_threshold"))
      c.schedule.convergence_threshold = j.at("convergence_threshold").get<double>();
    if (j.contains("divergence_threshold"))
      c.schedule.divergence_threshold = j.at("divergence_threshold").get<double>();
    c.validate();
    return c;
  });
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
  if (!out) throw ValidationError("write failed: " + path);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw ShapeError("csv row has the wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    out_ += fields[i];
  }
  out_ += '\n';
  return *this;
}

}  // namespace histq
