#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "histq/consistency.hpp"
#include "histq/decoherence.hpp"
#include "histq/divergence.hpp"
#include "histq/errors.hpp"
#include "histq/quadform.hpp"
#include "histq/random.hpp"

namespace py = pybind11;
using namespace histq;

namespace {

using CArray = py::array_t<complex, py::array::c_style | py::array::forcecast>;
// A history is either a list of single-time projections or one 2-d array on the history space.
using HistoryArg = py::object;

ComplexMatrix to_matrix(const CArray& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-d array");
  const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
  return ComplexMatrix(rows, cols, std::vector<complex>(a.data(), a.data() + rows * cols));
}

CArray to_array(const ComplexMatrix& m) {
  CArray out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

DensityOperator to_density(const CArray& a) { return DensityOperator::from_matrix(to_matrix(a)); }

HomogeneousHistory to_homogeneous(const std::vector<CArray>& list) {
  std::vector<Projection> ps;
  for (const auto& a : list) ps.push_back(Projection::validate(to_matrix(a)));
  return HomogeneousHistory(std::move(ps));
}

HistoryProjection to_history(const HistoryArg& arg, std::size_t d, std::size_t n) {
  if (py::isinstance<py::array>(arg) && arg.cast<py::array>().ndim() == 2)
    return HistoryProjection(Projection::validate(to_matrix(arg.cast<CArray>())), d, n);
  return embed_homogeneous(to_homogeneous(arg.cast<std::vector<CArray>>()));
}

SimpleTensorSum to_tensor_sum(const std::vector<std::vector<CArray>>& terms, std::size_t d, std::size_t n) {
  SimpleTensorSum z(n, d);
  for (const auto& t : terms) {
    std::vector<ComplexMatrix> fs;
    for (const auto& a : t) fs.push_back(to_matrix(a));
    z.add_term(fs);
  }
  return z;
}

py::dict value_dict(const DecoherenceValue& v) {
  py::dict r;
  r["verdict"] = v.verdict();
  r["value"] = v.value;
  r["cutoffs"] = v.cutoffs;
  r["partial_sums"] = v.partial_sums;
  return r;
}

TruncationSchedule schedule_of(std::vector<std::size_t> cutoffs) {
  TruncationSchedule s;
  s.cutoffs = std::move(cutoffs);
  s.validate();
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decoherence functionals on finite history spaces";
  m.attr("prng_version") = std::string(kPrngVersion);

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<SizeError>(m, "SizeError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("embed", [](const std::vector<CArray>& h) { return to_array(embed_homogeneous(to_homogeneous(h)).matrix()); },
        py::arg("history"), "Kronecker product of single-time projections, first time leftmost.");

  m.def("d_direct",
        [](const CArray& rho, const std::vector<CArray>& h, const std::vector<CArray>& k) {
          return d_direct(to_density(rho), to_homogeneous(h), to_homogeneous(k));
        },
        py::arg("rho"), py::arg("h"), py::arg("k"));

  m.def("evaluate",
        [](const CArray& rho, const HistoryArg& p, const HistoryArg& q, std::size_t d, std::size_t n,
           const std::string& method) {
          const auto ev = make_evaluator(parse_method(method), to_density(rho), d, n);
          return ev->evaluate(to_history(p, d, n), to_history(q, d, n));
        },
        py::arg("rho"), py::arg("p"), py::arg("q"), py::arg("d"), py::arg("n"), py::arg("method") = "auto");

  m.def("d_series",
        [](const CArray& rho, const HistoryArg& p, const HistoryArg& q, std::size_t d, std::size_t n) {
          return d_series(to_density(rho), to_history(p, d, n), to_history(q, d, n));
        },
        py::arg("rho"), py::arg("p"), py::arg("q"), py::arg("d"), py::arg("n"));

  m.def("d_stream",
        [](const CArray& rho, const HistoryArg& p, const HistoryArg& q, std::size_t d, std::size_t n,
           std::size_t workers) {
          const DensityOperator state = to_density(rho);
          const HistoryProjection a = to_history(p, d, n), b = to_history(q, d, n);
          py::gil_scoped_release release;
          return d_via_M_streaming(state, a, b, workers);
        },
        py::arg("rho"), py::arg("p"), py::arg("q"), py::arg("d"), py::arg("n"), py::arg("workers") = 0);

  py::class_<ILSOperator>(m, "ILSOperator")
      .def_property_readonly("matrix", [](const ILSOperator& o) { return to_array(o.matrix); })
      .def_readonly("single_dim", &ILSOperator::single_dim)
      .def_readonly("order", &ILSOperator::order)
      .def("evaluate", [](const ILSOperator& o, const HistoryArg& p, const HistoryArg& q) {
        return d_via_M(o, to_history(p, o.single_dim, o.order), to_history(q, o.single_dim, o.order));
      });

  m.def("build_M",
        [](const CArray& rho, std::size_t d, std::size_t n, std::size_t cap) {
          return build_M(to_density(rho), d, n, cap);
        },
        py::arg("rho"), py::arg("d"), py::arg("n"), py::arg("cap") = kDefaultMaterializeCap);

  m.def("verify_axioms",
        [](const CArray& rho, std::size_t d, std::size_t n, const std::string& method, std::size_t samples,
           std::uint64_t seed, double tol) {
          const auto ev = make_evaluator(parse_method(method), to_density(rho), d, n);
          const AxiomReport r = verify_axioms(*ev, samples, seed, tol);
          py::dict out;
          out["evaluator"] = r.evaluator;
          out["samples"] = r.samples;
          out["hermiticity"] = r.hermiticity;
          out["positivity"] = r.positivity;
          out["normalization"] = r.normalization;
          out["additivity"] = r.additivity;
          out["passed"] = r.passed();
          return out;
        },
        py::arg("rho"), py::arg("d"), py::arg("n"), py::arg("method") = "auto", py::arg("samples") = 200,
        py::arg("seed") = 0, py::arg("tol") = 1e-9);

  m.def("truncated_d",
        [](const CArray& rho, const HistoryArg& p, const HistoryArg& q, std::size_t d, std::size_t n,
           std::vector<std::size_t> cutoffs) {
          return value_dict(
              truncated_d(to_density(rho), to_history(p, d, n), to_history(q, d, n), schedule_of(std::move(cutoffs))));
        },
        py::arg("rho"), py::arg("p"), py::arg("q"), py::arg("d"), py::arg("n"), py::arg("cutoffs"));

  m.def("divergence_witness",
        [](std::size_t dim, std::vector<std::size_t> cutoffs, const std::string& q, py::object rho) {
          const DensityOperator state = rho.is_none()
                                            ? DensityOperator::pure(ComplexMatrix::identity(dim).col(0))
                                            : to_density(rho.cast<CArray>());
          const auto p = identity_view(dim, 2);
          std::unique_ptr<OperatorView> view;
          if (q == "qu") view = qu_view(dim);
          else if (q == "swap") view = swap_view(dim);
          else if (q == "identity") view = identity_view(dim, 2);
          else throw ValidationError("q must be qu, swap or identity");
          const TruncationSchedule s = schedule_of(std::move(cutoffs));
          py::gil_scoped_release release;
          const DecoherenceValue v = classify_generalized(state, *p, *view, s);
          py::gil_scoped_acquire acquire;
          return value_dict(v);
        },
        py::arg("dim"), py::arg("cutoffs"), py::arg("q") = "qu", py::arg("rho") = py::none(),
        "Truncated doubled-space series for P = I and the given Q on (C^dim)^2.");

  m.def("D_form",
        [](const CArray& rho, const std::vector<std::vector<CArray>>& z, const std::vector<std::vector<CArray>>& w,
           std::size_t d, std::size_t n) {
          return D_form(to_density(rho), to_tensor_sum(z, d, n), to_tensor_sum(w, d, n));
        },
        py::arg("rho"), py::arg("z"), py::arg("w"), py::arg("d"), py::arg("n"),
        "z and w are lists of terms, each term a list of n d x d factors.");

  m.def("unboundedness_probe",
        [](const std::vector<std::size_t>& sizes) {
          std::vector<std::tuple<std::size_t, double, double>> rows;
          for (const auto& r : unboundedness_probe(sizes)) rows.emplace_back(r.n, r.norm, r.value);
          return rows;
        },
        py::arg("sizes"), "Rows (N, norm, value) of the growth witness.");

  m.def("check_consistent",
        [](const CArray& rho, const std::vector<HistoryArg>& members, std::size_t d, std::size_t n, double tol,
           const std::string& method) {
          std::vector<HistoryProjection> ms;
          for (const auto& h : members) ms.push_back(to_history(h, d, n));
          const auto ev = make_evaluator(parse_method(method), to_density(rho), d, n);
          const ConsistencyReport r = check_consistent(*ev, HistoryFamily(std::move(ms)), tol);
          py::dict out;
          out["consistent"] = r.consistent;
          out["max_re_offdiag"] = r.max_re_offdiag;
          out["pairs_checked"] = r.pairs_checked;
          out["probabilities"] = r.probabilities;
          out["prob_sum"] = r.prob_sum;
          out["unphysical"] = r.unphysical;
          return out;
        },
        py::arg("rho"), py::arg("members"), py::arg("d"), py::arg("n"), py::arg("tol") = 1e-9,
        py::arg("method") = "auto");

  m.def("diag_excess_search",
        [](const CArray& rho, std::size_t d, std::size_t n, std::size_t budget, std::size_t sweeps,
           std::uint64_t seed) {
          const ILSOperator op = build_M(to_density(rho), d, n);
          const ExcessResult r = [&] {
            py::gil_scoped_release release;
            return diag_excess_search(op, {budget, sweeps, seed});
          }();
          py::dict out;
          out["value"] = r.value;
          out["rank"] = r.rank;
          out["history"] = to_array(r.history.matrix());
          out["frame"] = to_array(r.frame);
          out["best_restart"] = r.best_restart;
          return out;
        },
        py::arg("rho"), py::arg("d"), py::arg("n"), py::arg("budget") = 200, py::arg("sweeps") = 50,
        py::arg("seed") = 0);
}
