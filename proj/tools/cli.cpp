#include "histq/cli.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "histq/errors.hpp"
#include "histq/io.hpp"
#include "histq/sampling.hpp"

namespace histq::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

// Flags shared by every subcommand. Unset optionals fall back to --config,
// then to the RunConfig defaults.
struct Common {
  std::string config_path;
  std::optional<std::size_t> d, n, materialize_cap, history_cap;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> format;
  std::optional<std::vector<std::size_t>> cutoffs;

  void attach(CLI::App* sub, bool dims) {
    sub->add_option("--config", config_path, "JSON RunConfig file");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--materialize-cap", materialize_cap, "largest doubled dimension to materialize");
    sub->add_option("--history-cap", history_cap, "largest history-space dimension");
    if (dims) {
      sub->add_option("-d,--dim", d, "single-time dimension");
      sub->add_option("-n,--order", n, "number of times");
    }
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : config_from_json(read_json_file(config_path));
    if (d) c.single_dim = *d;
    if (n) c.order = *n;
    if (seed) c.seed = *seed;
    if (materialize_cap) c.materialize_cap = *materialize_cap;
    if (history_cap) c.history_cap = *history_cap;
    if (tol) c.consistency_tol = *tol;
    if (format) c.format = *format;
    if (cutoffs) c.schedule.cutoffs = *cutoffs;
    c.validate();
    return c;
  }
};

json meta(const std::string& command, const RunConfig& c) {
  return {{"command", command}, {"seed", c.seed}, {"prng", std::string(kPrngVersion)}, {"version", kVersion}};
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

std::string csv_complex_re(complex z) { return format_double(z.real()); }
std::string csv_complex_im(complex z) { return format_double(z.imag()); }

DensityOperator load_rho(const std::string& path, const RunConfig& c) {
  return density_from_json(read_json_file(path), c.validation_tol);
}

HistorySpec load_history(const std::string& path, const RunConfig& c) {
  return history_from_json(read_json_file(path), c.validation_tol);
}

void require_state_dim(const DensityOperator& rho, std::size_t d) {
  if (rho.dim() != d)
    throw ShapeError("state has dimension " + std::to_string(rho.dim()) + ", histories use " + std::to_string(d));
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string rho, h, k, method = "auto";
  std::optional<double> tol;
};

int do_eval(const EvalArgs& a, std::ostream& out) {
  const RunConfig c = a.common.resolve();
  const DensityOperator rho = load_rho(a.rho, c);
  const HistorySpec h = load_history(a.h, c), k = load_history(a.k, c);
  if (h.single_dim != k.single_dim || h.order != k.order) throw ShapeError("h and k live on different spaces");
  require_state_dim(rho, h.single_dim);
  const Method method = parse_method(a.method);
  const bool homogeneous = h.homogeneous && k.homogeneous;

  auto value_with = [&](Method m) -> complex {
    const auto ev = make_evaluator(m, rho, h.single_dim, h.order, c.materialize_cap);
    if (homogeneous) return ev->evaluate(*h.homogeneous, *k.homogeneous);
    return ev->evaluate(h.projection(c.history_cap), k.projection(c.history_cap));
  };
  const auto chosen = make_evaluator(method, rho, h.single_dim, h.order, c.materialize_cap);
  const complex value = value_with(method);

  // Agreement with the other constructions that apply to this input.
  json residuals = json::object();
  double worst = 0.0;
  for (Method m : {Method::Direct, Method::Series, Method::Ils, Method::Stream}) {
    if (m == chosen->method()) continue;
    if (m == Method::Direct && !homogeneous) continue;
    if (m == Method::Ils && tensor_dim(h.single_dim, 2 * h.order, SIZE_MAX) > c.materialize_cap) continue;
    const double r = std::abs(value_with(m) - value);
    residuals[std::string(method_name(m))] = r;
    worst = std::max(worst, r);
  }
  const double tol = a.tol.value_or(c.arithmetic_tol * 10);
  emit(out, {{"value", to_json(value)},
             {"method", std::string(chosen->name())},
             {"residuals", residuals},
             {"max_residual", worst},
             {"agree", worst <= tol},
             {"meta", meta("eval", c)}});
  if (worst > tol) throw NumericalError("evaluation methods disagree by " + format_double(worst));
  return kOk;
}

// --- build-m ----------------------------------------------------------------

struct BuildArgs {
  Common common;
  std::string rho, out;
};

int do_build_m(const BuildArgs& a, std::ostream& out) {
  const RunConfig c = a.common.resolve();
  const DensityOperator rho = load_rho(a.rho, c);
  require_state_dim(rho, c.single_dim);
  const ILSOperator m = build_M(rho, c.single_dim, c.order, c.materialize_cap);
  json summary = {{"d", c.single_dim},
                  {"n", c.order},
                  {"dim", m.matrix.rows()},
                  {"trace", to_json(trace(m.matrix))},
                  {"norm", operator_norm(m.matrix)},
                  {"meta", meta("build-m", c)}};
  if (a.out.empty()) {
    summary["matrix"] = to_json(m.matrix);
  } else {
    write_text_file(a.out, to_json(m.matrix).dump() + "\n");
  }
  emit(out, summary);
  return kOk;
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  Common common;
  std::string rho, csv, methods = "direct,series,ils,stream";
  std::size_t samples = 200;
  double tol = 1e-9;
};

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::string item;
  for (std::size_t i = 0; i <= list.size(); ++i) {
    if (i == list.size() || list[i] == ',') {
      if (!item.empty()) out.push_back(parse_method(item));
      item.clear();
    } else {
      item += list[i];
    }
  }
  if (out.empty()) throw ValidationError("no methods given");
  return out;
}

DensityOperator state_or_random(const std::string& path, const RunConfig& c, std::size_t dim, bool pure) {
  if (!path.empty()) return load_rho(path, c);
  RandomStream rng(c.seed, "cli/state");
  return pure ? random_pure_density(dim, rng) : random_density(dim, rng);
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
  const RunConfig c = a.common.resolve();
  const DensityOperator rho = state_or_random(a.rho, c, c.single_dim, false);
  require_state_dim(rho, c.single_dim);
  json reports = json::array();
  CsvWriter csv({"evaluator", "samples", "hermiticity", "positivity", "normalization", "additivity", "passed"});
  bool all = true;
  for (Method m : parse_methods(a.methods)) {
    const auto ev = make_evaluator(m, rho, c.single_dim, c.order, c.materialize_cap);
    const AxiomReport r = verify_axioms(*ev, a.samples, c.seed, a.tol);
    all = all && r.passed();
    reports.push_back(to_json(r));
    csv.row({r.evaluator, std::to_string(r.samples), format_double(r.hermiticity), format_double(r.positivity),
             format_double(r.normalization), format_double(r.additivity), r.passed() ? "true" : "false"});
  }
  if (!a.csv.empty()) write_text_file(a.csv, csv.str());
  emit(out, {{"passed", all}, {"reports", reports}, {"meta", meta("verify", c)}});
  return kOk;
}

// --- quadform ---------------------------------------------------------------

struct QuadArgs {
  Common common;
  std::string rho, z, w;
};

int do_quadform(const QuadArgs& a, std::ostream& out) {
  const RunConfig c = a.common.resolve();
  const DensityOperator rho = load_rho(a.rho, c);
  const SimpleTensorSum z = tensor_sum_from_json(read_json_file(a.z));
  const SimpleTensorSum w = tensor_sum_from_json(read_json_file(a.w));
  emit(out, {{"value", to_json(D_form(rho, z, w))}, {"meta", meta("quadform", c)}});
  return kOk;
}

// --- unbounded-probe --------------------------------------------------------

struct ProbeArgs {
  Common common;
  std::vector<std::size_t> sizes{1, 2, 4, 8, 16, 32, 64, 128, 256};
  std::string out;
};

int do_probe(const ProbeArgs& a, std::ostream& out) {
  const RunConfig c = a.common.resolve();
  CsvWriter csv({"N", "norm", "value"});
  json rows = json::array();
  for (const ProbeRow& r : unboundedness_probe(a.sizes)) {
    csv.row({std::to_string(r.n), format_double(r.norm), format_double(r.value)});
    rows.push_back({{"N", r.n}, {"norm", r.norm}, {"value", r.value}});
  }
  if (!a.out.empty()) write_text_file(a.out, csv.str());
  if (c.format == "csv") {
    out << csv.str();
  } else {
    emit(out, {{"rows", rows}, {"meta", meta("unbounded-probe", c)}});
  }
  return kOk;
}

// --- diverge ----------------------------------------------------------------

struct DivergeArgs {
  Common common;
  std::string rho, p = "builtin:identity", q = "builtin:qu", out;
  std::optional<std::size_t> dim;
};

std::unique_ptr<OperatorView> load_view(const std::string& source, std::size_t dim, const RunConfig& c,
                                        std::size_t& order) {
  if (source == "builtin:identity") return identity_view(dim, order);
  if (source == "builtin:qu" || source == "builtin:swap") {
    if (order != 2) throw ShapeError(source + " acts on two slots");
    return source == "builtin:qu" ? qu_view(dim) : swap_view(dim);
  }
  if (source.rfind("builtin:", 0) == 0) throw ValidationError("unknown builtin operator " + source);
  const HistorySpec h = load_history(source, c);
  if (h.single_dim != dim || h.order != order) throw ShapeError(source + " does not match --dim and the order");
  return dense_view(h.projection(c.history_cap).matrix(), dim, order);
}

int do_diverge(const DivergeArgs& a, std::ostream& out) {
  const RunConfig c = a.common.resolve();
  std::size_t dim = a.dim.value_or(0);
  std::size_t order = 2;
  // A history file fixes the space when --dim is not given.
  for (const std::string& s : {a.p, a.q}) {
    if (s.rfind("builtin:", 0) == 0) continue;
    const HistorySpec h = load_history(s, c);
    if (dim == 0) dim = h.single_dim;
    order = h.order;
  }
  if (dim == 0) dim = c.schedule.cutoffs.back();
  DensityOperator rho = [&] {
    if (!a.rho.empty()) return load_rho(a.rho, c);
    ComplexVector e(dim);
    e[0] = 1.0;
    return DensityOperator::pure(e);
  }();
  require_state_dim(rho, dim);
  const auto p = load_view(a.p, dim, c, order);
  const auto q = load_view(a.q, dim, c, order);
  const DecoherenceValue v = classify_generalized(rho, *p, *q, c.schedule);

  CsvWriter csv({"cutoff", "re", "im", "verdict"});
  for (std::size_t i = 0; i < v.cutoffs.size(); ++i)
    csv.row({std::to_string(v.cutoffs[i]), csv_complex_re(v.partial_sums[i]), csv_complex_im(v.partial_sums[i]),
             std::string(v.verdict())});
  if (!a.out.empty()) write_text_file(a.out, csv.str());
  json j = to_json(v);
  j["dim"] = dim;
  j["order"] = order;
  j["meta"] = meta("diverge", c);
  if (c.format == "csv") {
    out << csv.str();
  } else {
    emit(out, j);
  }
  return kOk;
}

// --- consistency ------------------------------------------------------------

struct ConsistencyArgs {
  Common common;
  std::string rho, family, method = "auto";
};

int do_consistency(const ConsistencyArgs& a, std::ostream& out) {
  const RunConfig c = a.common.resolve();
  const DensityOperator rho = load_rho(a.rho, c);
  const HistoryFamily family = family_from_json(read_json_file(a.family), c.history_cap, c.validation_tol);
  require_state_dim(rho, family.single_dim());
  const auto ev = make_evaluator(parse_method(a.method), rho, family.single_dim(), family.order(),
                                 c.materialize_cap);
  json j = to_json(check_consistent(*ev, family, c.consistency_tol));
  j["evaluator"] = std::string(ev->name());
  j["meta"] = meta("consistency", c);
  emit(out, j);
  return kOk;
}

// --- search-excess ----------------------------------------------------------

struct SearchArgs {
  Common common;
  std::string rho;
  std::size_t budget = 200, sweeps = 50;
};

int do_search(const SearchArgs& a, std::ostream& out) {
  const RunConfig c = a.common.resolve();
  const DensityOperator rho = state_or_random(a.rho, c, c.single_dim, true);
  require_state_dim(rho, c.single_dim);
  const ILSOperator m = build_M(rho, c.single_dim, c.order, c.materialize_cap);
  const ExcessResult r = diag_excess_search(m, {a.budget, a.sweeps, c.seed});
  emit(out, {{"value", r.value},
             {"rank", r.rank},
             {"xi", to_json(r.frame)},
             {"history", to_json(r.history)},
             {"best_restart", r.best_restart},
             {"restarts", r.restarts},
             {"exceeds_one", r.value > 1.0 + c.consistency_tol},
             {"meta", meta("search-excess", c)}});
  return kOk;
}

// --- bench ------------------------------------------------------------------

struct BenchArgs {
  Common common;
  std::string methods = "ils,stream", out, rho;
  std::size_t pairs = 10;
};

int do_bench(const BenchArgs& a, std::ostream& out) {
  const RunConfig c = a.common.resolve();
  const DensityOperator rho = state_or_random(a.rho, c, c.single_dim, false);
  require_state_dim(rho, c.single_dim);
  RandomStream rng(c.seed, "cli/bench");
  std::vector<HistoryProjection> hs, ks;
  for (std::size_t i = 0; i < a.pairs; ++i) {
    hs.push_back(embed_homogeneous(random_homogeneous(c.single_dim, c.order, rng), SIZE_MAX));
    ks.push_back(embed_homogeneous(random_homogeneous(c.single_dim, c.order, rng), SIZE_MAX));
  }
  const std::vector<Method> methods = parse_methods(a.methods);
  std::vector<std::vector<complex>> values;
  std::vector<double> seconds;
  for (Method m : methods) {
    const auto start = std::chrono::steady_clock::now();
    const auto ev = make_evaluator(m, rho, c.single_dim, c.order, c.materialize_cap);
    std::vector<complex> v;
    for (std::size_t i = 0; i < a.pairs; ++i) v.push_back(ev->evaluate(hs[i], ks[i]));
    seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    values.push_back(std::move(v));
  }
  CsvWriter csv({"method", "pairs", "wall_seconds", "max_deviation"});
  double overall = 0.0;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    double dev = 0.0;
    for (std::size_t o = 0; o < methods.size(); ++o)
      for (std::size_t i = 0; i < a.pairs; ++i) dev = std::max(dev, std::abs(values[m][i] - values[o][i]));
    overall = std::max(overall, dev);
    csv.row({std::string(method_name(methods[m])), std::to_string(a.pairs), format_double(seconds[m]),
             format_double(dev)});
  }
  if (!a.out.empty()) write_text_file(a.out, csv.str());
  out << csv.str();
  return overall <= 1e-9 ? kOk : kNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decoherence functionals of history quantum mechanics on finite-dimensional spaces", "histq"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  int code = kOk;
  std::function<int()> action;

  EvalArgs eval;
  {
    auto* s = app.add_subcommand("eval", "evaluate d(h, k)");
    s->set_help_flag("--help", "print help");  // -h would clash with --h
    eval.common.attach(s, false);
    s->add_option("--rho", eval.rho, "density JSON")->required();
    s->add_option("--h", eval.h, "history JSON")->required();
    s->add_option("--k", eval.k, "history JSON")->required();
    s->add_option("--method", eval.method, "direct|series|ils|stream|auto");
    s->add_option("--tol", eval.tol, "agreement tolerance between methods");
    s->callback([&] { action = [&] { return do_eval(eval, out); }; });
  }
  BuildArgs build;
  {
    auto* s = app.add_subcommand("build-m", "materialize the ILS operator");
    build.common.attach(s, true);
    s->add_option("--rho", build.rho, "density JSON")->required();
    s->add_option("--out", build.out, "matrix JSON output");
    s->callback([&] { action = [&] { return do_build_m(build, out); }; });
  }
  VerifyArgs verify;
  {
    auto* s = app.add_subcommand("verify", "run the axiom suite");
    verify.common.attach(s, true);
    s->add_option("--rho", verify.rho, "density JSON (default: seeded random state)");
    s->add_option("--samples", verify.samples);
    s->add_option("--tol", verify.tol);
    s->add_option("--methods", verify.methods, "comma-separated evaluators");
    s->add_option("--csv", verify.csv, "CSV report");
    s->callback([&] { action = [&] { return do_verify(verify, out); }; });
  }
  QuadArgs quad;
  {
    auto* s = app.add_subcommand("quadform", "evaluate D(z, w)");
    quad.common.attach(s, false);
    s->add_option("--rho", quad.rho)->required();
    s->add_option("--z", quad.z, "tensor sum JSON")->required();
    s->add_option("--w", quad.w, "tensor sum JSON")->required();
    s->callback([&] { action = [&] { return do_quadform(quad, out); }; });
  }
  ProbeArgs probe;
  {
    auto* s = app.add_subcommand("unbounded-probe", "norm and delta of the growth witness");
    probe.common.attach(s, false);
    s->add_option("--sizes", probe.sizes)->delimiter(',');
    s->add_option("--out", probe.out, "CSV output");
    s->add_option("--format", probe.common.format, "json|csv on stdout");
    s->callback([&] { action = [&] { return do_probe(probe, out); }; });
  }
  DivergeArgs diverge;
  {
    auto* s = app.add_subcommand("diverge", "truncated doubled-space series and its verdict");
    diverge.common.attach(s, false);
    s->add_option("--rho", diverge.rho, "density JSON (default: e_1)");
    s->add_option("--p", diverge.p, "history JSON or builtin:identity");
    s->add_option("--q", diverge.q, "history JSON, builtin:qu, builtin:swap or builtin:identity");
    s->add_option("--dim", diverge.dim, "single-time dimension");
    s->add_option("--cutoffs", diverge.common.cutoffs)->delimiter(',');
    s->add_option("--out", diverge.out, "CSV output");
    s->add_option("--format", diverge.common.format, "json|csv on stdout");
    s->callback([&] { action = [&] { return do_diverge(diverge, out); }; });
  }
  ConsistencyArgs cons;
  {
    auto* s = app.add_subcommand("consistency", "check a family of histories");
    cons.common.attach(s, false);
    s->add_option("--rho", cons.rho)->required();
    s->add_option("--family", cons.family, "family JSON")->required();
    s->add_option("--tol", cons.common.tol, "consistency tolerance");
    s->add_option("--method", cons.method);
    s->callback([&] { action = [&] { return do_consistency(cons, out); }; });
  }
  SearchArgs search;
  {
    auto* s = app.add_subcommand("search-excess", "look for histories with d(h, h) > 1");
    search.common.attach(s, true);
    s->add_option("--rho", search.rho, "density JSON (default: seeded random pure state)");
    s->add_option("--budget", search.budget, "restarts");
    s->add_option("--sweeps", search.sweeps, "sweeps per restart");
    s->callback([&] { action = [&] { return do_search(search, out); }; });
  }
  BenchArgs bench;
  {
    auto* s = app.add_subcommand("bench", "time evaluation methods on the same pairs");
    bench.common.attach(s, true);
    s->add_option("--rho", bench.rho);
    s->add_option("--methods", bench.methods);
    s->add_option("--pairs", bench.pairs);
    s->add_option("--out", bench.out, "CSV output");
    s->callback([&] { action = [&] { return do_bench(bench, out); }; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    code = action();
  } catch (const SizeError& e) {
    err << "histq: size limit: " << e.what() << '\n';
    return kSize;
  } catch (const NumericalError& e) {
    err << "histq: numerical: " << e.what() << '\n';
    return kNumerical;
  } catch (const ShapeError& e) {
    err << "histq: shape: " << e.what() << '\n';
    return kValidation;
  } catch (const ValidationError& e) {
    err << "histq: invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "histq: " << e.what() << '\n';
    return kNumerical;
  }
  return code;
}

}  // namespace histq::cli
