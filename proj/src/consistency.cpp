#include "histq/consistency.hpp"

#include "histq/errors.hpp"
#include "histq/parallel.hpp"
#include "histq/sampling.hpp"

namespace histq {

HistoryFamily::HistoryFamily(std::vector<HistoryProjection> members, double tol)
    : members_(std::move(members)), tol_(tol) {
  if (members_.empty()) throw ValidationError("history family needs at least one member");
  const std::size_t d = members_.front().single_dim(), n = members_.front().order();
  for (const auto& m : members_)
    if (m.single_dim() != d || m.order() != n) throw ValidationError("family members live on different spaces");
  // sum_projection checks pairwise orthogonality and that the sum is a projection.
  const HistoryProjection total = sum_projection(members_, d, n, tol);
  atoms_ = members_;
  if (total.rank() < total.dim()) atoms_.push_back(total.complement());
  if (atoms_.size() > kMaxFamilyAtoms)
    throw SizeError("history family has " + std::to_string(atoms_.size()) + " atoms, cap is " +
                    std::to_string(kMaxFamilyAtoms));
}

HistoryProjection HistoryFamily::element(std::uint64_t mask) const {
  if (mask == 0 || mask > closure_size()) throw ValidationError("closure mask out of range");
  std::vector<HistoryProjection> parts;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (mask >> i & 1) parts.push_back(atoms_[i]);
  return sum_projection(parts, single_dim(), order(), tol_);
}

ConsistencyReport check_consistent(const Evaluator& evaluator, const HistoryFamily& family, double tol) {
  if (!(tol > 0.0)) throw ValidationError("consistency tolerance must be positive");
  if (family.single_dim() != evaluator.single_dim() || family.order() != evaluator.order())
    throw ShapeError("family and evaluator live on different spaces");
  const bool single = family.atoms().size() == 1;
  if (!evaluator.general() && !single)
    throw ValidationError("consistency checks need an evaluator defined on all histories");

  const std::uint64_t count = family.closure_size();
  std::vector<HistoryProjection> elements;
  elements.reserve(count);
  for (std::uint64_t m = 1; m <= count; ++m) elements.push_back(family.element(m));

  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  for (std::uint64_t a = 1; a <= count; ++a)
    for (std::uint64_t b = a + 1; b <= count; ++b)
      if ((a & b) == 0) pairs.emplace_back(a, b);

  std::vector<double> re(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    re[i] = std::abs(evaluator.evaluate(elements[pairs[i].first - 1], elements[pairs[i].second - 1]).real());
  });
  std::vector<double> diag(count);
  parallel_for(count, [&](std::size_t i) { diag[i] = evaluator.evaluate(elements[i], elements[i]).real(); });

  ConsistencyReport report;
  report.tol = tol;
  report.pairs_checked = pairs.size();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (re[i] > report.max_re_offdiag) {
      report.max_re_offdiag = re[i];
      report.worst_pair[0] = pairs[i].first;
      report.worst_pair[1] = pairs[i].second;
    }
  }
  for (std::size_t g = 0; g < family.members().size(); ++g) {
    report.probabilities.push_back(diag[(std::uint64_t{1} << g) - 1]);
    report.prob_sum += report.probabilities.back();
  }
  for (std::uint64_t m = 1; m <= count; ++m)
    if (diag[m - 1] > 1.0 + tol) report.unphysical.push_back(m);
  bool nonnegative = true;
  for (const double p : report.probabilities) nonnegative = nonnegative && p >= -tol;
  report.consistent = report.max_re_offdiag <= tol && nonnegative;
  return report;
}

namespace {

// G_a = tr_2((I (x) p) M) and G_b = tr_1((p (x) I) M) so that
// tr((x (x) p) M) = tr(x G_a) and tr((p (x) x) M) = tr(x G_b).
ComplexMatrix gradient(const ComplexMatrix& mm, const ComplexMatrix& p, std::size_t dim) {
  ComplexMatrix g(dim, dim);
  auto at = [&](std::size_t r1, std::size_t r2, std::size_t c1, std::size_t c2) {
    return mm(r1 * dim + r2, c1 * dim + c2);
  };
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      complex ga{}, gb{};
      for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t c = 0; c < dim; ++c) {
          ga += p(a, c) * at(i, c, j, a);
          gb += p(a, c) * at(c, i, a, j);
        }
      g(i, j) = ga + gb;
    }
  // Hermitian part: only it contributes to Re tr(x G) for Hermitian x.
  ComplexMatrix h = g + adjoint(g);
  h *= 0.5;
  return h;
}

ComplexMatrix top_frame(const ComplexMatrix& g, std::size_t rank) {
  const EigenDecomposition eig = hermitian_eig(g, 1e-12);
  ComplexMatrix frame(g.rows(), rank);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t k = 0; k < rank; ++k) frame(i, k) = eig.vectors(i, k);
  return frame;
}

ComplexMatrix frame_projection(const ComplexMatrix& frame) { return matmul(frame, adjoint(frame)); }

struct Candidate {
  double value = -1.0;
  ComplexMatrix frame;
};

}  // namespace

double diagonal_value(const ILSOperator& m, const ComplexMatrix& p) {
  const std::size_t dim = p.rows();
  if (m.matrix.rows() != dim * dim) throw ShapeError("diagonal_value: projection does not match M");
  complex total{};
  for (std::size_t i1 = 0; i1 < dim; ++i1)
    for (std::size_t j1 = 0; j1 < dim; ++j1) {
      if (p(i1, j1) == complex{}) continue;
      for (std::size_t i2 = 0; i2 < dim; ++i2)
        for (std::size_t j2 = 0; j2 < dim; ++j2)
          total += p(i1, j1) * p(i2, j2) * m.matrix(j1 * dim + j2, i1 * dim + i2);
    }
  return total.real();
}

ExcessResult diag_excess_search(const ILSOperator& m, const ExcessSearchOptions& options) {
  if (options.budget == 0) throw ValidationError("search budget must be positive");
  const std::size_t d = m.single_dim, n = m.order;
  const std::size_t dim = tensor_dim(d, n, SIZE_MAX);
  if (m.matrix.rows() != dim * dim) throw ShapeError("ILS operator has the wrong size");

  const RandomStream root(options.seed, "excess-search");
  std::vector<Candidate> best(options.budget);
  parallel_for(options.budget, [&](std::size_t r) {
    RandomStream rng = root.split("restart-" + std::to_string(r));
    const std::size_t rank = 1 + r % dim;
    ComplexMatrix frame = random_frame(dim, rank, rng);
    ComplexMatrix p = frame_projection(frame);
    Candidate c{diagonal_value(m, p), frame};
    double previous = c.value;
    for (std::size_t s = 0; s < options.sweeps; ++s) {
      frame = top_frame(gradient(m.matrix, p, dim), rank);
      p = frame_projection(frame);
      const double v = diagonal_value(m, p);
      if (v > c.value) c = {v, frame};
      if (std::abs(v - previous) <= 1e-13) break;
      previous = v;
    }
    best[r] = std::move(c);
  });

  std::size_t arg = 0;
  for (std::size_t r = 1; r < best.size(); ++r)
    if (best[r].value > best[arg].value) arg = r;
  const ComplexMatrix& frame = best[arg].frame;
  return {HistoryProjection(Projection::onto_frame(frame), d, n),
          best[arg].value,
          frame.cols(),
          frame,
          arg,
          options.budget};
}

}  // namespace histq
