#include <doctest.h>

#include <cstring>

#include "helpers.hpp"
#include "histq/errors.hpp"
#include "histq/io.hpp"
#include "histq/sampling.hpp"

using namespace histq;
using namespace histq::test;

TEST_CASE("matrix JSON round-trips bit-exactly") {
  RandomStream rng(71, "io");
  ComplexMatrix m = random_matrix(3, 4, rng);
  m(0, 0) = complex(1e-300, -0.0);
  m(1, 1) = complex(0.1, 1.0 / 3.0);
  const ComplexMatrix back = matrix_from_json(json::parse(to_json(m).dump()));
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 4);
  CHECK(std::memcmp(back.data().data(), m.data().data(), sizeof(complex) * 12) == 0);

  CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"rows": 2, "cols": 2, "data": [[1, 0]]})")), ShapeError);
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"rows": 1, "cols": 1, "data": [[1]]})")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"rows": -1, "cols": 1, "data": []})")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"([1, 2])")), ValidationError);
}

TEST_CASE("history, density and tensor-sum JSON") {
  RandomStream rng(72, "io2");
  const HomogeneousHistory h = random_homogeneous(3, 2, rng);
  const HistorySpec hs = history_from_json(to_json(h));
  REQUIRE(hs.homogeneous);
  CHECK(hs.order == 2);
  CHECK(hs.projection().matrix() == embed_homogeneous(h).matrix());

  const HistoryProjection p(random_projection(4, 2, rng), 2, 2);
  const HistorySpec ps = history_from_json(to_json(p));
  REQUIRE(ps.general);
  CHECK(ps.general->matrix() == p.matrix());

  auto bad = to_json(h);
  bad["order"] = 3;
  CHECK_THROWS_AS(history_from_json(bad), ShapeError);

  const DensityOperator rho = random_density(3, rng);
  const DensityOperator back = density_from_json(json::parse(to_json(rho).dump()));
  CHECK(back.vectors() == rho.vectors());
  const DensityOperator from_m = density_from_json(json{{"matrix", to_json(rho.matrix())}});
  CHECK(max_abs_diff(from_m.matrix(), rho.matrix()) <= 1e-12);
  CHECK_THROWS_AS(density_from_json(json{{"weights", {1.0}}}), ValidationError);

  SimpleTensorSum z(2, 2);
  z.add_term(std::vector<ComplexMatrix>{random_matrix(2, 2, rng), random_matrix(2, 2, rng)});
  z.add_term(std::vector<ComplexMatrix>{random_matrix(2, 2, rng), random_matrix(2, 2, rng)});
  const SimpleTensorSum zb = tensor_sum_from_json(json::parse(to_json(z).dump()));
  CHECK(zb.size() == 2);
  CHECK(zb.factor(1, 1) == z.factor(1, 1));
  CHECK(tensor_sum_from_json(json{{"order", 2}, {"dim", 3}, {"terms", json::array()}}).size() == 0);
}

TEST_CASE("family JSON") {
  const json j = {{"members",
                   {to_json(hist({P0(), P0()})), to_json(hist({P1(), P1()})),
                    to_json(hist({P0(), P1()})), to_json(hist({P1(), P0()}))}}};
  const HistoryFamily f = family_from_json(j);
  CHECK(f.members().size() == 4);
  CHECK_FALSE(f.has_remainder());
}

TEST_CASE("run config") {
  const RunConfig c = config_from_json(json{{"d", 3}, {"seed", 9}, {"cutoffs", {2, 4, 8}}});
  CHECK(c.single_dim == 3);
  CHECK(c.order == 2);
  CHECK(c.seed == 9);
  CHECK(c.schedule.cutoffs.size() == 3);
  const RunConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK_THROWS_AS(config_from_json(json{{"d", 1}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(json{{"validation_tol", 0.0}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(json{{"history_cap", 0}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(json{{"format", "xml"}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(json{{"colour", 1}}), ValidationError);
}

TEST_CASE("csv formatting") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-2.0) == "-2");
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CsvWriter w({"a", "b"});
  w.row({"1", "2.5"});
  CHECK(w.str() == "a,b\n1,2.5\n");
  CHECK_THROWS_AS(w.row({"1"}), ShapeError);
}
