#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "histq/cli.hpp"
#include "histq/io.hpp"
#include "histq/random.hpp"

using namespace histq;
using namespace histq::test;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "histq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("histq-cli-" + std::to_string(std::hash<std::string>{}(
                                                          std::to_string(reinterpret_cast<std::uintptr_t>(this)))));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const json& j) const {
    const std::string p = (path / name).string();
    write_text_file(p, j.dump());
    return p;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("eval: direct and ils agree") {
  TempDir tmp;
  const std::string rho = tmp.write("rho.json", to_json(DensityOperator::pure(basis(2, 0))));
  const std::string h = tmp.write("h.json", to_json(hist({Pplus(), P0()})));
  const std::string k = tmp.write("k.json", to_json(hist({Pminus(), P0()})));
  const Result a = run_cli({"eval", "--rho", rho, "--h", h, "--k", k, "--method", "direct"});
  const Result b = run_cli({"eval", "--rho", rho, "--h", h, "--k", k, "--method", "ils"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const json ja = json::parse(a.out), jb = json::parse(b.out);
  CHECK(std::abs(ja["value"][0].get<double>() - 0.25) <= 1e-12);
  CHECK(std::abs(ja["value"][0].get<double>() - jb["value"][0].get<double>()) <= 1e-9);
  CHECK(ja["method"] == "direct");
  CHECK(ja["residuals"].contains("series"));
}

TEST_CASE("exit codes") {
  TempDir tmp;
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"eval", "--bogus"}).code == cli::kUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
  CHECK(run_cli({"--help"}).code == cli::kOk);
  CHECK(run_cli({"verify", "-d", "1"}).code == cli::kValidation);
  const std::string bad = tmp.write("bad.json", json{{"matrix", to_json(ComplexMatrix::identity(2))}});
  CHECK(run_cli({"build-m", "--rho", bad}).code == cli::kValidation);
  const std::string rho = tmp.write("rho.json", to_json(DensityOperator::pure(basis(4, 0))));
  const Result big = run_cli({"build-m", "--rho", rho, "-d", "4", "-n", "3"});
  CHECK(big.code == cli::kSize);
  CHECK(big.err.find("streaming") != std::string::npos);
  CHECK(run_cli({"build-m", "--rho", rho, "-d", "2"}).code == cli::kValidation);
}

TEST_CASE("verify on the default qubit config passes") {
  TempDir tmp;
  const Result r = run_cli({"verify", "--samples", "40", "--csv", tmp.file("v.csv")});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["passed"] == true);
  CHECK(j["reports"].size() == 4);
  CHECK(j["meta"]["prng"] == std::string(kPrngVersion));
  const std::string csv = slurp(tmp.file("v.csv"));
  CHECK(csv.rfind("evaluator,samples,hermiticity,positivity,normalization,additivity,passed\n", 0) == 0);
}

TEST_CASE("config file with flag override") {
  TempDir tmp;
  const std::string cfg = tmp.write("cfg.json", json{{"d", 3}, {"n", 2}, {"seed", 4}});
  const Result a = run_cli({"verify", "--config", cfg, "--samples", "5", "--methods", "ils"});
  REQUIRE(a.code == 0);
  CHECK(json::parse(a.out)["meta"]["seed"] == 4);
  const Result b = run_cli({"verify", "--config", cfg, "--samples", "5", "--methods", "ils", "--seed", "8"});
  CHECK(json::parse(b.out)["meta"]["seed"] == 8);
}

TEST_CASE("diverge writes the partial-sum CSV") {
  TempDir tmp;
  const Result r = run_cli({"diverge", "--dim", "16", "--cutoffs", "4,8,16", "--out", tmp.file("d.csv")});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["verdict"] == "divergent");
  CHECK(slurp(tmp.file("d.csv")) ==
        "cutoff,re,im,verdict\n4,2.5,0,divergent\n8,4.5,0,divergent\n16,8.5,0,divergent\n");
  const Result u = run_cli({"diverge", "--dim", "16", "--q", "builtin:swap", "--cutoffs", "4,8,16", "--format", "csv"});
  CHECK(u.out.find("16,16,0,divergent") != std::string::npos);
  CHECK(run_cli({"diverge", "--dim", "16", "--q", "builtin:nope", "--cutoffs", "4,8,16"}).code == cli::kValidation);
  CHECK(run_cli({"diverge", "--dim", "16", "--cutoffs", "4,8"}).code == cli::kValidation);
}

TEST_CASE("unbounded-probe CSV") {
  TempDir tmp;
  const Result r = run_cli({"unbounded-probe", "--sizes", "1,2,4", "--out", tmp.file("p.csv")});
  REQUIRE(r.code == 0);
  CHECK(slurp(tmp.file("p.csv")) == "N,norm,value\n1,1,1\n2,1,2\n4,1,4\n");
}

TEST_CASE("quadform, consistency and search-excess") {
  TempDir tmp;
  const std::string rho = tmp.write("rho.json", to_json(DensityOperator::pure(plus())));
  const std::string one = tmp.write("one.json", to_json(SimpleTensorSum::identity(2, 2)));
  const Result q = run_cli({"quadform", "--rho", rho, "--z", one, "--w", one});
  REQUIRE(q.code == 0);
  CHECK(std::abs(json::parse(q.out)["value"][0].get<double>() - 1.0) <= 1e-12);

  const json fam = {{"members",
                     {to_json(hist({P0(), P0()})), to_json(hist({P0(), P1()})), to_json(hist({P1(), P0()})),
                      to_json(hist({P1(), P1()}))}}};
  const Result c = run_cli({"consistency", "--rho", rho, "--family", tmp.write("fam.json", fam), "--tol", "1e-9"});
  REQUIRE(c.code == 0);
  const json jc = json::parse(c.out);
  CHECK(jc["consistent"] == true);
  CHECK(std::abs(jc["prob_sum"].get<double>() - 1.0) <= 1e-9);

  const Result s = run_cli({"search-excess", "-d", "2", "-n", "2", "--budget", "40", "--seed", "3"});
  REQUIRE(s.code == 0);
  const json js = json::parse(s.out);
  CHECK(js["value"].get<double>() > 1.0);
  const ComplexMatrix xi = matrix_from_json(js["xi"]);
  CHECK(xi.cols() == js["rank"].get<std::size_t>());
  CHECK(run_cli({"search-excess", "-d", "2", "-n", "2", "--budget", "40", "--seed", "3"}).out == s.out);
}

TEST_CASE("bench reports agreement") {
  const Result r = run_cli({"bench", "-d", "3", "-n", "2", "--methods", "ils,stream", "--pairs", "3"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "method,pairs,wall_seconds,max_deviation");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    const double dev = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(dev <= 1e-9);
  }
  CHECK(rows == 2);
}
