#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli_runner.hpp"
#include "mirrorprox/problems.hpp"
#include "mirrorprox/report.hpp"

using namespace mirrorprox;
namespace fs = std::filesystem;

namespace {

TraceTable read_trace(const fs::path& path) {
  std::istringstream in(cli::slurp(path));
  return read_trace_csv(in, path.string());
}

}  // namespace

TEST_CASE("generate writes a loadable, reproducible file") {
  const auto dir = cli::scratch_dir();
  REQUIRE(cli::run("generate --seed 42 --eig 0 100 -o g42.vigame").code == 0);
  REQUIRE(cli::run("generate --seed 42 --eig 0 100 -o g42b.vigame").code == 0);
  CHECK(load_spec(dir / "g42.vigame") == generate_game(42, 0.0, 100.0));
  CHECK(cli::slurp(dir / "g42.vigame") == cli::slurp(dir / "g42b.vigame"));
  const auto r = cli::run("generate --seed 42 --eig 0 100 -o g42c.vigame");
  CHECK(r.output.find("L_computed") != std::string::npos);
}

TEST_CASE("seed falls back to the environment") {
  const auto dir = cli::scratch_dir();
  REQUIRE(cli::run("generate -o env.vigame", "MIRRORPROX_SEED=42").code == 0);
  CHECK(load_spec(dir / "env.vigame") == generate_game(42, 0.0, 100.0));
  CHECK(cli::run("generate -o env2.vigame", "MIRRORPROX_SEED=abc").code == 2);
}

TEST_CASE("argument errors exit with 2") {
  CHECK(cli::run("generate --seed 1 --eig 100 0 -o bad.vigame").code == 2);
  CHECK(cli::run("solve matching-pennies --method newton").code == 2);
  CHECK(cli::run("solve matching-pennies --gamma fast").code == 2);
  CHECK(cli::run("solve matching-pennies --iters 0").code == 2);
  CHECK(cli::run("solve matching-pennies --x0 0.9,0.9,0.5,0.5 -o x").code == 2);
  CHECK(cli::run("plot").code == 2);
  CHECK(cli::run("").code == 2);
  CHECK(cli::run("--help").code == 0);
}

TEST_CASE("I/O errors exit with 4 and name the path") {
  const auto r = cli::run("generate --seed 1 -o /nonexistent/dir/x.vigame");
  CHECK(r.code == 4);
  CHECK(r.output.find("/nonexistent/dir/x.vigame") != std::string::npos);
  CHECK(cli::run("solve /nonexistent/problem.vigame").code == 4);
  CHECK(cli::run("plot /nonexistent/trace.csv").code == 4);
}

TEST_CASE("malformed problem files exit with 2") {
  const auto dir = cli::scratch_dir();
  { std::ofstream(dir / "broken.vigame") << "{\"a\": [[1, 0], [0, 1]]}"; }
  const auto r = cli::run("solve broken.vigame -o broken");
  CHECK(r.code == 2);
  CHECK(r.output.find("'b'") != std::string::npos);
}

TEST_CASE("solve writes a trace whose Popov rows respect the bound") {
  const auto dir = cli::scratch_dir();
  REQUIRE(cli::run("generate --seed 42 --eig 0 100 -o g42.vigame").code == 0);
  REQUIRE(cli::run("solve g42.vigame --iters 200 --gap-samples 20000 -o popov").code == 0);
  const TraceTable t = read_trace(dir / "popov" / "trace.csv");
  REQUIRE(t.rows.size() == 21);
  for (const auto& row : t.rows) CHECK(row.gap_estimate <= row.bound);
  CHECK(t.rows.back().map_evals == 201);
  CHECK(t.meta.at("method") == "popov");

  REQUIRE(cli::run("solve g42.vigame --method korpelevich --iters 200 --gap-samples 20000 -o korp")
              .code == 0);
  const TraceTable k = read_trace(dir / "korp" / "trace.csv");
  CHECK(k.rows.back().map_evals == 400);
}

TEST_CASE("solve is byte-for-byte reproducible") {
  const auto dir = cli::scratch_dir();
  const std::string args = "solve --seed 42 --mirror euclidean --iters 300 --gap-samples 20000 ";
  REQUIRE(cli::run(args + "-o rep1").code == 0);
  REQUIRE(cli::run(args + "--threads 3 -o rep2").code == 0);
  CHECK(cli::slurp(dir / "rep1" / "trace.csv") == cli::slurp(dir / "rep2" / "trace.csv"));
  CHECK_FALSE(cli::slurp(dir / "rep1" / "trace.csv").empty());
}

TEST_CASE("matching pennies converges") {
  const auto dir = cli::scratch_dir();
  REQUIRE(cli::run("solve matching-pennies --iters 2000 --gap-every 500 -o mp").code == 0);
  const TraceTable t = read_trace(dir / "mp" / "trace.csv");
  CHECK(t.rows.back().gap_method == "grid");
  CHECK(t.rows.back().gap_estimate < 1e-3);

  REQUIRE(cli::run("solve matching-pennies --iters 2000 --x0 0.9,0.1,0.1,0.9 "
                   "--y0 0.9,0.1,0.1,0.9 --gap-every 500 -o mp_skewed")
              .code == 0);
  const TraceTable s = read_trace(dir / "mp_skewed" / "trace.csv");
  for (const auto& row : s.rows) CHECK(row.gap_estimate <= row.bound);
  CHECK(s.rows.back().gap_estimate < s.rows.front().gap_estimate);
}

TEST_CASE("verify reports every invariant") {
  for (const char* mirror : {"entropic", "euclidean"}) {
    const auto r = cli::run(std::string("verify matching-pennies --iters 500 --mirror ") + mirror +
                            " --x0 0.9,0.1,0.1,0.9");
    CHECK(r.code == 0);
    CHECK(r.output.find("FAIL") == std::string::npos);
    CHECK(r.output.find("PASS  eps-sum-bound") != std::string::npos);
  }
  const auto skipped = cli::run("verify matching-pennies --iters 100 --gamma 5 --x0 0.9,0.1,0.1,0.9");
  CHECK(skipped.code == 0);
  CHECK(skipped.output.find("N/A   eps-sum-bound") != std::string::npos);
  CHECK(cli::run("verify zero --iters 50").code == 0);
}

TEST_CASE("strict mode succeeds on a sound run") {
  CHECK(cli::run("solve matching-pennies --strict --iters 100 -o strict_ok").code == 0);
}

TEST_CASE("gap prints both estimators") {
  const auto r = cli::run("gap matching-pennies --x 1,0,0.5,0.5 --gap-samples 5000");
  CHECK(r.code == 0);
  CHECK(r.output.find("sampling") != std::string::npos);
  CHECK(r.output.find("grid 1") != std::string::npos);
  CHECK(cli::run("gap matching-pennies --x 1,1,0.5,0.5").code == 2);
}

TEST_CASE("plot overlays traces and reports malformed files by line") {
  const auto dir = cli::scratch_dir();
  std::string inputs;
  for (const char* method : {"popov", "korpelevich"}) {
    for (const char* mirror : {"entropic", "euclidean"}) {
      const std::string out = std::string("plot_") + method + "_" + mirror;
      REQUIRE(cli::run(std::string("solve --seed 42 --iters 200 --gap-samples 5000 --method ") +
                       method + " --mirror " + mirror + " -o " + out)
                  .code == 0);
      inputs += out + "/trace.csv ";
    }
  }
  REQUIRE(cli::run("plot " + inputs + "-o fig.svg").code == 0);
  const std::string svg = cli::slurp(dir / "fig.svg");
  for (const char* label : {"popov/entropic", "popov/euclidean", "korpelevich/entropic",
                            "korpelevich/euclidean"}) {
    CHECK(svg.find(label) != std::string::npos);
  }
  CHECK(fs::exists(dir / "fig.csv"));

  { std::ofstream(dir / "bad.csv") << "iter,gap_estimate,gap_method,bound,map_evals,wall_ms\n1,x,sampling,1,2,0\n"; }
  const auto r = cli::run("plot bad.csv -o bad.svg");
  CHECK(r.code == 2);
  CHECK(r.output.find("bad.csv:2") != std::string::npos);
}

TEST_CASE("forcing the scalar kernels leaves traces unchanged") {
  const auto dir = cli::scratch_dir();
  const std::string args = "solve --seed 5 --iters 300 --gap-samples 30000 ";
  REQUIRE(cli::run(args + "-o isa_default").code == 0);
  REQUIRE(cli::run(args + "-o isa_scalar", "MIRRORPROX_ISA=scalar").code == 0);
  CHECK(cli::slurp(dir / "isa_default" / "trace.csv") == cli::slurp(dir / "isa_scalar" / "trace.csv"));
}
