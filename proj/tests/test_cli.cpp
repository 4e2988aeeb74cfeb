#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "dsps/evaluate.hpp"
#include "dsps/io.hpp"
#include "dsps/population.hpp"

namespace fs = std::filesystem;
using namespace dsps;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("dsps_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "dsps");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

const char* kSpec = R"({
  "n_p": 400, "seed": 5,
  "features": [
    {"name": "glucose", "dist": "mixture", "components": [
      {"weight": 0.6, "dist": "normal", "mu": 140, "sigma": 25},
      {"weight": 0.4, "dist": "lognormal", "mu": 5.2, "sigma": 0.2}]},
    {"name": "age", "dist": "normal", "mu": 55, "sigma": 10}
  ]
})";

// Sets up population.csv plus targets.json planted on the first 120 members.
void prepare(const TempDir& d) {
  spit(d / "spec.json", kSpec);
  REQUIRE(run({"generate", "--spec", d / "spec.json", "--out", d / "pop.csv"}) == 0);
  const Population pop = load_population_file(d / "pop.csv");
  std::ostringstream mask;
  mask << "member_id,selected\n";
  for (Eigen::Index i = 0; i < pop.size(); ++i) mask << pop.member_ids()[std::size_t(i)] << "," << (i < 120) << "\n";
  spit(d / "plant.csv", mask.str());
  REQUIRE(run({"targets", "--population", d / "pop.csv", "--mask", d / "plant.csv", "--out", d / "targets.json"}) ==
          0);
}

}  // namespace

TEST_CASE("cli generate is byte-identical across runs") {
  TempDir d("gen");
  spit(d / "spec.json", kSpec);
  REQUIRE(run({"generate", "--spec", d / "spec.json", "--out", d / "a.csv"}) == 0);
  REQUIRE(run({"generate", "--spec", d / "spec.json", "--out", d / "b.csv"}) == 0);
  CHECK(slurp(d / "a.csv") == slurp(d / "b.csv"));
  CHECK(load_population_file(d / "a.csv").size() == 400);

  spit(d / "bad.json", "{\"n_p\": 10, ");
  CHECK(run({"generate", "--spec", d / "bad.json", "--out", d / "c.csv"}) == cli::kInputError);
  spit(d / "bad2.json", R"({"n_p": 10, "features": [{"name": "x", "dist": "gamma"}]})");
  CHECK(run({"generate", "--spec", d / "bad2.json", "--out", d / "c.csv"}) == cli::kInputError);
}

TEST_CASE("cli targets derives moments") {
  TempDir d("tg");
  prepare(d);
  const TargetSet t = io::read_targets_file(d / "targets.json");
  CHECK(t.size() == 4);
  CHECK(t.value("age", 2) > 0.0);
  std::string out;
  REQUIRE(run({"targets", "--population", d / "pop.csv", "--orders", "1,2,3", "--features", "age"}, &out) == 0);
  CHECK(io::targets_from_json(nlohmann::json::parse(out)).size() == 3);
}

TEST_CASE("cli select writes its outputs and is deterministic") {
  TempDir d("sel");
  prepare(d);
  std::string err;
  const std::vector<std::string> base{"select", "--population", d / "pop.csv", "--targets", d / "targets.json",
                                      "--trial-size", "120", "--seed", "42", "--draws", "5"};
  auto with_out = [&](const std::string& o) {
    auto a = base;
    a.insert(a.end(), {"--out", o});
    return a;
  };
  REQUIRE(run(with_out(d / "r1"), nullptr, &err) == 0);
  REQUIRE(run(with_out(d / "r2")) == 0);
  for (const char* f : {"probabilities.csv", "mask.csv", "report.json", "run.json"}) {
    CHECK(fs::exists(d / (std::string("r1/") + f)));
    CHECK(slurp(d / (std::string("r1/") + f)) == slurp(d / (std::string("r2/") + f)));
  }
  const auto report = nlohmann::json::parse(slurp(d / "r1/report.json"));
  CHECK(report.at("seeds").at("seed") == 42);
  CHECK(report.at("mode") == "max");
  CHECK(report.at("expected_size").get<double>() >= 120 - 1e-6);
  const auto runinfo = nlohmann::json::parse(slurp(d / "r1/run.json"));
  CHECK(runinfo.at("alpha").get<double>() == doctest::Approx(6.0));

  SUBCASE("evaluate reproduces the library report bit-exactly") {
    const Population pop = load_population_file(d / "pop.csv");
    const TargetSet t = io::read_targets_file(d / "targets.json");
    std::ifstream mask_in(d / "r1/mask.csv");
    const SelectionMask m = io::read_mask_csv(mask_in, pop);
    std::string out;
    REQUIRE(run({"evaluate", "--population", d / "pop.csv", "--targets", d / "targets.json", "--mask",
                 d / "r1/mask.csv"},
                &out) == 0);
    const auto lhs = nlohmann::json::parse(out);
    const auto rhs = io::to_json(evaluate_selection(pop, t, m));
    CHECK(lhs.at("rsse") == rhs.at("rsse"));
    CHECK(lhs.at("criteria") == rhs.at("criteria"));
    CHECK(lhs.at("pe_mean") == rhs.at("pe_mean"));
  }
  SUBCASE("seed falls back to the environment") {
    auto a = base;
    a.erase(a.begin() + 7, a.begin() + 9);
    a.insert(a.end(), {"--out", d / "r3"});
    ::setenv("DSPS_SEED", "42", 1);
    REQUIRE(run(a) == 0);
    ::unsetenv("DSPS_SEED");
    CHECK(slurp(d / "r3/mask.csv") == slurp(d / "r1/mask.csv"));
  }
  SUBCASE("fixed and min modes") {
    auto a = base;
    a.insert(a.end(), {"--mode", "fixed", "--n-target", "100", "--out", d / "fx"});
    REQUIRE(run(a) == 0);
    const double es = nlohmann::json::parse(slurp(d / "fx/report.json")).at("expected_size").get<double>();
    CHECK(std::abs(es - 100) <= 5.0 + 1e-6);
    auto b = base;
    b.insert(b.end(), {"--mode", "fixed", "--out", d / "fx2"});
    CHECK(run(b) == cli::kInputError);
  }
}

TEST_CASE("cli error exit codes") {
  TempDir d("err");
  prepare(d);
  spit(d / "unknown.json", R"([{"feature": "weight", "order": 1, "value": 70}])");
  std::string err;
  CHECK(run({"select", "--population", d / "pop.csv", "--targets", d / "unknown.json", "--out", d / "o"}, nullptr,
            &err) == cli::kInputError);
  CHECK(err.find("UnknownFeature") != std::string::npos);

  spit(d / "far.json", R"([{"feature": "age", "order": 1, "value": 1000}])");
  CHECK(run({"select", "--population", d / "pop.csv", "--targets", d / "far.json", "--mode", "max-strict", "--out",
             d / "o"}) == cli::kInfeasible);

  CHECK(run({"select", "--population", d / "missing.csv", "--targets", d / "far.json", "--out", d / "o"}) ==
        cli::kInputError);
  CHECK(run({"select", "--population", d / "pop.csv", "--targets", d / "targets.json", "--mode", "best", "--out",
             d / "o"}) == cli::kInputError);
  CHECK(run({"frobnicate"}) == cli::kInputError);
  spit(d / "short.csv", "member_id,selected\nm1,1\n");
  CHECK(run({"evaluate", "--population", d / "pop.csv", "--targets", d / "targets.json", "--mask",
             d / "short.csv"}) == cli::kInputError);
}

TEST_CASE("mask csv round trip") {
  const Population pop(std::vector<std::string>{"a", "b", "c"}, std::vector<std::string>{"x"},
                       Eigen::MatrixXd::Constant(3, 1, 1.0));
  SelectionMask m = SelectionMask::all(3, false);
  m.bits[1] = 1;
  std::stringstream s;
  io::write_mask_csv(s, pop, m);
  CHECK(io::read_mask_csv(s, pop).bits == m.bits);
  std::stringstream dup("member_id,selected\na,1\na,0\nb,1\n");
  CHECK_THROWS_AS(io::read_mask_csv(dup, pop), Error);
}
