#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <molli/expr.hpp>
#include <molli/io.hpp>
#include <molli/version.hpp>

using namespace molli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  fs::path p = fs::temp_directory_path() / "molli_test_io";
  fs::create_directories(p);
  return p;
}

#ifdef MOLLI_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(MOLLI_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string run_cli_capture(const std::string& args) {
  const fs::path out = scratch() / "cli_stdout.txt";
  const std::string cmd =
      std::string(MOLLI_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
  (void)!std::system(cmd.c_str());
  std::ifstream is(out);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}
#endif

}  // namespace

TEST_CASE("binary field round trip") {
  Grid g = make_grid(1, 8.0, 256);
  SampledField f = sample(g, std::function<double(double)>([](double x) { return std::sin(3 * x); }));
  f.kind = FieldKind::function;
  const fs::path p = scratch() / "field.bin";
  save_field(p.string(), f);
  SampledField r = load_field(p.string());
  CHECK(r.grid == f.grid);
  CHECK(r.kind == f.kind);
  CHECK(r.values == f.values);  // bit-exact

  SampledField s = spike_field(g);
  save_field(p.string(), s);
  CHECK(load_field(p.string()).kind == FieldKind::spike);
}

TEST_CASE("csv field round trip") {
  Grid g = make_grid(1, 8.0, 128);
  SampledField f = sample(g, std::function<double(double)>([](double x) { return x * x; }));
  std::stringstream ss;
  write_field_csv(ss, f);
  SampledField r = read_field_csv(ss, g);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    CHECK(r.values[i] == Catch::Approx(f.values[i]).epsilon(1e-12));

  Grid g2 = make_grid(2, 4.0, 64);
  SampledField f2 = sample(g2, std::function<double(double, double)>(
                                   [](double x, double y) { return x + 2 * y; }));
  std::stringstream s2;
  write_field_csv(s2, f2);
  SampledField r2 = read_field_csv(s2, g2);
  CHECK(r2.values == f2.values);
}

TEST_CASE("expression evaluator") {
  auto f = compile_expression("log(1+abs(x))");
  CHECK(f(0.0) == Catch::Approx(0.0));
  CHECK(f(2.0) == Catch::Approx(std::log(3.0)));
  CHECK(compile_expression("2^3 + 1")(0.0) == Catch::Approx(9.0));
  CHECK(compile_expression("pow(x, 2) - x*x")(3.7) == Catch::Approx(0.0).margin(1e-12));
  CHECK(compile_expression("sqrt(exp(2*x))")(1.0) == Catch::Approx(std::exp(1.0)));
  CHECK(compile_expression("-x + 5")(2.0) == Catch::Approx(3.0));
  CHECK_THROWS_AS(compile_expression("x +"), ExprError);
  CHECK_THROWS_AS(compile_expression("sin(x)"), ExprError);
  CHECK_THROWS_AS(compile_expression("(x"), ExprError);
}

TEST_CASE("json report shapes") {
  CheckResult r;
  r.passed = true;
  r.witness_m = 3;
  r.constant_C = 2.5;
  r.curve = {{0.0, 1.0}, {1.0, 0.5}};
  auto j = to_json(r);
  CHECK(j["passed"] == true);
  CHECK(j["m"] == 3);
  CHECK(j["tail"].size() == 2);

  Verdict v;
  v.space_class = SpaceClass::multiplier;
  v.decision = Decision::in;
  v.alpha_witness = {{0, 2}};
  auto vj = to_json(v);
  CHECK(vj["class"] == "multiplier");
  CHECK(vj["decision"] == "in");
  CHECK(vj["witnesses"]["per_alpha"][0]["n"] == 2);

  NormDescriptor nd = norm_descriptor_from_json({{"engine", "Morrey"}, {"p", 3.0}, {"q", 2.0}});
  CHECK(nd.engine == NormDescriptor::Engine::Morrey);
  CHECK(nd.p == 3.0);
  CHECK_THROWS_AS(norm_descriptor_from_json({{"engine", "Frobenius"}}), std::invalid_argument);
}

#ifdef MOLLI_CLI_PATH

TEST_CASE("cli: windows build writes certified artifacts deterministically") {
  const fs::path out = scratch() / "wb";
  fs::remove_all(out);
  const std::string grid = "--d 1 --X 8 --N 1024 ";
  CHECK(run_cli("windows build " + grid + "--L 1 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "varphi.bin"));
  CHECK(fs::exists(out / "psi.bin"));
  CHECK(fs::exists(out / "cert.json"));

  // byte-identical rebuild
  auto bytes = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  const std::string first = bytes(out / "varphi.bin");
  CHECK(run_cli("windows build " + grid + "--L 1 --out " + out.string()) == 0);
  CHECK(bytes(out / "varphi.bin") == first);

  CHECK(run_cli("windows verify " + grid + "--L 1 --in " + out.string()) == 0);
  CHECK(run_cli("windows build " + grid + "--L 5 --out " + out.string()) == 2);
}

TEST_CASE("cli: weights check") {
  std::string s = run_cli_capture("weights check --system pol --cond N --n 1 --d 1 --X 16 --N 4096");
  auto j = nlohmann::json::parse(s);
  CHECK(j["passed"] == true);
  CHECK(j["m"] == 3);  // n + 2 at d = 1

  s = run_cli_capture("weights check --system one --cond wN --n 1");
  CHECK(nlohmann::json::parse(s)["passed"] == false);

  s = run_cli_capture("weights check --system exp --cond wM --n 1");
  j = nlohmann::json::parse(s);
  CHECK(j["passed"] == true);
  CHECK(std::abs(j["C"].get<double>() - std::exp(1.0)) < 1e-6);

  CHECK(run_cli("weights check --system nope --cond wM") == 2);
}

TEST_CASE("cli: classify, reconstruct, delta-check") {
  const fs::path out = scratch() / "cls";
  fs::remove_all(out);
  const std::string grid = "--d 1 --X 16 --N 4096 ";
  CHECK(run_cli("classify " + grid +
                "--f gaussian --class membership --system exp --p 2 --L 1 --out " + out.string()) ==
        0);
  {
    std::ifstream is(out / "verdict.json");
    auto j = nlohmann::json::parse(is);
    CHECK(j["decision"] == "in");
    CHECK(j["config"]["version"] == std::string(kVersion));
  }
  CHECK(fs::exists(out / "table.csv"));

  CHECK(run_cli("classify " + grid + "--f spike --class convolutor --system one --p 2 --out " +
                out.string()) == 0);
  {
    std::ifstream is(out / "verdict.json");
    auto j = nlohmann::json::parse(is);
    CHECK(j["decision"] == "in");
    const double r = j["witnesses"]["r"].get<double>();
    CHECK(r > 0.3);
    CHECK(r < 0.7);
  }

  CHECK(run_cli("reconstruct " + grid + "--f gaussian --J 8 --L 1 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "error_curve.csv"));

  CHECK(run_cli("delta-check " + grid + "--f gaussian --window varphi --L 0 --J 6 --out " +
                out.string()) == 0);
  CHECK(fs::exists(out / "delta_curve.csv"));
}

TEST_CASE("cli: config file seeds defaults, flags override") {
  const fs::path dir = scratch();
  const fs::path cfg = dir / "run.json";
  {
    std::ofstream os(cfg);
    os << R"({"schema":1,"grid":{"dim":1,"X":8,"N":1024},"weights":{"system":"exp"}})";
  }
  std::string s = run_cli_capture("weights check --config " + cfg.string() + " --cond wM --n 1");
  auto j = nlohmann::json::parse(s);
  CHECK(j["passed"] == true);
  CHECK(j["config"]["grid"]["N"] == 1024);

  s = run_cli_capture("weights check --config " + cfg.string() + " --cond wM --n 1 --system one");
  j = nlohmann::json::parse(s);
  CHECK(j["config"]["weights"]["system"] == "one");
}

#endif  // MOLLI_CLI_PATH
