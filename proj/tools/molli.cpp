// Batch front-end: builds windows, runs weight checks, classifies corpus
// functions, reconstructs, and emits JSON/CSV/binary reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <molli/molli.hpp>
#include <molli/version.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace molli;

namespace {

constexpr int kExitFailure = 2;       // certificate / validation failure
constexpr int kExitInconclusive = 3;  // verdict neither in nor out

struct RunConfig {
  int dim = 1;
  double X = 16.0;
  int N = 4096;
  int L = 1;
  std::optional<double> hr;
  std::string system = "exp";
  std::string omega;    // custom generator expression, overrides `system`
  std::string v_system; // second system for moderateness
  std::string v_omega;
  json norm = {{"engine", "Lp"}, {"p", 2.0}};
  TableCaps caps;
  Thresholds thresholds;
  std::string out = ".";

  Grid grid() const { return make_grid(dim, X, N); }
  WeightSystem weights() const {
    return omega.empty() ? builtin_system(system) : WeightSystem::custom(omega);
  }
  WeightSystem v_weights() const {
    if (!v_omega.empty()) return WeightSystem::custom(v_omega);
    if (!v_system.empty()) return builtin_system(v_system);
    return weights();
  }
  NormDescriptor descriptor() const { return norm_descriptor_from_json(norm); }

  json resolved() const {
    json j;
    j["schema"] = 1;
    j["grid"] = {{"dim", dim}, {"X", X}, {"N", N}};
    j["window"] = {{"d", dim}, {"L", L}};
    if (hr) j["window"]["hr"] = *hr;
    if (!omega.empty()) j["weights"] = {{"omega", omega}};
    else j["weights"] = {{"system", system}};
    j["norm"] = norm;
    j["caps"] = {{"J", caps.J}, {"n_max", caps.n_max}, {"a_max", caps.a_max}};
    j["thresholds"] = {{"slope_eps", thresholds.slope_eps},
                       {"fit_resid", thresholds.fit_resid}};
    j["version"] = kVersion;
    return j;
  }
};

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  json j = json::parse(is);
  if (j.value("schema", 1) != 1) throw std::runtime_error("unsupported config schema");
  if (j.contains("grid")) {
    cfg.dim = j["grid"].value("dim", cfg.dim);
    cfg.X = j["grid"].value("X", cfg.X);
    cfg.N = j["grid"].value("N", cfg.N);
  }
  if (j.contains("window")) {
    cfg.L = j["window"].value("L", cfg.L);
    if (j["window"].contains("hr")) cfg.hr = j["window"]["hr"].get<double>();
  }
  if (j.contains("weights")) {
    cfg.system = j["weights"].value("system", cfg.system);
    cfg.omega = j["weights"].value("omega", cfg.omega);
  }
  if (j.contains("norm")) cfg.norm = j["norm"];
  if (j.contains("caps")) {
    cfg.caps.J = j["caps"].value("J", cfg.caps.J);
    cfg.caps.n_max = j["caps"].value("n_max", cfg.caps.n_max);
    cfg.caps.a_max = j["caps"].value("a_max", cfg.caps.a_max);
  }
  if (j.contains("thresholds")) {
    cfg.thresholds.slope_eps = j["thresholds"].value("slope_eps", cfg.thresholds.slope_eps);
    cfg.thresholds.fit_resid = j["thresholds"].value("fit_resid", cfg.thresholds.fit_resid);
  }
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
}

SampledField corpus_field(const std::string& name, const Grid& g) {
  auto radial = [&](auto&& fn) {
    if (g.dim == 1)
      return sample(g, std::function<double(double)>([&](double x) { return fn(std::abs(x)); }));
    return sample(g, std::function<double(double, double)>(
                         [&](double x, double y) { return fn(std::hypot(x, y)); }));
  };
  if (name == "gaussian") return radial([](double r) { return std::exp(-r * r); });
  if (name == "cosh2") {
    if (g.dim != 1) throw std::invalid_argument("cosh2 corpus entry is 1-d");
    return sample(g, std::function<double(double)>([](double x) { return std::cosh(2.0 * x); }));
  }
  if (name == "rational") return radial([](double r) { return 1.0 / (1.0 + r * r); });
  if (name == "constant") return radial([](double) { return 1.0; });
  if (name == "spike") return spike_field(g);
  if (name == "boxcar") {
    SampledField box = radial([](double r) { return r <= 1.0 ? 1.0 : 0.0; });
    return convolve(box, standard_bump_field(g));
  }
  throw std::invalid_argument("unknown corpus function '" + name + "'");
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

int cmd_windows_build(const RunConfig& cfg, bool verify_only, const std::string& in_dir) {
  const Grid g = cfg.grid();
  WindowPair pair = build_window_pair(cfg.dim, cfg.L, g, cfg.hr);
  json cert = to_json(pair.cert);
  cert["L"] = pair.moment_order;
  cert["support_radius"] = pair.support_radius;
  cert["radial_step"] = pair.radial_step;
  cert["config"] = cfg.resolved();

  if (verify_only) {
    // determinism check against a previously written pair
    SampledField v = load_field(in_dir + "/varphi.bin");
    SampledField p = load_field(in_dir + "/psi.bin");
    double dv = 0.0, dp = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i)
      dv = std::max(dv, std::abs(v.values[i] - pair.varphi.values[i]));
    for (std::size_t i = 0; i < p.values.size(); ++i)
      dp = std::max(dp, std::abs(p.values[i] - pair.psi.values[i]));
    cert["rebuild_sup_diff_varphi"] = dv;
    cert["rebuild_sup_diff_psi"] = dp;
    std::cout << cert.dump(2) << '\n';
    if (dv > 1e-12 || dp > 1e-12) {
      std::cerr << "windows verify: stored pair deviates from a deterministic rebuild\n";
      return kExitFailure;
    }
    return 0;
  }
  fs::create_directories(cfg.out);
  save_field(cfg.out + "/varphi.bin", pair.varphi);
  save_field(cfg.out + "/psi.bin", pair.psi);
  write_json(fs::path(cfg.out) / "cert.json", cert);
  std::cout << cert.dump(2) << '\n';
  return 0;
}

int cmd_weights_check(const RunConfig& cfg, const std::string& cond, int n, int m_cap) {
  const Grid g = cfg.grid();
  WeightSystem W = cfg.weights();
  CheckResult r;
  if (cond == "wM") r = check_wM(W, n, m_cap, g);
  else if (cond == "wN") r = check_wN(W, n, m_cap, g);
  else if (cond == "N") r = check_N(W, n, m_cap, g);
  else if (cond == "moderate") r = check_moderate(W, cfg.v_weights(), n, m_cap, g);
  else if (cond == "squarable") r = check_squarable(W, n, m_cap, g);
  else throw std::invalid_argument("unknown condition '" + cond + "'");
  json j = to_json(r);
  j["cond"] = cond;
  j["n"] = n;
  j["m_cap"] = m_cap;
  j["config"] = cfg.resolved();
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_classify(const RunConfig& cfg, const std::string& fname, const std::string& fpath,
                 const std::string& cls) {
  const Grid g = cfg.grid();
  SampledField f = fpath.empty() ? corpus_field(fname, g) : load_field(fpath);
  if (!(f.grid == g)) throw std::invalid_argument("loaded field grid differs from configured grid");
  WeightSystem W = cfg.weights();
  NormDescriptor nd = cfg.descriptor();
  WindowPair pair = build_window_pair(cfg.dim, cfg.L, g, cfg.hr);

  Verdict v;
  DyadicNormTable table;
  if (cls == "membership") {
    v = verdict_membership(f, pair, W, nd, cfg.caps, cfg.thresholds);
    table = norm_table(f, window_set(pair), W, nd, cfg.caps, +1);
  } else if (cls == "convolutor") {
    v = verdict_convolutor(f, pair, W, nd, cfg.caps, cfg.thresholds);
    TableCaps c0 = cfg.caps;
    c0.a_max = 0;
    table = norm_table(f, window_set(pair), W, nd, c0, +1);
  } else if (cls == "multiplier") {
    v = verdict_multiplier(f, pair, W, nd, cfg.caps, cfg.thresholds);
    table = norm_table(f, window_set(pair), W, nd, cfg.caps, -1);
  } else if (cls == "bounded-set") {
    v = bounded_set_test(f, pair.varphi, W, nd, cfg.caps, cfg.thresholds);
    table = norm_table(f, window_set_single(pair.varphi, "varphi"), W, nd, cfg.caps, +1);
  } else {
    throw std::invalid_argument("unknown class '" + cls + "'");
  }

  fs::create_directories(cfg.out);
  json out = to_json(v);
  out["f"] = fpath.empty() ? fname : fpath;
  out["config"] = cfg.resolved();
  write_json(fs::path(cfg.out) / "verdict.json", out);
  {
    std::ofstream os(fs::path(cfg.out) / "table.csv");
    write_table_csv(os, table);
  }
  std::cout << out.dump(2) << '\n';
  return v.decision == Decision::inconclusive ? kExitInconclusive : 0;
}

int cmd_reconstruct(const RunConfig& cfg, const std::string& fname, int J) {
  const Grid g = cfg.grid();
  SampledField f = corpus_field(fname, g);
  WindowPair pair = build_window_pair(cfg.dim, cfg.L, g, cfg.hr);
  ReconstructionReport rep = reconstruct(f, pair, J);
  fs::create_directories(cfg.out);
  {
    std::ofstream os(fs::path(cfg.out) / "error_curve.csv");
    write_error_curve_csv(os, rep.errors, "sup_error");
  }
  json j;
  j["errors"] = rep.errors;
  j["scale_cap"] = rep.scale_cap;
  j["capped"] = rep.capped;
  j["config"] = cfg.resolved();
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_delta_check(const RunConfig& cfg, const std::string& fname, const std::string& window,
                    int J) {
  const Grid g = cfg.grid();
  SampledField f = corpus_field(fname, g);
  SampledField w;
  if (window == "bump") {
    w = standard_bump_field(g);
  } else {
    WindowPair pair = build_window_pair(cfg.dim, cfg.L, g, cfg.hr);
    if (window == "varphi") w = pair.varphi;
    else if (window == "psi") w = pair.psi;
    else throw std::invalid_argument("unknown window '" + window + "'");
  }
  DeltaApproxReport rep = delta_approx_check(f, w, J);
  fs::create_directories(cfg.out);
  {
    std::ofstream os(fs::path(cfg.out) / "delta_curve.csv");
    write_error_curve_csv(os, rep.errors, "sup_error");
  }
  json j;
  j["errors"] = rep.errors;
  j["monotone_trend"] = rep.monotone_trend;
  j["window_mass"] = rep.window_mass;
  j["config"] = cfg.resolved();
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mollifier windows, weighted TIBF norms, and growth-rate classification"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  // the config file seeds defaults; explicit flags override it, so load it
  // before CLI11 writes parsed values into cfg
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  if (!config_path.empty()) {
    try {
      load_config_file(cfg, config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitFailure;
    }
  }
  app.add_option("--config", config_path, "JSON run configuration (schema 1)");

  auto add_grid = [&](CLI::App* c) {
    c->add_option("--d", cfg.dim, "dimension (1 or 2)");
    c->add_option("--X", cfg.X, "box half-width");
    c->add_option("--N", cfg.N, "points per axis (power of two)");
  };
  auto add_caps = [&](CLI::App* c) {
    c->add_option("--J", cfg.caps.J, "dyadic scales");
    c->add_option("--n-max", cfg.caps.n_max, "weight index cap");
    c->add_option("--a-max", cfg.caps.a_max, "derivative order cap");
    c->add_option("--slope-eps", cfg.thresholds.slope_eps, "slope threshold (log2/scale)");
    c->add_option("--fit-resid", cfg.thresholds.fit_resid, "fit residual threshold");
  };
  auto add_weights = [&](CLI::App* c) {
    c->add_option("--system", cfg.system, "builtin weight system: one|log|pol|exp");
    c->add_option("--omega", cfg.omega, "custom generator expression, e.g. log(1+abs(x))");
  };
  auto add_norm = [&](CLI::App* c) {
    c->add_option("--p", [&cfg](CLI::results_t res) {
      cfg.norm = {{"engine", "Lp"}, {"p", res[0] == "inf" ? json("inf") : json(std::stod(res[0]))}};
      return true;
    }, "L^p exponent (or 'inf')");
    c->add_option("--engine", [&cfg](CLI::results_t res) {
      cfg.norm = json::parse(res[0]);
      return true;
    }, "norm descriptor JSON, e.g. {\"engine\":\"Morrey\",\"p\":3,\"q\":2}");
  };

  // windows build | verify
  auto* windows = app.add_subcommand("windows", "build or verify the two-scale window pair");
  auto* wbuild = windows->add_subcommand("build", "construct and certify (varphi_L, psi_L)");
  add_grid(wbuild);
  wbuild->add_option("--L", cfg.L, "moment order parameter (0..3)");
  double hr_opt = 0.0;
  wbuild->add_option("--hr", hr_opt, "radial step override");
  wbuild->add_option("--out", cfg.out, "output directory");
  auto* wverify = windows->add_subcommand("verify", "rebuild and compare a stored pair");
  add_grid(wverify);
  wverify->add_option("--L", cfg.L, "moment order parameter (0..3)");
  std::string in_dir = ".";
  wverify->add_option("--in", in_dir, "directory holding varphi.bin/psi.bin");

  // weights check
  auto* wcheck = app.add_subcommand("weights", "weight-system axiom checks");
  auto* check = wcheck->add_subcommand("check", "run one of wM|wN|N|moderate|squarable");
  add_grid(check);
  add_weights(check);
  std::string cond = "wM";
  int check_n = 1, check_mcap = -1;
  check->add_option("--cond", cond, "condition: wM|wN|N|moderate|squarable");
  check->add_option("--n", check_n, "weight index n");
  check->add_option("--m-cap", check_mcap, "search cap (default n + 8)");
  check->add_option("--v-system", cfg.v_system, "second system for moderateness");
  check->add_option("--v-omega", cfg.v_omega, "second custom generator");

  // classify
  auto* classify = app.add_subcommand("classify", "membership / convolutor / multiplier verdicts");
  add_grid(classify);
  add_caps(classify);
  add_weights(classify);
  add_norm(classify);
  std::string fname = "gaussian", fpath, cls = "membership";
  classify->add_option("--f", fname, "corpus function: gaussian|cosh2|rational|spike|constant|boxcar");
  classify->add_option("--f-file", fpath, "binary field file instead of a corpus name");
  classify->add_option("--class", cls, "membership|convolutor|multiplier|bounded-set");
  classify->add_option("--L", cfg.L, "window moment order");
  classify->add_option("--out", cfg.out, "output directory");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "telescoping reconstruction error curve");
  add_grid(rec);
  int rec_J = 8;
  rec->add_option("--f", fname, "corpus function");
  rec->add_option("--J", rec_J, "number of dyadic terms");
  rec->add_option("--L", cfg.L, "window moment order");
  rec->add_option("--out", cfg.out, "output directory");

  // delta-check
  auto* dc = app.add_subcommand("delta-check", "Dirac-sequence approximation error curve");
  add_grid(dc);
  int dc_J = 8;
  std::string dc_window = "varphi";
  dc->add_option("--f", fname, "corpus function");
  dc->add_option("--window", dc_window, "varphi|psi|bump");
  dc->add_option("--J", dc_J, "number of dyadic scales");
  dc->add_option("--L", cfg.L, "window moment order");
  dc->add_option("--out", cfg.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (hr_opt > 0.0) cfg.hr = hr_opt;
    if (check_mcap < 0) check_mcap = check_n + 8;

    if (wbuild->parsed()) return cmd_windows_build(cfg, false, "");
    if (wverify->parsed()) return cmd_windows_build(cfg, true, in_dir);
    if (check->parsed()) return cmd_weights_check(cfg, cond, check_n, check_mcap);
    if (classify->parsed()) return cmd_classify(cfg, fname, fpath, cls);
    if (rec->parsed()) return cmd_reconstruct(cfg, fname, rec_J);
    if (dc->parsed()) return cmd_delta_check(cfg, fname, dc_window, dc_J);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
