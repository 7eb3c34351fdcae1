#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "classify.hpp"
#include "grid.hpp"
#include "mollify.hpp"
#include "norms.hpp"
#include "weights.hpp"
#include "windows.hpp"

namespace molli {

// ---- Flat binary field format ------------------------------------------------
// header { dim: u8, N: u32, X: f64, kind: u8 } followed by N^dim little-endian f64

namespace io_detail {

static_assert(std::endian::native == std::endian::little,
              "field serialization assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("field read: truncated stream");
  return v;
}

}  // namespace io_detail

inline void write_field(std::ostream& os, const SampledField& f) {
  io_detail::put<std::uint8_t>(os, std::uint8_t(f.grid.dim));
  io_detail::put<std::uint32_t>(os, std::uint32_t(f.grid.n));
  io_detail::put<double>(os, f.grid.half_width);
  io_detail::put<std::uint8_t>(os, std::uint8_t(f.kind));
  os.write(reinterpret_cast<const char*>(f.values.data()),
           std::streamsize(f.values.size() * sizeof(double)));
}

inline SampledField read_field(std::istream& is) {
  const int dim = io_detail::get<std::uint8_t>(is);
  const int n = int(io_detail::get<std::uint32_t>(is));
  const double X = io_detail::get<double>(is);
  const auto kind = FieldKind(io_detail::get<std::uint8_t>(is));
  SampledField f = zero_field(make_grid(dim, X, n));
  f.kind = kind;
  is.read(reinterpret_cast<char*>(f.values.data()),
          std::streamsize(f.values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("field read: truncated samples");
  require_finite(f, "read_field");
  return f;
}

inline void save_field(const std::string& path, const SampledField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_field: cannot open " + path);
  write_field(os, f);
}

inline SampledField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_field: cannot open " + path);
  return read_field(is);
}

// ---- CSV ------------------------------------------------------------------------

inline void write_field_csv(std::ostream& os, const SampledField& f) {
  if (f.grid.dim == 1) {
    os << "i,value\n";
    for (int i = 0; i < f.grid.n; ++i) os << i << ',' << f.values[std::size_t(i)] << '\n';
  } else {
    os << "i,j,value\n";
    for (int i = 0; i < f.grid.n; ++i)
      for (int j = 0; j < f.grid.n; ++j)
        os << i << ',' << j << ',' << f.values[std::size_t(i) * f.grid.n + j] << '\n';
  }
}

inline SampledField read_field_csv(std::istream& is, const Grid& g,
                                   FieldKind kind = FieldKind::function) {
  SampledField f = zero_field(g);
  f.kind = kind;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<double> cols;
    while (std::getline(ls, tok, ',')) cols.push_back(std::stod(tok));
    if (g.dim == 1) {
      if (cols.size() != 2) throw std::runtime_error("field csv: expected i,value");
      f.values.at(std::size_t(cols[0])) = cols[1];
    } else {
      if (cols.size() != 3) throw std::runtime_error("field csv: expected i,j,value");
      f.values.at(std::size_t(cols[0]) * g.n + std::size_t(cols[1])) = cols[2];
    }
  }
  require_finite(f, "read_field_csv");
  return f;
}

inline void write_run_csv(std::ostream& os, const MollifierRun& run) {
  os << "j,sup_norm,l2_norm,scale_resolved\n";
  for (const auto& s : run.summary)
    os << s.j << ',' << s.sup_norm << ',' << s.l2_norm << ',' << (s.resolved ? 1 : 0) << '\n';
}

inline void write_table_csv(std::ostream& os, const DyadicNormTable& t) {
  os << "l,j,n,alpha,log2_norm,flag\n";
  for (int l = 0; l < int(t.window_ids.size()); ++l)
    for (int j = 0; j < t.J; ++j)
      for (int n = 0; n <= t.n_max; ++n)
        for (int a = 0; a < int(t.alphas.size()); ++a) {
          const TableEntry& e = t.at(l, j, n, a);
          std::string flag = "ok";
          if (e.unresolved) flag = "unresolved";
          else if (e.zero) flag = "zero";
          else if (e.overflow) flag = "overflow";
          else if (e.env_growing || e.mass_heavy) flag = "truncation";
          os << l << ',' << j << ',' << n << ',' << order(t.alphas[std::size_t(a)]) << ','
             << (e.zero ? std::string("-inf") : std::to_string(e.log2_norm)) << ',' << flag
             << '\n';
        }
}

inline void write_error_curve_csv(std::ostream& os, const std::vector<double>& errors,
                                  const char* name = "error") {
  os << "J," << name << "\n";
  for (std::size_t k = 0; k < errors.size(); ++k) os << k << ',' << errors[k] << '\n';
}

// ---- JSON reports ------------------------------------------------------------------

inline nlohmann::json to_json(const CheckResult& r) {
  nlohmann::json j;
  j["passed"] = r.passed;
  if (r.witness_m) j["m"] = *r.witness_m;
  if (r.constant_C) j["C"] = *r.constant_C;
  nlohmann::json tail = nlohmann::json::array();
  for (const auto& [x, v] : r.curve) tail.push_back({x, v});
  j["tail"] = tail;
  j["box_halfwidth"] = r.box_halfwidth;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline nlohmann::json to_json(const WindowCertificate& c) {
  return nlohmann::json{{"integral_err", c.integral_err},
                        {"max_moment_err", c.max_moment_err},
                        {"two_scale_residual", c.two_scale_residual},
                        {"fourier_slope", c.fourier_slope},
                        {"fourier_constant", c.fourier_constant}};
}

inline nlohmann::json to_json(const NormDescriptor& nd) {
  using E = NormDescriptor::Engine;
  nlohmann::json j;
  switch (nd.engine) {
    case E::Lp: j["engine"] = "Lp"; j["p"] = nd.p; break;
    case E::L0: j["engine"] = "L0"; break;
    case E::MixedLp: j["engine"] = "MixedLp"; j["p1"] = nd.p; j["p2"] = nd.q; break;
    case E::Wiener: j["engine"] = "Wiener"; break;
    case E::Morrey: j["engine"] = "Morrey"; j["p"] = nd.p; j["q"] = nd.q; break;
  }
  return j;
}

inline NormDescriptor norm_descriptor_from_json(const nlohmann::json& j) {
  const std::string engine = j.at("engine").get<std::string>();
  auto num = [&j](const char* k, double dflt) {
    if (!j.contains(k)) return dflt;
    if (j[k].is_string() && j[k] == "inf") return std::numeric_limits<double>::infinity();
    return j[k].get<double>();
  };
  if (engine == "Lp") return NormDescriptor::lp(num("p", 2.0));
  if (engine == "L0") return NormDescriptor::l0();
  if (engine == "MixedLp") return NormDescriptor::mixed(num("p1", 2.0), num("p2", 2.0));
  if (engine == "Wiener") return NormDescriptor::wiener();
  if (engine == "Morrey") return NormDescriptor::morrey(num("p", 2.0), num("q", 1.0));
  throw std::invalid_argument("norm descriptor: unknown engine '" + engine + "'");
}

inline nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j;
  j["class"] = to_string(v.space_class);
  j["decision"] = to_string(v.decision);
  j["mode"] = to_string(v.mode);
  nlohmann::json wit;
  wit["r"] = v.r;
  wit["alpha_escalation"] = v.alpha_escalation;
  nlohmann::json per_n = nlohmann::json::array();
  for (const auto& [n, r] : v.per_n) per_n.push_back({{"n", n}, {"r", r}});
  wit["per_n"] = per_n;
  nlohmann::json per_alpha = nlohmann::json::array();
  for (const auto& [a, n] : v.alpha_witness) per_alpha.push_back({{"alpha", a}, {"n", n}});
  wit["per_alpha"] = per_alpha;
  j["witnesses"] = wit;
  j["trace"] = v.trace;
  j["caps"] = {{"J", v.caps.J}, {"n_max", v.caps.n_max}, {"a_max", v.caps.a_max}};
  j["thresholds"] = {{"slope_eps", v.thresholds.slope_eps}, {"fit_resid", v.thresholds.fit_resid}};
  return j;
}

}  // namespace molli
