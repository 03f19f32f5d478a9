#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbl/energies.hpp"
#include "dbl/errors.hpp"
#include "dbl/spectral.hpp"

namespace dbl::io {

using json = nlohmann::json;

// %.17g: round-trips every double, and is what makes reruns byte-identical.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + p.string() + " for writing");
  return os;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& p, const std::vector<std::string>& columns) : os_(open_out(p)) {
    row_strings(columns);
  }

  void row(const std::vector<double>& v) {
    std::vector<std::string> s;
    s.reserve(v.size());
    for (double x : v) s.push_back(fmt(x));
    row_strings(s);
  }

  void row_strings(const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os_ << (i ? "," : "") << v[i];
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

inline void write_json(const std::filesystem::path& p, const json& j) {
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

inline json read_json_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + p.string());
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; turn it into line/column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(p.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": malformed JSON: " + e.what());
  }
}

// Half spectrum as CSV: a "# {json}" header line with n and length, then k,re,im.
inline void write_field_csv(const std::filesystem::path& p, const Field& f, double t) {
  auto os = open_out(p);
  const json hdr = {{"n", f.grid().n()}, {"length", f.grid().length()}, {"t", t}};
  os << "# " << hdr.dump() << '\n' << "k,re_ck,im_ck\n";
  const auto c = f.half();
  for (std::size_t k = 0; k < c.size(); ++k) os << k << ',' << fmt(c[k].real()) << ',' << fmt(c[k].imag()) << '\n';
}

inline Field read_field_csv(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) throw ConfigError("cannot read snapshot " + p.string());
  std::string line;
  std::getline(is, line);
  if (line.rfind("# ", 0) != 0) throw ConfigError(p.string() + ": missing '# {...}' header");
  json hdr;
  try {
    hdr = json::parse(line.substr(2));
  } catch (const json::exception& e) {
    throw ConfigError(p.string() + ": bad header: " + e.what());
  }
  const SpectralGrid g(hdr.at("n").get<int>(), hdr.at("length").get<double>());
  std::getline(is, line);
  std::vector<cplx> half(g.half_size());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    const int k = std::stoi(a);
    if (k < 0 || k >= g.half_size()) throw ConfigError(p.string() + ": mode index out of range");
    half[k] = cplx(std::stod(b), std::stod(c));
  }
  Field f(g, std::move(half));
  f.sanitize();
  return f;
}

inline json to_json(const EnergyReport& r) {
  json per = json::array();
  for (const auto& t : r.per_n)
    per.push_back({{"N", t.N}, {"plain", t.plain}, {"corrector", t.corrector}, {"value", t.value}});
  return {{"t", r.t},
          {"s", r.s},
          {"n0", r.n0},
          {"mass", r.mass},
          {"hamiltonian", r.hamiltonian},
          {"hs_norm", r.hs_norm},
          {"modified_energy", r.modified},
          {"plain_sum", r.plain_sum},
          {"corrector_share", r.corrector_share},
          {"guard_skips", r.guard_skips},
          {"per_n", per}};
}

inline json to_json(const CoercivityResult& r) {
  json trail = json::array();
  for (const auto& s : r.trail) trail.push_back({{"n0", s.n0}, {"lhs", s.lhs}, {"rhs", s.rhs}, {"pass", s.pass}});
  return {{"passed", r.passed},       {"n0_initial", r.n0_initial}, {"n0_passing", r.n0_passing},
          {"doublings", r.doublings}, {"vacuous", r.vacuous},       {"trail", trail}};
}

}  // namespace dbl::io
