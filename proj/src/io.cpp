#include "thinfilm/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "thinfilm/errors.hpp"

namespace thinfilm {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error(Errc::IoError, "cannot format double");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(Errc::IoError, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(Errc::IoError, "rename to " + path.string() + " failed: " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line);
    if (nl == std::string_view::npos) break;
    text = text.substr(nl + 1);
  }
}

void append_row(std::string& out, std::initializer_list<double> cells) {
  bool first = true;
  for (double c : cells) {
    if (!first) out += ',';
    out += format_double(c);
    first = false;
  }
  out += '\n';
}

}  // namespace

std::string ledger_csv(const RunLedger& ledger) {
  std::string out(kLedgerHeader);
  out += '\n';
  for (const auto& s : ledger.samples) {
    append_row(out, {s.t, s.mass, s.energy, s.entropy, s.alpha_entropy, s.hx_sq, s.sup, s.moment, s.B1, s.B2,
                     s.Btilde, s.x_left, s.x_right});
  }
  return out;
}

std::vector<FunctionalSample> parse_ledger_csv(std::string_view text) {
  std::vector<FunctionalSample> out;
  bool header = true;
  for_each_line(text, [&](std::string_view line) {
    if (line.empty()) return;
    if (header) {
      if (line != kLedgerHeader) throw Error(Errc::IoError, "unexpected ledger header");
      header = false;
      return;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 13) throw Error(Errc::IoError, "ledger row needs 13 columns");
    std::array<double, 13> v{};
    for (std::size_t i = 0; i < 13; ++i) v[i] = parse_double(cells[i]);
    FunctionalSample s;
    s.t = v[0];
    s.mass = v[1];
    s.energy = v[2];
    s.entropy = v[3];
    s.alpha_entropy = v[4];
    s.hx_sq = v[5];
    s.sup = v[6];
    s.moment = v[7];
    s.B1 = v[8];
    s.B2 = v[9];
    s.Btilde = v[10];
    s.x_left = v[11];
    s.x_right = v[12];
    out.push_back(s);
  });
  if (header) throw Error(Errc::IoError, "empty ledger file");
  return out;
}

std::string snapshot_text(const Snapshot& s, const ProblemParams& p) {
  std::string out = "# n = " + format_double(p.n.value) + "\n# m = " + format_double(p.m.value) +
                    "\n# a0 = " + format_double(p.a0) + "\n# a1 = " + format_double(p.a1) +
                    "\n# t = " + format_double(s.t) + "\n# dx = " + format_double(s.h.dx()) +
                    "\n# origin = " + format_double(s.h.origin()) + "\n";
  for (std::size_t i = 0; i < s.h.size(); ++i) {
    out += format_double(s.h.x(i));
    out += ' ';
    out += format_double(s.h[i]);
    out += '\n';
  }
  return out;
}

Snapshot parse_snapshot(std::string_view text) {
  double t = 0.0, dx = 0.0, origin = 0.0;
  int meta = 0;
  std::vector<double> h;
  for_each_line(text, [&](std::string_view line) {
    if (line.empty()) return;
    if (line.front() == '#') {
      const auto eq = line.find(" = ");
      if (eq == std::string_view::npos) return;
      const auto key = line.substr(2, eq - 2);
      const double v = parse_double(line.substr(eq + 3));
      if (key == "t") {
        t = v;
        meta |= 1;
      } else if (key == "dx") {
        dx = v;
        meta |= 2;
      } else if (key == "origin") {
        origin = v;
        meta |= 4;
      }
      return;
    }
    const auto cells = split(line, ' ');
    if (cells.size() != 2) throw Error(Errc::IoError, "snapshot row needs two columns");
    h.push_back(parse_double(cells[1]));
  });
  if (meta != 7) throw Error(Errc::IoError, "snapshot header incomplete");
  return Snapshot{t, Field(std::move(h), dx, origin)};
}

std::string numeric_csv(std::string_view header, const std::vector<std::vector<double>>& rows) {
  std::string out(header);
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += format_double(r[i]);
    }
    out += '\n';
  }
  return out;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double number_from(const json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

void to_json(json& j, const BasicConstants& b) {
  j = json{{"p", number(b.p)},   {"b1", number(b.b1)}, {"b2", number(b.b2)},
           {"b3", number(b.b3)}, {"b4", number(b.b4)}, {"b5", number(b.b5)},
           {"b4_tilde", number(b.b4_tilde)}, {"b5_tilde", number(b.b5_tilde)}};
}

void from_json(const json& j, BasicConstants& b) {
  b.p = number_from(j.at("p"));
  b.b1 = number_from(j.at("b1"));
  b.b2 = number_from(j.at("b2"));
  b.b3 = number_from(j.at("b3"));
  b.b4 = number_from(j.at("b4"));
  b.b5 = number_from(j.at("b5"));
  b.b4_tilde = number_from(j.at("b4_tilde"));
  b.b5_tilde = number_from(j.at("b5_tilde"));
}

// one table drives both directions so the key sets cannot drift apart
#define THINFILM_CONSTANTS_FIELDS(X)                                                                  \
  X(n) X(m) X(a0) X(a1) X(length) X(eps) X(delta) X(alpha) X(eps_interp) X(mass) X(entropy0) X(hx0_sq) \
  X(p_exponent) X(b2_p4) X(c1) X(c2) X(c3) X(c4) X(c5) X(c6) X(c7) X(c8) X(c9) X(c10) X(c11) X(gamma1) \
  X(gamma2) X(gamma3) X(K) X(h1_bound) X(beta)

void to_json(json& j, const ConstantsLedger& k) {
  j = json::object();
#define X(f) j[#f] = number(k.f);
  THINFILM_CONSTANTS_FIELDS(X)
#undef X
  j["energy_site"] = k.energy_site;
  j["entropy_site"] = k.entropy_site;
}

void from_json(const json& j, ConstantsLedger& k) {
#define X(f) k.f = number_from(j.at(#f));
  THINFILM_CONSTANTS_FIELDS(X)
#undef X
  k.energy_site = j.at("energy_site").get<BasicConstants>();
  k.entropy_site = j.at("entropy_site").get<BasicConstants>();
}

#undef THINFILM_CONSTANTS_FIELDS

void to_json(json& j, const BlowupCertificate& c) {
  j = json{{"k1", number(c.k1)},
           {"k2", number(c.k2)},
           {"E0", number(c.E0)},
           {"V0", number(c.V0)},
           {"T_ub", c.T_ub ? number(*c.T_ub) : json(nullptr)},
           {"T_ub_extrapolated", c.T_ub_extrapolated},
           {"T_star", c.T_star ? number(*c.T_star) : json(nullptr)},
           {"trigger", c.trigger},
           {"margin", number(c.margin)},
           {"tol", number(c.tol)},
           {"verdict", std::string(to_string(c.verdict))}};
  json rows = json::array();
  for (const auto& r : c.rows) rows.push_back({number(r.t), number(r.lhs), number(r.rhs), number(r.margin)});
  j["rows"] = std::move(rows);
}

void from_json(const json& j, BlowupCertificate& c) {
  c.k1 = number_from(j.at("k1"));
  c.k2 = number_from(j.at("k2"));
  c.E0 = number_from(j.at("E0"));
  c.V0 = number_from(j.at("V0"));
  c.T_ub = j.at("T_ub").is_null() ? std::nullopt : std::optional<double>(number_from(j.at("T_ub")));
  c.T_ub_extrapolated = j.at("T_ub_extrapolated").get<bool>();
  c.T_star = j.at("T_star").is_null() ? std::nullopt : std::optional<double>(number_from(j.at("T_star")));
  c.trigger = j.at("trigger").get<std::string>();
  c.margin = number_from(j.at("margin"));
  c.tol = number_from(j.at("tol"));
  const auto v = j.at("verdict").get<std::string>();
  if (v == "CertifiedConsistent") {
    c.verdict = Verdict::CertifiedConsistent;
  } else if (v == "InequalityViolated") {
    c.verdict = Verdict::InequalityViolated;
  } else if (v == "NoBlowup") {
    c.verdict = Verdict::NoBlowup;
  } else {
    throw Error(Errc::IoError, "unknown verdict '" + v + "'");
  }
  c.rows.clear();
  for (const auto& r : j.at("rows")) {
    c.rows.push_back({number_from(r.at(0)), number_from(r.at(1)), number_from(r.at(2)), number_from(r.at(3))});
  }
}

void to_json(json& j, const WeightedBoundReport& r) {
  j = json{{"ok", r.ok},
           {"tol", number(r.tol)},
           {"worst_ratio1", number(r.worst_ratio1)},
           {"worst_ratio2", number(r.worst_ratio2)},
           {"samples", r.rows.size()}};
}

void to_json(json& j, const SpreadingFit& f) {
  j = json{{"exponent", number(f.exponent)},
           {"C", number(f.C)},
           {"residual", number(f.residual)},
           {"count", f.count}};
}

void to_json(json& j, const RegimeReport& r) {
  j = json{{"regime", std::string(to_string(r.regime))},
           {"existence_ok", r.existence_ok},
           {"fsp_ok", r.fsp_ok},
           {"blowup_ok", r.blowup_ok},
           {"unstable_band_edge", number(r.unstable_band_edge)},
           {"critical_mass", r.critical_mass ? number(*r.critical_mass) : json(nullptr)}};
}

void to_json(json& j, const LedgerEvent& e) { j = json{{"t", number(e.t)}, {"kind", e.kind}, {"detail", e.detail}}; }

void to_json(json& j, const SegmentRecord& s) {
  j = json{{"t_start", number(s.t_start)}, {"t_loc", number(s.t_loc)}, {"length", number(s.length)}};
}

}  // namespace thinfilm
