#include "sqmag/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sqmag/constants.hpp"
#include "sqmag/error.hpp"

namespace sqmag {

namespace {

using json = nlohmann::ordered_json;

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_error(const std::string& msg) { fail(ErrorCode::Parse, msg); }

double to_double(const std::string& cell, const std::string& where) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty() || !std::isfinite(v))
    parse_error(where + ": '" + cell + "' is not a number");
  return v;
}

// Required and optional members of one JSON object; anything left over is an error.
class Section {
 public:
  Section(const json& parent, const std::string& name) : name_(name) {
    if (!parent.contains(name)) parse_error("param file: missing section '" + name + "'");
    obj_ = &parent.at(name);
    if (!obj_->is_object()) parse_error("param file: '" + name + "' must be an object");
  }

  double number(const std::string& key) {
    if (!obj_->contains(key)) parse_error("param file: missing key '" + name_ + "." + key + "'");
    return take(key);
  }
  std::optional<double> optional_number(const std::string& key) {
    if (!obj_->contains(key)) return std::nullopt;
    return take(key);
  }
  const json* raw(const std::string& key) {
    if (!obj_->contains(key)) return nullptr;
    used_.insert(key);
    return &obj_->at(key);
  }
  void finish() const {
    for (const auto& [key, value] : obj_->items())
      if (!used_.count(key)) parse_error("param file: unknown key '" + name_ + "." + key + "'");
  }

 private:
  double take(const std::string& key) {
    used_.insert(key);
    const json& v = obj_->at(key);
    if (!v.is_number()) parse_error("param file: '" + name_ + "." + key + "' must be a number");
    return v.get<double>();
  }

  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> used_;
};

std::size_t column_index(const Table& t, const std::string& name, bool required, const std::string& what) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  if (required) parse_error(what + ": missing column '" + name + "'");
  return t.columns.size();
}

void check_columns(const Table& t, const std::set<std::string>& allowed, const std::string& what) {
  std::set<std::string> seen;
  for (const auto& c : t.columns) {
    if (!allowed.count(c)) parse_error(what + ": unknown column '" + c + "'");
    if (!seen.insert(c).second) parse_error(what + ": duplicate column '" + c + "'");
  }
}

void check_meta(const Table& t, const std::set<std::string>& allowed, const std::string& what) {
  for (const auto& [k, v] : t.meta)
    if (!allowed.count(k)) parse_error(what + ": unknown metadata key '" + k + "'");
}

std::string cell_where(const std::string& what, const Table& t, std::size_t row, const std::string& col) {
  return what + " line " + std::to_string(t.line_numbers[row]) + " column " + col;
}

double meta_number(const Table& t, const std::string& key, const std::string& what) {
  const auto it = t.meta.find(key);
  if (it == t.meta.end()) parse_error(what + ": missing metadata '# " + key + "='");
  return to_double(it->second, what + " metadata " + key);
}

const char* param_description(Param p) {
  switch (p) {
    case Param::L1: return "Josephson inductance, SQUID 1";
    case Param::L2: return "Josephson inductance, SQUID 2";
    case Param::C1: return "junction capacitance, SQUID 1";
    case Param::C2: return "junction capacitance, SQUID 2";
    case Param::Cs: return "shunt capacitance";
    case Param::R: return "loop area ratio A2/A1";
    case Param::D1: return "junction asymmetry, SQUID 1";
    case Param::D2: return "junction asymmetry, SQUID 2";
    case Param::Ip: return "bias current per flux quantum in loop 1";
    case Param::I0: return "bias current offset";
    case Param::Ibc: return "bias current at the critical field";
  }
  return "";
}

}  // namespace

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  return std::stod(num(x));
}

double ParamFile::mode_area(double phi1) const {
  const int loop = minus_mode_loop(model, model.bias_at(phi1), ModelOptions{gap_suppression});
  return loop == 1 ? model.a1 : a2;
}

// ---------------------------------------------------------------------------
// param file

ParamFile parse_param_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    parse_error(std::string("param file: ") + e.what());
  }
  if (!doc.is_object()) parse_error("param file: top level must be an object");
  static const std::set<std::string> sections{"circuit", "flux", "areas", "resonance", "options"};
  for (const auto& [key, value] : doc.items())
    if (!sections.count(key)) parse_error("param file: unknown section '" + key + "'");

  ParamFile p;
  DeviceModel& m = p.model;
  Section circuit(doc, "circuit");
  m.l1 = circuit.number("L1_pH") * 1e-12;
  m.l2 = circuit.number("L2_pH") * 1e-12;
  m.c1 = circuit.number("C1_fF") * 1e-15;
  m.c2 = circuit.number("C2_fF") * 1e-15;
  m.cs = circuit.number("Cs_fF") * 1e-15;
  m.d1 = circuit.number("d1");
  m.d2 = circuit.number("d2");
  circuit.finish();

  Section flux(doc, "flux");
  m.r = flux.number("r");
  m.ip = flux.number("Ip_mA") * 1e-3;
  m.i0 = flux.number("I0_nA") * 1e-9;
  m.ibc = flux.number("Ibc_mA") * 1e-3;
  flux.finish();

  Section areas(doc, "areas");
  m.a1 = areas.number("A1_um2") * 1e-12;
  p.a2 = areas.number("A2_um2") * 1e-12;
  areas.finish();
  if (!(p.a2 > 0.0)) parse_error("param file: areas.A2_um2 must be > 0");

  if (doc.contains("resonance")) {
    Section res(doc, "resonance");
    ResonanceParams r;
    r.f0 = res.number("f0_GHz") * 1e9;
    r.kappa = res.number("kappa_2pi_MHz") * kTwoPi * 1e6;
    r.gamma = res.number("gamma_2pi_MHz") * kTwoPi * 1e6;
    r.gamma_phi = res.number("gamma_phi_2pi_MHz") * kTwoPi * 1e6;
    p.attenuation_db = res.optional_number("attenuation_dB");
    if (auto rabi = res.optional_number("rabi_2pi_MHz")) p.rabi = *rabi * kTwoPi * 1e6;
    res.finish();
    try {
      r.validate();
    } catch (const Error& e) {
      parse_error(std::string("param file: ") + e.what());
    }
    p.resonance = r;
  }

  if (doc.contains("options")) {
    Section opt(doc, "options");
    if (const json* g = opt.raw("gap_suppression")) {
      if (!g->is_boolean()) parse_error("param file: options.gap_suppression must be true or false");
      p.gap_suppression = g->get<bool>();
    }
    if (const json* f = opt.raw("free")) {
      if (!f->is_array()) parse_error("param file: options.free must be a list of parameter names");
      std::array<bool, kParamCount> mask{};
      for (const auto& item : *f) {
        if (!item.is_string()) parse_error("param file: options.free entries must be strings");
        bool found = false;
        for (std::size_t i = 0; i < kParamCount; ++i) {
          if (item.get<std::string>() == param_name(static_cast<Param>(i))) {
            mask[i] = true;
            found = true;
          }
        }
        if (!found) parse_error("param file: options.free: unknown parameter '" + item.get<std::string>() + "'");
      }
      p.free = mask;
    }
    opt.finish();
  }

  try {
    m.validate();
  } catch (const Error& e) {
    parse_error(std::string("param file: ") + e.what());
  }
  return p;
}

std::string format_param_json(const ParamFile& p) {
  const DeviceModel& m = p.model;
  json doc;
  doc["circuit"] = {{"L1_pH", round12(m.l1 / 1e-12)}, {"L2_pH", round12(m.l2 / 1e-12)},
                    {"C1_fF", round12(m.c1 / 1e-15)}, {"C2_fF", round12(m.c2 / 1e-15)},
                    {"Cs_fF", round12(m.cs / 1e-15)}, {"d1", round12(m.d1)},
                    {"d2", round12(m.d2)}};
  doc["flux"] = {{"r", round12(m.r)},
                 {"Ip_mA", round12(m.ip / 1e-3)},
                 {"I0_nA", round12(m.i0 / 1e-9)},
                 {"Ibc_mA", round12(m.ibc / 1e-3)}};
  doc["areas"] = {{"A1_um2", round12(m.a1 / 1e-12)}, {"A2_um2", round12(p.a2 / 1e-12)}};
  if (p.resonance) {
    const auto& r = *p.resonance;
    json res = {{"f0_GHz", round12(r.f0 / 1e9)},
                {"kappa_2pi_MHz", round12(r.kappa / (kTwoPi * 1e6))},
                {"gamma_2pi_MHz", round12(r.gamma / (kTwoPi * 1e6))},
                {"gamma_phi_2pi_MHz", round12(r.gamma_phi / (kTwoPi * 1e6))}};
    if (p.attenuation_db) res["attenuation_dB"] = round12(*p.attenuation_db);
    if (p.rabi) res["rabi_2pi_MHz"] = round12(*p.rabi / (kTwoPi * 1e6));
    doc["resonance"] = res;
  }
  json opt = {{"gap_suppression", p.gap_suppression}};
  if (p.free) {
    json names = json::array();
    for (std::size_t i = 0; i < kParamCount; ++i)
      if ((*p.free)[i]) names.push_back(param_name(static_cast<Param>(i)));
    opt["free"] = names;
  }
  doc["options"] = opt;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// delimited text

Table parse_table(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos && eq > 0 && body.find(' ') > eq) {
        const std::string key = trim(body.substr(0, eq));
        if (!t.meta.emplace(key, trim(body.substr(eq + 1))).second)
          parse_error("line " + std::to_string(line_no) + ": duplicate metadata key '" + key + "'");
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (line.back() == ',') cells.emplace_back();
    if (!have_header) {
      t.columns = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.columns.size())
      parse_error("line " + std::to_string(line_no) + ": expected " + std::to_string(t.columns.size()) +
                  " fields, found " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(line_no);
  }
  if (!have_header) parse_error("missing header row");
  return t;
}

std::vector<SpectroscopyPoint> parse_sweep_csv(const std::string& text) {
  const std::string what = "sweep file";
  const Table t = parse_table(text);
  check_columns(t, {"ib_mA", "freq_GHz", "branch", "weight"}, what);
  const std::size_t ci = column_index(t, "ib_mA", true, what);
  const std::size_t cf = column_index(t, "freq_GHz", true, what);
  const std::size_t cb = column_index(t, "branch", true, what);
  const std::size_t cw = column_index(t, "weight", false, what);
  std::vector<SpectroscopyPoint> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    SpectroscopyPoint p;
    p.ib = to_double(row[ci], cell_where(what, t, i, "ib_mA")) * 1e-3;
    p.freq = to_double(row[cf], cell_where(what, t, i, "freq_GHz")) * 1e9;
    if (row[cb] == "minus")
      p.branch = Branch::Minus;
    else if (row[cb] == "plus")
      p.branch = Branch::Plus;
    else
      parse_error(cell_where(what, t, i, "branch") + ": expected 'minus' or 'plus', found '" + row[cb] + "'");
    if (cw < t.columns.size()) {
      p.weight = to_double(row[cw], cell_where(what, t, i, "weight"));
      if (p.weight < 0.0) parse_error(cell_where(what, t, i, "weight") + ": weight must be >= 0");
    }
    out.push_back(p);
  }
  return out;
}

std::string format_sweep_csv(const std::vector<SpectroscopyPoint>& points) {
  std::string out = "ib_mA,freq_GHz,branch,weight\n";
  for (const auto& p : points) {
    out += num(p.ib / 1e-3) + "," + num(p.freq / 1e9) + "," + (p.branch == Branch::Minus ? "minus" : "plus") + "," +
           num(p.weight) + "\n";
  }
  return out;
}

TraceFile parse_trace_csv(const std::string& text) {
  const std::string what = "trace file";
  const Table t = parse_table(text);
  check_meta(t, {"dt_s", "f_drive_GHz", "p_in_dbm"}, what);
  TraceFile tf;
  const bool s11 = column_index(t, "re_s11", false, what) < t.columns.size();
  tf.has_s11 = s11;
  if (s11)
    check_columns(t, {"t_s", "re_s11", "im_s11"}, what);
  else
    check_columns(t, {"t_s", "f_GHz"}, what);
  const std::size_t ct = column_index(t, "t_s", true, what);
  if (t.rows.size() < 2) parse_error(what + ": need at least 2 samples");

  const double dt = meta_number(t, "dt_s", what);
  if (!(dt > 0.0)) parse_error(what + ": dt_s must be > 0");
  if (s11 || t.meta.count("f_drive_GHz")) tf.f_drive = meta_number(t, "f_drive_GHz", what) * 1e9;
  if (s11 || t.meta.count("p_in_dbm")) tf.p_in_dbm = meta_number(t, "p_in_dbm", what);

  const double t0 = to_double(t.rows[0][ct], cell_where(what, t, 0, "t_s"));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double ti = to_double(t.rows[i][ct], cell_where(what, t, i, "t_s"));
    const double expect = t0 + static_cast<double>(i) * dt;
    if (std::abs(ti - expect) > 1e-9 * (std::abs(expect) + dt))
      parse_error(cell_where(what, t, i, "t_s") + ": sampling is not uniform at dt_s = " + num(dt));
  }

  if (s11) {
    const std::size_t cr = column_index(t, "re_s11", true, what);
    const std::size_t cim = column_index(t, "im_s11", true, what);
    tf.s11.dt = dt;
    tf.s11.f_drive = tf.f_drive;
    tf.s11.p_in_dbm = tf.p_in_dbm;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      tf.s11.samples.emplace_back(to_double(t.rows[i][cr], cell_where(what, t, i, "re_s11")),
                                  to_double(t.rows[i][cim], cell_where(what, t, i, "im_s11")));
  } else {
    const std::size_t cf = column_index(t, "f_GHz", true, what);
    tf.freq.dt = dt;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      tf.freq.samples.push_back(to_double(t.rows[i][cf], cell_where(what, t, i, "f_GHz")) * 1e9);
    tf.freq.off_curve.assign(tf.freq.samples.size(), 0);
  }
  return tf;
}

std::string format_trace_csv(const ComplexTrace& trace) {
  trace.validate();
  std::string out = "# dt_s=" + num(trace.dt) + "\n# f_drive_GHz=" + num(trace.f_drive / 1e9) +
                    "\n# p_in_dbm=" + num(trace.p_in_dbm) + "\nt_s,re_s11,im_s11\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i)
    out += num(static_cast<double>(i) * trace.dt) + "," + num(trace.samples[i].real()) + "," +
           num(trace.samples[i].imag()) + "\n";
  return out;
}

std::string format_trace_csv(const FrequencyTrace& trace) {
  if (!(trace.dt > 0.0) || trace.samples.size() < 2) fail(ErrorCode::InvalidArgument, "format_trace_csv: empty trace");
  std::string out = "# dt_s=" + num(trace.dt) + "\nt_s,f_GHz\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i)
    out += num(static_cast<double>(i) * trace.dt) + "," + num(trace.samples[i] / 1e9) + "\n";
  return out;
}

SpectrumFile parse_spectrum_csv(const std::string& text) {
  const std::string what = "spectrum file";
  const Table t = parse_table(text);
  check_columns(t, {"f_Hz", "sphi", "sb"}, what);
  check_meta(t, {"bandwidth_Hz", "averages"}, what);
  const std::size_t cf = column_index(t, "f_Hz", true, what);
  const std::size_t cp = column_index(t, "sphi", true, what);
  const std::size_t cb = column_index(t, "sb", true, what);
  SpectrumFile sf;
  sf.sphi.unit = DensityUnit::FluxQuantaPerRootHz;
  sf.sb.unit = DensityUnit::TeslaPerRootHz;
  const double bw = meta_number(t, "bandwidth_Hz", what);
  const double avg = meta_number(t, "averages", what);
  if (!(avg >= 0.0) || avg != std::floor(avg)) parse_error(what + ": averages must be a non-negative integer");
  for (SpectralDensity* sd : {&sf.sphi, &sf.sb}) {
    sd->bandwidth = bw;
    sd->averages = static_cast<std::size_t>(avg);
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double f = to_double(t.rows[i][cf], cell_where(what, t, i, "f_Hz"));
    if (!sf.sphi.freqs.empty() && !(f > sf.sphi.freqs.back()))
      parse_error(cell_where(what, t, i, "f_Hz") + ": frequencies must increase");
    sf.sphi.freqs.push_back(f);
    sf.sb.freqs.push_back(f);
    sf.sphi.amplitude.push_back(to_double(t.rows[i][cp], cell_where(what, t, i, "sphi")));
    sf.sb.amplitude.push_back(to_double(t.rows[i][cb], cell_where(what, t, i, "sb")));
  }
  return sf;
}

std::string format_spectrum_csv(const SpectralDensity& sphi, const SpectralDensity& sb) {
  if (sphi.freqs.size() != sb.freqs.size() || sphi.amplitude.size() != sphi.freqs.size() ||
      sb.amplitude.size() != sb.freqs.size())
    fail(ErrorCode::InvalidArgument, "format_spectrum_csv: densities are on different grids");
  std::string out = "# bandwidth_Hz=" + num(sphi.bandwidth) + "\n# averages=" + std::to_string(sphi.averages) +
                    "\n# sphi in Phi0/sqrt(Hz), sb in T/sqrt(Hz)\nf_Hz,sphi,sb\n";
  for (std::size_t i = 0; i < sphi.freqs.size(); ++i)
    out += num(sphi.freqs[i]) + "," + num(sphi.amplitude[i]) + "," + num(sb.amplitude[i]) + "\n";
  return out;
}

std::vector<RabiPowerPoint> parse_rabi_csv(const std::string& text) {
  const std::string what = "power file";
  const Table t = parse_table(text);
  check_columns(t, {"p_in_dbm", "omega_r_MHz"}, what);
  const std::size_t cp = column_index(t, "p_in_dbm", true, what);
  const std::size_t co = column_index(t, "omega_r_MHz", true, what);
  std::vector<RabiPowerPoint> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    RabiPowerPoint p;
    p.p_in_dbm = to_double(t.rows[i][cp], cell_where(what, t, i, "p_in_dbm"));
    p.rabi = to_double(t.rows[i][co], cell_where(what, t, i, "omega_r_MHz")) * kTwoPi * 1e6;
    out.push_back(p);
  }
  return out;
}

std::string format_rabi_csv(const std::vector<RabiPowerPoint>& points) {
  std::string out = "p_in_dbm,omega_r_MHz\n";
  for (const auto& p : points) out += num(p.p_in_dbm) + "," + num(p.rabi / (kTwoPi * 1e6)) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// reports

std::string format_fit_report(const FitResult& fit) {
  std::ostringstream out;
  char line[256];
  out << "fit: " << (fit.converged ? "converged" : "NOT converged") << " after " << fit.iterations
      << " iterations, rms residual " << fixed(fit.residual_rms / 1e6, 4) << " MHz over " << fit.points_used
      << " points (" << fit.points_masked << " dark plus points masked)\n\n";
  std::snprintf(line, sizeof line, "%-5s %-4s %14s %14s %12s  %s\n", "param", "unit", "initial", "fitted", "sigma",
                "description");
  out << line;
  const auto init = fit.initial.to_array();
  const auto vals = fit.params.to_array();
  for (std::size_t i = 0; i < kParamCount; ++i) {
    const auto p = static_cast<Param>(i);
    const double s = param_scale(p);
    char sig[32];
    std::snprintf(sig, sizeof sig, "%.3g", fit.sigma[i] / s);
    const std::string sigma = fit.free[i] ? sig : "fixed";
    std::snprintf(line, sizeof line, "%-5s %-4s %14.6g %14.8g %12s  %s\n", param_name(p), param_unit(p),
                  init[i] / s, vals[i] / s, sigma.c_str(), param_description(p));
    out << line;
  }
  if (!fit.at_bound.empty()) {
    out << "\nparameters at a bound:";
    for (Param p : fit.at_bound) out << " " << param_name(p);
    out << "\n";
  }

  const DerivedQuantities d = derived_quantities(fit);
  const auto& e = d.energies;
  out << "\nderived quantities\n";
  std::snprintf(line, sizeof line, "  plasma frequency   %10.4f / %10.4f GHz\n", e.fpl1 / 1e9, e.fpl2 / 1e9);
  out << line;
  std::snprintf(line, sizeof line, "  E_c/h              %10.3f / %10.3f MHz\n", e.ec1 / 1e6, e.ec2 / 1e6);
  out << line;
  std::snprintf(line, sizeof line, "  E_J/h              %10.2f / %10.2f GHz\n", e.ej1 / 1e9, e.ej2 / 1e9);
  out << line;
  std::snprintf(line, sizeof line, "  b                  %10.4f mT/A\n", d.b / 1e-3);
  out << line;
  std::snprintf(line, sizeof line, "  B0                 %10.4f +- %.4f nT\n", d.b0 / 1e-9, d.b0_sigma / 1e-9);
  out << line;
  std::snprintf(line, sizeof line, "  Bc                 %10.5f mT\n", d.bc / 1e-3);
  out << line;

  const double r_sigma = fit.free[static_cast<int>(Param::R)] ? fit.sigma[static_cast<int>(Param::R)] : 0.0;
  const double tol = std::max(kDefaultPeriodTolerance, 2.0 * r_sigma);
  try {
    const ModulationPeriod mp = modulation_period(fit.params.r, tol, kDefaultMaxDenominator, fit.params.a1);
    out << "\nr ~ " << mp.numerator << "/" << mp.denominator << " (tolerance " << num(tol) << ")\n";
    out << "modulation period M = " << mp.period_phi0 << " Φ0";
    if (mp.period_field) out << " (" << fixed(*mp.period_field / 1e-3, 4) << " mT)";
    out << "\n";
  } catch (const Error& err) {
    out << "\nmodulation period: " << err.what() << "\n";
  }
  return out.str();
}

std::string format_noise_report(const NoiseFit& fit, double area) {
  std::ostringstream out;
  const NoiseModel& m = fit.model;
  const double to_phi0 = area / kFluxQuantum;
  out << "noise model S(f) = a/f^alpha + b G^2/((2 pi f)^2 + G^2) + S0, fitted on S_B\n";
  out << "  a          " << num(m.a) << " T^2 Hz^(alpha-1)\n";
  out << "  alpha      " << fixed(m.alpha, 4) << "\n";
  out << "  sqrt(b)    " << fixed(std::sqrt(m.b_rtn) / 1e-12, 3) << " pT/sqrt(Hz)  "
      << fixed(std::sqrt(m.b_rtn) * to_phi0 / 1e-6, 4) << " uPhi0/sqrt(Hz)\n";
  out << "  Gamma_RTN  " << fixed(m.gamma_rtn / kTwoPi, 4) << " Hz\n";
  out << "  sqrt(S0)   " << fixed(std::sqrt(m.s0) / 1e-12, 3) << " pT/sqrt(Hz)  "
      << fixed(std::sqrt(m.s0) * to_phi0 / 1e-6, 4) << " uPhi0/sqrt(Hz)\n";
  out << "  area       " << fixed(area / 1e-12, 2) << " um^2\n";
  out << "crossovers\n";
  out << "  flicker/white     " << num(fit.crossover_flicker_white) << " Hz\n";
  out << "  telegraph/white   " << num(fit.crossover_telegraph_white) << " Hz\n";
  out << "  flicker/telegraph " << num(fit.crossover_flicker_telegraph) << " Hz\n";
  out << "fit: " << (fit.converged ? "converged" : "NOT converged") << ", " << fit.iterations
      << " iterations, rms " << fixed(fit.residual_rms, 4) << " in ln S\n";
  if (fit.flicker_degenerate) out << "DegenerateTerm: flicker\n";
  if (fit.telegraph_degenerate) out << "DegenerateTerm: telegraph\n";
  if (fit.white_degenerate) out << "DegenerateTerm: white\n";
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

}  // namespace sqmag
