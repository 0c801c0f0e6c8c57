#include "schema.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace hypertoric::io {

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kSchema, "field " + field + ": " + what);
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) field_error(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

double number(const Json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return to_double(rational_from_json(v, field));
  field_error(field, "expected a number");
}

long integer(const Json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long>(d);
  }
  field_error(field, "expected an integer");
}

lattice::IntVector int_vector(const Json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) field_error(field, "expected a non-empty integer array");
  std::vector<Integer> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(integer(v[i], field + "[" + std::to_string(i) + "]"));
  return lattice::IntVector(std::move(out));
}

std::pair<Rational, Rational> complex_pair(const Json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) field_error(field, "expected [re, im]");
  return {rational_from_json(v[0], field + "[0]"), rational_from_json(v[1], field + "[1]")};
}

std::complex<double> complex_number(const Json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2) field_error(field, "expected [re, im]");
  return {number(v[0], field + "[0]"), number(v[1], field + "[1]")};
}

Json int_vector_json(const lattice::IntVector& v) {
  Json out = Json::array();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].fits_slong_p()) {
      out.push_back(v[i].get_si());
    } else {
      out.push_back(v[i].get_str());
    }
  }
  return out;
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) field_error(join(where, key), "unknown key");
  }
}

config::TailLaw parse_tail(const Json& t, const std::string& where) {
  if (!t.is_object()) field_error(where, "expected an object");
  check_keys(t, {"kind", "c", "delta", "sign", "lambda0", "d", "cx"}, where);
  const Json& kind = require(t, "kind", where);
  config::TailLaw law;
  if (kind == "power") {
    law.kind = config::TailKind::kPower;
    law.c = number(require(t, "c", where), join(where, "c"));
    law.delta = number(require(t, "delta", where), join(where, "delta"));
    if (t.contains("sign")) law.sign = static_cast<int>(integer(t["sign"], join(where, "sign")));
  } else if (kind == "arithmetic") {
    law.kind = config::TailKind::kArithmetic;
    law.d = rational_from_json(require(t, "d", where), join(where, "d"));
  } else {
    field_error(join(where, "kind"), "expected \"power\" or \"arithmetic\"");
  }
  if (t.contains("lambda0")) law.lambda0 = rational_from_json(t["lambda0"], join(where, "lambda0"));
  if (t.contains("cx")) std::tie(law.cx_re, law.cx_im) = complex_pair(t["cx"], join(where, "cx"));
  return law;
}

Json tail_json(const config::TailLaw& law) {
  Json t;
  if (law.kind == config::TailKind::kPower) {
    t["kind"] = "power";
    t["c"] = law.c;
    t["delta"] = law.delta;
    t["sign"] = law.sign;
  } else {
    t["kind"] = "arithmetic";
    t["d"] = rational_to_json(law.d);
  }
  t["lambda0"] = rational_to_json(law.lambda0);
  t["cx"] = Json::array({rational_to_json(law.cx_re), rational_to_json(law.cx_im)});
  return t;
}

bool numeric_field(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return false;
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

double parse_field(std::string_view s, std::size_t line, std::size_t column) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kSchema, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                        ": not a number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (const auto col = what.find("column"); col != std::string::npos) {
      if (const auto pos = what.find(": ", col); pos != std::string::npos) what = what.substr(pos + 2);
    }
    throw Error(ErrorCode::kSchema, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
  }
}

Rational rational_from_json(const Json& value, const std::string& field) {
  if (value.is_number_integer()) {
    if (value.is_number_unsigned()) return Rational(Integer(std::to_string(value.get<std::uint64_t>())));
    return Rational(Integer(std::to_string(value.get<std::int64_t>())));
  }
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (!std::isfinite(d)) field_error(field, "not finite");
    return to_rational(d);
  }
  if (value.is_string()) {
    try {
      return parse_rational(value.get<std::string>());
    } catch (const Error& e) {
      field_error(field, e.what());
    }
  }
  field_error(field, "expected a number or a \"p/q\" string");
}

Json rational_to_json(const Rational& value) {
  if (value.get_den() == 1 && value.get_num().fits_slong_p()) return value.get_num().get_si();
  if (is_double_exact(value)) return to_double(value);
  return format_rational(value);
}

config::FlatConfiguration parse_config(std::string_view text) {
  const Json root = parse_json(text);
  if (!root.is_object()) field_error("(root)", "expected an object");
  check_keys(root, {"rank", "families", "comment"}, "");
  const long rank = integer(require(root, "rank", ""), "rank");
  if (rank < 1) field_error("rank", "must be >= 1");
  const Json& fams = require(root, "families", "");
  if (!fams.is_array()) field_error("families", "expected an array");
  std::vector<config::FlatFamily> families;
  for (std::size_t j = 0; j < fams.size(); ++j) {
    const std::string where = "families[" + std::to_string(j) + "]";
    const Json& f = fams[j];
    if (!f.is_object()) field_error(where, "expected an object");
    check_keys(f, {"generator", "prefix", "tail"}, where);
    config::FlatFamily fam;
    fam.generator = int_vector(require(f, "generator", where), join(where, "generator"));
    if (f.contains("prefix")) {
      const Json& p = f["prefix"];
      if (!p.is_array()) field_error(join(where, "prefix"), "expected an array");
      for (std::size_t k = 0; k < p.size(); ++k) {
        const std::string at = where + ".prefix[" + std::to_string(k) + "]";
        config::ImQuaternion q;
        if (p[k].is_array()) {
          if (p[k].size() != 1 && p[k].size() != 3) field_error(at, "expected [re] or [re, cx_re, cx_im]");
          q.re = rational_from_json(p[k][0], at + "[0]");
          if (p[k].size() == 3) {
            q.cx_re = rational_from_json(p[k][1], at + "[1]");
            q.cx_im = rational_from_json(p[k][2], at + "[2]");
          }
        } else {
          q.re = rational_from_json(p[k], at);
        }
        fam.levels.prefix.push_back(q);
      }
    }
    if (f.contains("tail") && !f["tail"].is_null()) fam.levels.tail = parse_tail(f["tail"], join(where, "tail"));
    families.push_back(std::move(fam));
  }
  return config::FlatConfiguration::create(static_cast<std::size_t>(rank), std::move(families));
}

Json config_to_json(const config::FlatConfiguration& cfg) {
  Json root;
  root["rank"] = cfg.rank();
  Json fams = Json::array();
  for (const auto& fam : cfg.families()) {
    Json f;
    f["generator"] = int_vector_json(fam.generator);
    Json prefix = Json::array();
    for (const auto& q : fam.levels.prefix) {
      prefix.push_back(Json::array({rational_to_json(q.re), rational_to_json(q.cx_re), rational_to_json(q.cx_im)}));
    }
    f["prefix"] = std::move(prefix);
    if (fam.levels.tail) f["tail"] = tail_json(*fam.levels.tail);
    fams.push_back(std::move(f));
  }
  root["families"] = std::move(fams);
  return root;
}

std::string serialize_config(const config::FlatConfiguration& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

PeriodicInput parse_periodic(std::string_view text) {
  const Json root = parse_json(text);
  if (!root.is_object()) field_error("(root)", "expected an object");
  check_keys(root, {"rank", "periodic_families", "comment"}, "");
  PeriodicInput out;
  const long rank = integer(require(root, "rank", ""), "rank");
  if (rank < 1) field_error("rank", "must be >= 1");
  out.rank = static_cast<std::size_t>(rank);
  const Json& fams = require(root, "periodic_families", "");
  if (!fams.is_array()) field_error("periodic_families", "expected an array");
  for (std::size_t j = 0; j < fams.size(); ++j) {
    const std::string where = "periodic_families[" + std::to_string(j) + "]";
    const Json& f = fams[j];
    if (!f.is_object()) field_error(where, "expected an object");
    check_keys(f, {"generator", "lambda0", "d", "cx"}, where);
    periodic::PeriodicFamily fam;
    fam.generator = int_vector(require(f, "generator", where), join(where, "generator"));
    if (f.contains("lambda0")) fam.lambda0 = number(f["lambda0"], join(where, "lambda0"));
    if (f.contains("d")) fam.spacing = number(f["d"], join(where, "d"));
    if (f.contains("cx")) fam.cx = complex_number(f["cx"], join(where, "cx"));
    out.families.push_back(std::move(fam));
  }
  periodic::validate_families(out.rank, out.families);
  return out;
}

metric::Deformation parse_deformation(const Json& value, std::size_t rank) {
  if (value.is_null()) return std::nullopt;
  if (!value.is_object()) field_error("deformation", "expected an object");
  check_keys(value, {"c", "weights"}, "deformation");
  metric::TaubNutDeformation d;
  d.c = Eigen::MatrixXd::Zero(rank, rank);
  if (value.contains("c")) {
    const Json& c = value["c"];
    if (!c.is_array() || c.size() != rank) field_error("deformation.c", "expected an n x n array");
    for (std::size_t i = 0; i < rank; ++i) {
      if (!c[i].is_array() || c[i].size() != rank) field_error("deformation.c", "expected an n x n array");
      for (std::size_t j = 0; j < rank; ++j) {
        d.c(i, j) = number(c[i][j], "deformation.c[" + std::to_string(i) + "][" + std::to_string(j) + "]");
      }
    }
  }
  if (value.contains("weights")) {
    const Json& w = value["weights"];
    if (!w.is_array()) field_error("deformation.weights", "expected an array");
    for (std::size_t k = 0; k < w.size(); ++k) {
      d.weights.push_back(number(w[k], "deformation.weights[" + std::to_string(k) + "]"));
    }
  }
  return d;
}

std::vector<config::BasePoint> parse_points(std::string_view csv, std::size_t rank) {
  std::vector<config::BasePoint> out;
  std::size_t line_no = 0;
  bool first = true;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    std::string_view line = csv.substr(0, nl);
    csv.remove_prefix(nl == std::string_view::npos ? csv.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::vector<std::string_view> fields;
    std::vector<std::size_t> columns;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      columns.push_back(start + 1);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (first && !numeric_field(fields[0])) {
      first = false;
      continue;
    }
    first = false;
    if (fields.size() != 3 * rank) {
      throw Error(ErrorCode::kSchema, "line " + std::to_string(line_no) + ": expected " + std::to_string(3 * rank) +
                                          " fields (a_1..a_n, then Re b_i, Im b_i pairs), got " +
                                          std::to_string(fields.size()));
    }
    config::BasePoint p;
    for (std::size_t i = 0; i < rank; ++i) p.a.push_back(parse_field(fields[i], line_no, columns[i]));
    for (std::size_t i = 0; i < rank; ++i) {
      const std::size_t c = rank + 2 * i;
      p.b.emplace_back(parse_field(fields[c], line_no, columns[c]), parse_field(fields[c + 1], line_no, columns[c + 1]));
    }
    out.push_back(std::move(p));
  }
  return out;
}

moment::MomentProblem parse_moment_problem(std::string_view text) {
  const Json root = parse_json(text);
  if (!root.is_object()) field_error("(root)", "expected an object");
  check_keys(root, {"z", "w", "lambda", "target", "generators", "kernel", "comment"}, "");
  moment::MomentProblem p;
  for (const char* key : {"z", "w"}) {
    const Json& arr = require(root, key, "");
    if (!arr.is_array()) field_error(key, "expected an array");
    auto& dst = std::string(key) == "z" ? p.z : p.w;
    for (std::size_t i = 0; i < arr.size(); ++i) dst.push_back(complex_number(arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
  }
  const Json& lam = require(root, "lambda", "");
  if (!lam.is_array()) field_error("lambda", "expected an array");
  for (std::size_t i = 0; i < lam.size(); ++i) p.lambda1.push_back(number(lam[i], "lambda[" + std::to_string(i) + "]"));
  const std::size_t m = p.z.size();
  if (p.w.size() != m || p.lambda1.size() != m) field_error("(root)", "z, w and lambda must have equal length");

  if (root.contains("generators")) {
    const Json& g = root["generators"];
    if (!g.is_array() || g.size() != m) field_error("generators", "expected one generator per index");
    std::vector<lattice::IntVector> gens;
    for (std::size_t i = 0; i < m; ++i) gens.push_back(int_vector(g[i], "generators[" + std::to_string(i) + "]"));
    p.kernel_basis = moment::kernel_of(gens);
    p.generators = std::move(gens);
  }
  if (root.contains("kernel")) {
    const Json& k = root["kernel"];
    if (!k.is_array()) field_error("kernel", "expected an array of vectors");
    p.kernel_basis.clear();
    for (std::size_t j = 0; j < k.size(); ++j) {
      const std::string at = "kernel[" + std::to_string(j) + "]";
      if (!k[j].is_array() || k[j].size() != m) field_error(at, "expected a vector with one entry per index");
      std::vector<Rational> v;
      for (std::size_t i = 0; i < m; ++i) v.push_back(rational_from_json(k[j][i], at + "[" + std::to_string(i) + "]"));
      p.kernel_basis.push_back(std::move(v));
    }
  }
  if (!root.contains("generators") && !root.contains("kernel")) field_error("kernel", "give \"kernel\" or \"generators\"");
  const Json& target = require(root, "target", "");
  if (!target.is_array() || target.size() != p.kernel_basis.size()) {
    field_error("target", "expected " + std::to_string(p.kernel_basis.size()) + " entries (kernel dimension)");
  }
  for (std::size_t j = 0; j < target.size(); ++j) p.target.push_back(number(target[j], "target[" + std::to_string(j) + "]"));
  return p;
}

}  // namespace hypertoric::io
