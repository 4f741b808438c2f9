#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "model/system.hpp"

namespace ioc {

namespace {

using nlohmann::json;

// Minimal TOML reader covering the system-file subset: top-level and
// one-level [section] tables, string / number / boolean / flat numeric
// array values, '#' comments.
json toml_to_json(const std::string& text) {
  json root = json::object();
  json* table = &root;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comments (quotes respected)
    bool in_str = false;
    std::string stripped;
    for (char c : line) {
      if (c == '"') in_str = !in_str;
      if (c == '#' && !in_str) break;
      stripped += c;
    }
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      std::size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    std::string t = trim(stripped);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ModelError("malformed table header at line " + std::to_string(lineno));
      std::string name = trim(t.substr(1, t.size() - 2));
      root[name] = json::object();
      table = &root[name];
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) throw ModelError("expected key = value at line " + std::to_string(lineno));
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (val.empty()) throw ModelError("missing value at line " + std::to_string(lineno));
    if (val.front() == '"') {
      if (val.size() < 2 || val.back() != '"')
        throw ModelError("unterminated string at line " + std::to_string(lineno));
      (*table)[key] = val.substr(1, val.size() - 2);
    } else if (val.front() == '[') {
      if (val.back() != ']') throw ModelError("unterminated array at line " + std::to_string(lineno));
      json arr = json::array();
      std::string inner = val.substr(1, val.size() - 2);
      std::istringstream items(inner);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (!item.empty()) arr.push_back(std::stod(item));
      }
      (*table)[key] = arr;
    } else if (val == "true" || val == "false") {
      (*table)[key] = (val == "true");
    } else {
      try {
        std::size_t used = 0;
        double d = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
        (*table)[key] = d;
      } catch (const std::exception&) {
        throw ModelError("unparseable value '" + val + "' at line " + std::to_string(lineno));
      }
    }
  }
  return root;
}

Expr expr_field(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ModelError("missing expression field '" + key + "'");
  if (!j[key].is_string()) throw ModelError("field '" + key + "' must be an expression string");
  try {
    return parse(j[key].get<std::string>());
  } catch (const ParseError& e) {
    throw ModelError("field '" + key + "': " + e.what() + " at position " +
                     std::to_string(e.position));
  }
}

double num_field(const json& j, const std::string& key, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ModelError("missing numeric field '" + key + "'");
  }
  if (!j[key].is_number()) throw ModelError("field '" + key + "' must be a number");
  return j[key].get<double>();
}

CostSpec parse_cost(const json& c) {
  if (!c.contains("type") || !c["type"].is_string())
    throw ModelError("cost block needs a 'type' of I, Ib, II, III or third");
  auto tag = case_tag_from_name(c["type"].get<std::string>());
  if (!tag) throw ModelError("unknown cost type '" + c["type"].get<std::string>() + "'");
  switch (*tag) {
    case CaseTag::CaseI:
      return CostCaseI{expr_field(c, "g"), expr_field(c, "Q2")};
    case CaseTag::CaseIb:
      return CostCaseIb{num_field(c, "k")};
    case CaseTag::CaseII:
      return CostCaseII{expr_field(c, "Q1"), num_field(c, "q2")};
    case CaseTag::CaseIII:
      return CostCaseIII{num_field(c, "q1", 0.0), num_field(c, "q2")};
    default:
      return CostThirdOrder{};
  }
}

void check_origin(const Expr& e, const char* name) {
  std::array<double, 3> zero{0.0, 0.0, 0.0};
  if (std::fabs(e.eval(zero)) > 1e-12)
    throw ModelError(std::string(name) + " must vanish at the origin");
}

}  // namespace

Problem load_problem(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ModelError("empty system description");
  json j = text[first] == '{' ? json::parse(text, nullptr, true, true) : toml_to_json(text);

  Problem p;
  p.name = j.value("name", "unnamed");
  int order = static_cast<int>(num_field(j, "order"));
  if (order == 2) {
    SecondOrderSystem sys;
    sys.f1 = expr_field(j, "f1");
    sys.f2 = expr_field(j, "f2");
    sys.b = num_field(j, "b", 1.0);
    sys.r = num_field(j, "r", 1.0);
    if (sys.b == 0.0) throw ModelError("input gain b must be nonzero");
    if (sys.r <= 0.0) throw ModelError("input weight r must be positive");
    check_origin(sys.f1, "f1");
    check_origin(sys.f2, "f2");
    if (identically_zero(sys.f1)) throw ModelError("f1 must not be identically zero");
    if (sys.f1.depends_on(3) || sys.f2.depends_on(3))
      throw ModelError("second-order dynamics may not reference x3");
    p.system = sys;
  } else if (order == 3) {
    ThirdOrderSystem sys;
    sys.f = expr_field(j, "f");
    sys.g = expr_field(j, "g");
    sys.d = num_field(j, "d", 0.0);
    sys.b = num_field(j, "b", 1.0);
    sys.q1 = num_field(j, "q1", 1.0);
    sys.q2 = num_field(j, "q2", 1.0);
    sys.q3 = num_field(j, "q3", 1.0);
    sys.r = num_field(j, "r", 1.0);
    if (sys.b == 0.0) throw ModelError("input gain b must be nonzero");
    if (sys.r <= 0.0 || sys.q3 <= 0.0) throw ModelError("r and q3 must be positive");
    if (sys.q1 < 0.0 || sys.q2 < 0.0) throw ModelError("q1 and q2 must be non-negative");
    check_origin(sys.f, "f");
    check_origin(sys.g, "g");
    if (sys.f.depends_on(1) || sys.f.depends_on(3)) throw ModelError("f must depend on x2 only");
    if (sys.g.depends_on(1) || sys.g.depends_on(2)) throw ModelError("g must depend on x3 only");
    if (identically_zero(sys.f) || identically_zero(sys.g))
      throw ModelError("f and g must not be identically zero");
    p.system = sys;
  } else {
    throw ModelError("order must be 2 or 3");
  }

  if (j.contains("cost")) p.cost = parse_cost(j["cost"]);
  if (order == 3 && !p.cost) p.cost = CostThirdOrder{};

  p.domain = Domain::cube(order, order == 2 ? 2.0 : 1.0);
  if (j.contains("domain")) {
    const json& d = j["domain"];
    for (int i = 0; i < order; ++i) {
      std::string key = "x" + std::to_string(i + 1);
      if (d.contains(key)) {
        if (!d[key].is_array() || d[key].size() != 2)
          throw ModelError("domain." + key + " must be [lo, hi]");
        double lo = d[key][0].get<double>(), hi = d[key][1].get<double>();
        if (lo > hi) throw ModelError("domain." + key + " has lo > hi");
        p.domain.bounds[i] = {lo, hi};
      }
    }
  }
  return p;
}

Problem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open system file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_problem(buf.str());
}

std::string problem_to_json(const Problem& p) {
  json j;
  j["name"] = p.name;
  j["order"] = p.order();
  if (p.order() == 2) {
    const auto& s = p.second();
    j["f1"] = s.f1.str();
    j["f2"] = s.f2.str();
    j["b"] = s.b;
    j["r"] = s.r;
  } else {
    const auto& s = p.third();
    j["f"] = s.f.str();
    j["g"] = s.g.str();
    j["d"] = s.d;
    j["b"] = s.b;
    j["q1"] = s.q1;
    j["q2"] = s.q2;
    j["q3"] = s.q3;
    j["r"] = s.r;
  }
  if (p.cost) {
    json c;
    c["type"] = case_tag_name(cost_case(*p.cost));
    if (auto* c1 = std::get_if<CostCaseI>(&*p.cost)) {
      c["g"] = c1->g.str();
      c["Q2"] = c1->Q2.str();
    } else if (auto* c1b = std::get_if<CostCaseIb>(&*p.cost)) {
      c["k"] = c1b->k;
    } else if (auto* c2 = std::get_if<CostCaseII>(&*p.cost)) {
      c["Q1"] = c2->Q1.str();
      c["q2"] = c2->q2;
    } else if (auto* c3 = std::get_if<CostCaseIII>(&*p.cost)) {
      c["q1"] = c3->q1;
      c["q2"] = c3->q2;
    }
    j["cost"] = c;
  }
  json dom;
  for (int i = 0; i < p.domain.dim(); ++i)
    dom["x" + std::to_string(i + 1)] = {p.domain.bounds[i].lo, p.domain.bounds[i].hi};
  j["domain"] = dom;
  return j.dump(2);
}

}  // namespace ioc
