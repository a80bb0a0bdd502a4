#include "aara/report.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace aara {

namespace {

const char* kSubscripts[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};

std::string subscript(std::size_t i) {
  std::string digits = std::to_string(i);
  std::string out;
  for (char c : digits) out += kSubscripts[c - '0'];
  return out;
}

void collect(const AnnotatedType& t, const std::string& path, std::vector<SizeVariable>& out) {
  if (t.kind == SimpleType::Kind::List) {
    out.push_back({"", path, &t});
    return;
  }
  if (t.kind != SimpleType::Kind::Pair) return;
  // Right-nested pairs are one tuple; components are numbered from 1.
  const AnnotatedType* rest = &t;
  int i = 1;
  for (; rest->kind == SimpleType::Kind::Pair; rest = &rest->right(), ++i)
    collect(rest->left(), path + "." + std::to_string(i), out);
  collect(*rest, path + "." + std::to_string(i), out);
}

bool nested_potential(const AnnotatedType& t, bool inside) {
  if (t.kind == SimpleType::Kind::List) {
    if (inside)
      for (const auto& c : t.ann)
        if (c != 0) return true;
    return nested_potential(t.elem(), true);
  }
  for (const auto& c : t.children)
    if (nested_potential(c, inside)) return true;
  return false;
}

std::string str(const Rational& r) { return to_string(r); }

nlohmann::json basis_json(const BasisConfig& cfg) {
  return {{"kind", to_string(cfg.kind)},
          {"poly_degree", cfg.max_poly_degree},
          {"exp_degree", cfg.max_exp_degree},
          {"demotion", cfg.demotion}};
}

BasisConfig basis_from_json(const nlohmann::json& j) {
  BasisConfig cfg;
  cfg.kind = parse_basis_kind(j.at("kind").get<std::string>());
  cfg.max_poly_degree = j.at("poly_degree").get<int>();
  cfg.max_exp_degree = j.at("exp_degree").get<int>();
  cfg.demotion = j.at("demotion").get<bool>();
  cfg.validate();
  return cfg;
}

}  // namespace

std::vector<SizeVariable> size_variables(const AnnotatedType& arg) {
  std::vector<SizeVariable> out;
  collect(arg, "arg", out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].name = out.size() == 1 ? "n" : "n" + subscript(i + 1);
  return out;
}

ClosedForm bound_closed_form(const BasisConfig& cfg, const AnnotatedType& arg, const Rational& q) {
  ClosedForm out(q);
  for (const auto& v : size_variables(arg)) out += closed_form(cfg, v.type->ann, 0, v.name);
  return out;
}

AnalysisReport make_report(const Analysis& a) {
  if (!a.outcome.optimal()) throw std::invalid_argument("a report needs an optimal analysis");
  AnalysisReport r;
  const SolverStats stats{a.system.lp.variables().size(), a.system.lp.rows().size(), a.outcome.stats.pivots,
                          a.seconds};
  const BasisConfig& cfg = a.system.cfg;
  for (const auto& name : a.system.functions) {
    const SolvedSig& s = a.sigs.at(name);
    ClosedForm cf = bound_closed_form(cfg, s.arg, s.q_in);
    const auto vars = size_variables(s.arg);
    for (int n = 0; n <= 20; ++n) {
      std::map<std::string, BigInt> sizes;
      Rational expected = s.q_in;
      for (const auto& v : vars) {
        sizes[v.name] = n;
        expected += phi(cfg, n, v.type->ann);
      }
      if (cf.evaluate(sizes) != expected)
        throw std::logic_error("closed form for " + name + " disagrees with the potential at n = " + std::to_string(n));
    }
    std::string text = cf.render();
    if (nested_potential(s.arg, false)) text += " + Φ(elements)";
    r.functions.push_back({name, cfg, s.arg, s.result, s.q_in, s.q_out, text, stats});
  }
  return r;
}

std::string render_signature_line(const FunctionReport& f) {
  std::ostringstream os;
  os << f.function << " : " << render_tuple(f.arg_type) << " --" << str(f.q) << "/" << str(f.q_prime) << "--> "
     << render_tuple(f.result_type) << " ; bound: " << f.closed_form;
  std::vector<std::string> where;
  for (const auto& v : size_variables(f.arg_type))
    if (f.closed_form.find(v.name) != std::string::npos) where.push_back(v.name + " = |" + v.path + "|");
  for (std::size_t i = 0; i < where.size(); ++i) os << (i ? ", " : " where ") << where[i];
  return os.str();
}

std::string render_report(const AnalysisReport& r, ReportFormat format) {
  if (format == ReportFormat::Json) return report_json(r).dump(2) + "\n";
  std::ostringstream os;
  for (const auto& f : r.functions) os << render_signature_line(f) << "\n";
  if (!r.functions.empty()) {
    const SolverStats& s = r.functions.front().stats;
    os << "lp: " << s.variables << " variables, " << s.constraints << " constraints, " << s.pivots << " pivots, "
       << std::fixed << std::setprecision(3) << s.seconds << " s\n";
  }
  return os.str();
}

nlohmann::json annotated_type_json(const BasisConfig& cfg, const AnnotatedType& t) {
  switch (t.kind) {
    case SimpleType::Kind::Int: return {{"kind", "int"}};
    case SimpleType::Kind::Bool: return {{"kind", "bool"}};
    case SimpleType::Kind::Unit: return {{"kind", "unit"}};
    case SimpleType::Kind::List:
      return {{"kind", "list"}, {"annotation", annotation_json(cfg, t.ann)}, {"elem", annotated_type_json(cfg, t.elem())}};
    case SimpleType::Kind::Pair:
      return {{"kind", "pair"},
              {"left", annotated_type_json(cfg, t.left())},
              {"right", annotated_type_json(cfg, t.right())}};
  }
  return {};
}

AnnotatedType annotated_type_from_json(const BasisConfig& cfg, const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  AnnotatedType t;
  if (kind == "int") t.kind = SimpleType::Kind::Int;
  else if (kind == "bool") t.kind = SimpleType::Kind::Bool;
  else if (kind == "unit") t.kind = SimpleType::Kind::Unit;
  else if (kind == "list") {
    t.kind = SimpleType::Kind::List;
    t.ann = annotation_from_json(cfg, j.at("annotation"));
    t.children.push_back(annotated_type_from_json(cfg, j.at("elem")));
  } else if (kind == "pair") {
    t.kind = SimpleType::Kind::Pair;
    t.children.push_back(annotated_type_from_json(cfg, j.at("left")));
    t.children.push_back(annotated_type_from_json(cfg, j.at("right")));
  } else {
    throw std::invalid_argument("unknown type kind '" + kind + "'");
  }
  return t;
}

nlohmann::json function_json(const FunctionReport& f) {
  return {{"function", f.function},
          {"basis", basis_json(f.cfg)},
          {"arg_type", annotated_type_json(f.cfg, f.arg_type)},
          {"result_type", annotated_type_json(f.cfg, f.result_type)},
          {"q", str(f.q)},
          {"q_prime", str(f.q_prime)},
          {"closed_form", f.closed_form},
          {"stats",
           {{"variables", f.stats.variables},
            {"constraints", f.stats.constraints},
            {"pivots", f.stats.pivots},
            {"seconds", f.stats.seconds}}}};
}

nlohmann::json report_json(const AnalysisReport& r) {
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : r.functions) fs.push_back(function_json(f));
  return {{"functions", fs}};
}

AnalysisReport parse_report_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  AnalysisReport r;
  for (const auto& fj : j.at("functions")) {
    FunctionReport f;
    f.function = fj.at("function").get<std::string>();
    f.cfg = basis_from_json(fj.at("basis"));
    f.arg_type = annotated_type_from_json(f.cfg, fj.at("arg_type"));
    f.result_type = annotated_type_from_json(f.cfg, fj.at("result_type"));
    f.q = parse_rational(fj.at("q").get<std::string>());
    f.q_prime = parse_rational(fj.at("q_prime").get<std::string>());
    f.closed_form = fj.at("closed_form").get<std::string>();
    const auto& s = fj.at("stats");
    f.stats = {s.at("variables").get<std::size_t>(), s.at("constraints").get<std::size_t>(),
               s.at("pivots").get<std::uint64_t>(), s.at("seconds").get<double>()};
    r.functions.push_back(std::move(f));
  }
  return r;
}

}  // namespace aara
