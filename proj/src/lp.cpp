#include "aara/lp.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace aara {

LinExpr LinExpr::var(std::size_t id, Rational coeff) {
  LinExpr e;
  e.add(id, coeff);
  return e;
}

LinExpr& LinExpr::add(std::size_t id, const Rational& coeff) {
  if (coeff == 0) return *this;
  auto& slot = terms_[id];
  slot += coeff;
  if (slot == 0) terms_.erase(id);
  return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  for (const auto& [id, c] : o.terms_) add(id, c);
  constant_ += o.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const auto& [id, c] : o.terms_) add(id, -c);
  constant_ -= o.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(const Rational& k) {
  if (k == 0) {
    terms_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& [id, c] : terms_) c *= k;
  constant_ *= k;
  return *this;
}

Rational LinExpr::evaluate(const std::vector<Rational>& values) const {
  Rational sum = constant_;
  for (const auto& [id, c] : terms_) sum += c * values.at(id);
  return sum;
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::Ge: return ">=";
    case Relation::Le: return "<=";
    case Relation::Eq: return "=";
  }
  return "?";
}

const char* to_string(LpOutcome::Status s) {
  switch (s) {
    case LpOutcome::Status::Optimal: return "optimal";
    case LpOutcome::Status::Infeasible: return "infeasible";
    case LpOutcome::Status::Unbounded: return "unbounded";
  }
  return "?";
}

std::size_t StandardFormLp::add_variable(std::string name, bool free) {
  if (name.empty()) name = "v" + std::to_string(vars_.size());
  if (by_name_.count(name)) throw std::invalid_argument("duplicate LP variable '" + name + "'");
  by_name_[name] = vars_.size();
  vars_.push_back({std::move(name), free});
  return vars_.size() - 1;
}

std::size_t StandardFormLp::add_row(LinExpr expr, Relation rel, std::string name) {
  for (const auto& [id, c] : expr.terms())
    if (id >= vars_.size()) throw std::invalid_argument("LP row mentions an undeclared variable");
  if (name.empty()) name = "r" + std::to_string(rows_.size());
  rows_.push_back({std::move(expr), rel, std::move(name)});
  return rows_.size() - 1;
}

std::size_t StandardFormLp::find_variable(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? npos : it->second;
}

std::vector<std::size_t> StandardFormLp::violations(const std::vector<Rational>& values) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    Rational v = rows_[i].expr.evaluate(values);
    bool ok = rows_[i].rel == Relation::Ge ? v >= 0 : rows_[i].rel == Relation::Le ? v <= 0 : v == 0;
    if (!ok) out.push_back(i);
  }
  return out;
}

namespace {

// Dense tableau over columns: split structural variables, then one slack per
// inequality row, then one artificial per row.
class Simplex {
 public:
  explicit Simplex(const StandardFormLp& lp) : lp_(lp) {
    const auto& vars = lp.variables();
    for (std::size_t j = 0; j < vars.size(); ++j) {
      plus_.push_back(ncols_++);
      minus_.push_back(vars[j].free ? ncols_++ : npos);
    }
    const auto& rows = lp.rows();
    m_ = rows.size();
    std::vector<std::size_t> slack(m_, npos);
    for (std::size_t i = 0; i < m_; ++i)
      if (rows[i].rel != Relation::Eq) slack[i] = ncols_++;
    first_art_ = ncols_;
    ncols_ += m_;

    t_.assign(m_, std::vector<Rational>(ncols_, Rational(0)));
    rhs_.assign(m_, Rational(0));
    basis_.assign(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      // a·x + c (rel) 0  becomes  a·x (rel) −c, then flipped so rhs ≥ 0.
      Rational sign = -rows[i].expr.constant() < 0 ? -1 : 1;
      rhs_[i] = sign * -rows[i].expr.constant();
      for (const auto& [id, c] : rows[i].expr.terms()) {
        t_[i][plus_[id]] += sign * c;
        if (minus_[id] != npos) t_[i][minus_[id]] -= sign * c;
      }
      if (slack[i] != npos) {
        // Ge: a·x − s = b. Le: a·x + s = b. Scaled by the same sign.
        Rational s = rows[i].rel == Relation::Ge ? -1 : 1;
        t_[i][slack[i]] = sign * s;
      }
      t_[i][first_art_ + i] = 1;
      basis_[i] = first_art_ + i;
    }
  }

  LpOutcome run(const LinExpr& objective) {
    LpOutcome out;
    out.stats.variables = lp_.variables().size();
    out.stats.rows = m_;

    // Phase 1: minimize the sum of artificials.
    d_.assign(ncols_, Rational(0));
    z_ = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      z_ += rhs_[i];
      for (std::size_t j = 0; j < first_art_; ++j)
        if (t_[i][j] != 0) d_[j] -= t_[i][j];
    }
    iterate(ncols_, out);
    if (z_ != 0) {
      out.status = LpOutcome::Status::Infeasible;
      for (std::size_t i = 0; i < m_; ++i)
        if (1 - d_[first_art_ + i] != 0) out.certificate.push_back(i);
      return out;
    }
    drive_out_artificials(out);

    // Phase 2 on the original objective; artificials may no longer enter.
    std::vector<Rational> cost(ncols_, Rational(0));
    for (const auto& [id, c] : objective.terms()) {
      cost[plus_[id]] += c;
      if (minus_[id] != npos) cost[minus_[id]] -= c;
    }
    d_ = cost;
    z_ = objective.constant();
    for (std::size_t i = 0; i < m_; ++i) {
      const Rational& cb = cost[basis_[i]];
      if (cb == 0) continue;
      z_ += cb * rhs_[i];
      for (std::size_t j = 0; j < ncols_; ++j)
        if (t_[i][j] != 0) d_[j] -= cb * t_[i][j];
    }
    std::size_t entering = iterate(first_art_, out);
    if (entering != npos) {
      out.status = LpOutcome::Status::Unbounded;
      std::vector<Rational> dir(ncols_, Rational(0));
      dir[entering] = 1;
      for (std::size_t i = 0; i < m_; ++i) dir[basis_[i]] = -t_[i][entering];
      out.ray = structural(dir);
      return out;
    }
    for (std::size_t j = 0; j < first_art_; ++j)
      if (d_[j] < 0) throw std::logic_error("simplex stopped with a negative reduced cost");

    std::vector<Rational> x(ncols_, Rational(0));
    for (std::size_t i = 0; i < m_; ++i) x[basis_[i]] = rhs_[i];
    out.status = LpOutcome::Status::Optimal;
    out.values = structural(x);
    out.objective = objective.evaluate(out.values);
    if (out.objective != z_) throw std::logic_error("simplex objective disagrees with the tableau");
    if (!lp_.violations(out.values).empty()) throw std::logic_error("simplex returned an infeasible point");
    return out;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<Rational> structural(const std::vector<Rational>& cols) const {
    std::vector<Rational> v(plus_.size(), Rational(0));
    for (std::size_t j = 0; j < plus_.size(); ++j) {
      v[j] = cols[plus_[j]];
      if (minus_[j] != npos) v[j] -= cols[minus_[j]];
    }
    return v;
  }

  // Bland's rule over columns [0, limit). Returns npos at optimality, or the
  // entering column when the objective is unbounded along it.
  std::size_t iterate(std::size_t limit, LpOutcome& out) {
    for (;;) {
      std::size_t c = npos;
      for (std::size_t j = 0; j < limit; ++j)
        if (d_[j] < 0) {
          c = j;
          break;
        }
      if (c == npos) return npos;
      std::size_t r = npos;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (t_[i][c] <= 0) continue;
        Rational ratio = rhs_[i] / t_[i][c];
        if (r == npos || ratio < best || (ratio == best && basis_[i] < basis_[r])) {
          r = i;
          best = ratio;
        }
      }
      if (r == npos) return c;
      pivot(r, c);
      ++out.stats.pivots;
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    std::vector<Rational>& row = t_[r];
    const Rational piv = row[c];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < ncols_; ++j)
      if (row[j] != 0) {
        row[j] /= piv;
        nz.push_back(j);
      }
    rhs_[r] /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || t_[i][c] == 0) continue;
      const Rational f = t_[i][c];
      for (std::size_t j : nz) t_[i][j] -= f * row[j];
      rhs_[i] -= f * rhs_[r];
    }
    if (d_[c] != 0) {
      const Rational f = d_[c];
      for (std::size_t j : nz) d_[j] -= f * row[j];
      z_ += f * rhs_[r];
    }
    basis_[r] = c;
  }

  void drive_out_artificials(LpOutcome& out) {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < first_art_) continue;
      for (std::size_t j = 0; j < first_art_; ++j) {
        if (t_[i][j] != 0) {
          pivot(i, j);
          ++out.stats.pivots;
          break;
        }
      }
      // A row with no structural entry is redundant; its artificial stays at zero.
    }
  }

  const StandardFormLp& lp_;
  std::size_t m_ = 0;
  std::size_t ncols_ = 0;
  std::size_t first_art_ = 0;
  std::vector<std::size_t> plus_;
  std::vector<std::size_t> minus_;
  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> rhs_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> d_;
  Rational z_;
};

}  // namespace

LpOutcome solve(const StandardFormLp& lp, const LinExpr& objective) {
  Simplex s(lp);
  return s.run(objective);
}

LpOutcome lexicographic_solve(const StandardFormLp& lp, const std::vector<LinExpr>& objectives) {
  if (objectives.empty()) return solve(lp, LinExpr());
  StandardFormLp work = lp;
  std::uint64_t pivots = 0;
  LpOutcome out;
  for (std::size_t k = 0; k < objectives.size(); ++k) {
    out = solve(work, objectives[k]);
    pivots += out.stats.pivots;
    out.stats.pivots = pivots;
    out.stats.rows = lp.rows().size();
    if (!out.optimal()) return out;
    if (k + 1 < objectives.size())
      work.add_row(objectives[k] - LinExpr(out.objective), Relation::Eq, "lex." + std::to_string(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string render_terms(const StandardFormLp& lp, const LinExpr& e, bool with_constant) {
  std::string out;
  for (const auto& [id, c] : e.terms()) {
    const Rational mag = c < 0 ? Rational(-c) : c;
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    if (mag != 1) out += to_string(mag) + " ";
    out += lp.variables()[id].name;
  }
  if (with_constant && e.constant() != 0) {
    const Rational& k = e.constant();
    if (out.empty()) return to_string(k);
    out += k < 0 ? " - " : " + ";
    out += to_string(k < 0 ? Rational(-k) : k);
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::string emit_lp_text(const StandardFormLp& lp, const LinExpr& objective) {
  std::ostringstream os;
  os << "min: " << render_terms(lp, objective, true) << ";\n";
  for (const auto& row : lp.rows()) {
    LinExpr lhs = row.expr;
    Rational rhs = -lhs.constant();
    lhs -= LinExpr(lhs.constant());
    os << row.name << ": " << render_terms(lp, lhs, false) << " " << to_string(row.rel) << " "
       << to_string(rhs) << ";\n";
  }
  if (!lp.variables().empty()) {
    os << "vars:";
    for (std::size_t j = 0; j < lp.variables().size(); ++j) os << (j ? ", " : " ") << lp.variables()[j].name;
    os << ";\n";
  }
  bool any_free = false;
  for (const auto& v : lp.variables()) any_free |= v.free;
  if (any_free) {
    os << "free:";
    bool first = true;
    for (const auto& v : lp.variables())
      if (v.free) {
        os << (first ? " " : ", ") << v.name;
        first = false;
      }
    os << ";\n";
  }
  return os.str();
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '#' || c == '\'';
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

class ExprReader {
 public:
  ExprReader(const std::string& s, StandardFormLp& lp) : s_(s), lp_(lp) {}

  LinExpr read() {
    LinExpr e;
    skip();
    bool first = true;
    while (pos_ < s_.size()) {
      Rational sign = 1;
      if (s_[pos_] == '+' || s_[pos_] == '-') {
        if (s_[pos_] == '-') sign = -1;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      Rational coeff = 1;
      bool have_number = false;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) ++pos_;
        coeff = parse_rational(s_.substr(start, pos_ - start));
        have_number = true;
        skip();
      }
      if (pos_ < s_.size() && ident_start(s_[pos_])) {
        std::size_t start = pos_;
        while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        std::size_t id = lp_.find_variable(name);
        if (id == StandardFormLp::npos) id = lp_.add_variable(name);
        e.add(id, sign * coeff);
      } else if (have_number) {
        e += LinExpr(sign * coeff);
      } else {
        fail("expected a term");
      }
      skip();
      first = false;
    }
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("LP text: " + msg + " in '" + s_ + "'");
  }

  const std::string& s_;
  StandardFormLp& lp_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

ParsedLp parse_lp_text(const std::string& text) {
  std::string clean;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 2, "//") == 0) {
      while (i < text.size() && text[i] != '\n') ++i;
    }
    if (i < text.size()) clean += text[i];
  }

  std::vector<std::string> stmts;
  {
    std::stringstream ss(clean);
    std::string item;
    while (std::getline(ss, item, ';')) {
      item = trim(item);
      if (!item.empty()) stmts.push_back(item);
    }
  }

  ParsedLp out;
  // Declarations first so variable ids follow the declared order.
  for (const auto& st : stmts) {
    if (st.rfind("vars:", 0) == 0)
      for (const auto& n : split_names(st.substr(5)))
        if (out.lp.find_variable(n) == StandardFormLp::npos) out.lp.add_variable(n);
  }
  std::vector<std::string> free_names;
  bool have_objective = false;
  for (const auto& st : stmts) {
    if (st.rfind("vars:", 0) == 0) continue;
    if (st.rfind("free:", 0) == 0) {
      for (const auto& n : split_names(st.substr(5))) free_names.push_back(n);
      continue;
    }
    if (st.rfind("min:", 0) == 0) {
      if (have_objective) throw std::invalid_argument("LP text: more than one objective");
      out.objective = ExprReader(st.substr(4), out.lp).read();
      have_objective = true;
      continue;
    }
    std::string body = st;
    std::string name;
    std::size_t rel_pos = body.find_first_of("<>=");
    std::size_t colon = body.find(':');
    if (colon != std::string::npos && colon < rel_pos) {
      name = trim(body.substr(0, colon));
      body = body.substr(colon + 1);
      rel_pos = body.find_first_of("<>=");
    }
    if (rel_pos == std::string::npos) throw std::invalid_argument("LP text: missing relation in '" + st + "'");
    Relation rel = Relation::Eq;
    std::size_t rel_len = 1;
    if (body.compare(rel_pos, 2, ">=") == 0) {
      rel = Relation::Ge;
      rel_len = 2;
    } else if (body.compare(rel_pos, 2, "<=") == 0) {
      rel = Relation::Le;
      rel_len = 2;
    } else if (body[rel_pos] != '=') {
      throw std::invalid_argument("LP text: bad relation in '" + st + "'");
    }
    std::string lhs_text = body.substr(0, rel_pos);
    std::string rhs_text = body.substr(rel_pos + rel_len);
    LinExpr lhs = ExprReader(lhs_text, out.lp).read();
    LinExpr rhs = ExprReader(rhs_text, out.lp).read();
    out.lp.add_row(lhs - rhs, rel, name);
  }
  if (!free_names.empty()) {
    // Rebuild with the free flags set, keeping ids and rows.
    StandardFormLp flagged;
    for (const auto& v : out.lp.variables()) {
      bool is_free = std::find(free_names.begin(), free_names.end(), v.name) != free_names.end();
      flagged.add_variable(v.name, is_free);
    }
    for (const auto& n : free_names)
      if (flagged.find_variable(n) == StandardFormLp::npos)
        throw std::invalid_argument("LP text: free declaration of unknown variable '" + n + "'");
    for (const auto& r : out.lp.rows()) flagged.add_row(r.expr, r.rel, r.name);
    out.lp = std::move(flagged);
  }
  return out;
}

}  // namespace aara
