#include "aara/potential.hpp"

#include <algorithm>
#include <list>
#include <mutex>
#include <stdexcept>

namespace aara {

const char* to_string(BasisKind k) {
  switch (k) {
    case BasisKind::Binomial: return "binomial";
    case BasisKind::Stirling: return "stirling";
    case BasisKind::Mixed: return "mixed";
  }
  return "?";
}

BasisKind parse_basis_kind(const std::string& s) {
  if (s == "binomial") return BasisKind::Binomial;
  if (s == "stirling") return BasisKind::Stirling;
  if (s == "mixed") return BasisKind::Mixed;
  throw std::invalid_argument("unknown basis '" + s + "' (expected binomial, stirling or mixed)");
}

void BasisConfig::validate() const {
  if (demotion && kind != BasisKind::Mixed) throw std::invalid_argument("demotion requires the mixed basis");
  if ((kind == BasisKind::Binomial || kind == BasisKind::Mixed) && max_poly_degree < 1)
    throw std::invalid_argument("polynomial degree must be at least 1");
  if ((kind == BasisKind::Stirling || kind == BasisKind::Mixed) && max_exp_degree < 1)
    throw std::invalid_argument("exponential degree must be at least 1");
}

std::vector<BasisIndex> basis_indices(const BasisConfig& cfg) {
  std::vector<BasisIndex> out;
  switch (cfg.kind) {
    case BasisKind::Binomial:
      for (int d = 1; d <= cfg.max_poly_degree; ++d) out.push_back({0, d});
      break;
    case BasisKind::Stirling:
      for (int d = 1; d <= cfg.max_exp_degree; ++d) out.push_back({d, 0});
      break;
    case BasisKind::Mixed:
      for (int b = 0; b <= cfg.max_exp_degree; ++b)
        for (int k = 0; k <= cfg.max_poly_degree; ++k)
          if (b != 0 || k != 0) out.push_back({b, k});
      break;
  }
  return out;
}

std::size_t basis_size(const BasisConfig& cfg) { return basis_indices(cfg).size(); }

BigInt stirling2(unsigned n, unsigned k) {
  static std::mutex mu;
  static std::vector<std::vector<BigInt>> rows{{BigInt(1)}};
  std::lock_guard<std::mutex> lock(mu);
  while (rows.size() <= n) {
    const auto& prev = rows.back();
    std::size_t m = rows.size();
    std::vector<BigInt> row(m + 1, BigInt(0));
    for (std::size_t j = 1; j <= m; ++j) {
      BigInt a = j < prev.size() ? prev[j] : BigInt(0);
      row[j] = BigInt(j) * a + prev[j - 1];
    }
    rows.push_back(std::move(row));
  }
  return k < rows[n].size() ? rows[n][k] : BigInt(0);
}

BigInt binomial(const BigInt& n, unsigned k) {
  if (n < 0) return 0;
  BigInt num = 1;
  BigInt den = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (n - i <= 0) return 0;
    num *= n - i;
    den *= i + 1;
  }
  return num / den;
}

BigInt basis_value(BasisIndex idx, unsigned n) {
  return binomial(BigInt(n), static_cast<unsigned>(idx.k)) * stirling2(n + 1, static_cast<unsigned>(idx.b + 1));
}

Rational phi(const BasisConfig& cfg, unsigned n, const Annotation& p) {
  const auto idx = basis_indices(cfg);
  Rational sum = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (p[i] != 0) sum += p[i] * Rational(basis_value(idx[i], n));
  return sum;
}

namespace {

struct Tables {
  std::vector<std::vector<Rational>> shift;
  std::vector<Rational> delta;
};

bool same_config(const BasisConfig& a, const BasisConfig& b) {
  return a.kind == b.kind && a.max_poly_degree == b.max_poly_degree && a.max_exp_degree == b.max_exp_degree;
}

// Coefficient of source index `from` in the shifted coefficient at `to`,
// from C(n+1,k) = C(n,k) + C(n,k−1) and S(n+2,b+1) = (b+1)S(n+1,b+1) + S(n+1,b).
Rational shift_weight(BasisIndex to, BasisIndex from) {
  if (from.b == to.b && from.k == to.k) return to.b + 1;
  if (from.b == to.b && from.k == to.k + 1) return to.b + 1;
  if (from.b == to.b + 1 && from.k == to.k) return 1;
  if (from.b == to.b + 1 && from.k == to.k + 1) return 1;
  return 0;
}

const Tables& tables(const BasisConfig& cfg) {
  static std::mutex mu;
  static std::list<std::pair<BasisConfig, Tables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  for (const auto& [c, t] : cache)
    if (same_config(c, cfg)) return t;
  const auto idx = basis_indices(cfg);
  Tables t;
  t.shift.assign(idx.size(), std::vector<Rational>(idx.size(), Rational(0)));
  t.delta.assign(idx.size(), Rational(0));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) t.shift[i][j] = shift_weight(idx[i], idx[j]);
    t.delta[i] = shift_weight({0, 0}, idx[i]);
  }
  cache.emplace_back(cfg, std::move(t));
  return cache.back().second;
}

}  // namespace

const std::vector<std::vector<Rational>>& shift_matrix(const BasisConfig& cfg) { return tables(cfg).shift; }
const std::vector<Rational>& delta_vector(const BasisConfig& cfg) { return tables(cfg).delta; }

Annotation shift(const BasisConfig& cfg, const Annotation& p) {
  const auto& m = shift_matrix(cfg);
  Annotation out(p.size(), Rational(0));
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      if (m[i][j] != 0) out[i] += m[i][j] * p[j];
  return out;
}

Rational delta(const BasisConfig& cfg, const Annotation& p) {
  const auto& d = delta_vector(cfg);
  Rational out = 0;
  for (std::size_t j = 0; j < p.size(); ++j) out += d[j] * p[j];
  return out;
}

Annotation add(const Annotation& p, const Annotation& q) {
  if (p.size() != q.size()) throw std::invalid_argument("annotation size mismatch");
  Annotation out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] + q[i];
  return out;
}

Annotation zero_annotation(const BasisConfig& cfg) { return Annotation(basis_size(cfg), Rational(0)); }

bool in_domain(const BasisConfig& cfg, const Annotation& p) {
  const auto idx = basis_indices(cfg);
  if (p.size() != idx.size()) return false;
  const bool relaxed = cfg.kind == BasisKind::Mixed && cfg.demotion;
  Rational p10 = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (idx[i].b == 1 && idx[i].k == 0) p10 = p[i];
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (relaxed && idx[i].b == 0) {
      if (p[i] + p10 < 0) return false;
    } else if (p[i] < 0) {
      return false;
    }
  }
  return true;
}

Annotation demote(const BasisConfig& cfg, const Annotation& p, const Rational& s) {
  if (cfg.kind != BasisKind::Mixed || !cfg.demotion)
    throw std::domain_error("demotion needs the mixed basis with demotion enabled");
  if (s < 0) throw std::domain_error("demotion amount must be nonnegative");
  const auto idx = basis_indices(cfg);
  Annotation out = p;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i].b == 1 && idx[i].k == 0) out[i] -= s;
    if (idx[i].b == 0) out[i] += s;
  }
  if (!in_domain(cfg, out)) throw std::domain_error("demoted annotation " + render_annotation(out) + " leaves the domain");
  return out;
}

AnnotatedType zero_annotated(const BasisConfig& cfg, const SimpleType& t) {
  return annotate_shape<Rational>(t, [&] { return zero_annotation(cfg); });
}

namespace {

void check_shape(const Value& v, const AnnotatedType& t) {
  using K = SimpleType::Kind;
  bool ok = false;
  switch (t.kind) {
    case K::Int: ok = v.kind() == Value::Kind::Int; break;
    case K::Bool: ok = v.kind() == Value::Kind::Bool; break;
    case K::Unit: ok = v.kind() == Value::Kind::Unit; break;
    case K::List: ok = v.kind() == Value::Kind::List; break;
    case K::Pair: ok = v.kind() == Value::Kind::Pair; break;
  }
  if (!ok) throw std::invalid_argument("value " + v.str() + " does not match annotated type " + render_type(t));
}

}  // namespace

Rational value_potential(const Value& v, const AnnotatedType& t, const BasisConfig& cfg) {
  check_shape(v, t);
  if (t.kind == SimpleType::Kind::Pair)
    return value_potential(v.first(), t.left(), cfg) + value_potential(v.second(), t.right(), cfg);
  if (t.kind != SimpleType::Kind::List) return 0;
  Rational sum = 0;
  Annotation p = t.ann;
  for (std::size_t i = 0; i < v.list_size(); ++i) {
    sum += delta(cfg, p) + value_potential(v.list_at(i), t.elem(), cfg);
    p = shift(cfg, p);
  }
  return sum;
}

Rational value_potential_closed(const Value& v, const AnnotatedType& t, const BasisConfig& cfg) {
  check_shape(v, t);
  if (t.kind == SimpleType::Kind::Pair)
    return value_potential_closed(v.first(), t.left(), cfg) + value_potential_closed(v.second(), t.right(), cfg);
  if (t.kind != SimpleType::Kind::List) return 0;
  Rational sum = phi(cfg, static_cast<unsigned>(v.list_size()), t.ann);
  for (std::size_t i = 0; i < v.list_size(); ++i) sum += value_potential_closed(v.list_at(i), t.elem(), cfg);
  return sum;
}

std::string render_annotation(const Annotation& p) {
  std::string out = "{";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ",";
    out += to_string(p[i]);
  }
  return out + "}";
}

std::string render_tuple(const AnnotatedType& t) {
  if (t.kind != SimpleType::Kind::Pair) return render_type(t);
  std::string out = render_type(t.left());
  const AnnotatedType* rest = &t.right();
  for (; rest->kind == SimpleType::Kind::Pair; rest = &rest->right()) out += " × " + render_type(rest->left());
  return out + " × " + render_type(*rest);
}

std::string render_type(const AnnotatedType& t) {
  switch (t.kind) {
    case SimpleType::Kind::Int: return "int";
    case SimpleType::Kind::Bool: return "bool";
    case SimpleType::Kind::Unit: return "unit";
    case SimpleType::Kind::List: return "L^" + render_annotation(t.ann) + "(" + render_tuple(t.elem()) + ")";
    case SimpleType::Kind::Pair: return "(" + render_tuple(t) + ")";
  }
  return "?";
}

nlohmann::json annotation_json(const BasisConfig& cfg, const Annotation& p) {
  const auto idx = basis_indices(cfg);
  nlohmann::json coeffs = nlohmann::json::array();
  for (std::size_t i = 0; i < idx.size(); ++i)
    coeffs.push_back({{"b", idx[i].b}, {"k", idx[i].k}, {"v", to_string(p.at(i))}});
  return {{"basis", to_string(cfg.kind)}, {"coeffs", coeffs}};
}

Annotation annotation_from_json(const BasisConfig& cfg, const nlohmann::json& j) {
  if (j.at("basis").get<std::string>() != to_string(cfg.kind))
    throw std::invalid_argument("annotation basis does not match the configuration");
  const auto idx = basis_indices(cfg);
  Annotation out = zero_annotation(cfg);
  for (const auto& c : j.at("coeffs")) {
    BasisIndex at{c.at("b").get<int>(), c.at("k").get<int>()};
    auto it = std::find(idx.begin(), idx.end(), at);
    if (it == idx.end()) throw std::invalid_argument("coefficient index outside the configured basis");
    out[static_cast<std::size_t>(it - idx.begin())] = parse_rational(c.at("v").get<std::string>());
  }
  return out;
}

// ---------------------------------------------------------------------------

ClosedForm::ClosedForm(Rational constant) {
  if (constant != 0) terms_[{"", 1, 0}] = constant;
}

void ClosedForm::add_term(const std::string& var, int base, int power, const Rational& c) {
  if (c == 0) return;
  const bool constant = base == 1 && power == 0;
  const std::string key = constant ? "" : var;
  if (!key.empty() && std::find(order_.begin(), order_.end(), key) == order_.end()) order_.push_back(key);
  auto& slot = terms_[{key, base, power}];
  slot += c;
  if (slot == 0) terms_.erase({key, base, power});
}

ClosedForm& ClosedForm::operator+=(const ClosedForm& other) {
  for (const auto& v : other.order_)
    if (std::find(order_.begin(), order_.end(), v) == order_.end()) order_.push_back(v);
  for (const auto& [key, c] : other.terms_) {
    auto& slot = terms_[key];
    slot += c;
    if (slot == 0) terms_.erase(key);
  }
  return *this;
}

Rational ClosedForm::evaluate(const std::map<std::string, BigInt>& sizes) const {
  Rational sum = 0;
  for (const auto& [key, c] : terms_) {
    const auto& [var, base, power] = key;
    if (var.empty()) {
      sum += c;
      continue;
    }
    const BigInt& n = sizes.at(var);
    const unsigned un = n.convert_to<unsigned>();
    BigInt value = boost::multiprecision::pow(BigInt(base), un);
    for (int i = 0; i < power; ++i) value *= n;
    sum += c * Rational(value);
  }
  return sum;
}

Rational ClosedForm::evaluate(const BigInt& n) const {
  std::map<std::string, BigInt> sizes;
  for (const auto& v : order_) sizes[v] = n;
  return evaluate(sizes);
}

namespace {

std::string monomial(const std::string& var, int base, int power) {
  std::vector<std::string> parts;
  if (power == 1) parts.push_back(var);
  if (power > 1) parts.push_back(var + "^" + std::to_string(power));
  if (base > 1) parts.push_back(std::to_string(base) + "^" + var);
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "·") + p;
  return out;
}

}  // namespace

std::string ClosedForm::render() const {
  std::vector<std::pair<Rational, std::string>> items;
  auto emit_var = [&](const std::string& var) {
    std::vector<std::pair<std::pair<int, int>, Rational>> mine;
    for (const auto& [key, c] : terms_)
      if (std::get<0>(key) == var) mine.push_back({{std::get<1>(key), std::get<2>(key)}, c});
    std::sort(mine.begin(), mine.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [bp, c] : mine) items.push_back({c, var.empty() ? "" : monomial(var, bp.first, bp.second)});
  };
  for (const auto& v : order_) emit_var(v);
  emit_var("");

  if (items.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& [c, mono] = items[i];
    const Rational mag = c < 0 ? Rational(-c) : c;
    if (i == 0) {
      if (c < 0) out += "−";
    } else {
      out += c < 0 ? " − " : " + ";
    }
    if (mono.empty()) {
      out += to_string(mag);
    } else if (mag == 1) {
      out += mono;
    } else {
      out += to_string(mag) + "·" + mono;
    }
  }
  return out;
}

ClosedForm closed_form(const BasisConfig& cfg, const Annotation& p, const Rational& q, const std::string& var) {
  ClosedForm out(q);
  const auto idx = basis_indices(cfg);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    if (p[t] == 0) continue;
    const int b = idx[t].b;
    const int k = idx[t].k;
    // C(n,k) = Π_{i<k} (n − i) / k! as a polynomial in n.
    std::vector<Rational> poly{Rational(1)};
    for (int i = 0; i < k; ++i) {
      std::vector<Rational> next(poly.size() + 1, Rational(0));
      for (std::size_t d = 0; d < poly.size(); ++d) {
        next[d + 1] += poly[d];
        next[d] -= poly[d] * i;
      }
      poly = std::move(next);
    }
    Rational kfact = 1;
    for (int i = 2; i <= k; ++i) kfact *= i;
    Rational bfact = 1;
    for (int i = 2; i <= b; ++i) bfact *= i;
    // S(n+1,b+1) = (1/b!) Σ_{i=0}^{b} (−1)^{b−i} C(b,i) (i+1)^n
    for (int i = 0; i <= b; ++i) {
      Rational s = Rational(binomial(BigInt(b), static_cast<unsigned>(i))) / bfact;
      if ((b - i) % 2) s = -s;
      for (std::size_t d = 0; d < poly.size(); ++d)
        if (poly[d] != 0) out.add_term(var, i + 1, static_cast<int>(d), p[t] * s * poly[d] / kfact);
    }
  }
  return out;
}

}  // namespace aara
