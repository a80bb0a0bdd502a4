#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "aara/ast.hpp"

namespace aara {

enum class BasisKind { Binomial, Stirling, Mixed };

const char* to_string(BasisKind k);
BasisKind parse_basis_kind(const std::string& s);

struct BasisConfig {
  BasisKind kind = BasisKind::Stirling;
  int max_poly_degree = 1;  // K: binomial, mixed
  int max_exp_degree = 1;   // B: stirling, mixed
  bool demotion = false;    // mixed only

  static BasisConfig binomial(int k) { return {BasisKind::Binomial, k, 0, false}; }
  static BasisConfig stirling(int b) { return {BasisKind::Stirling, 0, b, false}; }
  static BasisConfig mixed(int k, int b, bool demotion = false) { return {BasisKind::Mixed, k, b, demotion}; }

  /// Throws std::invalid_argument when degrees or the demotion flag do not fit the kind.
  void validate() const;

  friend bool operator==(const BasisConfig&, const BasisConfig&) = default;
};

/// The basis function C(n,k)·S(n+1,b+1). Binomial index d is (0,d); Stirling
/// index d is (d,0).
struct BasisIndex {
  int b = 0;
  int k = 0;
  friend auto operator<=>(const BasisIndex&, const BasisIndex&) = default;
};

/// Admissible indices in canonical order: lexicographic with b dominant.
std::vector<BasisIndex> basis_indices(const BasisConfig& cfg);
std::size_t basis_size(const BasisConfig& cfg);

/// Dense coefficients over `basis_indices(cfg)`.
using Annotation = std::vector<Rational>;

BigInt stirling2(unsigned n, unsigned k);
BigInt binomial(const BigInt& n, unsigned k);
BigInt basis_value(BasisIndex idx, unsigned n);

Rational phi(const BasisConfig& cfg, unsigned n, const Annotation& p);

/// (◁P)_i = Σ_j shift_matrix[i][j] · P_j.
const std::vector<std::vector<Rational>>& shift_matrix(const BasisConfig& cfg);
/// δ(P) = Σ_j delta_vector[j] · P_j.
const std::vector<Rational>& delta_vector(const BasisConfig& cfg);

Annotation shift(const BasisConfig& cfg, const Annotation& p);
Rational delta(const BasisConfig& cfg, const Annotation& p);
Annotation add(const Annotation& p, const Annotation& q);
Annotation zero_annotation(const BasisConfig& cfg);

/// Plain domain: every coefficient ≥ 0. Relaxed domain (mixed with demotion):
/// row b = 0 may go negative as long as p_{0,k} + p_{1,0} ≥ 0.
bool in_domain(const BasisConfig& cfg, const Annotation& p);

/// Moves `s` units from p_{1,0} into every p_{0,k}. Throws std::domain_error
/// if the result leaves the relaxed domain or the config forbids demotion.
Annotation demote(const BasisConfig& cfg, const Annotation& p, const Rational& s);

// ---------------------------------------------------------------------------
// Annotated types, generic over the coefficient type so constraint
// generation can reuse the shape with LP variables.

template <class C>
struct Annotated {
  SimpleType::Kind kind = SimpleType::Kind::Int;
  std::vector<C> ann;                // List only
  std::vector<Annotated> children;   // List: {elem}. Pair: {left, right}.

  const Annotated& elem() const { return children.at(0); }
  const Annotated& left() const { return children.at(0); }
  const Annotated& right() const { return children.at(1); }

  friend bool operator==(const Annotated&, const Annotated&) = default;
};

using AnnotatedType = Annotated<Rational>;

/// Shape of `t` with every annotation filled by `make()`.
template <class C, class F>
Annotated<C> annotate_shape(const SimpleType& t, F&& make) {
  Annotated<C> out;
  out.kind = t.kind();
  if (t.is_list()) {
    out.ann = make();
    out.children.push_back(annotate_shape<C>(t.elem(), make));
  } else if (t.is_pair()) {
    out.children.push_back(annotate_shape<C>(t.left(), make));
    out.children.push_back(annotate_shape<C>(t.right(), make));
  }
  return out;
}

AnnotatedType zero_annotated(const BasisConfig& cfg, const SimpleType& t);

/// Φ by structural recursion: cons pays δ, then the head, then the tail at ◁P.
Rational value_potential(const Value& v, const AnnotatedType& t, const BasisConfig& cfg);
/// Φ via the list-length closed form φ(n,P) plus element potentials.
Rational value_potential_closed(const Value& v, const AnnotatedType& t, const BasisConfig& cfg);

/// `L^{3}(int)`, `(L^{0,2,1}(int) × int)`. Right-nested pairs print as one tuple.
std::string render_annotation(const Annotation& p);
std::string render_type(const AnnotatedType& t);
/// Like render_type, without the parentheses around a top-level tuple.
std::string render_tuple(const AnnotatedType& t);

nlohmann::json annotation_json(const BasisConfig& cfg, const Annotation& p);
Annotation annotation_from_json(const BasisConfig& cfg, const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Closed forms: Σ c · n^j · B^n over named size variables, plus a constant.

class ClosedForm {
 public:
  ClosedForm() = default;
  explicit ClosedForm(Rational constant);

  void add_term(const std::string& var, int base, int power, const Rational& c);
  ClosedForm& operator+=(const ClosedForm& other);

  Rational evaluate(const std::map<std::string, BigInt>& sizes) const;
  /// Single-variable convenience: every variable takes the value n.
  Rational evaluate(const BigInt& n) const;

  /// `n·2^n + 2·2^n − n − 1`; variables in first-appearance order, then the constant.
  std::string render() const;

  const std::vector<std::string>& variables() const { return order_; }

 private:
  // key: (variable, base, power). Base 1 and power 0 on "" is the constant.
  std::map<std::tuple<std::string, int, int>, Rational> terms_;
  std::vector<std::string> order_;
};

/// Expands q + φ(n,P) via the alternating-sum identity for S(n+1,b+1).
ClosedForm closed_form(const BasisConfig& cfg, const Annotation& p, const Rational& q,
                       const std::string& var = "n");

}  // namespace aara
