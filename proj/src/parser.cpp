#include <cctype>
#include <set>

#include "aara/frontend.hpp"

namespace aara {

std::string Diagnostic::str() const {
  return std::string(severity == Severity::Error ? "error" : "warning") + " at " + span.str() +
         ": " + message;
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    if (!out.empty()) out += "\n";
    out += d.str();
  }
  return out;
}

}  // namespace

FrontendError::FrontendError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

namespace {

enum class Tok {
  Ident, Int, End,
  Let, Rec, In, Match, With, If, Then, Else, Tick, True, False, Not, Share, As,
  LParen, RParen, LBracket, RBracket, Comma, Semi, Bar, Arrow, ColonColon, At,
  Eq, Lt, Plus, Minus, Star, OrOr, AndAnd, Slash, Underscore,
};

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '#';
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Span at{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", at});
        return out;
      }
      char c = src_[pos_];
      if (ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
        std::string word = src_.substr(start, pos_ - start);
        out.push_back({keyword(word), word, at});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        out.push_back({Tok::Int, src_.substr(start, pos_ - start), at});
        continue;
      }
      auto two = src_.substr(pos_, 2);
      static const std::pair<const char*, Tok> kTwo[] = {
          {"->", Tok::Arrow}, {"::", Tok::ColonColon}, {"||", Tok::OrOr}, {"&&", Tok::AndAnd}};
      bool matched = false;
      for (auto [s, k] : kTwo) {
        if (two == s) {
          advance();
          advance();
          out.push_back({k, s, at});
          matched = true;
          break;
        }
      }
      if (matched) continue;
      Tok k;
      switch (c) {
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case '[': k = Tok::LBracket; break;
        case ']': k = Tok::RBracket; break;
        case ',': k = Tok::Comma; break;
        case ';': k = Tok::Semi; break;
        case '|': k = Tok::Bar; break;
        case '@': k = Tok::At; break;
        case '=': k = Tok::Eq; break;
        case '<': k = Tok::Lt; break;
        case '+': k = Tok::Plus; break;
        case '-': k = Tok::Minus; break;
        case '*': k = Tok::Star; break;
        case '/': k = Tok::Slash; break;
        default:
          throw FrontendError({{Diagnostic::Severity::Error,
                                std::string("unexpected character '") + c + "'", at}});
      }
      advance();
      out.push_back({k, std::string(1, c), at});
    }
  }

 private:
  static Tok keyword(const std::string& w) {
    static const std::pair<const char*, Tok> kWords[] = {
        {"let", Tok::Let},   {"rec", Tok::Rec},     {"in", Tok::In},       {"match", Tok::Match},
        {"with", Tok::With}, {"if", Tok::If},       {"then", Tok::Then},   {"else", Tok::Else},
        {"tick", Tok::Tick}, {"true", Tok::True},   {"false", Tok::False}, {"not", Tok::Not},
        {"share", Tok::Share}, {"as", Tok::As},     {"_", Tok::Underscore}};
    for (auto [s, k] : kWords)
      if (w == s) return k;
    return Tok::Ident;
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      if (src_.compare(pos_, 2, "(*") != 0) return;
      Span open{line_, col_};
      int depth = 0;
      do {
        if (pos_ + 1 >= src_.size())
          throw FrontendError({{Diagnostic::Severity::Error, "unterminated comment", open}});
        if (src_.compare(pos_, 2, "(*") == 0) {
          ++depth;
          advance();
          advance();
        } else if (src_.compare(pos_, 2, "*)") == 0) {
          --depth;
          advance();
          advance();
        } else {
          advance();
        }
      } while (depth > 0);
    }
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  SurfaceProgram program() {
    SurfaceProgram prog;
    std::set<std::string> names;
    while (peek().kind != Tok::End) {
      Span at = peek().span;
      expect(Tok::Let, "expected 'let' to start a function definition");
      accept(Tok::Rec);
      SurfaceFunction fn;
      fn.span = at;
      fn.name = expect(Tok::Ident, "expected function name").text;
      while (peek().kind == Tok::Ident || peek().kind == Tok::Underscore) fn.params.push_back(next().text);
      if (fn.params.empty()) fail("function '" + fn.name + "' needs at least one parameter");
      expect(Tok::Eq, "expected '=' after parameters");
      fn.body = expr();
      if (!names.insert(fn.name).second)
        throw FrontendError({{Diagnostic::Severity::Error, "duplicate function '" + fn.name + "'", at}});
      prog.functions.push_back(std::move(fn));
    }
    return prog;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  Token expect(Tok k, const std::string& what) {
    if (peek().kind != k) fail(what);
    return next();
  }
  [[noreturn]] void fail(const std::string& what) const {
    std::string near = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
    throw FrontendError({{Diagnostic::Severity::Error, what + " (near " + near + ")", peek().span}});
  }

  static SurfacePtr node(SurfaceExpr e) { return std::make_shared<const SurfaceExpr>(std::move(e)); }

  static SurfaceExpr make(SurfaceExpr::Kind k, Span s) {
    SurfaceExpr e;
    e.kind = k;
    e.span = s;
    return e;
  }

  // expr := stmt (';' expr)?
  SurfacePtr expr() {
    SurfacePtr first = stmt();
    if (peek().kind == Tok::Semi) {
      Span at = next().span;
      auto e = make(SurfaceExpr::Kind::Seq, at);
      e.children = {first, expr()};
      return node(std::move(e));
    }
    return first;
  }

  SurfacePtr stmt() {
    Span at = peek().span;
    switch (peek().kind) {
      case Tok::Let: {
        next();
        auto e = make(SurfaceExpr::Kind::Let, at);
        if (peek().kind == Tok::Underscore) {
          next();
          e.name = "_";
        } else {
          e.name = expect(Tok::Ident, "expected a name after 'let'").text;
        }
        expect(Tok::Eq, "expected '=' in let");
        auto bound = expr();
        expect(Tok::In, "expected 'in' (nested let without 'in'?)");
        e.children = {bound, expr()};
        return node(std::move(e));
      }
      case Tok::If: {
        next();
        auto e = make(SurfaceExpr::Kind::If, at);
        auto c = expr();
        expect(Tok::Then, "expected 'then'");
        auto t = stmt();
        expect(Tok::Else, "expected 'else'");
        e.children = {c, t, stmt()};
        return node(std::move(e));
      }
      case Tok::Match: {
        next();
        auto e = make(SurfaceExpr::Kind::Match, at);
        e.children = {expr()};
        expect(Tok::With, "expected 'with'");
        accept(Tok::Bar);
        do {
          e.arms.push_back(arm());
        } while (accept(Tok::Bar));
        return node(std::move(e));
      }
      case Tok::Share: {
        next();
        auto e = make(SurfaceExpr::Kind::Share, at);
        e.share_names.push_back(expect(Tok::Ident, "expected variable after 'share'").text);
        expect(Tok::As, "expected 'as'");
        e.share_names.push_back(expect(Tok::Ident, "expected first copy name").text);
        expect(Tok::Comma, "expected ','");
        e.share_names.push_back(expect(Tok::Ident, "expected second copy name").text);
        expect(Tok::In, "expected 'in'");
        e.children = {expr()};
        return node(std::move(e));
      }
      default: return or_expr();
    }
  }

  MatchArm arm() {
    MatchArm a;
    a.span = peek().span;
    if (accept(Tok::LBracket)) {
      expect(Tok::RBracket, "expected ']' in pattern");
      a.pattern = MatchArm::Pattern::Nil;
    } else if (accept(Tok::LParen)) {
      a.pattern = MatchArm::Pattern::Tuple;
      do {
        a.names.push_back(pattern_name());
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "expected ')' in pattern");
      if (a.names.size() < 2) fail("tuple pattern needs at least two components");
    } else if (peek().kind == Tok::Int || peek().kind == Tok::Minus || peek().kind == Tok::True ||
               peek().kind == Tok::False) {
      a.pattern = MatchArm::Pattern::Literal;
      a.literal = literal_value();
    } else {
      std::string first = pattern_name();
      if (accept(Tok::ColonColon)) {
        a.pattern = MatchArm::Pattern::Cons;
        a.names = {first, pattern_name()};
      } else {
        a.pattern = MatchArm::Pattern::Bind;
        a.names = {first};
      }
    }
    expect(Tok::Arrow, "expected '->' after pattern");
    a.body = expr();
    return a;
  }

  std::string pattern_name() {
    if (accept(Tok::Underscore)) return "_";
    return expect(Tok::Ident, "expected a variable in pattern").text;
  }

  Value literal_value() {
    if (accept(Tok::True)) return Value::boolean(true);
    if (accept(Tok::False)) return Value::boolean(false);
    bool neg = accept(Tok::Minus);
    BigInt n(expect(Tok::Int, "expected an integer literal").text);
    return Value::integer(neg ? BigInt(-n) : n);
  }

  SurfacePtr binary(BinOp op, Span at, SurfacePtr l, SurfacePtr r) {
    auto e = make(SurfaceExpr::Kind::Binop, at);
    e.binop = op;
    e.children = {std::move(l), std::move(r)};
    return node(std::move(e));
  }

  SurfacePtr or_expr() {
    auto l = and_expr();
    while (peek().kind == Tok::OrOr) {
      Span at = next().span;
      l = binary(BinOp::Or, at, l, and_expr());
    }
    return l;
  }

  SurfacePtr and_expr() {
    auto l = cmp_expr();
    while (peek().kind == Tok::AndAnd) {
      Span at = next().span;
      l = binary(BinOp::And, at, l, cmp_expr());
    }
    return l;
  }

  SurfacePtr cmp_expr() {
    auto l = cons_expr();
    if (peek().kind == Tok::Eq || peek().kind == Tok::Lt) {
      Token op = next();
      return binary(op.kind == Tok::Eq ? BinOp::Eq : BinOp::Lt, op.span, l, cons_expr());
    }
    return l;
  }

  SurfacePtr cons_expr() {
    auto l = add_expr();
    if (peek().kind == Tok::ColonColon || peek().kind == Tok::At) {
      Token op = next();
      auto e = make(op.kind == Tok::ColonColon ? SurfaceExpr::Kind::Cons : SurfaceExpr::Kind::Append,
                    op.span);
      e.children = {l, cons_expr()};
      return node(std::move(e));
    }
    return l;
  }

  SurfacePtr add_expr() {
    auto l = mul_expr();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      Token op = next();
      l = binary(op.kind == Tok::Plus ? BinOp::Add : BinOp::Sub, op.span, l, mul_expr());
    }
    return l;
  }

  SurfacePtr mul_expr() {
    auto l = unary();
    while (peek().kind == Tok::Star) {
      Span at = next().span;
      l = binary(BinOp::Mul, at, l, unary());
    }
    return l;
  }

  SurfacePtr unary() {
    Span at = peek().span;
    if (accept(Tok::Not)) {
      auto e = make(SurfaceExpr::Kind::Unop, at);
      e.unop = UnOp::Not;
      e.children = {unary()};
      return node(std::move(e));
    }
    if (accept(Tok::Minus)) {
      if (peek().kind == Tok::Int) {
        auto e = make(SurfaceExpr::Kind::Lit, at);
        e.literal = Value::integer(BigInt(-BigInt(next().text)));
        return node(std::move(e));
      }
      auto e = make(SurfaceExpr::Kind::Unop, at);
      e.unop = UnOp::Neg;
      e.children = {unary()};
      return node(std::move(e));
    }
    return application();
  }

  bool atom_start() const {
    switch (peek().kind) {
      case Tok::Ident: case Tok::Int: case Tok::True: case Tok::False:
      case Tok::LParen: case Tok::LBracket:
        return true;
      default:
        return false;
    }
  }

  SurfacePtr application() {
    if (peek().kind == Tok::Ident) {
      Token head = next();
      if (!atom_start()) {
        auto e = make(SurfaceExpr::Kind::Var, head.span);
        e.name = head.text;
        return node(std::move(e));
      }
      auto e = make(SurfaceExpr::Kind::App, head.span);
      e.name = head.text;
      while (atom_start()) e.children.push_back(atom());
      return node(std::move(e));
    }
    return atom();
  }

  SurfacePtr atom() {
    Span at = peek().span;
    switch (peek().kind) {
      case Tok::Ident: {
        auto e = make(SurfaceExpr::Kind::Var, at);
        e.name = next().text;
        return node(std::move(e));
      }
      case Tok::Int: case Tok::True: case Tok::False: {
        auto e = make(SurfaceExpr::Kind::Lit, at);
        e.literal = literal_value();
        return node(std::move(e));
      }
      case Tok::Tick: {
        next();
        auto e = make(SurfaceExpr::Kind::Tick, at);
        std::string text;
        if (accept(Tok::Minus)) text = "-";
        text += expect(Tok::Int, "expected a rational after 'tick'").text;
        if (accept(Tok::Slash)) text += "/" + expect(Tok::Int, "expected denominator").text;
        try {
          e.tick = parse_rational(text);
        } catch (const std::invalid_argument& ex) {
          throw FrontendError({{Diagnostic::Severity::Error, ex.what(), at}});
        }
        return node(std::move(e));
      }
      case Tok::LParen: {
        next();
        if (accept(Tok::RParen)) {
          auto e = make(SurfaceExpr::Kind::Lit, at);
          e.literal = Value::unit();
          return node(std::move(e));
        }
        std::vector<SurfacePtr> parts{expr()};
        while (accept(Tok::Comma)) parts.push_back(expr());
        expect(Tok::RParen, "expected ')'");
        if (parts.size() == 1) return parts[0];
        auto e = make(SurfaceExpr::Kind::Tuple, at);
        e.children = std::move(parts);
        return node(std::move(e));
      }
      case Tok::LBracket: {
        next();
        auto e = make(SurfaceExpr::Kind::ListLit, at);
        if (!accept(Tok::RBracket)) {
          do {
            e.children.push_back(stmt());
          } while (accept(Tok::Semi));
          expect(Tok::RBracket, "expected ']'");
        }
        return node(std::move(e));
      }
      default:
        fail("expected an expression");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

SurfaceProgram parse(const std::string& source) {
  return Parser(Lexer(source).run()).program();
}

}  // namespace aara
