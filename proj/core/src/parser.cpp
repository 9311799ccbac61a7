#include <fstream>
#include <set>
#include <sstream>

#include "eqcheck/frontend.hpp"
#include "lexer.hpp"

namespace eqcheck {

FrontendError::FrontendError(Kind kind, std::string file, SourceLoc loc, std::string message)
    : std::runtime_error(file + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": " +
                         message),
      kind_(kind),
      file_(std::move(file)),
      loc_(loc),
      message_(std::move(message)) {}

namespace {

using detail::Tok;
using detail::Token;
using EK = FrontendError::Kind;

// Untyped parse tree; converted to affine or value form depending on where
// it appears.
struct PExpr {
  enum class K { Num, Name, Index, Call, Bin, Neg, Deref, Addr };
  K k = K::Num;
  std::int64_t value = 0;
  std::string name;  // Name, Index, Call; operator for Bin
  std::vector<PExpr> kids;
  SourceLoc loc;
};

enum class Ctx { Index, Bound, Guard, Constant };

enum class Arith { Add, Sub, Mul };

std::int64_t checked(Arith op, std::int64_t a, std::int64_t b, const std::string& file, SourceLoc loc) {
  std::int64_t out = 0;
  bool overflow = op == Arith::Add   ? __builtin_add_overflow(a, b, &out)
                  : op == Arith::Sub ? __builtin_sub_overflow(a, b, &out)
                                     : __builtin_mul_overflow(a, b, &out);
  if (overflow) throw FrontendError(EK::Semantic, file, loc, "integer overflow in affine expression");
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string file, const ConstantOverrides& overrides)
      : toks_(std::move(toks)), file_(std::move(file)), overrides_(overrides) {
    prog_.file = file_;
  }

  Program run() {
    bool have_function = false;
    std::string pragma;
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Hash) {
        parse_define();
      } else if (peek().kind == Tok::Pragma) {
        pragma = next().text;
      } else {
        bool defined = parse_function_or_decl(pragma, have_function);
        have_function = have_function || defined;
        pragma.clear();
      }
    }
    if (!have_function) fail(EK::Syntax, peek().loc, "no function definition found");
    finish();
    return std::move(prog_);
  }

 private:
  // --- token plumbing -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    if (line_limit_ && toks_[i].loc.line != line_limit_) return end_tok_;
    return toks_[i];
  }
  const Token& next() {
    const Token& t = peek();
    if (t.kind != Tok::End) ++pos_;
    return t;
  }
  bool is(std::string_view text, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return (t.kind == Tok::Punct || t.kind == Tok::Ident) && t.text == text;
  }
  bool accept(std::string_view text) {
    if (!is(text)) return false;
    next();
    return true;
  }
  const Token& expect(std::string_view text) {
    if (!is(text)) fail(EK::Syntax, peek().loc, "expected '" + std::string(text) + "' but found " + describe(peek()));
    return next();
  }
  std::string expect_ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(EK::Syntax, peek().loc, std::string("expected ") + what + " but found " + describe(peek()));
    return next().text;
  }
  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
  }
  [[noreturn]] void fail(EK kind, SourceLoc loc, const std::string& msg) const {
    throw FrontendError(kind, file_, loc, msg);
  }

  // --- top level ------------------------------------------------------------

  void parse_define() {
    SourceLoc loc = next().loc;
    int line = loc.line;
    if (!(peek().kind == Tok::Ident && peek().text == "define" && peek().loc.line == line))
      fail(EK::Syntax, loc, "only #define and #include directives are supported");
    next();
    line_limit_ = line;
    if (peek().kind != Tok::Ident) fail(EK::Syntax, peek().loc, "expected macro name");
    const Token& nt = next();
    std::string name = nt.text;
    bool adjacent = peek().loc.col == nt.loc.col + static_cast<int>(name.size());
    if (is("(") && adjacent) fail(EK::Unsupported, peek().loc, "function-like macros are not supported");
    if (peek().kind == Tok::End) fail(EK::Syntax, loc, "#define '" + name + "' needs a value");
    PExpr e = parse_expr();
    if (peek().kind != Tok::End) fail(EK::Syntax, peek().loc, "unexpected " + describe(peek()) + " in #define");
    line_limit_ = 0;
    std::int64_t v = 0;
    if (auto it = overrides_.find(name); it != overrides_.end()) {
      v = it->second;
    } else {
      AffineExpr a = to_affine(e, Ctx::Constant);
      v = a.constant;
    }
    prog_.constants[name] = v;
  }

  static bool is_type_word(const Token& t) {
    static const std::set<std::string> words = {"int", "void", "const", "static", "unsigned", "signed",
                                                "long", "short", "inline", "extern"};
    return t.kind == Tok::Ident && words.count(t.text);
  }

  // Returns true if a function body was parsed.
  bool parse_function_or_decl(const std::string& pragma, bool have_function) {
    SourceLoc start = peek().loc;
    while (is_type_word(peek())) next();
    if (peek().kind != Tok::Ident) fail(EK::Syntax, peek().loc, "expected a function but found " + describe(peek()));
    Token name = next();
    if (!is("(")) fail(EK::Syntax, peek().loc, "only function declarations and definitions may appear at file scope");
    next();

    // Find whether this is a prototype: scan to the matching ')'.
    std::size_t depth = 1, j = pos_;
    while (j < toks_.size() && depth > 0) {
      if (toks_[j].kind == Tok::Punct && toks_[j].text == "(") ++depth;
      if (toks_[j].kind == Tok::Punct && toks_[j].text == ")") --depth;
      ++j;
    }
    bool prototype = j < toks_.size() && toks_[j].kind == Tok::Punct && toks_[j].text == ";";

    if (prototype) {
      int arity = 0;
      if (!is(")")) {
        do {
          if (is("void") && is(")", 1)) {
            next();
            break;
          }
          while (is_type_word(peek())) next();
          if (is("*")) fail(EK::Pointer, peek().loc, "pointer parameters are not supported");
          if (peek().kind == Tok::Ident) next();
          ++arity;
        } while (accept(","));
      }
      expect(")");
      expect(";");
      declare_function(name, arity, pragma);
      return false;
    }

    if (!pragma.empty()) fail(EK::Syntax, start, "operator pragmas apply to function declarations only");
    if (have_function) fail(EK::Unsupported, name.loc, "only one function definition per file is supported");
    prog_.name = name.text;
    if (!is(")")) {
      if (is("void") && is(")", 1)) {
        next();
      } else {
        do parse_param();
        while (accept(","));
      }
    }
    expect(")");
    expect("{");
    parse_block_items(prog_.body, /*top=*/true);
    expect("}");
    return true;
  }

  void declare_function(const Token& name, int arity, const std::string& pragma) {
    OperatorInfo info;
    info.symbol = name.text;
    info.arity = arity;
    std::istringstream words(pragma);
    for (std::string w; words >> w;) {
      if (w == "assoc" || w == "associative") info.associative = true;
      else if (w == "comm" || w == "commutative") info.commutative = true;
      else fail(EK::Syntax, name.loc, "unknown operator property '" + w + "'");
    }
    if (info.associative && arity != 2)
      fail(EK::Semantic, name.loc, "associative function '" + name.text + "' must take two arguments");
    if (auto* old = prog_.operators.find(name.text)) {
      if (old->builtin) fail(EK::Semantic, name.loc, "cannot redeclare built-in operator '" + name.text + "'");
      if (!(*old == info)) fail(EK::Semantic, name.loc, "conflicting declarations of '" + name.text + "'");
    }
    prog_.operators.declare(info);
  }

  void parse_param() {
    ArrayDecl d;
    d.is_param = true;
    bool saw_int = false;
    while (is_type_word(peek())) {
      if (peek().text == "const") d.is_const = true;
      if (peek().text == "int") saw_int = true;
      next();
    }
    if (!saw_int) fail(EK::Unsupported, peek().loc, "parameters must be int arrays");
    if (is("*")) fail(EK::Pointer, peek().loc, "pointer parameters are not supported; use explicit array indexing");
    SourceLoc loc = peek().loc;
    d.name = expect_ident("parameter name");
    if (!is("[")) fail(EK::Unsupported, loc, "scalar parameter '" + d.name + "' is not supported; use #define constants");
    while (accept("[")) {
      if (accept("]")) {
        d.extents.push_back(std::nullopt);
        continue;
      }
      d.extents.push_back(parse_extent());
      expect("]");
    }
    add_array(std::move(d), loc);
  }

  std::int64_t parse_extent() {
    SourceLoc loc = peek().loc;
    std::int64_t v = to_affine(parse_expr(), Ctx::Constant).constant;
    if (v <= 0) fail(EK::Semantic, loc, "array extent must be positive");
    return v;
  }

  void add_array(ArrayDecl d, SourceLoc loc) {
    if (prog_.find_array(d.name) || std::count(prog_.scalars.begin(), prog_.scalars.end(), d.name) ||
        prog_.constants.count(d.name))
      fail(EK::Semantic, loc, "redeclaration of '" + d.name + "'");
    prog_.arrays.push_back(std::move(d));
  }

  // --- statements -----------------------------------------------------------

  void parse_block_items(std::vector<Stmt>& out, bool top) {
    while (!is("}") && peek().kind != Tok::End) {
      if (is("int") || is("const")) {
        if (!top || loop_depth_ > 0) fail(EK::Unsupported, peek().loc, "declarations are only allowed at function scope");
        parse_local_decl();
        continue;
      }
      parse_stmt(out);
    }
  }

  void parse_local_decl() {
    while (is_type_word(peek())) next();
    do {
      if (is("*")) fail(EK::Pointer, peek().loc, "pointer variables are not supported");
      SourceLoc loc = peek().loc;
      std::string name = expect_ident("variable name");
      if (is("=")) fail(EK::Unsupported, peek().loc, "initializers are not supported");
      if (!is("[")) {
        if (prog_.find_array(name) || std::count(prog_.scalars.begin(), prog_.scalars.end(), name))
          fail(EK::Semantic, loc, "redeclaration of '" + name + "'");
        prog_.scalars.push_back(name);
        continue;
      }
      ArrayDecl d;
      d.name = name;
      while (accept("[")) {
        d.extents.push_back(parse_extent());
        expect("]");
      }
      add_array(std::move(d), loc);
    } while (accept(","));
    expect(";");
  }

  void parse_stmt(std::vector<Stmt>& out) {
    const Token& t = peek();
    if (accept(";")) return;
    if (is("{")) {
      next();
      parse_block_items(out, false);
      expect("}");
      return;
    }
    if (t.kind == Tok::Ident) {
      static const std::set<std::string> unsupported = {"while", "do", "goto", "switch", "break",
                                                        "continue", "return"};
      if (t.text == "for") return out.push_back(parse_for());
      if (t.text == "if") return out.push_back(parse_if());
      if (t.text == "return" && is(";", 1)) {
        next();
        next();
        return;
      }
      if (unsupported.count(t.text))
        fail(EK::Unsupported, t.loc, "'" + t.text + "' statements are outside the supported program class");
    }
    out.push_back(parse_assignment());
  }

  Stmt parse_for() {
    Stmt s;
    s.kind = Stmt::Kind::For;
    s.loc = next().loc;
    expect("(");
    if (accept("int")) {
      std::string name = peek().text;
      if (!std::count(prog_.scalars.begin(), prog_.scalars.end(), name) && !prog_.find_array(name))
        prog_.scalars.push_back(name);
    }
    SourceLoc iloc = peek().loc;
    s.iterator = expect_ident("loop iterator");
    if (!std::count(prog_.scalars.begin(), prog_.scalars.end(), s.iterator))
      fail(EK::Semantic, iloc, "loop iterator '" + s.iterator + "' is not a declared int variable");
    if (std::count(scope_.begin(), scope_.end(), s.iterator))
      fail(EK::Semantic, iloc, "loop iterator '" + s.iterator + "' is already bound by an enclosing loop");
    expect("=");
    s.init = to_affine(parse_expr(), Ctx::Bound);
    expect(";");

    scope_.push_back(s.iterator);
    SourceLoc cloc = peek().loc;
    s.cond = parse_cond(Ctx::Bound);
    expect(";");
    s.step = parse_step(s.iterator);
    expect(")");
    check_loop_cond(s.cond, s.iterator, s.step, cloc);

    ++loop_depth_;
    parse_stmt(s.body);
    --loop_depth_;
    scope_.pop_back();
    return s;
  }

  std::int64_t parse_step(const std::string& it) {
    SourceLoc loc = peek().loc;
    auto bad = [&]() -> std::int64_t {
      fail(EK::Unsupported, loc, "loop step must be a constant increment or decrement of '" + it + "'");
    };
    auto constant = [&]() { return to_affine(parse_unary(), Ctx::Constant).constant; };
    std::int64_t step = 0;
    if (accept("++") || accept("--")) {
      step = toks_[pos_ - 1].text == "++" ? 1 : -1;
      if (expect_ident("loop iterator") != it) bad();
    } else {
      if (expect_ident("loop iterator") != it) bad();
      if (accept("++")) step = 1;
      else if (accept("--")) step = -1;
      else if (accept("+=")) step = constant();
      else if (accept("-=")) step = -constant();
      else if (accept("=")) {
        if (expect_ident("loop iterator") != it) bad();
        if (accept("+")) step = constant();
        else if (accept("-")) step = -constant();
        else bad();
      } else {
        bad();
      }
    }
    if (step == 0) fail(EK::Unsupported, loc, "loop step must be non-zero");
    return step;
  }

  void check_loop_cond(const Condition& c, const std::string& it, std::int64_t step, SourceLoc loc) {
    if (c.kind == Condition::Kind::And) {
      for (const auto& k : c.children) check_loop_cond(k, it, step, loc);
      return;
    }
    bool ok = false;
    if (c.kind == Condition::Kind::Compare) {
      std::int64_t coeff = 0;
      switch (c.op) {
        case CmpOp::Lt:
        case CmpOp::Le: coeff = (c.rhs - c.lhs).coeff(it); break;
        case CmpOp::Gt:
        case CmpOp::Ge: coeff = (c.lhs - c.rhs).coeff(it); break;
        default: break;
      }
      // Expressed as e >= 0, the iterator must appear with sign opposite to the step.
      ok = coeff != 0 && ((step > 0) == (coeff < 0));
    }
    if (!ok)
      fail(EK::Unsupported, loc,
           "loop condition must be a conjunction of comparisons bounding '" + it + "' in the direction of the step");
  }

  Stmt parse_if() {
    Stmt s;
    s.kind = Stmt::Kind::If;
    s.loc = next().loc;
    expect("(");
    s.guard = parse_cond(Ctx::Guard);
    expect(")");
    parse_stmt(s.body);
    if (accept("else")) parse_stmt(s.else_body);
    return s;
  }

  Stmt parse_assignment() {
    Stmt s;
    s.kind = Stmt::Kind::Assign;
    s.loc = peek().loc;
    Assignment& a = s.assign;
    a.loc = s.loc;
    if (peek().kind == Tok::Ident && is(":", 1)) {
      SourceLoc lloc = peek().loc;
      a.label = next().text;
      next();
      if (!labels_.insert(a.label).second) fail(EK::Semantic, lloc, "duplicate statement label '" + a.label + "'");
      if (is("for") || is("if") || is("{"))
        fail(EK::Unsupported, lloc, "labels are only allowed on assignment statements");
      a.loc = peek().loc;
    }
    PExpr lhs = parse_unary();
    if (lhs.k == PExpr::K::Deref) fail(EK::Pointer, lhs.loc, "pointer dereference is not supported");
    if (lhs.k == PExpr::K::Name) {
      if (std::count(prog_.scalars.begin(), prog_.scalars.end(), lhs.name))
        fail(EK::Unsupported, lhs.loc, "assignment to scalar '" + lhs.name + "' is not supported");
      fail(EK::Semantic, lhs.loc, "assignment target '" + lhs.name + "' must be an indexed array");
    }
    if (lhs.k != PExpr::K::Index) fail(EK::Syntax, lhs.loc, "expected an array element on the left of '='");
    if (is("+=") || is("-=") || is("*=") || is("++") || is("--"))
      fail(EK::Unsupported, peek().loc, "compound assignment violates single assignment");
    expect("=");
    a.lhs = to_ref(lhs);
    a.rhs = to_value(parse_expr());
    expect(";");
    return s;
  }

  // --- conditions -----------------------------------------------------------

  Condition parse_cond(Ctx ctx) {
    Condition c = parse_and(ctx);
    if (!is("||")) return c;
    Condition o;
    o.kind = Condition::Kind::Or;
    o.children.push_back(std::move(c));
    while (accept("||")) o.children.push_back(parse_and(ctx));
    return o;
  }

  Condition parse_and(Ctx ctx) {
    Condition c = parse_not(ctx);
    if (!is("&&")) return c;
    Condition a;
    a.kind = Condition::Kind::And;
    a.children.push_back(std::move(c));
    while (accept("&&")) a.children.push_back(parse_not(ctx));
    return a;
  }

  Condition parse_not(Ctx ctx) {
    if (accept("!")) {
      Condition n;
      n.kind = Condition::Kind::Not;
      n.children.push_back(parse_not(ctx));
      return n;
    }
    if (is("(")) {
      std::size_t save = pos_;
      try {
        next();
        Condition c = parse_cond(ctx);
        expect(")");
        static const std::set<std::string> continues = {"<", "<=", ">", ">=", "==", "!=", "+", "-", "*", "/", "%"};
        if (!(peek().kind == Tok::Punct && continues.count(peek().text))) return c;
      } catch (const FrontendError& e) {
        if (e.kind() != EK::Syntax) throw;
      }
      pos_ = save;
    }
    return parse_compare(ctx);
  }

  Condition parse_compare(Ctx ctx) {
    PExpr l = parse_expr();
    static const std::map<std::string, CmpOp> ops = {{"<", CmpOp::Lt}, {"<=", CmpOp::Le}, {">", CmpOp::Gt},
                                                     {">=", CmpOp::Ge}, {"==", CmpOp::Eq}, {"!=", CmpOp::Ne}};
    auto it = peek().kind == Tok::Punct ? ops.find(peek().text) : ops.end();
    if (it == ops.end()) {
      reject_data(l, ctx);
      fail(EK::Syntax, peek().loc, "expected a comparison operator but found " + describe(peek()));
    }
    next();
    PExpr r = parse_expr();
    CmpOp op = it->second;

    Condition c;
    if (l.k == PExpr::K::Bin && l.name == "%" && (op == CmpOp::Eq || op == CmpOp::Ne)) {
      reject_data(l, ctx);
      std::int64_t m = to_affine(l.kids[1], Ctx::Constant).constant;
      std::int64_t rem = to_affine(r, Ctx::Constant).constant;
      if (m <= 0) fail(EK::Unsupported, l.loc, "modulus in a guard must be a positive constant");
      if (rem < 0 || rem >= m) fail(EK::Unsupported, r.loc, "remainder in a guard must lie in [0, modulus)");
      c.kind = Condition::Kind::Divisible;
      c.lhs = to_affine(l.kids[0], ctx);
      c.modulus = m;
      if (rem != 0) c.rhs = AffineExpr::of_constant(rem);
      if (op == CmpOp::Ne) {
        Condition n;
        n.kind = Condition::Kind::Not;
        n.children.push_back(std::move(c));
        return n;
      }
      return c;
    }
    c.kind = Condition::Kind::Compare;
    c.op = op;
    c.lhs = to_affine(l, ctx);
    c.rhs = to_affine(r, ctx);
    return c;
  }

  void reject_data(const PExpr& e, Ctx ctx) const {
    if (e.k == PExpr::K::Index || e.k == PExpr::K::Call) to_affine_const(e, ctx);
    for (const auto& k : e.kids) reject_data(k, ctx);
  }

  // --- expressions ----------------------------------------------------------

  PExpr parse_expr() {
    PExpr l = parse_term();
    while (is("+") || is("-")) {
      PExpr b;
      b.k = PExpr::K::Bin;
      b.loc = peek().loc;
      b.name = next().text;
      b.kids.push_back(std::move(l));
      b.kids.push_back(parse_term());
      l = std::move(b);
    }
    return l;
  }

  PExpr parse_term() {
    PExpr l = parse_unary();
    while (is("*") || is("/") || is("%")) {
      PExpr b;
      b.k = PExpr::K::Bin;
      b.loc = peek().loc;
      b.name = next().text;
      b.kids.push_back(std::move(l));
      b.kids.push_back(parse_unary());
      l = std::move(b);
    }
    return l;
  }

  PExpr parse_unary() {
    SourceLoc loc = peek().loc;
    auto wrap = [&](PExpr::K k) {
      PExpr e;
      e.k = k;
      e.loc = loc;
      e.kids.push_back(parse_unary());
      return e;
    };
    if (accept("-")) return wrap(PExpr::K::Neg);
    if (accept("+")) return parse_unary();
    if (accept("*")) return wrap(PExpr::K::Deref);
    if (accept("&")) return wrap(PExpr::K::Addr);
    return parse_primary();
  }

  PExpr parse_primary() {
    const Token& t = peek();
    PExpr e;
    e.loc = t.loc;
    if (t.kind == Tok::Number) {
      e.k = PExpr::K::Num;
      try {
        std::size_t used = 0;
        e.value = std::stoll(t.text, &used);
      } catch (const std::out_of_range&) {
        fail(EK::Semantic, t.loc, "integer literal out of range");
      }
      next();
      return e;
    }
    if (accept("(")) {
      PExpr inner = parse_expr();
      expect(")");
      return inner;
    }
    if (t.kind != Tok::Ident) fail(EK::Syntax, t.loc, "expected expression but found " + describe(t));
    e.name = next().text;
    if (is("->") || is(".")) fail(EK::Pointer, peek().loc, "member access through pointers or structs is not supported");
    if (accept("(")) {
      e.k = PExpr::K::Call;
      if (!is(")")) {
        do e.kids.push_back(parse_expr());
        while (accept(","));
      }
      expect(")");
      return e;
    }
    if (is("[")) {
      e.k = PExpr::K::Index;
      while (accept("[")) {
        e.kids.push_back(parse_expr());
        expect("]");
      }
      return e;
    }
    e.k = PExpr::K::Name;
    return e;
  }

  // --- conversions ----------------------------------------------------------

  [[noreturn]] void to_affine_const(const PExpr& e, Ctx ctx) const {
    std::string what = e.k == PExpr::K::Call ? "call to '" + e.name + "'" : "array '" + e.name + "'";
    switch (ctx) {
      case Ctx::Index: fail(EK::NonAffine, e.loc, "non-affine subscript: depends on " + what);
      case Ctx::Bound: fail(EK::DataDependent, e.loc, "data-dependent loop bound: depends on " + what);
      case Ctx::Guard: fail(EK::DataDependent, e.loc, "data-dependent guard: depends on " + what);
      case Ctx::Constant: break;
    }
    fail(EK::Semantic, e.loc, "expected a constant expression, found " + what);
  }

  AffineExpr to_affine(const PExpr& e, Ctx ctx) const {
    switch (e.k) {
      case PExpr::K::Num: return AffineExpr::of_constant(e.value);
      case PExpr::K::Name: {
        if (auto it = prog_.constants.find(e.name); it != prog_.constants.end()) return AffineExpr::of_constant(it->second);
        if (ctx != Ctx::Constant && std::count(scope_.begin(), scope_.end(), e.name)) return AffineExpr::of_var(e.name);
        if (std::count(prog_.scalars.begin(), prog_.scalars.end(), e.name)) {
          if (ctx == Ctx::Constant) fail(EK::Semantic, e.loc, "expected a constant expression, found '" + e.name + "'");
          fail(EK::Semantic, e.loc, "'" + e.name + "' is used outside a loop that binds it");
        }
        if (prog_.find_array(e.name)) fail(EK::Semantic, e.loc, "array '" + e.name + "' used without subscript");
        fail(EK::Semantic, e.loc, "undeclared identifier '" + e.name + "'");
      }
      case PExpr::K::Index:
      case PExpr::K::Call: to_affine_const(e, ctx);
      case PExpr::K::Deref:
      case PExpr::K::Addr: fail(EK::Pointer, e.loc, "pointer operations are not supported");
      case PExpr::K::Neg: {
        AffineExpr a = to_affine(e.kids[0], ctx);
        a *= -1;
        return a;
      }
      case PExpr::K::Bin: break;
    }
    AffineExpr l = to_affine(e.kids[0], ctx);
    AffineExpr r = to_affine(e.kids[1], ctx);
    const std::string& op = e.name;
    auto sum = [&](AffineExpr a, const AffineExpr& b, bool minus) {
      Arith op = minus ? Arith::Sub : Arith::Add;
      for (const auto& [name, c] : b.terms) {
        std::int64_t& slot = a.terms[name];
        slot = checked(op, slot, c, file_, e.loc);
        if (slot == 0) a.terms.erase(name);
      }
      a.constant = checked(op, a.constant, b.constant, file_, e.loc);
      return a;
    };
    if (op == "+") return sum(std::move(l), r, false);
    if (op == "-") return sum(std::move(l), r, true);
    if (op == "*") {
      if (!l.is_constant() && !r.is_constant())
        fail(EK::NonAffine, e.loc, "non-affine expression: product of two iterator terms");
      const AffineExpr& k = l.is_constant() ? l : r;
      AffineExpr x = l.is_constant() ? r : l;
      for (auto& [name, c] : x.terms) c = checked(Arith::Mul, c, k.constant, file_, e.loc);
      x.constant = checked(Arith::Mul, x.constant, k.constant, file_, e.loc);
      std::erase_if(x.terms, [](const auto& kv) { return kv.second == 0; });
      return x;
    }
    // '/' and '%' only between constants.
    if (!l.is_constant() || !r.is_constant())
      fail(EK::NonAffine, e.loc, "non-affine expression: '" + op + "' applied to a loop iterator");
    if (r.constant == 0) fail(EK::Semantic, e.loc, "division by zero");
    return AffineExpr::of_constant(op == "/" ? l.constant / r.constant : l.constant % r.constant);
  }

  ArrayRef to_ref(const PExpr& e) const {
    const ArrayDecl* d = prog_.find_array(e.name);
    if (!d) {
      if (std::count(prog_.scalars.begin(), prog_.scalars.end(), e.name))
        fail(EK::Semantic, e.loc, "'" + e.name + "' is not an array");
      fail(EK::Semantic, e.loc, "undeclared array '" + e.name + "'");
    }
    if (d->extents.size() != e.kids.size())
      fail(EK::Semantic, e.loc,
           "array '" + e.name + "' has " + std::to_string(d->extents.size()) + " dimension(s) but is indexed with " +
               std::to_string(e.kids.size()));
    ArrayRef r;
    r.array = e.name;
    r.loc = e.loc;
    for (const auto& k : e.kids) r.indices.push_back(to_affine(k, Ctx::Index));
    return r;
  }

  Expr to_value(const PExpr& e) {
    Expr out;
    switch (e.k) {
      case PExpr::K::Num: out = Expr::constant(e.value); break;
      case PExpr::K::Index: out = Expr::read(to_ref(e)); break;
      case PExpr::K::Name:
        if (auto it = prog_.constants.find(e.name); it != prog_.constants.end()) {
          out = Expr::constant(it->second);
          break;
        }
        if (std::count(scope_.begin(), scope_.end(), e.name))
          fail(EK::Unsupported, e.loc, "loop iterator '" + e.name + "' used as a value");
        if (prog_.find_array(e.name)) fail(EK::Semantic, e.loc, "array '" + e.name + "' used without subscript");
        fail(EK::Semantic, e.loc, "undeclared identifier '" + e.name + "'");
      case PExpr::K::Deref:
      case PExpr::K::Addr: fail(EK::Pointer, e.loc, "pointer dereference is not supported");
      case PExpr::K::Neg:
        if (e.kids[0].k == PExpr::K::Num) {
          out = Expr::constant(-e.kids[0].value);
        } else {
          out = Expr::apply("neg", {to_value(e.kids[0])});
        }
        break;
      case PExpr::K::Bin:
        if (e.name == "/" || e.name == "%")
          fail(EK::Unsupported, e.loc, "operator '" + e.name + "' is not supported in value expressions");
        out = Expr::apply(e.name, {to_value(e.kids[0]), to_value(e.kids[1])});
        break;
      case PExpr::K::Call: {
        const OperatorInfo* info = prog_.operators.find(e.name);
        int arity = static_cast<int>(e.kids.size());
        if (!info) {
          OperatorInfo fresh;
          fresh.symbol = e.name;
          fresh.arity = arity;
          prog_.operators.declare(fresh);
        } else if (info->builtin) {
          fail(EK::Semantic, e.loc, "'" + e.name + "' is an operator, not a function");
        } else if (info->arity != arity) {
          fail(EK::Semantic, e.loc,
               "function '" + e.name + "' takes " + std::to_string(info->arity) + " argument(s), given " +
                   std::to_string(arity));
        }
        if (arity == 0) fail(EK::Unsupported, e.loc, "nullary function calls are not supported");
        std::vector<Expr> args;
        for (const auto& k : e.kids) args.push_back(to_value(k));
        out = Expr::apply(e.name, std::move(args));
        break;
      }
    }
    out.loc = e.loc;
    return out;
  }

  // --- post-processing ------------------------------------------------------

  void finish() {
    std::set<std::string> written;
    int counter = 0;
    auto walk = [&](auto&& self, std::vector<Stmt>& body) -> void {
      for (auto& s : body) {
        if (s.kind == Stmt::Kind::Assign) {
          written.insert(s.assign.lhs.array);
          if (s.assign.label.empty()) {
            std::string l;
            do l = "S" + std::to_string(++counter);
            while (labels_.count(l));
            labels_.insert(l);
            s.assign.label = l;
          }
        }
        self(self, s.body);
        self(self, s.else_body);
      }
    };
    walk(walk, prog_.body);
    for (auto& d : prog_.arrays) {
      if (!d.is_param) continue;
      bool w = written.count(d.name) > 0;
      if (w && d.is_const) fail(EK::Semantic, SourceLoc{1, 1}, "const parameter '" + d.name + "' is written");
      d.role = w ? ArrayRole::Output : ArrayRole::Input;
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_limit_ = 0;
  Token end_tok_{Tok::End, "", {}};
  std::string file_;
  const ConstantOverrides& overrides_;
  Program prog_;
  std::vector<std::string> scope_;
  std::set<std::string> labels_;
  int loop_depth_ = 0;
};

}  // namespace

Program parse_program(std::string_view source, const std::string& file, const ConstantOverrides& overrides) {
  return Parser(detail::tokenize(source, file), file, overrides).run();
}

Program parse_program_file(const std::string& path, const ConstantOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str(), path, overrides);
}

}  // namespace eqcheck
