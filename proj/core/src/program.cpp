#include <algorithm>
#include <sstream>

#include "eqcheck/program.hpp"

namespace eqcheck {

// --- AffineExpr ---------------------------------------------------------------

AffineExpr AffineExpr::of_constant(std::int64_t c) {
  AffineExpr e;
  e.constant = c;
  return e;
}

AffineExpr AffineExpr::of_var(const std::string& name, std::int64_t coeff) {
  AffineExpr e;
  if (coeff != 0) e.terms[name] = coeff;
  return e;
}

std::int64_t AffineExpr::coeff(const std::string& name) const {
  auto it = terms.find(name);
  return it == terms.end() ? 0 : it->second;
}

bool AffineExpr::is_constant() const {
  return std::all_of(terms.begin(), terms.end(), [](const auto& kv) { return kv.second == 0; });
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
  for (const auto& [n, c] : o.terms) {
    if ((terms[n] += c) == 0) terms.erase(n);
  }
  constant += o.constant;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) {
  for (const auto& [n, c] : o.terms) {
    if ((terms[n] -= c) == 0) terms.erase(n);
  }
  constant -= o.constant;
  return *this;
}

AffineExpr& AffineExpr::operator*=(std::int64_t k) {
  if (k == 0) terms.clear();
  for (auto& [n, c] : terms) c *= k;
  constant *= k;
  return *this;
}

bool AffineExpr::operator==(const AffineExpr& o) const {
  if (constant != o.constant) return false;
  auto nonzero = [](const AffineExpr& e) {
    std::map<std::string, std::int64_t> m;
    for (const auto& [n, c] : e.terms)
      if (c != 0) m[n] = c;
    return m;
  };
  return nonzero(*this) == nonzero(o);
}

LinearExpr AffineExpr::lower(const std::vector<std::string>& vars) const {
  LinearExpr e(vars.size());
  for (const auto& [n, c] : terms) {
    if (c == 0) continue;
    auto it = std::find(vars.begin(), vars.end(), n);
    if (it == vars.end()) throw ContractError("affine term '" + n + "' is not among the bound iterators");
    e.coeffs[static_cast<std::size_t>(it - vars.begin())] += Int(static_cast<long>(c));
  }
  e.constant = Int(static_cast<long>(constant));
  return e;
}

std::int64_t AffineExpr::evaluate(const std::map<std::string, std::int64_t>& env) const {
  std::int64_t v = constant;
  for (const auto& [n, c] : terms) v += c * env.at(n);
  return v;
}

std::string AffineExpr::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [n, c] : terms) {
    if (c == 0) continue;
    std::int64_t mag = c < 0 ? -c : c;
    if (first) os << (c < 0 ? "-" : "");
    else os << (c < 0 ? " - " : " + ");
    if (mag != 1) os << mag << "*";
    os << n;
    first = false;
  }
  if (first) {
    os << constant;
  } else if (constant != 0) {
    os << (constant < 0 ? " - " : " + ") << (constant < 0 ? -constant : constant);
  }
  return os.str();
}

// --- Condition ----------------------------------------------------------------

namespace {

std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

IntRelation single(const std::vector<std::string>& vars, auto&& fill) {
  Conjunct c(vars.size(), 0);
  fill(c);
  IntRelation r(Space(vars), Space{});
  r.add_conjunct(std::move(c));
  return r;
}

}  // namespace

bool Condition::evaluate(const std::map<std::string, std::int64_t>& env) const {
  switch (kind) {
    case Kind::Compare: {
      std::int64_t l = lhs.evaluate(env), r = rhs.evaluate(env);
      switch (op) {
        case CmpOp::Lt: return l < r;
        case CmpOp::Le: return l <= r;
        case CmpOp::Gt: return l > r;
        case CmpOp::Ge: return l >= r;
        case CmpOp::Eq: return l == r;
        case CmpOp::Ne: return l != r;
      }
      return false;
    }
    case Kind::Divisible: return mod_floor(lhs.evaluate(env) - rhs.evaluate(env), modulus) == 0;
    case Kind::And:
      return std::all_of(children.begin(), children.end(), [&](const Condition& c) { return c.evaluate(env); });
    case Kind::Or:
      return std::any_of(children.begin(), children.end(), [&](const Condition& c) { return c.evaluate(env); });
    case Kind::Not: return !children.front().evaluate(env);
  }
  return false;
}

IntRelation Condition::to_set(const std::vector<std::string>& vars) const {
  switch (kind) {
    case Kind::Compare: {
      LinearExpr d = rhs.lower(vars) - lhs.lower(vars);  // rhs - lhs
      LinearExpr one = LinearExpr::constant_expr(vars.size(), 1);
      switch (op) {
        case CmpOp::Lt: return single(vars, [&](Conjunct& c) { c.add_inequality(d - one); });
        case CmpOp::Le: return single(vars, [&](Conjunct& c) { c.add_inequality(d); });
        case CmpOp::Gt: return single(vars, [&](Conjunct& c) { c.add_inequality(-d - one); });
        case CmpOp::Ge: return single(vars, [&](Conjunct& c) { c.add_inequality(-d); });
        case CmpOp::Eq: return single(vars, [&](Conjunct& c) { c.add_equality(d); });
        case CmpOp::Ne:
          return unite(single(vars, [&](Conjunct& c) { c.add_inequality(d - one); }),
                       single(vars, [&](Conjunct& c) { c.add_inequality(-d - one); }));
      }
      break;
    }
    case Kind::Divisible:
      return single(vars, [&](Conjunct& c) {
        c.add_congruence(lhs.lower(vars) - rhs.lower(vars), Int(static_cast<long>(modulus)));
      });
    case Kind::And: {
      IntRelation r = IntRelation::universe_set(Space(vars));
      for (const auto& ch : children) r = intersect(r, ch.to_set(vars));
      return r;
    }
    case Kind::Or: {
      IntRelation r = IntRelation::empty_set(Space(vars));
      for (const auto& ch : children) r = unite(r, ch.to_set(vars));
      return r;
    }
    case Kind::Not: return difference(IntRelation::universe_set(Space(vars)), children.front().to_set(vars));
  }
  throw ContractError("malformed condition");
}

std::string Condition::to_string() const {
  auto child = [](const Condition& c) {
    bool compound = c.kind == Kind::And || c.kind == Kind::Or || c.kind == Kind::Not;
    return compound ? "(" + c.to_string() + ")" : c.to_string();
  };
  switch (kind) {
    case Kind::Compare: return lhs.to_string() + " " + cmp_text(op) + " " + rhs.to_string();
    case Kind::Divisible:
      return "(" + lhs.to_string() + ") % " + std::to_string(modulus) + " == " + rhs.to_string();
    case Kind::Not: {
      const Condition& c = children.front();
      return "!(" + c.to_string() + ")";
    }
    case Kind::And:
    case Kind::Or: {
      std::string out;
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) out += kind == Kind::And ? " && " : " || ";
        out += child(children[i]);
      }
      return out;
    }
  }
  return "";
}

// --- ArrayRef / Expr ----------------------------------------------------------

std::string ArrayRef::to_string() const {
  std::string out = array;
  for (const auto& i : indices) out += "[" + i.to_string() + "]";
  return out;
}

Expr Expr::read(ArrayRef r) {
  Expr e;
  e.kind = Kind::Read;
  e.loc = r.loc;
  e.ref = std::move(r);
  return e;
}

Expr Expr::constant(std::int64_t v) {
  Expr e;
  e.kind = Kind::Constant;
  e.value = v;
  return e;
}

Expr Expr::apply(std::string op, std::vector<Expr> args) {
  Expr e;
  e.kind = Kind::Apply;
  e.op = std::move(op);
  e.args = std::move(args);
  return e;
}

namespace {

bool is_infix(const std::string& op) { return op == "+" || op == "-" || op == "*"; }

}  // namespace

std::string Expr::to_string() const {
  switch (kind) {
    case Kind::Read: return ref.to_string();
    case Kind::Constant: return std::to_string(value);
    case Kind::Apply: break;
  }
  auto operand = [](const Expr& e) {
    bool wrap = (e.kind == Kind::Apply && (is_infix(e.op) || e.op == "neg")) || (e.kind == Kind::Constant && e.value < 0);
    return wrap ? "(" + e.to_string() + ")" : e.to_string();
  };
  if (is_infix(op) && args.size() == 2) return operand(args[0]) + " " + op + " " + operand(args[1]);
  if (op == "neg" && args.size() == 1) return "-" + operand(args[0]);
  std::string out = op + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i].to_string();
  }
  return out + ")";
}

// --- OperatorTable --------------------------------------------------------------

OperatorTable OperatorTable::with_builtins() {
  OperatorTable t;
  t.declare({"+", 2, true, true, true});
  t.declare({"*", 2, true, true, true});
  t.declare({"-", 2, false, false, true});
  t.declare({"neg", 1, false, false, true});
  return t;
}

const OperatorInfo* OperatorTable::find(const std::string& symbol) const {
  auto it = ops_.find(symbol);
  return it == ops_.end() ? nullptr : &it->second;
}

void OperatorTable::declare(OperatorInfo info) { ops_[info.symbol] = std::move(info); }

// --- Program --------------------------------------------------------------------

const ArrayDecl* Program::find_array(const std::string& n) const {
  for (const auto& a : arrays)
    if (a.name == n) return &a;
  return nullptr;
}

std::vector<std::string> Program::inputs() const {
  std::vector<std::string> out;
  for (const auto& a : arrays)
    if (a.role == ArrayRole::Input) out.push_back(a.name);
  return out;
}

std::vector<std::string> Program::outputs() const {
  std::vector<std::string> out;
  for (const auto& a : arrays)
    if (a.role == ArrayRole::Output) out.push_back(a.name);
  return out;
}

namespace {

void print_body(std::ostringstream& os, const std::vector<Stmt>& body, int indent);

void print_stmt(std::ostringstream& os, const Stmt& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case Stmt::Kind::Assign:
      os << pad << s.assign.label << ": " << s.assign.lhs.to_string() << " = " << s.assign.rhs.to_string() << ";\n";
      return;
    case Stmt::Kind::For: {
      os << pad << "for (" << s.iterator << " = " << s.init.to_string() << "; " << s.cond.to_string() << "; ";
      if (s.step == 1) os << s.iterator << "++";
      else if (s.step == -1) os << s.iterator << "--";
      else if (s.step > 0) os << s.iterator << " += " << s.step;
      else os << s.iterator << " -= " << -s.step;
      os << ") {\n";
      print_body(os, s.body, indent + 1);
      os << pad << "}\n";
      return;
    }
    case Stmt::Kind::If:
      os << pad << "if (" << s.guard.to_string() << ") {\n";
      print_body(os, s.body, indent + 1);
      os << pad << "}";
      if (!s.else_body.empty()) {
        os << " else {\n";
        print_body(os, s.else_body, indent + 1);
        os << pad << "}";
      }
      os << "\n";
      return;
  }
}

void print_body(std::ostringstream& os, const std::vector<Stmt>& body, int indent) {
  for (const auto& s : body) print_stmt(os, s, indent);
}

std::string print_decl(const ArrayDecl& d) {
  std::string out = d.name;
  for (const auto& e : d.extents) out += e ? "[" + std::to_string(*e) + "]" : "[]";
  return out;
}

}  // namespace

std::string Program::to_source() const {
  std::ostringstream os;
  for (const auto& [sym, info] : operators.all()) {
    if (info.builtin) continue;
    if (info.associative || info.commutative) {
      os << "/*@";
      if (info.associative) os << " assoc";
      if (info.commutative) os << " comm";
      os << " */\n";
    }
    os << "int " << sym << "(";
    for (int i = 0; i < info.arity; ++i) os << (i ? ", int" : "int");
    os << ");\n";
  }
  os << "void " << name << "(";
  bool first = true;
  for (const auto& a : arrays) {
    if (!a.is_param) continue;
    os << (first ? "" : ", ") << (a.is_const ? "const int " : "int ") << print_decl(a);
    first = false;
  }
  os << ") {\n";
  if (!scalars.empty()) {
    os << "  int ";
    for (std::size_t i = 0; i < scalars.size(); ++i) os << (i ? ", " : "") << scalars[i];
    os << ";\n";
  }
  for (const auto& a : arrays)
    if (!a.is_param) os << "  int " << print_decl(a) << ";\n";
  print_body(os, body, 1);
  os << "}\n";
  return os.str();
}

// --- statement context ------------------------------------------------------------

IntRelation StatementInfo::access(const ArrayRef& ref) const {
  std::size_t n = iterators.size(), d = ref.indices.size();
  std::vector<std::string> vars = iterators;
  Conjunct c(n + d, 0);
  for (std::size_t j = 0; j < d; ++j) {
    LinearExpr idx = ref.indices[j].lower(vars);
    LinearExpr e(n + d);
    for (std::size_t v = 0; v < n; ++v) e.coeffs[v] = idx.coeffs[v];
    e.constant = idx.constant;
    e.coeffs[n + j] = -1;
    c.add_equality(std::move(e));
  }
  IntRelation r(Space(iterators), Space::anonymous(d));
  r.add_conjunct(std::move(c));
  return restrict_domain(r, domain);
}

namespace {

struct Scope {
  std::vector<std::string> iterators;
  std::vector<const Stmt*> loops;
  std::vector<int> directions;
  std::vector<int> positions;
  // Guards in effect: condition and whether it is negated (else-branch).
  std::vector<std::pair<const Condition*, bool>> guards;
};

IntRelation loop_set(const Stmt& loop, const std::vector<std::string>& vars, std::size_t level) {
  IntRelation r = loop.cond.to_set(vars);
  std::size_t n = vars.size();
  LinearExpr k = LinearExpr::var(n, level);
  LinearExpr lb = loop.init.lower(vars);
  Conjunct c(n, 0);
  c.add_inequality(loop.step > 0 ? k - lb : lb - k);
  std::int64_t s = loop.step < 0 ? -loop.step : loop.step;
  if (s > 1) c.add_congruence(k - lb, Int(static_cast<long>(s)));
  IntRelation b(Space(vars), Space{});
  b.add_conjunct(std::move(c));
  return intersect(r, b);
}

void collect(const std::vector<Stmt>& body, Scope& scope, int& counter, std::vector<StatementInfo>& out) {
  for (const auto& s : body) {
    int id = counter++;
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        StatementInfo info;
        info.assign = &s.assign;
        info.label = s.assign.label;
        info.index = out.size();
        info.iterators = scope.iterators;
        info.loops = scope.loops;
        info.directions = scope.directions;
        info.positions = scope.positions;
        info.positions.push_back(id);
        const auto& vars = scope.iterators;
        IntRelation dom = IntRelation::universe_set(Space(vars));
        for (std::size_t l = 0; l < scope.loops.size(); ++l) dom = intersect(dom, loop_set(*scope.loops[l], vars, l));
        for (const auto& [cond, negated] : scope.guards) {
          IntRelation g = cond->to_set(vars);
          dom = negated ? difference(dom, g) : intersect(dom, g);
        }
        info.domain = simplify(dom).with_names(Space(vars), Space{});
        out.push_back(std::move(info));
        break;
      }
      case Stmt::Kind::For: {
        scope.iterators.push_back(s.iterator);
        scope.loops.push_back(&s);
        scope.directions.push_back(s.step > 0 ? 1 : -1);
        scope.positions.push_back(id);
        collect(s.body, scope, counter, out);
        scope.iterators.pop_back();
        scope.loops.pop_back();
        scope.directions.pop_back();
        scope.positions.pop_back();
        break;
      }
      case Stmt::Kind::If: {
        scope.guards.push_back({&s.guard, false});
        collect(s.body, scope, counter, out);
        scope.guards.back().second = true;
        collect(s.else_body, scope, counter, out);
        scope.guards.pop_back();
        break;
      }
    }
  }
}

}  // namespace

std::vector<StatementInfo> collect_statements(const Program& p) {
  std::vector<StatementInfo> out;
  Scope scope;
  int counter = 0;
  collect(p.body, scope, counter, out);
  return out;
}

namespace {

void gather_reads(const Expr& e, std::vector<const ArrayRef*>& out) {
  if (e.kind == Expr::Kind::Read) out.push_back(&e.ref);
  for (const auto& a : e.args) gather_reads(a, out);
}

}  // namespace

std::vector<const ArrayRef*> reads_of(const Expr& e) {
  std::vector<const ArrayRef*> out;
  gather_reads(e, out);
  return out;
}

}  // namespace eqcheck
