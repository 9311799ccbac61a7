// Set-builder rendering and parsing: {[x] -> [2x] | 0 <= x <= 1022 and x mod 2 = 0}

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "eqcheck/relation.hpp"
#include "solver.hpp"

namespace eqcheck {

namespace {

std::vector<std::string> display_names(const Space& s, const std::string& base,
                                       std::vector<std::string>& taken) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.arity(); ++i) {
    std::string n = s.names[i];
    if (n.empty() || std::find(taken.begin(), taken.end(), n) != taken.end()) {
      n = s.arity() == 1 ? base : base + std::to_string(i);
      while (std::find(taken.begin(), taken.end(), n) != taken.end()) n += "'";
    }
    taken.push_back(n);
    out.push_back(n);
  }
  return out;
}

void append_term(std::ostringstream& os, bool& first, const Int& coeff, const std::string& name) {
  if (coeff == 0) return;
  Int mag = abs(coeff);
  if (first) {
    if (coeff < 0) os << "-";
  } else {
    os << (coeff < 0 ? " - " : " + ");
  }
  if (mag != 1) os << mag.get_str();
  os << name;
  first = false;
}

// Renders sum(coeffs * names) + constant; positive == true keeps signs,
// the caller decides which side each term goes to.
std::string render_linear(const std::vector<Int>& coeffs, const Int& constant,
                          const std::vector<std::string>& names) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < coeffs.size(); ++i) append_term(os, first, coeffs[i], names[i]);
  if (constant != 0 || first) {
    if (first) {
      os << constant.get_str();
    } else {
      os << (constant < 0 ? " - " : " + ") << Int(abs(constant)).get_str();
    }
  }
  return os.str();
}

// Splits e into (positive part, negated negative part) so that e >= 0 reads
// as pos >= neg.
std::pair<std::string, std::string> sides(const LinearExpr& e, const std::vector<std::string>& names) {
  std::vector<Int> pos(e.size()), neg(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e.coeffs[i] > 0) pos[i] = e.coeffs[i];
    if (e.coeffs[i] < 0) neg[i] = -e.coeffs[i];
  }
  Int pc = e.constant > 0 ? e.constant : Int(0);
  Int nc = e.constant < 0 ? Int(-e.constant) : Int(0);
  return {render_linear(pos, pc, names), render_linear(neg, nc, names)};
}

std::string render_conjunct(const Conjunct& c, std::size_t in_arity, std::size_t out_arity,
                            const std::vector<std::string>& in_names,
                            const std::vector<std::string>& out_names, bool fold_outputs) {
  std::vector<std::string> names = in_names;
  names.insert(names.end(), out_names.begin(), out_names.end());
  for (std::size_t e = 0; e < c.num_exists(); ++e) names.push_back("_e" + std::to_string(e));

  std::vector<bool> eq_used(c.equalities().size(), false);
  std::vector<std::string> out_tuple = out_names;
  if (fold_outputs) {
    for (std::size_t j = 0; j < out_arity; ++j) {
      const std::size_t col = in_arity + j;
      for (std::size_t k = 0; k < c.equalities().size(); ++k) {
        if (eq_used[k]) continue;
        const auto& e = c.equalities()[k];
        if (abs(e.coeffs[col]) != 1) continue;
        bool clean = true;
        for (std::size_t v = in_arity; v < e.size(); ++v) {
          if (v != col && e.coeffs[v] != 0) clean = false;
        }
        if (!clean) continue;
        const Int a = e.coeffs[col];
        std::vector<Int> f(in_arity);
        for (std::size_t v = 0; v < in_arity; ++v) f[v] = -a * e.coeffs[v];
        std::vector<std::string> in_only(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(in_arity));
        out_tuple[j] = render_linear(f, -a * e.constant, in_only);
        eq_used[k] = true;
        break;
      }
    }
    // An output name that was folded away must not appear elsewhere.
    for (std::size_t j = 0; j < out_arity; ++j) {
      if (out_tuple[j] == out_names[j]) continue;
      const std::size_t col = in_arity + j;
      bool referenced = false;
      for (std::size_t k = 0; k < c.equalities().size(); ++k) {
        if (!eq_used[k] && c.equalities()[k].coeffs[col] != 0) referenced = true;
      }
      for (const auto& e : c.inequalities()) referenced |= e.coeffs[col] != 0;
      for (const auto& cg : c.congruences()) referenced |= cg.expr.coeffs[col] != 0;
      if (referenced) {
        // Fall back to the plain name and keep the equality.
        out_tuple[j] = out_names[j];
        for (std::size_t k = 0; k < c.equalities().size(); ++k) {
          const auto& e = c.equalities()[k];
          if (eq_used[k] && abs(e.coeffs[col]) == 1) {
            eq_used[k] = false;
            break;
          }
        }
      }
    }
  }

  std::vector<std::string> atoms;
  // Single-variable bounds become chains.
  std::map<std::size_t, std::pair<std::optional<Int>, std::optional<Int>>> bounds;
  std::vector<const LinearExpr*> general;
  for (const auto& e : c.inequalities()) {
    std::size_t nz = 0, var = 0;
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e.coeffs[v] != 0) {
        ++nz;
        var = v;
      }
    }
    if (nz == 1 && abs(e.coeffs[var]) == 1) {
      auto& b = bounds[var];
      if (e.coeffs[var] > 0) {
        Int lo = -e.constant;
        if (!b.first || lo > *b.first) b.first = lo;
      } else {
        Int hi = e.constant;
        if (!b.second || hi < *b.second) b.second = hi;
      }
    } else {
      general.push_back(&e);
    }
  }
  for (const auto& [var, b] : bounds) {
    std::ostringstream os;
    if (b.first && b.second && *b.first == *b.second) {
      os << names[var] << " = " << b.first->get_str();
    } else {
      if (b.first) os << b.first->get_str() << " <= ";
      os << names[var];
      if (b.second) os << " <= " << b.second->get_str();
    }
    atoms.push_back(os.str());
  }
  for (std::size_t k = 0; k < c.equalities().size(); ++k) {
    if (eq_used[k]) continue;
    auto [l, r] = sides(c.equalities()[k], names);
    atoms.push_back(l + " = " + r);
  }
  for (const auto* e : general) {
    auto [l, r] = sides(*e, names);
    atoms.push_back(l + " >= " + r);
  }
  for (const auto& cg : c.congruences()) {
    LinearExpr lin = cg.expr;
    Int residue = detail::mod_floor(-lin.constant, cg.modulus);
    lin.constant = 0;
    atoms.push_back(render_linear(lin.coeffs, 0, names) + " mod " + cg.modulus.get_str() + " = " +
                    residue.get_str());
  }

  std::ostringstream os;
  os << "{[";
  for (std::size_t i = 0; i < in_arity; ++i) os << (i ? ", " : "") << in_names[i];
  os << "]";
  if (out_arity > 0) {
    os << " -> [";
    for (std::size_t j = 0; j < out_arity; ++j) os << (j ? ", " : "") << out_tuple[j];
    os << "]";
  }
  if (!atoms.empty() || c.num_exists() > 0) {
    os << " | ";
    if (c.num_exists() > 0) {
      os << "exists ";
      for (std::size_t e = 0; e < c.num_exists(); ++e) os << (e ? ", " : "") << "_e" << e;
      os << " : ";
    }
    if (atoms.empty()) atoms.push_back("true");
    for (std::size_t i = 0; i < atoms.size(); ++i) os << (i ? " and " : "") << atoms[i];
  }
  os << "}";
  return os.str();
}

std::string render(const IntRelation& r, bool fold_outputs) {
  std::vector<std::string> taken;
  auto in_names = display_names(r.in_space(), "x", taken);
  auto out_names = display_names(r.out_space(), "y", taken);
  if (r.conjuncts().empty()) {
    std::ostringstream os;
    os << "{[";
    for (std::size_t i = 0; i < in_names.size(); ++i) os << (i ? ", " : "") << in_names[i];
    os << "]";
    if (!r.is_set()) {
      os << " -> [";
      for (std::size_t j = 0; j < out_names.size(); ++j) os << (j ? ", " : "") << out_names[j];
      os << "]";
    }
    os << " | false}";
    return os.str();
  }
  std::string out;
  for (std::size_t i = 0; i < r.conjuncts().size(); ++i) {
    if (i) out += " union ";
    out += render_conjunct(r.conjuncts()[i], r.in_arity(), r.out_arity(), in_names, out_names, fold_outputs);
  }
  return out;
}

// Canonical ordering of constraints for hashing.
Conjunct sorted_copy(const Conjunct& c) {
  Conjunct s = c;
  detail::normalize(s);
  auto key = [](const LinearExpr& e) {
    std::string k;
    for (const auto& x : e.coeffs) k += x.get_str() + ",";
    return k + "|" + e.constant.get_str();
  };
  auto by_key = [&](const LinearExpr& a, const LinearExpr& b) { return key(a) < key(b); };
  std::sort(s.mutable_equalities().begin(), s.mutable_equalities().end(), by_key);
  std::sort(s.mutable_inequalities().begin(), s.mutable_inequalities().end(), by_key);
  std::sort(s.mutable_congruences().begin(), s.mutable_congruences().end(),
            [&](const Congruence& a, const Congruence& b) {
              return std::make_pair(a.modulus.get_str(), key(a.expr)) <
                     std::make_pair(b.modulus.get_str(), key(b.expr));
            });
  return s;
}

}  // namespace

std::string IntRelation::to_string() const { return render(simplify(*this), true); }

std::string IntRelation::canonical() const {
  IntRelation anon(Space::anonymous(in_arity()), Space::anonymous(out_arity()));
  std::vector<std::string> rendered;
  for (const auto& c : conjuncts_) {
    IntRelation one(Space::anonymous(in_arity()), Space::anonymous(out_arity()));
    one.add_conjunct(sorted_copy(c));
    rendered.push_back(render(one, false));
  }
  std::sort(rendered.begin(), rendered.end());
  rendered.erase(std::unique(rendered.begin(), rendered.end()), rendered.end());
  std::string out = "[" + std::to_string(in_arity()) + "->" + std::to_string(out_arity()) + "]";
  for (const auto& s : rendered) out += s;
  return out;
}

// --- parser ---------------------------------------------------------------------

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view s) {
  static const std::vector<std::pair<std::string, std::string>> unicode = {
      {"\xe2\x86\x92", "->"}, {"\xe2\x88\xa7", "and"}, {"\xe2\x88\xa8", "or"},
      {"\xe2\x89\xa4", "<="}, {"\xe2\x89\xa5", ">="},  {"\xe2\x88\xaa", "union"},
      {"\xe2\x88\x83", "exists"}};
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char ch = static_cast<unsigned char>(s[i]);
    if (std::isspace(ch)) {
      ++i;
      continue;
    }
    if (ch >= 0x80) {
      bool matched = false;
      for (const auto& [utf, ascii] : unicode) {
        if (s.substr(i, utf.size()) == utf) {
          bool word = std::isalpha(static_cast<unsigned char>(ascii[0]));
          out.push_back({word ? Tok::Ident : Tok::Punct, ascii, i});
          i += utf.size();
          matched = true;
          break;
        }
      }
      if (!matched) throw RelationParseError("unexpected character", i);
      continue;
    }
    if (std::isalpha(ch) || ch == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\'')) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), i});
      i = j;
      continue;
    }
    if (std::isdigit(ch)) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Number, std::string(s.substr(i, j - i)), i});
      i = j;
      continue;
    }
    static const char* two[] = {"->", "<=", ">=", "==", "&&", "||", "!="};
    bool matched = false;
    for (const char* t : two) {
      if (s.substr(i, 2) == t) {
        out.push_back({Tok::Punct, t, i});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("{}[](),|:+-*<>=%").find(static_cast<char>(ch)) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, static_cast<char>(ch)), i});
      ++i;
      continue;
    }
    throw RelationParseError(std::string("unexpected character '") + static_cast<char>(ch) + "'", i);
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

// Affine expression over named variables.
struct Affine {
  std::map<std::string, Int> terms;
  Int constant = 0;
  bool is_constant() const {
    for (const auto& [n, c] : terms) {
      if (c != 0) return false;
    }
    return true;
  }
  Affine& operator+=(const Affine& o) {
    for (const auto& [n, c] : o.terms) terms[n] += c;
    constant += o.constant;
    return *this;
  }
  Affine& scale(const Int& k) {
    for (auto& [n, c] : terms) c *= k;
    constant *= k;
    return *this;
  }
};

struct Atom {
  enum Kind { Eq, Ge, Cong, False } kind;
  Affine expr;  // expr = 0, expr >= 0, expr = 0 mod m
  Int modulus;
};

struct Clause {
  std::vector<std::string> exists;
  std::vector<Atom> atoms;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  IntRelation parse_all() {
    std::optional<IntRelation> acc;
    while (true) {
      IntRelation r = parse_braced();
      if (!acc)
        acc = std::move(r);
      else
        acc = unite(*acc, r.with_names(acc->in_space(), acc->out_space()));
      if (accept("union") || accept("or")) continue;
      break;
    }
    if (peek().kind != Tok::End) fail("trailing input");
    return *acc;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw RelationParseError(msg + " at offset " + std::to_string(peek().offset), peek().offset);
  }
  bool accept(const std::string& t) {
    if (peek().kind != Tok::End && peek().text == t) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const std::string& t) {
    if (!accept(t)) fail("expected '" + t + "'");
  }

  // A tuple entry is either a fresh name or an affine expression.
  std::vector<Affine> parse_tuple() {
    expect("[");
    std::vector<Affine> out;
    if (accept("]")) return out;
    do {
      out.push_back(parse_expr());
    } while (accept(","));
    expect("]");
    return out;
  }

  IntRelation parse_braced() {
    expect("{");
    std::vector<Affine> in = parse_tuple();
    std::vector<Affine> out;
    if (accept("->")) out = parse_tuple();
    std::vector<Clause> clauses;
    if (accept("|") || accept(":")) {
      do {
        clauses.push_back(parse_clause());
      } while (accept("or") || accept("||"));
    } else {
      clauses.push_back(Clause{});
    }
    expect("}");
    return build(in, out, clauses);
  }

  Clause parse_clause() {
    Clause c;
    int parens = 0;
    do {
      while (accept("exists")) {
        if (accept("(")) ++parens;
        do {
          if (peek().kind != Tok::Ident) fail("expected existential name");
          c.exists.push_back(toks_[pos_++].text);
        } while (accept(","));
        expect(":");
      }
      if (accept("(")) {
        Clause inner = parse_clause();
        expect(")");
        for (auto& a : inner.atoms) c.atoms.push_back(std::move(a));
        for (auto& e : inner.exists) c.exists.push_back(std::move(e));
        continue;
      }
      parse_atoms(c.atoms);
    } while (accept("and") || accept("&&"));
    while (parens-- > 0) expect(")");
    return c;
  }

  void parse_atoms(std::vector<Atom>& atoms) {
    if (accept("true")) return;
    if (accept("false")) {
      atoms.push_back({Atom::False, {}, 0});
      return;
    }
    Affine lhs = parse_expr();
    if (accept("mod") || accept("%")) {
      if (peek().kind != Tok::Number) fail("expected modulus");
      Int m(toks_[pos_++].text);
      if (!accept("=") && !accept("==")) fail("expected '=' after modulus");
      Affine rhs = parse_expr();
      if (!rhs.is_constant()) fail("residue must be a constant");
      Affine e = lhs;
      e.constant -= rhs.constant;
      atoms.push_back({Atom::Cong, e, m});
      return;
    }
    bool any = false;
    while (true) {
      std::string op = peek().text;
      if (op != "<" && op != "<=" && op != ">" && op != ">=" && op != "=" && op != "==") break;
      ++pos_;
      Affine rhs = parse_expr();
      Affine diff;
      if (op == "<" || op == "<=") {
        diff = rhs;
        diff += Affine(lhs).scale(-1);
        if (op == "<") diff.constant -= 1;
        atoms.push_back({Atom::Ge, diff, 0});
      } else if (op == ">" || op == ">=") {
        diff = lhs;
        diff += Affine(rhs).scale(-1);
        if (op == ">") diff.constant -= 1;
        atoms.push_back({Atom::Ge, diff, 0});
      } else {
        diff = lhs;
        diff += Affine(rhs).scale(-1);
        atoms.push_back({Atom::Eq, diff, 0});
      }
      lhs = rhs;
      any = true;
    }
    if (!any) fail("expected comparison");
  }

  Affine parse_expr() {
    Affine acc;
    bool neg = false;
    if (accept("-")) neg = true;
    else accept("+");
    Affine t = parse_term();
    if (neg) t.scale(-1);
    acc += t;
    while (true) {
      if (accept("+")) {
        acc += parse_term();
      } else if (accept("-")) {
        acc += parse_term().scale(-1);
      } else {
        break;
      }
    }
    return acc;
  }

  Affine parse_term() {
    Affine f = parse_factor();
    while (true) {
      bool star = accept("*");
      // Juxtaposition: 2x, 2(x+1)
      bool juxt = !star && (peek().kind == Tok::Ident || peek().text == "(") && f.is_constant() &&
                  !is_keyword(peek().text);
      if (!star && !juxt) break;
      Affine g = parse_factor();
      if (f.is_constant()) {
        f = g.scale(f.constant);
      } else if (g.is_constant()) {
        f.scale(g.constant);
      } else {
        fail("non-affine product");
      }
    }
    return f;
  }

  static bool is_keyword(const std::string& t) {
    return t == "and" || t == "or" || t == "mod" || t == "exists" || t == "union" || t == "true" ||
           t == "false";
  }

  Affine parse_factor() {
    if (accept("(")) {
      Affine e = parse_expr();
      expect(")");
      return e;
    }
    if (accept("-")) return parse_factor().scale(-1);
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      ++pos_;
      Affine a;
      a.constant = Int(t.text);
      return a;
    }
    if (t.kind == Tok::Ident && !is_keyword(t.text)) {
      ++pos_;
      Affine a;
      a.terms[t.text] = 1;
      return a;
    }
    fail("expected expression");
  }

  IntRelation build(const std::vector<Affine>& in, const std::vector<Affine>& out,
                    const std::vector<Clause>& clauses) {
    // Dim names: tuple entries that are a single fresh variable.
    std::vector<std::string> dim_names;
    std::map<std::string, std::size_t> dim_index;
    std::vector<std::optional<Affine>> entry_exprs;
    auto classify = [&](const Affine& a) {
      if (a.constant == 0 && a.terms.size() == 1 && a.terms.begin()->second == 1 &&
          !dim_index.count(a.terms.begin()->first)) {
        const std::string& n = a.terms.begin()->first;
        dim_index[n] = dim_names.size();
        dim_names.push_back(n);
        entry_exprs.push_back(std::nullopt);
      } else {
        dim_index["#" + std::to_string(dim_names.size())] = dim_names.size();
        dim_names.push_back("");
        entry_exprs.push_back(a);
      }
    };
    for (const auto& a : in) classify(a);
    for (const auto& a : out) classify(a);
    const std::size_t ndims = dim_names.size();

    // Names used in tuple expressions that are not dims become existentials.
    std::vector<std::string> tuple_exists;
    for (const auto& e : entry_exprs) {
      if (!e) continue;
      for (const auto& [n, c] : e->terms) {
        if (c != 0 && !dim_index.count(n) &&
            std::find(tuple_exists.begin(), tuple_exists.end(), n) == tuple_exists.end()) {
          tuple_exists.push_back(n);
        }
      }
    }

    Space in_space(std::vector<std::string>(dim_names.begin(), dim_names.begin() + static_cast<std::ptrdiff_t>(in.size())));
    Space out_space(std::vector<std::string>(dim_names.begin() + static_cast<std::ptrdiff_t>(in.size()), dim_names.end()));
    IntRelation rel(in_space, out_space);

    for (const auto& clause : clauses) {
      std::map<std::string, std::size_t> vars;
      for (const auto& [n, i] : dim_index) {
        if (n[0] != '#') vars[n] = i;
      }
      std::size_t next = ndims;
      for (const auto& n : tuple_exists) vars[n] = next++;
      for (const auto& n : clause.exists) {
        if (vars.count(n) && vars[n] < ndims) fail("existential '" + n + "' shadows a tuple variable");
        vars[n] = next++;
      }
      const std::size_t nvars = next;
      Conjunct c(ndims, nvars - ndims);
      auto lower = [&](const Affine& a) {
        LinearExpr e(nvars);
        e.constant = a.constant;
        for (const auto& [n, k] : a.terms) {
          if (k == 0) continue;
          auto it = vars.find(n);
          if (it == vars.end()) fail("unknown variable '" + n + "'");
          e.coeffs[it->second] += k;
        }
        return e;
      };
      for (std::size_t d = 0; d < ndims; ++d) {
        if (!entry_exprs[d]) continue;
        LinearExpr e = lower(*entry_exprs[d]);
        e.coeffs[d] -= 1;
        c.add_equality(std::move(e));
      }
      bool is_false = false;
      for (const auto& atom : clause.atoms) {
        switch (atom.kind) {
          case Atom::Eq: c.add_equality(lower(atom.expr)); break;
          case Atom::Ge: c.add_inequality(lower(atom.expr)); break;
          case Atom::Cong:
            if (atom.modulus <= 0) fail("modulus must be positive");
            c.add_congruence(lower(atom.expr), atom.modulus);
            break;
          case Atom::False: is_false = true; break;
        }
      }
      if (!is_false) rel.add_conjunct(std::move(c));
    }
    return rel;
  }
};

}  // namespace

IntRelation IntRelation::parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace eqcheck
