#include "eqcheck/interpreter.hpp"

#include <set>
#include <sstream>

namespace eqcheck {

namespace {

std::string element_text(const Element& e) {
  std::string s;
  for (auto v : e) s += "[" + std::to_string(v) + "]";
  return s;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string fault_message(RuntimeFault::Kind kind, const std::string& stmt,
                          const std::vector<std::pair<std::string, std::int64_t>>& it, const std::string& array,
                          const Element& e) {
  std::string msg = to_string(kind) + " of " + array + element_text(e) + " in " + stmt;
  if (!it.empty()) {
    msg += " at (";
    for (std::size_t i = 0; i < it.size(); ++i) msg += (i ? ", " : "") + it[i].first + "=" + std::to_string(it[i].second);
    msg += ")";
  }
  return msg;
}

}  // namespace

RuntimeFault::RuntimeFault(Kind k, std::string stmt, std::vector<std::pair<std::string, std::int64_t>> it,
                           std::string arr, Element e)
    : std::runtime_error(fault_message(k, stmt, it, arr, e)),
      kind(k),
      statement(std::move(stmt)),
      iteration(std::move(it)),
      array(std::move(arr)),
      element(std::move(e)) {}

std::string to_string(RuntimeFault::Kind k) {
  switch (k) {
    case RuntimeFault::Kind::DoubleWrite: return "double write";
    case RuntimeFault::Kind::UninitializedRead: return "uninitialized read";
    case RuntimeFault::Kind::OutOfBounds: return "out-of-bounds access";
  }
  return "fault";
}

Int InputSource::value(const std::string& array, const Element& e) const {
  if (auto a = fixed_.find(array); a != fixed_.end())
    if (auto v = a->second.find(e); v != a->second.end()) return v->second;
  if (auto f = fills_.find(array); f != fills_.end()) return f->second;
  std::uint64_t h = splitmix(seed_);
  for (char c : array) h = splitmix(h ^ static_cast<unsigned char>(c));
  h = splitmix(h ^ 0xa5a5u);
  for (auto v : e) h = splitmix(h ^ static_cast<std::uint64_t>(v));
  std::uint64_t span = static_cast<std::uint64_t>(hi_ - lo_) + 1;
  return Int(static_cast<long>(lo_ + static_cast<std::int64_t>(h % span)));
}

Int apply_operator(const OperatorInfo& op, const std::vector<Int>& args) {
  if (op.builtin) {
    if (op.symbol == "neg") return -args.at(0);
    if (op.symbol == "-") return args.at(0) - args.at(1);
    if (op.symbol == "+") {
      Int s = 0;
      for (const auto& a : args) s += a;
      return s;
    }
    if (op.symbol == "*") {
      Int s = 1;
      for (const auto& a : args) s *= a;
      return s;
    }
  }
  // User functions get a fixed interpretation that honours exactly the
  // declared algebraic properties.
  if (op.associative && op.commutative) {
    Int s = 1;
    for (const auto& a : args) s += a;
    return args.size() == 1 ? s : s - 1 + Int(static_cast<long>(args.size() - 1));
  }
  if (op.commutative) {
    Int s = 1;
    for (const auto& a : args) s *= a;
    return s + 1;
  }
  if (op.associative) return args.at(0);
  static const long weights[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
  Int s = 1;
  for (std::size_t i = 0; i < args.size(); ++i) s += args[i] * Int(weights[i % 12] + static_cast<long>(i / 12) * 43);
  return s;
}

namespace {

class Machine {
 public:
  Machine(const Program& p, const InputSource& in, const RunOptions& opts) : p_(p), in_(in), opts_(opts) {
    for (const auto& a : p.arrays) store_[a.name];
  }

  ExecResult go() {
    exec(p_.body);
    ExecResult r;
    for (const auto& name : p_.outputs()) r.outputs[name] = store_[name];
    r.inputs_read = std::move(inputs_read_);
    r.steps = steps_;
    return r;
  }

 private:
  void exec(const std::vector<Stmt>& body) {
    for (const auto& s : body) exec(s);
  }

  void exec(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign: assign(s.assign); return;
      case Stmt::Kind::If:
        exec(s.guard.evaluate(env_) ? s.body : s.else_body);
        return;
      case Stmt::Kind::For: {
        std::int64_t v = s.init.evaluate(env_);
        order_.push_back(s.iterator);
        for (;;) {
          env_[s.iterator] = v;
          if (!s.cond.evaluate(env_)) break;
          exec(s.body);
          v += s.step;
        }
        order_.pop_back();
        env_.erase(s.iterator);
        return;
      }
    }
  }

  std::vector<std::pair<std::string, std::int64_t>> iteration() const {
    std::vector<std::pair<std::string, std::int64_t>> it;
    for (const auto& n : order_) it.emplace_back(n, env_.at(n));
    return it;
  }

  Element locate(const ArrayRef& ref, const std::string& stmt) const {
    Element e;
    for (const auto& ix : ref.indices) e.push_back(ix.evaluate(env_));
    const ArrayDecl* d = p_.find_array(ref.array);
    for (std::size_t i = 0; i < e.size(); ++i) {
      bool bad = e[i] < 0 || (d->extents[i] && e[i] >= *d->extents[i]);
      if (bad) throw RuntimeFault(RuntimeFault::Kind::OutOfBounds, stmt, iteration(), ref.array, e);
    }
    return e;
  }

  Int eval(const Expr& e, const std::string& stmt, ExecEvent* ev) {
    switch (e.kind) {
      case Expr::Kind::Constant: return Int(static_cast<long>(e.value));
      case Expr::Kind::Read: {
        Element el = locate(e.ref, stmt);
        if (ev) ev->reads.emplace_back(e.ref.array, el);
        const ArrayDecl* d = p_.find_array(e.ref.array);
        auto& vals = store_[e.ref.array];
        if (auto it = vals.find(el); it != vals.end()) return it->second;
        if (d->role != ArrayRole::Input)
          throw RuntimeFault(RuntimeFault::Kind::UninitializedRead, stmt, iteration(), e.ref.array, el);
        Int v = in_.value(e.ref.array, el);
        vals.emplace(el, v);
        inputs_read_[e.ref.array][el] = v;
        return v;
      }
      case Expr::Kind::Apply: break;
    }
    std::vector<Int> args;
    args.reserve(e.args.size());
    for (const auto& a : e.args) args.push_back(eval(a, stmt, ev));
    const OperatorInfo* info = p_.operators.find(e.op);
    if (!info) throw ContractError("undeclared operator '" + e.op + "'");
    return apply_operator(*info, args);
  }

  void assign(const Assignment& a) {
    ExecEvent ev;
    ExecEvent* evp = opts_.on_assign ? &ev : nullptr;
    Int v = eval(a.rhs, a.label, evp);
    Element el = locate(a.lhs, a.label);
    auto& vals = store_[a.lhs.array];
    const ArrayDecl* d = p_.find_array(a.lhs.array);
    if (d->role == ArrayRole::Input || !vals.emplace(el, v).second)
      throw RuntimeFault(RuntimeFault::Kind::DoubleWrite, a.label, iteration(), a.lhs.array, el);
    ++steps_;
    if (evp) {
      ev.statement = a.label;
      ev.iteration = env_;
      ev.written = el;
      opts_.on_assign(ev);
    }
  }

  const Program& p_;
  const InputSource& in_;
  const RunOptions& opts_;
  std::map<std::string, std::int64_t> env_;
  std::vector<std::string> order_;
  ArrayStore store_;
  ArrayStore inputs_read_;
  std::size_t steps_ = 0;
};

struct Outcome {
  std::optional<ExecResult> result;
  std::string fault;
};

Outcome attempt(const Program& p, const InputSource& in) {
  try {
    return {run(p, in), {}};
  } catch (const RuntimeFault& f) {
    return {std::nullopt, f.what()};
  }
}

// Compares one run; fills `out` and returns false on disagreement.
bool compare(const Outcome& a, const Outcome& b, std::int64_t n, std::size_t trial, std::uint64_t seed,
             DiffResult& out) {
  Counterexample cx;
  cx.n = n;
  cx.trial = trial;
  cx.input_seed = seed;
  auto merge_inputs = [&](const Outcome& o) {
    if (!o.result) return;
    for (const auto& [name, vals] : o.result->inputs_read)
      for (const auto& [e, v] : vals) cx.inputs[name][e] = v;
  };
  if (!a.result || !b.result) {
    if (!a.result && !b.result && a.fault == b.fault) return true;
    cx.fault_a = a.fault;
    cx.fault_b = b.fault;
    merge_inputs(a);
    merge_inputs(b);
    out.agree = false;
    out.first = std::move(cx);
    return false;
  }
  std::set<std::string> names;
  for (const auto& [name, _] : a.result->outputs) names.insert(name);
  for (const auto& [name, _] : b.result->outputs) names.insert(name);
  static const ArrayValues none;
  for (const auto& name : names) {
    auto ia = a.result->outputs.find(name);
    auto ib = b.result->outputs.find(name);
    const ArrayValues& va = ia == a.result->outputs.end() ? none : ia->second;
    const ArrayValues& vb = ib == b.result->outputs.end() ? none : ib->second;
    std::set<Element> elems;
    for (const auto& [e, _] : va) elems.insert(e);
    for (const auto& [e, _] : vb) elems.insert(e);
    for (const auto& e : elems) {
      auto x = va.find(e);
      auto y = vb.find(e);
      std::optional<Int> xa = x == va.end() ? std::nullopt : std::optional<Int>(x->second);
      std::optional<Int> yb = y == vb.end() ? std::nullopt : std::optional<Int>(y->second);
      if (xa == yb) continue;
      out.differing.emplace_back(name, e);
      if (!out.first) {
        cx.output = name;
        cx.element = e;
        cx.value_a = xa;
        cx.value_b = yb;
        out.first = cx;
      }
    }
  }
  if (!out.first) return true;
  merge_inputs(a);
  merge_inputs(b);
  out.first->inputs = cx.inputs;
  out.agree = false;
  return false;
}

}  // namespace

ExecResult run(const Program& p, const InputSource& inputs, const RunOptions& opts) {
  return Machine(p, inputs, opts).go();
}

std::string Counterexample::to_string() const {
  std::ostringstream os;
  os << "N=" << n << " trial " << trial << " (input seed " << input_seed << "): ";
  if (!fault_a.empty() || !fault_b.empty()) {
    os << "a: " << (fault_a.empty() ? "ok" : fault_a) << "; b: " << (fault_b.empty() ? "ok" : fault_b);
    return os.str();
  }
  auto show = [](const std::optional<Int>& v) { return v ? v->get_str() : std::string("<unwritten>"); };
  os << output << element_text(element) << " = " << show(value_a) << " vs " << show(value_b);
  return os.str();
}

DiffResult differential_test(const std::string& source_a, const std::string& source_b, const DiffConfig& cfg,
                             const std::string& file_a, const std::string& file_b) {
  DiffResult out;
  std::uint64_t state = cfg.seed;
  for (std::int64_t n : cfg.n_values) {
    ConstantOverrides ov{{cfg.size_constant, n}};
    Program a = parse_program(source_a, file_a, ov);
    Program b = parse_program(source_b, file_b, ov);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      state = splitmix(state);
      InputSource in(state);
      ++out.runs;
      if (!compare(attempt(a, in), attempt(b, in), n, t, state, out)) return out;
    }
  }
  return out;
}

DiffResult differential_test(const Program& a, const Program& b, std::size_t trials, std::uint64_t seed) {
  DiffResult out;
  std::uint64_t state = seed;
  for (std::size_t t = 0; t < trials; ++t) {
    state = splitmix(state);
    InputSource in(state);
    ++out.runs;
    if (!compare(attempt(a, in), attempt(b, in), 0, t, state, out)) return out;
  }
  return out;
}

}  // namespace eqcheck
