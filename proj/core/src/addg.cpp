#include "eqcheck/addg.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace eqcheck {

std::string AddgNode::describe() const {
  switch (kind) {
    case Kind::Array: return name;
    case Kind::Operator: return name + "@" + statement;
    case Kind::Constant: return std::to_string(value) + "@" + statement;
  }
  return name;
}

std::string AddgEdge::label() const { return kind == Kind::Definition ? statement : std::to_string(position); }

namespace {

Space element_space(std::size_t arity) {
  if (arity == 1) return Space({"x"});
  std::vector<std::string> names;
  for (std::size_t i = 0; i < arity; ++i) names.push_back("x" + std::to_string(i));
  return Space(names);
}

Space target_space(std::size_t arity) {
  if (arity == 1) return Space({"y"});
  std::vector<std::string> names;
  for (std::size_t i = 0; i < arity; ++i) names.push_back("y" + std::to_string(i));
  return Space(names);
}

}  // namespace

std::size_t Addg::add_node(AddgNode n) {
  nodes_.push_back(std::move(n));
  out_.emplace_back();
  return nodes_.size() - 1;
}

std::size_t Addg::add_edge(AddgEdge e) {
  edges_.push_back(std::move(e));
  std::size_t id = edges_.size() - 1;
  out_[edges_[id].from].push_back(id);
  return id;
}

Addg Addg::build(const Program& p) {
  Addg g;
  g.name_ = p.name;
  std::map<std::string, std::size_t> array_nodes;
  for (const auto& a : p.arrays) {
    AddgNode n;
    n.kind = AddgNode::Kind::Array;
    n.name = a.name;
    n.array_class = a.role == ArrayRole::Input    ? ArrayClass::Input
                    : a.role == ArrayRole::Output ? ArrayClass::Output
                                                  : ArrayClass::Intermediate;
    n.arity = static_cast<int>(a.extents.size());
    array_nodes[a.name] = g.add_node(std::move(n));
  }

  for (const auto& s : collect_statements(p)) {
    const Assignment& as = *s.assign;
    std::size_t lhs_arity = as.lhs.indices.size();
    IntRelation wa = s.write_access();
    IntRelation ws = range(wa).with_names(element_space(lhs_arity), Space{});
    IntRelation lhs_to_iter = inverse(wa);

    StatementRecord rec;
    rec.label = s.label;
    rec.array = as.lhs.array;
    rec.iterators = s.iterators;
    rec.domain = s.domain;
    rec.write_access = wa;
    rec.write_set = ws;
    rec.lhs_text = as.lhs.to_string();
    rec.rhs_text = as.rhs.to_string();
    rec.line = as.loc.line;
    g.stmts_.push_back(rec);

    IntRelation self = IntRelation::identity_on(ws);
    std::map<std::string, int> occurrences;

    // Returns the node an expression maps to plus the edge mapping and read
    // metadata for the edge that reaches it.
    struct Target {
      std::size_t node;
      IntRelation mapping;
      int occurrence = 0;
      std::string ref_text;
    };
    std::function<Target(const Expr&, std::vector<int>)> lower = [&](const Expr& e, std::vector<int> pos) -> Target {
      switch (e.kind) {
        case Expr::Kind::Read: {
          int occ = ++occurrences[e.ref.array];
          IntRelation m = compose(lhs_to_iter, s.access(e.ref));
          m = simplify(m).with_names(element_space(lhs_arity), target_space(e.ref.indices.size()));
          return {array_nodes.at(e.ref.array), m, occ, e.ref.to_string()};
        }
        case Expr::Kind::Constant: {
          AddgNode n;
          n.kind = AddgNode::Kind::Constant;
          n.name = std::to_string(e.value);
          n.value = e.value;
          n.statement = s.label;
          n.position = pos;
          return {g.add_node(std::move(n)), self, 0, {}};
        }
        case Expr::Kind::Apply: break;
      }
      const OperatorInfo* info = p.operators.find(e.op);
      AddgNode n;
      n.kind = AddgNode::Kind::Operator;
      n.name = e.op;
      n.statement = s.label;
      n.position = pos;
      n.arity = static_cast<int>(e.args.size());
      n.associative = info && info->associative;
      n.commutative = info && info->commutative;
      std::size_t id = g.add_node(std::move(n));
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        std::vector<int> child = pos;
        child.push_back(static_cast<int>(i) + 1);
        Target t = lower(e.args[i], child);
        AddgEdge edge;
        edge.kind = AddgEdge::Kind::Operand;
        edge.from = id;
        edge.to = t.node;
        edge.statement = s.label;
        edge.position = static_cast<int>(i) + 1;
        edge.occurrence = t.occurrence;
        edge.ref_text = t.ref_text;
        edge.mapping = std::move(t.mapping);
        g.add_edge(std::move(edge));
      }
      return {id, self, 0, {}};
    };

    Target root = lower(as.rhs, {});
    AddgEdge def;
    def.kind = AddgEdge::Kind::Definition;
    def.from = array_nodes.at(as.lhs.array);
    def.to = root.node;
    def.statement = s.label;
    def.occurrence = root.occurrence;
    def.ref_text = root.ref_text;
    def.mapping = std::move(root.mapping);
    g.add_edge(std::move(def));
  }
  return g;
}

std::optional<std::size_t> Addg::find_array(const std::string& name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].is_array() && nodes_[i].name == name) return i;
  return std::nullopt;
}

std::vector<std::size_t> Addg::roots() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].is_array() && nodes_[i].array_class == ArrayClass::Output) out.push_back(i);
  return out;
}

std::vector<std::size_t> Addg::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].is_array() && nodes_[i].array_class == ArrayClass::Input) out.push_back(i);
  return out;
}

const StatementRecord& Addg::statement(const std::string& label) const {
  for (const auto& s : stmts_)
    if (s.label == label) return s;
  throw ContractError("unknown statement '" + label + "'");
}

IntRelation Addg::defined_elements(std::size_t array_node) const {
  std::size_t arity = static_cast<std::size_t>(nodes_[array_node].arity);
  IntRelation out = IntRelation::empty_set(element_space(arity));
  for (std::size_t e : out_[array_node]) out = unite(out, statement(edges_[e].statement).write_set);
  return out;
}

DemandSplit Addg::demand_split(std::size_t array_node, const IntRelation& demanded) const {
  DemandSplit out;
  IntRelation covered = IntRelation::empty(demanded.in_space(), demanded.out_space());
  for (std::size_t e : out_[array_node]) {
    IntRelation piece = restrict_range(demanded, statement(edges_[e].statement).write_set);
    if (is_empty(piece)) continue;
    covered = unite(covered, piece);
    out.pieces.push_back({e, std::move(piece)});
  }
  out.uncovered = difference(demanded, covered);
  return out;
}

IntRelation Addg::reduce(const IntRelation& prefix, std::size_t edge) const {
  return compose(prefix, edges_[edge].mapping);
}

std::vector<std::string> Addg::find_cycle() const {
  // Array-level dependence: an array depends on every array its definers read.
  std::map<std::size_t, std::vector<std::size_t>> deps;
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    if (!nodes_[n].is_array()) continue;
    std::vector<std::size_t> stack(out_[n].begin(), out_[n].end());
    while (!stack.empty()) {
      const AddgEdge& e = edges_[stack.back()];
      stack.pop_back();
      if (nodes_[e.to].is_array()) {
        deps[n].push_back(e.to);
      } else {
        for (std::size_t k : out_[e.to]) stack.push_back(k);
      }
    }
  }
  std::vector<int> state(nodes_.size(), 0);
  std::vector<std::size_t> path;
  std::vector<std::string> cycle;
  std::function<bool(std::size_t)> visit = [&](std::size_t n) {
    state[n] = 1;
    path.push_back(n);
    for (std::size_t m : deps[n]) {
      if (state[m] == 1) {
        auto it = std::find(path.begin(), path.end(), m);
        for (; it != path.end(); ++it) cycle.push_back(nodes_[*it].name);
        return true;
      }
      if (state[m] == 0 && visit(m)) return true;
    }
    path.pop_back();
    state[n] = 2;
    return false;
  };
  for (std::size_t n = 0; n < nodes_.size(); ++n)
    if (nodes_[n].is_array() && state[n] == 0 && visit(n)) break;
  return cycle;
}

std::size_t Addg::count_paths(std::size_t from, std::size_t max) const {
  std::vector<std::optional<std::size_t>> memo(nodes_.size());
  std::vector<bool> active(nodes_.size(), false);
  std::function<std::size_t(std::size_t)> count = [&](std::size_t n) -> std::size_t {
    if (memo[n]) return *memo[n];
    if (active[n]) throw UnsupportedError("cycle through '" + nodes_[n].describe() + "'");
    if (out_[n].empty()) return 1;
    active[n] = true;
    std::size_t total = 0;
    for (std::size_t e : out_[n]) total = std::min(max, total + count(edges_[e].to));
    active[n] = false;
    memo[n] = total;
    return total;
  };
  return count(from);
}

std::vector<std::vector<std::size_t>> Addg::paths(std::size_t from, std::size_t max) const {
  std::vector<std::vector<std::size_t>> out;
  if (count_paths(from, max + 1) > max) return out;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> walk = [&](std::size_t n) {
    if (out_[n].empty()) {
      out.push_back(cur);
      return;
    }
    for (std::size_t e : out_[n]) {
      cur.push_back(e);
      walk(edges_[e].to);
      cur.pop_back();
    }
  };
  walk(from);
  return out;
}

std::string Addg::to_dot() const {
  auto escape = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '"' || c == '\\') o += '\\';
      o += c;
    }
    return o;
  };
  std::ostringstream os;
  os << "digraph \"" << escape(name_) << "\" {\n";
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const AddgNode& n = nodes_[i];
    os << "  n" << i << " [label=\"" << escape(n.is_array() ? n.name : n.describe()) << "\"";
    if (n.is_array()) {
      os << ", shape=box";
      if (n.array_class == ArrayClass::Input) os << ", style=filled, fillcolor=lightgrey";
      if (n.array_class == ArrayClass::Output) os << ", peripheries=2";
    } else {
      os << ", shape=ellipse";
    }
    os << "];\n";
  }
  for (const auto& e : edges_) {
    std::string label = e.label();
    if (!e.ref_text.empty()) label += " " + e.ref_text;
    os << "  n" << e.from << " -> n" << e.to << " [label=\"" << escape(label) << "\\n"
       << escape(e.mapping.to_string()) << "\"";
    if (e.kind == AddgEdge::Kind::Definition) os << ", penwidth=2";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace eqcheck
