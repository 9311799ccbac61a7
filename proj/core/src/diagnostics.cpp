#include "eqcheck/diagnostics.hpp"

#include <algorithm>
#include <set>

#include "eqcheck/program.hpp"

namespace eqcheck {

std::string to_string(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::OperatorMismatch: return "operator-mismatch";
    case DiagnosticKind::LeafMismatch: return "leaf-mismatch";
    case DiagnosticKind::MappingMismatch: return "mapping-mismatch";
    case DiagnosticKind::UncoveredRead: return "uncovered-read";
    case DiagnosticKind::InterfaceMismatch: return "interface-mismatch";
  }
  return "unknown";
}

namespace {

std::string node_text(const AddgNode& n) {
  if (n.kind == AddgNode::Kind::Constant) return std::to_string(n.value);
  return n.name;
}

std::string symmetric_difference_domain(const IntRelation& a, const IntRelation& b) {
  return domain(unite(difference(a, b), difference(b, a))).to_string();
}

void fill_paths(Diagnostic& d, const Addg& ga, const Addg& gb, const PathTrace& a, const PathTrace& b) {
  d.trace_a = a;
  d.trace_b = b;
  d.path_a = render_path(ga, a);
  d.path_b = render_path(gb, b);
  d.statements_a = statements_on(ga, a);
  d.statements_b = statements_on(gb, b);
  d.suspects = suspects_on(ga, a, 0);
  auto sb = suspects_on(gb, b, 1);
  d.suspects.insert(d.suspects.end(), sb.begin(), sb.end());
}

std::string end_name(const Addg& g, const PathTrace& t) {
  return node_text(g.node(t.edges.empty() ? t.root : g.edge(t.edges.back()).to));
}

}  // namespace

std::string render_path(const Addg& g, const PathTrace& t) {
  std::string s = g.node(t.root).name;
  for (std::size_t id : t.edges) {
    const AddgEdge& e = g.edge(id);
    const AddgNode& to = g.node(e.to);
    s += " -" + e.label() + "-> ";
    s += (to.is_array() && !e.ref_text.empty()) ? e.ref_text : node_text(to);
  }
  return s;
}

std::vector<std::string> statements_on(const Addg& g, const PathTrace& t) {
  std::vector<std::string> out;
  for (std::size_t id : t.edges) {
    const std::string& s = g.edge(id).statement;
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::vector<Suspect> suspects_on(const Addg& g, const PathTrace& t, int side) {
  std::vector<Suspect> out;
  for (std::size_t id : t.edges) {
    const AddgEdge& e = g.edge(id);
    if (e.kind == AddgEdge::Kind::Definition) {
      const StatementRecord& rec = g.statement(e.statement);
      out.push_back({side, e.statement, rec.array, 0, rec.lhs_text});
    }
    if (e.occurrence > 0) out.push_back({side, e.statement, g.node(e.to).name, e.occurrence, e.ref_text});
  }
  return out;
}

Diagnostic build_mapping_mismatch(const Addg& ga, const Addg& gb, const std::string& output, const PathTrace& a,
                                  const PathTrace& b, const IntRelation& map_a, const IntRelation& map_b) {
  if (is_equal(map_a, map_b)) throw ContractError("mapping mismatch reported for equal mappings");
  Diagnostic d;
  d.kind = DiagnosticKind::MappingMismatch;
  d.output = output;
  fill_paths(d, ga, gb, a, b);
  d.mapping_a = map_a.to_string();
  d.mapping_b = map_b.to_string();
  d.disagreement = symmetric_difference_domain(map_a, map_b);
  d.message = "output-input mappings to " + end_name(ga, a) + " differ";
  return d;
}

Diagnostic build_leaf_mismatch(const Addg& ga, const Addg& gb, const std::string& output, const PathTrace& a,
                               const PathTrace& b, const IntRelation& map_a, const IntRelation& map_b) {
  Diagnostic d;
  d.kind = DiagnosticKind::LeafMismatch;
  d.output = output;
  fill_paths(d, ga, gb, a, b);
  d.mapping_a = map_a.to_string();
  d.mapping_b = map_b.to_string();
  d.disagreement = domain(map_a).to_string();
  d.message = "paths end in " + end_name(ga, a) + " and " + end_name(gb, b);
  return d;
}

Diagnostic build_operator_mismatch(const Addg& ga, const Addg& gb, const std::string& output, const PathTrace& a,
                                   const PathTrace& b, const IntRelation& dom, const std::string& detail) {
  Diagnostic d;
  d.kind = DiagnosticKind::OperatorMismatch;
  d.output = output;
  fill_paths(d, ga, gb, a, b);
  d.disagreement = dom.to_string();
  d.message = detail;
  return d;
}

Diagnostic build_uncovered_read(const Addg& g, int side, const std::string& output, const PathTrace& t,
                                const IntRelation& uncovered) {
  Diagnostic d;
  d.kind = DiagnosticKind::UncoveredRead;
  d.output = output;
  (side == 0 ? d.trace_a : d.trace_b) = t;
  (side == 0 ? d.path_a : d.path_b) = render_path(g, t);
  (side == 0 ? d.statements_a : d.statements_b) = statements_on(g, t);
  d.suspects = suspects_on(g, t, side);
  d.disagreement = domain(uncovered).to_string();
  (side == 0 ? d.mapping_a : d.mapping_b) = uncovered.to_string();
  d.message = std::string(side == 0 ? "original" : "transformed") + " program reads elements of " + end_name(g, t) +
              " that no statement writes";
  return d;
}

Diagnostic build_interface_mismatch(const std::string& output, const std::string& detail,
                                    std::optional<std::string> disagreement) {
  Diagnostic d;
  d.kind = DiagnosticKind::InterfaceMismatch;
  d.output = output;
  d.message = detail;
  d.disagreement = std::move(disagreement);
  return d;
}

std::optional<std::string> suggest_index(const Addg& g, const PathTrace& t, std::size_t occurrence_edge,
                                         const IntRelation& wanted) {
  if (occurrence_edge >= t.edges.size()) return std::nullopt;
  const AddgEdge& occ = g.edge(t.edges[occurrence_edge]);
  const StatementRecord& rec = g.statement(occ.statement);

  IntRelation m = IntRelation::identity_on(domain(wanted));
  std::optional<IntRelation> at_def;
  for (std::size_t i = 0; i < occurrence_edge; ++i) {
    const AddgEdge& e = g.edge(t.edges[i]);
    m = simplify(compose(m, e.mapping));
    if (e.kind == AddgEdge::Kind::Definition && e.statement == occ.statement) at_def = m;
  }
  if (!at_def) return std::nullopt;

  std::optional<IntRelation> suffix;
  for (std::size_t i = occurrence_edge + 1; i < t.edges.size(); ++i) {
    const IntRelation& em = g.edge(t.edges[i]).mapping;
    suffix = suffix ? simplify(compose(*suffix, em)) : em;
  }
  IntRelation target = suffix ? compose(wanted, inverse(*suffix)) : wanted;
  IntRelation per_iteration = simplify(compose(compose(rec.write_access, inverse(*at_def)), target));
  if (is_empty(per_iteration)) return std::nullopt;
  auto fn = as_affine_function(per_iteration);
  if (!fn) return std::nullopt;

  std::string out = g.node(occ.to).name;
  for (const LinearExpr& le : *fn) {
    AffineExpr ae;
    for (std::size_t i = 0; i < le.coeffs.size() && i < rec.iterators.size(); ++i)
      if (le.coeffs[i] != 0) ae.terms[rec.iterators[i]] = le.coeffs[i].get_si();
    ae.constant = le.constant.get_si();
    out += "[" + ae.to_string() + "]";
  }
  return out;
}

void common_variable_heuristic(const Addg& ga, const Addg& gb, FailureGroup& group,
                               const std::vector<std::pair<IntRelation, IntRelation>>& failing_maps) {
  if (group.failing.size() < 2) return;
  std::vector<Suspect> candidates;
  for (int side = 0; side < 2; ++side) {
    const Addg& g = side == 0 ? ga : gb;
    std::optional<std::set<Suspect>> common;
    for (const Diagnostic* d : group.failing) {
      auto s = suspects_on(g, side == 0 ? d->trace_a : d->trace_b, side);
      std::set<Suspect> here(s.begin(), s.end());
      if (!common) {
        common = std::move(here);
      } else {
        std::set<Suspect> keep;
        std::set_intersection(common->begin(), common->end(), here.begin(), here.end(),
                              std::inserter(keep, keep.begin()));
        common = std::move(keep);
      }
    }
    for (const auto& [ta, tb] : group.succeeding)
      for (const Suspect& s : suspects_on(g, side == 0 ? ta : tb, side)) common->erase(s);
    for (const Suspect& s : *common)
      if (s.occurrence > 0) candidates.push_back(s);
  }
  if (candidates.size() != 1) return;

  Hint hint;
  hint.at = candidates.front();
  hint.note = "heuristic: the only read shared by all failing paths and no succeeding one";
  {
    const Addg& g = hint.at.side == 0 ? ga : gb;
    std::optional<std::string> agreed;
    bool consistent = true;
    for (std::size_t i = 0; i < group.failing.size() && consistent; ++i) {
      const PathTrace& t = hint.at.side == 0 ? group.failing[i]->trace_a : group.failing[i]->trace_b;
      const IntRelation& other = hint.at.side == 0 ? failing_maps[i].second : failing_maps[i].first;
      for (std::size_t k = 0; k < t.edges.size(); ++k) {
        const AddgEdge& e = g.edge(t.edges[k]);
        if (e.statement != hint.at.statement || e.occurrence != hint.at.occurrence ||
            g.node(e.to).name != hint.at.array)
          continue;
        auto s = suggest_index(g, t, k, other);
        if (!s || (agreed && *agreed != *s)) consistent = false;
        else agreed = s;
        break;
      }
    }
    if (consistent && agreed) hint.suggestion = *agreed;
  }
  for (Diagnostic* d : group.failing) d->hint = hint;
}

}  // namespace eqcheck
