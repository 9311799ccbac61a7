#include "eqcheck/checker.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace eqcheck {

std::string to_string(Status s) {
  switch (s) {
    case Status::Equivalent: return "equivalent";
    case Status::Inequivalent: return "inequivalent";
    case Status::Unsupported: return "unsupported";
  }
  return "unknown";
}

Status combine(Status a, Status b) {
  if (a == Status::Inequivalent || b == Status::Inequivalent) return Status::Inequivalent;
  if (a == Status::Unsupported || b == Status::Unsupported) return Status::Unsupported;
  return Status::Equivalent;
}

namespace {

constexpr std::size_t kMaxSyncPoints = 2'000'000;

struct Cursor {
  std::size_t node = 0;
  IntRelation map;
  PathTrace trace;
  std::vector<std::string> ops;
};

struct Partial {
  IntRelation dom;
  std::vector<Cursor> entries;
};

struct Settled {
  std::vector<Cursor> cursors;
  Status status = Status::Equivalent;
};

class Checker {
 public:
  Checker(const Addg& a, const Addg& b, const CheckConfig& cfg, CheckResult& res) : g_{&a, &b}, cfg_(cfg), res_(res) {
    lookahead_left_ = cfg.lookahead;
  }

  void run();

  std::pair<std::vector<Partial>, Status> collect(int side, const Cursor& c, bool flatten, bool chained = false);
  Cursor start(std::size_t node, const IntRelation& map) const {
    Cursor c;
    c.node = node;
    c.map = map;
    c.trace.root = node;
    return c;
  }

 private:
  const Addg& g(int side) const { return *g_[side]; }

  Cursor advance(int side, const Cursor& c, std::size_t edge) const {
    Cursor n = c;
    n.map = simplify(g(side).reduce(c.map, edge));
    n.node = g(side).edge(edge).to;
    n.trace.edges.push_back(edge);
    n.trace.index = 0;
    return n;
  }

  Cursor restricted(const Cursor& c, const IntRelation& dom) const {
    Cursor n = c;
    n.map = simplify(restrict_domain(c.map, dom));
    return n;
  }

  bool is_leaf(int side, std::size_t node) const {
    const AddgNode& n = g(side).node(node);
    if (!n.is_array()) return n.kind == AddgNode::Kind::Constant;
    return g(side).out_edges(node).empty() || cut_[side].count(node);
  }

  std::string key(int side, std::size_t node) const {
    const AddgNode& n = g(side).node(node);
    if (n.kind == AddgNode::Kind::Constant) return "C:" + std::to_string(n.value);
    if (n.is_operator()) return "O:" + n.name + "/" + std::to_string(n.arity);
    if (auto it = cut_[side].find(node); it != cut_[side].end()) return "H:" + std::to_string(it->second);
    return "L:" + n.name;
  }

  std::size_t path_index(int side, const PathTrace& t) {
    auto& table = path_tables_[side][t.root];
    if (!table) {
      table.emplace();
      auto all = g(side).paths(t.root);
      for (std::size_t i = 0; i < all.size(); ++i) (*table)[all[i]] = i + 1;
    }
    auto it = table->find(t.edges);
    return it == table->end() ? 0 : it->second;
  }

  void emit(Diagnostic d) {
    if (quiet_ || !sink_) return;
    if (emitted_ >= cfg_.max_diagnostics) {
      ++res_.suppressed_diagnostics;
      return;
    }
    ++emitted_;
    d.piece = piece_text_;
    sink_->push_back(std::move(d));
  }

  void unsupported(const std::string& why) {
    if (reason_.empty()) reason_ = why;
  }

  Settled settle(int side, const Cursor& c, bool at_root = false);
  void settle_into(int side, const Cursor& c, bool at_root, Settled& out);
  Status compare(const Cursor& a, const Cursor& b);
  Status compare_settled(Cursor a, Cursor b);
  Status compare_leaves(Cursor& a, Cursor& b);
  Status compare_ops(const Cursor& a, const Cursor& b);
  Status match(const Cursor& opa, const Cursor& opb, std::vector<Cursor> ea, std::vector<Cursor> eb,
               const IntRelation& dom, bool commutative);
  Status trial(const Cursor& a, const Cursor& b);
  void check_root(const std::string& name, std::size_t ra, std::size_t rb);

  const Addg* g_[2];
  const CheckConfig& cfg_;
  CheckResult& res_;
  std::map<std::size_t, std::size_t> cut_[2];
  std::map<std::size_t, std::optional<std::map<std::vector<std::size_t>, std::size_t>>> path_tables_[2];
  std::set<std::tuple<std::size_t, std::size_t, std::string>> memo_;

  bool quiet_ = false;
  int lookahead_left_ = 8;
  std::size_t emitted_ = 0;
  std::vector<Diagnostic>* sink_ = nullptr;
  std::string output_;
  std::string piece_text_;
  std::string reason_;

  // Failed leaf groups of the current piece, resolved when it completes.
  struct PendingGroup {
    std::vector<std::size_t> failing;
    std::vector<std::pair<IntRelation, IntRelation>> maps;
  };
  std::vector<PendingGroup> pending_;
};

Settled Checker::settle(int side, const Cursor& c, bool at_root) {
  Settled out;
  settle_into(side, c, at_root, out);
  return out;
}

void Checker::settle_into(int side, const Cursor& c, bool at_root, Settled& out) {
  const AddgNode& n = g(side).node(c.node);
  bool splittable = n.is_array() && !g(side).out_edges(c.node).empty() && (at_root || !cut_[side].count(c.node));
  if (!splittable) {
    out.cursors.push_back(c);
    return;
  }
  DemandSplit split = g(side).demand_split(c.node, c.map);
  if (!is_empty(split.uncovered)) {
    emit(build_uncovered_read(g(side), side, output_, c.trace, split.uncovered));
    out.status = combine(out.status, Status::Inequivalent);
  }
  for (const auto& piece : split.pieces) {
    Cursor next = c;
    next.map = piece.demanded;
    settle_into(side, advance(side, next, piece.edge), false, out);
  }
}

std::pair<std::vector<Partial>, Status> Checker::collect(int side, const Cursor& c, bool flatten, bool chained) {
  const AddgNode& op = g(side).node(c.node);
  Status status = Status::Equivalent;
  std::vector<Partial> acc{{domain(c.map), {}}};
  for (std::size_t e : g(side).out_edges(c.node)) {
    Cursor operand = advance(side, c, e);
    if (!chained) operand.ops.push_back(op.name);
    Settled s = settle(side, operand);
    status = combine(status, s.status);
    std::vector<Partial> options;
    for (auto& sc : s.cursors) {
      const AddgNode& sn = g(side).node(sc.node);
      if (flatten && sn.is_operator() && sn.name == op.name && sn.associative) {
        auto [sub, st] = collect(side, sc, true, true);
        status = combine(status, st);
        for (auto& p : sub) options.push_back(std::move(p));
      } else {
        options.push_back({domain(sc.map), {std::move(sc)}});
      }
    }
    std::vector<Partial> next;
    for (const auto& a : acc)
      for (const auto& o : options) {
        IntRelation d = simplify(intersect(a.dom, o.dom));
        if (is_empty(d)) continue;
        Partial p{d, a.entries};
        p.entries.insert(p.entries.end(), o.entries.begin(), o.entries.end());
        next.push_back(std::move(p));
      }
    acc = std::move(next);
  }
  for (auto& p : acc)
    for (auto& e : p.entries) e = restricted(e, p.dom);
  return {std::move(acc), status};
}

Status Checker::compare(const Cursor& a, const Cursor& b) {
  Settled sa = settle(0, a);
  Settled sb = settle(1, b);
  Status st = combine(sa.status, sb.status);
  for (const auto& ca : sa.cursors)
    for (const auto& cb : sb.cursors) {
      IntRelation d = simplify(intersect(domain(ca.map), domain(cb.map)));
      if (is_empty(d)) continue;
      st = combine(st, compare_settled(restricted(ca, d), restricted(cb, d)));
    }
  return st;
}

Status Checker::compare_settled(Cursor a, Cursor b) {
  if (++res_.stats.sync_points > kMaxSyncPoints) throw UnsupportedError("traversal step limit exceeded");
  if (cfg_.observer) cfg_.observer({a.node, &a.map, &a.ops}, {b.node, &b.map, &b.ops});
  const AddgNode& na = g(0).node(a.node);
  const AddgNode& nb = g(1).node(b.node);
  bool la = is_leaf(0, a.node), lb = is_leaf(1, b.node);
  if (la && lb) return compare_leaves(a, b);
  if (na.is_operator() && nb.is_operator()) return compare_ops(a, b);
  a.trace.index = path_index(0, a.trace);
  b.trace.index = path_index(1, b.trace);
  emit(build_leaf_mismatch(g(0), g(1), output_, a.trace, b.trace, a.map, b.map));
  return Status::Inequivalent;
}

Status Checker::compare_leaves(Cursor& a, Cursor& b) {
  a.trace.index = path_index(0, a.trace);
  b.trace.index = path_index(1, b.trace);
  const AddgNode& na = g(0).node(a.node);
  const AddgNode& nb = g(1).node(b.node);
  bool same_leaf = key(0, a.node) == key(1, b.node);
  bool constant = na.kind == AddgNode::Kind::Constant;
  bool ok = same_leaf && (constant || is_equal(a.map, b.map));
  if (!quiet_) {
    LeafPairing lp{output_, a.trace, b.trace, na.describe(), nb.describe(), domain(a.map), a.map, b.map, ok};
    res_.leaves.push_back(std::move(lp));
  }
  if (ok) return Status::Equivalent;
  if (!same_leaf)
    emit(build_leaf_mismatch(g(0), g(1), output_, a.trace, b.trace, a.map, b.map));
  else
    emit(build_mapping_mismatch(g(0), g(1), output_, a.trace, b.trace, a.map, b.map));
  return Status::Inequivalent;
}

Status Checker::compare_ops(const Cursor& a, const Cursor& b) {
  const AddgNode& na = g(0).node(a.node);
  const AddgNode& nb = g(1).node(b.node);
  bool assoc = na.associative && nb.associative;
  bool comm = na.commutative && nb.commutative;
  if (na.name != nb.name || (!assoc && na.arity != nb.arity)) {
    emit(build_operator_mismatch(g(0), g(1), output_, a.trace, b.trace, domain(a.map),
                                 "operator " + na.describe() + " corresponds to " + nb.describe()));
    return Status::Inequivalent;
  }
  std::tuple<std::size_t, std::size_t, std::string> memo_key;
  if (cfg_.memo) {
    memo_key = {a.node, b.node, simplify(compose(inverse(a.map), b.map)).canonical()};
    if (memo_.count(memo_key)) {
      ++res_.stats.memo_hits;
      return Status::Equivalent;
    }
  }
  ++res_.stats.sub_traversals;
  auto [pa, sa] = collect(0, a, assoc);
  auto [pb, sb] = collect(1, b, assoc);
  Status st = combine(sa, sb);
  for (const auto& x : pa)
    for (const auto& y : pb) {
      IntRelation d = simplify(intersect(x.dom, y.dom));
      if (is_empty(d)) continue;
      std::vector<Cursor> ea, eb;
      for (const auto& e : x.entries) ea.push_back(restricted(e, d));
      for (const auto& e : y.entries) eb.push_back(restricted(e, d));
      st = combine(st, match(a, b, std::move(ea), std::move(eb), d, comm));
    }
  if (cfg_.memo && st == Status::Equivalent) memo_.insert(memo_key);
  return st;
}

Status Checker::trial(const Cursor& a, const Cursor& b) {
  if (lookahead_left_ <= 0) return Status::Unsupported;
  ++res_.stats.trials;
  bool saved_quiet = quiet_;
  std::string saved_reason = reason_;
  quiet_ = true;
  --lookahead_left_;
  Status st;
  try {
    st = compare(a, b);
  } catch (...) {
    quiet_ = saved_quiet;
    ++lookahead_left_;
    throw;
  }
  quiet_ = saved_quiet;
  ++lookahead_left_;
  reason_ = saved_reason;
  return st;
}

namespace {

// Deterministic augmenting-path matching; returns match_b[j] = i or -1.
std::vector<int> bipartite(const std::vector<std::vector<bool>>& compat, std::size_t nb) {
  std::vector<int> match_b(nb, -1);
  for (std::size_t i = 0; i < compat.size(); ++i) {
    std::vector<bool> seen(nb, false);
    std::function<bool(std::size_t)> augment = [&](std::size_t u) {
      for (std::size_t j = 0; j < nb; ++j) {
        if (!compat[u][j] || seen[j]) continue;
        seen[j] = true;
        if (match_b[j] < 0 || augment(static_cast<std::size_t>(match_b[j]))) {
          match_b[j] = static_cast<int>(u);
          return true;
        }
      }
      return false;
    };
    augment(i);
  }
  return match_b;
}

}  // namespace

Status Checker::match(const Cursor& opa, const Cursor& opb, std::vector<Cursor> ea, std::vector<Cursor> eb,
                      const IntRelation& dom, bool commutative) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::pair<std::size_t, std::size_t>> leftovers;
  std::vector<std::size_t> rest_a, rest_b;
  Status st = Status::Equivalent;

  if (!commutative) {
    for (std::size_t i = 0; i < std::min(ea.size(), eb.size()); ++i) pairs.emplace_back(i, i);
    for (std::size_t i = eb.size(); i < ea.size(); ++i) rest_a.push_back(i);
    for (std::size_t i = ea.size(); i < eb.size(); ++i) rest_b.push_back(i);
  } else {
    std::vector<std::string> keys;
    std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> groups;
    for (std::size_t i = 0; i < ea.size(); ++i) {
      std::string k = key(0, ea[i].node);
      if (!groups.count(k)) keys.push_back(k);
      groups[k].first.push_back(i);
    }
    for (std::size_t j = 0; j < eb.size(); ++j) {
      std::string k = key(1, eb[j].node);
      if (!groups.count(k)) keys.push_back(k);
      groups[k].second.push_back(j);
    }
    for (const auto& k : keys) {
      const auto& [ia, ib] = groups[k];
      if (ia.size() == 1 && ib.size() == 1) {
        pairs.emplace_back(ia[0], ib[0]);
        continue;
      }
      bool op_key = k.rfind("O:", 0) == 0;
      bool const_key = k.rfind("C:", 0) == 0;
      bool undetermined = false;
      std::vector<std::vector<bool>> compat(ia.size(), std::vector<bool>(ib.size(), false));
      for (std::size_t x = 0; x < ia.size(); ++x)
        for (std::size_t y = 0; y < ib.size(); ++y) {
          if (const_key) {
            compat[x][y] = true;
          } else if (!op_key) {
            compat[x][y] = is_equal(ea[ia[x]].map, eb[ib[y]].map);
          } else {
            Status t = trial(ea[ia[x]], eb[ib[y]]);
            compat[x][y] = t == Status::Equivalent;
            undetermined = undetermined || t == Status::Unsupported;
          }
        }
      auto mb = bipartite(compat, ib.size());
      std::vector<bool> used_a(ia.size(), false);
      std::size_t matched = 0;
      for (std::size_t y = 0; y < ib.size(); ++y)
        if (mb[y] >= 0) {
          used_a[static_cast<std::size_t>(mb[y])] = true;
          pairs.emplace_back(ia[static_cast<std::size_t>(mb[y])], ib[y]);
          ++matched;
        }
      if (op_key && undetermined && matched < std::min(ia.size(), ib.size())) {
        unsupported("ambiguous matching of " + g(0).node(ea[ia[0]].node).name + " operands below " +
                    g(0).node(opa.node).describe() + " within lookahead depth " + std::to_string(cfg_.lookahead));
        return Status::Unsupported;
      }
      std::vector<std::size_t> la, lb;
      for (std::size_t x = 0; x < ia.size(); ++x)
        if (!used_a[x]) la.push_back(ia[x]);
      for (std::size_t y = 0; y < ib.size(); ++y)
        if (mb[y] < 0) lb.push_back(ib[y]);
      std::size_t common = std::min(la.size(), lb.size());
      for (std::size_t i = 0; i < common; ++i) leftovers.emplace_back(la[i], lb[i]);
      rest_a.insert(rest_a.end(), la.begin() + static_cast<std::ptrdiff_t>(common), la.end());
      rest_b.insert(rest_b.end(), lb.begin() + static_cast<std::ptrdiff_t>(common), lb.end());
    }
    std::sort(pairs.begin(), pairs.end());
    std::sort(rest_a.begin(), rest_a.end());
    std::sort(rest_b.begin(), rest_b.end());
    std::size_t common = std::min(rest_a.size(), rest_b.size());
    for (std::size_t i = 0; i < common; ++i) leftovers.emplace_back(rest_a[i], rest_b[i]);
    rest_a.erase(rest_a.begin(), rest_a.begin() + static_cast<std::ptrdiff_t>(common));
    rest_b.erase(rest_b.begin(), rest_b.begin() + static_cast<std::ptrdiff_t>(common));
  }

  std::vector<std::pair<std::size_t, std::size_t>> all = pairs;
  all.insert(all.end(), leftovers.begin(), leftovers.end());

  MatchRecord rec;
  std::vector<std::size_t> failing_idx;
  std::vector<std::pair<IntRelation, IntRelation>> failing_maps;
  for (const auto& [i, j] : all) {
    std::size_t before = sink_ ? sink_->size() : 0;
    Status s = compare(ea[i], eb[j]);
    st = combine(st, s);
    rec.pairs.emplace_back(i, j);
    rec.ok.push_back(s == Status::Equivalent);
    bool direct_leaves = is_leaf(0, ea[i].node) && is_leaf(1, eb[j].node);
    if (quiet_ || !direct_leaves) continue;
    if (s != Status::Equivalent && sink_->size() == before + 1 &&
        sink_->back().kind == DiagnosticKind::MappingMismatch) {
      failing_idx.push_back(sink_->size() - 1);
      failing_maps.emplace_back(ea[i].map, eb[j].map);
    }
  }
  if (!rest_a.empty() || !rest_b.empty()) {
    emit(build_operator_mismatch(g(0), g(1), output_, opa.trace, opb.trace, dom,
                                 "operator " + g(0).node(opa.node).describe() + " has " + std::to_string(ea.size()) +
                                     " operands, " + g(1).node(opb.node).describe() + " has " +
                                     std::to_string(eb.size())));
    st = Status::Inequivalent;
  }
  if (quiet_) return st;

  if (failing_idx.size() >= 2) pending_.push_back({failing_idx, failing_maps});

  if (commutative) {
    rec.output = output_;
    rec.op_a = g(0).node(opa.node).describe();
    rec.op_b = g(1).node(opb.node).describe();
    rec.domain = dom;
    auto describe = [&](int side, const Cursor& c) {
      std::string s = g(side).node(c.node).describe();
      std::size_t idx = is_leaf(side, c.node) ? path_index(side, c.trace) : 0;
      if (idx) s += " (path " + std::to_string(idx) + ")";
      return s + " " + c.map.to_string();
    };
    for (const auto& e : ea) rec.entries_a.push_back(describe(0, e));
    for (const auto& e : eb) rec.entries_b.push_back(describe(1, e));
    res_.matches.push_back(std::move(rec));
  }
  return st;
}

void Checker::check_root(const std::string& name, std::size_t ra, std::size_t rb) {
  OutputReport out;
  out.name = name;
  output_ = name;
  std::vector<Diagnostic> root_diags;
  sink_ = &root_diags;
  piece_text_.clear();
  reason_.clear();
  IntRelation dom;
  try {
    IntRelation da = g(0).defined_elements(ra);
    IntRelation db = g(1).defined_elements(rb);
    if (!is_equal(da, db)) {
      IntRelation diff = simplify(unite(difference(da, db), difference(db, da)));
      Diagnostic d = build_interface_mismatch(name, "the programs write different elements of " + name,
                                              diff.to_string());
      // Statements writing the elements in question.
      for (int side = 0; side < 2; ++side) {
        const std::string& array = g(side).node(side == 0 ? ra : rb).name;
        auto& out_stmts = side == 0 ? d.statements_a : d.statements_b;
        for (const auto& rec : g(side).statements())
          if (rec.array == array && !is_empty(intersect(rec.write_set, diff))) out_stmts.push_back(rec.label);
      }
      emit(std::move(d));
    }
    dom = simplify(intersect(da, db));
    Settled sa = settle(0, start(ra, IntRelation::identity_on(dom)), true);
    Settled sb = settle(1, start(rb, IntRelation::identity_on(dom)), true);
    for (const auto& ca : sa.cursors)
      for (const auto& cb : sb.cursors) {
        IntRelation d = simplify(intersect(domain(ca.map), domain(cb.map)));
        if (is_empty(d)) continue;
        PieceReport piece;
        piece.domain_set = d;
        piece.domain = d.to_string();
        piece_text_ = piece.domain;
        sink_ = &piece.diagnostics;
        reason_.clear();
        pending_.clear();
        std::size_t first_leaf = res_.leaves.size();
        try {
          piece.status = compare_settled(restricted(ca, d), restricted(cb, d));
        } catch (const UnsupportedError& e) {
          piece.status = Status::Unsupported;
          reason_ = e.what();
        }
        for (const auto& pg : pending_) {
          FailureGroup group;
          for (std::size_t k : pg.failing) group.failing.push_back(&piece.diagnostics[k]);
          for (std::size_t l = first_leaf; l < res_.leaves.size(); ++l)
            if (res_.leaves[l].ok) group.succeeding.emplace_back(res_.leaves[l].a, res_.leaves[l].b);
          common_variable_heuristic(g(0), g(1), group, pg.maps);
        }
        if (piece.status == Status::Unsupported) piece.reason = reason_.empty() ? "unsupported" : reason_;
        out.pieces.push_back(std::move(piece));
      }
  } catch (const UnsupportedError& e) {
    PieceReport piece;
    piece.domain_set = dom;
    piece.domain = name;
    piece.status = Status::Unsupported;
    piece.reason = e.what();
    out.pieces.push_back(std::move(piece));
  }
  if (!root_diags.empty()) {
    PieceReport piece;
    piece.status = Status::Inequivalent;
    piece.domain = "interface";
    piece.diagnostics = std::move(root_diags);
    out.pieces.insert(out.pieces.begin(), std::move(piece));
  }
  for (const auto& p : out.pieces) out.status = combine(out.status, p.status);
  res_.outputs.push_back(std::move(out));
}

void Checker::run() {
  ScopedBudget budget(cfg_.budget);
  for (int side = 0; side < 2; ++side) {
    auto cycle = g(side).find_cycle();
    if (!cycle.empty()) {
      std::string names;
      for (const auto& n : cycle) names += (names.empty() ? "" : ", ") + n;
      res_.verdict = {Status::Unsupported, std::string("dependence cycle through ") + names + " in the " +
                                               (side == 0 ? "original" : "transformed") + " program"};
      return;
    }
  }
  for (std::size_t k = 0; k < cfg_.correspondences.size(); ++k) {
    const auto& [xa, xb] = cfg_.correspondences[k];
    auto na = g(0).find_array(xa);
    auto nb = g(1).find_array(xb);
    if (!na || !nb) throw ContractError("correspondence " + xa + "=" + xb + " names an unknown array");
    if (g(0).node(*na).array_class == ArrayClass::Input || g(1).node(*nb).array_class == ArrayClass::Input)
      throw ContractError("correspondence " + xa + "=" + xb + " names an input array");
    cut_[0][*na] = k;
    cut_[1][*nb] = k;
  }

  std::vector<std::string> names;
  for (int side = 0; side < 2; ++side)
    for (std::size_t r : g(side).roots()) {
      const std::string& n = g(side).node(r).name;
      if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    }
  for (const auto& f : cfg_.focus)
    if (std::find(names.begin(), names.end(), f) == names.end())
      throw ContractError("focus names '" + f + "', which is not an output of either program");

  for (const auto& n : names) {
    if (!cfg_.focus.empty() && std::find(cfg_.focus.begin(), cfg_.focus.end(), n) == cfg_.focus.end()) continue;
    auto ra = g(0).find_array(n);
    auto rb = g(1).find_array(n);
    bool out_a = ra && g(0).node(*ra).array_class == ArrayClass::Output;
    bool out_b = rb && g(1).node(*rb).array_class == ArrayClass::Output;
    if (!out_a || !out_b) {
      OutputReport rep;
      rep.name = n;
      rep.status = Status::Inequivalent;
      PieceReport piece;
      piece.status = Status::Inequivalent;
      piece.domain = "interface";
      piece.diagnostics.push_back(build_interface_mismatch(
          n, n + " is an output of the " + std::string(out_a ? "original" : "transformed") + " program only"));
      ++emitted_;
      rep.pieces.push_back(std::move(piece));
      res_.outputs.push_back(std::move(rep));
      continue;
    }
    check_root(n, *ra, *rb);
  }
  for (const auto& [xa, xb] : cfg_.correspondences) check_root(xa + "~" + xb, *g(0).find_array(xa), *g(1).find_array(xb));

  for (const auto& o : res_.outputs) {
    res_.verdict.status = combine(res_.verdict.status, o.status);
    for (const auto& p : o.pieces) {
      if (p.status == Status::Unsupported && res_.verdict.reason.empty()) res_.verdict.reason = p.reason;
      for (const auto& d : p.diagnostics) res_.diagnostics.push_back(d);
    }
  }
  if (res_.verdict.status != Status::Unsupported) res_.verdict.reason.clear();
}

}  // namespace

CheckResult check_equivalence(const Addg& a, const Addg& b, const CheckConfig& cfg) {
  CheckResult res;
  Checker(a, b, cfg, res).run();
  return res;
}

std::vector<FlatPiece> flatten(const Addg& g, std::size_t op_node, const IntRelation& prefix) {
  CheckResult scratch;
  CheckConfig cfg;
  Checker c(g, g, cfg, scratch);
  auto [partials, status] = c.collect(0, c.start(op_node, prefix), g.node(op_node).associative);
  if (status == Status::Unsupported) throw UnsupportedError("flatten failed");
  std::vector<FlatPiece> out;
  for (auto& p : partials) {
    FlatPiece fp{p.dom, {}};
    for (std::size_t i = 0; i < p.entries.size(); ++i)
      fp.entries.push_back({p.entries[i].node, p.entries[i].map, i, p.entries[i].trace});
    out.push_back(std::move(fp));
  }
  return out;
}

}  // namespace eqcheck
