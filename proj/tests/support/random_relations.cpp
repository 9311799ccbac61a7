#include "random_relations.hpp"

#include <algorithm>
#include <sstream>

namespace eqtest {

using eqcheck::IntRelation;

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::string var_name(std::size_t i, std::size_t in) {
  return i < in ? "i" + std::to_string(i) : "o" + std::to_string(i - in);
}

std::string linear_text(const std::vector<std::int64_t>& coeffs, std::int64_t constant,
                        const std::vector<std::string>& names) {
  std::ostringstream s;
  bool first = true;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    std::int64_t c = coeffs[i];
    if (c == 0) continue;
    if (first) {
      if (c < 0) s << "-";
    } else {
      s << (c < 0 ? " - " : " + ");
    }
    if (std::abs(c) != 1) s << std::abs(c) << "*";
    s << names[i];
    first = false;
  }
  if (first) return std::to_string(constant);
  if (constant != 0) s << (constant < 0 ? " - " : " + ") << std::abs(constant);
  return s.str();
}

bool piece_contains(const ModelPiece& pc, const Point& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] < pc.box[i].first || p[i] > pc.box[i].second) return false;
  std::vector<std::int64_t> vals(p.begin(), p.end());
  for (const ModelExistential& e : pc.exists) {
    std::int64_t v = e.constant;
    for (std::size_t i = 0; i < p.size(); ++i) v += e.coeffs[i] * p[i];
    if (floor_mod(v, e.multiplier) != 0) return false;
    vals.push_back(v / e.multiplier);
  }
  for (const ModelAtom& a : pc.atoms) {
    std::int64_t v = a.constant;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) v += a.coeffs[i] * vals[i];
    switch (a.kind) {
      case ModelAtom::Ge:
        if (v < 0) return false;
        break;
      case ModelAtom::Eq:
        if (v != 0) return false;
        break;
      case ModelAtom::Cong:
        if (floor_mod(v, a.modulus) != 0) return false;
        break;
    }
  }
  return true;
}

void for_each_in_box(const Box& box, const std::function<void(const Point&)>& f) {
  Point p(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (box[i].first > box[i].second) return;
    p[i] = box[i].first;
  }
  while (true) {
    f(p);
    std::size_t i = 0;
    while (i < box.size() && p[i] == box[i].second) {
      p[i] = box[i].first;
      ++i;
    }
    if (i == box.size()) return;
    ++p[i];
  }
}

}  // namespace

bool Model::contains(const Point& p) const {
  return std::any_of(pieces.begin(), pieces.end(), [&](const ModelPiece& pc) { return piece_contains(pc, p); });
}

PointSet Model::points() const {
  PointSet out;
  for (const ModelPiece& pc : pieces)
    for_each_in_box(pc.box, [&](const Point& p) {
      if (piece_contains(pc, p)) out.insert(p);
    });
  return out;
}

std::string Model::text() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < arity(); ++i) names.push_back(var_name(i, in));
  auto tuple = [&](std::size_t from, std::size_t to) {
    std::string s = "[";
    for (std::size_t i = from; i < to; ++i) s += (i > from ? ", " : "") + names[i];
    return s + "]";
  };
  std::string head = tuple(0, in);
  if (out > 0) head += " -> " + tuple(in, arity());

  if (pieces.empty()) return "{" + head + " | false}";
  std::string s;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const ModelPiece& pc = pieces[k];
    std::vector<std::string> vn = names;
    std::vector<std::string> atoms;
    for (std::size_t i = 0; i < arity(); ++i)
      atoms.push_back(std::to_string(pc.box[i].first) + " <= " + names[i] + " <= " + std::to_string(pc.box[i].second));
    for (std::size_t j = 0; j < pc.exists.size(); ++j) {
      std::string e = "e" + std::to_string(j);
      vn.push_back(e);
      const ModelExistential& ex = pc.exists[j];
      atoms.push_back(std::to_string(ex.multiplier) + "*" + e + " = " + linear_text(ex.coeffs, ex.constant, names));
    }
    for (const ModelAtom& a : pc.atoms) {
      std::string lin = linear_text(a.coeffs, a.constant, vn);
      switch (a.kind) {
        case ModelAtom::Ge: atoms.push_back(lin + " >= 0"); break;
        case ModelAtom::Eq: atoms.push_back(lin + " = 0"); break;
        case ModelAtom::Cong:
          // Residue form keeps the constant on the right.
          atoms.push_back(linear_text(a.coeffs, 0, vn) + " mod " + std::to_string(a.modulus) + " = " +
                          std::to_string(floor_mod(-a.constant, a.modulus)));
          break;
      }
    }
    std::string body;
    for (std::size_t i = 0; i < atoms.size(); ++i) body += (i ? " and " : "") + atoms[i];
    if (!pc.exists.empty()) {
      std::string q;
      for (std::size_t j = 0; j < pc.exists.size(); ++j) q += (j ? ", " : "") + std::string("e") + std::to_string(j);
      body = "exists " + q + ": " + body;
    }
    s += (k ? " union " : "") + std::string("{") + head + " | " + body + "}";
  }
  return s;
}

RelationShape RelationGenerator::shape(bool allow_set) {
  while (true) {
    RelationShape s{static_cast<std::size_t>(uniform(1, 3)), static_cast<std::size_t>(uniform(0, 2))};
    if (s.in + s.out > 3 || (!allow_set && s.out == 0)) continue;
    return s;
  }
}

ModelPiece RelationGenerator::piece(std::size_t arity) {
  // Narrower boxes in higher arity keep exhaustive scans affordable.
  const std::int64_t width = arity == 1 ? 64 : arity == 2 ? 20 : 7;
  ModelPiece pc;
  for (std::size_t i = 0; i < arity; ++i) {
    std::int64_t w = uniform(0, width);
    std::int64_t lo = uniform(-32, 32 - w);
    pc.box.push_back({lo, lo + w});
  }
  auto coeffs = [&](std::size_t n, std::int64_t r) {
    std::vector<std::int64_t> c(n);
    for (auto& x : c) x = uniform(-r, r);
    return c;
  };
  if (chance(0.3)) {
    ModelExistential e;
    e.coeffs = coeffs(arity, 2);
    if (std::all_of(e.coeffs.begin(), e.coeffs.end(), [](auto v) { return v == 0; })) e.coeffs[0] = 1;
    e.constant = uniform(-3, 3);
    e.multiplier = uniform(2, 4);
    pc.exists.push_back(e);
  }
  std::size_t nv = arity + pc.exists.size();
  int n_ge = static_cast<int>(uniform(0, 2));
  for (int i = 0; i < n_ge; ++i) pc.atoms.push_back({ModelAtom::Ge, coeffs(nv, 3), uniform(-10, 10), 0});
  if (arity > 1 && chance(0.25)) pc.atoms.push_back({ModelAtom::Eq, coeffs(arity, 2), uniform(-4, 4), 0});
  if (chance(0.3)) pc.atoms.push_back({ModelAtom::Cong, coeffs(nv, 3), uniform(-4, 4), uniform(2, 4)});
  for (auto& a : pc.atoms) a.coeffs.resize(nv, 0);
  return pc;
}

Model RelationGenerator::generate(RelationShape shape) {
  Model m;
  m.in = shape.in;
  m.out = shape.out;
  int n = static_cast<int>(uniform(0, 3));
  if (n == 0 && chance(0.7)) n = 1;
  for (int i = 0; i < n; ++i) m.pieces.push_back(piece(m.arity()));
  if (!m.pieces.empty() && chance(0.15)) m.pieces.push_back(m.pieces.front());
  return m;
}

PointSet model_compose(const PointSet& first, const PointSet& second, std::size_t first_in, std::size_t mid) {
  PointSet out;
  for (const Point& a : first) {
    Point am(a.begin() + static_cast<std::ptrdiff_t>(first_in), a.end());
    for (const Point& b : second) {
      if (!std::equal(am.begin(), am.end(), b.begin(), b.begin() + static_cast<std::ptrdiff_t>(mid))) continue;
      Point p(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(first_in));
      p.insert(p.end(), b.begin() + static_cast<std::ptrdiff_t>(mid), b.end());
      out.insert(p);
    }
  }
  return out;
}

PointSet model_union(const PointSet& a, const PointSet& b) {
  PointSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

PointSet model_intersect(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

PointSet model_difference(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

std::vector<Box> boxes_of(const Model& m) {
  std::vector<Box> out;
  for (const auto& pc : m.pieces) out.push_back(pc.box);
  return out;
}

std::vector<Box> compose_boxes(const Model& first, const Model& second) {
  std::vector<Box> out;
  for (const auto& a : first.pieces)
    for (const auto& b : second.pieces) {
      Box box(a.box.begin(), a.box.begin() + static_cast<std::ptrdiff_t>(first.in));
      box.insert(box.end(), b.box.begin() + static_cast<std::ptrdiff_t>(second.in), b.box.end());
      out.push_back(box);
    }
  return out;
}

BoxScan scan_boxes(const IntRelation& r, const std::vector<Box>& boxes) {
  BoxScan scan;
  std::size_t n = r.num_dims();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(var_name(i, r.in_arity()));
  // The union of the boxes, as a relation of the same shape.
  IntRelation cover(r.in_space(), r.out_space());
  for (const Box& b : boxes) {
    std::string head = "[";
    for (std::size_t i = 0; i < r.in_arity(); ++i) head += (i ? ", " : "") + names[i];
    head += "]";
    if (r.out_arity() > 0) {
      head += " -> [";
      for (std::size_t i = r.in_arity(); i < n; ++i) head += (i > r.in_arity() ? ", " : "") + names[i];
      head += "]";
    }
    std::string body;
    for (std::size_t i = 0; i < n; ++i)
      body += (i ? " and " : "") + std::to_string(b[i].first) + " <= " + names[i] + " <= " + std::to_string(b[i].second);
    cover = unite(cover, IntRelation::parse("{" + head + " | " + (n ? body : "true") + "}"));
  }
  scan.complete = eqcheck::is_subset(r, cover);
  // Quantifier-free pieces are evaluated directly; anything else goes
  // through a one-point emptiness test.
  IntRelation simple = eqcheck::simplify(r);
  bool direct = std::all_of(simple.conjuncts().begin(), simple.conjuncts().end(),
                            [](const eqcheck::Conjunct& c) { return c.num_exists() == 0; });
  std::set<Point> seen;
  std::vector<eqcheck::Int> vals(n);
  for (const Box& b : boxes)
    for_each_in_box(b, [&](const Point& p) {
      if (!seen.insert(p).second) return;
      bool in = false;
      if (direct) {
        for (std::size_t i = 0; i < n; ++i) vals[i] = static_cast<long>(p[i]);
        for (const auto& c : simple.conjuncts()) in = in || c.satisfied_by(vals);
      } else {
        in = contains(r, p);
      }
      if (in) scan.points.insert(p);
    });
  return scan;
}

}  // namespace eqtest
