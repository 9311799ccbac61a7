#pragma once

#include <cstdint>
#include <vector>

#include "eqcheck/relation.hpp"

namespace eqcheck::detail {

Int floor_div(const Int& a, const Int& b);
Int mod_floor(const Int& a, const Int& m);
Int gcd(const Int& a, const Int& b);
Int lcm(const Int& a, const Int& b);

/// Charges work units against the active budget; throws UnsupportedError
/// once it is exhausted.
class WorkMeter {
 public:
  WorkMeter();
  void charge(std::uint64_t units = 1);

 private:
  std::uint64_t used_ = 0;
  std::uint64_t limit_;
};

/// Canonicalizes constraints in place. Returns false when the conjunct is
/// trivially infeasible.
bool normalize(Conjunct& c);

void remove_var(Conjunct& c, std::size_t index);

/// Reorders variables: new variable i is old variable perm[i].
Conjunct permute(const Conjunct& c, const std::vector<std::size_t>& perm,
                 std::size_t dims, std::size_t exists);

/// Exact projection of all existentials. The union of the returned
/// quantifier-free conjuncts has the same point set as c.
std::vector<Conjunct> eliminate_existentials(const Conjunct& c, WorkMeter& meter);
std::vector<Conjunct> eliminate_existentials(const Conjunct& c);

bool conjunct_is_empty(const Conjunct& c, WorkMeter& meter);
bool conjunct_is_empty(const Conjunct& c);

/// Pieces of (p and not q); q must be quantifier-free over p's dims.
std::vector<Conjunct> subtract(const Conjunct& p, const Conjunct& q, WorkMeter& meter);

/// Resizes each expression to `nvars` columns, mapping old column i to
/// column map[i].
LinearExpr remap(const LinearExpr& e, const std::vector<std::size_t>& map, std::size_t nvars);

}  // namespace eqcheck::detail
