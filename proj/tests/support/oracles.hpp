#pragma once

#include <map>
#include <vector>

#include "vlam/typecheck.hpp"

namespace vlam::testing {

/// Every derivation of ctx |- v obtained by trying all assignments of context
/// variables to premises and every ordering of each premise context that can
/// still interleave to ctx, keeping the ones whose conclusion context is a
/// shuffle of the parts. Independent of infer's free-variable projection.
std::vector<Derivation> all_derivations(const Signature& sig, const Context& ctx, const Term& v);

}  // namespace vlam::testing

namespace vlam::testing {

/// A wait term wait_{s[0]}(wait_{s[1]}(... x)), outermost first.
using WaitStack = std::vector<int>;

/// Least total cost of a chain of at most `max_steps` single rewrites turning
/// `a` into `b`, in the wait theory with indices bounded by `bound`. Rewrites:
/// change one index by |n - m|, drop or insert a zero, merge or split two
/// adjacent indices. Stacks missing from the result are unreachable.
std::map<WaitStack, long> wait_chain_costs(const WaitStack& a, int max_steps, int bound);

}  // namespace vlam::testing
