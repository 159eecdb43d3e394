#pragma once

#include <memory>
#include <random>
#include <vector>

#include "vlam/quantale.hpp"
#include "vlam/syntax.hpp"
#include "vlam/vcat.hpp"

namespace vlam::testing {

using Rng = std::mt19937_64;

/// wait_0..wait_{max_wait} : X -> X, merge : X, X -> X, erase : X -> I, unit_x : I -> X.
Signature test_signature(int max_wait = 3);

QuantaleValue random_value(QuantaleSpec spec, Rng& rng);

/// A random valid V-category: random entries closed under tensor-transitivity.
/// Zero-distance pairs are common so that quotients are non-trivial.
FinVCat random_vcat(QuantaleSpec spec, std::size_t size, Rng& rng, bool symmetric = false);

Type random_type(Rng& rng, int depth);

struct TermGenOptions {
  int max_wait = 3;
  int fuel = 4;
  int type_depth = 2;
};

/// A term of type `target` using every variable of `ctx` exactly once.
Term random_term(const Context& ctx, const Type& target, Rng& rng, const TermGenOptions& options = {});

/// A context x1:A1, ..., xn:An with n <= max_vars and random types.
Context random_context(Rng& rng, std::size_t max_vars, int type_depth = 1);

struct Judgement {
  Context context;
  Term term;
  Type type;
};
Judgement random_judgement(Rng& rng, std::size_t max_vars, const TermGenOptions& options = {});

/// Closed term of type A built only from unit_x, erase, merge and the term formers.
Term closed_inhabitant(const Type& a);

}  // namespace vlam::testing
