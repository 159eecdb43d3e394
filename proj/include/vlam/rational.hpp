#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace vlam {

/// Exact rational numbers. All labels, distances and matrix entries use this.
using Rational = mpq_class;

/// Parses "3", "-3", "3/10" or a finite decimal such as "0.25".
/// Returns nullopt for anything else (including irrational spellings).
std::optional<Rational> parse_rational(std::string_view text);

/// Canonical "p/q" form, or "p" when the denominator is one.
std::string to_string(const Rational& r);

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace vlam
