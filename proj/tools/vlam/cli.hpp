#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlam/quantale.hpp"
#include "vlam/vcat.hpp"

namespace vlam::cli {

enum Exit { Success = 0, Negative = 1, InputError = 2 };

/// Runs one command line (without the program name) and returns the exit
/// status: 0 on success, PROVED or satisfied; 1 on UNKNOWN or unsatisfied;
/// 2 on input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a V-category file. `fallback` is used when the file has no
/// 'quantale' line; a conflicting line is an error.
FinVCat load_vcat(std::string_view text, std::optional<QuantaleSpec> fallback = std::nullopt);

}  // namespace vlam::cli
