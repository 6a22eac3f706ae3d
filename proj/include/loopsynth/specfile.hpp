#pragma once

#include "loopsynth/parse.hpp"
#include "loopsynth/synth.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace loopsynth {

/// Synthesis input file. Line oriented; '#' starts a comment line.
///
///   name cubes
///   vars c k m n
///   params x0=r y0=y a0        (x0 is the initial value of r; a0 is free)
///   initial c0=c               (symbol for the initial value of c)
///   init n=0                   (pinned initial value)
///   invariant c == n^3 && m == 6n + 6
///   size 5
///   tiers un up fu
///   aux-one
///   timeout 60
///   solver z3
///   partition 2,1
///   order n m k c              (fixed variable order)
///   tag reconstructed
struct SpecFile {
  struct Param {
    std::string name;
    /// Empty when the parameter is not an initial value.
    std::string var;
  };

  std::string name;
  std::vector<std::string> vars;
  std::vector<Param> params;
  std::vector<std::pair<std::string, std::string>> initial;
  std::vector<std::pair<std::string, Rational>> init;
  /// Invariant lines as written; each is a conjunction.
  std::vector<std::string> invariants;
  std::optional<std::size_t> size;
  /// Empty means all tiers.
  std::vector<ShapeTier> tiers;
  bool aux_one = false;
  std::optional<double> timeout;
  std::string solver;
  std::optional<IntegerPartition> partition;
  /// Empty means every order is searched.
  std::vector<std::string> order;
  std::vector<std::string> tags;

  bool has_tag(const std::string& tag) const;
};

/// Throws ParseError with the line and column of the problem, including
/// unknown identifiers in invariants.
SpecFile parse_spec(std::string_view text);

/// Canonical text; parse_spec(print_spec(s)) prints the same text again.
std::string print_spec(const SpecFile& spec);

/// Symbols of the spec: variables, then parameters, then initial symbols.
Resolver spec_resolver(const SpecFile& spec);

/// Request with the spec's options applied on top of `solver`.
SynthRequest to_request(const SpecFile& spec, const SolverConfig& solver = SolverConfig::from_environment());

}  // namespace loopsynth
