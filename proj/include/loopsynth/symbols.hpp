#pragma once

#include "loopsynth/polynomial.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace loopsynth {

/// Per-session registry of variables. Names are unique; user variables keep
/// their declaration rank and generated symbols are renamed on collision.
class SymbolTable {
 public:
  /// Registers a user variable (program, initial, param). Throws
  /// std::invalid_argument if the name is already taken by another kind.
  Var declare(const std::string& name, VarKind kind);

  /// Generates a symbol named `base` (or `base_<k>` when taken).
  Var fresh(const std::string& base, VarKind kind);

  /// Registers an existing Var; throws if the name is bound to a different Var.
  void add(const Var& v);

  std::optional<Var> lookup(const std::string& name) const;
  bool contains(const Var& v) const;
  const std::vector<Var>& all() const { return order_; }
  std::vector<Var> of_kind(VarKind kind) const;

 private:
  std::map<std::string, Var> by_name_;
  std::vector<Var> order_;
  int next_rank_ = 0;
};

}  // namespace loopsynth
