#include "loopsynth/symbols.hpp"

#include <stdexcept>

namespace loopsynth {

Var SymbolTable::declare(const std::string& name, VarKind kind) {
  if (auto it = by_name_.find(name); it != by_name_.end()) {
    if (it->second.kind == kind) return it->second;
    throw std::invalid_argument("symbol '" + name + "' already declared as " + to_string(it->second.kind));
  }
  Var v(name, kind, next_rank_++);
  by_name_.emplace(name, v);
  order_.push_back(v);
  return v;
}

Var SymbolTable::fresh(const std::string& base, VarKind kind) {
  std::string name = base;
  for (int k = 1; by_name_.count(name) != 0; ++k) name = base + "_" + std::to_string(k);
  Var v(name, kind);
  by_name_.emplace(name, v);
  order_.push_back(v);
  return v;
}

void SymbolTable::add(const Var& v) {
  if (auto it = by_name_.find(v.name); it != by_name_.end()) {
    if (!(it->second == v)) throw std::invalid_argument("symbol '" + v.name + "' bound twice");
    return;
  }
  if (!v.generated()) next_rank_ = std::max(next_rank_, v.rank + 1);
  by_name_.emplace(v.name, v);
  order_.push_back(v);
}

std::optional<Var> SymbolTable::lookup(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

bool SymbolTable::contains(const Var& v) const {
  auto it = by_name_.find(v.name);
  return it != by_name_.end() && it->second == v;
}

std::vector<Var> SymbolTable::of_kind(VarKind kind) const {
  std::vector<Var> out;
  for (const auto& v : order_) {
    if (v.kind == kind) out.push_back(v);
  }
  return out;
}

}  // namespace loopsynth
