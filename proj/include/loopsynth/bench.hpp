#pragma once

#include "loopsynth/specfile.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace loopsynth {

struct BenchRow {
  std::string instance;
  /// found, notfound, exhausted or error.
  std::string status;
  std::string tier;
  std::string partition;
  std::string permutation;
  double millis = 0;
  bool verified = false;
  /// Error message or loop text; not part of the CSV.
  std::string detail;

  friend bool operator==(const BenchRow& a, const BenchRow& b) {
    return a.instance == b.instance && a.status == b.status && a.tier == b.tier && a.partition == b.partition &&
           a.permutation == b.permutation && a.millis == b.millis && a.verified == b.verified;
  }
};

struct BenchOptions {
  SolverConfig solver = SolverConfig::from_environment();
  /// Overrides the timeout of every spec.
  std::optional<double> timeout;
  unsigned jobs = 1;
  /// Instances carrying one of these tags are skipped.
  std::vector<std::string> skip_tags;
};

/// Synthesizes one spec. Every error becomes a row with status "error".
BenchRow run_instance(const std::string& instance, const std::string& spec_text, const BenchOptions& opt);

/// Runs every *.spec file of `dir` (sorted by name), `opt.jobs` at a time.
std::vector<BenchRow> run_bench(const std::filesystem::path& dir, const BenchOptions& opt);

/// Header instance,status,tier,partition,permutation,millis,verified.
std::string bench_csv(const std::vector<BenchRow>& rows);
/// Throws std::invalid_argument on a malformed table.
std::vector<BenchRow> parse_bench_csv(const std::string& text);
/// Aligned columns for terminals.
std::string bench_table(const std::vector<BenchRow>& rows);

}  // namespace loopsynth
