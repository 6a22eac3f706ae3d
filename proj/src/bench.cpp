#include "loopsynth/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace loopsynth {

namespace {

/// Re-reads the printed loop and checks it against the spec's invariants.
bool reverify(const SpecFile& spec, const AffineLoop& loop) {
  LoopFile parsed = parse_loop(render_loop(loop));
  Resolver base = loop_resolver(parsed.loop);
  std::map<std::string, Var> extra;
  for (const auto& [sym, var] : spec.initial) {
    Var s(sym, VarKind::Param, 5000 + static_cast<int>(extra.size()));
    auto it = std::find_if(parsed.loop.vars.begin(), parsed.loop.vars.end(),
                           [&](const Var& v) { return v.name == var; });
    if (it == parsed.loop.vars.end()) return false;
    parsed.loop.initial_symbols[s] = static_cast<std::size_t>(it - parsed.loop.vars.begin());
    extra.emplace(sym, s);
  }
  Resolver res = [&](const std::string& name) -> Var {
    if (auto it = extra.find(name); it != extra.end()) return it->second;
    return base(name);
  };
  std::vector<Polynomial> invs;
  for (const auto& text : spec.invariants) {
    auto ps = parse_conjunction(text, res);
    invs.insert(invs.end(), ps.begin(), ps.end());
  }
  return check_invariants(parsed.loop, invs).holds;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quote in CSV line");
  out.push_back(cur);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string format_millis(double ms) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << ms;
  return out.str();
}

const char* kHeader = "instance,status,tier,partition,permutation,millis,verified";

}  // namespace

BenchRow run_instance(const std::string& instance, const std::string& spec_text, const BenchOptions& opt) {
  BenchRow row;
  row.instance = instance;
  auto start = std::chrono::steady_clock::now();
  try {
    SpecFile spec = parse_spec(spec_text);
    SynthRequest req = to_request(spec, opt.solver);
    if (opt.timeout) req.timeout_seconds = *opt.timeout;
    SynthResult r = synthesize(req);
    row.status = to_string(r.status);
    if (!r.loops.empty()) {
      const SynthLoop& found = r.loops.front();
      row.tier = to_string(found.cell.tier);
      row.partition = found.cell.partition.to_string();
      for (const auto& v : found.cell.order) row.permutation += (row.permutation.empty() ? "" : " ") + v.name;
      row.verified = reverify(spec, found.loop);
      row.detail = render_loop(found.loop, LoopStyle::Auto, instance);
    } else {
      row.detail = r.detail;
    }
  } catch (const std::exception& e) {
    row.status = "error";
    row.detail = e.what();
  }
  row.millis = std::round(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count() * 10) / 10;
  return row;
}

std::vector<BenchRow> run_bench(const std::filesystem::path& dir, const BenchOptions& opt) {
  if (!std::filesystem::is_directory(dir)) throw std::invalid_argument("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".spec") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::optional<BenchRow>> slots(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      std::ifstream in(files[i]);
      std::stringstream text;
      text << in.rdbuf();
      std::string name = files[i].stem().string();
      if (!opt.skip_tags.empty()) {
        try {
          SpecFile spec = parse_spec(text.str());
          bool skip = std::any_of(opt.skip_tags.begin(), opt.skip_tags.end(),
                                  [&](const std::string& t) { return spec.has_tag(t); });
          if (skip) continue;
        } catch (const std::exception&) {
        }
      }
      slots[i] = run_instance(name, text.str(), opt);
    }
  };
  unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(std::max<std::size_t>(files.size(), 1))));
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  std::vector<BenchRow> rows;
  for (auto& s : slots) {
    if (s) rows.push_back(std::move(*s));
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << kHeader << "\n";
  for (const auto& r : rows) {
    out << csv_field(r.instance) << "," << r.status << "," << r.tier << "," << csv_field(r.partition) << ","
        << csv_field(r.permutation) << "," << format_millis(r.millis) << "," << (r.verified ? "yes" : "no") << "\n";
  }
  return out.str();
}

std::vector<BenchRow> parse_bench_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw std::invalid_argument("missing CSV header");
  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 7) throw std::invalid_argument("expected 7 fields: " + line);
    BenchRow r;
    r.instance = f[0];
    r.status = f[1];
    r.tier = f[2];
    r.partition = f[3];
    r.permutation = f[4];
    try {
      r.millis = std::stod(f[5]);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad millis field: " + f[5]);
    }
    if (f[6] != "yes" && f[6] != "no") throw std::invalid_argument("bad verified field: " + f[6]);
    r.verified = f[6] == "yes";
    rows.push_back(r);
  }
  return rows;
}

std::string bench_table(const std::vector<BenchRow>& rows) {
  std::vector<std::array<std::string, 7>> cells;
  cells.push_back({"instance", "status", "tier", "partition", "permutation", "millis", "verified"});
  for (const auto& r : rows) {
    cells.push_back({r.instance, r.status, r.tier, r.partition, r.permutation, format_millis(r.millis),
                     r.verified ? "yes" : "no"});
  }
  std::array<std::size_t, 7> width{};
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < 7; ++i) width[i] = std::max(width[i], c[i].size());
  }
  std::ostringstream out;
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < 7; ++i) {
      out << std::left << std::setw(static_cast<int>(width[i])) << c[i] << (i + 1 < 7 ? "  " : "\n");
    }
  }
  return out.str();
}

}  // namespace loopsynth
