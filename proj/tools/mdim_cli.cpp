#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdim/checks.hpp"
#include "mdim/mdim.hpp"

using namespace mdim;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kInputError = 2, kBudget = 3 };

// Key/value report printed as `key=value` lines, or as one JSON object with --json.
class Report {
 public:
  template <typename T>
  void put(const std::string& key, const T& value) {
    std::ostringstream s;
    s << value;
    items_.push_back({key, s.str(), value});
  }
  void put(const std::string& key, const std::vector<Vertex>& set) { items_.push_back({key, join(set), set}); }
  void put(const std::string& key, double ms) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", ms);
    items_.push_back({key, buf, std::stod(buf)});
  }

  void print(bool json) const {
    if (json) {
      nlohmann::ordered_json j;
      for (const auto& it : items_) j[it.key] = it.value;
      std::cout << j.dump(2) << '\n';
    } else {
      for (const auto& it : items_) std::cout << it.key << '=' << it.text << '\n';
    }
  }

  static std::string join(const std::vector<Vertex>& set) {
    std::string s;
    for (std::size_t i = 0; i < set.size(); ++i) s += (i ? "," : "") + std::to_string(set[i]);
    return s;
  }

 private:
  struct Item {
    std::string key, text;
    nlohmann::ordered_json value;
  };
  std::vector<Item> items_;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// FNV-1a over the canonical edge-list text, so the digest ignores formatting of the input file.
std::string digest(const Graph& g) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : format_graph(g)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<Vertex> parse_set(const std::string& text, int n) {
  std::vector<Vertex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      throw InputError("bad vertex id '" + item + "'");
    }
    if (used != item.size() || v < 0 || v >= n) throw InputError("bad vertex id '" + item + "'");
    out.push_back(static_cast<Vertex>(v));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int default_jobs() {
  if (const char* env = std::getenv("MDIM_JOBS")) {
    int j = std::atoi(env);
    if (j > 0) return j;
  }
  return 1;
}

struct DimArgs {
  std::string file;
  std::string algo = "dp";
  int root = -1;
  int jobs = default_jobs();
  std::size_t memo_cap = DpOptions{}.memo_cap;
  int oracle_max_n = 16;
};

int run_dim(const DimArgs& a, bool json) {
  const auto t0 = std::chrono::steady_clock::now();
  Graph g = parse_graph(read_input(a.file));
  if (a.root >= g.size()) throw InputError("root out of range");
  if (!is_chordal(g).chordal) throw GraphError(GraphError::Kind::NotChordal, "input graph is not chordal");
  const auto d = all_pairs_distances(g);
  const bool want_dp = a.algo != "brute", want_brute = a.algo != "dp";
  const bool rooted = a.root >= 0;

  Report r;
  r.put("command", "dim");
  r.put("algo", a.algo);
  r.put("input_digest", digest(g));
  r.put("n", g.size());
  r.put("m", g.edges().size());
  if (rooted) r.put("root", a.root);

  int dp_value = -1, brute_value = -1;
  bool verified = true;
  if (want_dp) {
    DpOptions opt;
    opt.memo_cap = a.memo_cap;
    if (rooted) {
      RootedSolver s(g, d, a.root, opt);
      const Dim v = s.imd();
      auto t1 = std::chrono::steady_clock::now();
      auto w = s.witness(s.root_instance()).value_or(std::vector<Vertex>{});
      const double wit_ms = ms_since(t1);
      dp_value = v;
      verified = is_resolving_set(w, d) && std::binary_search(w.begin(), w.end(), a.root) &&
                 static_cast<int>(w.size()) == v;
      r.put("dp_dim", v);
      r.put("dp_witness", w);
      r.put("dp_witness_verified", verified ? "yes" : "no");
      r.put("memo_entries", s.memo_entries());
      r.put("time_tree_ms", s.times().tree_ms);
      r.put("time_context_ms", s.times().context_ms);
      r.put("time_solve_ms", s.times().solve_ms);
      r.put("time_witness_ms", wit_ms);
    } else {
      auto res = metric_dimension(g, opt, a.jobs);
      dp_value = res.dim;
      verified = res.witness_verified;
      PhaseTimes sum;
      std::size_t memo_total = 0, memo_max = 0;
      for (const auto& run : res.runs) {
        sum.tree_ms += run.times.tree_ms;
        sum.context_ms += run.times.context_ms;
        sum.solve_ms += run.times.solve_ms;
        sum.witness_ms += run.times.witness_ms;
        memo_total += run.memo_entries;
        memo_max = std::max(memo_max, run.memo_entries);
      }
      r.put("dp_dim", res.dim);
      r.put("dp_witness", res.witness);
      r.put("dp_witness_verified", verified ? "yes" : "no");
      r.put("dp_best_root", res.best_root);
      r.put("roots", res.runs.size());
      r.put("memo_entries_total", memo_total);
      r.put("memo_entries_max", memo_max);
      r.put("time_tree_ms", sum.tree_ms);
      r.put("time_context_ms", sum.context_ms);
      r.put("time_solve_ms", sum.solve_ms);
      r.put("time_witness_ms", sum.witness_ms);
    }
  }
  if (want_brute) {
    auto t1 = std::chrono::steady_clock::now();
    std::optional<Vertex> req;
    if (rooted) req = a.root;
    auto rep = min_resolving_set(g, req, a.oracle_max_n);
    brute_value = rep.size;
    r.put("brute_dim", rep.size);
    r.put("brute_witness", rep.witness);
    r.put("time_brute_ms", ms_since(t1));
  }
  const bool agree = !(want_dp && want_brute) || dp_value == brute_value;
  r.put("time_total_ms", ms_since(t0));
  r.put("status", !verified ? "witness_failed" : agree ? "ok" : "mismatch");
  r.print(json);
  return verified && agree ? kOk : kVerifyFailed;
}

int run_tree(const std::string& file, int root, const std::string& format) {
  Graph g = parse_graph(read_input(file));
  if (root < 0 || root >= g.size()) throw InputError("root out of range");
  auto t = build_nice_clique_tree(g, root);
  if (auto err = validate_nice_tree(g, t, root)) {
    std::cerr << "error: tree validation failed: " << *err << '\n';
    return kVerifyFailed;
  }
  std::cout << (format == "dot" ? export_tree_dot(t) : export_tree_text(t));
  return kOk;
}

int run_check(const std::string& file, const std::string& set_text, bool json) {
  Graph g = parse_graph(read_input(file));
  const auto set = parse_set(set_text, g.size());
  const auto d = all_pairs_distances(g);
  Report r;
  r.put("command", "check");
  r.put("input_digest", digest(g));
  r.put("set", set);
  std::optional<std::pair<Vertex, Vertex>> bad;
  for (Vertex u = 0; u < g.size() && !bad; ++u)
    for (Vertex v = u + 1; v < g.size() && !bad; ++v) {
      bool hit = false;
      for (Vertex s : set) hit = hit || resolves(s, u, v, d);
      if (!hit) bad = std::make_pair(u, v);
    }
  r.put("verdict", bad ? "not resolving" : "resolving");
  if (bad) r.put("unresolved_pair", std::to_string(bad->first) + "," + std::to_string(bad->second));
  r.print(json);
  return bad ? kVerifyFailed : kOk;
}

struct SelftestArgs {
  int trials = 50;
  int n_max = 8;
  int omega_max = 3;
  std::uint64_t seed = 1;
  int oracle_max_n = 16;
};

int run_selftest(const SelftestArgs& a, bool json) {
  if (a.n_max < 2 || a.omega_max < 2 || a.trials < 0) throw InputError("selftest needs n-max >= 2, omega-max >= 2");
  if (a.omega_max > kMaxDpBag) throw InputError("omega-max above " + std::to_string(kMaxDpBag));
  std::mt19937_64 rng(a.seed);
  long long equivalence = 0, mismatches = 0, tree_checks = 0, tree_failures = 0;
  checks::Tally far, close, proj, trace, memo, exhaustive, sampled, dom;
  for (int t = 0; t < a.trials; ++t) {
    const int n = 2 + static_cast<int>(rng() % (a.n_max - 1));
    const int omega = 2 + static_cast<int>(rng() % (a.omega_max - 1));
    Graph g = random_chordal(n, omega, rng());
    const auto d = all_pairs_distances(g);
    if (n <= a.oracle_max_n) {
      ++equivalence;
      auto res = metric_dimension(g);
      if (res.dim != min_resolving_set(g, std::nullopt, a.oracle_max_n).size || !res.witness_verified) ++mismatches;
    }
    for (Vertex r = 0; r < n; ++r) {
      auto tree = build_nice_clique_tree(g, r);
      ++tree_checks;
      if (validate_nice_tree(g, tree, r)) ++tree_failures;
      far.merge(checks::far_pairs_resolved(g, tree, d));
      proj.merge(checks::projections_preserved(tree, d));
      trace.merge(checks::trace_soundness(tree, d));
      close.merge(checks::close_pairs_resolved(g, tree, d, rng, 4));
    }
    if (n <= 8) {
      RootedSolver s(g, d, static_cast<Vertex>(rng() % n));
      auto rep = checks::node_semantics(s, d, rng, 20, 1 << 12);
      memo.merge(rep.memo);
      exhaustive.merge(rep.exhaustive);
      sampled.merge(rep.sampled);
      dom.merge(checks::dominance(s, d, rng, 20));
    }
  }
  const bool pass = mismatches == 0 && tree_failures == 0 && far.ok() && close.ok() && proj.ok() && trace.ok() &&
                    memo.ok() && exhaustive.ok() && sampled.ok() && dom.ok();
  Report r;
  r.put("command", "selftest");
  r.put("seed", a.seed);
  r.put("trials", a.trials);
  r.put("equivalence_checked", equivalence);
  r.put("equivalence_mismatches", mismatches);
  r.put("tree_checked", tree_checks);
  r.put("tree_violations", tree_failures);
  auto tally = [&](const std::string& name, const checks::Tally& x) {
    r.put(name + "_checked", x.checked);
    r.put(name + "_violations", x.violations);
  };
  tally("far_pairs", far);
  tally("close_pairs", close);
  tally("projection", proj);
  tally("trace", trace);
  tally("node_memo", memo);
  tally("node_exhaustive", exhaustive);
  tally("node_sampled", sampled);
  tally("dominance", dom);
  r.put("verdict", pass ? "pass" : "fail");
  r.print(json);
  return pass ? kOk : kVerifyFailed;
}

int run_bench(const std::string& family, const std::vector<int>& sizes, int omega, std::uint64_t seed,
              std::size_t memo_cap, int jobs) {
  if (family != "tree" && family != "chordal") throw InputError("unknown family " + family);
  const int w = family == "tree" ? 2 : omega;
  std::cout << "family n omega dim roots memo_max tree_ms context_ms solve_ms witness_ms total_ms\n";
  for (int n : sizes) {
    if (n < 1) throw InputError("sizes must be positive");
    Graph g = random_chordal(n, w, seed + static_cast<std::uint64_t>(n));
    DpOptions opt;
    opt.memo_cap = memo_cap;
    const auto t0 = std::chrono::steady_clock::now();
    auto res = metric_dimension(g, opt, jobs);
    const double total = ms_since(t0);
    PhaseTimes sum;
    std::size_t memo_max = 0;
    for (const auto& run : res.runs) {
      sum.tree_ms += run.times.tree_ms;
      sum.context_ms += run.times.context_ms;
      sum.solve_ms += run.times.solve_ms;
      sum.witness_ms += run.times.witness_ms;
      memo_max = std::max(memo_max, run.memo_entries);
    }
    std::printf("%s %d %d %d %zu %zu %.3f %.3f %.3f %.3f %.3f\n", family.c_str(), n, clique_number(g), res.dim,
                res.runs.size(), memo_max, sum.tree_ms, sum.context_ms, sum.solve_ms, sum.witness_ms, total);
    if (!res.witness_verified) return kVerifyFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact metric dimension of chordal graphs"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "print the report as a JSON object");

  DimArgs dim;
  auto* dim_cmd = app.add_subcommand("dim", "compute the metric dimension");
  dim_cmd->add_option("--algo", dim.algo, "dp, brute or both")->check(CLI::IsMember({"dp", "brute", "both"}));
  dim_cmd->add_option("--root", dim.root, "minimum over resolving sets containing this vertex");
  dim_cmd->add_option("--jobs", dim.jobs, "worker threads for per-root runs")->check(CLI::PositiveNumber);
  dim_cmd->add_option("--memo-cap", dim.memo_cap, "memo entries per root before giving up");
  dim_cmd->add_option("--oracle-max-n", dim.oracle_max_n, "largest n the brute-force oracle accepts");
  dim_cmd->add_option("file", dim.file, "edge-list file, - for stdin")->required();
  dim_cmd->add_flag("--json", json, "print the report as a JSON object");

  std::string tree_file, tree_format = "text";
  int tree_root = 0;
  auto* tree_cmd = app.add_subcommand("tree", "print the nice clique tree");
  tree_cmd->add_option("--root", tree_root, "root vertex")->required();
  tree_cmd->add_option("--format", tree_format, "text or dot")->check(CLI::IsMember({"text", "dot"}));
  tree_cmd->add_option("file", tree_file, "edge-list file, - for stdin")->required();

  int gen_n = 10, gen_omega = 3;
  std::uint64_t gen_seed = 1;
  auto* gen_cmd = app.add_subcommand("gen", "print a random connected chordal graph");
  gen_cmd->add_option("--n", gen_n, "vertex count")->required();
  gen_cmd->add_option("--omega", gen_omega, "maximum clique size")->required();
  gen_cmd->add_option("--seed", gen_seed, "random seed")->required();

  std::string check_file, check_set;
  auto* check_cmd = app.add_subcommand("check", "verify a resolving set");
  check_cmd->add_option("--set", check_set, "comma-separated vertex ids")->required();
  check_cmd->add_option("file", check_file, "edge-list file, - for stdin")->required();
  check_cmd->add_flag("--json", json, "print the report as a JSON object");

  SelftestArgs st;
  auto* st_cmd = app.add_subcommand("selftest", "randomized DP-vs-oracle equivalence and invariant suites");
  st_cmd->add_option("--trials", st.trials, "number of random graphs");
  st_cmd->add_option("--n-max", st.n_max, "largest vertex count");
  st_cmd->add_option("--omega-max", st.omega_max, "largest clique size");
  st_cmd->add_option("--seed", st.seed, "random seed");
  st_cmd->add_option("--oracle-max-n", st.oracle_max_n, "largest n the brute-force oracle accepts");
  st_cmd->add_flag("--json", json, "print the report as a JSON object");

  std::string bench_family = "tree";
  std::vector<int> bench_sizes{10, 20, 50};
  int bench_omega = 3, bench_jobs = default_jobs();
  std::uint64_t bench_seed = 1;
  std::size_t bench_cap = DpOptions{}.memo_cap;
  auto* bench_cmd = app.add_subcommand("bench", "timing table on random graph families");
  bench_cmd->add_option("--family", bench_family, "tree or chordal")->check(CLI::IsMember({"tree", "chordal"}));
  bench_cmd->add_option("--sizes", bench_sizes, "vertex counts")->delimiter(',');
  bench_cmd->add_option("--omega", bench_omega, "maximum clique size for the chordal family");
  bench_cmd->add_option("--seed", bench_seed, "random seed");
  bench_cmd->add_option("--memo-cap", bench_cap, "memo entries per root before giving up");
  bench_cmd->add_option("--jobs", bench_jobs, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*dim_cmd) return run_dim(dim, json);
    if (*tree_cmd) return run_tree(tree_file, tree_root, tree_format);
    if (*gen_cmd) {
      std::cout << format_graph(random_chordal(gen_n, gen_omega, gen_seed));
      return kOk;
    }
    if (*check_cmd) return run_check(check_file, check_set, json);
    if (*st_cmd) return run_selftest(st, json);
    if (*bench_cmd) return run_bench(bench_family, bench_sizes, bench_omega, bench_seed, bench_cap, bench_jobs);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
