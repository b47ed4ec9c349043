// sperf: command-line front end for the lattice toolkit and the dimension-12 driver.
// Exit codes: 0 success, 1 a claim failed, 2 usage or input error.

#include "sperf/io/json.hpp"
#include "sperf/prover/prover.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace sperf;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a JSON file, "-" for stdin, or a catalog label such as CT or E6+E6
Lattice load_lattice(const std::string& src) {
  json j;
  if (src == "-") {
    j = json::parse(std::cin);
  } else if (std::filesystem::is_regular_file(src)) {
    std::ifstream in(src);
    j = json::parse(in);
  } else {
    try {
      return named_lattice(src);
    } catch (const std::exception&) {
      throw UsageError("no such file or catalog label: " + src);
    }
  }
  Lattice l = io::parse_lattice(j);
  if (l.label.empty()) l.label = src == "-" ? "stdin" : std::filesystem::path(src).stem().string();
  return l;
}

void emit(const json& j, bool pretty) { std::cout << (pretty ? j.dump(2) : j.dump()) << "\n"; }

// "7" or "7^1"
long parse_index(const std::string& s) {
  auto caret = s.find('^');
  long p, k = 1;
  try {
    p = std::stol(s.substr(0, caret));
    if (caret != std::string::npos) k = std::stol(s.substr(caret + 1));
  } catch (const std::exception&) {
    throw UsageError("bad --index: " + s);
  }
  if (k != 1) throw UsageError("only prime index p (p^1) is supported, got " + s);
  if (!is_prime(p)) throw UsageError("index must be prime, got " + std::to_string(p));
  return p;
}

Vec parse_prefix(const std::string& s) {
  Vec v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) v.push_back(std::stol(tok));
  return v;
}

// scans larger than this need --tier slow (or a --prefix slice)
constexpr std::uint64_t kFastCandidateLimit = 20'000'000;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact lattice toolkit: shells, designs, glue, isometry, sublattice search"};
  app.require_subcommand(1);
  bool pretty = false;
  app.add_flag("--pretty", pretty, "indent JSON output");

  // catalog
  auto* cat = app.add_subcommand("catalog", "list named lattices or emit one as JSON");
  std::string cat_label;
  cat->add_option("label", cat_label, "entry to emit");

  // min
  auto* mn = app.add_subcommand("min", "minimum and kissing number");
  std::string mn_in;
  bool mn_dual = false;
  mn->add_option("lattice", mn_in, "lattice JSON file, - or catalog label")->required();
  mn->add_flag("--dual", mn_dual, "use the dual lattice");

  // shortest
  auto* sh = app.add_subcommand("shortest", "shortest vectors, or the shell of a given norm");
  std::string sh_in, sh_norm;
  sh->add_option("lattice", sh_in, "lattice JSON file, - or catalog label")->required();
  sh->add_option("--norm", sh_norm, "norm of the shell, e.g. 4 or 7/2");

  // design-check
  auto* dc = app.add_subcommand("design-check", "2- and 4-design test of the minimal vectors");
  std::string dc_in;
  dc->add_option("lattice", dc_in, "lattice JSON file, - or catalog label")->required();

  // dual
  auto* du = app.add_subcommand("dual", "dual lattice");
  std::string du_in;
  du->add_option("lattice", du_in, "lattice JSON file, - or catalog label")->required();

  // sublattices
  auto* sb = app.add_subcommand("sublattices", "prime-index sublattice search");
  std::string sb_in, sb_index, sb_tier = "fast", sb_ckpt, sb_scheme = "hyperplane", sb_prefix;
  std::vector<std::string> sb_prune, sb_final;
  unsigned sb_threads = 1;
  bool sb_summary_only = false;
  sb->add_option("lattice", sb_in, "lattice JSON file, - or catalog label")->required();
  sb->add_option("--index", sb_index, "prime index p (p^1)")->required();
  sb->add_option("--prune", sb_prune, "per-row rule, e.g. min>=7/2");
  sb->add_option("--prune-final", sb_final, "final rule, e.g. dualmin>=4/3");
  sb->add_option("--tier", sb_tier, "fast or slow")->check(CLI::IsMember({"fast", "slow"}));
  sb->add_option("--checkpoint", sb_ckpt, "JSONL file of completed partitions");
  sb->add_option("--scheme", sb_scheme, "hyperplane (one functional) or hnf (row by row)")
      ->check(CLI::IsMember({"hyperplane", "hnf"}));
  sb->add_option("--prefix", sb_prefix, "fixed leading coordinates, e.g. 0,0,1");
  sb->add_option("--threads", sb_threads, "worker threads")->check(CLI::PositiveNumber);
  sb->add_flag("--summary-only", sb_summary_only, "omit the survivor stream");

  // isometry
  auto* is = app.add_subcommand("isometry", "isometry test with a witness transform");
  std::string is_a, is_b;
  is->add_option("first", is_a, "lattice JSON file, - or catalog label")->required();
  is->add_option("second", is_b, "lattice JSON file, - or catalog label")->required();

  // prove-dim12
  auto* pv = app.add_subcommand("prove-dim12", "run the dimension-12 classification steps");
  std::vector<std::string> pv_steps;
  std::string pv_tier = "fast", pv_ckpt, pv_json;
  unsigned pv_threads = 1;
  bool pv_timings = false, pv_verbose = false;
  pv->add_option("--step", pv_steps, "step id (repeatable); default all")->check(CLI::IsMember(step_ids()));
  pv->add_option("--tier", pv_tier, "fast or slow")->check(CLI::IsMember({"fast", "slow"}));
  pv->add_option("--checkpoint", pv_ckpt, "prefix for checkpoint files of the slow scans");
  pv->add_option("--json", pv_json, "write the proof log as JSON (- for stdout)");
  pv->add_option("--threads", pv_threads, "worker threads")->check(CLI::PositiveNumber);
  pv->add_flag("--timings", pv_timings, "include step timings in the JSON log");
  pv->add_flag("--verbose", pv_verbose, "progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cat) {
      if (cat_label.empty()) {
        json a = json::array();
        for (auto& e : catalog_entries())
          a.push_back({{"label", e.label},
                       {"recipe", e.recipe},
                       {"det", io::rat(e.det)},
                       {"min", io::rat(e.min)},
                       {"kissing", e.kissing.get_si()}});
        emit(a, pretty);
      } else {
        emit(io::lattice(load_lattice(cat_label)), pretty);
      }
      return 0;
    }
    if (*mn) {
      Lattice l = load_lattice(mn_in);
      if (mn_dual) l = dual(l);
      Shell s = shortest_vectors(l);
      emit({{"label", l.label}, {"min", io::rat(s.norm)}, {"kissing", s.vectors.size()}}, pretty);
      return 0;
    }
    if (*sh) {
      Lattice l = load_lattice(sh_in);
      Shell s = sh_norm.empty() ? shortest_vectors(l) : vectors_of_norm(l, parse_rat(sh_norm));
      emit(io::shell(s), pretty);
      return 0;
    }
    if (*dc) {
      Lattice l = load_lattice(dc_in);
      DesignSet d = minimal_design_set(l);
      DesignVerdict t2 = is_design(d, 2), t4 = is_design(d, 4);
      json j{{"t2", t2.pass},
             {"t4", t4.pass},
             {"s", io::integer(d.s)},
             {"m", io::rat(d.m)},
             {"constants", {{"c2", io::rat(design_c2(d))}, {"c4", io::rat(design_c4(d))}}}};
      const DesignVerdict& bad = t2.pass ? t4 : t2;
      if (bad.witness) j["witness"] = {{"t", bad.t}, {"alpha", io::rat_vec(*bad.witness)}, {"lhs", io::rat(bad.lhs)}, {"rhs", io::rat(bad.rhs)}};
      emit(j, pretty);
      return 0;
    }
    if (*du) {
      Lattice l = load_lattice(du_in);
      Lattice d = dual(l);
      d.label = l.label + "*";
      emit(io::lattice(d), pretty);
      return 0;
    }
    if (*sb) {
      SearchSpec s;
      s.base = load_lattice(sb_in);
      s.p = parse_index(sb_index);
      for (auto& r : sb_prune) s.prune.push_back(parse_prune(r, PruneRule::Stage::per_row));
      for (auto& r : sb_final) s.prune.push_back(parse_prune(r, PruneRule::Stage::final));
      s.tier = parse_tier(sb_tier);
      s.checkpoint = sb_ckpt;
      s.threads = sb_threads;
      s.prefix = parse_prefix(sb_prefix);
      bool hnf = sb_scheme == "hnf";
      if (hnf) s.corank = s.base.dim() - 1;
      std::uint64_t full = projective_count(s.p, s.base.dim());
      if (s.tier == Tier::fast && s.prefix.empty() && full > kFastCandidateLimit)
        throw UsageError(std::to_string(full) + " candidates: use --tier slow or a --prefix slice");
      SearchResult r = hnf ? hnf_pruned_search(s) : index_p_sublattices(s);
      if (!sb_summary_only)
        for (auto& v : r.survivors) {
          json j = io::lattice(survivor_lattice(s.base, v, s.p));
          j["functional"] = v.functional;
          std::cout << j.dump() << "\n";
        }
      emit({{"summary", io::search_summary(r)}}, false);
      return 0;
    }
    if (*is) {
      Lattice a = load_lattice(is_a), b = load_lattice(is_b);
      auto w = is_isometric(a, b);
      json j{{"isometric", w.has_value()}};
      if (w) j["transform"] = io::int_mat(w->U);
      emit(j, pretty);
      return 0;
    }
    if (*pv) {
      ProverOptions o;
      o.tier = parse_tier(pv_tier);
      o.checkpoint = pv_ckpt;
      o.threads = pv_threads;
      if (pv_verbose) o.progress = [](const std::string& m) { std::cerr << m << std::endl; };
      ProofLog log = prove_dim12(o, pv_steps.empty() ? step_ids() : pv_steps);
      if (pv_json.empty()) {
        std::cout << format_text(log);
      } else {
        std::string text = log.to_json(pv_timings).dump(2) + "\n";
        if (pv_json == "-") {
          std::cout << text;
        } else {
          std::ofstream out(pv_json);
          if (!out) throw UsageError("cannot write " + pv_json);
          out << text;
          std::cout << format_text(log);
        }
      }
      return log.passed() ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: bad JSON input: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
