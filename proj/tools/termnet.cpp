// termnet: command-line front end.
//
// Exit codes: 0 ok, 1 usage, 2 parse error, 3 precondition, 4 budget.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "termnet/termnet.hpp"

namespace {

using namespace termnet;
using io::json;

struct Common {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t budget = kDefaultBudget;
  bool timing = true;
  std::string out;
};

struct Input {
  std::string path;
  std::string text;
};

Input load(const std::string& path) { return {path, io::read_file(path)}; }

json inputs_json(std::initializer_list<const Input*> in) {
  json j = json::object();
  for (const auto* i : in)
    if (i) j[i->path] = io::digest(i->text);
  return j;
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

class Clock {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(json report, const Common& c, const Clock& clock) {
  if (c.timing) report["timing_ms"] = clock.ms();
  std::cout << report.dump(2) << "\n";
}

void emit_text(const std::string& text, const std::string& out) {
  if (out.empty())
    std::cout << text;
  else
    io::write_file(out, text);
}

std::vector<Alpha> parse_alphas(const std::string& list) {
  std::vector<Alpha> out;
  for (const auto& a : split(list)) out.push_back(Alpha::parse(a));
  return out;
}

// "lo:hi:step" with exact rational arithmetic.
std::vector<Alpha> parse_alpha_grid(const std::string& grid) {
  const auto parts = split(grid, ':');
  if (parts.size() != 3) throw ParseError("alpha grid must be lo:hi:step");
  const Alpha lo = Alpha::parse(parts[0]), hi = Alpha::parse(parts[1]), step = Alpha::parse(parts[2]);
  if (lo.is_infinite() || hi.is_infinite() || step.is_infinite() || step.is_zero())
    throw PreconditionError("alpha grid bounds must be finite with a positive step");
  std::vector<Alpha> out;
  for (std::int64_t i = 0;; ++i) {
    // lo + i * step
    const std::int64_t den = lo.denominator() * step.denominator();
    const Alpha a(lo.numerator() * step.denominator() + i * step.numerator() * lo.denominator(), den);
    if (hi < a) break;
    out.push_back(a);
    if (out.size() > 100000) throw BudgetExceeded("alpha grid too long");
  }
  return out;
}

TermSet load_term_set(const Input& in, bool diversify_first) {
  auto ts = parse_term_set(in.text);
  return diversify_first ? diversify(ts) : ts;
}

json measures_json(const EvaluationReport& rep, const std::vector<Alpha>& alphas) {
  json j = io::to_json(rep);
  if (!alphas.empty()) {
    j["renyi"] = json::array();
    for (const auto& a : alphas)
      j["renyi"].push_back({{"alpha", a.to_string()}, {"value", io::number(renyi_entropy(rep, a))}});
  }
  return j;
}

// ---------------------------------------------------------------------------

struct MincutArgs {
  std::string file;
  std::string require;
};

int cmd_mincut(const MincutArgs& a, const Common& c) {
  Clock clock;
  const auto in = load(a.file);
  const auto ts = parse_term_set(in.text);
  std::vector<std::string> keep = a.require.empty() ? ts.required() : split(a.require);
  const TermSet work = keep.size() == ts.variable_count() ? ts : restrict_to_variables(ts, keep);
  const auto dag = build_dag(work);
  const auto cert = min_cut(dag);
  const auto check = verify_certificate(dag, cert);
  if (!check.valid) throw Error("min-cut certificate failed verification");
  json r;
  r["command"] = "mincut";
  r["inputs"] = inputs_json({&in});
  r["require"] = keep;
  r["subterms"] = dag.vertex_count();
  r.update(io::to_json(dag, cert));
  r["certificate_valid"] = check.valid;
  emit(r, c, clock);
  return 0;
}

struct AnalyzeArgs {
  std::string file, interp, alphas, condition, mode = "worst";
  bool check_decode = false;
};

int cmd_analyze(const AnalyzeArgs& a, const Common& c) {
  Clock clock;
  const auto in = load(a.file);
  const auto ii = load(a.interp);
  const auto ts = parse_term_set(in.text);
  const auto interp = io::interpretation_from_json(ii.text);
  EvaluationOptions opt{c.budget, c.threads};
  const auto rep = preimage_histogram(interp, ts, opt);
  json r;
  r["command"] = "analyze";
  r["inputs"] = inputs_json({&in, &ii});
  r["report"] = measures_json(rep, parse_alphas(a.alphas));
  if (!a.condition.empty()) {
    if (a.mode != "worst" && a.mode != "average") throw PreconditionError("condition mode is worst or average");
    const auto mode = a.mode == "worst" ? ConditionMode::worst : ConditionMode::average;
    const auto U = split(a.condition);
    r["conditional"] = {{"free", U}, {"mode", a.mode},
                        {"value", io::number(conditional_dispersion(interp, ts, U, mode, opt))}};
  }
  if (a.check_decode) {
    json d = json::object();
    for (const auto& v : ts.required()) d[v] = decodable(interp, ts, v, opt);
    r["decodable"] = d;
  }
  emit(r, c, clock);
  return 0;
}

struct RouteArgs {
  std::string file, mode = "routing", sidecar;
  int q = 0;
  bool diversify = false;
  bool evaluate = true;
};

int cmd_route(const RouteArgs& a, const Common& c) {
  Clock clock;
  const auto in = load(a.file);
  const auto ts = load_term_set(in, a.diversify);
  json r;
  r["command"] = "route";
  r["inputs"] = inputs_json({&in});
  r["mode"] = a.mode;
  r["alphabet"] = a.q;
  Interpretation interp(std::max(a.q, 2));
  const auto dag = build_dag(ts);
  if (a.mode == "routing" || a.mode == "one2one") {
    const auto pa = assign_paths(ts);
    interp = a.mode == "routing" ? build_routing(ts, pa, a.q) : build_one_to_one_routing(ts, pa, a.q);
    r["rho"] = pa.rho();
    r["paths"] = io::paths_json(dag, pa);
  } else if (a.mode == "dynamic" || a.mode == "dynamic-one2one") {
    const auto dr = build_dynamic_routing(ts, a.q, a.mode == "dynamic-one2one");
    interp = dr.interpretation;
    r["rho"] = dr.paths.rho();
    r["paths"] = io::paths_json(dag, dr.paths);
    r["codebook"] = io::routing_sidecar(dr);
    if (!a.sidecar.empty()) io::write_file(a.sidecar, io::routing_sidecar(dr).dump(2) + "\n");
  } else {
    throw PreconditionError("unknown mode '" + a.mode + "'");
  }
  if (!c.out.empty()) io::write_file(c.out, io::to_json(interp).dump(2) + "\n");
  if (a.evaluate) {
    const auto rep = preimage_histogram(interp, ts, {c.budget, c.threads});
    r["report"] = io::to_json(rep);
  }
  emit(r, c, clock);
  return 0;
}

struct SearchArgs {
  std::string file, cls = "all", algebra, objective = "dispersion";
  int q = 0;
  std::optional<std::uint64_t> sample;
  std::uint64_t seed = 0;
  std::uint64_t budget = 10'000'000'000ULL;
};

FunctionClass make_class(const std::string& name, int q, const std::string& algebra_file) {
  auto algebra = [&](auto fallback) {
    return algebra_file.empty() ? fallback() : io::algebra_from_json(io::read_file(algebra_file));
  };
  if (name == "all") return FunctionClass::all();
  if (name == "scalar")
    return FunctionClass::scalar_linear(algebra([&] {
      if (is_prime(q)) return AlgebraSpec::prime_field(q);
      for (int m = 1; m <= 8; ++m)
        if (q == (1 << m)) return AlgebraSpec::gf2m(m);
      throw PreconditionError("no built-in field of order " + std::to_string(q));
    }));
  if (name == "ring") return FunctionClass::ring_linear(algebra([&] { return AlgebraSpec::modular_ring(q); }));
  if (name == "matrix")
    return FunctionClass::matrix_linear(algebra([&] {
      for (int m = 1; m <= 8; ++m)
        if (q == (1 << m)) return AlgebraSpec::vector_space_f2(m);
      throw PreconditionError("matrix class needs q = 2^m");
    }));
  if (name == "group") return FunctionClass::group_mult(algebra([&] { return AlgebraSpec::cyclic_group(q); }));
  throw PreconditionError("unknown class '" + name + "'");
}

Objective make_objective(const std::string& s) {
  if (s == "dispersion") return Objective::dispersion();
  if (s == "one2one" || s == "one_to_one") return Objective::one_to_one();
  if (s.rfind("renyi:", 0) == 0) return Objective::renyi(Alpha::parse(s.substr(6)));
  throw PreconditionError("unknown objective '" + s + "'");
}

int cmd_search(const SearchArgs& a, const Common& c) {
  Clock clock;
  const auto in = load(a.file);
  const auto ts = parse_term_set(in.text);
  SearchOptions opt;
  opt.budget = a.budget;
  opt.threads = c.threads;
  opt.sample = a.sample;
  opt.seed = a.seed;
  const auto res = exhaustive_search(ts, a.q, make_class(a.cls, a.q, a.algebra), make_objective(a.objective), opt);
  json r;
  r["command"] = "search";
  r["inputs"] = inputs_json({&in});
  r["alphabet"] = a.q;
  r["class"] = a.cls;
  r["objective"] = res.objective.to_string();
  r["class_size"] = res.class_size;
  r["explored"] = res.explored;
  r["exhaustive"] = res.exhaustive;
  if (a.sample) r["seed"] = a.seed;
  r["best_count"] = res.best_count;
  r["best_value"] = io::number(res.best_value);
  r["best_index"] = res.best_index;
  r["best_tables"] = io::to_json(res.best_tables);
  r["best_report"] = io::to_json(res.best_report);
  if (!c.out.empty()) io::write_file(c.out, io::to_json(res.best_tables).dump(2) + "\n");
  emit(r, c, clock);
  return 0;
}

struct ConvertArgs {
  std::string file, out_dir;
  int q = 0;
  std::string witness;
};

int cmd_convert(const ConvertArgs& a, const Common& c) {
  Clock clock;
  const auto in = load(a.file);
  const auto net = parse_network(in.text);
  const auto channels = network_to_user_channels(net);
  const auto combined = combine_channels(channels);
  json r;
  r["command"] = "convert";
  r["inputs"] = inputs_json({&in});
  r["users"] = json::array();
  for (const auto& ch : channels) {
    r["users"].push_back({{"user", ch.user}, {"termset", to_dsl(ch.terms)}, {"min_cut", min_cut(ch.terms).value}});
    if (!a.out_dir.empty()) io::write_file(a.out_dir + "/" + ch.user + ".ts", to_dsl(ch.terms));
  }
  r["combined"] = to_dsl(combined);
  r["combined_min_cut"] = min_cut(combined).value;
  if (!a.out_dir.empty()) io::write_file(a.out_dir + "/combined.ts", to_dsl(combined));
  if (a.q > 0) {
    std::optional<Interpretation> w;
    if (!a.witness.empty()) w = io::interpretation_from_json(io::read_file(a.witness));
    const auto s = solvable(net, a.q, w);
    r["solvable"] = {{"alphabet", a.q}, {"verdict", to_string(s.verdict)}, {"method", s.method},
                     {"explored", s.explored}};
    if (s.witness) r["solvable"]["witness"] = io::to_json(*s.witness);
  }
  emit(r, c, clock);
  return 0;
}

struct SweepArgs {
  std::string file, interp, alphas, grid, qs, mode = "dynamic";
};

int cmd_sweep(const SweepArgs& a, const Common& c) {
  const auto in = load(a.file);
  const auto ts = parse_term_set(in.text);
  std::ostringstream csv;
  if (!a.qs.empty()) {
    csv << "q,gamma\n";
    for (const auto& qs : split(a.qs)) {
      const int q = std::stoi(qs);
      Interpretation interp(q);
      if (a.mode == "dynamic" || a.mode == "dynamic-one2one") {
        interp = build_dynamic_routing(ts, q, a.mode == "dynamic-one2one").interpretation;
      } else {
        const auto pa = assign_paths(ts);
        interp = a.mode == "one2one" ? build_one_to_one_routing(ts, pa, q) : build_routing(ts, pa, q);
      }
      csv << q << "," << fmt(dispersion(preimage_histogram(interp, ts, {c.budget, c.threads})).log_value) << "\n";
    }
  } else {
    if (a.interp.empty()) throw PreconditionError("sweep over alpha needs --interp");
    const auto interp = io::interpretation_from_json(io::read_file(a.interp));
    const auto alphas = a.grid.empty() ? parse_alphas(a.alphas) : parse_alpha_grid(a.grid);
    if (alphas.empty()) throw PreconditionError("no alpha values given");
    const auto rep = preimage_histogram(interp, ts, {c.budget, c.threads});
    csv << "alpha,H_alpha\n";
    for (const auto& al : alphas) csv << fmt(al.value()) << "," << fmt(renyi_entropy(rep, al)) << "\n";
  }
  emit_text(csv.str(), c.out);
  return 0;
}

struct ExamplesArgs {
  std::string name;
  int k = 0;
};

int cmd_examples(const ExamplesArgs& a, const Common& c) {
  if (a.name.empty()) {
    for (const auto& e : build::catalog()) std::cout << e.name << "." << e.extension << "  " << e.description << "\n";
    return 0;
  }
  emit_text(build::catalog_text(a.name, a.k), c.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"termnet: dispersion, routing and coding on term sets"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool with_out = true) {
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--budget", common.budget, "max term evaluations");
    sub->add_flag("!--no-timing", common.timing, "omit timing from the report");
    if (with_out) sub->add_option("-o,--out", common.out, "output file");
  };

  MincutArgs mc;
  auto* s_mincut = app.add_subcommand("mincut", "min-cut of a term set");
  s_mincut->add_option("file", mc.file)->required()->check(CLI::ExistingFile);
  s_mincut->add_option("--require", mc.require, "comma-separated variables to keep");
  add_common(s_mincut, false);

  AnalyzeArgs an;
  auto* s_an = app.add_subcommand("analyze", "evaluate an interpretation");
  s_an->add_option("file", an.file)->required()->check(CLI::ExistingFile);
  s_an->add_option("--interp", an.interp)->required()->check(CLI::ExistingFile);
  s_an->add_option("--alpha", an.alphas, "comma-separated orders, e.g. 0,1/2,1,inf");
  s_an->add_option("--condition", an.condition, "free variables U for conditional dispersion");
  s_an->add_option("--condition-mode", an.mode, "worst or average");
  s_an->add_flag("--decode", an.check_decode, "report per-variable decodability");
  add_common(s_an, false);

  RouteArgs ro;
  auto* s_ro = app.add_subcommand("route", "build a routing interpretation");
  s_ro->add_option("file", ro.file)->required()->check(CLI::ExistingFile);
  s_ro->add_option("-q,--alphabet", ro.q)->required()->check(CLI::Range(2, 1 << 20));
  s_ro->add_option("--mode", ro.mode, "routing, one2one, dynamic or dynamic-one2one");
  s_ro->add_flag("--diversify", ro.diversify, "diversify the term set first");
  s_ro->add_option("--sidecar", ro.sidecar, "write the header codebook here");
  s_ro->add_flag("!--no-evaluate", ro.evaluate, "skip brute-force evaluation");
  add_common(s_ro);

  SearchArgs se;
  auto* s_se = app.add_subcommand("search", "search a class of coding functions");
  s_se->add_option("file", se.file)->required()->check(CLI::ExistingFile);
  s_se->add_option("-q,--alphabet", se.q)->required()->check(CLI::Range(2, 256));
  s_se->add_option("--class", se.cls, "all, scalar, matrix, ring or group");
  s_se->add_option("--algebra", se.algebra, "algebra file for the class")->check(CLI::ExistingFile);
  s_se->add_option("--objective", se.objective, "dispersion, one2one or renyi:<alpha>");
  s_se->add_option("--sample", se.sample, "evaluate this many random members");
  s_se->add_option("--seed", se.seed);
  s_se->add_option("--search-budget", se.budget, "max term evaluations over the search");
  add_common(s_se);

  ConvertArgs cv;
  auto* s_cv = app.add_subcommand("convert", "network file to term sets");
  s_cv->add_option("file", cv.file)->required()->check(CLI::ExistingFile);
  s_cv->add_option("--out-dir", cv.out_dir)->check(CLI::ExistingDirectory);
  s_cv->add_option("--solvable", cv.q, "decide solvability over this alphabet");
  s_cv->add_option("--witness", cv.witness, "interpretation to verify")->check(CLI::ExistingFile);
  add_common(s_cv, false);

  SweepArgs sw;
  auto* s_sw = app.add_subcommand("sweep", "CSV of H_alpha over alpha, or gamma over q");
  s_sw->add_option("file", sw.file)->required()->check(CLI::ExistingFile);
  s_sw->add_option("--interp", sw.interp)->check(CLI::ExistingFile);
  auto* o_al = s_sw->add_option("--alphas", sw.alphas);
  auto* o_gr = s_sw->add_option("--alpha-grid", sw.grid, "lo:hi:step");
  auto* o_q = s_sw->add_option("--q-grid", sw.qs, "comma-separated alphabets");
  o_al->excludes(o_gr)->excludes(o_q);
  o_gr->excludes(o_q);
  s_sw->add_option("--mode", sw.mode, "routing scheme for --q-grid");
  add_common(s_sw);

  ExamplesArgs ex;
  auto* s_ex = app.add_subcommand("examples", "list or emit built-in examples");
  s_ex->add_option("name", ex.name);
  s_ex->add_option("-k", ex.k, "size parameter for gamma_k, gamma_prime, prop8");
  add_common(s_ex);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (s_mincut->parsed()) return cmd_mincut(mc, common);
    if (s_an->parsed()) return cmd_analyze(an, common);
    if (s_ro->parsed()) return cmd_route(ro, common);
    if (s_se->parsed()) return cmd_search(se, common);
    if (s_cv->parsed()) return cmd_convert(cv, common);
    if (s_sw->parsed()) return cmd_sweep(sw, common);
    if (s_ex->parsed()) return cmd_examples(ex, common);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
