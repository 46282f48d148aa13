// tbound: command-line front end for the tensorbounds library.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tensorbounds/json_io.hpp"

namespace {

using tb::io::Json;

struct Globals {
  std::uint64_t seed = 1;
  double tol = tb::kDefaultTol;
  std::string format = "json";
  std::size_t workers = 1;
  double omega_mm = tb::ExponentConstants{}.omega_mm;
  double alpha_dual = tb::ExponentConstants{}.alpha_dual;
  double budget = 1e6;
  std::string precision = "6";

  tb::io::Precision pr() const {
    if (precision == "full") return {0};
    return {std::stoi(precision)};
  }
};

// A computed result: JSON always, plus an optional table for CSV output.
struct Output {
  Json json;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int exit_code = 0;
};

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void emit(const Output& o, const std::string& format) {
  if (format == "json") {
    std::cout << o.json.dump(2) << "\n";
    return;
  }
  if (format == "csv") {
    if (!o.header.empty()) {
      for (std::size_t i = 0; i < o.header.size(); ++i) std::cout << (i ? "," : "") << csv_cell(o.header[i]);
      std::cout << "\n";
      for (const auto& r : o.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) std::cout << (i ? "," : "") << csv_cell(r[i]);
        std::cout << "\n";
      }
    } else {
      std::cout << "key,value\n";
      for (const auto& [k, v] : o.json.items())
        if (v.is_primitive()) std::cout << csv_cell(k) << "," << csv_cell(scalar_text(v)) << "\n";
    }
    return;
  }
  for (const auto& [k, v] : o.json.items()) std::cout << k << ": " << (v.is_primitive() ? scalar_text(v) : v.dump()) << "\n";
}

// --- tensor sources ----------------------------------------------------------

struct Source {
  std::string tensor_file;
  std::string graph_file;
  std::vector<std::size_t> dicke;
  std::size_t complete = 0;
  std::size_t cycle = 0;
  std::uint64_t n = 2;
  std::vector<std::uint64_t> unit;  // r, k
  std::vector<std::uint64_t> cw;    // q, k
};

void add_graph_source(CLI::App* c, Source& s) {
  c->add_option("--graph", s.graph_file, "graph JSON file {\"vertices\", \"edges\"}");
  c->add_option("--complete", s.complete, "complete graph on k vertices");
  c->add_option("--cycle", s.cycle, "cycle on k vertices");
  c->add_option("--n", s.n, "edge dimension")->check(CLI::PositiveNumber);
}

void add_source(CLI::App* c, Source& s) {
  c->add_option("--tensor", s.tensor_file, "tensor JSON file");
  c->add_option("--dicke", s.dicke, "Dicke tensor partition, e.g. 2,2")->delimiter(',');
  c->add_option("--unit", s.unit, "unit tensor r,k")->delimiter(',')->expected(2);
  c->add_option("--cw", s.cw, "CW tensor q,k")->delimiter(',')->expected(2);
  add_graph_source(c, s);
}

bool has_graph(const Source& s) { return !s.graph_file.empty() || s.complete || s.cycle; }

tb::Graph load_graph(const Source& s) {
  const int given = !s.graph_file.empty() + (s.complete > 0) + (s.cycle > 0);
  if (given != 1) throw CLI::ValidationError("give exactly one of --graph, --complete, --cycle");
  if (!s.graph_file.empty()) return tb::io::graph_from_json(tb::io::read_json_file(s.graph_file));
  if (s.complete) return tb::Graph::complete(s.complete);
  return tb::Graph::cycle(s.cycle);
}

Json describe(const Source& s) {
  if (!s.tensor_file.empty()) return {{"kind", "file"}, {"path", s.tensor_file}};
  if (!s.dicke.empty()) return {{"kind", "dicke"}, {"lambda", s.dicke}};
  if (!s.unit.empty()) return {{"kind", "unit"}, {"r", s.unit[0]}, {"k", s.unit[1]}};
  if (!s.cw.empty()) return {{"kind", "cw"}, {"q", s.cw[0]}, {"k", s.cw[1]}};
  if (!s.graph_file.empty()) return {{"kind", "graph"}, {"path", s.graph_file}, {"n", s.n}};
  if (s.complete) return {{"kind", "complete"}, {"k", s.complete}, {"n", s.n}};
  return {{"kind", "cycle"}, {"k", s.cycle}, {"n", s.n}};
}

tb::SparseTensor load_tensor(const Source& s) {
  const int given = !s.tensor_file.empty() + !s.dicke.empty() + !s.unit.empty() + !s.cw.empty() + has_graph(s);
  if (given != 1) throw CLI::ValidationError("give exactly one tensor source");
  if (!s.tensor_file.empty()) return tb::io::tensor_from_json(tb::io::read_json_file(s.tensor_file));
  if (!s.dicke.empty()) return tb::dicke_tensor(s.dicke);
  if (!s.unit.empty()) return tb::unit_tensor(s.unit[0], s.unit[1]);
  if (!s.cw.empty()) return tb::cw_tensor(s.cw[0], s.cw[1]);
  return tb::graph_tensor(load_graph(s), s.n);
}

// --- bound -------------------------------------------------------------------

struct BoundArgs {
  Source src;
  std::string method = "main";
  std::string strategy = "uniform";
  std::string enumeration = "auto";
  std::string p_file;
  std::string labeling_file;
  std::string symmetry_file;
  bool symmetry = false;
};

void add_bound_options(CLI::App* c, BoundArgs& b) {
  c->add_option("--method", b.method, "main or strassen")->check(CLI::IsMember({"main", "strassen"}));
  c->add_option("--strategy", b.strategy, "distribution strategy")->check(CLI::IsMember({"uniform", "user", "ascent"}));
  c->add_option("--enumeration", b.enumeration, "relation enumeration")
      ->check(CLI::IsMember({"auto", "exhaustive", "rank-closed"}));
  c->add_option("--p", b.p_file, "JSON array with a distribution on the support (strategy user)");
  c->add_option("--labeling", b.labeling_file, "JSON labeling to use instead of searching");
  c->add_option("--symmetry-file", b.symmetry_file, "JSON array of symmetry generators");
}

Output run_bound(const BoundArgs& b, const Globals& g, const tb::SparseTensor& t,
                 std::optional<std::vector<tb::SymmetryGenerator>> gens) {
  tb::BoundOptions o;
  o.seed = g.seed;
  o.tol = g.tol;
  o.workers = g.workers;
  o.budget = g.budget;
  if (!b.labeling_file.empty()) o.labeling = tb::io::labeling_from_json(tb::io::read_json_file(b.labeling_file));
  if (!b.symmetry_file.empty()) gens = tb::io::generators_from_json(tb::io::read_json_file(b.symmetry_file));
  o.symmetry = std::move(gens);
  o.enumeration = b.enumeration == "exhaustive"    ? tb::Enumeration::Exhaustive
                  : b.enumeration == "rank-closed" ? tb::Enumeration::RankClosed
                                                   : tb::Enumeration::Auto;
  o.strategy = b.strategy == "user" ? tb::PStrategy::User : b.strategy == "ascent" ? tb::PStrategy::Ascent : tb::PStrategy::Uniform;
  if (o.strategy == tb::PStrategy::User) {
    if (b.p_file.empty()) throw CLI::ValidationError("--strategy user needs --p");
    try {
      o.user_p = tb::io::read_json_file(b.p_file).get<tb::Distribution>();
    } catch (const Json::exception& e) {
      throw tb::InvalidArgument(std::string("--p must be an array of numbers: ") + e.what());
    }
  }
  const auto pr = g.pr();
  const auto cert = b.method == "strassen" ? tb::strassen_bound(t, o) : tb::main_lower_bound(t, o);
  Output out;
  out.json["command"] = "bound";
  out.json["method"] = b.method;
  out.json["tensor"] = describe(b.src);
  out.json["dims"] = t.dims();
  out.json["support_size"] = t.size();
  const auto cj = tb::io::to_json(cert, pr);
  for (const auto& [k, v] : cj.items()) out.json[k] = v;
  out.json["flattening_upper_bound"] = pr(tb::flattening_upper_bound(t));
  out.header = {"bound", "closed_form", "h_p", "max_penalty", "relation_count", "enumeration", "strategy"};
  const auto& j = out.json;
  out.rows.push_back({scalar_text(j["bound"]), scalar_text(j["closed_form"]), scalar_text(j["h_p"]), scalar_text(j["max_penalty"]),
                      scalar_text(j["relation_count"]), scalar_text(j["enumeration"]), scalar_text(j["strategy"])});
  return out;
}

// --- tight -------------------------------------------------------------------

Output run_tight_check(const Source& s, const std::string& labeling_file) {
  const auto t = load_tensor(s);
  const auto a = tb::io::labeling_from_json(tb::io::read_json_file(labeling_file));
  Output out;
  out.json["command"] = "tight check";
  out.json["tensor"] = describe(s);
  out.json["tight"] = tb::check_tight(t, a);
  return out;
}

Output run_tight_find(const Source& s, const Globals& g) {
  const auto t = load_tensor(s);
  const auto r = tb::find_labeling(t, g.seed);
  Output out;
  out.json["command"] = "tight find";
  out.json["tensor"] = describe(s);
  out.json["status"] = r.status == tb::LabelingResult::Status::Tight      ? "tight"
                       : r.status == tb::LabelingResult::Status::NotTight ? "not-tight"
                                                                          : "undetermined";
  out.json["labeling"] = r.status == tb::LabelingResult::Status::Tight ? Json(r.labeling) : Json(nullptr);
  out.json["witness"] = r.witness ? Json{{"leg", r.witness->leg}, {"a", r.witness->a}, {"b", r.witness->b}} : Json(nullptr);
  if (r.status != tb::LabelingResult::Status::Tight) out.exit_code = 1;
  return out;
}

// --- table / certify / calc ----------------------------------------------------

Output run_table_complete(std::size_t kmax, const Globals& g) {
  const auto rows = tb::complete_graph_table(kmax, {g.omega_mm, g.alpha_dual});
  const auto pr = g.pr();
  Output out;
  out.json["command"] = "table complete";
  out.json["omega_mm"] = g.omega_mm;
  out.json["rows"] = Json::array();
  out.header = {"k", "omega_lower", "omega_upper", "edges", "tau_lower", "tau_upper", "lower_source", "upper_source"};
  for (const auto& r : rows) {
    const auto j = tb::io::to_json(r, pr);
    out.json["rows"].push_back(j);
    std::vector<std::string> cells;
    for (const auto& h : out.header) cells.push_back(scalar_text(j[h]));
    out.rows.push_back(std::move(cells));
  }
  return out;
}

Output run_table_cycle(std::size_t k, const Globals& g) {
  const auto c = tb::cycle_bound(k, g.alpha_dual, g.omega_mm);
  const auto pr = g.pr();
  const auto cuts = tb::flattening_lower_bounds(tb::Graph::cycle(k));
  Output out;
  out.json = {{"command", "table cycle"}, {"k", k},
              {"alpha", g.alpha_dual}, {"omega_upper", pr(c.value)},
              {"omega_mm_form", pr(c.omega_form)}, {"omega_lower", pr(cuts.omega_lower)},
              {"tau_upper", pr(c.value / static_cast<double>(k))}, {"tau_lower", pr(cuts.tau_lower)}};
  return out;
}

Output run_cw_border(std::uint64_t q, std::size_t k, bool mutant) {
  const tb::Rational c = mutant ? tb::Rational(-static_cast<long>(q) - 1) : tb::Rational(-static_cast<long>(q));
  const auto r = tb::check_cw_border_certificate(q, k, c);
  Output out;
  out.json = {{"command", "certify cw-border"},
              {"q", q},
              {"k", k},
              {"mutant", mutant},
              {"result", r.pass ? "pass" : "fail"},
              {"pass", r.pass},
              {"failing_order", r.failing_order ? Json(*r.failing_order) : Json(nullptr)},
              {"terms", r.terms},
              {"leading_support_size", r.leading.size()}};
  if (!r.pass) out.exit_code = 1;
  return out;
}

// --- lab ---------------------------------------------------------------------

Output run_avgfree(std::size_t k, std::int64_t n, const std::string& mode) {
  const auto s = tb::average_free_set(k, n, mode == "greedy" ? tb::AverageFreeMode::Greedy : tb::AverageFreeMode::Exhaustive);
  Output out;
  out.json = {{"command", "lab avgfree"}, {"k", k},
              {"N", n},                   {"mode", mode},
              {"size", s.elements.size()}, {"elements", s.elements},
              {"valid", tb::is_average_free(k, s.elements)}};
  return out;
}

Output run_experiment(const Source& s, std::size_t n, std::size_t trials, bool no_types, bool no_hash,
                      std::uint64_t modulus, bool skip_target, const Globals& g) {
  const auto t = load_tensor(s);
  tb::ExperimentOptions opt;
  opt.restrict_types = !no_types;
  opt.hash = !no_hash;
  if (modulus) opt.modulus = modulus;
  opt.workers = g.workers;
  auto rep = tb::run_cw_experiment(t, n, trials, g.seed, opt);
  if (!skip_target) {
    tb::BoundOptions o;
    o.seed = g.seed;
    o.tol = g.tol;
    o.workers = g.workers;
    o.budget = g.budget;
    rep.target_bound = tb::main_lower_bound(t, o).value;
  }
  const auto pr = g.pr();
  Output out;
  out.json["command"] = "lab experiment";
  out.json["tensor"] = describe(s);
  const auto rj = tb::io::to_json(rep, pr);
  for (const auto& [k, v] : rj.items()) out.json[k] = v;
  out.header = {"trial", "modulus", "b_size", "survivors", "collisions", "diagonal", "rate"};
  for (const auto& tr : out.json["per_trial"]) {
    std::vector<std::string> cells;
    for (const auto& h : out.header) cells.push_back(scalar_text(tr[h]));
    out.rows.push_back(std::move(cells));
  }
  return out;
}

Output run_diagonal(const Source& s, const std::string& points_file, std::size_t power) {
  std::vector<tb::Point> pts;
  Json source;
  if (!points_file.empty()) {
    try {
      pts = tb::io::read_json_file(points_file).get<std::vector<tb::Point>>();
    } catch (const Json::exception& e) {
      throw tb::InvalidArgument(std::string("points must be an array of index arrays: ") + e.what());
    }
    source = {{"kind", "points"}, {"path", points_file}};
  } else {
    const auto t = load_tensor(s);
    pts = tb::encode_all(tb::power_points(t, power), t.dims());
    source = {{"kind", "power"}, {"tensor", describe(s)}, {"N", power}};
  }
  const auto d = tb::greedy_diagonal(pts);
  Json chosen = Json::array();
  for (auto i : d.selected) chosen.push_back(pts[i]);
  Output out;
  out.json = {{"command", "lab diagonal"}, {"source", source}, {"x", d.x}, {"y", d.y},
              {"size", d.selected.size()}, {"selected", d.selected}, {"points", chosen}};
  return out;
}

Output run_cuts(const Source& s, const Globals& g) {
  const auto gr = load_graph(s);
  const auto c = tb::flattening_lower_bounds(gr);
  const auto pr = g.pr();
  Output out;
  out.json = {{"command", "cuts"},           {"vertices", gr.vertex_count()}, {"edges", gr.edge_count()},
              {"min_cut", c.min_cut},        {"max_cut", c.max_cut},          {"omega_lower", pr(c.omega_lower)},
              {"tau_lower", pr(c.tau_lower)}};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified bounds on asymptotic tensor quantities"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--tol", g.tol, "IPF tolerance")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "json, csv or pretty")->check(CLI::IsMember({"json", "csv", "pretty"}));
  app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--omega-mm", g.omega_mm, "matrix multiplication exponent");
  app.add_option("--alpha-dual", g.alpha_dual, "dual matrix multiplication exponent");
  app.add_option("--budget", g.budget, "relation enumeration budget")->check(CLI::PositiveNumber);
  app.add_option("--precision", g.precision, "decimal digits or 'full'")
      ->check([](const std::string& v) -> std::string {
        if (v == "full") return {};
        try {
          const int d = std::stoi(v);
          if (d >= 1 && d <= 17) return {};
        } catch (...) {
        }
        return "precision must be 1..17 or 'full'";
      });

  std::function<Output()> action;

  // bound
  auto* bound = app.add_subcommand("bound", "lower bound on the monomial subexponent");
  bound->require_subcommand(1);
  BoundArgs bd, bg, bf;
  auto* b_dicke = bound->add_subcommand("dicke", "Dicke tensor D_lambda");
  b_dicke->add_option("--lambda", bd.src.dicke, "partition, e.g. 2,2")->delimiter(',')->required();
  b_dicke->add_flag("--symmetry", bd.symmetry, "use the leg and symbol symmetries");
  add_bound_options(b_dicke, bd);
  b_dicke->callback([&] {
    action = [&] {
      std::optional<std::vector<tb::SymmetryGenerator>> gens;
      if (bd.symmetry) gens = tb::dicke_generators(bd.src.dicke);
      return run_bound(bd, g, tb::dicke_tensor(bd.src.dicke), gens);
    };
  });
  auto* b_graph = bound->add_subcommand("graph", "graph tensor T_n(G)");
  add_graph_source(b_graph, bg.src);
  add_bound_options(b_graph, bg);
  b_graph->callback([&] { action = [&] { return run_bound(bg, g, tb::graph_tensor(load_graph(bg.src), bg.src.n), std::nullopt); }; });
  auto* b_file = bound->add_subcommand("file", "tensor from a JSON file");
  b_file->add_option("--tensor", bf.src.tensor_file, "tensor JSON file")->required();
  add_bound_options(b_file, bf);
  b_file->callback([&] { action = [&] { return run_bound(bf, g, load_tensor(bf.src), std::nullopt); }; });

  // tight
  auto* tight = app.add_subcommand("tight", "tightness of a support");
  tight->require_subcommand(1);
  Source tc, tfind;
  std::string labeling_file;
  auto* t_check = tight->add_subcommand("check", "verify a labeling");
  add_source(t_check, tc);
  t_check->add_option("--labeling", labeling_file, "labeling JSON file")->required();
  t_check->callback([&] { action = [&] { return run_tight_check(tc, labeling_file); }; });
  auto* t_find = tight->add_subcommand("find", "search for a labeling");
  add_source(t_find, tfind);
  t_find->callback([&] { action = [&] { return run_tight_find(tfind, g); }; });

  // table
  auto* table = app.add_subcommand("table", "exponent tables");
  table->require_subcommand(1);
  std::size_t kmax = 10, cycle_k = 5;
  auto* tab_complete = table->add_subcommand("complete", "complete graphs K_3..K_kmax");
  tab_complete->add_option("--kmax", kmax, "largest k")->check(CLI::Range(3, 24));
  tab_complete->callback([&] { action = [&] { return run_table_complete(kmax, g); }; });
  auto* tab_cycle = table->add_subcommand("cycle", "odd cycle C_k");
  tab_cycle->add_option("--k", cycle_k, "odd cycle length")->check(CLI::Range(3, 24));
  tab_cycle->callback([&] { action = [&] { return run_table_cycle(cycle_k, g); }; });

  // certify
  auto* certify = app.add_subcommand("certify", "exact identity checks");
  certify->require_subcommand(1);
  std::uint64_t cw_q = 2;
  std::size_t cw_k = 3;
  bool mutant = false;
  auto* c_cw = certify->add_subcommand("cw-border", "border-rank identity for CW_q^k");
  c_cw->add_option("--q", cw_q, "q")->required()->check(CLI::PositiveNumber);
  c_cw->add_option("--k", cw_k, "k")->required()->check(CLI::Range(2, 64));
  c_cw->add_flag("--mutant", mutant, "corrupt the eps coefficient of the b0 term");
  c_cw->callback([&] { action = [&] { return run_cw_border(cw_q, cw_k, mutant); }; });

  // lab
  auto* lab = app.add_subcommand("lab", "restriction experiments");
  lab->require_subcommand(1);
  std::size_t af_k = 2;
  std::int64_t af_n = 10;
  std::string af_mode = "exhaustive";
  auto* l_af = lab->add_subcommand("avgfree", "largest k-average-free subset of [1, N]");
  l_af->add_option("--k", af_k, "k")->check(CLI::Range(2, 64));
  l_af->add_option("--N", af_n, "N")->required()->check(CLI::PositiveNumber);
  l_af->add_option("--mode", af_mode, "exhaustive or greedy")->check(CLI::IsMember({"exhaustive", "greedy"}));
  l_af->callback([&] { action = [&] { return run_avgfree(af_k, af_n, af_mode); }; });

  Source ex_src;
  std::size_t ex_n = 2, ex_trials = 10;
  bool no_types = false, no_hash = false, skip_target = false;
  std::uint64_t modulus = 0;
  auto* l_ex = lab->add_subcommand("experiment", "hash-and-diagonal experiment on a tensor power");
  add_source(l_ex, ex_src);
  l_ex->add_option("--N", ex_n, "tensor power")->required()->check(CLI::PositiveNumber);
  l_ex->add_option("--trials", ex_trials, "number of trials")->check(CLI::PositiveNumber);
  l_ex->add_option("--modulus", modulus, "prime hash modulus");
  l_ex->add_flag("--no-types", no_types, "skip the type-class restriction");
  l_ex->add_flag("--no-hash", no_hash, "skip the hash filter");
  l_ex->add_flag("--skip-target", skip_target, "do not compute the lower bound for comparison");
  l_ex->callback([&] {
    action = [&] { return run_experiment(ex_src, ex_n, ex_trials, no_types, no_hash, modulus, skip_target, g); };
  });

  Source dg_src;
  std::string points_file;
  std::size_t dg_power = 1;
  auto* l_dg = lab->add_subcommand("diagonal", "greedy diagonal of an ordered point list");
  add_source(l_dg, dg_src);
  l_dg->add_option("--points", points_file, "JSON array of points, in order");
  l_dg->add_option("--power", dg_power, "use the N-th power support of the tensor")->check(CLI::PositiveNumber);
  l_dg->callback([&] { action = [&] { return run_diagonal(dg_src, points_file, dg_power); }; });

  // cuts
  Source cut_src;
  auto* cuts = app.add_subcommand("cuts", "min and max cut of a graph");
  add_graph_source(cuts, cut_src);
  cuts->callback([&] { action = [&] { return run_cuts(cut_src, g); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto out = action();
    emit(out, g.format);
    return out.exit_code;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tb::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
