#include "tcorr/bounds.hpp"
#include "tcorr/contextuality.hpp"
#include "tcorr/correlations.hpp"
#include "tcorr/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace tcorr;

constexpr int kOk = 0;
constexpr int kCheckFailed = 2;
constexpr int kUsage = 64;
constexpr int kBadData = 65;

std::string symbols(std::size_t packed, int base, int len) {
  Seq s = unpack(packed, base, len);
  std::string out;
  for (int v : s) out.push_back(static_cast<char>('0' + v));
  return out;
}

double rounded(double v) { return std::stod(format_number(v)); }

json aot_json(const AotReport& rep, const CorrelationTable& t) {
  json viols = json::array();
  for (const auto& v : rep.violations)
    viols.push_back(
        json{{"prefix_inputs", symbols(v.prefix_x, t.n_inputs, v.prefix_len)},
             {"prefix_outputs", symbols(v.prefix_a, t.n_outputs, v.prefix_len)},
             {"suffix_inputs_a",
              symbols(v.suffix_x_a, t.n_inputs, t.length - v.prefix_len)},
             {"suffix_inputs_b",
              symbols(v.suffix_x_b, t.n_inputs, t.length - v.prefix_len)},
             {"defect", rounded(v.defect)}});
  return json{{"pass", rep.pass},
              {"max_defect", rounded(rep.max_defect)},
              {"violations", std::move(viols)}};
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("json parse failure: ") + e.what());
  }
}

void emit(const std::string& out_path, const std::string& content,
          std::vector<std::string>& outputs) {
  if (out_path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
  } else {
    write_text_file(out_path, content);
    outputs.push_back(out_path);
  }
}

struct ManifestScope {
  RunManifest manifest;
  std::string path;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  ~ManifestScope() {
    if (path.empty()) return;
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    try {
      write_text_file(path, manifest_json(manifest).dump(2) + "\n");
    } catch (...) {
    }
  }
};

json result_json(const std::string& theory, const OptimizationResult& res,
                 const MachineFile& machine) {
  json params = json::array();
  for (Eigen::Index i = 0; i < res.parameters.size(); ++i)
    params.push_back(rounded(res.parameters(i)));
  json per = json::array();
  for (double v : res.per_restart) per.push_back(rounded(v));
  return json{{"theory", theory},
              {"best_value", rounded(res.best_value)},
              {"parameters", std::move(params)},
              {"per_restart", std::move(per)},
              {"restarts", res.restarts_used},
              {"seed", res.seed},
              {"machine", machine_json(machine)}};
}

NormKind norm_from_flag(const std::string& s) {
  if (s == "euclidean") return NormKind::euclidean;
  if (s == "manhattan") return NormKind::manhattan;
  if (s == "supremum") return NormKind::supremum;
  throw CLI::ValidationError("--norm", "unknown norm kind: " + s);
}

int cmd_simulate(const std::string& machine_path, const std::string& table_path,
                 int L, const std::string& format, const std::string& out_path,
                 double tol, ManifestScope& ms) {
  CorrelationTable t;
  if (!table_path.empty()) {
    t = parse_table(load_json(table_path));
  } else if (!machine_path.empty()) {
    t = file_table(load_machine_file(machine_path), L);
  } else {
    std::cerr << "simulate: need --machine or --table\n";
    return kUsage;
  }
  AotReport rep = check_arrow_of_time(t, tol);
  std::vector<std::string> outputs;
  emit(out_path, format == "json" ? table_json(t).dump(2) + "\n" : table_csv(t),
       outputs);
  std::cerr << "arrow-of-time check: " << (rep.pass ? "pass" : "FAIL")
            << " (max defect " << format_number(rep.max_defect) << ", "
            << rep.violations.size() << " violations)\n";
  ms.manifest.outputs = outputs;
  return rep.pass ? kOk : kCheckFailed;
}

int cmd_check_aot(const std::string& machine_path, const std::string& table_path,
                  int L, const std::string& out_path, double tol,
                  ManifestScope& ms) {
  CorrelationTable t;
  if (!table_path.empty()) {
    t = parse_table(load_json(table_path));
  } else if (!machine_path.empty()) {
    t = file_table(load_machine_file(machine_path), L);
  } else {
    std::cerr << "check-aot: need --machine or --table\n";
    return kUsage;
  }
  AotReport rep = check_arrow_of_time(t, tol);
  std::vector<std::string> outputs;
  emit(out_path, aot_json(rep, t).dump(2) + "\n", outputs);
  ms.manifest.outputs = outputs;
  return rep.pass ? kOk : kCheckFailed;
}

int cmd_optimize(const std::string& theory, int n, const std::string& norm,
                 int restarts, std::uint64_t seed, const std::string& out_path,
                 ManifestScope& ms) {
  OptimizationResult res;
  MachineFile machine;
  if (theory == "cbit") {
    CbitOptimum opt = omega_cbit_exact();
    res.best_value = eval_S(opt.spec);
    res.seed = seed;
    res.restarts_used = 0;
    Vec p(6);
    p << boost::rational_cast<double>(opt.a0), boost::rational_cast<double>(opt.a1),
        boost::rational_cast<double>(opt.b0), boost::rational_cast<double>(opt.b1),
        boost::rational_cast<double>(opt.s0), boost::rational_cast<double>(opt.s1);
    res.parameters = p;
    machine.classical = build_classical(opt.spec);
    machine.name = "exact two-state maximizer";
  } else if (theory == "qubit") {
    res = optimize_qubit(restarts, seed);
    machine.quantum = build_quantum(qubit_spec_from_parameters(res.parameters));
    machine.name = "qubit measure-and-prepare maximizer";
  } else if (theory == "hbit" || theory == "cone") {
    NormCone cone{n, theory == "hbit" ? NormKind::euclidean
                                      : norm_from_flag(norm)};
    res = optimize_norm_cone(cone, restarts, seed);
    machine.gpt = build_machine(cone_spec_from_parameters(
        cone, res.parameters,
        theory == "hbit" ? Theory::hbit : Theory::norm_cone));
    machine.name = "norm-cone measure-and-prepare maximizer";
  } else if (theory == "gbit") {
    SMachineSpec spec = gbit_construction();
    res.best_value = eval_S(spec);
    res.seed = seed;
    res.restarts_used = 0;
    Vec p(8);
    p << spec.omega.w(0), spec.omega.w(1), spec.f00.t, spec.f00.x(0),
        spec.f00.x(1), spec.f11.t, spec.f11.x(0), spec.f11.x(1);
    res.parameters = p;
    machine.gpt = build_machine(spec);
    machine.name = "square-state-space algebraic maximizer";
  } else {
    std::cerr << "optimize: unsupported theory " << theory << "\n";
    return kUsage;
  }
  std::cout << "theory = " << theory << "\n";
  std::cout << "best_value = " << format_number(res.best_value) << "\n";
  std::cout << "restarts = " << res.restarts_used << ", seed = " << seed << "\n";
  std::vector<std::string> outputs;
  if (!out_path.empty())
    emit(out_path, result_json(theory, res, machine).dump(2) + "\n", outputs);
  ms.manifest.outputs = outputs;
  return kOk;
}

int cmd_capacity(int n, const std::string& norm, int d, int restarts,
                 std::uint64_t seed, const std::string& out_path,
                 ManifestScope& ms) {
  NormCone cone{n, norm_from_flag(norm)};
  CapacitySearchOutcome outcome = search_capacity(cone, d, restarts, seed);
  json wit = json();
  if (outcome.witness) {
    json states = json::array(), effects = json::array();
    for (const auto& s : outcome.witness->states) {
      json v = json::array();
      for (Eigen::Index i = 0; i < s.w.size(); ++i) v.push_back(rounded(s.w(i)));
      states.push_back(std::move(v));
    }
    for (const auto& f : outcome.witness->effects) {
      json v = json::array();
      for (Eigen::Index i = 0; i < f.x.size(); ++i) v.push_back(rounded(f.x(i)));
      effects.push_back(json{{"t", rounded(f.t)}, {"x", std::move(v)}});
    }
    wit = json{{"states", std::move(states)}, {"effects", std::move(effects)}};
  }
  json report{{"n", n},
              {"norm", norm},
              {"d", d},
              {"witness_found", outcome.witness.has_value()},
              {"best_penalty", rounded(outcome.best_penalty)},
              {"witness", std::move(wit)}};
  std::vector<std::string> outputs;
  emit(out_path, report.dump(2) + "\n", outputs);
  ms.manifest.outputs = outputs;
  return outcome.witness ? kOk : kCheckFailed;
}

int cmd_contextuality(const std::string& machine_path,
                      const std::string& contexts_path, int L, int reference,
                      const std::string& out_path, double tol,
                      ManifestScope& ms) {
  MachineFile mf = load_machine_file(machine_path);
  if (!mf.quantum)
    throw ValidationError("contextuality checks need a quantum machine");
  const QuantumMachine& m = *mf.quantum;

  ContextStructure ctx;
  ctx.n_inputs = m.n_inputs();
  const json contexts_doc = load_json(contexts_path);
  for (const json& c : contexts_doc.at("contexts")) {
    std::vector<int> inputs;
    for (const json& x : c) inputs.push_back(x.get<int>());
    ctx.contexts.push_back(std::move(inputs));
  }
  if (reference < 0) {
    if (ctx.contexts.empty() || ctx.contexts[0].empty())
      throw ParseError("contexts file lists no inputs");
    reference = ctx.contexts[0][0];
  }

  json report;
  report["repeatability"] = check_repeatability(m, ctx, L, tol).pass;
  report["permutation_invariance"] =
      check_permutation_invariance(m, ctx, L, tol).pass;
  report["eliminable"] =
      json{{"constant_output", constant_output_inputs(m, ctx, L, tol)},
           {"fixed_prestate", fixed_prestate_inputs(m, ctx, L, tol)},
           {"note", "pre-state reachability enumerated up to length " +
                        std::to_string(L) + " only"}};
  int code = kOk;
  try {
    NoncontextualModel model = build_noncontextual_model(m, ctx, reference, L, tol);
    json f = json::object();
    for (std::size_t b = 0; b < model.f.size(); ++b) {
      json row = json::object();
      for (std::size_t k = 0; k < model.f[b].size(); ++k) {
        json ind = json::array();
        for (Eigen::Index a = 0; a < model.f[b][k].size(); ++a)
          ind.push_back(model.f[b][k](a));
        row[std::to_string(model.context[k])] = std::move(ind);
      }
      f[std::to_string(b)] = std::move(row);
    }
    json pref = json::array();
    for (Eigen::Index b = 0; b < model.p_ref.size(); ++b)
      pref.push_back(rounded(model.p_ref(b)));
    report["pass"] = true;
    report["model"] = json{{"context", model.context},
                           {"reference_input", model.reference_input},
                           {"p_ref", std::move(pref)},
                           {"f", std::move(f)}};
  } catch (const std::runtime_error& e) {
    report["pass"] = false;
    report["failing_check"] = e.what();
    code = kCheckFailed;
  }
  std::vector<std::string> outputs;
  emit(out_path, report.dump(2) + "\n", outputs);
  ms.manifest.outputs = outputs;
  return code;
}

int cmd_reproduce(int restarts, std::uint64_t seed, const std::string& out_path,
                  ManifestScope& ms) {
  struct Row {
    std::string name;
    double value;
    std::string reference;
    bool pass;
  };
  std::vector<Row> rows;

  CbitOptimum cbit = omega_cbit_exact();
  const double cbit_v = eval_S(cbit.spec);
  rows.push_back({"cbit", cbit_v, "9/4 exact",
                  cbit.value == Rational(9, 4) && cbit_v == 2.25});

  OptimizationResult qubit = optimize_qubit(restarts, seed);
  rows.push_back({"qubit", qubit.best_value, "2.35570 within 1e-4",
                  std::abs(qubit.best_value - 2.35570) <= 1e-4});

  for (int n : {4, 5}) {
    OptimizationResult hbit =
        optimize_norm_cone(NormCone{n, NormKind::euclidean}, restarts, seed);
    rows.push_back({"hbit n=" + std::to_string(n), hbit.best_value,
                    "qubit value within 1e-4",
                    std::abs(hbit.best_value - qubit.best_value) <= 1e-4});
  }

  const double gbit_v = eval_S(gbit_construction());
  rows.push_back({"gbit", gbit_v, "3 exact", gbit_v == 3.0});

  bool all = true;
  std::printf("%-10s %-16s %-24s %s\n", "case", "value", "reference", "status");
  json jrows = json::array();
  for (const auto& r : rows) {
    all = all && r.pass;
    std::printf("%-10s %-16s %-24s %s\n", r.name.c_str(),
                format_number(r.value).c_str(), r.reference.c_str(),
                r.pass ? "pass" : "FAIL");
    jrows.push_back(json{{"case", r.name},
                         {"value", rounded(r.value)},
                         {"reference", r.reference},
                         {"pass", r.pass}});
  }
  std::vector<std::string> outputs;
  if (!out_path.empty())
    emit(out_path,
         json{{"rows", std::move(jrows)}, {"all_pass", all}}.dump(2) + "\n",
         outputs);
  ms.manifest.outputs = outputs;
  return all ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-state machines over classical, quantum, and norm-cone "
               "state spaces: simulation, temporal-correlation checks, and "
               "bound optimization"};
  app.set_version_flag("--version", kToolkitVersion);
  app.require_subcommand(1);

  double tol = 1e-10;
  app.add_option("--tol", tol, "tolerance for probability checks");

  std::string manifest_path;
  app.add_option("--manifest", manifest_path,
                 "write a run manifest (command, flags, seed, timing) here");
  app.fallthrough();   // let subcommands hand --tol/--manifest back to us

  // simulate
  auto* sim = app.add_subcommand("simulate",
                                 "emit the length-L correlation table of a "
                                 "machine file, with a signaling check");
  std::string sim_machine, sim_table, sim_format = "csv", sim_out;
  int sim_L = 2;
  sim->add_option("--machine", sim_machine, "machine file (json)");
  sim->add_option("--table", sim_table, "raw table json instead of a machine");
  sim->add_option("--L", sim_L, "sequence length")->check(CLI::PositiveNumber);
  sim->add_option("--format", sim_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sim->add_option("--out", sim_out, "output path (default stdout)");

  // check-aot
  auto* aot = app.add_subcommand(
      "check-aot", "verify that earlier marginals ignore later inputs");
  std::string aot_machine, aot_table, aot_out;
  int aot_L = 2;
  aot->add_option("--machine", aot_machine, "machine file (json)");
  aot->add_option("--table", aot_table, "raw table json");
  aot->add_option("--L", aot_L, "sequence length for --machine")
      ->check(CLI::PositiveNumber);
  aot->add_option("--out", aot_out, "report path (default stdout)");

  // optimize
  auto* opt = app.add_subcommand(
      "optimize", "maximize S = p(01|00) + p(10|10) + p(10|11) per theory");
  std::string opt_theory, opt_norm = "euclidean", opt_out;
  int opt_n = 3, opt_restarts = 64;
  std::uint64_t opt_seed = 42;
  opt->add_option("--theory", opt_theory, "cbit, qubit, hbit, gbit, or cone")
      ->required()
      ->check(CLI::IsMember({"cbit", "qubit", "hbit", "gbit", "cone"}));
  opt->add_option("--n", opt_n, "cone dimension for hbit/cone")
      ->check(CLI::PositiveNumber);
  opt->add_option("--norm", opt_norm, "euclidean, manhattan, or supremum")
      ->check(CLI::IsMember({"euclidean", "manhattan", "supremum"}));
  opt->add_option("--restarts", opt_restarts, "multistart count")
      ->check(CLI::PositiveNumber);
  opt->add_option("--seed", opt_seed, "rng seed");
  opt->add_option("--out", opt_out, "result json path");

  // capacity
  auto* cap = app.add_subcommand(
      "capacity", "search for d perfectly distinguishable states");
  std::string cap_norm = "euclidean", cap_out;
  int cap_n = 3, cap_d = 3, cap_restarts = 20;
  std::uint64_t cap_seed = 42;
  cap->add_option("--n", cap_n, "cone dimension")->check(CLI::PositiveNumber);
  cap->add_option("--norm", cap_norm, "euclidean, manhattan, or supremum")
      ->check(CLI::IsMember({"euclidean", "manhattan", "supremum"}));
  cap->add_option("--d", cap_d, "number of states to distinguish")
      ->check(CLI::PositiveNumber);
  cap->add_option("--restarts", cap_restarts, "multistart count")
      ->check(CLI::PositiveNumber);
  cap->add_option("--seed", cap_seed, "rng seed");
  cap->add_option("--out", cap_out, "report path (default stdout)");

  // contextuality-check
  auto* cx = app.add_subcommand(
      "contextuality-check",
      "check a qubit machine for repeatable permutation-invariant contexts "
      "and build the memoryless model");
  std::string cx_machine, cx_contexts, cx_out;
  int cx_L = 4, cx_reference = -1;
  cx->add_option("--machine", cx_machine, "quantum machine file")->required();
  cx->add_option("--contexts", cx_contexts, "contexts json")->required();
  cx->add_option("--L", cx_L, "check horizon")->check(CLI::PositiveNumber);
  cx->add_option("--reference", cx_reference,
                 "reference input (default: first listed)");
  cx->add_option("--out", cx_out, "report path (default stdout)");

  // reproduce
  auto* rep = app.add_subcommand(
      "reproduce", "run the bound suite and compare against reference values");
  std::string rep_out;
  int rep_restarts = 64;
  std::uint64_t rep_seed = 42;
  rep->add_option("--restarts", rep_restarts, "multistart count")
      ->check(CLI::PositiveNumber);
  rep->add_option("--seed", rep_seed, "rng seed");
  rep->add_option("--out", rep_out, "summary json path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  ManifestScope ms;
  ms.path = manifest_path;
  ms.manifest.seed = 42;

  try {
    if (app.got_subcommand(sim)) {
      ms.manifest.command = "simulate";
      ms.manifest.flags = json{{"machine", sim_machine}, {"table", sim_table},
                               {"L", sim_L},             {"format", sim_format},
                               {"out", sim_out},         {"tol", tol}};
      return cmd_simulate(sim_machine, sim_table, sim_L, sim_format, sim_out,
                          tol, ms);
    }
    if (app.got_subcommand(aot)) {
      ms.manifest.command = "check-aot";
      ms.manifest.flags = json{{"machine", aot_machine},
                               {"table", aot_table},
                               {"L", aot_L},
                               {"out", aot_out},
                               {"tol", tol}};
      return cmd_check_aot(aot_machine, aot_table, aot_L, aot_out, tol, ms);
    }
    if (app.got_subcommand(opt)) {
      ms.manifest.command = "optimize";
      ms.manifest.seed = opt_seed;
      ms.manifest.flags = json{{"theory", opt_theory}, {"n", opt_n},
                               {"norm", opt_norm},     {"restarts", opt_restarts},
                               {"seed", opt_seed},     {"out", opt_out}};
      return cmd_optimize(opt_theory, opt_n, opt_norm, opt_restarts, opt_seed,
                          opt_out, ms);
    }
    if (app.got_subcommand(cap)) {
      ms.manifest.command = "capacity";
      ms.manifest.seed = cap_seed;
      ms.manifest.flags = json{{"n", cap_n}, {"norm", cap_norm},
                               {"d", cap_d}, {"restarts", cap_restarts},
                               {"seed", cap_seed}, {"out", cap_out}};
      return cmd_capacity(cap_n, cap_norm, cap_d, cap_restarts, cap_seed,
                          cap_out, ms);
    }
    if (app.got_subcommand(cx)) {
      ms.manifest.command = "contextuality-check";
      ms.manifest.flags = json{{"machine", cx_machine},
                               {"contexts", cx_contexts},
                               {"L", cx_L},
                               {"reference", cx_reference},
                               {"out", cx_out},
                               {"tol", tol}};
      return cmd_contextuality(cx_machine, cx_contexts, cx_L, cx_reference,
                               cx_out, tol, ms);
    }
    if (app.got_subcommand(rep)) {
      ms.manifest.command = "reproduce";
      ms.manifest.seed = rep_seed;
      ms.manifest.flags = json{{"restarts", rep_restarts},
                               {"seed", rep_seed},
                               {"out", rep_out}};
      return cmd_reproduce(rep_restarts, rep_seed, rep_out, ms);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadData;
  }
  return kUsage;
}
