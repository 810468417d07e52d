#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "halftsp/degreecut.hpp"
#include "halftsp/error.hpp"
#include "halftsp/oracle.hpp"
#include "halftsp/pipeline.hpp"
#include "halftsp/verify.hpp"
#include "halftsp/version.hpp"
#include "json.hpp"

using namespace halftsp;

namespace {

struct Args {
  RunConfig config;
  std::string alpha, beta, tau, mode = "rational", stats = "exact", dot;
  long random_configs = 10000;
  bool no_degree = false;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
}

void add_source(CLI::App* cmd, Args& a) {
  cmd->add_option("--instance", a.config.instance_path, "instance JSON file");
  cmd->add_option("--gen", a.config.generator, "generator spec family:size");
  cmd->add_option("--seed", a.config.seed, "seed (also feeds the random generator family)");
}

void add_run_options(CLI::App* cmd, Args& a) {
  add_source(cmd, a);
  cmd->add_option("--samples", a.config.samples, "number of samples")->check(CLI::PositiveNumber);
  cmd->add_option("--mode", a.mode, "rational or float")->check(CLI::IsMember({"rational", "float"}));
  cmd->add_option("--out", a.config.out, "report path (default stdout)");
  cmd->add_option("--csv", a.config.csv, "per-sample CSV path");
  cmd->add_option("--jobs", a.config.jobs, "worker threads")->check(CLI::PositiveNumber);
}

void add_params(CLI::App* cmd, Args& a) {
  cmd->add_option("--alpha", a.alpha, "top-edge truncation (rational, e.g. 7/62)");
  cmd->add_option("--beta", a.beta, "bottom-edge truncation");
  cmd->add_option("--tau", a.tau, "reduction amount");
}

void finish_config(Args& a, const std::string& command) {
  auto& c = a.config;
  c.command = command;
  c.mode = parse_number_mode(a.mode);
  if (!a.alpha.empty()) c.params.alpha = parse_rational(a.alpha);
  if (!a.beta.empty()) c.params.beta = parse_rational(a.beta);
  if (!a.tau.empty()) c.params.tau = parse_rational(a.tau);
  c.stats = a.stats == "exact" ? StatsMethod::Exact : StatsMethod::MonteCarlo;
}

int cmd_validate(Args& a) {
  finish_config(a, "validate");
  a.config.validate();
  const auto inst = load_instance(a.config);
  const auto g = build_support_graph(inst);
  const auto cuts = enumerate_min_cuts(g);
  nlohmann::json j;
  j["valid"] = true;
  j["name"] = inst.name;
  j["n"] = inst.n;
  j["edges"] = inst.edges.size();
  j["support_edges"] = g.m();
  j["lp_cost"] = format_rational(lp_cost(inst));
  j["min_cuts"] = cuts.size();
  write_output(a.config.out, j.dump(2) + "\n");
  return 0;
}

int cmd_hierarchy(Args& a) {
  finish_config(a, "hierarchy");
  a.config.validate();
  const auto prepared = prepare_instance(load_instance(a.config));
  write_output(a.config.out, hierarchy_json(prepared.model.h));
  if (!a.dot.empty()) write_output(a.dot, hierarchy_dot(prepared.model.h));
  return 0;
}

int cmd_gen(Args& a) {
  if (a.config.generator.empty()) throw Error(ErrorKind::InvalidArgument, "gen needs --gen family:size");
  const auto [family, size] = parse_generator_spec(a.config.generator);
  write_output(a.config.out, serialize_instance(generate_instance(family, size, a.config.seed)));
  return 0;
}

int cmd_run(Args& a) {
  finish_config(a, "run");
  a.config.validate();
  const auto result = run_ojoin(load_instance(a.config), a.config);
  write_output(a.config.out, report_json(result));
  if (!a.config.csv.empty()) write_output(a.config.csv, report_csv(result.samples));
  if (result.infeasible > 0) {
    std::cerr << "infeasible y in " << result.infeasible << " samples\n";
    return 3;
  }
  return 0;
}

int cmd_degreecut(Args& a) {
  finish_config(a, "degreecut");
  a.config.validate();
  const auto result = run_degreecut(load_instance(a.config), a.config);
  write_output(a.config.out, report_json(result));
  if (!a.config.csv.empty()) write_output(a.config.csv, report_csv(result.samples));
  if (result.infeasible > 0) {
    std::cerr << "infeasible y in " << result.infeasible << " samples\n";
    return 3;
  }
  return 0;
}

int cmd_verify(Args& a) {
  finish_config(a, "verify-lemmas");
  a.config.params.validate();
  VerifyOptions opts;
  opts.params = a.config.params;
  opts.seed = a.config.seed;
  opts.random_configs = a.random_configs;
  if (!a.config.instance_path.empty() || !a.config.generator.empty()) {
    opts.instances.push_back(load_instance(a.config));
    opts.degree_sizes.clear();
    opts.fixed_values = false;
  }
  if (a.no_degree) opts.degree_sizes.clear();
  const auto report = verify_lemmas(opts);
  std::cout << verify_table(report);
  if (!a.config.out.empty()) write_output(a.config.out, verify_json(report, opts));
  return report.passed() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-integral TSP rounding: sampling, O-join certificates and exact verification"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Args a;

  auto* validate = app.add_subcommand("validate", "check an instance and print a summary");
  add_source(validate, a);
  validate->add_option("--out", a.config.out, "summary path (default stdout)");

  auto* hierarchy = app.add_subcommand("hierarchy", "dump the laminar family of critical cuts");
  add_source(hierarchy, a);
  hierarchy->add_option("--out", a.config.out, "JSON path (default stdout)");
  hierarchy->add_option("--dot", a.dot, "also write Graphviz DOT to this path");

  auto* run = app.add_subcommand("run", "sample trees and build O-joins");
  add_run_options(run, a);
  add_params(run, a);
  run->add_option("--stats", a.stats, "even-at-last probabilities: exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  run->add_option("--stats-samples", a.config.stats_samples, "samples for --stats mc");

  auto* verify = app.add_subcommand("verify-lemmas", "exact probability and load battery");
  add_source(verify, a);
  add_params(verify, a);
  verify->add_option("--out", a.config.out, "JSON report path");
  verify->add_option("--random-configs", a.random_configs, "random Bernoulli configurations per functional");
  verify->add_flag("--no-degree", a.no_degree, "skip the degree-cut instances");

  auto* degree = app.add_subcommand("degreecut", "perturbed construction on a degree-cut instance");
  add_run_options(degree, a);

  auto* gen = app.add_subcommand("gen", "write a generated instance as JSON");
  gen->add_option("--gen", a.config.generator, "family:size")->required();
  gen->add_option("--seed", a.config.seed, "seed");
  gen->add_option("--out", a.config.out, "path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) return cmd_validate(a);
    if (*hierarchy) return cmd_hierarchy(a);
    if (*run) return cmd_run(a);
    if (*verify) return cmd_verify(a);
    if (*degree) return cmd_degreecut(a);
    if (*gen) return cmd_gen(a);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
