#include <CLI11.hpp>

#include <iostream>

#include "ddsafe/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Data-driven robust safe control synthesis"};
  app.set_version_flag("--version", ddsafe::cli::kToolVersion);
  app.require_subcommand(1);
  ddsafe::cli::Options opt;
  std::uint64_t seed = 0;
  double eps_w = 0.0;
  int cap = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Problem configuration (YAML)")->check(CLI::ExistingFile);
    sub->add_option("--threads", opt.threads, "Worker threads (0 = hardware)");
  };
  auto* gen = app.add_subcommand("gen", "Generate a noisy dataset from the ground-truth system");
  common(gen);
  gen->add_option("--out", opt.out, "Dataset CSV path")->required();
  gen->add_option("--seed", seed, "Override the data seed");

  auto* syn = app.add_subcommand("synth", "Synthesize a density certificate and controller");
  common(syn);
  syn->add_option("--dataset", opt.dataset, "Dataset CSV")->required()->check(CLI::ExistingFile);
  syn->add_option("--out", opt.out, "Certificate JSON path")->required();
  syn->add_option("--eps-w-override", eps_w, "Process noise bound used for P1");
  syn->add_option("--escalate-degrees", cap, "Largest d1 tried after infeasibility");

  auto* simc = app.add_subcommand("simulate", "Simulate trajectories and audit safety");
  common(simc);
  simc->add_option("--certificate", opt.certificate, "Certificate JSON")->check(CLI::ExistingFile);
  simc->add_flag("--open-loop", opt.open_loop, "Simulate with u = 0");
  simc->add_option("--out", opt.out, "Output directory")->required();
  simc->add_option("--seed", seed, "Override the simulation seed");
  simc->add_option("--eps-w-override", eps_w, "Process noise bound during simulation");

  auto* ver = app.add_subcommand("verify", "Re-verify a certificate from files");
  common(ver);
  ver->add_option("--certificate", opt.certificate, "Certificate JSON")->required()->check(CLI::ExistingFile);
  ver->add_option("--dataset", opt.dataset, "Dataset CSV")->required()->check(CLI::ExistingFile);
  ver->add_option("--eps-w-override", eps_w, "Process noise bound used for P1");

  auto* rep = app.add_subcommand("report", "Print the complexity comparison and reference figures");
  common(rep);
  rep->add_option("--seed", seed, "Override the data seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : ddsafe::cli::kUsage;
  }
  CLI::App* sub = app.get_subcommands().front();
  auto given = [sub](const char* name) {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (given("--seed")) opt.seed = seed;
  if (given("--eps-w-override")) opt.eps_w_override = eps_w;
  if (given("--escalate-degrees")) opt.escalate_cap = cap;
  if (sub != rep && opt.config.empty()) {
    std::cerr << "error: --config is required\n";
    return ddsafe::cli::kUsage;
  }
  return ddsafe::cli::run(sub->get_name(), opt, std::cout, std::cerr);
}
