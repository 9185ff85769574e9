#include <CLI11.hpp>

#include <iostream>

#include "nodal/errors.hpp"
#include "nodal/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nodal and positive solutions of singular quasilinear Neumann systems"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  long long seed = -1;
  bool verbose = false;
  app.add_option("--config", config_path, "flat key = value run configuration");
  app.add_option("--out", out_dir, "output directory (overrides 'out')");
  app.add_option("--seed", seed, "seed for the sampled certificates (overrides 'seed')");
  app.add_flag("--verbose", verbose, "print the full report to stdout");

  const std::vector<std::pair<std::string, nodal::Mode>> subs = {
      {"torsion", nodal::Mode::TorsionOnly}, {"barriers", nodal::Mode::Barriers},
      {"solve", nodal::Mode::Nodal},         {"positive", nodal::Mode::Positive},
      {"verify-all", nodal::Mode::VerifyAll}, {"sweep", nodal::Mode::Sweep}};
  const char* help[] = {"torsion functions and their constants",
                        "parameter selection and barrier certificates",
                        "nodal pipeline: barriers, system solve, sign classification",
                        "positive pipeline: barriers, system solve, lower bound c d",
                        "invariant suite of every module",
                        "feasibility table over lambda, theta, delta and p"};
  for (std::size_t k = 0; k < subs.size(); ++k) {
    auto* s = app.add_subcommand(subs[k].first, help[k]);
    s->fallthrough();
  }
  CLI11_PARSE(app, argc, argv);

  nodal::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = nodal::load_config(config_path);
    for (const auto& [name, mode] : subs)
      if (app.got_subcommand(name)) cfg.mode = mode;
    if (seed >= 0) cfg.set("seed", std::to_string(seed));
    if (!out_dir.empty()) cfg.out = out_dir;
  } catch (const nodal::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 4;
  }

  const nodal::RunReport rep = nodal::run(cfg);
  if (!cfg.out.empty()) {
    try {
      nodal::write_outputs(rep, cfg.out);
    } catch (const nodal::Error& e) {
      std::cerr << e.what() << '\n';
      return 4;
    }
  }
  if (verbose) rep.write_text(std::cout);
  std::cout << "verdict: " << nodal::verdict_name(rep.verdict);
  if (!rep.message.empty()) std::cout << " (" << rep.message << ")";
  std::cout << '\n';
  return rep.exit_code();
}
