#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nlpme/run_config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nonlocal degenerate diffusion solver and study harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned long seed = 0;
  bool seed_set = false, out_set = false, tol_set = false;
  int threads = 1;
  double tol = 0.0;

  std::vector<CLI::App*> subs;
  for (const char* name :
       {"run", "lte", "converge", "properties", "stefan", "heat"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run description file")
        ->required();
    sub->add_option("--out", out_dir, "output directory")
        ->each([&](const std::string&) { out_set = true; });
    sub->add_option("--seed", seed, "seed for randomized studies")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--threads", threads, "worker cap (reserved)");
    sub->add_option("--tol", tol, "elliptic tolerance override")
        ->each([&](const std::string&) { tol_set = true; });
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    nlpme::RunConfig cfg = nlpme::parse_config(config_path);
    cfg.command = app.get_subcommands().front()->get_name();
    if (out_set) cfg.out_dir = out_dir;
    if (seed_set) cfg.seed = seed;
    if (tol_set) cfg.tol = tol;
    return nlpme::execute(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
