#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "eigenweight/config.hpp"
#include "eigenweight/csv_io.hpp"
#include "eigenweight/runner.hpp"

namespace {

struct TaskArgs {
  std::string config_path;
  std::string out_dir;
};

int run_task(eigenweight::Task task, const TaskArgs& args) {
  const auto text = eigenweight::read_text_file(args.config_path);
  eigenweight::RunConfig config = eigenweight::parse_config(text);
  if (config.task != task) {
    std::cerr << "config task '" << eigenweight::task_name(config.task)
              << "' does not match subcommand '" << eigenweight::task_name(task) << "'\n";
    return 2;
  }
  return eigenweight::run(config, std::cout, args.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"principal eigenvalue solver and rearrangement optimizer for -div(grad u) = lambda m u"};
  app.require_subcommand(1);

  TaskArgs args;
  auto add_task = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", args.config_path, "path to a key = value config file")->required();
    sub->add_option("--out", args.out_dir, "output directory (overrides config output_dir)");
    return sub;
  };

  CLI::App* solve = add_task("solve", "principal eigenpair of a fixed weight");
  CLI::App* minimize = add_task("minimize", "minimize lambda1 over the rearrangement class");
  CLI::App* maximize = add_task("maximize", "maximize lambda1 over the class closure");
  CLI::App* sweep = add_task("sweep", "fragmentation sweep in the unbounded-supremum regime");
  CLI::App* probe = add_task("probe", "property probes on a fixed weight");

  std::uint64_t seed = 42;
  CLI::App* validate = app.add_subcommand("validate", "run the built-in invariant battery");
  validate->add_option("--seed", seed, "seed for the randomized checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_task(eigenweight::Task::Solve, args);
    if (minimize->parsed()) return run_task(eigenweight::Task::Minimize, args);
    if (maximize->parsed()) return run_task(eigenweight::Task::Maximize, args);
    if (sweep->parsed()) return run_task(eigenweight::Task::Sweep, args);
    if (probe->parsed()) return run_task(eigenweight::Task::Probe, args);
    if (validate->parsed()) {
      const auto report = eigenweight::validate_suite(seed);
      for (const auto& check : report.checks)
        std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << " (" << check.detail
                  << ")\n";
      return report.all_pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
