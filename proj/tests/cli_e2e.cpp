// End-to-end checks of the installed command line: subcommand dispatch,
// config/task mismatch, exit codes, artifact emission.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "eigenweight/csv_io.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  std::cout << (ok ? "[ok] " : "[FAIL] ") << what << "\n";
  if (!ok) ++failures;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EIGENWEIGHT_BIN) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

int main() {
  const fs::path dir = fs::temp_directory_path() / "eigenweight_cli_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const fs::path cfg = dir / "solve.cfg";
  eigenweight::write_text_file(cfg.string(),
                               "domain = 0,1\n"
                               "elements_per_axis = 16\n"
                               "bc = dirichlet\n"
                               "weight_twovalued = 1,1,0\n"
                               "task = solve\n");

  expect(run_cli("solve --config " + cfg.string() + " --out " + (dir / "out").string()) == 0,
         "solve exits 0");
  expect(fs::exists(dir / "out" / "summary"), "summary written");
  expect(fs::exists(dir / "out" / "weight.csv"), "weight.csv written");

  expect(run_cli("maximize --config " + cfg.string()) == 2, "task mismatch exits 2");
  expect(run_cli("solve --config " + (dir / "missing.cfg").string()) == 2,
         "missing config exits 2");
  expect(run_cli("frobnicate --config x") != 0, "unknown subcommand fails");
  expect(run_cli("solve") != 0, "missing --config fails");

  const fs::path bad = dir / "bad.cfg";
  eigenweight::write_text_file(bad.string(),
                               "domain = 0,1\n"
                               "elements_per_axis = 8\n"
                               "bc = dirichlet\n"
                               "weight_twovalued = 1,0.5,-1\n"
                               "task = maximize\n");
  expect(run_cli("maximize --config " + bad.string()) == 2,
         "maximize in the unbounded regime is a config error");

  expect(run_cli("validate") == 0, "validate passes");

  if (failures == 0) std::cout << "cli_e2e: all checks passed\n";
  return failures == 0 ? 0 : 1;
}
