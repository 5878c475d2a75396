// imssim: load, validate and run IMS scenario files.
#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

#include "ims/error.hpp"
#include "ims/runner.hpp"
#include "ims/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kLoadError = 2;

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int cmd_validate(const fs::path& file) {
  try {
    auto sc = ims::load_scenario(file);
    std::cout << "OK " << sc.name << ": " << sc.nodes.size() << " nodes, " << sc.users.size()
              << " users, " << sc.actions.size() << " actions, " << sc.expects.size() << " expects\n";
    return 0;
  } catch (const ims::Error& e) {
    std::cerr << file.string() << ": " << e.what() << '\n';
    return kLoadError;
  }
}

int cmd_run(const fs::path& file, const std::string& trace_out, const std::string& cdr_out,
            std::uint64_t seed) {
  ims::Scenario sc;
  try {
    sc = ims::load_scenario(file);
  } catch (const ims::Error& e) {
    std::cerr << file.string() << ": " << e.what() << '\n';
    return kLoadError;
  }
  auto report = ims::run_scenario(sc, seed);
  if (!trace_out.empty() && !write_file(trace_out, report.trace)) {
    std::cerr << "cannot write " << trace_out << '\n';
  }
  if (!cdr_out.empty() && !write_file(cdr_out, report.cdrs)) {
    std::cerr << "cannot write " << cdr_out << '\n';
  }
  std::cout << report.summary();
  if (const auto* f = report.first_failure()) {
    std::cout << "FAILED " << sc.name << ": first failure at line " << f->line << ": " << f->text << '\n';
  } else {
    std::cout << "PASSED " << sc.name << " (" << report.results.size() << " expects)\n";
  }
  return report.exit_code();
}

struct BatchResult {
  fs::path file;
  int code = 0;
  std::string line;
};

BatchResult run_one(const fs::path& file, std::uint64_t seed) {
  try {
    auto sc = ims::load_scenario(file);
    auto report = ims::run_scenario(sc, seed);
    std::string line = (report.passed() ? "PASS " : "FAIL ") + sc.name;
    if (const auto* f = report.first_failure()) line += " (line " + std::to_string(f->line) + ": " + f->text + ")";
    return {file, report.exit_code(), line};
  } catch (const ims::Error& e) {
    return {file, kLoadError, "LOAD-ERROR " + file.filename().string() + ": " + e.what()};
  }
}

int cmd_run_all(const fs::path& dir, std::uint64_t seed, unsigned jobs) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".scn") files.push_back(entry.path());
  }
  if (ec) {
    std::cerr << dir.string() << ": " << ec.message() << '\n';
    return kLoadError;
  }
  std::sort(files.begin(), files.end());

  // Simulations share nothing, so each scenario runs on its own worker.
  std::vector<BatchResult> results(files.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < files.size();) results[i] = run_one(files[i], seed);
    });
  }
  for (auto& th : pool) th.join();

  int code = 0;
  for (const auto& r : results) {
    std::cout << r.line << '\n';
    code = std::max(code, r.code);
  }
  std::cout << files.size() << " scenarios\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic IMS core-network scenario runner"};
  app.require_subcommand(1);

  fs::path file;
  std::string trace_out, cdr_out;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run a scenario and check its EXPECT lines");
  run->add_option("file", file, "Scenario file")->required();
  run->add_option("--trace", trace_out, "Write the trace to this file");
  run->add_option("--cdr", cdr_out, "Write the CDR dump to this file");
  run->add_option("--seed", seed, "Seed recorded in the trace header");

  fs::path vfile;
  auto* validate = app.add_subcommand("validate", "Parse and reference-check a scenario");
  validate->add_option("file", vfile, "Scenario file")->required();

  fs::path dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t batch_seed = 0;
  auto* run_all = app.add_subcommand("run-all", "Run every .scn file in a directory");
  run_all->add_option("dir", dir, "Scenario directory")->required();
  run_all->add_option("-j,--jobs", jobs, "Parallel workers");
  run_all->add_option("--seed", batch_seed, "Seed recorded in each trace header");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kLoadError;
  }

  if (*run) return cmd_run(file, trace_out, cdr_out, seed);
  if (*validate) return cmd_validate(vfile);
  return cmd_run_all(dir, batch_seed, jobs);
}
