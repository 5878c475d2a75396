#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ims/scenario.hpp"
#include "ims/simulation.hpp"

namespace ims {

struct ExpectResult {
  int line = 0;
  std::string text;
  bool pass = false;
  std::string detail;  // why it failed, empty on success
};

struct ActionFailure {
  int line = 0;
  std::string text;
  std::string error;
};

struct RunReport {
  std::string scenario;
  std::string trace;  // serialized trace
  std::string cdrs;   // CDR dump
  std::vector<ExpectResult> results;
  std::vector<ActionFailure> action_failures;
  bool budget_exceeded = false;

  bool passed() const;
  /// 0 when every EXPECT passes, 1 otherwise.
  int exit_code() const { return passed() ? 0 : 1; }
  const ExpectResult* first_failure() const;
  /// Human-readable PASS/FAIL lines, one per EXPECT.
  std::string summary() const;
};

/// Runs the scenario's actions in order and evaluates every EXPECT against
/// the final state. Action errors become failed entries, not exceptions.
RunReport run_scenario(const Scenario& scenario, std::uint64_t seed = 0);

/// Same, keeping the simulation for further inspection.
RunReport run_scenario(const Scenario& scenario, Simulation& sim);

}  // namespace ims
