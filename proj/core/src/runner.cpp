#include "ims/runner.hpp"

#include <algorithm>
#include <sstream>

#include "ims/error.hpp"

namespace ims {

bool RunReport::passed() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

const ExpectResult* RunReport::first_failure() const {
  auto it = std::find_if(results.begin(), results.end(), [](const auto& r) { return !r.pass; });
  return it == results.end() ? nullptr : &*it;
}

std::string RunReport::summary() const {
  std::ostringstream out;
  for (const auto& r : results) {
    out << (r.pass ? "PASS" : "FAIL") << " line " << r.line << ": " << r.text;
    if (!r.pass && !r.detail.empty()) out << " (" << r.detail << ')';
    out << '\n';
  }
  return out.str();
}

namespace {

std::string join(const std::set<std::string>& items) {
  std::string out;
  for (const auto& i : items) {
    if (!out.empty()) out += ',';
    out += i;
  }
  return out.empty() ? "-" : out;
}

struct Evaluator {
  const Simulation& sim;
  const std::string& trace_text;

  std::pair<bool, std::string> operator()(const expect::Delivered& e) const {
    for (const auto& d : sim.deliveries()) {
      if (d.uri == e.uri) return {true, {}};
    }
    return {false, "no delivery to " + to_string(e.uri)};
  }
  std::pair<bool, std::string> operator()(const expect::NotDelivered& e) const {
    for (const auto& d : sim.deliveries()) {
      if (d.uri == e.uri) return {false, "delivered at " + d.node + " tick " + std::to_string(d.tick)};
    }
    return {true, {}};
  }
  std::pair<bool, std::string> operator()(const expect::Rejected& e) const {
    auto r = sim.rejections();
    if (std::find(r.begin(), r.end(), e.reason) != r.end()) return {true, {}};
    std::set<std::string> seen(r.begin(), r.end());
    return {false, "rejections seen: " + join(seen)};
  }
  std::pair<bool, std::string> operator()(const expect::CdrNodes& e) const {
    auto nodes = correlate(sim.cdrs(), e.ref).nodes;
    if (nodes == e.nodes) return {true, {}};
    return {false, "CDR nodes " + join(nodes)};
  }
  std::pair<bool, std::string> operator()(const expect::Scscf& e) const {
    auto got = sim.hss_assignment(e.user);
    if (got == e.id) return {true, {}};
    return {false, "assigned " + got.value_or("none")};
  }
  std::pair<bool, std::string> operator()(const expect::TraceContains& e) const {
    if (trace_text.find(e.text) != std::string::npos) return {true, {}};
    return {false, "text not in trace"};
  }
  std::pair<bool, std::string> operator()(const expect::Registered& e) const {
    const bool bound = sim.bound_ids(e.user) > 0;
    if (bound == e.yes) return {true, {}};
    return {false, bound ? "user is registered" : "user is not registered"};
  }
  std::pair<bool, std::string> operator()(const expect::FloorHolder& e) const {
    auto holder = sim.floor_holder(e.conf);
    std::optional<std::string> want;
    if (e.user) want = to_string(sim.scenario().user(*e.user)->public_ids.front());
    if (holder == want) return {true, {}};
    return {false, "holder " + holder.value_or("none")};
  }
  std::pair<bool, std::string> operator()(const expect::AsOnBehalf& e) const {
    const bool flag = correlate(sim.cdrs(), e.ref).as_on_behalf;
    if (flag == e.yes) return {true, {}};
    return {false, flag ? "flag set" : "flag not set"};
  }
};

}  // namespace

RunReport run_scenario(const Scenario& scenario, Simulation& sim) {
  RunReport report;
  report.scenario = scenario.name;
  for (const auto& a : scenario.actions) {
    if (report.budget_exceeded) break;
    try {
      sim.execute(a);
    } catch (const Error& e) {
      report.action_failures.push_back({a.line, a.text, e.what()});
      // The queue was discarded; later actions would run on a broken state.
      if (e.code() == Errc::TickBudgetExceeded) report.budget_exceeded = true;
    }
  }
  report.trace = sim.trace().serialize();
  report.cdrs = sim.cdrs().dump();

  Evaluator eval{sim, report.trace};
  for (const auto& e : scenario.expects) {
    ExpectResult r{e.line, e.text, false, {}};
    if (report.budget_exceeded) {
      r.detail = "tick budget exceeded";
    } else {
      try {
        std::tie(r.pass, r.detail) = std::visit(eval, e.body);
      } catch (const Error& err) {
        r.detail = err.what();
      }
    }
    report.results.push_back(std::move(r));
  }
  // A failed action is a failed assertion of its own.
  for (const auto& f : report.action_failures) report.results.push_back({f.line, f.text, false, f.error});
  std::stable_sort(report.results.begin(), report.results.end(),
                   [](const auto& a, const auto& b) { return a.line < b.line; });
  return report;
}

RunReport run_scenario(const Scenario& scenario, std::uint64_t seed) {
  Simulation sim(scenario, seed);
  return run_scenario(scenario, sim);
}

}  // namespace ims
