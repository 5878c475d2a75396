#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ims/charging.hpp"
#include "ims/cscf.hpp"
#include "ims/netsim.hpp"
#include "ims/scenario.hpp"

namespace ims {

/// An INVITE (or PSTN IAM) that reached its final endpoint.
struct Delivery {
  Tick tick = 0;
  NodeId node;
  Uri uri;
  std::string session;
};

/// Caller-side view of one call, keyed by the scenario's session ref.
struct SessionOutcome {
  std::string ref;
  NodeId origin;
  std::optional<int> final_code;
  std::string reason;
  bool answered = false;
  bool ended = false;
};

struct RegistrationRecord {
  std::string user;
  NodeId terminal;
  std::string session;
  RegistrationStatus status = RegistrationStatus::Timeout;
  std::string reason;  // empty on success
  std::optional<NodeId> scscf;
};

struct UtOutcome {
  std::string user;
  NodeId as;
  std::string result;  // "ok" or an error code name
};

struct ConferenceOutcome {
  std::string session;
  std::string conf;
  std::string user;
  int code = 0;
  std::string reason;
  std::string floor;  // floor outcome for floor requests
};

/// MRFP-side floor change: `holder` is the new holder, nullopt when released.
struct FloorEvent {
  Tick tick = 0;
  std::string conf;
  std::optional<std::string> holder;
};

class Engine;

/// One scenario's network: node state, the event loop and collected
/// artifacts. Every action is run to quiescence before the next one.
class Simulation {
 public:
  explicit Simulation(const Scenario& scenario, std::uint64_t seed = 0);
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  /// Throws Error when the action cannot be carried out (e.g. no terminal to
  /// place a call from) or the tick budget runs out.
  void execute(const Action& action);
  /// Registration convenience used by property tests: runs the flow and
  /// returns its result.
  RegistrationRecord register_user(const std::string& user, const NodeId& terminal,
                                   std::optional<std::string> secret = std::nullopt);

  const Scenario& scenario() const;
  Tick now() const;
  const Trace& trace() const;
  const CollectionLog& cdrs() const;
  const std::vector<Delivery>& deliveries() const;
  const std::map<std::string, SessionOutcome>& sessions() const;
  const std::vector<RegistrationRecord>& registrations() const;
  const std::vector<UtOutcome>& ut_results() const;
  const std::vector<ConferenceOutcome>& conference_results() const;
  const std::vector<FloorEvent>& floor_history() const;
  /// Handler failures caught during delivery, already noted in the trace.
  const std::vector<std::string>& errors() const;

  /// Floor holder as the MRFP last applied it.
  std::optional<std::string> floor_holder(const std::string& conf) const;
  /// S-CSCF recorded in the HSS for the user's first public id.
  std::optional<NodeId> hss_assignment(const std::string& user) const;
  /// Number of the user's public ids with a live binding at any S-CSCF.
  std::size_t bound_ids(const std::string& user) const;
  bool security_association(const NodeId& terminal) const;
  /// REASON values of every failed call, registration, conference request
  /// and Ut edit, in order of occurrence.
  std::vector<std::string> rejections() const;

 private:
  std::unique_ptr<Engine> engine_;
};

}  // namespace ims
