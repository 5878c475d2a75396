#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "ims/app_server.hpp"
#include "ims/hss.hpp"
#include "ims/interworking.hpp"
#include "ims/policy.hpp"
#include "ims/signaling.hpp"

namespace ims {

/// Everything that can travel over a simulated link. Mp commands travel as
/// SigMessage MESSAGE requests carrying MP-VERB; CS signals travel inside
/// SGW frames.
using Payload = std::variant<SigMessage, DiameterMsg, SgwFrame, GatewayControl, CopsMsg,
                             UtRequest, MediaFlow>;

/// Trace label such as INVITE, RESPONSE-200, Cx:AuthRequest, ISUP:IAM, Mp:Mix.
std::string kind_label(const Payload& p);
std::string summarize(const Payload& p);
/// Session or dialog id the payload belongs to; empty when it has none.
std::string session_of(const Payload& p);

struct Link {
  NodeId a;
  NodeId b;
  Tick latency = 1;
  bool up = true;

  bool operator==(const Link&) const = default;
};

struct Event {
  Tick deliver_tick = 0;
  std::uint64_t seq = 0;
  NodeId src;
  NodeId dst;
  Payload payload;
};

struct TraceEntry {
  Tick tick = 0;
  NodeId src;
  NodeId dst;
  std::string kind;
  std::uint64_t seq = 0;
  std::string summary;

  bool operator==(const TraceEntry&) const = default;
};

inline constexpr std::string_view kDropKind = "DROP";
inline constexpr std::string_view kNoteKind = "NOTE";

std::string serialize(const TraceEntry& e);
TraceEntry parse_trace_entry(std::string_view line);

class Trace {
 public:
  explicit Trace(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  void append(TraceEntry e) { entries_.push_back(std::move(e)); }
  const std::vector<TraceEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Header line then one line per entry, each newline-terminated.
  std::string serialize() const;
  static Trace parse(std::string_view text);

 private:
  std::uint64_t seed_;
  std::vector<TraceEntry> entries_;
};

class Network {
 public:
  using Handler = std::function<void(const Event&)>;

  explicit Network(std::uint64_t seed = 0) : trace_(seed) {}

  void add_node(const NodeId& id);
  bool has_node(const NodeId& id) const { return nodes_.contains(id); }
  const std::set<NodeId>& nodes() const noexcept { return nodes_; }

  /// Declares an explicit bidirectional link. Throws UnknownNode or
  /// InvalidTransition (latency < 1).
  void add_link(const NodeId& a, const NodeId& b, Tick latency);
  void set_link_up(const NodeId& a, const NodeId& b, bool up);
  /// Node pairs without an explicit link are joined by an implicit link of
  /// this latency.
  void set_default_latency(Tick latency);
  /// The effective link between two nodes, explicit or implicit.
  Link link_between(const NodeId& a, const NodeId& b) const;

  /// Queues delivery at now + latency. Returns false, after logging a DROP
  /// entry, when the link is down. Throws UnknownNode.
  bool schedule(const NodeId& src, const NodeId& dst, Payload payload);
  /// Free-form trace annotation attributed to `at`.
  void note(const NodeId& at, const std::string& session, const std::string& text);

  /// Delivers events in (deliver_tick, seq) order until the queue drains.
  /// Throws TickBudgetExceeded if an event lies more than `max_ticks` past the
  /// starting tick; the queue is discarded in that case.
  void run_until_quiescent(Tick max_ticks, const Handler& handler);

  Tick now() const noexcept { return now_; }
  void advance(Tick dt);
  bool idle() const noexcept { return queue_.empty(); }
  const Trace& trace() const noexcept { return trace_; }

 private:
  struct Later {
    bool operator()(const Event& x, const Event& y) const {
      return std::tie(x.deliver_tick, x.seq) > std::tie(y.deliver_tick, y.seq);
    }
  };
  static std::pair<NodeId, NodeId> key(const NodeId& a, const NodeId& b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  }
  void require(const NodeId& id) const;

  std::set<NodeId> nodes_;
  std::map<std::pair<NodeId, NodeId>, Link> links_;
  std::set<std::pair<NodeId, NodeId>> down_;  // implicit links taken down
  Tick default_latency_ = 1;
  Tick now_ = 0;
  std::uint64_t next_seq_ = 1;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  Trace trace_;
};

}  // namespace ims
