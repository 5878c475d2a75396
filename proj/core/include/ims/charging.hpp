#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ims/hss.hpp"

namespace ims {

enum class ChargingNodeType { Pcscf, Icscf, Scscf, Bgcf, Mrfc, As };
enum class CdrEvent { Register, SessionStart, SessionEnd, AsInvocation, MediaControl };
enum class CdrRole { Originating, Terminating, None };

std::string_view to_string(ChargingNodeType t);
std::string_view to_string(CdrEvent e);
std::string_view to_string(CdrRole r);

struct Cdr {
  Tick tick = 0;
  NodeId node_id;
  ChargingNodeType node_type = ChargingNodeType::Scscf;
  std::string session_id;
  CdrEvent event = CdrEvent::SessionStart;
  std::string served_user;
  CdrRole role = CdrRole::None;
  bool as_on_behalf = false;

  bool operator==(const Cdr&) const = default;
};

/// Tab-separated, fields in declaration order, booleans as 0/1.
std::string serialize(const Cdr& cdr);
Cdr parse_cdr(std::string_view line);

/// Append-only record store of the charging collection node.
class CollectionLog {
 public:
  /// Throws InvalidTransition if the record would break tick order or the
  /// record invariants (session id on session events; on-behalf flag only on
  /// AS records or AS invocations).
  void append(Cdr cdr);

  const std::vector<Cdr>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::string dump() const;

 private:
  std::vector<Cdr> records_;
};

struct CdrSummary {
  std::string session_id;
  std::set<NodeId> nodes;
  std::optional<Tick> start_tick;  // first SessionStart
  std::optional<Tick> end_tick;    // last SessionEnd
  std::set<std::string> served_users;
  std::size_t records = 0;
  bool as_on_behalf = false;

  bool operator==(const CdrSummary&) const = default;
  bool empty() const { return records == 0; }
};

CdrSummary correlate(const CollectionLog& log, const std::string& session_id);
std::map<std::string, CdrSummary> correlate_all(const CollectionLog& log);

}  // namespace ims
