#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ims/hss.hpp"
#include "ims/identity.hpp"
#include "ims/signaling.hpp"

namespace ims {

struct RegistrationBinding {
  Uri public_id;
  NodeId contact;  // terminal node
  NodeId pcscf;
  Tick created_tick = 0;
  Tick expiry_tick = 0;
  std::string security_association_id;
  bool compression_negotiated = false;

  bool operator==(const RegistrationBinding&) const = default;
};

enum class RegistrationStatus { Registered, AuthFailed, Barred, Timeout, NoPcscfConfigured };

std::string_view to_string(RegistrationStatus s);

struct RegistrationResult {
  RegistrationStatus status = RegistrationStatus::Timeout;
  std::optional<NodeId> scscf;
  std::vector<Uri> registered_ids;
};

/// P-CSCF discovery table: terminal -> P-CSCF, configured statically.
using PcscfTable = std::map<NodeId, NodeId>;

/// Throws Error{NoPcscfConfigured}.
NodeId pcscf_discover(const NodeId& terminal, const PcscfTable& table);

struct PcscfState {
  NodeId id;
  std::string domain;
  bool premises = false;  // located at the customer's premises
  std::set<NodeId> served_terminals;
  std::map<NodeId, std::string> security_assocs;  // terminal -> SA token
  std::map<NodeId, bool> compression;             // terminal -> negotiated
  std::map<std::string, NodeId> service_routes;   // public id -> S-CSCF
  int next_sa = 0;
};

struct IcscfState {
  NodeId id;
  std::string domain;
  bool thig_enabled = false;
  std::string thig_key;
  std::map<std::string, NodeId> issued;  // token -> hidden node id
};

struct ScscfDescriptor {
  NodeId id;
  std::set<std::string> capabilities;
  std::size_t binding_count = 0;
};

/// Sticky assignment first; otherwise the capable S-CSCF with the fewest
/// bindings, ties broken by the smallest id. Throws Error{NoEligibleScscf}.
NodeId icscf_select_scscf(const std::optional<NodeId>& existing,
                          const std::set<std::string>& required_capabilities,
                          const std::vector<ScscfDescriptor>& candidates);

std::string thig_token(const IcscfState& icscf, const NodeId& hidden);
bool is_thig_token(std::string_view id);

/// Replaces every home-domain node id (other than the I-CSCF itself) in the
/// route and via stacks and the RECORD-ROUTE and CONTACT headers with a THIG
/// token issued by this I-CSCF.
SigMessage thig_apply(IcscfState& icscf, const std::set<NodeId>& home_nodes, SigMessage msg);
/// Restores ids hidden by this I-CSCF. Tokens issued under another key pass
/// through; a token under this key that was never issued throws UnknownToken.
SigMessage thig_strip(const IcscfState& icscf, SigMessage msg);

struct SessionState {
  std::string session_id;
  Uri caller;
  Uri callee;
  bool originating = false;
  bool terminating = false;
  bool as_on_behalf = false;
  bool started = false;
  bool ended = false;
  std::vector<NodeId> pending_chain;  // AS ids still to visit
  Direction chain_direction = Direction::Originating;
};

class ScscfState {
 public:
  ScscfState() = default;
  ScscfState(NodeId id, std::string domain, std::set<std::string> capabilities = {});

  const NodeId& id() const noexcept { return id_; }
  const std::string& domain() const noexcept { return domain_; }
  const std::set<std::string>& capabilities() const noexcept { return capabilities_; }

  /// Stores bindings for every id in the implicit set and caches the profile.
  void bind(const UserProfile& profile, const std::vector<Uri>& ids, const NodeId& contact,
            const NodeId& pcscf, Tick now, Tick expiry, std::string sa_id, bool compression);
  void cache_profile(const UserProfile& profile);
  void unbind(const Uri& public_id);

  const UserProfile* profile_for(const Uri& public_id) const;
  const RegistrationBinding* binding_for(const Uri& public_id, Tick now) const;
  bool is_registered(const Uri& public_id, Tick now) const {
    return binding_for(public_id, now) != nullptr;
  }
  std::size_t binding_count(Tick now) const;
  const std::map<std::string, RegistrationBinding>& registrar() const noexcept {
    return registrar_;
  }

  std::map<std::string, SessionState> active_sessions;
  std::map<std::string, AuthVector> pending_auth;  // private id -> vector

 private:
  NodeId id_;
  std::string domain_;
  std::set<std::string> capabilities_;
  std::map<std::string, RegistrationBinding> registrar_;  // public id -> binding
  std::map<std::string, UserProfile> profiles_;           // private id -> profile
  std::map<std::string, std::string> profile_index_;      // public id -> private id
};

enum class RejectReason { UnknownDestination, UserUnavailable };

std::string_view to_string(RejectReason r);

namespace route {
struct ToAsChain {
  std::vector<NodeId> as_ids;
  bool operator==(const ToAsChain&) const = default;
};
struct ToIcscf {
  std::string domain;
  bool operator==(const ToIcscf&) const = default;
};
struct ToPcscf {
  NodeId terminal;
  NodeId pcscf;
  bool operator==(const ToPcscf&) const = default;
};
struct ToBgcf {
  bool operator==(const ToBgcf&) const = default;
};
struct ToExternalSip {
  std::string host;
  bool operator==(const ToExternalSip&) const = default;
};
struct Reject {
  RejectReason reason;
  bool operator==(const Reject&) const = default;
};
}  // namespace route

struct RoutingDecision {
  std::variant<route::ToAsChain, route::ToIcscf, route::ToPcscf, route::ToBgcf,
               route::ToExternalSip, route::Reject>
      action;
  /// Set when routing rewrote the target (ENUM hit, CS forwarding number).
  std::optional<Uri> rewritten_to;

  bool operator==(const RoutingDecision&) const = default;
};

std::string describe(const RoutingDecision& d);

/// Network facts an S-CSCF consults besides its own state.
struct RoutingEnv {
  std::string local_domain;
  std::set<std::string> ims_domains;
  std::set<std::string> external_hosts;
  const EnumRegistry* enum_registry = nullptr;
  bool force_icscf = false;
  Tick now = 0;
};

RoutingDecision route_originating(const ScscfState& scscf, const RoutingEnv& env,
                                  const SigMessage& msg);
RoutingDecision route_terminating(const ScscfState& scscf, const RoutingEnv& env,
                                  const SigMessage& msg);

/// Appends `id` to the RECORD-ROUTE header unless it is already the last entry.
void record_route(SigMessage& msg, const NodeId& id);
std::vector<NodeId> record_route_set(const SigMessage& msg);

}  // namespace ims
