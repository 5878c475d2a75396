// Internal state and node handlers behind ims::Simulation.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ims/app_server.hpp"
#include "ims/charging.hpp"
#include "ims/cscf.hpp"
#include "ims/hss.hpp"
#include "ims/interworking.hpp"
#include "ims/media.hpp"
#include "ims/netsim.hpp"
#include "ims/policy.hpp"
#include "ims/scenario.hpp"
#include "ims/simulation.hpp"

namespace ims {

// Headers private to the simulation's wire conventions.
namespace simhdr {
inline constexpr std::string_view kMedia = "MEDIA";
inline constexpr std::string_view kAnnouncement = "ANNOUNCEMENT";
}  // namespace simhdr

struct UaDialog {
  bool caller = false;
  std::string user;                 // scenario user the UA acts for
  SigMessage invite;                // as sent (caller) or received (callee)
  std::vector<NodeId> route;        // in-dialog route, front = next hop
  std::optional<NodeId> media_peer;
  bool answered = false;
  bool ended = false;
  std::int64_t next_seq = 2;
};

struct PendingRegistration {
  std::string user;
  NodeId terminal;
  std::string secret;
  std::string nonce;
  int attempts = 0;
  std::size_t record = 0;  // index into registrations_
};

struct PendingUaRequest {
  enum class Kind { Conference, Ut } kind = Kind::Conference;
  std::string user;
  std::string conf;
};

struct PcscfNode {
  PcscfState state;
  PepCache pep;
  struct Pending {
    NodeId terminal;
    std::string sa;
    bool compression = false;
  };
  std::map<std::string, Pending> registering;  // REGISTER call-id -> facts
};

struct ScscfNode {
  ScscfState state;
  PepCache pep;
};

struct MgcfCall {
  std::string ref;
  SigMessage invite;
  std::optional<SigMessage> bye;
};

struct MgcfNode {
  CsFamily family = CsFamily::IsupLike;
  int next_ref = 0;
  std::map<std::string, MgcfCall> by_session;
  std::map<std::string, std::string> session_of_ref;
};

/// Charging bookkeeping for one (node, session).
struct ChargingLeg {
  std::vector<std::pair<CdrRole, std::string>> roles;  // insertion order
  bool started = false;
  bool ended = false;
  bool invoked = false;  // AS invocation already recorded
};

class Engine {
 public:
  Engine(const Scenario& scenario, std::uint64_t seed);

  void execute(const Action& action);
  RegistrationRecord register_user(const std::string& user, const NodeId& terminal,
                                   std::optional<std::string> secret);

  // Artifacts and probes ------------------------------------------------------
  Scenario sc;
  Network net;
  CollectionLog log;
  std::vector<Delivery> deliveries;
  std::map<std::string, SessionOutcome> sessions;
  std::vector<RegistrationRecord> registrations;
  std::vector<UtOutcome> ut_results;
  std::vector<ConferenceOutcome> conference_results;
  std::vector<FloorEvent> floor_history;
  std::vector<std::string> errors;
  std::vector<std::string> rejection_log;

  std::optional<std::string> floor_holder(const std::string& conf) const;
  std::optional<NodeId> hss_assignment(const std::string& user) const;
  std::size_t bound_ids(const std::string& user) const;
  bool security_association(const NodeId& terminal) const;

 private:
  // Setup (engine.cpp)
  void build();
  void bootstrap_policy();
  void run();
  void dispatch(const Event& ev);

  // Shared plumbing (engine.cpp)
  NodeKind kind_of(const NodeId& id) const;
  const std::string& domain_of(const NodeId& id) const;
  std::optional<NodeId> first_of(NodeKind kind, const std::string& domain) const;
  const UserDecl& user_decl(const std::string& name) const;
  Uri primary_id(const std::string& user) const;
  std::optional<std::string> user_of(const Uri& public_id) const;
  NodeId hss_for(const Uri& public_id) const;
  std::vector<NodeId> all_hss() const;
  std::set<NodeId> domain_nodes(const std::string& domain) const;
  NodeId terminal_for(const std::string& user, const std::optional<NodeId>& requested) const;

  bool send(const NodeId& src, const NodeId& dst, Payload payload);
  bool send_sig(const NodeId& src, const NodeId& dst, SigMessage msg);
  /// Pushes `self` on the via stack and sends; on a drop answers 408 upstream.
  bool forward_request(const NodeId& self, const NodeId& dst, SigMessage msg);
  void respond(const NodeId& self, const SigMessage& req, int code, std::string_view reason = {},
               const std::function<void(SigMessage&)>& decorate = {});
  void forward_response(const NodeId& self, SigMessage resp);
  void loose_route(const NodeId& self, SigMessage msg, bool record);

  using DiameterCont = std::function<void(const DiameterMsg&)>;
  using FailCont = std::function<void()>;
  void query(const NodeId& self, const NodeId& server, DiameterMsg req, DiameterCont on_answer,
             FailCont on_fail);
  void on_diameter_answer(const NodeId& self, const DiameterMsg& ans);

  // Charging (engine.cpp)
  bool charging_capable(const NodeId& id) const;
  void cdr(const NodeId& node, const std::string& sid, CdrEvent ev, const std::string& user,
           CdrRole role, bool on_behalf = false);
  void charge_role(const NodeId& node, const std::string& sid, CdrRole role, const Uri& user);
  void charge_final(const NodeId& node, const SigMessage& resp);

  void reject(const std::string& reason);

  // CSCFs and subscriber databases (cscf_nodes.cpp)
  void on_pcscf(const Event& ev, SigMessage msg);
  void pcscf_originating(const NodeId& self, SigMessage msg, const NodeId& terminal);
  void pcscf_response(const NodeId& self, SigMessage msg);
  void on_icscf(const Event& ev, SigMessage msg);
  void icscf_register(const NodeId& self, SigMessage msg);
  void icscf_terminating(const NodeId& self, SigMessage msg);
  void on_scscf(const Event& ev, SigMessage msg);
  void scscf_register(const NodeId& self, SigMessage msg);
  void scscf_session(const NodeId& self, const NodeId& src, SigMessage msg);
  void scscf_originating(const NodeId& self, SigMessage msg);
  void scscf_terminating(const NodeId& self, SigMessage msg);
  void scscf_dispatch(const NodeId& self, SigMessage msg, const RoutingDecision& d);
  bool scscf_next_as(const NodeId& self, SigMessage& msg, std::string_view chain_header);
  void scscf_forward(const NodeId& self, const NodeId& dst, SigMessage msg);
  void scscf_response(const NodeId& self, SigMessage msg);
  void on_hss(const Event& ev, const DiameterMsg& req);
  /// Finds the HSS owning `public_id`, asking the SLF over Dx when more than
  /// one HSS is deployed.
  void locate_hss(const NodeId& self, const std::string& sid, const Uri& public_id,
                  std::function<void(const NodeId&)> found, std::function<void()> unknown,
                  FailCont fail);
  void clear_registration(const NodeId& self, const std::string& sid, const Uri& public_id);
  void on_slf(const Event& ev, const DiameterMsg& req);
  RoutingEnv routing_env(const NodeId& scscf) const;
  /// Policy check at a PEP; calls `done` with the decision, possibly after a
  /// COPS round trip.
  void enforce(const NodeId& self, PepRole role, const SigMessage& msg,
               std::function<void(const PolicyDecision&)> done);

  // Edge, service and media nodes (edge_nodes.cpp)
  void on_ua(const Event& ev, SigMessage msg);
  void ua_request(const NodeId& self, const SigMessage& msg);
  void ua_response(const NodeId& self, const SigMessage& msg);
  void ua_send_in_dialog(const NodeId& self, const std::string& sid, MessageKind kind);
  void on_as(const Event& ev);
  void as_invoke(const NodeId& self, SigMessage msg);
  void as_continue(const NodeId& self, SigMessage msg, const AsContext& ctx);
  void on_bgcf(const Event& ev, SigMessage msg);
  void on_mgcf(const Event& ev);
  void on_sgw(const Event& ev, const SgwFrame& frame);
  void on_pstn(const Event& ev, const SgwFrame& frame);
  void on_mrfc(const Event& ev, SigMessage msg);
  void on_mrfp(const Event& ev, const SigMessage& msg);
  void on_pdp(const Event& ev, const CopsMsg& msg);

  // Actions (engine.cpp)
  void act(const action::Register& a);
  void act(const action::Call& a);
  void act(const action::AsCall& a);
  void act(const action::Hangup& a);
  void act(const action::UtConfig& a);
  void act(const action::Conference& a);
  void act(const action::LinkState& a);
  void act(const action::Wait& a);
  void start_register(const std::string& user, const NodeId& terminal, const std::string& secret);
  void send_register(const std::string& sid);
  void finish_registrations();
  /// Undoes whatever a failed registration left behind at the P-CSCF, the
  /// S-CSCFs and the HSS so that no partial registration survives.
  void rollback_registration(const PendingRegistration& p, const std::string& sid);

  // Node state ------------------------------------------------------------------
  std::map<NodeId, const NodeDecl*> decl_;
  std::map<NodeId, PcscfNode> pcscf_;
  std::map<NodeId, IcscfState> icscf_;
  std::map<NodeId, ScscfNode> scscf_;
  std::map<NodeId, Hss> hss_;
  SlfTable slf_;
  AsDirectory as_dir_;
  std::map<NodeId, BreakoutTable> breakout_;
  std::map<NodeId, MgcfNode> mgcf_;
  std::map<std::string, NodeId> sgw_refs_;  // call_ref -> MGCF
  std::map<NodeId, std::map<std::string, MediaAdaptation>> mgw_contexts_;
  std::map<NodeId, Mrfc> mrfc_;
  std::map<NodeId, std::map<std::string, ConferenceState>> mrfp_;
  std::map<NodeId, Pdp> pdp_;
  EnumRegistry enum_;
  CodecTable codecs_ = CodecTable::defaults();

  std::map<NodeId, std::map<std::string, UaDialog>> dialogs_;
  std::map<std::string, PendingRegistration> pending_reg_;  // by REGISTER call-id
  std::map<std::string, PendingUaRequest> pending_ua_;      // by call-id / request id
  std::map<NodeId, bool> ua_compression_;
  std::map<std::pair<NodeId, std::string>, std::string> net_auth_;  // (S-CSCF, private id)
  std::map<std::string, NodeId> last_terminal_;  // user -> terminal of last registration

  std::map<std::pair<NodeId, std::string>, ChargingLeg> legs_;
  std::map<std::pair<NodeId, std::string>, std::pair<DiameterCont, FailCont>> diameter_wait_;
  std::map<std::pair<NodeId, std::string>, std::function<void(const PolicyDecision&)>> cops_wait_;

  int next_register_ = 0;
  int next_mr_ = 0;
  int next_ut_ = 0;
};

}  // namespace ims
