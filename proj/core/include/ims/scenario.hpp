#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ims/app_server.hpp"
#include "ims/hss.hpp"
#include "ims/interworking.hpp"
#include "ims/media.hpp"
#include "ims/policy.hpp"
#include "ims/signaling.hpp"

namespace ims {

enum class NodeKind {
  Pcscf, Icscf, Scscf, Hss, Slf, As, Bgcf, Mgcf, Sgw, Mgw, Mrfc, Mrfp, Pdp, Terminal, ExtSip, Pstn
};

std::string_view to_string(NodeKind k);
NodeKind parse_node_kind(std::string_view text);

struct NodeDecl {
  NodeKind kind = NodeKind::Terminal;
  NodeId id;
  std::string domain;
  bool thig = false;                  // ICSCF
  std::set<std::string> caps;         // SCSCF
  bool premises = false;              // PCSCF
  AsKind as_kind = AsKind::SipAs;     // AS
  AsMode as_mode = AsMode::Proxy;     // AS
  std::optional<NodeId> scscf;        // AS: S-CSCF used for requests it originates
  std::optional<std::string> host;    // EXTSIP
  CsFamily family = CsFamily::IsupLike;  // MGCF
  bool hiding = false;                // BGCF
  int line = 0;
};

struct LinkDecl {
  NodeId a;
  NodeId b;
  Tick latency = 1;
  int line = 0;
};

struct UserDecl {
  std::string name;
  std::string private_id;
  std::vector<Uri> public_ids;
  std::string secret;
  std::set<MediaKind> media = {MediaKind::Audio, MediaKind::Video, MediaKind::Data};
  bool barred = false;
  std::optional<TelUri> cs_forward;
  std::optional<NodeId> hss;
  std::set<std::string> require;
  int line = 0;
};

struct IfcDecl {
  std::string user;
  InitialFilterCriterion ifc;
  int line = 0;
};

struct ScreenDecl {
  NodeId as;
  std::string owner;
  std::set<Uri> allow;
  SipUri target;
  SipUri deflect;
  int line = 0;
};

struct RoutingDecl {
  NodeId as;
  std::string owner;
  NodeId source;
  int line = 0;
};

struct EnumDecl {
  TelUri tel;
  SipUri target;
  int line = 0;
};

struct BreakoutDecl {
  std::optional<std::string> prefix;  // nullopt: default entry
  BreakoutTarget target;
  std::optional<NodeId> at;           // nullopt: every BGCF
  int line = 0;
};

struct PolicyDecl {
  std::optional<std::string> user;  // nullopt: network-wide
  PolicyRule rule;                  // rule.user resolved at build time
  int line = 0;
};

namespace action {
struct Register {
  std::string user;
  NodeId terminal;
  std::optional<std::string> secret;  // overrides the provisioned secret
};
struct Call {
  std::string ref;
  std::string user;
  Uri target;
  std::optional<NodeId> terminal;
  std::optional<SessionDescription> media;
};
struct AsCall {
  std::string ref;
  NodeId as;
  std::string user;
  Uri target;
  std::optional<SessionDescription> media;
};
struct Hangup {
  std::string ref;
};
struct UtConfig {
  std::string user;
  NodeId as;
  UtEdit edit;
};
struct Conference {
  MrOp op = MrOp::Join;
  std::string conf;
  std::string user;
  std::set<MediaKind> media = {MediaKind::Audio};
  std::string clip;
};
struct LinkState {
  NodeId a;
  NodeId b;
  bool up = false;
};
struct Wait {
  Tick ticks = 0;
};
}  // namespace action

using ActionBody = std::variant<action::Register, action::Call, action::AsCall, action::Hangup,
                                action::UtConfig, action::Conference, action::LinkState,
                                action::Wait>;

struct Action {
  ActionBody body;
  int line = 0;
  std::string text;  // the directive as written, for reports
};

namespace expect {
struct Delivered {
  Uri uri;
};
struct NotDelivered {
  Uri uri;
};
struct Rejected {
  std::string reason;
};
struct CdrNodes {
  std::string ref;
  std::set<NodeId> nodes;
};
struct Scscf {
  std::string user;
  std::optional<NodeId> id;  // nullopt: no assignment
};
struct TraceContains {
  std::string text;
};
struct Registered {
  std::string user;
  bool yes = true;
};
struct FloorHolder {
  std::string conf;
  std::optional<std::string> user;
};
struct AsOnBehalf {
  std::string ref;
  bool yes = true;
};
}  // namespace expect

using ExpectBody =
    std::variant<expect::Delivered, expect::NotDelivered, expect::Rejected, expect::CdrNodes,
                 expect::Scscf, expect::TraceContains, expect::Registered, expect::FloorHolder,
                 expect::AsOnBehalf>;

struct Expectation {
  ExpectBody body;
  int line = 0;
  std::string text;
};

struct Scenario {
  std::string name;
  std::vector<std::string> domains;  // declaration order
  std::vector<NodeDecl> nodes;
  std::vector<LinkDecl> links;
  std::map<NodeId, NodeId> terminal_pcscf;
  std::vector<UserDecl> users;
  std::vector<IfcDecl> ifcs;
  std::vector<ScreenDecl> screens;
  std::vector<RoutingDecl> routings;
  std::vector<EnumDecl> enums;
  std::vector<BreakoutDecl> breakouts;
  std::vector<PolicyDecl> policies;
  std::optional<std::string> enum_apex;
  bool force_icscf = false;
  bool policy_provision = true;
  Tick default_latency = 1;
  Tick lifetime = kDefaultBindingLifetime;
  Tick tick_budget = 100000;
  std::vector<Action> actions;
  std::vector<Expectation> expects;

  const NodeDecl* node(const NodeId& id) const;
  const UserDecl* user(const std::string& name) const;
  /// First node of `kind` in `domain`, in declaration order.
  const NodeDecl* first_of(NodeKind kind, const std::string& domain) const;
};

/// Parses and reference-checks scenario text. Throws ParseError carrying the
/// 1-based line, or UnresolvedReference naming the missing entity.
Scenario parse_scenario(std::string_view text, std::string name = {});
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace ims
