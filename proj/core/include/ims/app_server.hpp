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

enum class AsKind { SipAs, OsaScs, ImSsf };
enum class AsMode { Proxy, OriginatingUA, TerminatingUA, B2BUA };

std::string_view to_string(AsKind k);
std::string_view to_string(AsMode m);
AsKind parse_as_kind(std::string_view text);
AsMode parse_as_mode(std::string_view text);
/// Adapter protocol behind the AS, used only for trace labels.
std::string_view backend_label(AsKind k);

/// AS1: the owner's list of callers that may reach them at home.
struct ScreeningConfig {
  Uri owner;
  std::set<Uri> allow;
  SipUri target_allowed;
  SipUri deflect_target;

  bool operator==(const ScreeningConfig&) const = default;
};

/// AS2: routes using AS1's verdict and the owner's active profile.
struct RoutingConfig {
  Uri owner;
  NodeId presence_source;

  bool operator==(const RoutingConfig&) const = default;
};

struct PassThroughService {
  bool operator==(const PassThroughService&) const = default;
};

using ServiceLogic = std::variant<PassThroughService, ScreeningConfig, RoutingConfig>;

struct AsNode {
  NodeId id;
  AsKind kind = AsKind::SipAs;
  AsMode mode = AsMode::Proxy;
  ServiceLogic service = PassThroughService{};
};

enum class ScreenResult { Allowed, Deflected };
std::string_view to_string(ScreenResult r);
std::optional<ScreenResult> parse_screen_result(std::string_view text);

ScreenResult as1_screen(const ScreeningConfig& cfg, const Uri& caller);

/// Target chosen by AS2. `registrar_contact` is the public id the owner is
/// currently registered under.
SipUri as2_route(const RoutingConfig& cfg, const ScreeningConfig& screening, ScreenResult screen,
                 std::string_view presence, const Uri& registrar_contact);

namespace as_decision {
struct Continue {
  SigMessage msg;
  bool operator==(const Continue&) const = default;
};
struct RetargetTo {
  SipUri target;
  bool operator==(const RetargetTo&) const = default;
};
struct TerminateHere {
  int code = 480;
  bool operator==(const TerminateHere&) const = default;
};
}  // namespace as_decision

using AsDecision =
    std::variant<as_decision::Continue, as_decision::RetargetTo, as_decision::TerminateHere>;

std::string describe(const AsDecision& d);

/// Per-invocation facts an AS may need beyond the request itself, obtained
/// from the HSS over Sh.
struct AsContext {
  std::string presence_tag = "general";
  std::optional<Uri> registrar_contact;
};

class AsDirectory {
 public:
  void add(AsNode node);
  AsNode* find(const NodeId& id);
  const AsNode* find(const NodeId& id) const;
  const std::map<NodeId, AsNode>& nodes() const noexcept { return nodes_; }

 private:
  std::map<NodeId, AsNode> nodes_;
};

/// Runs one AS's service logic over a request.
AsDecision execute_service(const AsNode& as, const AsDirectory& dir, const SigMessage& msg,
                           const AsContext& ctx);

struct ChainStep {
  NodeId as_id;
  std::optional<AsDecision> decision;  // nullopt: AS unreachable, passed through
};

struct ChainResult {
  SigMessage final_msg;
  std::optional<int> terminal_response;  // set when an AS terminated the request
  std::vector<ChainStep> steps;
  std::vector<std::string> warnings;
};

/// Executes the ASes in order. RetargetTo rewrites the target and the chain
/// continues; TerminateHere short-circuits. Unknown/unreachable ids are
/// skipped with a warning. `ctx_for` supplies the Sh data per AS.
ChainResult invoke_chain(const AsDirectory& dir, SigMessage msg, const std::vector<NodeId>& as_ids,
                         const std::map<NodeId, AsContext>& ctx_for = {},
                         const std::set<NodeId>& unreachable = {});

/// Applies a decision to the request as the S-CSCF sees it on return.
SigMessage apply_decision(const SigMessage& original, const AsDecision& d);

namespace ut_edit {
struct AllowAdd {
  Uri uri;
};
struct AllowRemove {
  Uri uri;
};
struct SetTarget {
  SipUri uri;
};
struct SetDeflect {
  SipUri uri;
};
}  // namespace ut_edit

using UtEdit = std::variant<ut_edit::AllowAdd, ut_edit::AllowRemove, ut_edit::SetTarget,
                            ut_edit::SetDeflect>;

/// Parses "ALLOW-ADD <uri>", "ALLOW-REMOVE <uri>", "TARGET <uri>", "DEFLECT <uri>".
UtEdit parse_ut_edit(std::string_view verb, std::string_view uri);
std::string describe(const UtEdit& e);

/// Replaces the AS's screening config as one step. Throws UnknownAs when the
/// AS does not exist or hosts no screening service, NotOwner when `user` does
/// not own the config, InvalidTransition if the edit would break the
/// target/deflect invariant.
void ut_configure(AsDirectory& dir, const NodeId& as_id, const Uri& user, const UtEdit& edit);

/// Ut exchange between a terminal and an AS; never carried over ISC.
struct UtRequest {
  std::string request_id;
  Uri user;
  UtEdit edit;
  std::optional<std::string> result;  // set on the answer: "ok" or an error code
};

}  // namespace ims
