#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ims/hss.hpp"
#include "ims/identity.hpp"
#include "ims/signaling.hpp"

namespace ims {

enum class PolicyScope { NetworkWide, UserSpecific };

struct PolicyRule {
  PolicyScope scope = PolicyScope::NetworkWide;
  std::optional<Uri> user;  // UserSpecific only
  std::set<MediaKind> allow_media = {MediaKind::Audio, MediaKind::Video, MediaKind::Data};
  std::optional<std::set<std::string>> allow_codecs;
  std::optional<int> max_bandwidth_kbps;

  bool operator==(const PolicyRule&) const = default;
};

std::string describe(const PolicyRule& rule);

/// The field is carried as a full 8-bit value.
struct DscpField {
  std::uint8_t code = 0;
  bool operator==(const DscpField&) const = default;
};

inline constexpr std::uint8_t kDscpAudio = 46;
inline constexpr std::uint8_t kDscpVideo = 34;
inline constexpr std::uint8_t kDscpData = 0;

DscpField dscp_for(MediaKind kind);
/// One code per session: the highest class present.
DscpField dscp_for(const SessionDescription& sdp);

enum class DenyReason { MediaNotSubscribed, CodecNotAllowed, BandwidthExceeded, PdpUnreachable };
std::string_view to_string(DenyReason r);

namespace policy_decision {
struct Permit {
  DscpField dscp;
  bool operator==(const Permit&) const = default;
};
struct Deny {
  DenyReason reason;
  bool operator==(const Deny&) const = default;
};
}  // namespace policy_decision

using PolicyDecision = std::variant<policy_decision::Permit, policy_decision::Deny>;

inline bool permitted(const PolicyDecision& d) {
  return std::holds_alternative<policy_decision::Permit>(d);
}
std::string describe(const PolicyDecision& d);

/// Intersects every rule: media kinds must be allowed by all of them, codecs
/// must be in every codec whitelist, total bandwidth must fit under every cap.
/// Checks run in that order and the first violation names the reason.
PolicyDecision pdp_decide(const SessionDescription& sdp, const std::vector<PolicyRule>& rules);

enum class PepRole { Pcscf, Scscf };

/// Rules a PEP of the given role applies to `user`: network-wide rules for a
/// P-CSCF; network-wide plus the user's own for an S-CSCF.
std::vector<PolicyRule> applicable_rules(const std::vector<PolicyRule>& rules, PepRole role,
                                         const Uri& user);

struct PepCache {
  std::vector<PolicyRule> rules;
  Tick last_sync_tick = 0;
  bool provisioned = false;

  bool operator==(const PepCache&) const = default;
};

/// Cached rules when provisioned, otherwise an outsourced query to `pdp_rules`.
/// A null `pdp_rules` with no cache means the PDP cannot be reached: blocked.
PolicyDecision pep_enforce(PepRole role, const SessionDescription& sdp, const Uri& user,
                           const PepCache& cache, const std::vector<PolicyRule>* pdp_rules);

/// Domain policy decision point.
class Pdp {
 public:
  explicit Pdp(NodeId id = {}) : id_(std::move(id)) {}

  const NodeId& id() const noexcept { return id_; }
  void add_rule(PolicyRule rule) { rules_.push_back(std::move(rule)); }
  const std::vector<PolicyRule>& rules() const noexcept { return rules_; }

  /// Rule set pushed to a PEP of the given role.
  std::vector<PolicyRule> provisioned_set(PepRole role) const;
  PolicyDecision decide(PepRole role, const SessionDescription& sdp, const Uri& user) const;

 private:
  NodeId id_;
  std::vector<PolicyRule> rules_;
};

enum class CopsKind { Provision, Request, Decision };
std::string_view to_string(CopsKind k);

struct CopsMsg {
  CopsKind kind = CopsKind::Request;
  std::string session_id;
  PepRole role = PepRole::Pcscf;
  std::vector<PolicyRule> rules;          // Provision
  std::optional<SessionDescription> sdp;  // Request
  std::optional<Uri> user;                // Request
  std::optional<PolicyDecision> decision; // Decision
};

/// Bearer-plane media flow, labelled with its DSCP.
struct MediaFlow {
  std::string session_id;
  MediaLine line;
  DscpField dscp;

  bool operator==(const MediaFlow&) const = default;
};

/// Every flow of one session carries the session's code.
std::vector<MediaFlow> mark_dscp(const std::string& session_id, const SessionDescription& sdp,
                                 const policy_decision::Permit& permit);

}  // namespace ims
