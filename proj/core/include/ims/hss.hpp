#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ims/identity.hpp"
#include "ims/signaling.hpp"

namespace ims {

using NodeId = std::string;
using Tick = std::int64_t;

inline constexpr Tick kDefaultBindingLifetime = 3600;

enum class Direction { Originating, Terminating, Both };

std::string_view to_string(Direction d);
/// Accepts o|t|both and the long spellings.
Direction parse_direction(std::string_view text);

struct InitialFilterCriterion {
  int priority = 0;
  std::optional<MessageKind> method;  // nullopt = wildcard
  Direction direction = Direction::Both;
  NodeId as_id;

  bool operator==(const InitialFilterCriterion&) const = default;
};

struct UserProfile {
  ImsIdentity identity;
  std::set<MediaKind> subscribed_media;
  bool barred = false;
  std::vector<InitialFilterCriterion> ifcs;  // ascending, unique priorities
  std::optional<NodeId> assigned_scscf;
  bool registered = false;
  std::string active_profile_tag = "general";
  std::optional<TelUri> cs_forward;          // CS-domain fallback when unregistered
  std::set<std::string> required_capabilities;

  bool operator==(const UserProfile&) const = default;
};

/// Inserts keeping ascending priority order; throws on a duplicate priority.
void add_ifc(UserProfile& profile, InitialFilterCriterion ifc);

/// AS ids of every iFC matching the message kind and direction, in priority
/// order. A `Both` criterion matches either direction.
std::vector<NodeId> ifc_match(const UserProfile& profile, const SigMessage& msg, Direction dir);

struct AuthVector {
  std::string nonce;
  std::string expected_response;

  bool operator==(const AuthVector&) const = default;
};

/// Deployment-wide keyed digest: 64-bit FNV-1a over "secret:input", hex.
std::string keyed_digest(std::string_view input, std::string_view secret);
/// Token the network returns so the terminal can authenticate it.
std::string network_auth_token(std::string_view nonce, std::string_view secret);

class SlfTable {
 public:
  void map(const Uri& public_id, NodeId hss);
  std::optional<NodeId> find(const Uri& public_id) const;
  const std::map<std::string, NodeId>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, NodeId> entries_;
};

/// Owning HSS for a public id. With a single HSS the table is not consulted.
NodeId slf_locate(const Uri& public_id, const SlfTable& slf, const std::vector<NodeId>& hss_nodes);

/// Subscriber database of one HSS node.
class Hss {
 public:
  explicit Hss(NodeId id, Tick binding_lifetime = kDefaultBindingLifetime);

  const NodeId& id() const noexcept { return id_; }
  Tick binding_lifetime() const noexcept { return lifetime_; }
  void set_binding_lifetime(Tick lifetime) { lifetime_ = lifetime; }

  void add_user(UserProfile profile);
  bool has_private(std::string_view private_id) const;
  bool has_public(const Uri& public_id) const;

  std::vector<AuthVector> fetch_auth_vectors(std::string_view private_id, int n);
  /// Throws UnknownSubscriber or Barred. The returned profile reflects the
  /// assignment state at `now`.
  UserProfile download_profile(const Uri& public_id, Tick now) const;
  UserProfile& profile_for(const Uri& public_id);
  const UserProfile& profile_for(const Uri& public_id) const;

  void assign_scscf(const Uri& public_id, NodeId scscf, Tick now);
  std::optional<NodeId> query_scscf(const Uri& public_id, Tick now) const;
  void deassign_scscf(const Uri& public_id);
  std::optional<Tick> assignment_expiry(const Uri& public_id) const;

  void set_profile_tag(const Uri& public_id, std::string tag);

  std::vector<std::string> private_ids() const;

 private:
  struct Assignment {
    NodeId scscf;
    Tick expires;
  };
  const std::string& private_of(const Uri& public_id) const;

  NodeId id_;
  Tick lifetime_;
  std::uint64_t nonce_counter_ = 0;
  std::map<std::string, UserProfile> users_;            // by private id
  std::map<std::string, std::string> public_index_;     // public id -> private id
  std::map<std::string, Assignment> assignments_;       // by private id
};

}  // namespace ims
