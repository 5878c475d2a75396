#include "ims/hss.hpp"

#include <algorithm>
#include <cstdio>

#include "ims/error.hpp"

namespace ims {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Originating: return "originating";
    case Direction::Terminating: return "terminating";
    case Direction::Both: return "both";
  }
  return "?";
}

Direction parse_direction(std::string_view text) {
  if (text == "o" || text == "originating") return Direction::Originating;
  if (text == "t" || text == "terminating") return Direction::Terminating;
  if (text == "both") return Direction::Both;
  throw Error(Errc::ParseError, "unknown direction '" + std::string(text) + "'");
}

void add_ifc(UserProfile& profile, InitialFilterCriterion ifc) {
  auto pos = std::lower_bound(profile.ifcs.begin(), profile.ifcs.end(), ifc.priority,
                              [](const auto& a, int p) { return a.priority < p; });
  if (pos != profile.ifcs.end() && pos->priority == ifc.priority) {
    throw Error(Errc::ParseError, "duplicate iFC priority " + std::to_string(ifc.priority));
  }
  profile.ifcs.insert(pos, std::move(ifc));
}

std::vector<NodeId> ifc_match(const UserProfile& profile, const SigMessage& msg, Direction dir) {
  std::vector<NodeId> out;
  for (const auto& ifc : profile.ifcs) {
    if (ifc.method && *ifc.method != msg.kind) continue;
    if (ifc.direction != Direction::Both && ifc.direction != dir) continue;
    out.push_back(ifc.as_id);
  }
  return out;
}

std::string keyed_digest(std::string_view input, std::string_view secret) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  mix(secret);
  mix(":");
  mix(input);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string network_auth_token(std::string_view nonce, std::string_view secret) {
  return keyed_digest("net:" + std::string(nonce), secret);
}

void SlfTable::map(const Uri& public_id, NodeId hss) {
  entries_.insert_or_assign(to_string(public_id), std::move(hss));
}

std::optional<NodeId> SlfTable::find(const Uri& public_id) const {
  auto it = entries_.find(to_string(public_id));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

NodeId slf_locate(const Uri& public_id, const SlfTable& slf,
                  const std::vector<NodeId>& hss_nodes) {
  if (hss_nodes.size() == 1) return hss_nodes.front();
  if (auto hss = slf.find(public_id)) return *hss;
  throw Error(Errc::UnknownSubscriber, "SLF has no HSS for " + to_string(public_id));
}

Hss::Hss(NodeId id, Tick binding_lifetime) : id_(std::move(id)), lifetime_(binding_lifetime) {}

void Hss::add_user(UserProfile profile) {
  const auto& priv = profile.identity.private_id;
  for (const auto& pub : profile.identity.public_ids) {
    public_index_.insert_or_assign(to_string(pub), priv);
  }
  users_.insert_or_assign(priv, std::move(profile));
}

bool Hss::has_private(std::string_view private_id) const {
  return users_.contains(std::string(private_id));
}

bool Hss::has_public(const Uri& public_id) const {
  return public_index_.contains(to_string(public_id));
}

const std::string& Hss::private_of(const Uri& public_id) const {
  auto it = public_index_.find(to_string(public_id));
  if (it == public_index_.end()) {
    throw Error(Errc::UnknownSubscriber, "unknown public id " + to_string(public_id));
  }
  return it->second;
}

std::vector<AuthVector> Hss::fetch_auth_vectors(std::string_view private_id, int n) {
  auto it = users_.find(std::string(private_id));
  if (it == users_.end()) {
    throw Error(Errc::UnknownSubscriber, "unknown private id " + std::string(private_id));
  }
  std::vector<AuthVector> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    std::string nonce = id_ + "-n" + std::to_string(++nonce_counter_);
    out.push_back({nonce, keyed_digest(nonce, it->second.identity.shared_secret)});
  }
  return out;
}

UserProfile Hss::download_profile(const Uri& public_id, Tick now) const {
  const auto& profile = profile_for(public_id);
  if (profile.barred) throw Error(Errc::Barred, to_string(public_id) + " is barred");
  UserProfile copy = profile;
  copy.assigned_scscf = query_scscf(public_id, now);
  copy.registered = copy.assigned_scscf.has_value();
  return copy;
}

UserProfile& Hss::profile_for(const Uri& public_id) { return users_.at(private_of(public_id)); }

const UserProfile& Hss::profile_for(const Uri& public_id) const {
  return users_.at(private_of(public_id));
}

void Hss::assign_scscf(const Uri& public_id, NodeId scscf, Tick now) {
  const auto& priv = private_of(public_id);
  assignments_.insert_or_assign(priv, Assignment{std::move(scscf), now + lifetime_});
}

std::optional<NodeId> Hss::query_scscf(const Uri& public_id, Tick now) const {
  auto it = assignments_.find(private_of(public_id));
  if (it == assignments_.end() || now >= it->second.expires) return std::nullopt;
  return it->second.scscf;
}

void Hss::deassign_scscf(const Uri& public_id) { assignments_.erase(private_of(public_id)); }

std::optional<Tick> Hss::assignment_expiry(const Uri& public_id) const {
  auto it = assignments_.find(private_of(public_id));
  if (it == assignments_.end()) return std::nullopt;
  return it->second.expires;
}

void Hss::set_profile_tag(const Uri& public_id, std::string tag) {
  profile_for(public_id).active_profile_tag = std::move(tag);
}

std::vector<std::string> Hss::private_ids() const {
  std::vector<std::string> out;
  for (const auto& [priv, _] : users_) out.push_back(priv);
  return out;
}

}  // namespace ims
