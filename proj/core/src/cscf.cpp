#include "ims/cscf.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "ims/error.hpp"

namespace ims {

std::string_view to_string(RegistrationStatus s) {
  switch (s) {
    case RegistrationStatus::Registered: return "Registered";
    case RegistrationStatus::AuthFailed: return "AuthFailed";
    case RegistrationStatus::Barred: return "Barred";
    case RegistrationStatus::Timeout: return "Timeout";
    case RegistrationStatus::NoPcscfConfigured: return "NoPcscfConfigured";
  }
  return "?";
}

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::UnknownDestination: return "UnknownDestination";
    case RejectReason::UserUnavailable: return "UserUnavailable";
  }
  return "?";
}

NodeId pcscf_discover(const NodeId& terminal, const PcscfTable& table) {
  auto it = table.find(terminal);
  if (it == table.end()) {
    throw Error(Errc::NoPcscfConfigured, "no P-CSCF configured for terminal " + terminal);
  }
  return it->second;
}

NodeId icscf_select_scscf(const std::optional<NodeId>& existing,
                          const std::set<std::string>& required_capabilities,
                          const std::vector<ScscfDescriptor>& candidates) {
  if (existing) return *existing;
  const ScscfDescriptor* best = nullptr;
  for (const auto& c : candidates) {
    bool capable = std::includes(c.capabilities.begin(), c.capabilities.end(),
                                 required_capabilities.begin(), required_capabilities.end());
    if (!capable) continue;
    if (!best || std::tie(c.binding_count, c.id) < std::tie(best->binding_count, best->id)) {
      best = &c;
    }
  }
  if (!best) throw Error(Errc::NoEligibleScscf, "no S-CSCF satisfies the required capabilities");
  return best->id;
}

// ---------------------------------------------------------------------------
// THIG

namespace {

constexpr std::string_view kThigPrefix = "THIG(";

std::string fnv_hex(std::string_view a, std::string_view b) {
  std::uint64_t h = 14695981039346656037ull;
  for (auto part : {a, std::string_view("/"), b}) {
    for (unsigned char c : part) {
      h ^= c;
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string token_key(std::string_view token) {
  auto inner = token.substr(kThigPrefix.size(), token.size() - kThigPrefix.size() - 1);
  return std::string(inner.substr(0, inner.find(':')));
}

std::vector<std::string> split_csv(std::string_view text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    out.emplace_back(text.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_csv(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(',');
    out += items[i];
  }
  return out;
}

template <typename Fn>
void map_hidden_ids(SigMessage& msg, Fn&& fn) {
  for (auto* stack : {&msg.route_stack, &msg.via_stack}) {
    for (auto& id : *stack) id = fn(id);
  }
  if (auto rr = msg.header(hdr::kRecordRoute)) {
    auto ids = split_csv(*rr);
    for (auto& id : ids) id = fn(id);
    msg.set_header(hdr::kRecordRoute, join_csv(ids));
  }
  if (auto contact = msg.header(hdr::kContact)) msg.set_header(hdr::kContact, fn(*contact));
}

}  // namespace

bool is_thig_token(std::string_view id) {
  return id.starts_with(kThigPrefix) && id.ends_with(")");
}

std::string thig_token(const IcscfState& icscf, const NodeId& hidden) {
  return std::string(kThigPrefix) + icscf.thig_key + ":" + fnv_hex(icscf.thig_key, hidden) + ")";
}

SigMessage thig_apply(IcscfState& icscf, const std::set<NodeId>& home_nodes, SigMessage msg) {
  if (!icscf.thig_enabled || icscf.thig_key.empty()) {
    throw Error(Errc::UnknownToken, "THIG is not enabled on " + icscf.id);
  }
  map_hidden_ids(msg, [&](const std::string& id) -> std::string {
    if (id == icscf.id || !home_nodes.contains(id)) return id;
    auto token = thig_token(icscf, id);
    // Hash collisions between distinct ids get a disambiguating suffix.
    for (int n = 1;; ++n) {
      auto [it, inserted] = icscf.issued.emplace(token, id);
      if (inserted || it->second == id) return token;
      token = thig_token(icscf, id + "#" + std::to_string(n));
    }
  });
  return msg;
}

SigMessage thig_strip(const IcscfState& icscf, SigMessage msg) {
  map_hidden_ids(msg, [&](const std::string& id) -> std::string {
    if (!is_thig_token(id) || token_key(id) != icscf.thig_key) return id;
    auto it = icscf.issued.find(id);
    if (it == icscf.issued.end()) {
      throw Error(Errc::UnknownToken, id + " was not issued by " + icscf.id);
    }
    return it->second;
  });
  return msg;
}

// ---------------------------------------------------------------------------
// S-CSCF state

ScscfState::ScscfState(NodeId id, std::string domain, std::set<std::string> capabilities)
    : id_(std::move(id)), domain_(std::move(domain)), capabilities_(std::move(capabilities)) {}

void ScscfState::cache_profile(const UserProfile& profile) {
  const auto& priv = profile.identity.private_id;
  for (const auto& pub : profile.identity.public_ids) {
    profile_index_.insert_or_assign(to_string(pub), priv);
  }
  profiles_.insert_or_assign(priv, profile);
}

void ScscfState::bind(const UserProfile& profile, const std::vector<Uri>& ids,
                      const NodeId& contact, const NodeId& pcscf, Tick now, Tick expiry,
                      std::string sa_id, bool compression) {
  cache_profile(profile);
  for (const auto& pub : ids) {
    registrar_.insert_or_assign(
        to_string(pub),
        RegistrationBinding{pub, contact, pcscf, now, expiry, sa_id, compression});
  }
}

void ScscfState::unbind(const Uri& public_id) { registrar_.erase(to_string(public_id)); }

const UserProfile* ScscfState::profile_for(const Uri& public_id) const {
  auto idx = profile_index_.find(to_string(public_id));
  if (idx == profile_index_.end()) return nullptr;
  auto it = profiles_.find(idx->second);
  return it == profiles_.end() ? nullptr : &it->second;
}

const RegistrationBinding* ScscfState::binding_for(const Uri& public_id, Tick now) const {
  auto it = registrar_.find(to_string(public_id));
  if (it == registrar_.end() || now >= it->second.expiry_tick) return nullptr;
  return &it->second;
}

std::size_t ScscfState::binding_count(Tick now) const {
  return static_cast<std::size_t>(std::count_if(
      registrar_.begin(), registrar_.end(), [now](const auto& b) { return now < b.second.expiry_tick; }));
}

// ---------------------------------------------------------------------------
// Routing

std::string describe(const RoutingDecision& d) {
  std::string out = std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, route::ToAsChain>) {
          return "ToAsChain(" + join_csv(a.as_ids) + ")";
        } else if constexpr (std::is_same_v<T, route::ToIcscf>) {
          return "ToIcscf(" + a.domain + ")";
        } else if constexpr (std::is_same_v<T, route::ToPcscf>) {
          return "ToPcscf(" + a.terminal + "@" + a.pcscf + ")";
        } else if constexpr (std::is_same_v<T, route::ToBgcf>) {
          return "ToBgcf";
        } else if constexpr (std::is_same_v<T, route::ToExternalSip>) {
          return "ToExternalSip(" + a.host + ")";
        } else {
          return "Reject(" + std::string(to_string(a.reason)) + ")";
        }
      },
      d.action);
  if (d.rewritten_to) out += " to=" + to_string(*d.rewritten_to);
  return out;
}

namespace {

RoutingDecision route_sip_target(const ScscfState& scscf, const RoutingEnv& env,
                                 const SigMessage& msg, const SipUri& target,
                                 std::optional<Uri> rewritten) {
  if (target.host == env.local_domain) {
    if (!env.force_icscf && scscf.profile_for(Uri{target})) {
      SigMessage local = msg;
      local.to_uri = target;
      auto d = route_terminating(scscf, env, local);
      if (!d.rewritten_to) d.rewritten_to = std::move(rewritten);
      return d;
    }
    return {route::ToIcscf{env.local_domain}, std::move(rewritten)};
  }
  if (env.ims_domains.contains(target.host)) {
    return {route::ToIcscf{target.host}, std::move(rewritten)};
  }
  if (env.external_hosts.contains(target.host)) {
    return {route::ToExternalSip{target.host}, std::move(rewritten)};
  }
  return {route::Reject{RejectReason::UnknownDestination}, std::move(rewritten)};
}

}  // namespace

RoutingDecision route_originating(const ScscfState& scscf, const RoutingEnv& env,
                                  const SigMessage& msg) {
  if (!msg.has_header(hdr::kIscOrig)) {
    if (const auto* caller = scscf.profile_for(msg.from_uri)) {
      auto chain = ifc_match(*caller, msg, Direction::Originating);
      if (!chain.empty()) return {route::ToAsChain{std::move(chain)}, std::nullopt};
    }
  }
  if (const auto* tel = std::get_if<TelUri>(&msg.to_uri)) {
    if (env.enum_registry && env.enum_registry->contains(*tel)) {
      auto sip = enum_lookup(*tel, *env.enum_registry);
      return route_sip_target(scscf, env, msg, sip, Uri{sip});
    }
    return {route::ToBgcf{}, std::nullopt};
  }
  return route_sip_target(scscf, env, msg, std::get<SipUri>(msg.to_uri), std::nullopt);
}

RoutingDecision route_terminating(const ScscfState& scscf, const RoutingEnv& env,
                                  const SigMessage& msg) {
  const auto* callee = scscf.profile_for(msg.to_uri);
  if (!callee) return {route::Reject{RejectReason::UnknownDestination}, std::nullopt};
  if (!msg.has_header(hdr::kIscTerm)) {
    auto chain = ifc_match(*callee, msg, Direction::Terminating);
    if (!chain.empty()) return {route::ToAsChain{std::move(chain)}, std::nullopt};
  }
  if (const auto* b = scscf.binding_for(msg.to_uri, env.now)) {
    return {route::ToPcscf{b->contact, b->pcscf}, std::nullopt};
  }
  if (callee->cs_forward) return {route::ToBgcf{}, Uri{*callee->cs_forward}};
  return {route::Reject{RejectReason::UserUnavailable}, std::nullopt};
}

void record_route(SigMessage& msg, const NodeId& id) {
  auto ids = record_route_set(msg);
  if (!ids.empty() && ids.back() == id) return;
  ids.push_back(id);
  msg.set_header(hdr::kRecordRoute, join_csv(ids));
}

std::vector<NodeId> record_route_set(const SigMessage& msg) {
  return split_csv(msg.header_or(hdr::kRecordRoute, ""));
}

}  // namespace ims
