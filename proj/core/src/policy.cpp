#include "ims/policy.hpp"

#include <algorithm>

namespace ims {

namespace {

std::string join_kinds(const std::set<MediaKind>& kinds) {
  std::string out;
  for (auto k : kinds) {
    if (!out.empty()) out += ',';
    out += to_string(k);
  }
  return out.empty() ? "-" : out;
}

}  // namespace

std::string describe(const PolicyRule& rule) {
  std::string out = rule.scope == PolicyScope::NetworkWide ? "NETWORK" : "USER " + to_string(*rule.user);
  out += " media=" + join_kinds(rule.allow_media);
  if (rule.allow_codecs) {
    out += " codecs=";
    bool first = true;
    for (const auto& c : *rule.allow_codecs) {
      if (!first) out += ',';
      out += c;
      first = false;
    }
  }
  if (rule.max_bandwidth_kbps) out += " maxbw=" + std::to_string(*rule.max_bandwidth_kbps);
  return out;
}

DscpField dscp_for(MediaKind kind) {
  switch (kind) {
    case MediaKind::Audio: return {kDscpAudio};
    case MediaKind::Video: return {kDscpVideo};
    case MediaKind::Data: return {kDscpData};
  }
  return {kDscpData};
}

DscpField dscp_for(const SessionDescription& sdp) {
  DscpField best{kDscpData};
  for (const auto& m : sdp.media) best.code = std::max(best.code, dscp_for(m.kind).code);
  return best;
}

std::string_view to_string(DenyReason r) {
  switch (r) {
    case DenyReason::MediaNotSubscribed: return "MediaNotSubscribed";
    case DenyReason::CodecNotAllowed: return "CodecNotAllowed";
    case DenyReason::BandwidthExceeded: return "BandwidthExceeded";
    case DenyReason::PdpUnreachable: return "PdpUnreachable";
  }
  return "?";
}

std::string describe(const PolicyDecision& d) {
  if (const auto* p = std::get_if<policy_decision::Permit>(&d)) {
    return "Permit(dscp=" + std::to_string(p->dscp.code) + ")";
  }
  return "Deny(" + std::string(to_string(std::get<policy_decision::Deny>(d).reason)) + ")";
}

PolicyDecision pdp_decide(const SessionDescription& sdp, const std::vector<PolicyRule>& rules) {
  using policy_decision::Deny;
  for (const auto& m : sdp.media) {
    for (const auto& r : rules) {
      if (!r.allow_media.contains(m.kind)) return Deny{DenyReason::MediaNotSubscribed};
    }
  }
  for (const auto& m : sdp.media) {
    for (const auto& r : rules) {
      if (r.allow_codecs && !r.allow_codecs->contains(m.codec)) return Deny{DenyReason::CodecNotAllowed};
    }
  }
  int total = sdp.total_bandwidth_kbps();
  for (const auto& r : rules) {
    if (r.max_bandwidth_kbps && total > *r.max_bandwidth_kbps) return Deny{DenyReason::BandwidthExceeded};
  }
  return policy_decision::Permit{dscp_for(sdp)};
}

std::vector<PolicyRule> applicable_rules(const std::vector<PolicyRule>& rules, PepRole role,
                                         const Uri& user) {
  std::vector<PolicyRule> out;
  for (const auto& r : rules) {
    if (r.scope == PolicyScope::NetworkWide) {
      out.push_back(r);
    } else if (role == PepRole::Scscf && r.user == user) {
      out.push_back(r);
    }
  }
  return out;
}

PolicyDecision pep_enforce(PepRole role, const SessionDescription& sdp, const Uri& user,
                           const PepCache& cache, const std::vector<PolicyRule>* pdp_rules) {
  if (cache.provisioned) return pdp_decide(sdp, applicable_rules(cache.rules, role, user));
  if (!pdp_rules) return policy_decision::Deny{DenyReason::PdpUnreachable};
  return pdp_decide(sdp, applicable_rules(*pdp_rules, role, user));
}

std::vector<PolicyRule> Pdp::provisioned_set(PepRole role) const {
  if (role == PepRole::Scscf) return rules_;
  std::vector<PolicyRule> out;
  std::copy_if(rules_.begin(), rules_.end(), std::back_inserter(out),
               [](const PolicyRule& r) { return r.scope == PolicyScope::NetworkWide; });
  return out;
}

PolicyDecision Pdp::decide(PepRole role, const SessionDescription& sdp, const Uri& user) const {
  return pdp_decide(sdp, applicable_rules(rules_, role, user));
}

std::string_view to_string(CopsKind k) {
  switch (k) {
    case CopsKind::Provision: return "Provision";
    case CopsKind::Request: return "Request";
    case CopsKind::Decision: return "Decision";
  }
  return "?";
}

std::vector<MediaFlow> mark_dscp(const std::string& session_id, const SessionDescription& sdp,
                                 const policy_decision::Permit& permit) {
  std::vector<MediaFlow> flows;
  flows.reserve(sdp.media.size());
  for (const auto& m : sdp.media) flows.push_back({session_id, m, permit.dscp});
  return flows;
}

}  // namespace ims
