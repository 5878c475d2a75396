#include "ims/interworking.hpp"

#include <algorithm>

#include "ims/error.hpp"

namespace ims {

std::string describe(const BreakoutTarget& t) {
  if (const auto* l = std::get_if<breakout::LocalMgcf>(&t)) return "LocalMgcf(" + l->mgcf + ")";
  return "RemoteBgcf(" + std::get<breakout::RemoteBgcf>(t).domain + ")";
}

void BreakoutTable::add(std::string prefix, BreakoutTarget target) {
  if (prefix.empty() ||
      !std::all_of(prefix.begin(), prefix.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(Errc::ParseError, "breakout prefix must be digits: '" + prefix + "'");
  }
  for (const auto& [p, _] : entries_) {
    if (p == prefix) throw Error(Errc::ParseError, "duplicate breakout prefix " + prefix);
  }
  entries_.emplace_back(std::move(prefix), std::move(target));
}

void BreakoutTable::set_default(BreakoutTarget target) { default_ = std::move(target); }

std::optional<BreakoutTarget> BreakoutTable::match(std::string_view digits) const {
  const std::pair<std::string, BreakoutTarget>* best = nullptr;
  for (const auto& e : entries_) {
    if (digits.starts_with(e.first) && (!best || e.first.size() > best->first.size())) best = &e;
  }
  if (best) return best->second;
  return default_;
}

BgcfSelection bgcf_select(const SigMessage& msg, const BreakoutTable& table, bool hiding,
                          const NodeId& local_icscf,
                          const std::map<std::string, NodeId>& remote_bgcf_by_domain) {
  const auto* tel = std::get_if<TelUri>(&msg.to_uri);
  if (!tel) throw Error(Errc::MalformedUri, "BGCF needs a tel target");
  auto target = table.match(tel->digits);
  if (!target) throw Error(Errc::UnresolvedReference, "breakout table has no default target");
  BgcfSelection sel{*target, {}};
  if (const auto* local = std::get_if<breakout::LocalMgcf>(&*target)) {
    sel.path.push_back(local->mgcf);
  } else {
    const auto& domain = std::get<breakout::RemoteBgcf>(*target).domain;
    auto it = remote_bgcf_by_domain.find(domain);
    if (it == remote_bgcf_by_domain.end()) {
      throw Error(Errc::UnresolvedReference, "no BGCF known for domain " + domain);
    }
    if (hiding) sel.path.push_back(local_icscf);
    sel.path.push_back(it->second);
  }
  return sel;
}

std::string_view to_string(CsFamily f) { return f == CsFamily::IsupLike ? "ISUP" : "BICC"; }

std::string_view to_string(CsPrimitive p) {
  switch (p) {
    case CsPrimitive::IAM: return "IAM";
    case CsPrimitive::ACM: return "ACM";
    case CsPrimitive::ANM: return "ANM";
    case CsPrimitive::REL: return "REL";
    case CsPrimitive::RLC: return "RLC";
  }
  return "?";
}

std::string_view to_string(CsTransport t) { return t == CsTransport::MtpLike ? "MTP" : "SCTP"; }

CsFamily parse_cs_family(std::string_view text) {
  if (text == "ISUP") return CsFamily::IsupLike;
  if (text == "BICC") return CsFamily::BiccLike;
  throw Error(Errc::ParseError, "unknown CS family '" + std::string(text) + "'");
}

CsSignal mgcf_convert(const SigMessage& msg, CsFamily family, const std::string& call_ref) {
  CsSignal sig{family, CsPrimitive::IAM, call_ref, {}};
  if (const auto* tel = std::get_if<TelUri>(&msg.to_uri)) sig.digits = tel->digits;
  auto answered = msg.header_or(hdr::kCseq, "");
  switch (msg.kind) {
    case MessageKind::Invite: sig.primitive = CsPrimitive::IAM; return sig;
    case MessageKind::Bye: sig.primitive = CsPrimitive::REL; return sig;
    case MessageKind::Response:
      if (msg.code == 180) {
        sig.primitive = CsPrimitive::ACM;
        return sig;
      }
      if (msg.code == 200 && answered == "INVITE") {
        sig.primitive = CsPrimitive::ANM;
        return sig;
      }
      if (msg.code == 200 && answered == "BYE") {
        sig.primitive = CsPrimitive::RLC;
        return sig;
      }
      break;
    default: break;
  }
  throw Error(Errc::UnmappableKind, msg.kind_token() + " has no CS equivalent");
}

SipEquivalent sip_equivalent(CsPrimitive p) {
  switch (p) {
    case CsPrimitive::IAM: return {MessageKind::Invite, 0, MessageKind::Invite};
    case CsPrimitive::ACM: return {MessageKind::Response, 180, MessageKind::Invite};
    case CsPrimitive::ANM: return {MessageKind::Response, 200, MessageKind::Invite};
    case CsPrimitive::REL: return {MessageKind::Bye, 0, MessageKind::Bye};
    case CsPrimitive::RLC: return {MessageKind::Response, 200, MessageKind::Bye};
  }
  throw Error(Errc::UnmappableKind, "unknown primitive");
}

SgwFrame sgw_transport(const CsSignal& signal, SgwDirection direction) {
  return SgwFrame{signal,
                  direction == SgwDirection::ToCs ? CsTransport::MtpLike : CsTransport::SctpLike};
}

CodecTable CodecTable::defaults() {
  return CodecTable{{{"PCMA", CodecClass::Pcm},
                     {"PCMU", CodecClass::Pcm},
                     {"AMR", CodecClass::Transcode},
                     {"AMR-WB", CodecClass::Transcode},
                     {"G729", CodecClass::Transcode},
                     {"G722", CodecClass::Transcode}}};
}

MediaAdaptation mgw_adapt(const SessionDescription& session, const CodecTable& table) {
  auto audio = std::find_if(session.media.begin(), session.media.end(),
                            [](const MediaLine& m) { return m.kind == MediaKind::Audio; });
  if (audio == session.media.end()) {
    throw Error(Errc::InvalidTransition, "CS interworking needs an audio line");
  }
  auto it = table.codecs.find(audio->codec);
  if (it == table.codecs.end()) {
    throw Error(Errc::UnsupportedCodec, "codec " + audio->codec + " not in the codec table");
  }
  return MediaAdaptation{audio->codec, "PCM", it->second == CodecClass::Pcm};
}

}  // namespace ims
