#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ims/hss.hpp"
#include "ims/signaling.hpp"

namespace ims {

namespace breakout {
struct LocalMgcf {
  NodeId mgcf;
  bool operator==(const LocalMgcf&) const = default;
};
struct RemoteBgcf {
  std::string domain;
  bool operator==(const RemoteBgcf&) const = default;
};
}  // namespace breakout

using BreakoutTarget = std::variant<breakout::LocalMgcf, breakout::RemoteBgcf>;

std::string describe(const BreakoutTarget& t);

/// Digit-prefix routing table with a default entry.
class BreakoutTable {
 public:
  /// Throws ParseError on a duplicate or non-digit prefix.
  void add(std::string prefix, BreakoutTarget target);
  void set_default(BreakoutTarget target);

  const std::vector<std::pair<std::string, BreakoutTarget>>& entries() const noexcept {
    return entries_;
  }
  const std::optional<BreakoutTarget>& default_target() const noexcept { return default_; }

  /// Longest matching prefix, else the default. nullopt only when no default
  /// is configured.
  std::optional<BreakoutTarget> match(std::string_view digits) const;

 private:
  std::vector<std::pair<std::string, BreakoutTarget>> entries_;
  std::optional<BreakoutTarget> default_;
};

struct BgcfSelection {
  BreakoutTarget target;
  /// Next hops in order; includes the local I-CSCF before a remote BGCF when
  /// network hiding is on.
  std::vector<NodeId> path;
};

/// `local_icscf` and `remote_bgcf` resolve the hop ids for the chosen target.
BgcfSelection bgcf_select(const SigMessage& msg, const BreakoutTable& table, bool hiding,
                          const NodeId& local_icscf,
                          const std::map<std::string, NodeId>& remote_bgcf_by_domain);

enum class CsFamily { IsupLike, BiccLike };
enum class CsPrimitive { IAM, ACM, ANM, REL, RLC };
enum class CsTransport { MtpLike, SctpLike };
enum class SgwDirection { ToCs, ToIms };

std::string_view to_string(CsFamily f);
std::string_view to_string(CsPrimitive p);
std::string_view to_string(CsTransport t);
CsFamily parse_cs_family(std::string_view text);

struct CsSignal {
  CsFamily family = CsFamily::IsupLike;
  CsPrimitive primitive = CsPrimitive::IAM;
  std::string call_ref;
  std::string digits;

  bool operator==(const CsSignal&) const = default;
};

struct SgwFrame {
  CsSignal inner;
  CsTransport transport = CsTransport::SctpLike;

  bool operator==(const SgwFrame&) const = default;
};

/// Fixed SIP -> CS mapping: INVITE->IAM, 180->ACM, 200(INVITE)->ANM, BYE->REL,
/// 200(BYE)->RLC. Digits come from the tel target. Throws UnmappableKind.
CsSignal mgcf_convert(const SigMessage& msg, CsFamily family, const std::string& call_ref);

/// Inverse direction: the SIP kind (and response code) a CS primitive maps to.
struct SipEquivalent {
  MessageKind kind;
  int code = 0;
  MessageKind answers = MessageKind::Invite;  // for responses: request kind answered

  bool operator==(const SipEquivalent&) const = default;
};
SipEquivalent sip_equivalent(CsPrimitive p);

SgwFrame sgw_transport(const CsSignal& signal, SgwDirection direction);

enum class CodecClass { Pcm, Transcode };

struct CodecTable {
  std::map<std::string, CodecClass> codecs;
  static CodecTable defaults();
};

struct MediaAdaptation {
  std::string from_codec;  // RTP side
  std::string to_format = "PCM";
  bool pass_through = false;

  bool operator==(const MediaAdaptation&) const = default;
};

/// Adaptation for the first audio line. Throws UnsupportedCodec for codecs
/// outside the table and InvalidTransition when there is no audio line.
MediaAdaptation mgw_adapt(const SessionDescription& session, const CodecTable& table);

/// MGCF -> MGW bearer control (H.248-style context add/subtract).
struct GatewayControl {
  std::string call_ref;
  std::optional<MediaAdaptation> adaptation;  // nullopt releases the context
};

}  // namespace ims
