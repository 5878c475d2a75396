#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ims/identity.hpp"

namespace ims {

enum class MessageKind { Register, Invite, Ack, Bye, Message, Response };

std::string_view to_string(MessageKind kind);

enum class MediaKind { Audio, Video, Data };

std::string_view to_string(MediaKind kind);
MediaKind parse_media_kind(std::string_view text);

struct MediaLine {
  MediaKind kind = MediaKind::Audio;
  std::string codec;
  int bandwidth_kbps = 0;

  bool operator==(const MediaLine&) const = default;
};

/// SDP-like session description: at least one media line.
struct SessionDescription {
  std::vector<MediaLine> media;

  bool operator==(const SessionDescription&) const = default;
  int total_bandwidth_kbps() const;
};

/// Parses "kind/codec/kbps[,kind/codec/kbps...]".
SessionDescription parse_media_spec(std::string_view text);

namespace hdr {
inline constexpr std::string_view kCallId = "CALL-ID";
inline constexpr std::string_view kOrigSize = "X-ORIG-SIZE";
inline constexpr std::string_view kReason = "REASON";
inline constexpr std::string_view kPrivateId = "PRIVATE-ID";
inline constexpr std::string_view kNonce = "NONCE";
inline constexpr std::string_view kAuth = "AUTH";
inline constexpr std::string_view kNetAuth = "NET-AUTH";
inline constexpr std::string_view kCompOffer = "COMP";
inline constexpr std::string_view kServiceRoute = "SERVICE-ROUTE";
inline constexpr std::string_view kAssociated = "ASSOCIATED-URI";
inline constexpr std::string_view kCseq = "CSEQ";
inline constexpr std::string_view kIscOrig = "ISC-ORIG";
inline constexpr std::string_view kIscTerm = "ISC-TERM";
inline constexpr std::string_view kScreen = "SCREEN";
inline constexpr std::string_view kDscp = "DSCP";
inline constexpr std::string_view kAsOnBehalf = "AS-ON-BEHALF";
inline constexpr std::string_view kUnregTerm = "UNREG-TERM";
inline constexpr std::string_view kOrigTo = "ORIG-TO";
inline constexpr std::string_view kMpVerb = "MP-VERB";
inline constexpr std::string_view kMrOp = "MR-OP";
inline constexpr std::string_view kConf = "CONF";
inline constexpr std::string_view kFloor = "FLOOR";
inline constexpr std::string_view kRecordRoute = "RECORD-ROUTE";
inline constexpr std::string_view kContact = "CONTACT";
inline constexpr std::string_view kSecAgree = "SEC-AGREE";
inline constexpr std::string_view kMediaAt = "MEDIA-AT";
}  // namespace hdr

/// SIP-like signaling message. `size_bytes()` and `compressed()` are derived
/// from the wire form: an uncompressed message is as large as its serialized
/// record; a compressed one carries its original size in X-ORIG-SIZE and
/// reports half of it, rounded up.
struct SigMessage {
  MessageKind kind = MessageKind::Message;
  int code = 0;  // RESPONSE only, 100-699
  std::int64_t seq = 0;
  Uri from_uri = SipUri{};
  Uri to_uri = SipUri{};
  std::vector<std::pair<std::string, std::string>> headers;
  std::vector<std::string> route_stack;
  std::vector<std::string> via_stack;
  std::optional<SessionDescription> body;

  bool operator==(const SigMessage&) const = default;

  bool is_request() const { return kind != MessageKind::Response; }
  std::optional<std::string> header(std::string_view key) const;
  std::string header_or(std::string_view key, std::string_view fallback) const;
  bool has_header(std::string_view key) const;
  /// Replaces the first header with `key`, or appends it.
  void set_header(std::string_view key, std::string value);
  void remove_header(std::string_view key);

  std::string call_id() const { return header_or(hdr::kCallId, ""); }
  bool compressed() const { return has_header(hdr::kOrigSize); }
  std::size_t size_bytes() const;
  /// Token used in the first wire line, e.g. INVITE or RESPONSE-200.
  std::string kind_token() const;
};

SigMessage make_request(MessageKind kind, std::int64_t seq, Uri from, Uri to,
                        std::string call_id);
/// Response to `req`: same seq, from/to, call id and via stack.
SigMessage make_response(const SigMessage& req, int code, std::string_view reason = {});

/// Checks structural invariants; throws Error{MalformedMessage}.
void validate(const SigMessage& msg);

std::string serialize(const SigMessage& msg);
/// Parses one record. Throws Error{MalformedMessage} carrying the 1-based line.
SigMessage parse_message(std::string_view bytes);

std::size_t compressed_size(std::size_t original);
SigMessage compress(const SigMessage& msg);
SigMessage decompress(const SigMessage& msg);

// ---------------------------------------------------------------------------
// DIAMETER-style AAA messages.

enum class DiameterInterface { Cx, Dx, Sh };

enum class DiameterCommand {
  AuthRequest,
  AuthAnswer,
  ProfileQuery,
  ProfileAnswer,
  ScscfAssign,
  ScscfQuery,
  LocateHss,
  LocateAnswer,
  AsDataQuery,
  AsDataAnswer,
};

std::string_view to_string(DiameterInterface itf);
std::string_view to_string(DiameterCommand cmd);

/// Interface a command must travel on.
DiameterInterface interface_for(DiameterCommand cmd);
bool is_answer(DiameterCommand cmd);

struct DiameterMsg {
  DiameterInterface interface = DiameterInterface::Cx;
  DiameterCommand command = DiameterCommand::AuthRequest;
  std::string session_id;
  std::map<std::string, std::string> payload;

  bool operator==(const DiameterMsg&) const = default;

  std::string get(const std::string& key, std::string fallback = {}) const;
};

/// Throws Error{InvalidDiameter} when the command does not belong to the
/// interface or the session id is empty.
DiameterMsg make_diameter(DiameterCommand cmd, std::string session_id,
                          std::map<std::string, std::string> payload = {});
void validate(const DiameterMsg& msg);

}  // namespace ims
