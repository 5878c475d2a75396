#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ims/signaling.hpp"

namespace ims {

enum class MrfpVerb { AddStream, RemoveStream, Mix, PlayAnnouncement, GrantFloor, RevokeFloor };

std::string_view to_string(MrfpVerb v);
MrfpVerb parse_mrfp_verb(std::string_view text);

struct MrfpCommand {
  MrfpVerb verb = MrfpVerb::Mix;
  std::string conf_id;
  std::string participant;  // public id, AddStream/RemoveStream/Grant/Revoke
  std::set<MediaKind> media;  // AddStream
  std::string announcement;   // PlayAnnouncement

  bool operator==(const MrfpCommand&) const = default;
};

/// Mp commands travel as MESSAGE requests carrying MP-VERB and argument headers.
SigMessage to_message(const MrfpCommand& cmd, std::int64_t seq, const Uri& from, const Uri& to,
                      std::string call_id);
MrfpCommand mrfp_command_from(const SigMessage& msg);

struct MixDescriptor {
  std::set<MediaKind> kinds;
  bool operator==(const MixDescriptor&) const = default;
};

struct ConferenceState {
  std::string conf_id;
  std::vector<std::string> participants;  // insertion order, unique
  std::map<std::string, std::set<MediaKind>> participant_media;
  std::optional<std::string> floor_holder;
  std::vector<MixDescriptor> mixed_streams;
  std::optional<std::string> last_announcement;

  bool operator==(const ConferenceState&) const = default;
  bool has(const std::string& p) const;
};

/// Throws InvalidTransition when the command does not apply to the state.
ConferenceState mrfp_apply(const ConferenceState& state, const MrfpCommand& cmd);

enum class FloorOutcome { Granted, Queued, Denied };
std::string_view to_string(FloorOutcome f);

/// MRFC's view of one conference: membership and the FIFO floor queue.
struct MrfcConference {
  std::string conf_id;
  std::vector<std::string> participants;
  std::optional<std::string> floor_holder;
  std::deque<std::string> floor_queue;
};

FloorOutcome floor_request(MrfcConference& conf, const std::string& requester);
/// Releases the floor if `holder` has it; returns the next holder, if any.
std::optional<std::string> floor_release(MrfcConference& conf, const std::string& holder);

enum class MrOp { Join, Leave, Announce, FloorRequest, FloorRelease };
std::string_view to_string(MrOp op);
MrOp parse_mr_op(std::string_view text);

struct MrfRequest {
  MrOp op = MrOp::Join;
  std::string conf_id;
  std::string user;
  std::set<MediaKind> media = {MediaKind::Audio};
  std::string announcement;
};

struct MrfcResult {
  std::vector<MrfpCommand> commands;
  std::optional<FloorOutcome> floor;
  bool conference_deleted = false;
};

class Mrfc {
 public:
  /// Minimal command list realizing the request. Throws UnknownConference for
  /// requests other than Join against a conference that does not exist.
  MrfcResult control(const MrfRequest& req);

  const MrfcConference* find(const std::string& conf_id) const;
  const std::map<std::string, MrfcConference>& conferences() const noexcept { return confs_; }

 private:
  std::map<std::string, MrfcConference> confs_;
};

}  // namespace ims
