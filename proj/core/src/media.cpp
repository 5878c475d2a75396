#include "ims/media.hpp"

#include <algorithm>

#include "ims/error.hpp"

namespace ims {

namespace {

std::string media_list(const std::set<MediaKind>& kinds) {
  std::string out;
  for (auto k : kinds) {
    if (!out.empty()) out += ',';
    out += to_string(k);
  }
  return out;
}

std::set<MediaKind> parse_media_list(std::string_view text) {
  std::set<MediaKind> out;
  std::size_t start = 0;
  while (start <= text.size() && !text.empty()) {
    auto comma = text.find(',', start);
    out.insert(parse_media_kind(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void invalid(const std::string& why) { throw Error(Errc::InvalidTransition, why); }

}  // namespace

std::string_view to_string(MrfpVerb v) {
  switch (v) {
    case MrfpVerb::AddStream: return "AddStream";
    case MrfpVerb::RemoveStream: return "RemoveStream";
    case MrfpVerb::Mix: return "Mix";
    case MrfpVerb::PlayAnnouncement: return "PlayAnnouncement";
    case MrfpVerb::GrantFloor: return "GrantFloor";
    case MrfpVerb::RevokeFloor: return "RevokeFloor";
  }
  return "?";
}

MrfpVerb parse_mrfp_verb(std::string_view text) {
  for (auto v : {MrfpVerb::AddStream, MrfpVerb::RemoveStream, MrfpVerb::Mix,
                 MrfpVerb::PlayAnnouncement, MrfpVerb::GrantFloor, MrfpVerb::RevokeFloor}) {
    if (to_string(v) == text) return v;
  }
  throw Error(Errc::MalformedMessage, "unknown MP-VERB '" + std::string(text) + "'");
}

SigMessage to_message(const MrfpCommand& cmd, std::int64_t seq, const Uri& from, const Uri& to,
                      std::string call_id) {
  auto msg = make_request(MessageKind::Message, seq, from, to, std::move(call_id));
  msg.set_header(hdr::kMpVerb, std::string(to_string(cmd.verb)));
  msg.set_header(hdr::kConf, cmd.conf_id);
  if (!cmd.participant.empty()) msg.set_header("PARTICIPANT", cmd.participant);
  if (!cmd.media.empty()) msg.set_header("MEDIA", media_list(cmd.media));
  if (!cmd.announcement.empty()) msg.set_header("ANNOUNCEMENT", cmd.announcement);
  return msg;
}

MrfpCommand mrfp_command_from(const SigMessage& msg) {
  auto verb = msg.header(hdr::kMpVerb);
  if (msg.kind != MessageKind::Message || !verb) {
    throw Error(Errc::MalformedMessage, "not an Mp command");
  }
  MrfpCommand cmd;
  cmd.verb = parse_mrfp_verb(*verb);
  cmd.conf_id = msg.header_or(hdr::kConf, "");
  cmd.participant = msg.header_or("PARTICIPANT", "");
  cmd.media = parse_media_list(msg.header_or("MEDIA", ""));
  cmd.announcement = msg.header_or("ANNOUNCEMENT", "");
  return cmd;
}

bool ConferenceState::has(const std::string& p) const {
  return std::find(participants.begin(), participants.end(), p) != participants.end();
}

ConferenceState mrfp_apply(const ConferenceState& state, const MrfpCommand& cmd) {
  if (!state.conf_id.empty() && cmd.conf_id != state.conf_id) {
    invalid("command for " + cmd.conf_id + " applied to " + state.conf_id);
  }
  ConferenceState next = state;
  next.conf_id = cmd.conf_id;
  switch (cmd.verb) {
    case MrfpVerb::AddStream:
      if (cmd.participant.empty() || state.has(cmd.participant)) {
        invalid("AddStream for existing or empty participant '" + cmd.participant + "'");
      }
      next.participants.push_back(cmd.participant);
      next.participant_media[cmd.participant] =
          cmd.media.empty() ? std::set<MediaKind>{MediaKind::Audio} : cmd.media;
      break;
    case MrfpVerb::RemoveStream:
      if (!state.has(cmd.participant)) invalid("RemoveStream for non-participant " + cmd.participant);
      std::erase(next.participants, cmd.participant);
      next.participant_media.erase(cmd.participant);
      if (next.floor_holder == cmd.participant) next.floor_holder.reset();
      if (next.participants.size() < 2) next.mixed_streams.clear();
      break;
    case MrfpVerb::Mix: {
      if (state.participants.size() < 2) invalid("Mix needs at least two participants");
      MixDescriptor mix;
      for (const auto& [_, kinds] : state.participant_media) mix.kinds.insert(kinds.begin(), kinds.end());
      next.mixed_streams = {std::move(mix)};
      break;
    }
    case MrfpVerb::PlayAnnouncement:
      if (cmd.announcement.empty()) invalid("PlayAnnouncement without a clip");
      next.last_announcement = cmd.announcement;
      break;
    case MrfpVerb::GrantFloor:
      if (!state.has(cmd.participant)) invalid("GrantFloor to non-participant " + cmd.participant);
      if (state.floor_holder && *state.floor_holder != cmd.participant) {
        invalid("floor already held by " + *state.floor_holder);
      }
      next.floor_holder = cmd.participant;
      break;
    case MrfpVerb::RevokeFloor:
      if (state.floor_holder != cmd.participant) invalid("RevokeFloor from non-holder " + cmd.participant);
      next.floor_holder.reset();
      break;
  }
  return next;
}

std::string_view to_string(FloorOutcome f) {
  switch (f) {
    case FloorOutcome::Granted: return "Granted";
    case FloorOutcome::Queued: return "Queued";
    case FloorOutcome::Denied: return "Denied";
  }
  return "?";
}

FloorOutcome floor_request(MrfcConference& conf, const std::string& requester) {
  if (std::find(conf.participants.begin(), conf.participants.end(), requester) ==
      conf.participants.end()) {
    return FloorOutcome::Denied;
  }
  if (!conf.floor_holder) {
    conf.floor_holder = requester;
    return FloorOutcome::Granted;
  }
  if (*conf.floor_holder == requester) return FloorOutcome::Granted;
  if (std::find(conf.floor_queue.begin(), conf.floor_queue.end(), requester) ==
      conf.floor_queue.end()) {
    conf.floor_queue.push_back(requester);
  }
  return FloorOutcome::Queued;
}

std::optional<std::string> floor_release(MrfcConference& conf, const std::string& holder) {
  if (conf.floor_holder != holder) {
    std::erase(conf.floor_queue, holder);
    return std::nullopt;
  }
  conf.floor_holder.reset();
  if (conf.floor_queue.empty()) return std::nullopt;
  conf.floor_holder = conf.floor_queue.front();
  conf.floor_queue.pop_front();
  return conf.floor_holder;
}

std::string_view to_string(MrOp op) {
  switch (op) {
    case MrOp::Join: return "join";
    case MrOp::Leave: return "leave";
    case MrOp::Announce: return "announce";
    case MrOp::FloorRequest: return "floor-request";
    case MrOp::FloorRelease: return "floor-release";
  }
  return "?";
}

MrOp parse_mr_op(std::string_view text) {
  for (auto op : {MrOp::Join, MrOp::Leave, MrOp::Announce, MrOp::FloorRequest, MrOp::FloorRelease}) {
    if (to_string(op) == text) return op;
  }
  throw Error(Errc::MalformedMessage, "unknown MR-OP '" + std::string(text) + "'");
}

const MrfcConference* Mrfc::find(const std::string& conf_id) const {
  auto it = confs_.find(conf_id);
  return it == confs_.end() ? nullptr : &it->second;
}

MrfcResult Mrfc::control(const MrfRequest& req) {
  MrfcResult out;
  auto it = confs_.find(req.conf_id);
  if (it == confs_.end()) {
    if (req.op != MrOp::Join) throw Error(Errc::UnknownConference, "no conference " + req.conf_id);
    it = confs_.emplace(req.conf_id, MrfcConference{req.conf_id, {}, {}, {}}).first;
  }
  auto& conf = it->second;
  auto cmd = [&](MrfpVerb verb, std::string participant = {}) {
    MrfpCommand c{verb, req.conf_id, std::move(participant), {}, {}};
    if (verb == MrfpVerb::AddStream) c.media = req.media;
    if (verb == MrfpVerb::PlayAnnouncement) c.announcement = req.announcement;
    out.commands.push_back(std::move(c));
  };
  auto is_member = [&](const std::string& u) {
    return std::find(conf.participants.begin(), conf.participants.end(), u) != conf.participants.end();
  };

  switch (req.op) {
    case MrOp::Join:
      if (is_member(req.user)) break;
      conf.participants.push_back(req.user);
      cmd(MrfpVerb::AddStream, req.user);
      if (conf.participants.size() >= 2) cmd(MrfpVerb::Mix);
      break;
    case MrOp::Leave: {
      if (!is_member(req.user)) break;
      bool held = conf.floor_holder == req.user;
      std::erase(conf.floor_queue, req.user);
      std::erase(conf.participants, req.user);
      if (held) {
        conf.floor_holder.reset();
        cmd(MrfpVerb::RevokeFloor, req.user);
      }
      cmd(MrfpVerb::RemoveStream, req.user);
      if (conf.participants.empty()) {
        confs_.erase(it);
        out.conference_deleted = true;
        return out;
      }
      if (conf.participants.size() >= 2) cmd(MrfpVerb::Mix);
      if (held && !conf.floor_queue.empty()) {
        conf.floor_holder = conf.floor_queue.front();
        conf.floor_queue.pop_front();
        cmd(MrfpVerb::GrantFloor, *conf.floor_holder);
      }
      break;
    }
    case MrOp::Announce:
      cmd(MrfpVerb::PlayAnnouncement);
      break;
    case MrOp::FloorRequest: {
      bool had = conf.floor_holder == req.user;
      out.floor = floor_request(conf, req.user);
      if (*out.floor == FloorOutcome::Granted && !had) cmd(MrfpVerb::GrantFloor, req.user);
      break;
    }
    case MrOp::FloorRelease: {
      bool held = conf.floor_holder == req.user;
      auto next = floor_release(conf, req.user);
      if (held) cmd(MrfpVerb::RevokeFloor, req.user);
      if (next) cmd(MrfpVerb::GrantFloor, *next);
      break;
    }
  }
  return out;
}

}  // namespace ims
