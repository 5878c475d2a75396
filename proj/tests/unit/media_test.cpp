#include <gtest/gtest.h>

#include "ims/error.hpp"
#include "ims/media.hpp"
#include "oracles.hpp"

using namespace ims;

namespace {

// Naive reference: rebuild the MRFP state from scratch for the new membership
// and diff it against the old one. The MRFC's command list must reach the
// same state.
ConferenceState rebuild(const std::string& conf, const std::vector<std::string>& members) {
  ConferenceState s;
  s.conf_id = conf;
  for (const auto& m : members) {
    s.participants.push_back(m);
    s.participant_media[m] = {MediaKind::Audio};
  }
  if (members.size() >= 2) s.mixed_streams = {MixDescriptor{{MediaKind::Audio}}};
  return s;
}

ConferenceState apply_all(ConferenceState s, const std::vector<MrfpCommand>& cmds) {
  for (const auto& c : cmds) s = mrfp_apply(s, c);
  return s;
}

MrfRequest req(MrOp op, const std::string& user) { return MrfRequest{op, "fam", user, {MediaKind::Audio}, {}}; }

}  // namespace

TEST(Mrfc, FirstJoinAddsAStreamOnly) {
  Mrfc mrfc;
  auto r = mrfc.control(req(MrOp::Join, "john"));
  ASSERT_EQ(r.commands.size(), 1u);
  EXPECT_EQ(r.commands[0].verb, MrfpVerb::AddStream);
}

TEST(Mrfc, SecondJoinAddsAndMixes) {
  Mrfc mrfc;
  mrfc.control(req(MrOp::Join, "john"));
  auto r = mrfc.control(req(MrOp::Join, "mary"));
  ASSERT_EQ(r.commands.size(), 2u);
  EXPECT_EQ(r.commands[0].verb, MrfpVerb::AddStream);
  EXPECT_EQ(r.commands[1].verb, MrfpVerb::Mix);
}

TEST(Mrfc, CommandsReachTheRebuiltState) {
  Mrfc mrfc;
  ConferenceState mrfp;
  std::vector<std::string> members;
  for (const char* who : {"a", "b", "c", "d"}) {
    mrfp = apply_all(mrfp, mrfc.control(req(MrOp::Join, who)).commands);
    members.push_back(who);
    EXPECT_EQ(mrfp, rebuild("fam", members));
  }
  mrfp = apply_all(mrfp, mrfc.control(req(MrOp::Leave, "b")).commands);
  members.erase(members.begin() + 1);
  EXPECT_EQ(mrfp, rebuild("fam", members));
}

TEST(Mrfc, LastLeaveDeletesTheConference) {
  Mrfc mrfc;
  mrfc.control(req(MrOp::Join, "john"));
  auto r = mrfc.control(req(MrOp::Leave, "john"));
  EXPECT_TRUE(r.conference_deleted);
  EXPECT_EQ(mrfc.find("fam"), nullptr);
  try {
    mrfc.control(req(MrOp::Announce, "john"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownConference);
  }
}

TEST(Floor, FifoAgainstQueueOracle) {
  Mrfc mrfc;
  oracle::FloorQueue model;
  const std::vector<std::string> users = {"mary", "anna", "john", "gran", "ben"};
  for (const auto& u : users) mrfc.control(req(MrOp::Join, u));
  for (const auto& u : users) {
    auto r = mrfc.control(req(MrOp::FloorRequest, u));
    bool first = !model.holder();
    model.request(u);
    EXPECT_EQ(*r.floor, first ? FloorOutcome::Granted : FloorOutcome::Queued);
    EXPECT_EQ(mrfc.find("fam")->floor_holder, model.holder());
  }
  for (int i = 0; i < 5; ++i) {
    auto holder = *model.holder();
    auto r = mrfc.control(req(MrOp::FloorRelease, holder));
    model.release(holder);
    EXPECT_EQ(mrfc.find("fam")->floor_holder, model.holder());
    if (model.holder()) {
      ASSERT_EQ(r.commands.size(), 2u);
      EXPECT_EQ(r.commands[1].verb, MrfpVerb::GrantFloor);
      EXPECT_EQ(r.commands[1].participant, *model.holder());
    }
  }
}

TEST(Floor, NonMemberIsDenied) {
  MrfcConference c{"fam", {"john"}, {}, {}};
  EXPECT_EQ(floor_request(c, "stranger"), FloorOutcome::Denied);
  EXPECT_EQ(floor_request(c, "john"), FloorOutcome::Granted);
  EXPECT_EQ(floor_request(c, "john"), FloorOutcome::Granted);
}

TEST(Floor, LeavingHolderPassesTheFloor) {
  Mrfc mrfc;
  for (const char* u : {"a", "b", "c"}) mrfc.control(req(MrOp::Join, u));
  mrfc.control(req(MrOp::FloorRequest, "a"));
  mrfc.control(req(MrOp::FloorRequest, "c"));
  auto r = mrfc.control(req(MrOp::Leave, "a"));
  EXPECT_EQ(mrfc.find("fam")->floor_holder, "c");
  EXPECT_EQ(r.commands.front().verb, MrfpVerb::RevokeFloor);
  EXPECT_EQ(r.commands.back().verb, MrfpVerb::GrantFloor);
}

TEST(Mrfp, RejectsInvalidTransitions) {
  ConferenceState s;
  MrfpCommand add{MrfpVerb::AddStream, "fam", "a", {MediaKind::Audio}, {}};
  s = mrfp_apply(s, add);
  EXPECT_THROW(mrfp_apply(s, add), Error);
  EXPECT_THROW(mrfp_apply(s, {MrfpVerb::Mix, "fam", {}, {}, {}}), Error);
  EXPECT_THROW(mrfp_apply(s, {MrfpVerb::GrantFloor, "fam", "b", {}, {}}), Error);
  EXPECT_THROW(mrfp_apply(s, {MrfpVerb::PlayAnnouncement, "fam", {}, {}, {}}), Error);
  EXPECT_THROW(mrfp_apply(s, {MrfpVerb::AddStream, "other", "z", {}, {}}), Error);
  s = mrfp_apply(s, {MrfpVerb::GrantFloor, "fam", "a", {}, {}});
  EXPECT_THROW(mrfp_apply(s, {MrfpVerb::RevokeFloor, "fam", "b", {}, {}}), Error);
}

TEST(Mp, CommandsSurviveTheMessageEncoding) {
  MrfpCommand cmd{MrfpVerb::AddStream, "fam", "sip:john@home.net", {MediaKind::Audio, MediaKind::Video}, {}};
  auto msg = to_message(cmd, 3, SipUri{"john", "home.net"}, SipUri{"mrfp", "home.net"}, "conf-1");
  EXPECT_EQ(mrfp_command_from(msg), cmd);
  EXPECT_EQ(parse_message(serialize(msg)), msg);
  MrfpCommand ann{MrfpVerb::PlayAnnouncement, "fam", {}, {}, "welcome"};
  EXPECT_EQ(mrfp_command_from(to_message(ann, 1, SipUri{"a", "b.net"}, SipUri{"c", "d.net"}, "x")), ann);
  EXPECT_THROW(mrfp_command_from(make_request(MessageKind::Message, 1, SipUri{"a", "b.net"}, SipUri{"c", "d.net"}, "x")),
               Error);
}
