#include <gtest/gtest.h>

#include "ims/error.hpp"
#include "ims/hss.hpp"

using namespace ims;

namespace {

// FNV-1a 64 computed outside the library for "j0hn:net:hss-n1" and
// "s3cret:hss-n1".
constexpr const char* kNetToken = "878e5bbbb56593e2";
constexpr const char* kDigest = "abc790c78dda36af";

UserProfile john() {
  UserProfile p;
  p.identity = make_identity("john@home.net", {SipUri{"john", "home.net"}, TelUri{"15550001"}}, "s3cret");
  p.subscribed_media = {MediaKind::Audio};
  add_ifc(p, {20, MessageKind::Invite, Direction::Terminating, "as2"});
  add_ifc(p, {10, MessageKind::Invite, Direction::Terminating, "as1"});
  return p;
}

SigMessage invite() {
  return make_request(MessageKind::Invite, 1, SipUri{"a", "x.net"}, SipUri{"john", "home.net"}, "c");
}

}  // namespace

TEST(Digest, MatchesIndependentFnv) {
  EXPECT_EQ(keyed_digest("hss-n1", "s3cret"), kDigest);
  EXPECT_EQ(network_auth_token("hss-n1", "j0hn"), kNetToken);
  EXPECT_NE(keyed_digest("hss-n1", "other"), kDigest);
}

TEST(Ifc, KeptInPriorityOrder) {
  auto p = john();
  ASSERT_EQ(p.ifcs.size(), 2u);
  EXPECT_EQ(p.ifcs[0].as_id, "as1");
  EXPECT_THROW(add_ifc(p, {10, std::nullopt, Direction::Both, "as3"}), Error);
}

TEST(Ifc, MatchRespectsMethodAndDirection) {
  auto p = john();
  add_ifc(p, {30, std::nullopt, Direction::Both, "as3"});
  add_ifc(p, {40, MessageKind::Message, Direction::Terminating, "as4"});
  add_ifc(p, {50, MessageKind::Invite, Direction::Originating, "as5"});
  EXPECT_EQ(ifc_match(p, invite(), Direction::Terminating), (std::vector<NodeId>{"as1", "as2", "as3"}));
  EXPECT_EQ(ifc_match(p, invite(), Direction::Originating), (std::vector<NodeId>{"as3", "as5"}));
  auto msg = invite();
  msg.kind = MessageKind::Message;
  EXPECT_EQ(ifc_match(p, msg, Direction::Terminating), (std::vector<NodeId>{"as3", "as4"}));
}

TEST(Direction, ParsesShortAndLongForms) {
  EXPECT_EQ(parse_direction("o"), Direction::Originating);
  EXPECT_EQ(parse_direction("terminating"), Direction::Terminating);
  EXPECT_EQ(parse_direction("both"), Direction::Both);
  EXPECT_THROW(parse_direction("sideways"), Error);
}

TEST(Slf, SingleHssSkipsTheTable) {
  SlfTable slf;
  EXPECT_EQ(slf_locate(SipUri{"x", "y.net"}, slf, {"hss"}), "hss");
}

TEST(Slf, TwoHssUseTheTable) {
  SlfTable slf;
  slf.map(SipUri{"john", "home.net"}, "hss2");
  EXPECT_EQ(slf_locate(SipUri{"john", "home.net"}, slf, {"hss1", "hss2"}), "hss2");
  try {
    slf_locate(SipUri{"ghost", "home.net"}, slf, {"hss1", "hss2"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownSubscriber);
  }
}

TEST(Hss, AuthVectorsUseTheSharedSecret) {
  Hss hss("hss");
  hss.add_user(john());
  auto v = hss.fetch_auth_vectors("john@home.net", 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].nonce, "hss-n1");
  EXPECT_EQ(v[0].expected_response, kDigest);
  auto more = hss.fetch_auth_vectors("john@home.net", 2);
  EXPECT_NE(more[0].nonce, more[1].nonce);
  EXPECT_THROW(hss.fetch_auth_vectors("nobody@home.net", 1), Error);
}

TEST(Hss, DownloadReportsBarringAndUnknowns) {
  Hss hss("hss");
  auto p = john();
  hss.add_user(p);
  auto dl = hss.download_profile(TelUri{"15550001"}, 0);
  EXPECT_EQ(dl.ifcs.size(), 2u);
  EXPECT_FALSE(dl.registered);

  p.identity.private_id = "barred@home.net";
  p.identity.public_ids = {SipUri{"barred", "home.net"}};
  p.barred = true;
  hss.add_user(p);
  try {
    hss.download_profile(SipUri{"barred", "home.net"}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Barred);
  }
  try {
    hss.download_profile(SipUri{"ghost", "home.net"}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownSubscriber);
  }
}

TEST(Hss, AssignmentCoversTheImplicitSetAndExpires) {
  Hss hss("hss", 100);
  hss.add_user(john());
  hss.assign_scscf(SipUri{"john", "home.net"}, "scscf", 10);
  EXPECT_EQ(hss.query_scscf(TelUri{"15550001"}, 50), "scscf");
  EXPECT_EQ(hss.assignment_expiry(SipUri{"john", "home.net"}), 110);
  EXPECT_EQ(hss.query_scscf(SipUri{"john", "home.net"}, 109), "scscf");
  EXPECT_EQ(hss.query_scscf(SipUri{"john", "home.net"}, 110), std::nullopt);
  EXPECT_TRUE(hss.download_profile(SipUri{"john", "home.net"}, 50).registered);

  hss.deassign_scscf(TelUri{"15550001"});
  EXPECT_EQ(hss.query_scscf(SipUri{"john", "home.net"}, 50), std::nullopt);
}

TEST(Hss, ProfileTag) {
  Hss hss("hss");
  hss.add_user(john());
  EXPECT_EQ(hss.profile_for(SipUri{"john", "home.net"}).active_profile_tag, "general");
  hss.set_profile_tag(TelUri{"15550001"}, "home");
  EXPECT_EQ(hss.profile_for(SipUri{"john", "home.net"}).active_profile_tag, "home");
}
