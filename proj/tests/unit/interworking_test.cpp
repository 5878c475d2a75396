#include <gtest/gtest.h>

#include "ims/error.hpp"
#include "ims/interworking.hpp"

using namespace ims;

namespace {

SigMessage invite_tel(const std::string& digits) {
  return make_request(MessageKind::Invite, 1, SipUri{"alice", "home.net"}, TelUri{digits}, "c");
}

BreakoutTable fixture_table() {
  BreakoutTable t;
  t.add("1", breakout::RemoteBgcf{"us.net"});
  t.add("1999", breakout::LocalMgcf{"mg1"});
  t.set_default(breakout::LocalMgcf{"mg0"});
  return t;
}

}  // namespace

TEST(Breakout, LongestPrefixWins) {
  auto t = fixture_table();
  EXPECT_EQ(t.match("19995551234"), (BreakoutTarget{breakout::LocalMgcf{"mg1"}}));
  EXPECT_EQ(t.match("12125550000"), (BreakoutTarget{breakout::RemoteBgcf{"us.net"}}));
  EXPECT_EQ(t.match("442071234567"), (BreakoutTarget{breakout::LocalMgcf{"mg0"}}));
  BreakoutTable empty;
  EXPECT_EQ(empty.match("1"), std::nullopt);
}

TEST(Breakout, TableRejectsBadPrefixes) {
  BreakoutTable t;
  t.add("44", breakout::LocalMgcf{"m"});
  EXPECT_THROW(t.add("44", breakout::LocalMgcf{"m"}), Error);
  EXPECT_THROW(t.add("4a", breakout::LocalMgcf{"m"}), Error);
}

TEST(Breakout, SelectionPathHonoursHiding) {
  auto t = fixture_table();
  std::map<std::string, NodeId> remote = {{"us.net", "bgcf-us"}};
  auto local = bgcf_select(invite_tel("19995551234"), t, true, "icscf", remote);
  EXPECT_EQ(local.path, (std::vector<NodeId>{"mg1"}));
  auto hidden = bgcf_select(invite_tel("12125550000"), t, true, "icscf", remote);
  EXPECT_EQ(hidden.path, (std::vector<NodeId>{"icscf", "bgcf-us"}));
  auto open = bgcf_select(invite_tel("12125550000"), t, false, "icscf", remote);
  EXPECT_EQ(open.path, (std::vector<NodeId>{"bgcf-us"}));
  EXPECT_THROW(bgcf_select(invite_tel("12125550000"), t, false, "icscf", {}), Error);
}

TEST(Mgcf, FixedSipToCsMapping) {
  auto inv = invite_tel("442071234567");
  auto iam = mgcf_convert(inv, CsFamily::IsupLike, "ref-1");
  EXPECT_EQ(iam.primitive, CsPrimitive::IAM);
  EXPECT_EQ(iam.digits, "442071234567");
  EXPECT_EQ(iam.call_ref, "ref-1");

  auto ringing = make_response(inv, 180);
  ringing.set_header(hdr::kCseq, "INVITE");
  EXPECT_EQ(mgcf_convert(ringing, CsFamily::IsupLike, "ref-1").primitive, CsPrimitive::ACM);
  auto ok = make_response(inv, 200);
  ok.set_header(hdr::kCseq, "INVITE");
  EXPECT_EQ(mgcf_convert(ok, CsFamily::BiccLike, "ref-1").primitive, CsPrimitive::ANM);
  auto bye = inv;
  bye.kind = MessageKind::Bye;
  EXPECT_EQ(mgcf_convert(bye, CsFamily::IsupLike, "ref-1").primitive, CsPrimitive::REL);
  auto bye_ok = make_response(bye, 200);
  bye_ok.set_header(hdr::kCseq, "BYE");
  EXPECT_EQ(mgcf_convert(bye_ok, CsFamily::IsupLike, "ref-1").primitive, CsPrimitive::RLC);

  auto msg = inv;
  msg.kind = MessageKind::Message;
  try {
    mgcf_convert(msg, CsFamily::IsupLike, "ref-1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnmappableKind);
  }
}

TEST(Mgcf, InverseMappingIsConsistent) {
  for (auto p : {CsPrimitive::IAM, CsPrimitive::ACM, CsPrimitive::ANM, CsPrimitive::REL, CsPrimitive::RLC}) {
    auto eq = sip_equivalent(p);
    SigMessage m = make_request(eq.kind == MessageKind::Response ? MessageKind::Invite : eq.kind, 1,
                                SipUri{"a", "b.net"}, TelUri{"1"}, "c");
    if (eq.kind == MessageKind::Response) {
      m = make_response(m, eq.code);
      m.set_header(hdr::kCseq, std::string(to_string(eq.answers)));
    }
    EXPECT_EQ(mgcf_convert(m, CsFamily::IsupLike, "r").primitive, p) << to_string(p);
  }
}

TEST(Sgw, TransportDependsOnDirection) {
  CsSignal s{CsFamily::IsupLike, CsPrimitive::IAM, "r", "1"};
  EXPECT_EQ(sgw_transport(s, SgwDirection::ToCs).transport, CsTransport::MtpLike);
  EXPECT_EQ(sgw_transport(s, SgwDirection::ToIms).transport, CsTransport::SctpLike);
  EXPECT_EQ(sgw_transport(s, SgwDirection::ToCs).inner, s);
}

TEST(Mgw, AdaptsTheFirstAudioLine) {
  auto table = CodecTable::defaults();
  auto amr = mgw_adapt(parse_media_spec("video/H264/384,audio/AMR/12"), table);
  EXPECT_EQ(amr.from_codec, "AMR");
  EXPECT_EQ(amr.to_format, "PCM");
  EXPECT_FALSE(amr.pass_through);
  EXPECT_TRUE(mgw_adapt(parse_media_spec("audio/PCMA/64"), table).pass_through);
  try {
    mgw_adapt(parse_media_spec("audio/OPUS/32"), table);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsupportedCodec);
  }
  EXPECT_THROW(mgw_adapt(parse_media_spec("video/H264/384"), table), Error);
}
