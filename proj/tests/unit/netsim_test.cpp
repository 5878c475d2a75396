#include <gtest/gtest.h>

#include "ims/error.hpp"
#include "ims/netsim.hpp"

using namespace ims;

namespace {

Payload msg(const std::string& sid) {
  return make_request(MessageKind::Message, 1, SipUri{"a", "x.net"}, SipUri{"b", "x.net"}, sid);
}

Network triangle() {
  Network n(3);
  for (const char* id : {"a", "b", "c"}) n.add_node(id);
  n.add_link("a", "b", 5);
  return n;
}

}  // namespace

TEST(Network, DeliversInTickThenSeqOrder) {
  auto n = triangle();
  n.schedule("a", "b", msg("slow"));   // tick 5
  n.schedule("a", "c", msg("fast1"));  // implicit link, tick 1
  n.schedule("b", "c", msg("fast2"));  // tick 1, later seq
  std::vector<std::string> order;
  n.run_until_quiescent(100, [&](const Event& e) { order.push_back(session_of(e.payload)); });
  EXPECT_EQ(order, (std::vector<std::string>{"fast1", "fast2", "slow"}));
  EXPECT_EQ(n.now(), 5);
  EXPECT_TRUE(n.idle());
}

TEST(Network, HandlersCanScheduleMore) {
  auto n = triangle();
  n.schedule("a", "c", msg("ping"));
  int hops = 0;
  n.run_until_quiescent(100, [&](const Event& e) {
    if (++hops < 4) n.schedule(e.dst, e.src, msg("ping"));
  });
  EXPECT_EQ(hops, 4);
  EXPECT_EQ(n.trace().size(), 4u);
}

TEST(Network, DownLinkDropsAndTraces) {
  auto n = triangle();
  n.set_link_up("a", "b", false);
  n.set_link_up("a", "c", false);
  EXPECT_FALSE(n.schedule("a", "b", msg("x")));
  EXPECT_FALSE(n.schedule("c", "a", msg("y")));
  EXPECT_TRUE(n.schedule("b", "c", msg("z")));
  ASSERT_EQ(n.trace().size(), 2u);
  EXPECT_EQ(n.trace().entries()[0].kind, "DROP");
  EXPECT_EQ(n.trace().entries()[0].summary.rfind("MESSAGE sid=x", 0), 0u);
  n.set_link_up("a", "b", true);
  EXPECT_TRUE(n.link_between("b", "a").up);
  EXPECT_EQ(n.link_between("b", "a").latency, 5);
}

TEST(Network, RejectsUnknownNodesAndBadLatency) {
  auto n = triangle();
  EXPECT_THROW(n.schedule("a", "zz", msg("x")), Error);
  EXPECT_THROW(n.add_link("a", "b", 0), Error);
  EXPECT_THROW(n.set_default_latency(0), Error);
}

TEST(Network, BudgetStopsRunawayQueues) {
  auto n = triangle();
  n.schedule("a", "b", msg("x"));
  try {
    n.run_until_quiescent(3, [](const Event&) {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TickBudgetExceeded);
  }
  EXPECT_TRUE(n.idle());
}

TEST(Network, AdvanceOnlyWhenIdle) {
  auto n = triangle();
  n.advance(10);
  EXPECT_EQ(n.now(), 10);
  n.schedule("a", "c", msg("x"));
  EXPECT_THROW(n.advance(1), Error);
  EXPECT_THROW(triangle().advance(-1), Error);
}

TEST(Trace, SerializeParseRoundTrip) {
  auto n = triangle();
  n.note("a", "s1", "hello there");
  n.schedule("a", "b", msg("s1"));
  n.run_until_quiescent(10, [](const Event&) {});
  auto text = n.trace().serialize();
  EXPECT_EQ(text.rfind("TRACE v1 seed=3\n", 0), 0u);
  auto back = Trace::parse(text);
  EXPECT_EQ(back.entries(), n.trace().entries());
  EXPECT_EQ(back.seed(), 3u);
  EXPECT_EQ(back.serialize(), text);
  EXPECT_THROW(Trace::parse("nope\n"), Error);
  EXPECT_THROW(parse_trace_entry("1\ta\tb"), Error);
}

TEST(Labels, PayloadKinds) {
  EXPECT_EQ(kind_label(msg("s")), "MESSAGE");
  EXPECT_EQ(kind_label(make_diameter(DiameterCommand::LocateHss, "s")), "Dx:LocateHss");
  SgwFrame f{{CsFamily::IsupLike, CsPrimitive::IAM, "r1", "44"}, CsTransport::MtpLike};
  EXPECT_EQ(kind_label(f), "ISUP:IAM");
  EXPECT_NE(summarize(f).find("transport=MTP"), std::string::npos);
  EXPECT_EQ(session_of(msg("abc")), "abc");
}

TEST(Determinism, SameInputsSameTrace) {
  auto run = [] {
    auto n = triangle();
    for (int i = 0; i < 20; ++i) n.schedule(i % 2 ? "a" : "b", "c", msg("m" + std::to_string(i)));
    n.run_until_quiescent(100, [&](const Event& e) {
      if (e.dst == "c" && session_of(e.payload).size() < 4) n.schedule("c", "a", msg(session_of(e.payload) + "r"));
    });
    return n.trace().serialize();
  };
  EXPECT_EQ(run(), run());
}
