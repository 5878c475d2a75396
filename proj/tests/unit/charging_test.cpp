#include <gtest/gtest.h>

#include "ims/charging.hpp"
#include "ims/error.hpp"

using namespace ims;

namespace {

Cdr rec(Tick t, NodeId node, ChargingNodeType type, std::string sid, CdrEvent ev,
        CdrRole role = CdrRole::None, bool behalf = false) {
  return Cdr{t, std::move(node), type, std::move(sid), ev, "sip:john@home.net", role, behalf};
}

}  // namespace

TEST(Cdr, WireFormat) {
  auto c = rec(7, "scscf", ChargingNodeType::Scscf, "s1", CdrEvent::SessionStart, CdrRole::Originating);
  EXPECT_EQ(serialize(c), "7\tscscf\tSCSCF\ts1\tSessionStart\tsip:john@home.net\toriginating\t0");
  EXPECT_EQ(parse_cdr(serialize(c)), c);
  EXPECT_THROW(parse_cdr("7\tscscf\tSCSCF"), Error);
  EXPECT_THROW(parse_cdr("x\tscscf\tSCSCF\ts1\tSessionStart\tu\tnone\t0"), Error);
  EXPECT_THROW(parse_cdr("1\tscscf\tMSC\ts1\tSessionStart\tu\tnone\t0"), Error);
}

TEST(Log, EnforcesOrderAndInvariants) {
  CollectionLog log;
  log.append(rec(5, "p", ChargingNodeType::Pcscf, "s1", CdrEvent::SessionStart));
  EXPECT_THROW(log.append(rec(4, "p", ChargingNodeType::Pcscf, "s1", CdrEvent::SessionEnd)), Error);
  EXPECT_THROW(log.append(rec(6, "p", ChargingNodeType::Pcscf, "", CdrEvent::SessionEnd)), Error);
  EXPECT_NO_THROW(log.append(rec(6, "p", ChargingNodeType::Pcscf, "", CdrEvent::Register)));
  EXPECT_THROW(log.append(rec(7, "s", ChargingNodeType::Scscf, "s1", CdrEvent::SessionStart,
                              CdrRole::Originating, true)),
               Error);
  EXPECT_NO_THROW(log.append(rec(7, "as", ChargingNodeType::As, "s1", CdrEvent::AsInvocation,
                                 CdrRole::Originating, true)));
  EXPECT_EQ(log.size(), 3u);
}

TEST(Correlate, InterleavedSessionsPartition) {
  CollectionLog log;
  log.append(rec(1, "p1", ChargingNodeType::Pcscf, "a", CdrEvent::SessionStart));
  log.append(rec(2, "p2", ChargingNodeType::Pcscf, "b", CdrEvent::SessionStart));
  log.append(rec(3, "s", ChargingNodeType::Scscf, "a", CdrEvent::SessionStart));
  log.append(rec(4, "s", ChargingNodeType::Scscf, "b", CdrEvent::SessionStart));
  log.append(rec(8, "p1", ChargingNodeType::Pcscf, "a", CdrEvent::SessionEnd));
  log.append(rec(9, "as", ChargingNodeType::As, "b", CdrEvent::AsInvocation, CdrRole::None, true));

  auto all = correlate_all(log);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all["a"].nodes, (std::set<NodeId>{"p1", "s"}));
  EXPECT_EQ(all["b"].nodes, (std::set<NodeId>{"as", "p2", "s"}));
  EXPECT_EQ(all["a"].records + all["b"].records, log.size());
  EXPECT_EQ(all["a"].start_tick, 1);
  EXPECT_EQ(all["a"].end_tick, 8);
  EXPECT_FALSE(all["a"].as_on_behalf);
  EXPECT_TRUE(all["b"].as_on_behalf);
  EXPECT_EQ(correlate(log, "a"), all["a"]);
  EXPECT_TRUE(correlate(log, "zzz").empty());
}

TEST(Log, DumpIsOneLinePerRecord) {
  CollectionLog log;
  log.append(rec(1, "p", ChargingNodeType::Pcscf, "a", CdrEvent::SessionStart));
  log.append(rec(2, "m", ChargingNodeType::Mrfc, "a", CdrEvent::MediaControl));
  EXPECT_EQ(log.dump(),
            "1\tp\tPCSCF\ta\tSessionStart\tsip:john@home.net\tnone\t0\n"
            "2\tm\tMRFC\ta\tMediaControl\tsip:john@home.net\tnone\t0\n");
}
