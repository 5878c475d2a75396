#include <gtest/gtest.h>

#include "ims/cscf.hpp"
#include "ims/error.hpp"
#include "oracles.hpp"
#include "routing_oracle.hpp"

using namespace ims;

namespace {

UserProfile profile(const std::string& user, std::vector<InitialFilterCriterion> ifcs = {}) {
  UserProfile p;
  p.identity = make_identity(user + "@home.net", {SipUri{user, "home.net"}}, "s");
  for (auto& i : ifcs) add_ifc(p, std::move(i));
  return p;
}

SigMessage invite_to(Uri to) {
  return make_request(MessageKind::Invite, 1, SipUri{"alice", "home.net"}, std::move(to), "c");
}

struct Fixture {
  ScscfState scscf{"scscf", "home.net"};
  EnumRegistry enums;
  RoutingEnv env;

  Fixture() {
    scscf.bind(profile("alice"), {SipUri{"alice", "home.net"}}, "alice-phone", "pcscf", 0, 100, "sa", false);
    env.local_domain = "home.net";
    env.ims_domains = {"home.net", "other.net"};
    env.external_hosts = {"nonims.example"};
    env.enum_registry = &enums;
    env.now = 1;
  }
};

}  // namespace

TEST(PcscfDiscovery, StaticTable) {
  PcscfTable t{{"phone", "pcscf"}};
  EXPECT_EQ(pcscf_discover("phone", t), "pcscf");
  EXPECT_THROW(pcscf_discover("other", t), Error);
}

TEST(ScscfSelection, LeastLoadedCapableThenById) {
  std::vector<ScscfDescriptor> c = {{"s1", {}, 5}, {"s2", {}, 0}, {"s3", {"video"}, 0}};
  EXPECT_EQ(icscf_select_scscf(std::nullopt, {}, c), "s2");
  EXPECT_EQ(icscf_select_scscf(std::nullopt, {"video"}, c), "s3");
  EXPECT_EQ(icscf_select_scscf(NodeId{"s1"}, {"video"}, c), "s1");
  EXPECT_THROW(icscf_select_scscf(std::nullopt, {"fax"}, c), Error);
  std::vector<ScscfDescriptor> tie = {{"sb", {}, 1}, {"sa", {}, 1}};
  EXPECT_EQ(icscf_select_scscf(std::nullopt, {}, tie), "sa");
}

TEST(Registrar, BindingsExpire) {
  ScscfState s("scscf", "home.net");
  s.bind(profile("john"), {SipUri{"john", "home.net"}}, "phone", "pcscf", 10, 20, "sa1", true);
  const auto* b = s.binding_for(SipUri{"john", "home.net"}, 19);
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->contact, "phone");
  EXPECT_TRUE(b->compression_negotiated);
  EXPECT_FALSE(s.is_registered(SipUri{"john", "home.net"}, 20));
  EXPECT_EQ(s.binding_count(19), 1u);
  EXPECT_EQ(s.binding_count(20), 0u);
  s.unbind(SipUri{"john", "home.net"});
  EXPECT_NE(s.profile_for(SipUri{"john", "home.net"}), nullptr);
  EXPECT_FALSE(s.is_registered(SipUri{"john", "home.net"}, 0));
}

TEST(Routing, ForeignImsDomainGoesToItsIcscf) {
  Fixture f;
  auto d = route_originating(f.scscf, f.env, invite_to(SipUri{"bob", "other.net"}));
  EXPECT_EQ(d, (RoutingDecision{route::ToIcscf{"other.net"}, std::nullopt}));
}

TEST(Routing, TelWithoutEnumBreaksOut) {
  Fixture f;
  auto d = route_originating(f.scscf, f.env, invite_to(TelUri{"19990000"}));
  EXPECT_EQ(d, (RoutingDecision{route::ToBgcf{}, std::nullopt}));
}

TEST(Routing, DeclaredExternalHost) {
  Fixture f;
  auto d = route_originating(f.scscf, f.env, invite_to(SipUri{"x", "nonims.example"}));
  EXPECT_EQ(d, (RoutingDecision{route::ToExternalSip{"nonims.example"}, std::nullopt}));
  auto r = route_originating(f.scscf, f.env, invite_to(SipUri{"x", "unknown.example"}));
  EXPECT_EQ(r.action, (decltype(r.action){route::Reject{RejectReason::UnknownDestination}}));
}

TEST(Routing, EnumHitRewritesAndReevaluates) {
  Fixture f;
  f.enums.enum_register(TelUri{"15550001"}, SipUri{"bob", "other.net"});
  auto d = route_originating(f.scscf, f.env, invite_to(TelUri{"15550001"}));
  EXPECT_EQ(d, (RoutingDecision{route::ToIcscf{"other.net"}, Uri{SipUri{"bob", "other.net"}}}));
}

TEST(Routing, TerminatingPrecedence) {
  Fixture f;
  f.scscf.bind(profile("john", {{10, MessageKind::Invite, Direction::Terminating, "as1"},
                                {20, MessageKind::Invite, Direction::Terminating, "as2"}}),
               {SipUri{"john", "home.net"}}, "john-home", "pcscf", 0, 100, "sa", false);
  auto msg = invite_to(SipUri{"john", "home.net"});
  EXPECT_EQ(route_terminating(f.scscf, f.env, msg).action,
            (decltype(RoutingDecision::action){route::ToAsChain{{"as1", "as2"}}}));
  msg.set_header(hdr::kIscTerm, "-");
  EXPECT_EQ(route_terminating(f.scscf, f.env, msg).action,
            (decltype(RoutingDecision::action){route::ToPcscf{"john-home", "pcscf"}}));

  auto cached = profile("mary");
  cached.cs_forward = TelUri{"4420"};
  f.scscf.cache_profile(cached);
  f.scscf.cache_profile(profile("gone"));
  auto to_mary = route_terminating(f.scscf, f.env, invite_to(SipUri{"mary", "home.net"}));
  EXPECT_EQ(to_mary, (RoutingDecision{route::ToBgcf{}, Uri{TelUri{"4420"}}}));
  auto to_gone = route_terminating(f.scscf, f.env, invite_to(SipUri{"gone", "home.net"}));
  EXPECT_EQ(to_gone.action, (decltype(to_gone.action){route::Reject{RejectReason::UserUnavailable}}));
}

TEST(Routing, ForceIcscfSendsLocalTargetsThroughTheIcscf) {
  Fixture f;
  f.env.force_icscf = true;
  auto d = route_originating(f.scscf, f.env, invite_to(SipUri{"alice", "home.net"}));
  EXPECT_EQ(d.action, (decltype(d.action){route::ToIcscf{"home.net"}}));
}

TEST(Routing, MatchesOracleOnSmallWorlds) {
  std::size_t cases = 0;
  oracle::for_each_world(2, 3, 2, [&](const oracle::World& w) {
    auto r = oracle::realize(w);
    auto env = r.bound_env();
    int callee = static_cast<int>(w.users.size()) - 1;
    for (auto t : oracle::kTargets) {
      auto to = oracle::target_uri(w, t, callee);
      if (!to) continue;
      oracle::Request req{MessageKind::Invite, *to, false, false};
      auto got = route_originating(r.scscf, env, oracle::to_message(w, req));
      ASSERT_EQ(got, oracle::expect_originating(w, req)) << describe(got);
      ++cases;
    }
  });
  EXPECT_GT(cases, 1000u);
}

TEST(RecordRoute, AppendsWithoutDuplicatingTheTail) {
  auto m = invite_to(SipUri{"john", "home.net"});
  record_route(m, "pcscf");
  record_route(m, "pcscf");
  record_route(m, "scscf");
  EXPECT_EQ(record_route_set(m), (std::vector<NodeId>{"pcscf", "scscf"}));
  EXPECT_EQ(m.header_or(hdr::kRecordRoute, ""), "pcscf,scscf");
}

namespace {

IcscfState thig_icscf() {
  IcscfState ic;
  ic.id = "icscf";
  ic.domain = "home.net";
  ic.thig_enabled = true;
  ic.thig_key = "k1";
  return ic;
}

}  // namespace

TEST(Thig, HidesHomeNodesAndRestoresThem) {
  auto ic = thig_icscf();
  std::set<NodeId> home = {"icscf", "scscf", "pcscf", "john-phone"};
  auto m = invite_to(SipUri{"bob", "other.net"});
  m.via_stack = {"john-phone", "pcscf", "scscf", "icscf"};
  m.route_stack = {"i-other"};
  m.set_header(hdr::kRecordRoute, "pcscf,scscf,icscf");
  m.set_header(hdr::kContact, "john-phone");

  auto hidden = thig_apply(ic, home, m);
  auto wire = serialize(hidden);
  for (const char* raw : {"john-phone", "pcscf", "scscf"}) {
    EXPECT_EQ(wire.find(std::string(",") + raw), std::string::npos) << raw;
    EXPECT_EQ(wire.find(std::string(" ") + raw), std::string::npos) << raw;
    EXPECT_EQ(wire.find(std::string("\t") + raw), std::string::npos) << raw;
  }
  EXPECT_EQ(hidden.via_stack.back(), "icscf");
  EXPECT_EQ(hidden.route_stack, m.route_stack);
  EXPECT_TRUE(is_thig_token(hidden.via_stack.front()));
  EXPECT_EQ(thig_strip(ic, hidden), m);
}

TEST(Thig, ForeignTokensPassAndUnknownOnesFail) {
  auto ic = thig_icscf();
  auto other = thig_icscf();
  other.id = "i-other";
  other.thig_key = "k2";
  auto m = invite_to(SipUri{"bob", "other.net"});
  m.via_stack = {"x"};
  auto foreign = thig_apply(other, {"x"}, m);
  EXPECT_EQ(thig_strip(ic, foreign), foreign);

  auto forged = m;
  forged.via_stack = {thig_token(ic, "never-issued")};
  try {
    thig_strip(ic, forged);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownToken);
  }
  IcscfState off;
  EXPECT_THROW(thig_apply(off, {}, m), Error);
}

TEST(Thig, RandomRoundTrip) {
  oracle::Gen gen(99);
  auto ic = thig_icscf();
  for (int i = 0; i < 500; ++i) {
    auto m = gen.message();
    std::set<NodeId> home;
    for (const auto& v : m.via_stack) {
      if (gen.coin()) home.insert(v);
    }
    for (const auto& r : m.route_stack) {
      if (gen.coin()) home.insert(r);
    }
    ASSERT_EQ(thig_strip(ic, thig_apply(ic, home, m)), m);
  }
}
