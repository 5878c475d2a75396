// Acceptance suite: one PASS/FAIL line per criterion, with elapsed time
// against the criterion's time limit. Exit status is non-zero on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ims/charging.hpp"
#include "ims/cscf.hpp"
#include "ims/identity.hpp"
#include "ims/runner.hpp"
#include "ims/scenario.hpp"
#include "ims/signaling.hpp"
#include "ims/simulation.hpp"
#include "oracles.hpp"
#include "routing_oracle.hpp"

using namespace ims;

namespace {

/// Collects the first few mismatches of a criterion.
struct Check {
  std::vector<std::string> problems;

  void require(bool ok, const std::string& what) {
    if (!ok && problems.size() < 5) problems.push_back(what);
  }
  bool ok() const { return problems.empty(); }
};

struct Criterion {
  int id;
  std::string name;
  double limit_ms;
  std::function<void(Check&)> body;
};

struct Run {
  Scenario sc;
  Simulation sim;
  RunReport report;
};

Run run_bundled(const std::string& name) {
  auto sc = load_scenario(oracle::scenario_dir() / (name + ".scn"));
  Simulation sim(sc);
  auto report = run_scenario(sc, sim);
  return Run{std::move(sc), std::move(sim), std::move(report)};
}

void golden(Check& c, const Run& r, const std::string& name) {
  c.require(r.report.passed(), name + ": scenario expectations failed\n" + r.report.summary());
  c.require(r.report.trace == oracle::read_file(oracle::golden_dir() / (name + ".trace")),
            name + ": trace differs from golden");
  c.require(r.report.cdrs == oracle::read_file(oracle::golden_dir() / (name + ".cdr")),
            name + ": CDRs differ from golden");
}

bool delivered(const Simulation& sim, const std::string& uri) {
  for (const auto& d : sim.deliveries()) {
    if (to_string(d.uri) == uri) return true;
  }
  return false;
}

/// Index of the first trace line matching, or -1.
long find_line(const std::vector<oracle::Line>& lines, const std::function<bool(const oracle::Line&)>& pred) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (pred(lines[i])) return static_cast<long>(i);
  }
  return -1;
}

// --- 1, 2: case studies -------------------------------------------------------

void case_study_s1(Check& c) {
  auto r = run_bundled("case_study_s1");
  golden(c, r, "case_study_s1");
  auto lines = oracle::read_trace(r.report.trace);
  auto invite_to = [&](const std::string& src, const std::string& dst) {
    return find_line(lines, [&](const oracle::Line& l) {
      return l.kind == "INVITE" && l.dst == dst && (src.empty() || l.src == src) &&
             oracle::token(l.summary, "sid") == "s1";
    });
  };
  long as1 = invite_to("", "as1"), as2 = invite_to("", "as2"), home = invite_to("p-home", "home-phone");
  c.require(as1 >= 0 && as2 > as1, "AS1 must see the INVITE before AS2");
  c.require(home > as2, "P-CSCF delivery to home-phone must follow AS2");
  c.require(delivered(r.sim, "sip:john-home@home.net"), "call not delivered to john-home");
  c.require(!delivered(r.sim, "sip:vm@home.net"), "call also reached voicemail");
}

void case_study_s2(Check& c) {
  auto r = run_bundled("case_study_s2");
  golden(c, r, "case_study_s2");
  c.require(delivered(r.sim, "sip:vm@home.net"), "call not deflected to voicemail");
  c.require(!delivered(r.sim, "sip:john-home@home.net"), "deflected call reached john-home");
}

// --- 3: registration atomicity -------------------------------------------------

enum class Fault { None, WrongSecret, Barred, PcscfIcscf, IcscfScscf, ScscfHss, IcscfHss, PcscfTerminal };

struct Link2 {
  const char* a;
  const char* b;
};

std::optional<Link2> fault_link(Fault f) {
  switch (f) {
    case Fault::PcscfIcscf: return Link2{"pcscf", "icscf"};
    case Fault::IcscfScscf: return Link2{"icscf", "scscf"};
    case Fault::ScscfHss: return Link2{"scscf", "hss"};
    case Fault::IcscfHss: return Link2{"icscf", "hss"};
    case Fault::PcscfTerminal: return Link2{"pcscf", "t0"};
    default: return std::nullopt;
  }
}

void registration_atomicity(Check& c) {
  std::mt19937_64 rng(20061016);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int round = 0; round < 200; ++round) {
    auto fault = static_cast<Fault>(pick(0, 7));
    bool prior = fault != Fault::Barred && pick(0, 1) == 1;  // fault hits a re-registration
    int ids = pick(1, 3);

    std::ostringstream s;
    s << "DOMAIN home.net\n"
      << "NODE PCSCF pcscf DOMAIN home.net\nNODE ICSCF icscf DOMAIN home.net\n"
      << "NODE SCSCF scscf DOMAIN home.net\nNODE HSS hss DOMAIN home.net\n"
      << "NODE TERMINAL t0 DOMAIN home.net PCSCF pcscf\n"
      << "NODE TERMINAL t1 DOMAIN home.net PCSCF pcscf\n";
    for (const char* a : {"pcscf", "icscf", "scscf", "hss"}) {
      for (const char* b : {"icscf", "scscf", "hss"}) {
        if (std::string(a) < b && pick(0, 1)) s << "LINK " << a << ' ' << b << " LATENCY " << pick(1, 4) << "\n";
      }
    }
    s << "USER u PRIVATE u@home.net PUBLIC sip:u@home.net";
    for (int i = 1; i < ids; ++i) s << (i == 2 ? " PUBLIC tel:+1555000" : " PUBLIC sip:u.alt@home.net");
    s << " SECRET pw" << (fault == Fault::Barred ? " BARRED" : "") << "\n";
    s << "USER v PRIVATE v@home.net PUBLIC sip:v@home.net SECRET pw2\n";

    std::string label = "round " + std::to_string(round) + " fault " + std::to_string(static_cast<int>(fault)) +
                        (prior ? " (re-register)" : "");
    Simulation sim(parse_scenario(s.str()));
    auto bystander = sim.register_user("v", "t1");
    if (prior) {
      auto first = sim.register_user("u", "t0");
      c.require(first.status == RegistrationStatus::Registered, label + ": initial registration failed");
    }
    if (auto l = fault_link(fault)) sim.execute(Action{action::LinkState{l->a, l->b, false}, 0, "link-down"});
    std::optional<std::string> secret;
    if (fault == Fault::WrongSecret) secret = "not-pw";
    auto rec = sim.register_user("u", "t0", secret);

    bool expect_ok = fault == Fault::None;
    c.require((rec.status == RegistrationStatus::Registered) == expect_ok, label + ": unexpected status");
    bool assigned = sim.hss_assignment("u").has_value();
    auto bound = sim.bound_ids("u");
    bool sa = sim.security_association("t0");
    bool all = assigned && bound == static_cast<std::size_t>(ids) && sa;
    bool none = !assigned && bound == 0 && !sa;
    c.require(all || none, label + ": partial registration state");
    c.require(all == expect_ok, label + ": state does not match the outcome");
    if (bystander.status == RegistrationStatus::Registered) {
      c.require(sim.bound_ids("v") == 1 && sim.security_association("t1") && sim.hss_assignment("v"),
                label + ": unrelated registration disturbed");
    }
  }
}

// --- 4: routing precedence --------------------------------------------------------

void routing_exhaustive(Check& c) {
  std::size_t cases = 0;
  oracle::for_each_world(3, 4, 2, [&](const oracle::World& w) {
    auto r = oracle::realize(w);
    auto env = r.bound_env();
    int callee = static_cast<int>(w.users.size()) - 1;
    for (auto t : oracle::kTargets) {
      auto to = oracle::target_uri(w, t, callee);
      if (!to) continue;
      for (auto kind : {MessageKind::Invite, MessageKind::Message}) {
        for (int flags = 0; flags < 4; ++flags) {
          oracle::Request req{kind, *to, (flags & 1) != 0, (flags & 2) != 0};
          auto msg = oracle::to_message(w, req);
          auto got = route_originating(r.scscf, env, msg);
          c.require(got == oracle::expect_originating(w, req), "originating: " + describe(got));
          auto got_t = route_terminating(r.scscf, env, msg);
          c.require(got_t == oracle::expect_terminating(w, req), "terminating: " + describe(got_t));
          cases += 2;
        }
      }
    }
  });
  c.require(cases > 100000, "only " + std::to_string(cases) + " routing cases enumerated");
}

// --- 5: round trips -----------------------------------------------------------------

void round_trips(Check& c) {
  oracle::Gen gen(7);
  IcscfState ic;
  ic.id = "icscf";
  ic.domain = "home.net";
  ic.thig_enabled = true;
  ic.thig_key = "acceptance";
  EnumRegistry reg;
  for (int i = 0; i < 1000; ++i) {
    auto m = gen.message();
    auto wire = serialize(m);
    c.require(parse_message(wire) == m, "wire round trip " + std::to_string(i));
    c.require(serialize(parse_message(wire)) == wire, "wire fixed point " + std::to_string(i));

    std::set<NodeId> home;
    for (const auto& v : m.via_stack) {
      if (gen.coin()) home.insert(v);
    }
    c.require(thig_strip(ic, thig_apply(ic, home, m)) == m, "THIG round trip " + std::to_string(i));

    auto z = compress(m);
    c.require(decompress(z) == m, "compression round trip " + std::to_string(i));
    c.require(z.size_bytes() == (wire.size() + 1) / 2, "compressed size " + std::to_string(i));

    TelUri tel{gen.digits()};
    SipUri sip{gen.word(), gen.domain()};
    reg.enum_register(tel, sip);
    c.require(enum_lookup(tel, reg) == sip, "ENUM lookup " + tel.digits);
    // The ENUM name lists the digits reversed, one label each.
    auto name = enum_domain(tel);
    std::string back;
    for (std::size_t k = 0; k + 1 < name.size() && name[k] != 'e'; k += 2) back.insert(back.begin(), name[k]);
    c.require(back == tel.digits, "ENUM domain " + name);
  }
}

// --- 6: CDR conservation ---------------------------------------------------------------

void cdr_conservation(Check& c) {
  std::size_t compared = 0, on_behalf = 0;
  for (const auto& file : oracle::bundled_scenarios()) {
    auto sc = load_scenario(file);
    auto report = run_scenario(sc);
    const auto name = file.stem().string();
    auto walked = oracle::trace_walk(report.trace, sc);

    CollectionLog log;
    for (const auto& row : oracle::read_cdrs(report.cdrs)) {
      std::ostringstream line;
      line << row.tick << '\t' << row.node << '\t' << row.type << '\t' << row.sid << '\t' << row.event << '\t'
           << row.user << '\t' << row.role << '\t' << (row.on_behalf ? 1 : 0);
      log.append(parse_cdr(line.str()));
    }
    auto summaries = correlate_all(log);
    std::map<std::string, std::set<NodeId>> charged;
    for (const auto& [sid, s] : summaries) {
      if (!sid.empty()) charged[sid] = s.nodes;
    }
    std::set<std::string> sids;
    for (const auto& [sid, _] : charged) sids.insert(sid);
    for (const auto& [sid, _] : walked) sids.insert(sid);
    for (const auto& sid : sids) {
      // A registration that never completed is not charged; completed ones
      // must account for every hop like a session does.
      if (sid.rfind("reg-", 0) == 0 && !charged.contains(sid)) continue;
      ++compared;
      auto set_text = [](const std::map<std::string, std::set<NodeId>>& m, const std::string& k) {
        std::string out;
        if (auto it = m.find(k); it != m.end()) {
          for (const auto& n : it->second) out += (out.empty() ? "" : ",") + n;
        }
        return "{" + out + "}";
      };
      c.require(set_text(charged, sid) == set_text(walked, sid),
                name + ": " + sid + " charged " + set_text(charged, sid) + " but trace visits " + set_text(walked, sid));
    }

    std::set<std::string> as_calls;
    for (const auto& a : sc.actions) {
      if (const auto* ac = std::get_if<action::AsCall>(&a.body)) as_calls.insert(ac->ref);
    }
    for (const auto& [sid, s] : summaries) {
      if (sid.empty()) continue;
      c.require(s.as_on_behalf == as_calls.contains(sid), name + ": on-behalf flag wrong for " + sid);
      on_behalf += s.as_on_behalf ? 1 : 0;
    }
  }
  c.require(compared >= 20, "only " + std::to_string(compared) + " charged exchanges compared");
  c.require(on_behalf >= 1, "no AS-originated session was exercised");
}

// --- 7: policy split ---------------------------------------------------------------------

void policy_split(Check& c) {
  auto r = run_bundled("policy_audio_only");
  c.require(r.report.passed(), "scenario expectations failed\n" + r.report.summary());
  const auto& sessions = r.sim.sessions();
  auto outcome = [&](const std::string& ref) -> std::pair<int, std::string> {
    auto it = sessions.find(ref);
    if (it == sessions.end()) return {0, ""};
    return {it->second.final_code.value_or(0), it->second.reason};
  };
  c.require(outcome("video1") == std::pair<int, std::string>{488, "MediaNotSubscribed"}, "video1 outcome");
  c.require(outcome("g729") == std::pair<int, std::string>{488, "CodecNotAllowed"}, "g729 outcome");

  auto lines = oracle::read_trace(r.report.trace);
  auto origin_488 = [&](const std::string& sid) {
    auto i = find_line(lines, [&](const oracle::Line& l) {
      return l.kind == "RESPONSE-488" && oracle::token(l.summary, "sid") == sid;
    });
    return i < 0 ? std::string() : lines[static_cast<std::size_t>(i)].src;
  };
  c.require(origin_488("video1") == "scscf", "video1 must be refused by the S-CSCF");
  c.require(origin_488("g729") == "pcscf", "g729 must be refused by the P-CSCF");
  // The P-CSCF only relays the S-CSCF's refusal back to the phone.
  for (const auto& l : lines) {
    if (l.kind == "RESPONSE-488" && l.src == "pcscf" && oracle::token(l.summary, "sid") == "video1") {
      c.require(l.dst == "kid-phone", "P-CSCF refused video1 towards " + l.dst);
    }
  }
  c.require(r.sim.deliveries().size() == 1, "only the AMR call may be delivered");
}

// --- 8: PSTN breakout ---------------------------------------------------------------------

void breakout_path(Check& c) {
  auto r = run_bundled("breakout_basic");
  golden(c, r, "breakout_basic");
  auto lines = oracle::read_trace(r.report.trace);
  long to_mgcf = find_line(lines, [](const auto& l) { return l.src == "bgcf" && l.dst == "mgcf" && l.kind == "INVITE"; });
  long to_sgw = find_line(lines, [](const auto& l) { return l.src == "mgcf" && l.dst == "sgw" && l.kind == "ISUP:IAM"; });
  long to_pstn = find_line(lines, [](const auto& l) { return l.src == "sgw" && l.dst == "pstn" && l.kind == "ISUP:IAM"; });
  c.require(to_mgcf >= 0 && to_sgw > to_mgcf && to_pstn > to_sgw, "breakout must run BGCF, MGCF, SGW in order");

  std::set<std::string> iam_refs, rel_refs;
  for (const auto& l : lines) {
    if (l.kind.rfind("ISUP:", 0) != 0) continue;
    auto ref = oracle::token(l.summary, "ref").value_or("");
    if (l.kind == "ISUP:IAM") iam_refs.insert(ref);
    if (l.kind == "ISUP:REL") rel_refs.insert(ref);
    auto transport = oracle::token(l.summary, "transport").value_or("");
    bool cs_side = l.src == "pstn" || l.dst == "pstn";
    c.require(transport == (cs_side ? "MTP" : "SCTP"), "frame " + l.src + "->" + l.dst + " uses " + transport);
  }
  c.require(iam_refs.size() == 1 && iam_refs == rel_refs && !iam_refs.begin()->empty(),
            "IAM and REL must share one call reference");
}

// --- 9: determinism ------------------------------------------------------------------------

void determinism(Check& c) {
  for (const auto& file : oracle::bundled_scenarios()) {
    auto sc = load_scenario(file);
    auto a = run_scenario(sc), b = run_scenario(sc);
    c.require(a.trace == b.trace && a.cdrs == b.cdrs, file.stem().string() + ": runs differ");
  }
}

// --- 10: floor control ----------------------------------------------------------------------

void floor_control(Check& c) {
  auto r = run_bundled("conference_floor");
  c.require(r.report.passed(), "scenario expectations failed\n" + r.report.summary());

  oracle::FloorQueue model;
  std::vector<std::string> expected;
  for (const auto& a : r.sc.actions) {
    const auto* conf = std::get_if<action::Conference>(&a.body);
    if (!conf) continue;
    auto before = model.holder();
    auto who = to_string(r.sc.user(conf->user)->public_ids.front());
    if (conf->op == MrOp::FloorRequest) model.request(who);
    else if (conf->op == MrOp::FloorRelease || conf->op == MrOp::Leave) model.release(who);
    if (model.holder() && model.holder() != before) expected.push_back(*model.holder());
  }
  std::vector<std::string> granted;
  for (const auto& e : r.sim.floor_history()) {
    if (e.holder) granted.push_back(*e.holder);
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (const auto& x : v) out += (out.empty() ? "" : ",") + x;
    return out;
  };
  c.require(granted == expected, "grants " + join(granted) + " but the FIFO model gives " + join(expected));
  c.require(r.sim.floor_holder("family") == model.holder(), "final holder differs from the FIFO model");

  // From the MRFP's side: a grant only when nobody holds the floor.
  std::optional<std::string> holder;
  for (const auto& l : oracle::read_trace(r.report.trace)) {
    if (l.dst != "mrfp") continue;
    auto who = oracle::token(l.summary, "participant");
    if (l.kind == "Mp:GrantFloor") {
      c.require(!holder, "floor granted at tick " + std::to_string(l.tick) + " while held");
      holder = who;
    } else if (l.kind == "Mp:RevokeFloor") {
      c.require(holder == who, "revoke of a floor not held");
      holder.reset();
    }
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "case study S1: screened call reaches john-home via AS1 then AS2", 1000, case_study_s1},
      {2, "case study S2: deflected call reaches voicemail", 1000, case_study_s2},
      {3, "registration is all-or-nothing across 200 randomized runs", 10000, registration_atomicity},
      {4, "S-CSCF routing matches the precedence oracle exhaustively", 30000, routing_exhaustive},
      {5, "wire, THIG, compression and ENUM round trips", 10000, round_trips},
      {6, "CDR node sets equal the trace walk for every bundled scenario", 5000, cdr_conservation},
      {7, "media policy at S-CSCF, codec policy at P-CSCF", 1000, policy_split},
      {8, "PSTN breakout path, call reference and transports", 1000, breakout_path},
      {9, "bundled scenarios are byte-for-byte reproducible", 5000, determinism},
      {10, "floor granted in FIFO order to one holder at a time", 1000, floor_control},
  };

  int failures = 0;
  for (const auto& cr : criteria) {
    Check check;
    auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.problems.push_back(std::string("exception: ") + e.what());
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (ms > cr.limit_ms) check.problems.push_back("exceeded time limit");
    bool pass = check.ok();
    failures += pass ? 0 : 1;
    std::printf("%s  [%2d] %-66s %9.1f ms (limit %.0f ms)\n", pass ? "PASS" : "FAIL", cr.id, cr.name.c_str(), ms,
                cr.limit_ms);
    for (const auto& p : check.problems) std::printf("        %s\n", p.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
