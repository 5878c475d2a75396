#include "ims/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "ims/error.hpp"

namespace ims {

namespace {

constexpr std::pair<NodeKind, std::string_view> kNodeKinds[] = {
    {NodeKind::Pcscf, "PCSCF"}, {NodeKind::Icscf, "ICSCF"},   {NodeKind::Scscf, "SCSCF"},
    {NodeKind::Hss, "HSS"},     {NodeKind::Slf, "SLF"},       {NodeKind::As, "AS"},
    {NodeKind::Bgcf, "BGCF"},   {NodeKind::Mgcf, "MGCF"},     {NodeKind::Sgw, "SGW"},
    {NodeKind::Mgw, "MGW"},     {NodeKind::Mrfc, "MRFC"},     {NodeKind::Mrfp, "MRFP"},
    {NodeKind::Pdp, "PDP"},     {NodeKind::Terminal, "TERMINAL"}, {NodeKind::ExtSip, "EXTSIP"},
    {NodeKind::Pstn, "PSTN"},
};

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Cursor over one directive's tokens with line-aware errors.
class Line {
 public:
  Line(std::vector<std::string> toks, int line, std::string raw)
      : toks_(std::move(toks)), line_(line), raw_(std::move(raw)) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(Errc::ParseError, "line " + std::to_string(line_) + ": " + why, line_);
  }

  int number() const { return line_; }
  const std::string& raw() const { return raw_; }
  bool done() const { return pos_ >= toks_.size(); }
  const std::string& peek() const {
    if (done()) fail("unexpected end of directive");
    return toks_[pos_];
  }
  std::string next(std::string_view what) {
    if (done()) fail("missing " + std::string(what));
    return toks_[pos_++];
  }
  void keyword(std::string_view kw) {
    auto t = next(kw);
    if (t != kw) fail("expected " + std::string(kw) + ", got '" + t + "'");
  }
  void finish() const {
    if (!done()) fail("unexpected token '" + toks_[pos_] + "'");
  }

  template <typename Int>
  Int number_arg(std::string_view what, Int min) {
    auto t = next(what);
    Int v{};
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) fail("bad " + std::string(what) + " '" + t + "'");
    if (v < min) fail(std::string(what) + " must be at least " + std::to_string(min));
    return v;
  }

  bool on_off(std::string_view what) {
    auto t = next(what);
    if (t == "on") return true;
    if (t == "off") return false;
    fail(std::string(what) + " must be on|off");
  }

  template <typename Fn>
  auto guard(Fn&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const Error& e) {
      if (e.line() != 0 || e.code() == Errc::UnresolvedReference) throw;
      std::string_view what = e.what();
      if (e.code() == Errc::ParseError) what.remove_prefix(std::min(what.size(), what.find(": ") + 2));
      fail(std::string(what));
    }
  }

  Uri uri(std::string_view what) {
    auto t = next(what);
    return guard([&] { return parse_uri(t); });
  }
  SipUri sip_uri(std::string_view what) {
    auto t = next(what);
    return guard([&] { return parse_sip_uri(t); });
  }
  TelUri tel_uri(std::string_view what) {
    auto t = next(what);
    return guard([&] { return parse_tel_uri(t); });
  }
  std::set<MediaKind> media_kinds() {
    auto t = next("media kinds");
    std::set<MediaKind> out;
    for (const auto& k : split(t, ',')) out.insert(guard([&] { return parse_media_kind(k); }));
    if (out.empty()) fail("empty media list");
    return out;
  }

 private:
  std::vector<std::string> toks_;
  std::size_t pos_ = 0;
  int line_;
  std::string raw_;
};

[[noreturn]] void unresolved(int line, const std::string& what) {
  throw Error(Errc::UnresolvedReference, "line " + std::to_string(line) + ": " + what, line);
}

class Parser {
 public:
  explicit Parser(std::string name) { sc_.name = std::move(name); }

  void directive(Line& l) {
    auto d = l.next("directive");
    if (d == "DOMAIN") return domain(l);
    if (d == "NODE") return node(l);
    if (d == "LINK") return link(l);
    if (d == "LINK-DOWN" || d == "LINK-UP") return link_state(l, d == "LINK-UP");
    if (d == "TERMINAL") return terminal(l);
    if (d == "USER") return user(l);
    if (d == "IFC") return ifc(l);
    if (d == "SCREEN") return screen(l);
    if (d == "ROUTING") return routing(l);
    if (d == "ENUM") return enum_entry(l);
    if (d == "ENUM-APEX") {
      auto apex = l.next("apex");
      if (!is_valid_domain(apex)) l.fail("bad ENUM apex '" + apex + "'");
      sc_.enum_apex = apex;
      return l.finish();
    }
    if (d == "BREAKOUT") return breakout(l);
    if (d == "POLICY") return policy(l);
    if (d == "FORCE-ICSCF") {
      sc_.force_icscf = l.on_off("FORCE-ICSCF");
      return l.finish();
    }
    if (d == "DEFAULT-LATENCY") {
      sc_.default_latency = l.number_arg<Tick>("latency", 1);
      return l.finish();
    }
    if (d == "LIFETIME") {
      sc_.lifetime = l.number_arg<Tick>("lifetime", 1);
      return l.finish();
    }
    if (d == "TICK-BUDGET") {
      sc_.tick_budget = l.number_arg<Tick>("tick budget", 1);
      return l.finish();
    }
    if (d == "ACTION") return action_directive(l);
    if (d == "EXPECT") return expect_directive(l);
    l.fail("unknown directive '" + d + "'");
  }

  Scenario finish() {
    check();
    return std::move(sc_);
  }

 private:
  void domain(Line& l) {
    auto d = l.next("domain");
    if (!is_valid_domain(d)) l.fail("bad domain '" + d + "'");
    if (std::find(sc_.domains.begin(), sc_.domains.end(), d) != sc_.domains.end()) {
      l.fail("duplicate domain " + d);
    }
    sc_.domains.push_back(d);
    l.finish();
  }

  void node(Line& l) {
    NodeDecl n;
    n.line = l.number();
    n.kind = l.guard([&] { return parse_node_kind(l.peek()); });
    l.next("kind");
    n.id = l.next("node id");
    if (!is_valid_token(n.id) || n.id.find(',') != std::string::npos) l.fail("bad node id '" + n.id + "'");
    l.keyword("DOMAIN");
    n.domain = l.next("domain");
    while (!l.done()) {
      auto opt = l.next("option");
      if (opt == "THIG") n.thig = l.on_off("THIG");
      else if (opt == "CAPS") for (auto& c : split(l.next("capabilities"), ',')) n.caps.insert(c);
      else if (opt == "PREMISES") n.premises = l.on_off("PREMISES");
      else if (opt == "TYPE") n.as_kind = l.guard([&] { return parse_as_kind(l.next("AS type")); });
      else if (opt == "MODE") n.as_mode = l.guard([&] { return parse_as_mode(l.next("AS mode")); });
      else if (opt == "SCSCF") n.scscf = l.next("S-CSCF");
      else if (opt == "HOST") n.host = l.next("host");
      else if (opt == "FAMILY") n.family = l.guard([&] { return parse_cs_family(l.next("family")); });
      else if (opt == "HIDING") n.hiding = l.on_off("HIDING");
      else if (opt == "PCSCF") pending_terminals_.push_back({n.id, l.next("P-CSCF"), n.line});
      else l.fail("unknown NODE option '" + opt + "'");
    }
    if (sc_.node(n.id)) l.fail("duplicate node " + n.id);
    sc_.nodes.push_back(std::move(n));
  }

  void link(Line& l) {
    LinkDecl k;
    k.line = l.number();
    k.a = l.next("endpoint");
    k.b = l.next("endpoint");
    l.keyword("LATENCY");
    k.latency = l.number_arg<Tick>("latency", 1);
    l.finish();
    sc_.links.push_back(std::move(k));
  }

  void link_state(Line& l, bool up) {
    action::LinkState s{l.next("endpoint"), l.next("endpoint"), up};
    l.finish();
    sc_.actions.push_back({std::move(s), l.number(), l.raw()});
  }

  void terminal(Line& l) {
    auto t = l.next("terminal");
    l.keyword("PCSCF");
    auto p = l.next("P-CSCF");
    l.finish();
    pending_terminals_.push_back({t, p, l.number()});
  }

  void user(Line& l) {
    UserDecl u;
    u.line = l.number();
    u.name = l.next("user name");
    if (!is_valid_token(u.name)) l.fail("bad user name '" + u.name + "'");
    while (!l.done()) {
      auto kw = l.next("keyword");
      if (kw == "PRIVATE") u.private_id = l.next("private id");
      else if (kw == "PUBLIC") u.public_ids.push_back(l.uri("public id"));
      else if (kw == "SECRET") u.secret = l.next("secret");
      else if (kw == "MEDIA") u.media = l.media_kinds();
      else if (kw == "BARRED") u.barred = true;
      else if (kw == "CSFWD") u.cs_forward = l.tel_uri("forwarding number");
      else if (kw == "HSS") u.hss = l.next("HSS");
      else if (kw == "REQUIRE") for (auto& c : split(l.next("capabilities"), ',')) u.require.insert(c);
      else l.fail("unknown USER keyword '" + kw + "'");
    }
    if (u.private_id.empty()) l.fail("USER needs PRIVATE");
    if (u.public_ids.empty()) l.fail("USER needs at least one PUBLIC");
    if (u.secret.empty()) l.fail("USER needs SECRET");
    l.guard([&] { return make_identity(u.private_id, u.public_ids, u.secret); });
    if (sc_.user(u.name)) l.fail("duplicate user " + u.name);
    for (const auto& other : sc_.users) {
      if (other.private_id == u.private_id) l.fail("duplicate private id " + u.private_id);
      for (const auto& p : u.public_ids) {
        if (std::find(other.public_ids.begin(), other.public_ids.end(), p) != other.public_ids.end()) {
          l.fail("public id " + to_string(p) + " already belongs to " + other.name);
        }
      }
    }
    sc_.users.push_back(std::move(u));
  }

  void ifc(Line& l) {
    IfcDecl d;
    d.line = l.number();
    d.user = l.next("user");
    l.keyword("PRIORITY");
    d.ifc.priority = l.number_arg<int>("priority", 0);
    l.keyword("METHOD");
    auto m = l.next("method");
    if (m != "*") {
      static constexpr MessageKind kKinds[] = {MessageKind::Register, MessageKind::Invite,
                                               MessageKind::Ack, MessageKind::Bye,
                                               MessageKind::Message};
      auto it = std::find_if(std::begin(kKinds), std::end(kKinds),
                             [&](MessageKind k) { return to_string(k) == m; });
      if (it == std::end(kKinds)) l.fail("unknown method '" + m + "'");
      d.ifc.method = *it;
    }
    l.keyword("DIRECTION");
    d.ifc.direction = l.guard([&] { return parse_direction(l.next("direction")); });
    l.keyword("AS");
    d.ifc.as_id = l.next("AS");
    l.finish();
    sc_.ifcs.push_back(std::move(d));
  }

  void screen(Line& l) {
    ScreenDecl s;
    s.line = l.number();
    s.as = l.next("AS");
    l.keyword("OWNER");
    s.owner = l.next("owner");
    l.keyword("ALLOW");
    auto list = l.next("allow list");
    if (list != "-") {
      for (const auto& u : split(list, ',')) s.allow.insert(l.guard([&] { return parse_uri(u); }));
    }
    l.keyword("TARGET");
    s.target = l.sip_uri("target");
    l.keyword("DEFLECT");
    s.deflect = l.sip_uri("deflect target");
    l.finish();
    if (s.target == s.deflect) l.fail("TARGET and DEFLECT must differ");
    sc_.screens.push_back(std::move(s));
  }

  void routing(Line& l) {
    RoutingDecl r;
    r.line = l.number();
    r.as = l.next("AS");
    l.keyword("OWNER");
    r.owner = l.next("owner");
    l.keyword("SOURCE");
    r.source = l.next("source AS");
    l.finish();
    sc_.routings.push_back(std::move(r));
  }

  void enum_entry(Line& l) {
    EnumDecl e;
    e.line = l.number();
    e.tel = l.tel_uri("tel");
    e.target = l.sip_uri("target");
    l.finish();
    sc_.enums.push_back(std::move(e));
  }

  void breakout(Line& l) {
    BreakoutDecl b;
    b.line = l.number();
    auto prefix = l.next("prefix");
    if (prefix != "DEFAULT") {
      if (!std::all_of(prefix.begin(), prefix.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        l.fail("breakout prefix must be digits");
      }
      b.prefix = prefix;
    }
    auto kind = l.next("LOCAL|REMOTE");
    if (kind == "LOCAL") b.target = breakout::LocalMgcf{l.next("MGCF")};
    else if (kind == "REMOTE") b.target = breakout::RemoteBgcf{l.next("domain")};
    else l.fail("breakout target must be LOCAL or REMOTE");
    if (!l.done()) {
      l.keyword("AT");
      b.at = l.next("BGCF");
    }
    l.finish();
    for (const auto& other : sc_.breakouts) {
      if (other.prefix == b.prefix && other.at == b.at) l.fail("duplicate breakout prefix");
    }
    sc_.breakouts.push_back(std::move(b));
  }

  void policy(Line& l) {
    auto scope = l.next("NETWORK|USER|PROVISION");
    if (scope == "PROVISION") {
      sc_.policy_provision = l.on_off("PROVISION");
      return l.finish();
    }
    PolicyDecl p;
    p.line = l.number();
    if (scope == "USER") {
      p.user = l.next("user");
      p.rule.scope = PolicyScope::UserSpecific;
    } else if (scope != "NETWORK") {
      l.fail("POLICY scope must be NETWORK, USER or PROVISION");
    }
    while (!l.done()) {
      auto kw = l.next("keyword");
      if (kw == "MEDIA") {
        p.rule.allow_media = l.media_kinds();
      } else if (kw == "CODECS") {
        auto codecs = split(l.next("codecs"), ',');
        p.rule.allow_codecs = std::set<std::string>(codecs.begin(), codecs.end());
      } else if (kw == "MAXBW") {
        p.rule.max_bandwidth_kbps = l.number_arg<int>("bandwidth", 1);
      } else {
        l.fail("unknown POLICY keyword '" + kw + "'");
      }
    }
    sc_.policies.push_back(std::move(p));
  }

  std::string next_ref(Line& l, std::optional<std::string> explicit_ref) {
    std::string ref = explicit_ref ? *explicit_ref : "c" + std::to_string(call_refs_.size() + 1);
    if (!is_valid_token(ref)) l.fail("bad session ref '" + ref + "'");
    if (!call_refs_.insert(ref).second) l.fail("duplicate session ref " + ref);
    return ref;
  }

  void call_options(Line& l, std::optional<std::string>& ref, std::optional<NodeId>* terminal,
                    std::optional<SessionDescription>& media) {
    while (!l.done()) {
      auto kw = l.next("keyword");
      if (kw == "ID") {
        ref = l.next("session ref");
      } else if (kw == "VIA" && terminal) {
        *terminal = l.next("terminal");
      } else if (kw == "MEDIA") {
        auto spec = l.next("media spec");
        media = l.guard([&] { return parse_media_spec(spec); });
      } else {
        l.fail("unknown call option '" + kw + "'");
      }
    }
  }

  void action_directive(Line& l) {
    auto verb = l.next("action");
    ActionBody body;
    if (verb == "register") {
      action::Register r;
      r.user = l.next("user");
      l.keyword("VIA");
      r.terminal = l.next("terminal");
      if (!l.done()) {
        l.keyword("SECRET");
        r.secret = l.next("secret");
      }
      body = std::move(r);
    } else if (verb == "call") {
      action::Call c;
      c.user = l.next("user");
      l.keyword("->");
      c.target = l.uri("target");
      std::optional<std::string> ref;
      call_options(l, ref, &c.terminal, c.media);
      c.ref = next_ref(l, ref);
      body = std::move(c);
    } else if (verb == "as-call") {
      action::AsCall c;
      c.as = l.next("AS");
      c.user = l.next("user");
      l.keyword("->");
      c.target = l.uri("target");
      std::optional<std::string> ref;
      call_options(l, ref, nullptr, c.media);
      c.ref = next_ref(l, ref);
      body = std::move(c);
    } else if (verb == "hangup") {
      action::Hangup h{l.next("session ref")};
      if (!call_refs_.contains(h.ref)) unresolved(l.number(), "unknown session ref " + h.ref);
      body = std::move(h);
    } else if (verb == "ut-config") {
      auto user = l.next("user");
      auto as = l.next("AS");
      auto edit_verb = l.next("edit");
      auto uri = l.next("uri");
      body = action::UtConfig{user, as, l.guard([&] { return parse_ut_edit(edit_verb, uri); })};
    } else if (verb == "conf-join" || verb == "conf-leave" || verb == "announce" || verb == "floor") {
      action::Conference c;
      c.conf = l.next("conference");
      if (!is_valid_token(c.conf)) l.fail("bad conference id '" + c.conf + "'");
      c.user = l.next("user");
      if (verb == "conf-join") {
        c.op = MrOp::Join;
        if (!l.done()) {
          l.keyword("MEDIA");
          c.media = l.media_kinds();
        }
      } else if (verb == "conf-leave") {
        c.op = MrOp::Leave;
      } else if (verb == "announce") {
        c.op = MrOp::Announce;
        c.clip = l.next("clip");
      } else {
        auto what = l.next("request|release");
        if (what == "request") c.op = MrOp::FloorRequest;
        else if (what == "release") c.op = MrOp::FloorRelease;
        else l.fail("floor action must be request or release");
      }
      body = std::move(c);
    } else if (verb == "link-down" || verb == "link-up" || verb == "LINK-DOWN" || verb == "LINK-UP") {
      body = action::LinkState{l.next("endpoint"), l.next("endpoint"),
                               verb == "link-up" || verb == "LINK-UP"};
    } else if (verb == "wait") {
      body = action::Wait{l.number_arg<Tick>("ticks", 0)};
    } else {
      l.fail("unknown action '" + verb + "'");
    }
    l.finish();
    sc_.actions.push_back({std::move(body), l.number(), l.raw()});
  }

  void expect_directive(Line& l) {
    auto verb = l.next("expectation");
    ExpectBody body;
    if (verb == "delivered") {
      body = expect::Delivered{l.uri("uri")};
    } else if (verb == "not-delivered") {
      body = expect::NotDelivered{l.uri("uri")};
    } else if (verb == "rejected") {
      body = expect::Rejected{l.next("reason")};
    } else if (verb == "cdr-nodes") {
      expect::CdrNodes c;
      c.ref = l.next("session ref");
      for (auto& n : split(l.next("node list"), ',')) c.nodes.insert(n);
      body = std::move(c);
    } else if (verb == "scscf") {
      expect::Scscf s;
      s.user = l.next("user");
      auto id = l.next("S-CSCF");
      if (id != "none") s.id = id;
      body = std::move(s);
    } else if (verb == "trace-contains") {
      auto pos = l.raw().find("trace-contains");
      auto text = trim(std::string_view(l.raw()).substr(pos + std::string_view("trace-contains").size()));
      if (text.empty()) l.fail("trace-contains needs text");
      sc_.expects.push_back({expect::TraceContains{text}, l.number(), l.raw()});
      return;
    } else if (verb == "registered" || verb == "not-registered") {
      body = expect::Registered{l.next("user"), verb == "registered"};
    } else if (verb == "floor-holder") {
      expect::FloorHolder f;
      f.conf = l.next("conference");
      auto who = l.next("user");
      if (who != "none") f.user = who;
      body = std::move(f);
    } else if (verb == "as-on-behalf") {
      expect::AsOnBehalf a;
      a.ref = l.next("session ref");
      auto yn = l.next("yes|no");
      if (yn != "yes" && yn != "no") l.fail("as-on-behalf takes yes|no");
      a.yes = yn == "yes";
      body = std::move(a);
    } else {
      l.fail("unknown expectation '" + verb + "'");
    }
    l.finish();
    sc_.expects.push_back({std::move(body), l.number(), l.raw()});
  }

  // Reference resolution ----------------------------------------------------

  void need_node(const NodeId& id, int line, std::optional<NodeKind> kind = std::nullopt) const {
    const auto* n = sc_.node(id);
    if (!n) unresolved(line, "unknown node " + id);
    if (kind && n->kind != *kind) {
      unresolved(line, id + " is not a " + std::string(to_string(*kind)) + " node");
    }
  }
  void need_user(const std::string& name, int line) const {
    if (!sc_.user(name)) unresolved(line, "unknown user " + name);
  }
  void need_domain(const std::string& d, int line) const {
    if (std::find(sc_.domains.begin(), sc_.domains.end(), d) == sc_.domains.end()) {
      unresolved(line, "undeclared domain " + d);
    }
  }

  void check() {
    for (const auto& n : sc_.nodes) {
      need_domain(n.domain, n.line);
      if (n.scscf) need_node(*n.scscf, n.line, NodeKind::Scscf);
    }
    for (const auto& t : pending_terminals_) {
      need_node(t.terminal, t.line, NodeKind::Terminal);
      need_node(t.pcscf, t.line, NodeKind::Pcscf);
      sc_.terminal_pcscf[t.terminal] = t.pcscf;
    }
    for (const auto& k : sc_.links) {
      need_node(k.a, k.line);
      need_node(k.b, k.line);
    }
    for (const auto& u : sc_.users) {
      if (u.hss) need_node(*u.hss, u.line, NodeKind::Hss);
    }
    for (const auto& i : sc_.ifcs) {
      need_user(i.user, i.line);
      need_node(i.ifc.as_id, i.line, NodeKind::As);
    }
    std::set<NodeId> screening;
    for (const auto& s : sc_.screens) {
      need_node(s.as, s.line, NodeKind::As);
      need_user(s.owner, s.line);
      if (!screening.insert(s.as).second) {
        throw Error(Errc::ParseError, "line " + std::to_string(s.line) + ": AS " + s.as +
                    " already has a service", s.line);
      }
    }
    for (const auto& r : sc_.routings) {
      need_node(r.as, r.line, NodeKind::As);
      need_user(r.owner, r.line);
      if (!screening.contains(r.source)) unresolved(r.line, r.source + " hosts no SCREEN service");
      if (screening.contains(r.as)) {
        throw Error(Errc::ParseError, "line " + std::to_string(r.line) + ": AS " + r.as +
                    " already has a service", r.line);
      }
    }
    for (const auto& b : sc_.breakouts) {
      if (const auto* local = std::get_if<breakout::LocalMgcf>(&b.target)) {
        need_node(local->mgcf, b.line, NodeKind::Mgcf);
      } else {
        need_domain(std::get<breakout::RemoteBgcf>(b.target).domain, b.line);
      }
      if (b.at) need_node(*b.at, b.line, NodeKind::Bgcf);
    }
    for (const auto& p : sc_.policies) {
      if (p.user) need_user(*p.user, p.line);
    }
    for (const auto& a : sc_.actions) check_action(a);
    for (const auto& e : sc_.expects) check_expect(e);
  }

  void check_action(const Action& a) const {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, action::Register>) {
            need_user(v.user, a.line);
            need_node(v.terminal, a.line, NodeKind::Terminal);
          } else if constexpr (std::is_same_v<T, action::Call>) {
            need_user(v.user, a.line);
            if (v.terminal) need_node(*v.terminal, a.line, NodeKind::Terminal);
          } else if constexpr (std::is_same_v<T, action::AsCall>) {
            need_node(v.as, a.line, NodeKind::As);
            need_user(v.user, a.line);
          } else if constexpr (std::is_same_v<T, action::UtConfig>) {
            need_user(v.user, a.line);
            need_node(v.as, a.line);
          } else if constexpr (std::is_same_v<T, action::Conference>) {
            need_user(v.user, a.line);
          } else if constexpr (std::is_same_v<T, action::LinkState>) {
            need_node(v.a, a.line);
            need_node(v.b, a.line);
          }
        },
        a.body);
  }

  void check_expect(const Expectation& e) const {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, expect::CdrNodes> || std::is_same_v<T, expect::AsOnBehalf>) {
            if (!call_refs_.contains(v.ref)) unresolved(e.line, "unknown session ref " + v.ref);
          } else if constexpr (std::is_same_v<T, expect::Scscf>) {
            need_user(v.user, e.line);
            if (v.id) need_node(*v.id, e.line, NodeKind::Scscf);
          } else if constexpr (std::is_same_v<T, expect::Registered>) {
            need_user(v.user, e.line);
          } else if constexpr (std::is_same_v<T, expect::FloorHolder>) {
            if (v.user) need_user(*v.user, e.line);
          }
        },
        e.body);
  }

  struct TerminalMapping {
    NodeId terminal;
    NodeId pcscf;
    int line;
  };

  Scenario sc_;
  std::vector<TerminalMapping> pending_terminals_;
  std::set<std::string> call_refs_;
};

}  // namespace

std::string_view to_string(NodeKind k) {
  for (const auto& [kind, name] : kNodeKinds) {
    if (kind == k) return name;
  }
  return "?";
}

NodeKind parse_node_kind(std::string_view text) {
  for (const auto& [kind, name] : kNodeKinds) {
    if (name == text) return kind;
  }
  throw Error(Errc::ParseError, "unknown node kind '" + std::string(text) + "'");
}

const NodeDecl* Scenario::node(const NodeId& id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeDecl& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

const UserDecl* Scenario::user(const std::string& name) const {
  auto it = std::find_if(users.begin(), users.end(), [&](const UserDecl& u) { return u.name == name; });
  return it == users.end() ? nullptr : &*it;
}

const NodeDecl* Scenario::first_of(NodeKind kind, const std::string& domain) const {
  auto it = std::find_if(nodes.begin(), nodes.end(),
                         [&](const NodeDecl& n) { return n.kind == kind && n.domain == domain; });
  return it == nodes.end() ? nullptr : &*it;
}

Scenario parse_scenario(std::string_view text, std::string name) {
  Parser parser(std::move(name));
  int number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++number;
    auto hash = raw.find('#');
    auto body = trim(raw.substr(0, hash));
    if (body.empty()) continue;
    Line line(tokenize(body), number, body);
    parser.directive(line);
  }
  return parser.finish();
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.stem().string());
}

}  // namespace ims
