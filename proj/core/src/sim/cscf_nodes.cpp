#include <algorithm>

#include "ims/error.hpp"
#include "sim/engine.hpp"

namespace ims {

namespace {

std::vector<std::string> csv(std::string_view text) {
  std::vector<std::string> out;
  if (text.empty() || text == "-") return out;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    out.emplace_back(text.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& items, std::string_view empty = "-") {
  if (items.empty()) return std::string(empty);
  std::string out;
  for (const auto& i : items) {
    if (!out.empty()) out += ',';
    out += i;
  }
  return out;
}

int deny_code(DenyReason r) { return r == DenyReason::PdpUnreachable ? 503 : 488; }

bool is_session_request(const SigMessage& m) {
  return m.kind == MessageKind::Invite || m.kind == MessageKind::Message;
}

}  // namespace

// P-CSCF ---------------------------------------------------------------------------

void Engine::on_pcscf(const Event& ev, SigMessage msg) {
  const auto& self = ev.dst;
  if (!msg.is_request()) return pcscf_response(self, std::move(msg));
  if (!msg.route_stack.empty()) {
    if (msg.kind == MessageKind::Invite && kind_of(ev.src) != NodeKind::Terminal) {
      charge_role(self, msg.call_id(), CdrRole::Terminating, msg.to_uri);
    }
    return loose_route(self, std::move(msg), true);
  }
  if (kind_of(ev.src) == NodeKind::Terminal) return pcscf_originating(self, std::move(msg), ev.src);
  respond(self, msg, 404, "UnknownDestination");
}

void Engine::pcscf_originating(const NodeId& self, SigMessage msg, const NodeId& terminal) {
  auto& p = pcscf_.at(self);
  const auto sid = msg.call_id();

  if (msg.kind == MessageKind::Register) {
    std::string home(host_of(msg.to_uri));
    auto icscf = first_of(NodeKind::Icscf, home.empty() ? p.state.domain : home);
    if (!icscf) return respond(self, msg, 404, "UnknownDestination");
    PcscfNode::Pending pending{terminal, {}, msg.has_header(hdr::kCompOffer)};
    if (msg.has_header(hdr::kAuth)) {
      pending.sa = self + "/sa" + std::to_string(++p.state.next_sa);
      msg.set_header(hdr::kSecAgree, pending.sa);
    }
    p.registering[sid] = pending;
    forward_request(self, *icscf, std::move(msg));
    return;
  }

  if (msg.has_header(hdr::kMrOp)) {
    cdr(self, sid, CdrEvent::MediaControl, to_string(msg.from_uri), CdrRole::Originating);
  } else if (is_session_request(msg)) {
    charge_role(self, sid, CdrRole::Originating, msg.from_uri);
  }
  if (!p.state.security_assocs.contains(terminal)) {
    return respond(self, msg, 403, "NoSecurityAssociation");
  }
  auto route = p.state.service_routes.find(to_string(msg.from_uri));
  if (route == p.state.service_routes.end()) return respond(self, msg, 403, "NotRegistered");
  const NodeId scscf = route->second;

  auto proceed = [this, self, scscf](SigMessage m) {
    if (m.kind == MessageKind::Invite) record_route(m, self);
    forward_request(self, scscf, std::move(m));
  };
  if (msg.kind == MessageKind::Invite && msg.body) {
    enforce(self, PepRole::Pcscf, msg, [this, self, msg, proceed](const PolicyDecision& d) {
      if (const auto* deny = std::get_if<policy_decision::Deny>(&d)) {
        return respond(self, msg, deny_code(deny->reason), to_string(deny->reason));
      }
      proceed(msg);
    });
    return;
  }
  proceed(std::move(msg));
}

void Engine::pcscf_response(const NodeId& self, SigMessage msg) {
  auto& p = pcscf_.at(self);
  if (msg.header_or(hdr::kCseq, "") == "REGISTER") {
    auto it = p.registering.find(msg.call_id());
    if (it != p.registering.end() && msg.code >= 200) {
      const auto& pending = it->second;
      if (msg.code == 200) {
        p.state.security_assocs[pending.terminal] = pending.sa;
        p.state.compression[pending.terminal] = pending.compression;
        const auto scscf = msg.header_or(hdr::kServiceRoute, "");
        for (const auto& id : csv(msg.header_or(hdr::kAssociated, ""))) {
          p.state.service_routes[id] = scscf;
        }
      } else if (msg.code == 403) {
        // The home network refused the user: tear down what this edge holds.
        p.state.security_assocs.erase(pending.terminal);
        p.state.compression.erase(pending.terminal);
        if (auto user = user_of(msg.to_uri)) {
          for (const auto& id : user_decl(*user).public_ids) p.state.service_routes.erase(to_string(id));
        }
      }
      if (msg.code != 401) p.registering.erase(it);
    }
  }
  forward_response(self, std::move(msg));
}

// I-CSCF ---------------------------------------------------------------------------

void Engine::on_icscf(const Event& ev, SigMessage msg) {
  const auto& self = ev.dst;
  auto& ic = icscf_.at(self);
  if (ic.thig_enabled && domain_of(ev.src) != ic.domain) msg = thig_strip(ic, std::move(msg));
  if (!msg.is_request()) return forward_response(self, std::move(msg));
  if (msg.kind == MessageKind::Register) return icscf_register(self, std::move(msg));
  if (!msg.route_stack.empty()) {
    if (msg.kind == MessageKind::Invite) {
      charge_role(self, msg.call_id(), CdrRole::Originating, msg.from_uri);
    }
    return loose_route(self, std::move(msg), ic.thig_enabled);
  }
  if (is_session_request(msg)) return icscf_terminating(self, std::move(msg));
  net.note(self, msg.call_id(), "no route for " + msg.kind_token());
}

void Engine::locate_hss(const NodeId& self, const std::string& sid, const Uri& public_id,
                        std::function<void(const NodeId&)> found, std::function<void()> unknown,
                        FailCont fail) {
  const auto hss_ids = all_hss();
  if (hss_ids.empty()) return unknown();
  if (hss_ids.size() == 1) return found(hss_ids.front());
  std::optional<NodeId> slf = first_of(NodeKind::Slf, domain_of(self));
  if (!slf) {
    for (const auto& n : sc.nodes) {
      if (n.kind == NodeKind::Slf) {
        slf = n.id;
        break;
      }
    }
  }
  if (!slf) {
    // No locator deployed: consult the table directly.
    if (auto h = slf_.find(public_id)) return found(*h);
    return unknown();
  }
  query(self, *slf, make_diameter(DiameterCommand::LocateHss, sid, {{"public", to_string(public_id)}}),
        [found, unknown](const DiameterMsg& ans) {
          if (ans.get("result") != "ok") return unknown();
          found(ans.get("hss"));
        },
        std::move(fail));
}

namespace {
std::vector<ScscfDescriptor> candidates_in(const std::map<NodeId, ScscfNode>& scscfs,
                                           const std::string& domain, Tick now) {
  std::vector<ScscfDescriptor> out;
  for (const auto& [id, s] : scscfs) {
    if (s.state.domain() == domain) out.push_back({id, s.state.capabilities(), s.state.binding_count(now)});
  }
  return out;
}
}  // namespace

void Engine::icscf_register(const NodeId& self, SigMessage msg) {
  const auto sid = msg.call_id();
  const Uri pub = msg.to_uri;
  auto timeout = [this, self, msg] { respond(self, msg, 408, "Timeout"); };
  locate_hss(
      self, sid, pub,
      [this, self, msg, sid, pub, timeout](const NodeId& hss) {
        query(self, hss,
              make_diameter(DiameterCommand::ScscfQuery, sid, {{"public", to_string(pub)}}),
              [this, self, msg](const DiameterMsg& ans) {
                if (ans.get("result") != "ok") return respond(self, msg, 403, ans.get("result"));
                std::optional<NodeId> existing;
                if (auto s = ans.get("scscf"); !s.empty()) existing = s;
                auto caps = csv(ans.get("caps"));
                std::set<std::string> required(caps.begin(), caps.end());
                NodeId chosen;
                try {
                  chosen = icscf_select_scscf(
                      existing, required, candidates_in(scscf_, icscf_.at(self).domain, net.now()));
                } catch (const Error&) {
                  return respond(self, msg, 503, "NoEligibleScscf");
                }
                forward_request(self, chosen, msg);
              },
              timeout);
      },
      [this, self, msg] { respond(self, msg, 403, "UnknownSubscriber"); }, timeout);
}

void Engine::icscf_terminating(const NodeId& self, SigMessage msg) {
  const auto sid = msg.call_id();
  const Uri pub = msg.to_uri;
  charge_role(self, sid, CdrRole::Terminating, pub);
  auto timeout = [this, self, msg] { respond(self, msg, 408, "Timeout"); };
  auto unknown = [this, self, msg] { respond(self, msg, 404, "UnknownDestination"); };
  locate_hss(
      self, sid, pub,
      [this, self, msg, sid, pub, timeout, unknown](const NodeId& hss) {
        query(self, hss,
              make_diameter(DiameterCommand::ScscfQuery, sid, {{"public", to_string(pub)}}),
              [this, self, msg, unknown](const DiameterMsg& ans) {
                if (ans.get("result") != "ok") return unknown();
                SigMessage out = msg;
                NodeId target = ans.get("scscf");
                if (target.empty()) {
                  auto caps = csv(ans.get("caps"));
                  try {
                    target = icscf_select_scscf(std::nullopt, {caps.begin(), caps.end()},
                                                candidates_in(scscf_, icscf_.at(self).domain, net.now()));
                  } catch (const Error&) {
                    return respond(self, msg, 503, "NoEligibleScscf");
                  }
                  out.set_header(hdr::kUnregTerm, "1");
                }
                if (icscf_.at(self).thig_enabled && out.kind == MessageKind::Invite) {
                  record_route(out, self);
                }
                forward_request(self, target, std::move(out));
              },
              timeout);
      },
      unknown, timeout);
}

// S-CSCF ---------------------------------------------------------------------------

void Engine::on_scscf(const Event& ev, SigMessage msg) {
  const auto& self = ev.dst;
  if (!msg.is_request()) return scscf_response(self, std::move(msg));
  if (msg.kind == MessageKind::Register) return scscf_register(self, std::move(msg));
  if (!msg.route_stack.empty()) return loose_route(self, std::move(msg), true);
  if (is_session_request(msg)) return scscf_session(self, ev.src, std::move(msg));
  net.note(self, msg.call_id(), "no route for " + msg.kind_token());
}

void Engine::scscf_response(const NodeId& self, SigMessage msg) { forward_response(self, std::move(msg)); }

void Engine::clear_registration(const NodeId& self, const std::string& sid, const Uri& public_id) {
  auto& s = scscf_.at(self).state;
  auto user = user_of(public_id);
  if (!user) return;
  bool had = false;
  for (const auto& id : user_decl(*user).public_ids) {
    if (s.binding_for(id, net.now())) had = true;
    s.unbind(id);
  }
  if (!had) return;
  send(self, hss_for(public_id),
       make_diameter(DiameterCommand::ScscfAssign, sid,
                     {{"public", to_string(public_id)}, {"scscf", self}, {"deassign", "1"}}));
}

void Engine::scscf_register(const NodeId& self, SigMessage msg) {
  auto& s = scscf_.at(self).state;
  const auto sid = msg.call_id();
  const Uri pub = msg.to_uri;
  const auto priv = msg.header_or(hdr::kPrivateId, "");
  NodeId hss;
  try {
    hss = hss_for(pub);
  } catch (const Error&) {
    return respond(self, msg, 403, "UnknownSubscriber");
  }
  auto timeout = [this, self, msg] { respond(self, msg, 408, "Timeout"); };

  if (!msg.has_header(hdr::kAuth)) {
    query(self, hss,
          make_diameter(DiameterCommand::AuthRequest, sid, {{"private", priv}, {"public", to_string(pub)}}),
          [this, self, msg, priv](const DiameterMsg& ans) {
            if (ans.get("result") != "ok") return respond(self, msg, 403, ans.get("result"));
            scscf_.at(self).state.pending_auth[priv] = AuthVector{ans.get("nonce"), ans.get("xres")};
            net_auth_[{self, priv}] = ans.get("netauth");
            auto nonce = ans.get("nonce");
            respond(self, msg, 401, {}, [&](SigMessage& r) { r.set_header(hdr::kNonce, nonce); });
          },
          timeout);
    return;
  }

  auto vec = s.pending_auth.find(priv);
  const bool ok = vec != s.pending_auth.end() && vec->second.expected_response == msg.header_or(hdr::kAuth, "");
  if (vec != s.pending_auth.end()) s.pending_auth.erase(vec);
  if (!ok) {
    clear_registration(self, sid, pub);
    return respond(self, msg, 403, "AuthFailed");
  }

  query(
      self, hss, make_diameter(DiameterCommand::ProfileQuery, sid, {{"public", to_string(pub)}}),
      [this, self, msg, sid, pub, priv, hss, timeout](const DiameterMsg& ans) {
        if (ans.get("result") != "ok") {
          clear_registration(self, sid, pub);
          return respond(self, msg, 403, ans.get("result"));
        }
        std::optional<NodeId> pcscf;
        if (msg.via_stack.size() >= 2 && kind_of(msg.via_stack[1]) == NodeKind::Pcscf) {
          pcscf = msg.via_stack[1];
        }
        const bool premises = pcscf && pcscf_.at(*pcscf).state.premises;
        query(self, hss,
              make_diameter(DiameterCommand::ScscfAssign, sid,
                            {{"public", to_string(pub)},
                             {"scscf", self},
                             {"tag", premises ? "home" : "general"}}),
              [this, self, msg, pub, priv, hss, pcscf](const DiameterMsg&) {
                const auto& profile = hss_.at(hss).profile_for(pub);
                auto ids = implicit_set(profile.identity, pub);
                const Tick now = net.now();
                scscf_.at(self).state.bind(profile, ids, msg.header_or(hdr::kContact, ""),
                                           pcscf.value_or(""), now, now + sc.lifetime,
                                           msg.header_or(hdr::kSecAgree, ""),
                                           msg.has_header(hdr::kCompOffer));
                std::vector<std::string> names;
                for (const auto& id : ids) names.push_back(to_string(id));
                auto net_auth = net_auth_[{self, priv}];
                respond(self, msg, 200, {}, [&](SigMessage& r) {
                  r.set_header(hdr::kNetAuth, net_auth);
                  r.set_header(hdr::kServiceRoute, self);
                  r.set_header(hdr::kAssociated, join(names));
                  if (auto sa = msg.header(hdr::kSecAgree)) r.set_header(hdr::kSecAgree, *sa);
                });
              },
              timeout);
      },
      timeout);
}

RoutingEnv Engine::routing_env(const NodeId& scscf) const {
  RoutingEnv env;
  env.local_domain = domain_of(scscf);
  for (const auto& n : sc.nodes) {
    if (n.kind == NodeKind::Icscf) env.ims_domains.insert(n.domain);
    if (n.kind == NodeKind::ExtSip) env.external_hosts.insert(n.host.value_or(n.domain));
  }
  env.enum_registry = &enum_;
  env.force_icscf = sc.force_icscf;
  env.now = net.now();
  return env;
}

void Engine::enforce(const NodeId& self, PepRole role, const SigMessage& msg,
                     std::function<void(const PolicyDecision&)> done) {
  const auto& sdp = *msg.body;
  auto pdp = first_of(NodeKind::Pdp, domain_of(self));
  if (!pdp) return done(policy_decision::Permit{dscp_for(sdp)});
  const auto& cache = role == PepRole::Pcscf ? pcscf_.at(self).pep : scscf_.at(self).pep;
  if (cache.provisioned) return done(pep_enforce(role, sdp, msg.from_uri, cache, nullptr));
  CopsMsg req{CopsKind::Request, msg.call_id(), role, {}, sdp, msg.from_uri, std::nullopt};
  if (!send(self, *pdp, std::move(req))) {
    return done(policy_decision::Deny{DenyReason::PdpUnreachable});
  }
  cops_wait_[{self, msg.call_id()}] = std::move(done);
}

void Engine::scscf_session(const NodeId& self, const NodeId& src, SigMessage msg) {
  auto& s = scscf_.at(self).state;
  const auto sid = msg.call_id();
  const auto src_kind = kind_of(src);

  if (src_kind == NodeKind::As) {
    if (msg.has_header(hdr::kIscTerm)) return scscf_terminating(self, std::move(msg));
    if (msg.has_header(hdr::kIscOrig)) return scscf_originating(self, std::move(msg));
    // Request originated by the AS on behalf of the user; the user may not be
    // registered and originating services are not re-run for it.
    msg.set_header(hdr::kAsOnBehalf, "1");
    msg.set_header(hdr::kIscOrig, "-");
    charge_role(self, sid, CdrRole::Originating, msg.from_uri);
    return scscf_originating(self, std::move(msg));
  }

  if (src_kind == NodeKind::Pcscf) {
    if (msg.has_header(hdr::kMrOp)) {
      cdr(self, sid, CdrEvent::MediaControl, to_string(msg.from_uri), CdrRole::Originating);
      if (!s.is_registered(msg.from_uri, net.now())) return respond(self, msg, 403, "NotRegistered");
      auto mrfc = first_of(NodeKind::Mrfc, s.domain());
      if (!mrfc) return respond(self, msg, 404, "UnknownDestination");
      return scscf_forward(self, *mrfc, std::move(msg));
    }
    charge_role(self, sid, CdrRole::Originating, msg.from_uri);
    if (!s.is_registered(msg.from_uri, net.now())) return respond(self, msg, 403, "NotRegistered");
    auto start = [this, self](SigMessage m) {
      const auto* caller = scscf_.at(self).state.profile_for(m.from_uri);
      std::vector<NodeId> chain;
      if (caller) chain = ifc_match(*caller, m, Direction::Originating);
      m.set_header(hdr::kIscOrig, join(chain));
      scscf_originating(self, std::move(m));
    };
    if (msg.kind == MessageKind::Invite && msg.body) {
      enforce(self, PepRole::Scscf, msg, [this, self, msg, start](const PolicyDecision& d) {
        if (const auto* deny = std::get_if<policy_decision::Deny>(&d)) {
          return respond(self, msg, deny_code(deny->reason), to_string(deny->reason));
        }
        SigMessage m = msg;
        m.set_header(hdr::kDscp, std::to_string(std::get<policy_decision::Permit>(d).dscp.code));
        start(std::move(m));
      });
      return;
    }
    return start(std::move(msg));
  }

  // Terminating side, entered from an I-CSCF.
  charge_role(self, sid, CdrRole::Terminating, msg.to_uri);
  auto start = [this, self](SigMessage m) {
    const auto* callee = scscf_.at(self).state.profile_for(m.to_uri);
    m.set_header(hdr::kIscTerm, join(ifc_match(*callee, m, Direction::Terminating)));
    scscf_terminating(self, std::move(m));
  };
  if (s.profile_for(msg.to_uri)) return start(std::move(msg));

  NodeId hss;
  try {
    hss = hss_for(msg.to_uri);
  } catch (const Error&) {
    return respond(self, msg, 404, "UnknownDestination");
  }
  query(self, hss, make_diameter(DiameterCommand::ProfileQuery, sid, {{"public", to_string(msg.to_uri)}}),
        [this, self, msg, hss, start](const DiameterMsg& ans) {
          auto result = ans.get("result");
          if (result == "Barred") return respond(self, msg, 403, "Barred");
          if (result != "ok") return respond(self, msg, 404, "UnknownDestination");
          scscf_.at(self).state.cache_profile(hss_.at(hss).profile_for(msg.to_uri));
          start(msg);
        },
        [this, self, msg] { respond(self, msg, 408, "Timeout"); });
}

bool Engine::scscf_next_as(const NodeId& self, SigMessage& msg, std::string_view chain_header) {
  while (true) {
    auto chain = csv(msg.header_or(chain_header, "-"));
    if (chain.empty()) return false;
    const NodeId as = chain.front();
    chain.erase(chain.begin());
    msg.set_header(chain_header, join(chain));
    SigMessage out = msg;
    out.route_stack = {self};
    out.via_stack.push_back(self);
    if (send_sig(self, as, std::move(out))) return true;
    net.note(self, msg.call_id(), "AS-UNREACHABLE " + as);
  }
}

void Engine::scscf_originating(const NodeId& self, SigMessage msg) {
  if (scscf_next_as(self, msg, hdr::kIscOrig)) return;
  auto d = route_originating(scscf_.at(self).state, routing_env(self), msg);
  scscf_dispatch(self, std::move(msg), d);
}

void Engine::scscf_terminating(const NodeId& self, SigMessage msg) {
  if (scscf_next_as(self, msg, hdr::kIscTerm)) return;
  const auto& s = scscf_.at(self).state;
  RoutingDecision d;
  if (s.profile_for(msg.to_uri)) {
    d = route_terminating(s, routing_env(self), msg);
  } else {
    // Retargeted away from this S-CSCF's users: route as a fresh request
    // without re-running originating services.
    if (!msg.has_header(hdr::kIscOrig)) msg.set_header(hdr::kIscOrig, "-");
    d = route_originating(s, routing_env(self), msg);
  }
  scscf_dispatch(self, std::move(msg), d);
}

void Engine::scscf_dispatch(const NodeId& self, SigMessage msg, const RoutingDecision& d) {
  if (d.rewritten_to) msg.to_uri = *d.rewritten_to;
  const auto& domain = scscf_.at(self).state.domain();
  const auto sid = msg.call_id();
  net.note(self, sid, "ROUTE " + describe(d));
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, route::ToAsChain>) {
          charge_role(self, sid, CdrRole::Terminating, msg.to_uri);
          msg.set_header(hdr::kIscTerm, join(a.as_ids));
          scscf_terminating(self, std::move(msg));
        } else if constexpr (std::is_same_v<T, route::ToIcscf>) {
          auto target = first_of(NodeKind::Icscf, a.domain);
          if (!target) return respond(self, msg, 404, "UnknownDestination");
          NodeId dst = *target;
          auto local = first_of(NodeKind::Icscf, domain);
          if (a.domain != domain && local && icscf_.at(*local).thig_enabled) {
            msg.route_stack = {*target};
            dst = *local;
          }
          scscf_forward(self, dst, std::move(msg));
        } else if constexpr (std::is_same_v<T, route::ToPcscf>) {
          charge_role(self, sid, CdrRole::Terminating, msg.to_uri);
          msg.route_stack = {a.terminal};
          scscf_forward(self, a.pcscf, std::move(msg));
        } else if constexpr (std::is_same_v<T, route::ToBgcf>) {
          auto bgcf = first_of(NodeKind::Bgcf, domain);
          if (!bgcf) return respond(self, msg, 404, "UnknownDestination");
          scscf_forward(self, *bgcf, std::move(msg));
        } else if constexpr (std::is_same_v<T, route::ToExternalSip>) {
          std::optional<NodeId> server;
          for (const auto& n : sc.nodes) {
            if (n.kind == NodeKind::ExtSip && n.host.value_or(n.domain) == a.host) {
              server = n.id;
              break;
            }
          }
          if (!server) return respond(self, msg, 404, "UnknownDestination");
          scscf_forward(self, *server, std::move(msg));
        } else {
          const int code = a.reason == RejectReason::UnknownDestination ? 404 : 480;
          respond(self, msg, code, to_string(a.reason));
        }
      },
      d.action);
}

void Engine::scscf_forward(const NodeId& self, const NodeId& dst, SigMessage msg) {
  msg.remove_header(hdr::kIscOrig);
  msg.remove_header(hdr::kIscTerm);
  if (msg.kind == MessageKind::Invite) record_route(msg, self);
  forward_request(self, dst, std::move(msg));
}

// HSS / SLF ------------------------------------------------------------------------

void Engine::on_hss(const Event& ev, const DiameterMsg& req) {
  const auto& self = ev.dst;
  auto& hss = hss_.at(self);
  const auto sid = req.session_id;
  auto answer = [&](DiameterCommand cmd, std::map<std::string, std::string> payload) {
    send(self, ev.src, make_diameter(cmd, sid, std::move(payload)));
  };
  std::optional<Uri> pub;
  if (auto text = req.get("public"); !text.empty()) pub = parse_uri(text);
  const bool known = pub && hss.has_public(*pub);

  switch (req.command) {
    case DiameterCommand::AuthRequest: {
      const auto priv = req.get("private");
      if (!hss.has_private(priv) || !known || hss.profile_for(*pub).identity.private_id != priv) {
        return answer(DiameterCommand::AuthAnswer, {{"result", "UnknownSubscriber"}});
      }
      auto v = hss.fetch_auth_vectors(priv, 1).front();
      const auto& secret = hss.profile_for(*pub).identity.shared_secret;
      return answer(DiameterCommand::AuthAnswer, {{"result", "ok"},
                                                  {"nonce", v.nonce},
                                                  {"xres", v.expected_response},
                                                  {"netauth", network_auth_token(v.nonce, secret)}});
    }
    case DiameterCommand::ScscfQuery: {
      if (!known) return answer(DiameterCommand::ScscfQuery, {{"answer", "1"}, {"result", "UnknownSubscriber"}});
      const auto& profile = hss.profile_for(*pub);
      std::vector<std::string> caps(profile.required_capabilities.begin(), profile.required_capabilities.end());
      return answer(DiameterCommand::ScscfQuery, {{"answer", "1"},
                                                  {"result", "ok"},
                                                  {"scscf", hss.query_scscf(*pub, net.now()).value_or("")},
                                                  {"caps", join(caps, "")}});
    }
    case DiameterCommand::ProfileQuery: {
      if (!known) return answer(DiameterCommand::ProfileAnswer, {{"result", "UnknownSubscriber"}});
      try {
        hss.download_profile(*pub, net.now());
      } catch (const Error& e) {
        return answer(DiameterCommand::ProfileAnswer, {{"result", std::string(to_string(e.code()))}});
      }
      // The profile itself is handed over by reference to this HSS's record.
      return answer(DiameterCommand::ProfileAnswer, {{"result", "ok"}, {"profile", self}});
    }
    case DiameterCommand::ScscfAssign: {
      if (!known) return answer(DiameterCommand::ScscfAssign, {{"answer", "1"}, {"result", "UnknownSubscriber"}});
      if (req.get("deassign") == "1") {
        hss.deassign_scscf(*pub);
      } else {
        hss.assign_scscf(*pub, req.get("scscf"), net.now());
        hss.set_profile_tag(*pub, req.get("tag", "general"));
      }
      return answer(DiameterCommand::ScscfAssign, {{"answer", "1"}, {"result", "ok"}});
    }
    case DiameterCommand::AsDataQuery: {
      if (!known) return answer(DiameterCommand::AsDataAnswer, {{"result", "UnknownSubscriber"}});
      const auto& profile = hss.profile_for(*pub);
      std::map<std::string, std::string> payload{{"result", "ok"}, {"tag", profile.active_profile_tag}};
      if (hss.query_scscf(*pub, net.now())) payload["contact"] = to_string(profile.identity.public_ids.front());
      return answer(DiameterCommand::AsDataAnswer, std::move(payload));
    }
    default:
      net.note(self, sid, "unexpected " + std::string(to_string(req.command)));
  }
}

void Engine::on_slf(const Event& ev, const DiameterMsg& req) {
  if (req.command != DiameterCommand::LocateHss) return;
  std::map<std::string, std::string> payload{{"result", "UnknownSubscriber"}};
  if (auto text = req.get("public"); !text.empty()) {
    if (auto h = slf_.find(parse_uri(text))) payload = {{"result", "ok"}, {"hss", *h}};
  }
  send(ev.dst, ev.src, make_diameter(DiameterCommand::LocateAnswer, req.session_id, std::move(payload)));
}

}  // namespace ims
