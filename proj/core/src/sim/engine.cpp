#include "sim/engine.hpp"

#include <algorithm>

#include "ims/error.hpp"

namespace ims {

namespace {

std::optional<ChargingNodeType> charging_type(NodeKind k) {
  switch (k) {
    case NodeKind::Pcscf: return ChargingNodeType::Pcscf;
    case NodeKind::Icscf: return ChargingNodeType::Icscf;
    case NodeKind::Scscf: return ChargingNodeType::Scscf;
    case NodeKind::Bgcf: return ChargingNodeType::Bgcf;
    case NodeKind::Mrfc: return ChargingNodeType::Mrfc;
    case NodeKind::As: return ChargingNodeType::As;
    default: return std::nullopt;
  }
}

const std::set<MediaKind> kAllMedia = {MediaKind::Audio, MediaKind::Video, MediaKind::Data};

}  // namespace

Engine::Engine(const Scenario& scenario, std::uint64_t seed) : sc(scenario), net(seed) {
  build();
  bootstrap_policy();
}

void Engine::build() {
  for (const auto& n : sc.nodes) {
    net.add_node(n.id);
    decl_[n.id] = &n;
    switch (n.kind) {
      case NodeKind::Pcscf: {
        PcscfNode p;
        p.state.id = n.id;
        p.state.domain = n.domain;
        p.state.premises = n.premises;
        for (const auto& [terminal, pcscf] : sc.terminal_pcscf) {
          if (pcscf == n.id) p.state.served_terminals.insert(terminal);
        }
        pcscf_.emplace(n.id, std::move(p));
        break;
      }
      case NodeKind::Icscf:
        icscf_.emplace(n.id, IcscfState{n.id, n.domain, n.thig, keyed_digest(n.id, "thig"), {}});
        break;
      case NodeKind::Scscf:
        scscf_.emplace(n.id, ScscfNode{ScscfState(n.id, n.domain, n.caps), {}});
        break;
      case NodeKind::Hss:
        hss_.emplace(n.id, Hss(n.id, sc.lifetime));
        break;
      case NodeKind::As:
        as_dir_.add(AsNode{n.id, n.as_kind, n.as_mode, PassThroughService{}});
        break;
      case NodeKind::Bgcf: {
        BreakoutTable table;
        for (const auto& b : sc.breakouts) {
          if (b.at && *b.at != n.id) continue;
          if (b.prefix) table.add(*b.prefix, b.target);
          else table.set_default(b.target);
        }
        breakout_.emplace(n.id, std::move(table));
        break;
      }
      case NodeKind::Mgcf:
        mgcf_[n.id].family = n.family;
        break;
      case NodeKind::Mrfc:
        mrfc_[n.id];
        break;
      case NodeKind::Mrfp:
        mrfp_[n.id];
        break;
      case NodeKind::Pdp:
        pdp_.emplace(n.id, Pdp(n.id));
        break;
      default:
        break;
    }
  }
  net.set_default_latency(sc.default_latency);
  for (const auto& l : sc.links) net.add_link(l.a, l.b, l.latency);

  auto hss_ids = all_hss();
  for (const auto& u : sc.users) {
    auto identity = make_identity(u.private_id, u.public_ids, u.secret);
    NodeId home;
    if (u.hss) home = *u.hss;
    else if (auto h = first_of(NodeKind::Hss, identity.home_domain)) home = *h;
    else if (!hss_ids.empty()) home = hss_ids.front();
    else continue;  // nothing to provision into

    UserProfile profile;
    profile.identity = identity;
    profile.subscribed_media = u.media;
    profile.barred = u.barred;
    profile.cs_forward = u.cs_forward;
    profile.required_capabilities = u.require;
    for (const auto& i : sc.ifcs) {
      if (i.user == u.name) add_ifc(profile, i.ifc);
    }
    hss_.at(home).add_user(std::move(profile));
    if (hss_ids.size() > 1) {
      for (const auto& p : u.public_ids) slf_.map(p, home);
    }
  }

  for (const auto& s : sc.screens) {
    as_dir_.find(s.as)->service = ScreeningConfig{primary_id(s.owner), s.allow, s.target, s.deflect};
  }
  for (const auto& r : sc.routings) {
    as_dir_.find(r.as)->service = RoutingConfig{primary_id(r.owner), r.source};
  }

  if (sc.enum_apex) enum_.set_apex(*sc.enum_apex);
  for (const auto& e : sc.enums) enum_.enum_register(e.tel, e.target);

  std::vector<PolicyRule> rules;
  for (const auto& u : sc.users) {
    if (u.media == kAllMedia) continue;
    for (const auto& p : u.public_ids) {
      rules.push_back(PolicyRule{PolicyScope::UserSpecific, p, u.media, std::nullopt, std::nullopt});
    }
  }
  for (const auto& p : sc.policies) {
    if (!p.user) {
      rules.push_back(p.rule);
      continue;
    }
    for (const auto& id : user_decl(*p.user).public_ids) {
      PolicyRule r = p.rule;
      r.scope = PolicyScope::UserSpecific;
      r.user = id;
      rules.push_back(std::move(r));
    }
  }
  for (auto& [id, pdp] : pdp_) {
    for (const auto& r : rules) pdp.add_rule(r);
  }
}

void Engine::bootstrap_policy() {
  if (!sc.policy_provision) return;
  for (const auto& n : sc.nodes) {
    if (n.kind != NodeKind::Pdp || first_of(NodeKind::Pdp, n.domain) != n.id) continue;
    const auto& pdp = pdp_.at(n.id);
    for (const auto& pep : sc.nodes) {
      if (pep.domain != n.domain) continue;
      if (pep.kind != NodeKind::Pcscf && pep.kind != NodeKind::Scscf) continue;
      auto role = pep.kind == NodeKind::Pcscf ? PepRole::Pcscf : PepRole::Scscf;
      CopsMsg msg{CopsKind::Provision, "prov-" + pep.id, role, pdp.provisioned_set(role),
                  std::nullopt, std::nullopt, std::nullopt};
      send(n.id, pep.id, std::move(msg));
    }
  }
  run();
}

void Engine::run() {
  net.run_until_quiescent(sc.tick_budget, [this](const Event& ev) { dispatch(ev); });
}

void Engine::dispatch(const Event& ev) {
  try {
    const auto kind = kind_of(ev.dst);
    if (const auto* sig = std::get_if<SigMessage>(&ev.payload)) {
      SigMessage msg = sig->compressed() ? decompress(*sig) : *sig;
      switch (kind) {
        case NodeKind::Pcscf: return on_pcscf(ev, std::move(msg));
        case NodeKind::Icscf: return on_icscf(ev, std::move(msg));
        case NodeKind::Scscf: return on_scscf(ev, std::move(msg));
        case NodeKind::As: return on_as(ev);
        case NodeKind::Bgcf: return on_bgcf(ev, std::move(msg));
        case NodeKind::Mgcf: return on_mgcf(ev);
        case NodeKind::Mrfc: return on_mrfc(ev, std::move(msg));
        case NodeKind::Mrfp: return on_mrfp(ev, msg);
        case NodeKind::Terminal:
        case NodeKind::ExtSip: return on_ua(ev, std::move(msg));
        default: break;
      }
    } else if (const auto* dia = std::get_if<DiameterMsg>(&ev.payload)) {
      if (is_answer(dia->command) || dia->get("answer") == "1") return on_diameter_answer(ev.dst, *dia);
      if (kind == NodeKind::Hss) return on_hss(ev, *dia);
      if (kind == NodeKind::Slf) return on_slf(ev, *dia);
    } else if (const auto* frame = std::get_if<SgwFrame>(&ev.payload)) {
      if (kind == NodeKind::Sgw) return on_sgw(ev, *frame);
      if (kind == NodeKind::Pstn) return on_pstn(ev, *frame);
      if (kind == NodeKind::Mgcf) return on_mgcf(ev);
    } else if (const auto* gc = std::get_if<GatewayControl>(&ev.payload)) {
      if (kind == NodeKind::Mgw) {
        auto& contexts = mgw_contexts_[ev.dst];
        if (gc->adaptation) contexts[gc->call_ref] = *gc->adaptation;
        else contexts.erase(gc->call_ref);
        return;
      }
    } else if (const auto* cops = std::get_if<CopsMsg>(&ev.payload)) {
      if (kind == NodeKind::Pdp) return on_pdp(ev, *cops);
      if (cops->kind == CopsKind::Provision) {
        PepCache cache{cops->rules, net.now(), true};
        if (kind == NodeKind::Pcscf) pcscf_.at(ev.dst).pep = std::move(cache);
        else if (kind == NodeKind::Scscf) scscf_.at(ev.dst).pep = std::move(cache);
        return;
      }
      if (cops->kind == CopsKind::Decision) {
        auto it = cops_wait_.find({ev.dst, cops->session_id});
        if (it == cops_wait_.end()) return;
        auto done = std::move(it->second);
        cops_wait_.erase(it);
        return done(cops->decision.value_or(PolicyDecision{policy_decision::Deny{DenyReason::PdpUnreachable}}));
      }
    } else if (std::holds_alternative<UtRequest>(ev.payload)) {
      if (kind == NodeKind::As) return on_as(ev);
      const auto& ut = std::get<UtRequest>(ev.payload);
      auto it = pending_ua_.find(ut.request_id);
      if (ut.result && it != pending_ua_.end()) {
        auto* as_decl = decl_.at(ev.src);
        ut_results.push_back({it->second.user, as_decl->id, *ut.result});
        if (*ut.result != "ok") rejection_log.push_back(*ut.result);
        pending_ua_.erase(it);
      }
      return;
    } else if (std::holds_alternative<MediaFlow>(ev.payload)) {
      return;  // bearer traffic terminates at the endpoint
    }
    net.note(ev.dst, session_of(ev.payload), "UNHANDLED " + kind_label(ev.payload));
  } catch (const Error& e) {
    errors.push_back(ev.dst + ": " + e.what());
    net.note(ev.dst, session_of(ev.payload), std::string("ERROR ") + e.what());
  }
}

// Lookups ---------------------------------------------------------------------

NodeKind Engine::kind_of(const NodeId& id) const {
  auto it = decl_.find(id);
  if (it == decl_.end()) throw Error(Errc::UnknownNode, "unknown node " + id);
  return it->second->kind;
}

const std::string& Engine::domain_of(const NodeId& id) const {
  auto it = decl_.find(id);
  if (it == decl_.end()) throw Error(Errc::UnknownNode, "unknown node " + id);
  return it->second->domain;
}

std::optional<NodeId> Engine::first_of(NodeKind kind, const std::string& domain) const {
  if (const auto* n = sc.first_of(kind, domain)) return n->id;
  return std::nullopt;
}

const UserDecl& Engine::user_decl(const std::string& name) const {
  const auto* u = sc.user(name);
  if (!u) throw Error(Errc::UnresolvedReference, "unknown user " + name);
  return *u;
}

Uri Engine::primary_id(const std::string& user) const { return user_decl(user).public_ids.front(); }

std::optional<std::string> Engine::user_of(const Uri& public_id) const {
  for (const auto& u : sc.users) {
    if (std::find(u.public_ids.begin(), u.public_ids.end(), public_id) != u.public_ids.end()) {
      return u.name;
    }
  }
  return std::nullopt;
}

std::vector<NodeId> Engine::all_hss() const {
  std::vector<NodeId> out;
  for (const auto& n : sc.nodes) {
    if (n.kind == NodeKind::Hss) out.push_back(n.id);
  }
  return out;
}

NodeId Engine::hss_for(const Uri& public_id) const {
  auto ids = all_hss();
  if (ids.empty()) throw Error(Errc::UnknownSubscriber, "no HSS deployed");
  if (ids.size() == 1) return ids.front();
  if (auto found = slf_.find(public_id)) return *found;
  throw Error(Errc::UnknownSubscriber, "no HSS holds " + to_string(public_id));
}

std::set<NodeId> Engine::domain_nodes(const std::string& domain) const {
  std::set<NodeId> out;
  for (const auto& n : sc.nodes) {
    if (n.domain == domain) out.insert(n.id);
  }
  return out;
}

NodeId Engine::terminal_for(const std::string& user, const std::optional<NodeId>& requested) const {
  if (requested) return *requested;
  if (auto it = last_terminal_.find(user); it != last_terminal_.end()) return it->second;
  auto home = make_identity(user_decl(user).private_id, user_decl(user).public_ids, "x").home_domain;
  const NodeDecl* fallback = nullptr;
  for (const auto& n : sc.nodes) {
    if (n.kind != NodeKind::Terminal || !sc.terminal_pcscf.contains(n.id)) continue;
    if (n.domain == home) return n.id;
    if (!fallback) fallback = &n;
  }
  if (fallback) return fallback->id;
  throw Error(Errc::UnknownNode, "no terminal available for user " + user);
}

// Transport helpers -------------------------------------------------------------

bool Engine::send(const NodeId& src, const NodeId& dst, Payload payload) {
  return net.schedule(src, dst, std::move(payload));
}

bool Engine::send_sig(const NodeId& src, const NodeId& dst, SigMessage msg) {
  const auto src_kind = kind_of(src);
  const auto dst_kind = kind_of(dst);
  if (src_kind == NodeKind::Icscf) {
    auto& ic = icscf_.at(src);
    if (ic.thig_enabled && domain_of(dst) != ic.domain) {
      msg = thig_apply(ic, domain_nodes(ic.domain), std::move(msg));
    }
  }
  bool comp = false;
  if (src_kind == NodeKind::Terminal && dst_kind == NodeKind::Pcscf) {
    auto it = ua_compression_.find(src);
    comp = it != ua_compression_.end() && it->second;
  } else if (src_kind == NodeKind::Pcscf && dst_kind == NodeKind::Terminal) {
    const auto& c = pcscf_.at(src).state.compression;
    auto it = c.find(dst);
    comp = it != c.end() && it->second;
  }
  if (comp && !msg.compressed()) msg = compress(msg);
  return send(src, dst, std::move(msg));
}

bool Engine::forward_request(const NodeId& self, const NodeId& dst, SigMessage msg) {
  SigMessage received = msg;
  msg.via_stack.push_back(self);
  if (send_sig(self, dst, std::move(msg))) return true;
  if (received.kind != MessageKind::Ack) respond(self, received, 408, "Timeout");
  return false;
}

void Engine::respond(const NodeId& self, const SigMessage& req, int code, std::string_view reason,
                     const std::function<void(SigMessage&)>& decorate) {
  SigMessage resp = make_response(req, code, reason);
  if (decorate) decorate(resp);
  charge_final(self, resp);
  if (resp.via_stack.empty()) return;
  const NodeId next = resp.via_stack.back();
  send_sig(self, next, std::move(resp));
}

void Engine::forward_response(const NodeId& self, SigMessage resp) {
  if (resp.via_stack.empty() || resp.via_stack.back() != self) {
    throw Error(Errc::InvalidTransition, "response not addressed to " + self);
  }
  resp.via_stack.pop_back();
  charge_final(self, resp);
  if (resp.via_stack.empty()) return;
  auto next = resp.via_stack.back();
  send_sig(self, next, std::move(resp));
}

void Engine::loose_route(const NodeId& self, SigMessage msg, bool record) {
  if (msg.route_stack.empty()) throw Error(Errc::InvalidTransition, "no route to follow");
  auto next = msg.route_stack.front();
  msg.route_stack.erase(msg.route_stack.begin());
  if (record && msg.kind == MessageKind::Invite) record_route(msg, self);
  forward_request(self, next, std::move(msg));
}

void Engine::query(const NodeId& self, const NodeId& server, DiameterMsg req,
                   DiameterCont on_answer, FailCont on_fail) {
  std::pair<NodeId, std::string> key{self, req.session_id + "|" + std::string(to_string(req.interface))};
  if (!send(self, server, std::move(req))) return on_fail();
  diameter_wait_[key] = {std::move(on_answer), std::move(on_fail)};
}

void Engine::on_diameter_answer(const NodeId& self, const DiameterMsg& ans) {
  auto it = diameter_wait_.find({self, ans.session_id + "|" + std::string(to_string(ans.interface))});
  if (it == diameter_wait_.end()) return;
  auto cont = std::move(it->second.first);
  diameter_wait_.erase(it);
  cont(ans);
}

// Charging -----------------------------------------------------------------------

bool Engine::charging_capable(const NodeId& id) const {
  return charging_type(kind_of(id)).has_value();
}

void Engine::cdr(const NodeId& node, const std::string& sid, CdrEvent ev, const std::string& user,
                 CdrRole role, bool on_behalf) {
  auto type = charging_type(kind_of(node));
  if (!type) return;
  log.append(Cdr{net.now(), node, *type, sid, ev, user, role, on_behalf});
}

void Engine::charge_role(const NodeId& node, const std::string& sid, CdrRole role, const Uri& user) {
  if (!charging_capable(node)) return;
  // One served user per role: a retargeted request keeps the user it entered with.
  auto& leg = legs_[{node, sid}];
  bool have = std::any_of(leg.roles.begin(), leg.roles.end(),
                          [&](const auto& r) { return r.first == role; });
  if (!have) leg.roles.emplace_back(role, to_string(user));
}

void Engine::charge_final(const NodeId& node, const SigMessage& resp) {
  if (resp.code < 200 || !charging_capable(node)) return;
  const auto sid = resp.call_id();
  const auto cseq = resp.header_or(hdr::kCseq, "");
  if (cseq == "REGISTER") {
    if (resp.code == 200) cdr(node, sid, CdrEvent::Register, to_string(resp.to_uri), CdrRole::None);
    return;
  }
  auto it = legs_.find({node, sid});
  if (it == legs_.end()) return;
  auto& leg = it->second;
  auto emit = [&](CdrEvent ev) {
    for (const auto& [role, user] : leg.roles) cdr(node, sid, ev, user, role);
  };
  const bool ok = resp.code < 300;
  if (cseq == "INVITE" || cseq == "MESSAGE") {
    if (ok && !leg.started && !leg.ended) {
      leg.started = true;
      emit(CdrEvent::SessionStart);
    } else if (!ok && !leg.ended) {
      leg.ended = true;
      emit(CdrEvent::SessionEnd);
    }
  } else if (cseq == "BYE" && ok && leg.started && !leg.ended) {
    leg.ended = true;
    emit(CdrEvent::SessionEnd);
  }
}

void Engine::reject(const std::string& reason) { rejection_log.push_back(reason); }

// Actions ------------------------------------------------------------------------

void Engine::execute(const Action& action) {
  std::visit([this](const auto& a) { act(a); }, action.body);
}

RegistrationRecord Engine::register_user(const std::string& user, const NodeId& terminal,
                                         std::optional<std::string> secret) {
  act(action::Register{user, terminal, std::move(secret)});
  return registrations.back();
}

void Engine::act(const action::Register& a) {
  start_register(a.user, a.terminal, a.secret.value_or(user_decl(a.user).secret));
  run();
  finish_registrations();
}

void Engine::start_register(const std::string& user, const NodeId& terminal, const std::string& secret) {
  const std::string sid = "reg-" + std::to_string(++next_register_);
  registrations.push_back(RegistrationRecord{user, terminal, sid, RegistrationStatus::Timeout, {}, std::nullopt});
  if (!sc.terminal_pcscf.contains(terminal)) {
    auto& rec = registrations.back();
    rec.status = RegistrationStatus::NoPcscfConfigured;
    rec.reason = "NoPcscfConfigured";
    reject(rec.reason);
    net.note(terminal, sid, "REGISTER NoPcscfConfigured");
    return;
  }
  pending_reg_[sid] = PendingRegistration{user, terminal, secret, {}, 0, registrations.size() - 1};
  send_register(sid);
}

void Engine::send_register(const std::string& sid) {
  auto& p = pending_reg_.at(sid);
  const auto id = primary_id(p.user);
  SigMessage msg = make_request(MessageKind::Register, ++p.attempts, id, id, sid);
  msg.set_header(hdr::kPrivateId, user_decl(p.user).private_id);
  msg.set_header(hdr::kContact, p.terminal);
  msg.set_header(hdr::kCompOffer, "sigcomp");
  if (!p.nonce.empty()) msg.set_header(hdr::kAuth, keyed_digest(p.nonce, p.secret));
  msg.via_stack.push_back(p.terminal);
  send_sig(p.terminal, pcscf_discover(p.terminal, sc.terminal_pcscf), std::move(msg));
}

void Engine::finish_registrations() {
  for (auto& [sid, p] : pending_reg_) {
    auto& rec = registrations.at(p.record);
    rec.status = RegistrationStatus::Timeout;
    rec.reason = "Timeout";
    reject(rec.reason);
    rollback_registration(p, sid);
  }
  pending_reg_.clear();
}

void Engine::rollback_registration(const PendingRegistration& p, const std::string& sid) {
  bool touched = false;
  const auto& ids = user_decl(p.user).public_ids;
  if (auto pc = sc.terminal_pcscf.find(p.terminal); pc != sc.terminal_pcscf.end()) {
    auto& st = pcscf_.at(pc->second).state;
    touched |= st.security_assocs.erase(p.terminal) > 0;
    st.compression.erase(p.terminal);
    for (const auto& id : ids) touched |= st.service_routes.erase(to_string(id)) > 0;
  }
  for (auto& [_, s] : scscf_) {
    for (const auto& id : ids) {
      if (s.state.registrar().contains(to_string(id))) {
        s.state.unbind(id);
        touched = true;
      }
    }
  }
  const auto primary = primary_id(p.user);
  if (auto h = hss_.find(hss_for(primary)); h != hss_.end() && h->second.assignment_expiry(primary)) {
    h->second.deassign_scscf(primary);
    touched = true;
  }
  ua_compression_.erase(p.terminal);
  if (touched) net.note(p.terminal, sid, "REGISTER rollback " + p.user);
}

namespace {
SessionDescription default_media() {
  return SessionDescription{{MediaLine{MediaKind::Audio, "PCMA", 64}}};
}
}  // namespace

void Engine::act(const action::Call& a) {
  const auto terminal = terminal_for(a.user, a.terminal);
  auto& outcome = sessions[a.ref];
  outcome = SessionOutcome{a.ref, terminal, std::nullopt, {}, false, false};

  SigMessage invite = make_request(MessageKind::Invite, 1, primary_id(a.user), a.target, a.ref);
  invite.set_header(hdr::kContact, terminal);
  invite.body = a.media.value_or(default_media());
  dialogs_[terminal][a.ref] = UaDialog{true, a.user, invite, {}, std::nullopt, false, false, 2};

  auto pcscf = sc.terminal_pcscf.find(terminal);
  if (pcscf == sc.terminal_pcscf.end()) {
    outcome.reason = "NoPcscfConfigured";
    reject(outcome.reason);
    net.note(terminal, a.ref, "INVITE NoPcscfConfigured");
    return;
  }
  invite.via_stack.push_back(terminal);
  send_sig(terminal, pcscf->second, std::move(invite));
  run();
  auto& done = sessions[a.ref];
  if (!done.final_code && !done.answered) {
    done.reason = "Timeout";
    reject(done.reason);
  }
}

void Engine::act(const action::AsCall& a) {
  const auto* as = sc.node(a.as);
  auto& outcome = sessions[a.ref];
  outcome = SessionOutcome{a.ref, a.as, std::nullopt, {}, false, false};

  SigMessage invite = make_request(MessageKind::Invite, 1, primary_id(a.user), a.target, a.ref);
  invite.set_header(hdr::kContact, a.as);
  invite.body = a.media.value_or(default_media());
  dialogs_[a.as][a.ref] = UaDialog{true, a.user, invite, {}, std::nullopt, false, false, 2};

  std::optional<NodeId> scscf = as->scscf;
  if (!scscf) scscf = first_of(NodeKind::Scscf, as->domain);
  if (!scscf) throw Error(Errc::UnknownNode, "no S-CSCF serves AS " + a.as);
  invite.via_stack.push_back(a.as);
  if (send_sig(a.as, *scscf, std::move(invite))) {
    auto& leg = legs_[{a.as, a.ref}];
    leg.invoked = true;
    cdr(a.as, a.ref, CdrEvent::AsInvocation, to_string(primary_id(a.user)), CdrRole::Originating, true);
  }
  run();
  auto& done = sessions[a.ref];
  if (!done.final_code && !done.answered) {
    done.reason = "Timeout";
    reject(done.reason);
  }
}

void Engine::act(const action::Hangup& a) {
  auto it = sessions.find(a.ref);
  if (it == sessions.end()) throw Error(Errc::UnresolvedReference, "unknown session " + a.ref);
  const auto& origin = it->second.origin;
  auto& dialog = dialogs_[origin][a.ref];
  if (!dialog.answered || dialog.ended) {
    net.note(origin, a.ref, "BYE skipped: no established dialog");
    return;
  }
  ua_send_in_dialog(origin, a.ref, MessageKind::Bye);
  run();
}

void Engine::act(const action::UtConfig& a) {
  const auto terminal = terminal_for(a.user, std::nullopt);
  const std::string sid = "ut-" + std::to_string(++next_ut_);
  pending_ua_[sid] = PendingUaRequest{PendingUaRequest::Kind::Ut, a.user, {}};
  send(terminal, a.as, UtRequest{sid, primary_id(a.user), a.edit, std::nullopt});
  run();
  if (pending_ua_.erase(sid)) {
    ut_results.push_back({a.user, a.as, "Timeout"});
    reject("Timeout");
  }
}

void Engine::act(const action::Conference& a) {
  const auto terminal = terminal_for(a.user, std::nullopt);
  const std::string sid = "mr" + std::to_string(++next_mr_);
  const auto from = primary_id(a.user);
  auto home = std::string(host_of(from));
  if (home.empty()) home = domain_of(terminal);

  SigMessage msg = make_request(MessageKind::Message, 1, from, SipUri{a.conf, home}, sid);
  msg.set_header(hdr::kMrOp, std::string(to_string(a.op)));
  msg.set_header(hdr::kConf, a.conf);
  if (a.op == MrOp::Join) {
    std::string kinds;
    for (auto k : a.media) {
      if (!kinds.empty()) kinds += ',';
      kinds += to_string(k);
    }
    msg.set_header(simhdr::kMedia, kinds);
  }
  if (a.op == MrOp::Announce) msg.set_header(simhdr::kAnnouncement, a.clip);
  pending_ua_[sid] = PendingUaRequest{PendingUaRequest::Kind::Conference, a.user, a.conf};

  auto pcscf = sc.terminal_pcscf.find(terminal);
  if (pcscf != sc.terminal_pcscf.end()) {
    msg.via_stack.push_back(terminal);
    send_sig(terminal, pcscf->second, std::move(msg));
    run();
  }
  if (pending_ua_.erase(sid)) {
    conference_results.push_back({sid, a.conf, a.user, 0, "Timeout", {}});
    reject("Timeout");
  }
}

void Engine::act(const action::LinkState& a) {
  net.set_link_up(a.a, a.b, a.up);
  net.note(a.a, {}, "LINK " + a.a + " " + a.b + (a.up ? " UP" : " DOWN"));
}

void Engine::act(const action::Wait& a) { net.advance(a.ticks); }

// Probes ------------------------------------------------------------------------

std::optional<std::string> Engine::floor_holder(const std::string& conf) const {
  for (const auto& [id, confs] : mrfp_) {
    if (auto it = confs.find(conf); it != confs.end()) return it->second.floor_holder;
  }
  return std::nullopt;
}

std::optional<NodeId> Engine::hss_assignment(const std::string& user) const {
  const auto id = primary_id(user);
  auto h = hss_.find(hss_for(id));
  if (h == hss_.end()) return std::nullopt;
  return h->second.query_scscf(id, net.now());
}

std::size_t Engine::bound_ids(const std::string& user) const {
  std::size_t n = 0;
  for (const auto& id : user_decl(user).public_ids) {
    for (const auto& [sid, s] : scscf_) {
      if (s.state.is_registered(id, net.now())) {
        ++n;
        break;
      }
    }
  }
  return n;
}

bool Engine::security_association(const NodeId& terminal) const {
  return std::any_of(pcscf_.begin(), pcscf_.end(),
                     [&](const auto& p) { return p.second.state.security_assocs.contains(terminal); });
}

// Simulation facade ------------------------------------------------------------

Simulation::Simulation(const Scenario& scenario, std::uint64_t seed)
    : engine_(std::make_unique<Engine>(scenario, seed)) {}
Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

void Simulation::execute(const Action& action) { engine_->execute(action); }
RegistrationRecord Simulation::register_user(const std::string& user, const NodeId& terminal,
                                             std::optional<std::string> secret) {
  return engine_->register_user(user, terminal, std::move(secret));
}
const Scenario& Simulation::scenario() const { return engine_->sc; }
Tick Simulation::now() const { return engine_->net.now(); }
const Trace& Simulation::trace() const { return engine_->net.trace(); }
const CollectionLog& Simulation::cdrs() const { return engine_->log; }
const std::vector<Delivery>& Simulation::deliveries() const { return engine_->deliveries; }
const std::map<std::string, SessionOutcome>& Simulation::sessions() const { return engine_->sessions; }
const std::vector<RegistrationRecord>& Simulation::registrations() const { return engine_->registrations; }
const std::vector<UtOutcome>& Simulation::ut_results() const { return engine_->ut_results; }
const std::vector<ConferenceOutcome>& Simulation::conference_results() const {
  return engine_->conference_results;
}
const std::vector<FloorEvent>& Simulation::floor_history() const { return engine_->floor_history; }
const std::vector<std::string>& Simulation::errors() const { return engine_->errors; }
std::optional<std::string> Simulation::floor_holder(const std::string& conf) const {
  return engine_->floor_holder(conf);
}
std::optional<NodeId> Simulation::hss_assignment(const std::string& user) const {
  return engine_->hss_assignment(user);
}
std::size_t Simulation::bound_ids(const std::string& user) const { return engine_->bound_ids(user); }
bool Simulation::security_association(const NodeId& terminal) const {
  return engine_->security_association(terminal);
}
std::vector<std::string> Simulation::rejections() const { return engine_->rejection_log; }

}  // namespace ims
