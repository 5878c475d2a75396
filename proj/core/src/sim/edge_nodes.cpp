#include <algorithm>

#include "ims/error.hpp"
#include "sim/engine.hpp"

namespace ims {

namespace {

void copy_record_route(const SigMessage& from, SigMessage& to) {
  if (auto rr = from.header(hdr::kRecordRoute)) to.set_header(hdr::kRecordRoute, *rr);
}

std::set<MediaKind> parse_media_csv(std::string_view text) {
  std::set<MediaKind> out;
  std::size_t start = 0;
  while (start <= text.size() && !text.empty()) {
    auto comma = text.find(',', start);
    out.insert(parse_media_kind(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) out.insert(MediaKind::Audio);
  return out;
}

}  // namespace

// User agents (terminals, external SIP servers, AS-originated dialogs) ----------

void Engine::on_ua(const Event& ev, SigMessage msg) {
  if (msg.is_request()) return ua_request(ev.dst, msg);
  if (msg.via_stack.empty() || msg.via_stack.back() != ev.dst) {
    throw Error(Errc::InvalidTransition, "response not addressed to " + ev.dst);
  }
  msg.via_stack.pop_back();
  ua_response(ev.dst, msg);
}

void Engine::ua_request(const NodeId& self, const SigMessage& msg) {
  const auto sid = msg.call_id();
  switch (msg.kind) {
    case MessageKind::Invite: {
      deliveries.push_back({net.now(), self, msg.to_uri, sid});
      UaDialog d;
      d.user = user_of(msg.to_uri).value_or("");
      d.invite = msg;
      auto rr = record_route_set(msg);
      d.route.assign(rr.rbegin(), rr.rend());
      d.route.push_back(msg.header_or(hdr::kContact, ""));
      d.answered = true;
      dialogs_[self][sid] = std::move(d);
      respond(self, msg, 180);
      respond(self, msg, 200, {}, [&](SigMessage& r) {
        r.set_header(hdr::kContact, self);
        r.set_header(hdr::kMediaAt, self);
        copy_record_route(msg, r);
      });
      return;
    }
    case MessageKind::Bye: {
      auto& dialogs = dialogs_[self];
      if (auto it = dialogs.find(sid); it != dialogs.end()) it->second.ended = true;
      if (auto s = sessions.find(sid); s != sessions.end() && s->second.origin == self) s->second.ended = true;
      respond(self, msg, 200);
      return;
    }
    case MessageKind::Message:
      respond(self, msg, 200);
      return;
    case MessageKind::Ack:
      return;
    default:
      respond(self, msg, 405, "UnmappableKind");
  }
}

void Engine::ua_response(const NodeId& self, const SigMessage& msg) {
  const auto sid = msg.call_id();
  const auto cseq = msg.header_or(hdr::kCseq, "");
  const auto reason = msg.header_or(hdr::kReason, "");
  if (msg.code < 200) return;

  if (cseq == "REGISTER") {
    auto it = pending_reg_.find(sid);
    if (it == pending_reg_.end()) return;
    auto& p = it->second;
    auto& rec = registrations.at(p.record);
    if (msg.code == 401 && p.attempts == 1 && msg.has_header(hdr::kNonce)) {
      p.nonce = msg.header_or(hdr::kNonce, "");
      send_register(sid);
      return;
    }
    if (msg.code == 200) {
      // Mutual authentication: the terminal checks the network as well.
      if (msg.header_or(hdr::kNetAuth, "") != network_auth_token(p.nonce, p.secret)) {
        rec.status = RegistrationStatus::AuthFailed;
        rec.reason = "NetworkAuthFailed";
        reject(rec.reason);
        rollback_registration(p, sid);
      } else {
        rec.status = RegistrationStatus::Registered;
        rec.reason.clear();
        rec.scscf = msg.header_or(hdr::kServiceRoute, "");
        ua_compression_[p.terminal] = true;
        last_terminal_[p.user] = p.terminal;
      }
    } else {
      rec.status = msg.code == 403 ? (reason == "Barred" ? RegistrationStatus::Barred : RegistrationStatus::AuthFailed)
                                   : RegistrationStatus::Timeout;
      rec.reason = reason.empty() ? std::string(to_string(rec.status)) : reason;
      reject(rec.reason);
      rollback_registration(p, sid);
    }
    pending_reg_.erase(it);
    return;
  }

  if (cseq == "INVITE") {
    auto s = sessions.find(sid);
    auto& dialogs = dialogs_[self];
    auto d = dialogs.find(sid);
    if (s == sessions.end() || d == dialogs.end() || s->second.final_code) return;
    s->second.final_code = msg.code;
    if (msg.code >= 300) {
      s->second.reason = reason;
      d->second.ended = true;
      reject(reason.empty() ? std::to_string(msg.code) : reason);
      return;
    }
    auto& dialog = d->second;
    s->second.answered = true;
    dialog.answered = true;
    dialog.route = record_route_set(msg);
    dialog.route.push_back(msg.header_or(hdr::kContact, ""));
    if (auto peer = msg.header(hdr::kMediaAt)) dialog.media_peer = *peer;
    ua_send_in_dialog(self, sid, MessageKind::Ack);
    if (dialog.media_peer && dialog.invite.body) {
      const auto& sdp = *dialog.invite.body;
      for (auto& flow : mark_dscp(sid, sdp, policy_decision::Permit{dscp_for(sdp)})) {
        send(self, *dialog.media_peer, std::move(flow));
      }
    }
    return;
  }

  if (cseq == "BYE") {
    if (msg.code >= 300) return;
    if (auto d = dialogs_[self].find(sid); d != dialogs_[self].end()) d->second.ended = true;
    if (auto s = sessions.find(sid); s != sessions.end()) s->second.ended = true;
    return;
  }

  if (cseq == "MESSAGE") {
    auto it = pending_ua_.find(sid);
    if (it == pending_ua_.end()) return;
    conference_results.push_back(
        {sid, it->second.conf, it->second.user, msg.code, reason, msg.header_or(hdr::kFloor, "")});
    if (msg.code >= 300) reject(reason);
    pending_ua_.erase(it);
  }
}

void Engine::ua_send_in_dialog(const NodeId& self, const std::string& sid, MessageKind kind) {
  auto& d = dialogs_.at(self).at(sid);
  if (d.route.empty()) throw Error(Errc::InvalidTransition, "dialog " + sid + " has no route");
  const auto seq = kind == MessageKind::Ack ? d.invite.seq : d.next_seq++;
  Uri from = d.caller ? d.invite.from_uri : d.invite.to_uri;
  Uri to = d.caller ? d.invite.to_uri : d.invite.from_uri;
  SigMessage msg = make_request(kind, seq, from, to, sid);
  msg.route_stack.assign(d.route.begin() + 1, d.route.end());
  msg.via_stack.push_back(self);
  send_sig(self, d.route.front(), std::move(msg));
}

// Application servers ---------------------------------------------------------

void Engine::on_as(const Event& ev) {
  const auto& self = ev.dst;
  if (const auto* ut = std::get_if<UtRequest>(&ev.payload)) {
    UtRequest answer = *ut;
    try {
      ut_configure(as_dir_, self, ut->user, ut->edit);
      answer.result = "ok";
    } catch (const Error& e) {
      answer.result = std::string(to_string(e.code()));
    }
    send(self, ev.src, std::move(answer));
    return;
  }

  SigMessage msg = std::get<SigMessage>(ev.payload);
  if (msg.compressed()) msg = decompress(msg);
  if (!msg.is_request()) {
    if (msg.via_stack.size() == 1 && msg.via_stack.back() == self) {
      msg.via_stack.pop_back();
      return ua_response(self, msg);
    }
    return forward_response(self, std::move(msg));
  }
  if (!msg.route_stack.empty() && kind_of(ev.src) == NodeKind::Scscf) return as_invoke(self, std::move(msg));
  ua_request(self, msg);
}

void Engine::as_invoke(const NodeId& self, SigMessage msg) {
  const auto sid = msg.call_id();
  const bool terminating = msg.has_header(hdr::kIscTerm);
  auto& leg = legs_[{self, sid}];
  if (!leg.invoked) {
    leg.invoked = true;
    const auto& served = terminating ? msg.to_uri : msg.from_uri;
    cdr(self, sid, CdrEvent::AsInvocation, to_string(served),
        terminating ? CdrRole::Terminating : CdrRole::Originating);
  }

  const auto* as = as_dir_.find(self);
  const auto* routing = as ? std::get_if<RoutingConfig>(&as->service) : nullptr;
  if (!routing) return as_continue(self, std::move(msg), {});

  NodeId hss;
  try {
    hss = hss_for(routing->owner);
  } catch (const Error&) {
    return as_continue(self, std::move(msg), {});
  }
  query(self, hss,
        make_diameter(DiameterCommand::AsDataQuery, sid, {{"public", to_string(routing->owner)}}),
        [this, self, msg](const DiameterMsg& ans) {
          AsContext ctx;
          ctx.presence_tag = ans.get("tag", "general");
          if (auto c = ans.get("contact"); !c.empty()) ctx.registrar_contact = parse_uri(c);
          as_continue(self, msg, ctx);
        },
        [this, self, msg] {
          net.note(self, msg.call_id(), "Sh unreachable");
          as_continue(self, msg, {});
        });
}

void Engine::as_continue(const NodeId& self, SigMessage msg, const AsContext& ctx) {
  const auto* as = as_dir_.find(self);
  if (!as) throw Error(Errc::UnknownAs, self);
  auto decision = execute_service(*as, as_dir_, msg, ctx);
  net.note(self, msg.call_id(), std::string(backend_label(as->kind)) + " " + describe(decision));
  if (const auto* t = std::get_if<as_decision::TerminateHere>(&decision)) {
    return respond(self, msg, t->code, t->code == 480 ? "UserUnavailable" : "TerminatedByService");
  }
  SigMessage out = apply_decision(msg, decision);
  const NodeId next = out.route_stack.front();
  out.route_stack.erase(out.route_stack.begin());
  forward_request(self, next, std::move(out));
}

// Breakout and CS interworking ------------------------------------------------

void Engine::on_bgcf(const Event& ev, SigMessage msg) {
  const auto& self = ev.dst;
  if (!msg.is_request()) return forward_response(self, std::move(msg));
  if (!msg.route_stack.empty()) return loose_route(self, std::move(msg), true);
  if (msg.kind == MessageKind::Invite) charge_role(self, msg.call_id(), CdrRole::None, msg.from_uri);

  const auto& decl = *decl_.at(self);
  std::map<std::string, NodeId> remote;
  for (const auto& n : sc.nodes) {
    if (n.kind == NodeKind::Bgcf && n.domain != decl.domain) remote.try_emplace(n.domain, n.id);
  }
  BgcfSelection sel;
  try {
    sel = bgcf_select(msg, breakout_.at(self), decl.hiding,
                      first_of(NodeKind::Icscf, decl.domain).value_or(""), remote);
  } catch (const Error&) {
    return respond(self, msg, 404, "NoBreakout");
  }
  if (sel.path.empty() || sel.path.front().empty()) return respond(self, msg, 404, "NoBreakout");
  net.note(self, msg.call_id(), "BREAKOUT " + describe(sel.target));
  if (msg.kind == MessageKind::Invite) record_route(msg, self);
  msg.route_stack.assign(sel.path.begin() + 1, sel.path.end());
  forward_request(self, sel.path.front(), std::move(msg));
}

void Engine::on_mgcf(const Event& ev) {
  const auto& self = ev.dst;
  auto& node = mgcf_.at(self);
  const auto& domain = domain_of(self);
  const auto mgw = first_of(NodeKind::Mgw, domain);
  const auto sgw = first_of(NodeKind::Sgw, domain);

  if (const auto* frame = std::get_if<SgwFrame>(&ev.payload)) {
    const auto& sig = frame->inner;
    auto ref = node.session_of_ref.find(sig.call_ref);
    if (ref == node.session_of_ref.end()) return;
    auto call_it = node.by_session.find(ref->second);
    if (call_it == node.by_session.end()) return;
    auto& call = call_it->second;
    switch (sig.primitive) {
      case CsPrimitive::ACM:
        respond(self, call.invite, 180);
        break;
      case CsPrimitive::ANM:
        respond(self, call.invite, 200, {}, [&](SigMessage& r) {
          r.set_header(hdr::kContact, self);
          r.set_header(hdr::kMediaAt, mgw.value_or(self));
          copy_record_route(call.invite, r);
        });
        break;
      case CsPrimitive::RLC:
        if (call.bye) respond(self, *call.bye, 200);
        if (mgw) send(self, *mgw, GatewayControl{call.ref, std::nullopt});
        node.session_of_ref.erase(ref);
        node.by_session.erase(call_it);
        break;
      default:
        net.note(self, call.invite.call_id(), "ignored " + std::string(to_string(sig.primitive)));
    }
    return;
  }

  SigMessage msg = std::get<SigMessage>(ev.payload);
  if (!msg.is_request()) return;
  const auto sid = msg.call_id();
  switch (msg.kind) {
    case MessageKind::Invite: {
      if (!msg.body) return respond(self, msg, 488, "UnsupportedCodec");
      MediaAdaptation adaptation;
      try {
        adaptation = mgw_adapt(*msg.body, codecs_);
      } catch (const Error& e) {
        return respond(self, msg, 488, to_string(e.code()));
      }
      if (!sgw) return respond(self, msg, 503, "UnknownNode");
      const std::string ref = self + "-" + std::to_string(++node.next_ref);
      CsSignal iam = mgcf_convert(msg, node.family, ref);
      node.by_session[sid] = MgcfCall{ref, msg, std::nullopt};
      node.session_of_ref[ref] = sid;
      if (mgw) send(self, *mgw, GatewayControl{ref, adaptation});
      send(self, *sgw, SgwFrame{iam, CsTransport::SctpLike});
      return;
    }
    case MessageKind::Bye: {
      auto it = node.by_session.find(sid);
      if (it == node.by_session.end() || !sgw) return respond(self, msg, 481, "UnknownSession");
      it->second.bye = msg;
      send(self, *sgw, SgwFrame{mgcf_convert(msg, node.family, it->second.ref), CsTransport::SctpLike});
      return;
    }
    case MessageKind::Ack:
      return;
    default:
      respond(self, msg, 405, "UnmappableKind");
  }
}

void Engine::on_sgw(const Event& ev, const SgwFrame& frame) {
  const auto& self = ev.dst;
  const auto& ref = frame.inner.call_ref;
  if (kind_of(ev.src) == NodeKind::Mgcf) {
    sgw_refs_[ref] = ev.src;
    std::optional<NodeId> pstn = first_of(NodeKind::Pstn, domain_of(self));
    if (!pstn) {
      for (const auto& n : sc.nodes) {
        if (n.kind == NodeKind::Pstn) {
          pstn = n.id;
          break;
        }
      }
    }
    if (!pstn) return net.note(self, ref, "no CS network attached");
    send(self, *pstn, sgw_transport(frame.inner, SgwDirection::ToCs));
    return;
  }
  auto it = sgw_refs_.find(ref);
  if (it == sgw_refs_.end()) return net.note(self, ref, "unknown call reference");
  send(self, it->second, sgw_transport(frame.inner, SgwDirection::ToIms));
}

void Engine::on_pstn(const Event& ev, const SgwFrame& frame) {
  const auto& in = frame.inner;
  auto reply = [&](CsPrimitive p) {
    send(ev.dst, ev.src, SgwFrame{CsSignal{in.family, p, in.call_ref, in.digits}, CsTransport::MtpLike});
  };
  switch (in.primitive) {
    case CsPrimitive::IAM:
      deliveries.push_back({net.now(), ev.dst, TelUri{in.digits}, in.call_ref});
      reply(CsPrimitive::ACM);
      reply(CsPrimitive::ANM);
      break;
    case CsPrimitive::REL:
      reply(CsPrimitive::RLC);
      break;
    default:
      break;
  }
}

// Conferencing ------------------------------------------------------------------

void Engine::on_mrfc(const Event& ev, SigMessage msg) {
  const auto& self = ev.dst;
  if (!msg.is_request()) return;
  if (!msg.has_header(hdr::kMrOp)) return respond(self, msg, 400, "InvalidTransition");
  const auto sid = msg.call_id();
  cdr(self, sid, CdrEvent::MediaControl, to_string(msg.from_uri), CdrRole::None);

  MrfRequest req;
  MrfcResult result;
  try {
    req.op = parse_mr_op(msg.header_or(hdr::kMrOp, ""));
    req.conf_id = msg.header_or(hdr::kConf, "");
    req.user = to_string(msg.from_uri);
    req.media = parse_media_csv(msg.header_or(simhdr::kMedia, ""));
    req.announcement = msg.header_or(simhdr::kAnnouncement, "");
    result = mrfc_.at(self).control(req);
  } catch (const Error& e) {
    const int code = e.code() == Errc::UnknownConference ? 404 : 400;
    return respond(self, msg, code, to_string(e.code()));
  }

  if (auto mrfp = first_of(NodeKind::Mrfp, domain_of(self))) {
    const SipUri to{*mrfp, domain_of(self)};
    std::int64_t seq = 0;
    for (const auto& cmd : result.commands) send_sig(self, *mrfp, to_message(cmd, ++seq, msg.to_uri, to, sid));
  }
  respond(self, msg, 200, {}, [&](SigMessage& r) {
    if (result.floor) r.set_header(hdr::kFloor, std::string(to_string(*result.floor)));
  });
}

void Engine::on_mrfp(const Event& ev, const SigMessage& msg) {
  const auto cmd = mrfp_command_from(msg);
  auto& state = mrfp_[ev.dst][cmd.conf_id];
  if (state.conf_id.empty()) state.conf_id = cmd.conf_id;
  const auto before = state.floor_holder;
  try {
    state = mrfp_apply(state, cmd);
  } catch (const Error& e) {
    return net.note(ev.dst, msg.call_id(), std::string("Mp rejected: ") + e.what());
  }
  if (state.floor_holder != before) floor_history.push_back({net.now(), cmd.conf_id, state.floor_holder});
}

// Policy decision point ---------------------------------------------------------

void Engine::on_pdp(const Event& ev, const CopsMsg& msg) {
  if (msg.kind != CopsKind::Request) return;
  const auto& pdp = pdp_.at(ev.dst);
  PolicyDecision decision = policy_decision::Deny{DenyReason::MediaNotSubscribed};
  if (msg.sdp && msg.user) decision = pdp.decide(msg.role, *msg.sdp, *msg.user);
  send(ev.dst, ev.src, CopsMsg{CopsKind::Decision, msg.session_id, msg.role, {}, std::nullopt, std::nullopt, decision});
}

}  // namespace ims
