#include "ims/app_server.hpp"

#include "ims/error.hpp"

namespace ims {

std::string_view to_string(AsKind k) {
  switch (k) {
    case AsKind::SipAs: return "SIPAS";
    case AsKind::OsaScs: return "OSASCS";
    case AsKind::ImSsf: return "IMSSF";
  }
  return "?";
}

std::string_view to_string(AsMode m) {
  switch (m) {
    case AsMode::Proxy: return "PROXY";
    case AsMode::OriginatingUA: return "ORIG-UA";
    case AsMode::TerminatingUA: return "TERM-UA";
    case AsMode::B2BUA: return "B2BUA";
  }
  return "?";
}

AsKind parse_as_kind(std::string_view text) {
  if (text == "SIPAS") return AsKind::SipAs;
  if (text == "OSASCS") return AsKind::OsaScs;
  if (text == "IMSSF") return AsKind::ImSsf;
  throw Error(Errc::ParseError, "unknown AS type '" + std::string(text) + "'");
}

AsMode parse_as_mode(std::string_view text) {
  if (text == "PROXY") return AsMode::Proxy;
  if (text == "ORIG-UA") return AsMode::OriginatingUA;
  if (text == "TERM-UA") return AsMode::TerminatingUA;
  if (text == "B2BUA") return AsMode::B2BUA;
  throw Error(Errc::ParseError, "unknown AS mode '" + std::string(text) + "'");
}

std::string_view backend_label(AsKind k) {
  switch (k) {
    case AsKind::SipAs: return "SIP";
    case AsKind::OsaScs: return "OSA-API";
    case AsKind::ImSsf: return "CAP";
  }
  return "?";
}

std::string_view to_string(ScreenResult r) {
  return r == ScreenResult::Allowed ? "Allowed" : "Deflected";
}

std::optional<ScreenResult> parse_screen_result(std::string_view text) {
  if (text == "Allowed") return ScreenResult::Allowed;
  if (text == "Deflected") return ScreenResult::Deflected;
  return std::nullopt;
}

ScreenResult as1_screen(const ScreeningConfig& cfg, const Uri& caller) {
  return cfg.allow.contains(caller) ? ScreenResult::Allowed : ScreenResult::Deflected;
}

SipUri as2_route(const RoutingConfig& cfg, const ScreeningConfig& screening, ScreenResult screen,
                 std::string_view presence, const Uri& registrar_contact) {
  (void)cfg;
  if (screen == ScreenResult::Deflected) return screening.deflect_target;
  if (presence == "home") return screening.target_allowed;
  if (const auto* sip = std::get_if<SipUri>(&registrar_contact)) return *sip;
  // A tel-only registration has no SIP contact to forward to; keep the owner's
  // home target.
  return screening.target_allowed;
}

std::string describe(const AsDecision& d) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, as_decision::Continue>) {
          auto tag = v.msg.header(hdr::kScreen);
          return tag ? "Continue(" + *tag + ")" : "Continue";
        } else if constexpr (std::is_same_v<T, as_decision::RetargetTo>) {
          return "RetargetTo(" + to_string(v.target) + ")";
        } else {
          return "TerminateHere(" + std::to_string(v.code) + ")";
        }
      },
      d);
}

void AsDirectory::add(AsNode node) {
  auto id = node.id;
  nodes_.insert_or_assign(std::move(id), std::move(node));
}

AsNode* AsDirectory::find(const NodeId& id) {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const AsNode* AsDirectory::find(const NodeId& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

AsDecision execute_service(const AsNode& as, const AsDirectory& dir, const SigMessage& msg,
                           const AsContext& ctx) {
  return std::visit(
      [&](const auto& svc) -> AsDecision {
        using T = std::decay_t<decltype(svc)>;
        if constexpr (std::is_same_v<T, ScreeningConfig>) {
          SigMessage out = msg;
          out.set_header(hdr::kScreen, std::string(to_string(as1_screen(svc, msg.from_uri))));
          return as_decision::Continue{std::move(out)};
        } else if constexpr (std::is_same_v<T, RoutingConfig>) {
          const auto* source = dir.find(svc.presence_source);
          const auto* screening =
              source ? std::get_if<ScreeningConfig>(&source->service) : nullptr;
          auto verdict = parse_screen_result(msg.header_or(hdr::kScreen, ""));
          if (!screening || !verdict) return as_decision::Continue{msg};
          Uri contact = ctx.registrar_contact.value_or(svc.owner);
          return as_decision::RetargetTo{
              as2_route(svc, *screening, *verdict, ctx.presence_tag, contact)};
        } else {
          return as_decision::Continue{msg};
        }
      },
      as.service);
}

SigMessage apply_decision(const SigMessage& original, const AsDecision& d) {
  if (const auto* c = std::get_if<as_decision::Continue>(&d)) return c->msg;
  SigMessage out = original;
  if (const auto* r = std::get_if<as_decision::RetargetTo>(&d)) {
    if (!out.has_header(hdr::kOrigTo)) out.set_header(hdr::kOrigTo, to_string(out.to_uri));
    out.to_uri = r->target;
  }
  return out;
}

ChainResult invoke_chain(const AsDirectory& dir, SigMessage msg, const std::vector<NodeId>& as_ids,
                         const std::map<NodeId, AsContext>& ctx_for,
                         const std::set<NodeId>& unreachable) {
  ChainResult result{std::move(msg), std::nullopt, {}, {}};
  for (const auto& id : as_ids) {
    const auto* as = dir.find(id);
    if (!as || unreachable.contains(id)) {
      result.steps.push_back({id, std::nullopt});
      result.warnings.push_back("AS-UNREACHABLE " + id);
      continue;
    }
    auto ctx_it = ctx_for.find(id);
    auto decision =
        execute_service(*as, dir, result.final_msg, ctx_it == ctx_for.end() ? AsContext{} : ctx_it->second);
    result.steps.push_back({id, decision});
    if (const auto* t = std::get_if<as_decision::TerminateHere>(&decision)) {
      result.terminal_response = t->code;
      break;
    }
    result.final_msg = apply_decision(result.final_msg, decision);
  }
  return result;
}

UtEdit parse_ut_edit(std::string_view verb, std::string_view uri) {
  if (verb == "ALLOW-ADD") return ut_edit::AllowAdd{parse_uri(uri)};
  if (verb == "ALLOW-REMOVE") return ut_edit::AllowRemove{parse_uri(uri)};
  if (verb == "TARGET") return ut_edit::SetTarget{parse_sip_uri(uri)};
  if (verb == "DEFLECT") return ut_edit::SetDeflect{parse_sip_uri(uri)};
  throw Error(Errc::ParseError, "unknown Ut edit '" + std::string(verb) + "'");
}

std::string describe(const UtEdit& e) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ut_edit::AllowAdd>) return "ALLOW-ADD " + to_string(v.uri);
        else if constexpr (std::is_same_v<T, ut_edit::AllowRemove>) return "ALLOW-REMOVE " + to_string(v.uri);
        else if constexpr (std::is_same_v<T, ut_edit::SetTarget>) return "TARGET " + to_string(v.uri);
        else return "DEFLECT " + to_string(v.uri);
      },
      e);
}

void ut_configure(AsDirectory& dir, const NodeId& as_id, const Uri& user, const UtEdit& edit) {
  auto* as = dir.find(as_id);
  if (!as) throw Error(Errc::UnknownAs, "no application server " + as_id);
  auto* current = std::get_if<ScreeningConfig>(&as->service);
  if (!current) throw Error(Errc::UnknownAs, as_id + " hosts no configurable screening service");
  if (current->owner != user) {
    throw Error(Errc::NotOwner, to_string(user) + " does not own the config on " + as_id);
  }
  ScreeningConfig next = *current;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ut_edit::AllowAdd>) next.allow.insert(v.uri);
        else if constexpr (std::is_same_v<T, ut_edit::AllowRemove>) next.allow.erase(v.uri);
        else if constexpr (std::is_same_v<T, ut_edit::SetTarget>) next.target_allowed = v.uri;
        else next.deflect_target = v.uri;
      },
      edit);
  if (next.target_allowed == next.deflect_target) {
    throw Error(Errc::InvalidTransition, "target and deflect target must differ");
  }
  *current = std::move(next);
}

}  // namespace ims
