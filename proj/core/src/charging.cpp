#include "ims/charging.hpp"

#include <charconv>

#include "ims/error.hpp"

namespace ims {

std::string_view to_string(ChargingNodeType t) {
  switch (t) {
    case ChargingNodeType::Pcscf: return "PCSCF";
    case ChargingNodeType::Icscf: return "ICSCF";
    case ChargingNodeType::Scscf: return "SCSCF";
    case ChargingNodeType::Bgcf: return "BGCF";
    case ChargingNodeType::Mrfc: return "MRFC";
    case ChargingNodeType::As: return "AS";
  }
  return "?";
}

std::string_view to_string(CdrEvent e) {
  switch (e) {
    case CdrEvent::Register: return "Register";
    case CdrEvent::SessionStart: return "SessionStart";
    case CdrEvent::SessionEnd: return "SessionEnd";
    case CdrEvent::AsInvocation: return "AsInvocation";
    case CdrEvent::MediaControl: return "MediaControl";
  }
  return "?";
}

std::string_view to_string(CdrRole r) {
  switch (r) {
    case CdrRole::Originating: return "originating";
    case CdrRole::Terminating: return "terminating";
    case CdrRole::None: return "none";
  }
  return "?";
}

std::string serialize(const Cdr& c) {
  std::string out = std::to_string(c.tick);
  for (std::string_view f : {std::string_view(c.node_id), to_string(c.node_type),
                             std::string_view(c.session_id), to_string(c.event),
                             std::string_view(c.served_user), to_string(c.role)}) {
    out += '\t';
    out += f;
  }
  out += c.as_on_behalf ? "\t1" : "\t0";
  return out;
}

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const Enum (&values)[N]) {
  for (auto v : values) {
    if (to_string(v) == text) return v;
  }
  throw Error(Errc::ParseError, "bad CDR field '" + std::string(text) + "'");
}

}  // namespace

Cdr parse_cdr(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    f.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (f.size() != 8) throw Error(Errc::ParseError, "CDR needs 8 fields");
  Cdr c;
  auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), c.tick);
  if (ec != std::errc{} || ptr != f[0].data() + f[0].size()) {
    throw Error(Errc::ParseError, "bad CDR tick");
  }
  c.node_id = f[1];
  static constexpr ChargingNodeType kTypes[] = {ChargingNodeType::Pcscf, ChargingNodeType::Icscf,
                                                ChargingNodeType::Scscf, ChargingNodeType::Bgcf,
                                                ChargingNodeType::Mrfc, ChargingNodeType::As};
  static constexpr CdrEvent kEvents[] = {CdrEvent::Register, CdrEvent::SessionStart,
                                         CdrEvent::SessionEnd, CdrEvent::AsInvocation,
                                         CdrEvent::MediaControl};
  static constexpr CdrRole kRoles[] = {CdrRole::Originating, CdrRole::Terminating, CdrRole::None};
  c.node_type = parse_enum(f[2], kTypes);
  c.session_id = f[3];
  c.event = parse_enum(f[4], kEvents);
  c.served_user = f[5];
  c.role = parse_enum(f[6], kRoles);
  if (f[7] != "0" && f[7] != "1") throw Error(Errc::ParseError, "bad CDR flag");
  c.as_on_behalf = f[7] == "1";
  return c;
}

void CollectionLog::append(Cdr cdr) {
  if (!records_.empty() && cdr.tick < records_.back().tick) {
    throw Error(Errc::InvalidTransition, "CDR tick goes backwards");
  }
  if (cdr.event != CdrEvent::Register && cdr.session_id.empty()) {
    throw Error(Errc::InvalidTransition, "session CDR without a session id");
  }
  if (cdr.as_on_behalf && cdr.node_type != ChargingNodeType::As &&
      cdr.event != CdrEvent::AsInvocation) {
    throw Error(Errc::InvalidTransition, "on-behalf flag on a non-AS record");
  }
  records_.push_back(std::move(cdr));
}

std::string CollectionLog::dump() const {
  std::string out;
  for (const auto& c : records_) {
    out += serialize(c);
    out += '\n';
  }
  return out;
}

namespace {

void fold(CdrSummary& s, const Cdr& c) {
  s.session_id = c.session_id;
  s.nodes.insert(c.node_id);
  if (!c.served_user.empty()) s.served_users.insert(c.served_user);
  if (c.event == CdrEvent::SessionStart && !s.start_tick) s.start_tick = c.tick;
  if (c.event == CdrEvent::SessionEnd) s.end_tick = c.tick;
  s.as_on_behalf = s.as_on_behalf || c.as_on_behalf;
  ++s.records;
}

}  // namespace

CdrSummary correlate(const CollectionLog& log, const std::string& session_id) {
  CdrSummary s;
  s.session_id = session_id;
  for (const auto& c : log.records()) {
    if (c.session_id == session_id) fold(s, c);
  }
  return s;
}

std::map<std::string, CdrSummary> correlate_all(const CollectionLog& log) {
  std::map<std::string, CdrSummary> out;
  for (const auto& c : log.records()) fold(out[c.session_id], c);
  return out;
}

}  // namespace ims
