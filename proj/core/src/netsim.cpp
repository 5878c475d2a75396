#include "ims/netsim.hpp"

#include <charconv>
#include <tuple>

#include "ims/error.hpp"

namespace ims {

namespace {

// Headers surfaced in trace summaries, in this order.
constexpr std::string_view kTracedHeaders[] = {
    hdr::kReason, hdr::kScreen, hdr::kOrigTo, hdr::kDscp, hdr::kAsOnBehalf, hdr::kMrOp,
    hdr::kConf,   hdr::kFloor,  "PARTICIPANT",  "ANNOUNCEMENT"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string sanitize(std::string s) {
  for (auto& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::string sig_summary(const SigMessage& m) {
  std::string out = "sid=" + m.call_id();
  if (m.is_request()) {
    out += " from=" + to_string(m.from_uri) + " to=" + to_string(m.to_uri);
  } else if (auto cseq = m.header(hdr::kCseq)) {
    out += " cseq=" + *cseq;
  }
  for (auto key : kTracedHeaders) {
    if (auto v = m.header(key)) out += " " + lower(key) + "=" + *v;
  }
  if (m.is_request() && m.body) {
    out += " media=";
    for (std::size_t i = 0; i < m.body->media.size(); ++i) {
      const auto& l = m.body->media[i];
      if (i) out += ',';
      out += std::string(to_string(l.kind)) + "/" + l.codec + "/" + std::to_string(l.bandwidth_kbps);
    }
  }
  if (m.compressed()) out += " comp";
  return out;
}

template <typename Int>
Int to_int(std::string_view s, std::string_view what) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(Errc::ParseError, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string kind_label(const Payload& p) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SigMessage>) {
          if (auto verb = v.header(hdr::kMpVerb)) return "Mp:" + *verb;
          return v.kind_token();
        } else if constexpr (std::is_same_v<T, DiameterMsg>) {
          return std::string(to_string(v.interface)) + ":" + std::string(to_string(v.command));
        } else if constexpr (std::is_same_v<T, SgwFrame>) {
          return std::string(to_string(v.inner.family)) + ":" + std::string(to_string(v.inner.primitive));
        } else if constexpr (std::is_same_v<T, GatewayControl>) {
          return v.adaptation ? "H248:Add" : "H248:Subtract";
        } else if constexpr (std::is_same_v<T, CopsMsg>) {
          return "COPS:" + std::string(to_string(v.kind));
        } else if constexpr (std::is_same_v<T, UtRequest>) {
          return v.result ? "Ut:Answer" : "Ut:Config";
        } else {
          return "Mb:MEDIA";
        }
      },
      p);
}

std::string session_of(const Payload& p) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SigMessage>) return v.call_id();
        else if constexpr (std::is_same_v<T, DiameterMsg>) return v.session_id;
        else if constexpr (std::is_same_v<T, SgwFrame>) return {};
        else if constexpr (std::is_same_v<T, GatewayControl>) return {};
        else if constexpr (std::is_same_v<T, CopsMsg>) return v.session_id;
        else if constexpr (std::is_same_v<T, UtRequest>) return v.request_id;
        else return v.session_id;
      },
      p);
}

std::string summarize(const Payload& p) {
  return sanitize(std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SigMessage>) {
          return sig_summary(v);
        } else if constexpr (std::is_same_v<T, DiameterMsg>) {
          std::string out = "sid=" + v.session_id;
          for (const auto& [k, val] : v.payload) out += " " + k + "=" + val;
          return out;
        } else if constexpr (std::is_same_v<T, SgwFrame>) {
          std::string out = "ref=" + v.inner.call_ref;
          if (!v.inner.digits.empty()) out += " digits=" + v.inner.digits;
          return out + " transport=" + std::string(to_string(v.transport));
        } else if constexpr (std::is_same_v<T, GatewayControl>) {
          std::string out = "ref=" + v.call_ref;
          if (v.adaptation) {
            out += " from=" + v.adaptation->from_codec + " to=" + v.adaptation->to_format;
            out += v.adaptation->pass_through ? " pass-through" : " transcode";
          }
          return out;
        } else if constexpr (std::is_same_v<T, CopsMsg>) {
          std::string out = "sid=" + v.session_id;
          out += v.role == PepRole::Pcscf ? " pep=PCSCF" : " pep=SCSCF";
          if (v.kind == CopsKind::Provision) out += " rules=" + std::to_string(v.rules.size());
          if (v.user) out += " user=" + to_string(*v.user);
          if (v.decision) out += " decision=" + describe(*v.decision);
          return out;
        } else if constexpr (std::is_same_v<T, UtRequest>) {
          std::string out = "sid=" + v.request_id + " user=" + to_string(v.user) + " edit=" + describe(v.edit);
          if (v.result) out += " result=" + *v.result;
          return out;
        } else {
          return "sid=" + v.session_id + " kind=" + std::string(to_string(v.line.kind)) +
                 " codec=" + v.line.codec + " kbps=" + std::to_string(v.line.bandwidth_kbps) +
                 " dscp=" + std::to_string(v.dscp.code);
        }
      },
      p));
}

std::string serialize(const TraceEntry& e) {
  return std::to_string(e.tick) + "\t" + e.src + "\t" + e.dst + "\t" + e.kind + "\t" +
         std::to_string(e.seq) + "\t" + e.summary;
}

TraceEntry parse_trace_entry(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  for (int i = 0; i < 5; ++i) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) throw Error(Errc::ParseError, "trace line needs 6 fields");
    f.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  f.push_back(line.substr(start));
  return TraceEntry{to_int<Tick>(f[0], "tick"), std::string(f[1]), std::string(f[2]),
                    std::string(f[3]), to_int<std::uint64_t>(f[4], "seq"), std::string(f[5])};
}

std::string Trace::serialize() const {
  std::string out = "TRACE v1 seed=" + std::to_string(seed_) + "\n";
  for (const auto& e : entries_) {
    out += ims::serialize(e);
    out += '\n';
  }
  return out;
}

Trace Trace::parse(std::string_view text) {
  constexpr std::string_view kHeader = "TRACE v1 seed=";
  auto nl = text.find('\n');
  auto header = text.substr(0, nl);
  if (!header.starts_with(kHeader)) throw Error(Errc::ParseError, "missing trace header");
  Trace t(to_int<std::uint64_t>(header.substr(kHeader.size()), "seed"));
  while (nl != std::string_view::npos && nl + 1 < text.size()) {
    auto start = nl + 1;
    nl = text.find('\n', start);
    t.append(parse_trace_entry(text.substr(start, nl - start)));
  }
  return t;
}

void Network::require(const NodeId& id) const {
  if (!nodes_.contains(id)) throw Error(Errc::UnknownNode, "unknown node " + id);
}

void Network::add_node(const NodeId& id) { nodes_.insert(id); }

void Network::add_link(const NodeId& a, const NodeId& b, Tick latency) {
  require(a);
  require(b);
  if (latency < 1) throw Error(Errc::InvalidTransition, "link latency must be at least 1");
  auto k = key(a, b);
  bool up = !down_.contains(k);
  links_.insert_or_assign(k, Link{k.first, k.second, latency, up});
}

void Network::set_link_up(const NodeId& a, const NodeId& b, bool up) {
  require(a);
  require(b);
  auto k = key(a, b);
  if (auto it = links_.find(k); it != links_.end()) it->second.up = up;
  if (up) down_.erase(k);
  else down_.insert(k);
}

void Network::set_default_latency(Tick latency) {
  if (latency < 1) throw Error(Errc::InvalidTransition, "link latency must be at least 1");
  default_latency_ = latency;
}

Link Network::link_between(const NodeId& a, const NodeId& b) const {
  require(a);
  require(b);
  auto k = key(a, b);
  if (auto it = links_.find(k); it != links_.end()) return it->second;
  return Link{k.first, k.second, default_latency_, !down_.contains(k)};
}

bool Network::schedule(const NodeId& src, const NodeId& dst, Payload payload) {
  auto link = link_between(src, dst);
  auto seq = next_seq_++;
  if (!link.up) {
    trace_.append({now_, src, dst, std::string(kDropKind), seq,
                   kind_label(payload) + " " + summarize(payload)});
    return false;
  }
  queue_.push(Event{now_ + link.latency, seq, src, dst, std::move(payload)});
  return true;
}

void Network::note(const NodeId& at, const std::string& session, const std::string& text) {
  std::string summary = session.empty() ? text : "sid=" + session + " " + text;
  trace_.append({now_, at, at, std::string(kNoteKind), next_seq_++, sanitize(std::move(summary))});
}

void Network::advance(Tick dt) {
  if (dt < 0) throw Error(Errc::InvalidTransition, "time cannot move backwards");
  if (!queue_.empty()) throw Error(Errc::InvalidTransition, "cannot advance with events pending");
  now_ += dt;
}

void Network::run_until_quiescent(Tick max_ticks, const Handler& handler) {
  const Tick deadline = now_ + max_ticks;
  while (!queue_.empty()) {
    if (queue_.top().deliver_tick > deadline) {
      queue_ = {};
      throw Error(Errc::TickBudgetExceeded,
                  "events still pending after " + std::to_string(max_ticks) + " ticks");
    }
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.deliver_tick;
    trace_.append({ev.deliver_tick, ev.src, ev.dst, kind_label(ev.payload), ev.seq,
                   summarize(ev.payload)});
    handler(ev);
  }
}

}  // namespace ims
