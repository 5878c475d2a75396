#include "ims/signaling.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "ims/error.hpp"

namespace ims {

namespace {

constexpr std::string_view kKindTokens[] = {"REGISTER", "INVITE", "ACK", "BYE", "MESSAGE"};

bool is_header_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
  });
}

bool is_node_id(std::string_view id) {
  return !id.empty() && std::none_of(id.begin(), id.end(), [](char c) {
    return c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
  });
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(sep);
    out += items[i];
  }
  return out;
}

std::vector<std::string> split_ids(std::string_view text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    out.emplace_back(text.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename Int>
std::optional<Int> to_int(std::string_view s) {
  Int value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

[[noreturn]] void malformed(int line, const std::string& why) {
  throw Error(Errc::MalformedMessage, "line " + std::to_string(line) + ": " + why, line);
}

}  // namespace

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Register: return "REGISTER";
    case MessageKind::Invite: return "INVITE";
    case MessageKind::Ack: return "ACK";
    case MessageKind::Bye: return "BYE";
    case MessageKind::Message: return "MESSAGE";
    case MessageKind::Response: return "RESPONSE";
  }
  return "?";
}

std::string_view to_string(MediaKind kind) {
  switch (kind) {
    case MediaKind::Audio: return "audio";
    case MediaKind::Video: return "video";
    case MediaKind::Data: return "data";
  }
  return "?";
}

MediaKind parse_media_kind(std::string_view text) {
  if (text == "audio") return MediaKind::Audio;
  if (text == "video") return MediaKind::Video;
  if (text == "data") return MediaKind::Data;
  throw Error(Errc::MalformedMessage, "unknown media kind '" + std::string(text) + "'");
}

int SessionDescription::total_bandwidth_kbps() const {
  int total = 0;
  for (const auto& m : media) total += m.bandwidth_kbps;
  return total;
}

SessionDescription parse_media_spec(std::string_view text) {
  SessionDescription sdp;
  for (const auto& item : split_ids(text)) {
    auto first = item.find('/');
    auto second = item.find('/', first == std::string::npos ? first : first + 1);
    if (first == std::string::npos || second == std::string::npos) {
      throw Error(Errc::MalformedMessage, "media spec must be kind/codec/kbps: '" + item + "'");
    }
    MediaLine line;
    line.kind = parse_media_kind(std::string_view(item).substr(0, first));
    line.codec = item.substr(first + 1, second - first - 1);
    auto bw = to_int<int>(std::string_view(item).substr(second + 1));
    if (!bw || *bw <= 0 || line.codec.empty()) {
      throw Error(Errc::MalformedMessage, "bad media spec '" + item + "'");
    }
    line.bandwidth_kbps = *bw;
    sdp.media.push_back(std::move(line));
  }
  if (sdp.media.empty()) throw Error(Errc::MalformedMessage, "empty media spec");
  return sdp;
}

std::optional<std::string> SigMessage::header(std::string_view key) const {
  for (const auto& [k, v] : headers) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string SigMessage::header_or(std::string_view key, std::string_view fallback) const {
  auto v = header(key);
  return v ? *v : std::string(fallback);
}

bool SigMessage::has_header(std::string_view key) const { return header(key).has_value(); }

void SigMessage::set_header(std::string_view key, std::string value) {
  for (auto& [k, v] : headers) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  headers.emplace_back(std::string(key), std::move(value));
}

void SigMessage::remove_header(std::string_view key) {
  std::erase_if(headers, [&](const auto& h) { return h.first == key; });
}

std::size_t SigMessage::size_bytes() const {
  if (auto orig = header(hdr::kOrigSize)) {
    if (auto n = to_int<std::size_t>(*orig)) return compressed_size(*n);
  }
  return serialize(*this).size();
}

std::string SigMessage::kind_token() const {
  if (kind == MessageKind::Response) return "RESPONSE-" + std::to_string(code);
  return std::string(to_string(kind));
}

SigMessage make_request(MessageKind kind, std::int64_t seq, Uri from, Uri to,
                        std::string call_id) {
  SigMessage m;
  m.kind = kind;
  m.seq = seq;
  m.from_uri = std::move(from);
  m.to_uri = std::move(to);
  m.set_header(hdr::kCallId, std::move(call_id));
  return m;
}

SigMessage make_response(const SigMessage& req, int code, std::string_view reason) {
  SigMessage r;
  r.kind = MessageKind::Response;
  r.code = code;
  r.seq = req.seq;
  r.from_uri = req.from_uri;
  r.to_uri = req.to_uri;
  r.set_header(hdr::kCallId, req.call_id());
  r.set_header(hdr::kCseq, std::string(to_string(req.kind)));
  if (!reason.empty()) r.set_header(hdr::kReason, std::string(reason));
  r.via_stack = req.via_stack;
  return r;
}

void validate(const SigMessage& msg) {
  if (msg.kind == MessageKind::Response && (msg.code < 100 || msg.code > 699)) {
    throw Error(Errc::MalformedMessage, "response code out of range");
  }
  if (msg.kind != MessageKind::Response && msg.code != 0) {
    throw Error(Errc::MalformedMessage, "request carries a response code");
  }
  if (msg.seq < 0) throw Error(Errc::MalformedMessage, "negative seq");
  for (const auto& [k, v] : msg.headers) {
    if (!is_header_key(k)) throw Error(Errc::MalformedMessage, "bad header key '" + k + "'");
    if (v.find_first_of("\t\n\r") != std::string::npos) {
      throw Error(Errc::MalformedMessage, "control character in header " + k);
    }
  }
  for (const auto* stack : {&msg.route_stack, &msg.via_stack}) {
    for (const auto& id : *stack) {
      if (!is_node_id(id)) throw Error(Errc::MalformedMessage, "bad node id '" + id + "'");
    }
  }
  if (msg.body) {
    if (msg.body->media.empty()) throw Error(Errc::MalformedMessage, "body without media");
    for (const auto& m : msg.body->media) {
      if (m.bandwidth_kbps <= 0 || !is_valid_token(m.codec)) {
        throw Error(Errc::MalformedMessage, "bad media line");
      }
    }
  }
}

std::string serialize(const SigMessage& msg) {
  std::string out;
  out.reserve(128);
  out += "MSG ";
  out += msg.kind_token();
  out += ' ';
  out += std::to_string(msg.seq);
  out += "\nFROM ";
  out += to_string(msg.from_uri);
  out += "\nTO ";
  out += to_string(msg.to_uri);
  out += '\n';
  for (const auto& [k, v] : msg.headers) {
    out += "H ";
    out += k;
    out += '\t';
    out += v;
    out += '\n';
  }
  out += "ROUTE";
  if (!msg.route_stack.empty()) out += ' ' + join(msg.route_stack, ',');
  out += "\nVIA";
  if (!msg.via_stack.empty()) out += ' ' + join(msg.via_stack, ',');
  out += '\n';
  if (msg.body) {
    out += "BODY " + std::to_string(msg.body->media.size()) + '\n';
    for (const auto& m : msg.body->media) {
      out += "M ";
      out += to_string(m.kind);
      out += ' ';
      out += m.codec;
      out += ' ';
      out += std::to_string(m.bandwidth_kbps);
      out += '\n';
    }
  }
  out += "END\n";
  return out;
}

SigMessage parse_message(std::string_view bytes) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < bytes.size()) {
    auto nl = bytes.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(bytes.substr(start));
      break;
    }
    lines.push_back(bytes.substr(start, nl - start));
    start = nl + 1;
  }

  SigMessage msg;
  std::size_t i = 0;
  auto line_no = [&] { return static_cast<int>(i + 1); };
  auto next = [&](std::string_view what) -> std::string_view {
    if (i >= lines.size()) malformed(line_no(), "unexpected end of record, expected " +
                                                    std::string(what));
    return lines[i];
  };

  auto first = next("MSG");
  if (!first.starts_with("MSG ")) malformed(line_no(), "expected MSG");
  {
    auto rest = first.substr(4);
    auto sp = rest.find(' ');
    if (sp == std::string_view::npos) malformed(line_no(), "MSG needs kind and seq");
    auto kind = rest.substr(0, sp);
    auto seq = to_int<std::int64_t>(rest.substr(sp + 1));
    if (!seq || *seq < 0) malformed(line_no(), "bad seq");
    msg.seq = *seq;
    if (kind.starts_with("RESPONSE-")) {
      auto code = to_int<int>(kind.substr(9));
      if (!code || *code < 100 || *code > 699) malformed(line_no(), "bad response code");
      msg.kind = MessageKind::Response;
      msg.code = *code;
    } else {
      auto it = std::find(std::begin(kKindTokens), std::end(kKindTokens), kind);
      if (it == std::end(kKindTokens)) malformed(line_no(), "unknown kind '" + std::string(kind) + "'");
      msg.kind = static_cast<MessageKind>(it - std::begin(kKindTokens));
    }
  }
  ++i;

  auto parse_uri_line = [&](std::string_view tag) {
    auto line = next(tag);
    std::string prefix = std::string(tag) + " ";
    if (!line.starts_with(prefix)) malformed(line_no(), "expected " + std::string(tag));
    try {
      auto uri = parse_uri(line.substr(prefix.size()));
      ++i;
      return uri;
    } catch (const Error& e) {
      malformed(line_no(), e.what());
    }
  };
  msg.from_uri = parse_uri_line("FROM");
  msg.to_uri = parse_uri_line("TO");

  while (next("ROUTE").starts_with("H ")) {
    auto h = lines[i].substr(2);
    auto tab = h.find('\t');
    if (tab == std::string_view::npos) malformed(line_no(), "header without tab");
    auto key = h.substr(0, tab);
    if (!is_header_key(key)) malformed(line_no(), "bad header key");
    msg.headers.emplace_back(std::string(key), std::string(h.substr(tab + 1)));
    ++i;
  }

  auto parse_stack = [&](std::string_view tag) {
    auto line = next(tag);
    if (line == tag) {
      ++i;
      return std::vector<std::string>{};
    }
    std::string prefix = std::string(tag) + " ";
    if (!line.starts_with(prefix)) malformed(line_no(), "expected " + std::string(tag));
    auto ids = split_ids(line.substr(prefix.size()));
    for (const auto& id : ids) {
      if (!is_node_id(id)) malformed(line_no(), "bad node id in " + std::string(tag));
    }
    ++i;
    return ids;
  };
  msg.route_stack = parse_stack("ROUTE");
  msg.via_stack = parse_stack("VIA");

  if (next("END").starts_with("BODY ")) {
    auto n = to_int<std::size_t>(lines[i].substr(5));
    if (!n || *n == 0) malformed(line_no(), "bad BODY count");
    ++i;
    SessionDescription sdp;
    for (std::size_t k = 0; k < *n; ++k) {
      auto line = next("M");
      if (!line.starts_with("M ")) malformed(line_no(), "expected media line");
      std::istringstream in{std::string(line.substr(2))};
      std::string kind, codec, bw, extra;
      in >> kind >> codec >> bw;
      if (kind.empty() || codec.empty() || bw.empty() || (in >> extra)) {
        malformed(line_no(), "media line needs kind codec kbps");
      }
      MediaLine m;
      try {
        m.kind = parse_media_kind(kind);
      } catch (const Error&) {
        malformed(line_no(), "unknown media kind");
      }
      auto kbps = to_int<int>(bw);
      if (!kbps || *kbps <= 0) malformed(line_no(), "bad bandwidth");
      m.codec = codec;
      m.bandwidth_kbps = *kbps;
      sdp.media.push_back(std::move(m));
      ++i;
    }
    msg.body = std::move(sdp);
  }

  if (next("END") != "END") malformed(line_no(), "expected END");
  ++i;
  for (; i < lines.size(); ++i) {
    if (!lines[i].empty()) malformed(line_no(), "trailing data after END");
  }
  try {
    validate(msg);
  } catch (const Error& e) {
    malformed(0, e.what());
  }
  return msg;
}

std::size_t compressed_size(std::size_t original) { return (original + 1) / 2; }

SigMessage compress(const SigMessage& msg) {
  if (msg.compressed()) throw Error(Errc::AlreadyCompressed, "message already compressed");
  SigMessage out = msg;
  out.set_header(hdr::kOrigSize, std::to_string(serialize(msg).size()));
  return out;
}

SigMessage decompress(const SigMessage& msg) {
  if (!msg.compressed()) throw Error(Errc::NotCompressed, "message is not compressed");
  SigMessage out = msg;
  out.remove_header(hdr::kOrigSize);
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(DiameterInterface itf) {
  switch (itf) {
    case DiameterInterface::Cx: return "Cx";
    case DiameterInterface::Dx: return "Dx";
    case DiameterInterface::Sh: return "Sh";
  }
  return "?";
}

std::string_view to_string(DiameterCommand cmd) {
  switch (cmd) {
    case DiameterCommand::AuthRequest: return "AuthRequest";
    case DiameterCommand::AuthAnswer: return "AuthAnswer";
    case DiameterCommand::ProfileQuery: return "ProfileQuery";
    case DiameterCommand::ProfileAnswer: return "ProfileAnswer";
    case DiameterCommand::ScscfAssign: return "ScscfAssign";
    case DiameterCommand::ScscfQuery: return "ScscfQuery";
    case DiameterCommand::LocateHss: return "LocateHss";
    case DiameterCommand::LocateAnswer: return "LocateAnswer";
    case DiameterCommand::AsDataQuery: return "AsDataQuery";
    case DiameterCommand::AsDataAnswer: return "AsDataAnswer";
  }
  return "?";
}

DiameterInterface interface_for(DiameterCommand cmd) {
  switch (cmd) {
    case DiameterCommand::LocateHss:
    case DiameterCommand::LocateAnswer: return DiameterInterface::Dx;
    case DiameterCommand::AsDataQuery:
    case DiameterCommand::AsDataAnswer: return DiameterInterface::Sh;
    default: return DiameterInterface::Cx;
  }
}

bool is_answer(DiameterCommand cmd) {
  return cmd == DiameterCommand::AuthAnswer || cmd == DiameterCommand::ProfileAnswer ||
         cmd == DiameterCommand::LocateAnswer || cmd == DiameterCommand::AsDataAnswer;
}

std::string DiameterMsg::get(const std::string& key, std::string fallback) const {
  auto it = payload.find(key);
  return it == payload.end() ? fallback : it->second;
}

void validate(const DiameterMsg& msg) {
  if (msg.session_id.empty()) throw Error(Errc::InvalidDiameter, "empty session id");
  if (interface_for(msg.command) != msg.interface) {
    throw Error(Errc::InvalidDiameter, std::string(to_string(msg.command)) +
                                           " cannot travel on " +
                                           std::string(to_string(msg.interface)));
  }
}

DiameterMsg make_diameter(DiameterCommand cmd, std::string session_id,
                          std::map<std::string, std::string> payload) {
  DiameterMsg m{interface_for(cmd), cmd, std::move(session_id), std::move(payload)};
  validate(m);
  return m;
}

}  // namespace ims
