#pragma once

// Reference models used by the unit and acceptance tests. Each one is written
// from the behavioral rules directly and shares no code with the library
// beyond plain data types.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ims/scenario.hpp"
#include "ims/signaling.hpp"

namespace oracle {

inline std::filesystem::path scenario_dir() { return IMS_SCENARIO_DIR; }
inline std::filesystem::path golden_dir() { return IMS_GOLDEN_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::filesystem::path> bundled_scenarios() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(scenario_dir())) {
    if (e.path().extension() == ".scn") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- trace lines -----------------------------------------------------------

struct Line {
  long tick = 0;
  std::string src, dst, kind;
  long seq = 0;
  std::string summary;
};

inline std::vector<std::string> split_tabs(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

/// Hand-rolled reader for the trace text: header then tab-separated lines.
inline std::vector<Line> read_trace(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string row;
  std::getline(in, row);  // header
  while (std::getline(in, row)) {
    auto f = split_tabs(row);
    if (f.size() < 6) continue;
    out.push_back({std::stol(f[0]), f[1], f[2], f[3], std::stol(f[4]), f[5]});
  }
  return out;
}

inline std::optional<std::string> token(const std::string& summary, const std::string& key) {
  std::istringstream in(summary);
  std::string w;
  while (in >> w) {
    if (w.rfind(key + "=", 0) == 0) return w.substr(key.size() + 1);
  }
  return std::nullopt;
}

// --- CDR conservation -------------------------------------------------------

inline bool charging_capable(ims::NodeKind k) {
  using ims::NodeKind;
  return k == NodeKind::Pcscf || k == NodeKind::Icscf || k == NodeKind::Scscf ||
         k == NodeKind::Bgcf || k == NodeKind::Mrfc || k == NodeKind::As;
}

/// Charging-capable nodes that sent or received a delivered message tagged
/// with each session or registration id. Ut edits and policy provisioning
/// are management traffic, not charged.
inline std::map<std::string, std::set<std::string>> trace_walk(const std::string& trace,
                                                               const ims::Scenario& sc) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& l : read_trace(trace)) {
    if (l.kind == "DROP" || l.kind == "NOTE") continue;
    auto sid = token(l.summary, "sid");
    if (!sid || sid->rfind("ut-", 0) == 0 || sid->rfind("prov-", 0) == 0) continue;
    for (const auto* n : {&l.src, &l.dst}) {
      const auto* decl = sc.node(*n);
      if (decl && charging_capable(decl->kind)) out[*sid].insert(*n);
    }
  }
  return out;
}

// --- CDR dump ---------------------------------------------------------------

struct CdrRow {
  long tick;
  std::string node, type, sid, event, user, role;
  bool on_behalf;
};

inline std::vector<CdrRow> read_cdrs(const std::string& text) {
  std::vector<CdrRow> out;
  std::istringstream in(text);
  std::string row;
  while (std::getline(in, row)) {
    auto f = split_tabs(row);
    if (f.size() != 8) continue;
    out.push_back({std::stol(f[0]), f[1], f[2], f[3], f[4], f[5], f[6], f[7] == "1"});
  }
  return out;
}

// --- floor control ------------------------------------------------------------

/// Plain FIFO model: first requester holds, the rest wait in arrival order.
class FloorQueue {
 public:
  void request(const std::string& who) {
    if (holder_ == who) return;
    if (!holder_) {
      holder_ = who;
      return;
    }
    if (std::find(waiting_.begin(), waiting_.end(), who) == waiting_.end()) waiting_.push_back(who);
  }
  void release(const std::string& who) {
    if (holder_ != who) {
      waiting_.erase(std::remove(waiting_.begin(), waiting_.end(), who), waiting_.end());
      return;
    }
    holder_.reset();
    if (!waiting_.empty()) {
      holder_ = waiting_.front();
      waiting_.pop_front();
    }
  }
  const std::optional<std::string>& holder() const { return holder_; }

 private:
  std::optional<std::string> holder_;
  std::deque<std::string> waiting_;
};

// --- message generator ----------------------------------------------------------

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return range(0, 1) == 1; }

  std::string word(int min_len = 1, int max_len = 8) {
    static constexpr char kAlpha[] = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::string s;
    int n = range(min_len, max_len);
    s.push_back(kAlpha[range(0, 25)]);
    for (int i = 1; i < n; ++i) s.push_back(kAlpha[range(0, 35)]);
    return s;
  }
  std::string domain() { return word(2, 6) + "." + (coin() ? "net" : "org"); }
  std::string digits(int min_len = 1, int max_len = 15) {
    std::string s;
    int n = range(min_len, max_len);
    for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + range(0, 9)));
    return s;
  }
  ims::Uri uri() {
    if (range(0, 3) == 0) return ims::TelUri{digits()};
    return ims::SipUri{word(), domain()};
  }

  ims::SigMessage message() {
    using ims::MessageKind;
    static constexpr MessageKind kKinds[] = {MessageKind::Register, MessageKind::Invite,
                                             MessageKind::Ack,      MessageKind::Bye,
                                             MessageKind::Message,  MessageKind::Response};
    ims::SigMessage m;
    m.kind = kKinds[range(0, 5)];
    if (m.kind == MessageKind::Response) m.code = range(100, 699);
    m.seq = range(0, 1 << 30);
    m.from_uri = uri();
    m.to_uri = uri();
    int nh = range(0, 6);
    for (int i = 0; i < nh; ++i) {
      std::string key = "X-" + word(1, 5);
      for (auto& c : key) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      std::string value = coin() ? word(1, 12) + " " + word() : word(1, 20);
      if (range(0, 5) == 0) value.clear();
      m.headers.emplace_back(std::move(key), std::move(value));
    }
    for (auto* stack : {&m.route_stack, &m.via_stack}) {
      int n = range(0, 4);
      for (int i = 0; i < n; ++i) stack->push_back(word() + (coin() ? "-" + word(1, 3) : ""));
    }
    if (coin()) {
      ims::SessionDescription sdp;
      static constexpr ims::MediaKind kMedia[] = {ims::MediaKind::Audio, ims::MediaKind::Video,
                                                  ims::MediaKind::Data};
      static const char* kCodecs[] = {"PCMA", "PCMU", "AMR", "H264", "G729", "T140"};
      int n = range(1, 3);
      for (int i = 0; i < n; ++i) sdp.media.push_back({kMedia[range(0, 2)], kCodecs[range(0, 5)], range(1, 2000)});
      m.body = std::move(sdp);
    }
    return m;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
