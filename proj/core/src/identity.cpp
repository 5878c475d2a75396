#include "ims/identity.hpp"

#include <algorithm>
#include <cctype>

#include "ims/error.hpp"

namespace ims {

namespace {

bool is_token_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ||
         c == '+' || c == '!' || c == '~' || c == '*';
}

}  // namespace

bool is_valid_token(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_token_char);
}

bool is_valid_domain(std::string_view s) {
  if (s.empty() || s.front() == '.' || s.back() == '.') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.';
  });
}

SipUri parse_sip_uri(std::string_view text) {
  constexpr std::string_view prefix = "sip:";
  if (!text.starts_with(prefix)) {
    throw Error(Errc::MalformedUri, "expected sip scheme in '" + std::string(text) + "'");
  }
  auto rest = text.substr(prefix.size());
  auto at = rest.find('@');
  if (at == std::string_view::npos) {
    throw Error(Errc::MalformedUri, "missing '@' in '" + std::string(text) + "'");
  }
  auto user = rest.substr(0, at);
  auto host = rest.substr(at + 1);
  if (!is_valid_token(user)) {
    throw Error(Errc::MalformedUri, "empty or invalid user in '" + std::string(text) + "'");
  }
  if (!is_valid_domain(host)) {
    throw Error(Errc::MalformedUri, "empty or invalid host in '" + std::string(text) + "'");
  }
  return SipUri{std::string(user), std::string(host)};
}

TelUri parse_tel_uri(std::string_view text) {
  constexpr std::string_view prefix = "tel:+";
  if (!text.starts_with(prefix)) {
    throw Error(Errc::MalformedUri, "expected tel:+ in '" + std::string(text) + "'");
  }
  auto digits = text.substr(prefix.size());
  if (digits.empty() || digits.size() > 15) {
    throw Error(Errc::MalformedUri, "E.164 number must have 1-15 digits: '" +
                                        std::string(text) + "'");
  }
  if (!std::all_of(digits.begin(), digits.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(Errc::MalformedUri, "non-digit in tel uri '" + std::string(text) + "'");
  }
  return TelUri{std::string(digits)};
}

Uri parse_uri(std::string_view text) {
  if (text.empty()) throw Error(Errc::MalformedUri, "empty uri");
  if (text.starts_with("sip:")) return parse_sip_uri(text);
  if (text.starts_with("tel:")) return parse_tel_uri(text);
  throw Error(Errc::MalformedUri, "unsupported scheme in '" + std::string(text) + "'");
}

std::string to_string(const SipUri& uri) { return "sip:" + uri.user + "@" + uri.host; }

std::string to_string(const TelUri& uri) { return "tel:+" + uri.digits; }

std::string to_string(const Uri& uri) {
  return std::visit([](const auto& u) { return to_string(u); }, uri);
}

std::string_view host_of(const Uri& uri) {
  if (const auto* sip = std::get_if<SipUri>(&uri)) return sip->host;
  return {};
}

ImsIdentity make_identity(std::string private_id, std::vector<Uri> public_ids,
                          std::string shared_secret) {
  if (public_ids.empty()) {
    throw Error(Errc::UnknownPublicId, "identity '" + private_id + "' has no public ids");
  }
  auto at = private_id.find('@');
  if (at == std::string::npos || at == 0 || at + 1 == private_id.size()) {
    throw Error(Errc::MalformedUri, "private id must be user@domain: '" + private_id + "'");
  }
  auto first_sip = std::find_if(public_ids.begin(), public_ids.end(),
                                [](const Uri& u) { return is_sip(u); });
  std::string home = first_sip != public_ids.end() ? std::get<SipUri>(*first_sip).host
                                                   : private_id.substr(at + 1);
  return ImsIdentity{std::move(private_id), std::move(public_ids), std::move(home),
                     std::move(shared_secret)};
}

std::vector<Uri> implicit_set(const ImsIdentity& id, const Uri& registered_public) {
  if (std::find(id.public_ids.begin(), id.public_ids.end(), registered_public) ==
      id.public_ids.end()) {
    throw Error(Errc::UnknownPublicId,
                to_string(registered_public) + " is not owned by " + id.private_id);
  }
  return id.public_ids;
}

std::string enum_domain(const TelUri& tel, std::string_view apex) {
  std::string out;
  out.reserve(tel.digits.size() * 2 + apex.size());
  for (auto it = tel.digits.rbegin(); it != tel.digits.rend(); ++it) {
    out.push_back(*it);
    out.push_back('.');
  }
  out.append(apex);
  return out;
}

EnumRegistry::EnumRegistry(std::string apex) : apex_(std::move(apex)) {
  if (!is_valid_domain(apex_)) throw Error(Errc::MalformedUri, "invalid ENUM apex '" + apex_ + "'");
}

void EnumRegistry::set_apex(std::string apex) {
  if (!is_valid_domain(apex)) throw Error(Errc::MalformedUri, "invalid ENUM apex '" + apex + "'");
  std::map<std::string, SipUri> rekeyed;
  for (auto& [key, target] : entries_) {
    // key = d.d.d.<apex>; recover the digit string.
    std::string digits;
    auto head = std::string_view(key).substr(0, key.size() - apex_.size());
    for (char c : head) {
      if (c != '.') digits.insert(digits.begin(), c);
    }
    rekeyed.emplace(enum_domain(TelUri{digits}, apex), std::move(target));
  }
  apex_ = std::move(apex);
  entries_ = std::move(rekeyed);
}

void EnumRegistry::enum_register(const TelUri& tel, const SipUri& target) {
  entries_.insert_or_assign(enum_domain(tel, apex_), target);
}

bool EnumRegistry::contains(const TelUri& tel) const {
  return entries_.contains(enum_domain(tel, apex_));
}

SipUri enum_lookup(const TelUri& tel, const EnumRegistry& reg) {
  auto it = reg.entries().find(enum_domain(tel, reg.apex()));
  if (it == reg.entries().end()) {
    throw Error(Errc::EnumNotFound, "no ENUM entry for " + to_string(tel));
  }
  return it->second;
}

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::MalformedUri: return "MalformedUri";
    case Errc::EnumNotFound: return "EnumNotFound";
    case Errc::UnknownPublicId: return "UnknownPublicId";
    case Errc::MalformedMessage: return "MalformedMessage";
    case Errc::AlreadyCompressed: return "AlreadyCompressed";
    case Errc::NotCompressed: return "NotCompressed";
    case Errc::InvalidDiameter: return "InvalidDiameter";
    case Errc::UnknownSubscriber: return "UnknownSubscriber";
    case Errc::Barred: return "Barred";
    case Errc::NoPcscfConfigured: return "NoPcscfConfigured";
    case Errc::AuthFailed: return "AuthFailed";
    case Errc::Timeout: return "Timeout";
    case Errc::NoEligibleScscf: return "NoEligibleScscf";
    case Errc::UnknownToken: return "UnknownToken";
    case Errc::NotOwner: return "NotOwner";
    case Errc::UnknownAs: return "UnknownAs";
    case Errc::UnmappableKind: return "UnmappableKind";
    case Errc::UnsupportedCodec: return "UnsupportedCodec";
    case Errc::UnknownConference: return "UnknownConference";
    case Errc::InvalidTransition: return "InvalidTransition";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::TickBudgetExceeded: return "TickBudgetExceeded";
    case Errc::ParseError: return "ParseError";
    case Errc::UnresolvedReference: return "UnresolvedReference";
  }
  return "Unknown";
}

}  // namespace ims
