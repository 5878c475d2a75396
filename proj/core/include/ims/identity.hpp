#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ims {

inline constexpr std::string_view kDefaultEnumApex = "e164.arpa";

struct SipUri {
  std::string user;
  std::string host;

  auto operator<=>(const SipUri&) const = default;
};

/// E.164 number; `digits` holds 1-15 decimal digits without the leading '+'.
struct TelUri {
  std::string digits;

  auto operator<=>(const TelUri&) const = default;
};

using Uri = std::variant<SipUri, TelUri>;

/// Parses `sip:user@host` or `tel:+digits`. Throws Error{MalformedUri}.
Uri parse_uri(std::string_view text);
SipUri parse_sip_uri(std::string_view text);
TelUri parse_tel_uri(std::string_view text);

std::string to_string(const SipUri& uri);
std::string to_string(const TelUri& uri);
std::string to_string(const Uri& uri);

inline bool is_tel(const Uri& uri) { return std::holds_alternative<TelUri>(uri); }
inline bool is_sip(const Uri& uri) { return std::holds_alternative<SipUri>(uri); }

/// Host part of a SIP URI, empty for tel URIs.
std::string_view host_of(const Uri& uri);

bool is_valid_token(std::string_view s);
bool is_valid_domain(std::string_view s);

/// Subscriber identity as provisioned on the UICC/ISIM.
struct ImsIdentity {
  std::string private_id;
  std::vector<Uri> public_ids;
  std::string home_domain;
  std::string shared_secret;

  bool operator==(const ImsIdentity&) const = default;
};

/// Builds an identity and checks its invariants (non-empty public ids, home
/// domain equal to the host of the first SIP public id).
ImsIdentity make_identity(std::string private_id, std::vector<Uri> public_ids,
                          std::string shared_secret);

/// All public ids registered together with `registered_public`. The whole
/// public-id list of one identity forms a single implicit registration set.
std::vector<Uri> implicit_set(const ImsIdentity& id, const Uri& registered_public);

/// Reversed, dot-separated digits followed by the apex.
std::string enum_domain(const TelUri& tel, std::string_view apex = kDefaultEnumApex);

class EnumRegistry {
 public:
  explicit EnumRegistry(std::string apex = std::string(kDefaultEnumApex));

  const std::string& apex() const noexcept { return apex_; }
  void set_apex(std::string apex);

  void enum_register(const TelUri& tel, const SipUri& target);
  bool contains(const TelUri& tel) const;
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<std::string, SipUri>& entries() const noexcept { return entries_; }

 private:
  std::string apex_;
  std::map<std::string, SipUri> entries_;
};

/// Throws Error{EnumNotFound} when the number has no mapping.
SipUri enum_lookup(const TelUri& tel, const EnumRegistry& reg);

}  // namespace ims
