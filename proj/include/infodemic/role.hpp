#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace infodemic {

// Declaration order doubles as the matrix index everywhere.
enum class Role : std::uint8_t { Creator = 0, Consumer = 1, NonSpreader = 2 };

inline constexpr Role kRoles[] = {Role::Creator, Role::Consumer, Role::NonSpreader};

constexpr std::size_t role_index(Role r) noexcept { return static_cast<std::size_t>(r); }

constexpr bool is_spreader(Role r) noexcept { return r == Role::Creator || r == Role::Consumer; }

constexpr std::string_view role_name(Role r) noexcept {
  switch (r) {
    case Role::Creator: return "Creator";
    case Role::Consumer: return "Consumer";
    case Role::NonSpreader: return "NonSpreader";
  }
  return "NonSpreader";
}

constexpr std::optional<Role> parse_role(std::string_view name) noexcept {
  for (auto r : kRoles) {
    if (role_name(r) == name) return r;
  }
  return std::nullopt;
}

}  // namespace infodemic
