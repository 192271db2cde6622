#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace stresslens {

enum class Track : std::uint8_t { stress, relaxation };

/// "stress" / "relaxation".
std::string_view track_name(Track t) noexcept;
/// The filter keyword of a track: "stress" / "relax".
std::string_view track_keyword(Track t) noexcept;
/// Accepts "stress", "relaxation" and "relax".
std::optional<Track> parse_track(std::string_view s) noexcept;

/// A theme from the stress or relaxation coding schema. Themes are ordered
/// by track, then by their position in the schema enumeration; that order
/// is the row order of every distribution table.
class ThemeId {
 public:
  /// Returns nullopt when `name` is not a theme of `track`.
  static std::optional<ThemeId> parse(Track track, std::string_view name) noexcept;
  static ThemeId non_specific(Track track) noexcept;
  /// All themes of a track in schema order.
  static std::span<const ThemeId> all(Track track) noexcept;

  Track track() const noexcept { return track_; }
  std::uint8_t index() const noexcept { return index_; }
  std::string_view name() const noexcept;
  bool is_non_specific() const noexcept;

  friend auto operator<=>(const ThemeId&, const ThemeId&) = default;

 private:
  constexpr ThemeId(Track t, std::uint8_t i) noexcept : track_(t), index_(i) {}
  friend struct ThemeTables;

  Track track_;
  std::uint8_t index_;
};

}  // namespace stresslens
