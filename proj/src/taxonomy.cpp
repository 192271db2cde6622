#include "stresslens/taxonomy.hpp"

#include <array>
#include <utility>

namespace stresslens {

namespace {

constexpr std::array<std::string_view, 13> kStressThemes = {
    "symptom_psych_emotional", "symptom_physical", "symptom_behavioral", "topic_work",
    "topic_education",         "topic_finances",   "topic_social",       "topic_travel",
    "topic_temporal",          "topic_other",      "action_positive",    "action_negative",
    "non_specific",
};

constexpr std::array<std::string_view, 11> kRelaxThemes = {
    "physical",   "water",  "self_care",    "alcohol_drugs", "entertainment_hobbies", "food_drink",
    "nature",     "rest_vacation", "social", "other",        "non_specific",
};

std::span<const std::string_view> names(Track t) noexcept {
  if (t == Track::stress) return kStressThemes;
  return kRelaxThemes;
}

}  // namespace

struct ThemeTables {
  template <std::size_t N>
  static std::array<ThemeId, N> make(Track t) {
    return [t]<std::size_t... I>(std::index_sequence<I...>) {
      return std::array<ThemeId, N>{ThemeId(t, static_cast<std::uint8_t>(I))...};
    }(std::make_index_sequence<N>{});
  }
};

namespace {
const auto kStressIds = ThemeTables::make<kStressThemes.size()>(Track::stress);
const auto kRelaxIds = ThemeTables::make<kRelaxThemes.size()>(Track::relaxation);
}  // namespace

std::string_view track_name(Track t) noexcept { return t == Track::stress ? "stress" : "relaxation"; }

std::string_view track_keyword(Track t) noexcept { return t == Track::stress ? "stress" : "relax"; }

std::optional<Track> parse_track(std::string_view s) noexcept {
  if (s == "stress") return Track::stress;
  if (s == "relaxation" || s == "relax") return Track::relaxation;
  return std::nullopt;
}

std::optional<ThemeId> ThemeId::parse(Track track, std::string_view name) noexcept {
  const auto all_names = names(track);
  for (std::size_t i = 0; i < all_names.size(); ++i)
    if (all_names[i] == name) return ThemeId(track, static_cast<std::uint8_t>(i));
  return std::nullopt;
}

ThemeId ThemeId::non_specific(Track track) noexcept {
  return ThemeId(track, static_cast<std::uint8_t>(names(track).size() - 1));
}

std::span<const ThemeId> ThemeId::all(Track track) noexcept {
  if (track == Track::stress) return kStressIds;
  return kRelaxIds;
}

std::string_view ThemeId::name() const noexcept { return names(track_)[index_]; }

bool ThemeId::is_non_specific() const noexcept { return index_ + 1u == names(track_).size(); }

}  // namespace stresslens
