#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace hmrs {

/// Number of genre flags in the MovieLens-100K catalog.
inline constexpr std::size_t kCatalogGenreCount = 19;

inline constexpr std::array<std::string_view, kCatalogGenreCount> kCatalogGenreNames = {
    "unknown", "Action",    "Adventure", "Animation", "Children's",
    "Comedy",  "Crime",     "Documentary", "Drama",   "Fantasy",
    "Film-Noir", "Horror",  "Musical",   "Mystery",   "Romance",
    "Sci-Fi",  "Thriller",  "War",       "Western"};

/// The five popular genres profiles are built over, in their fixed order.
enum class PopularGenre : std::size_t { Action = 0, Adventure, Comedy, Drama, Romance };

inline constexpr std::size_t kPopularGenreCount = 5;

inline constexpr std::array<PopularGenre, kPopularGenreCount> kPopularGenres = {
    PopularGenre::Action, PopularGenre::Adventure, PopularGenre::Comedy,
    PopularGenre::Drama, PopularGenre::Romance};

inline constexpr std::array<std::string_view, kPopularGenreCount> kPopularGenreNames = {
    "Action", "Adventure", "Comedy", "Drama", "Romance"};

/// Position of each popular genre inside the catalog flag vector.
inline constexpr std::array<std::size_t, kPopularGenreCount> kPopularCatalogIndex = {1, 2, 5, 8, 14};

constexpr std::size_t index_of(PopularGenre g) noexcept { return static_cast<std::size_t>(g); }

constexpr std::string_view name_of(PopularGenre g) noexcept { return kPopularGenreNames[index_of(g)]; }

inline std::optional<PopularGenre> popular_genre_from_name(std::string_view name) {
  for (auto g : kPopularGenres)
    if (name_of(g) == name) return g;
  return std::nullopt;
}

}  // namespace hmrs
