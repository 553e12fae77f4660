#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "platsim/core/catalog.hpp"
#include "platsim/creator/policy.hpp"

namespace platsim {

namespace detail {

inline std::string strip(std::string s, const char* chars = " \t\r\n") {
  const auto b = s.find_first_not_of(chars);
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(chars);
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Case-insensitive, whitespace-trimmed vocabulary lookup.
inline std::optional<GenreId> match_genre(const std::string& text, std::span<const std::string> genres) {
  const auto key = lowercase(detail::strip(text, " \t\r\n\"'*<>[]."));
  for (std::size_t g = 0; g < genres.size(); ++g) {
    if (lowercase(genres[g]) == key) return GenreId(static_cast<std::uint32_t>(g));
  }
  return std::nullopt;
}

/// Reads the first `[EXPLORE]` / `[EXPLOIT]` token and the genre after its `:` or `::`.
inline ExploreAction parse_explore_action(const std::string& text, std::span<const std::string> genres) {
  const auto low = lowercase(text);
  const auto explore = low.find("[explore]");
  const auto exploit = low.find("[exploit]");
  if (explore == std::string::npos && exploit == std::string::npos)
    fail(Errc::ParseFailure, "no [EXPLORE] or [EXPLOIT] token");
  const bool is_explore = exploit == std::string::npos || (explore != std::string::npos && explore < exploit);
  std::size_t pos = (is_explore ? explore : exploit) + 9;

  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  if (pos >= text.size() || text[pos] != ':') fail(Errc::ParseFailure, "missing ':' after action token");
  ++pos;
  if (pos < text.size() && text[pos] == ':') ++pos;
  const auto eol = text.find('\n', pos);
  const auto genre_text = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
  const auto g = match_genre(genre_text, genres);
  if (!g) fail(Errc::ParseFailure, "unknown genre '" + detail::strip(genre_text) + "'");
  return {is_explore ? ActionKind::Explore : ActionKind::Exploit, *g};
}

/// Reply text a well-behaved model would produce for `a`.
inline std::string format_explore_action(const ExploreAction& a, std::span<const std::string> genres) {
  return "[" + std::string(to_string(a.kind)) + "]: " + genres[a.genre.value];
}

/// First balanced `{...}` span in `text`, honouring JSON string escapes.
inline std::optional<std::string> first_json_object(const std::string& text) {
  const auto begin = text.find('{');
  if (begin == std::string::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false, escaped = false;
  for (std::size_t i = begin; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return text.substr(begin, i - begin + 1);
  }
  return std::nullopt;
}

inline CreatedContent parse_content(const std::string& text, std::span<const std::string> genres) {
  const auto obj = first_json_object(text);
  if (!obj) fail(Errc::ParseFailure, "no complete JSON object in reply");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(*obj);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseFailure, std::string("invalid JSON: ") + e.what());
  }
  for (const char* key : {"name", "genre", "tags", "description"})
    if (!j.contains(key)) fail(Errc::ParseFailure, std::string("missing key '") + key + "'");
  if (!j["name"].is_string() || !j["genre"].is_string() || !j["tags"].is_array() ||
      !j["description"].is_string())
    fail(Errc::ParseFailure, "content fields have the wrong types");

  CreatedContent c;
  c.title = detail::strip(j["name"].get<std::string>());
  if (c.title.empty()) fail(Errc::ParseFailure, "empty item name");
  std::optional<GenreId> genre;
  const auto raw = j["genre"].get<std::string>();
  for (std::size_t start = 0; start <= raw.size() && !genre;) {
    const auto bar = raw.find('|', start);
    genre = match_genre(raw.substr(start, bar == std::string::npos ? std::string::npos : bar - start), genres);
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  if (!genre) fail(Errc::ParseFailure, "no known genre in '" + raw + "'");
  c.genre = *genre;
  for (const auto& t : j["tags"]) {
    if (!t.is_string()) fail(Errc::ParseFailure, "tags must be strings");
    c.tags.push_back(t.get<std::string>());
  }
  c.description = j["description"].get<std::string>();
  return c;
}

/// Value after a `[Label]:` marker, e.g. `[Social Identity]: movie enthusiast`.
inline std::string parse_labelled(const std::string& text, const std::string& label) {
  const auto low = lowercase(text);
  const auto pos = low.find("[" + lowercase(label) + "]");
  if (pos == std::string::npos) fail(Errc::ParseFailure, "no [" + label + "] marker");
  auto rest = text.substr(pos + label.size() + 2);
  rest = detail::strip(rest, " \t:");
  const auto eol = rest.find('\n');
  auto value = detail::strip(rest.substr(0, eol), " \t\r\n.");
  if (value.empty()) fail(Errc::ParseFailure, "empty [" + label + "] value");
  return value;
}

}  // namespace platsim
