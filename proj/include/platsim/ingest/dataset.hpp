#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "platsim/core/csv.hpp"
#include "platsim/core/errors.hpp"
#include "platsim/core/ids.hpp"

namespace platsim {

inline std::vector<std::string> default_genres() {
  return {"Film & Animation", "Autos & Vehicles", "Music",          "Pets & Animals",
          "Sports",           "Travel & Events",  "Gaming",         "People & Blogs",
          "Comedy",           "Entertainment",    "News & Politics", "Howto & Style",
          "Education",        "Science & Technology"};
}

struct UserRecord {
  std::int64_t id = 0;
  std::string name;
};

struct CreatorRecord {
  std::int64_t id = 0;
  std::string name;
  std::int64_t followers = 0;
};

struct ItemRow {
  std::int64_t id = 0;
  std::int64_t creator_id = 0;
  GenreId genre;
  std::string title;
  std::vector<std::string> tags;
  std::string description;
  std::int64_t created_day = 0;
};

struct InteractionRow {
  std::int64_t user_id = 0;
  std::int64_t item_id = 0;
  std::int64_t day = 0;
};

/// A cross-referenced dataset. Records keep the ids found in the files; the
/// index maps translate them into dense positions.
struct Dataset {
  std::vector<std::string> genres = default_genres();
  std::vector<UserRecord> users;
  std::vector<CreatorRecord> creators;
  std::vector<ItemRow> items;
  std::vector<InteractionRow> interactions;

  std::unordered_map<std::int64_t, std::size_t> user_index;
  std::unordered_map<std::int64_t, std::size_t> creator_index;
  std::unordered_map<std::int64_t, std::size_t> item_index;

  std::size_t genre_count() const { return genres.size(); }

  std::optional<GenreId> genre_of(const std::string& name) const {
    for (std::size_t g = 0; g < genres.size(); ++g)
      if (genres[g] == name) return GenreId(static_cast<std::uint32_t>(g));
    return std::nullopt;
  }

  /// Rebuilds the index maps and checks every cross reference.
  void index_and_validate() {
    user_index.clear();
    creator_index.clear();
    item_index.clear();
    if (users.empty() || creators.empty() || items.empty()) {
      fail(Errc::EmptyDataset, "dataset needs at least one user, creator and item");
    }
    for (std::size_t i = 0; i < users.size(); ++i) {
      if (!user_index.emplace(users[i].id, i).second)
        fail(Errc::SchemaError, "duplicate user id " + std::to_string(users[i].id));
    }
    for (std::size_t i = 0; i < creators.size(); ++i) {
      if (!creator_index.emplace(creators[i].id, i).second)
        fail(Errc::SchemaError, "duplicate creator id " + std::to_string(creators[i].id));
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& it = items[i];
      if (!item_index.emplace(it.id, i).second)
        fail(Errc::SchemaError, "duplicate item id " + std::to_string(it.id));
      if (!creator_index.contains(it.creator_id))
        fail(Errc::DanglingRef, "item " + std::to_string(it.id) + " references unknown creator " +
                                    std::to_string(it.creator_id));
      if (it.genre.value >= genres.size())
        fail(Errc::SchemaError, "item " + std::to_string(it.id) + " has genre out of range");
    }
    for (const auto& in : interactions) {
      if (!user_index.contains(in.user_id))
        fail(Errc::DanglingRef, "interaction references unknown user " + std::to_string(in.user_id));
      if (!item_index.contains(in.item_id))
        fail(Errc::DanglingRef, "interaction references unknown item " + std::to_string(in.item_id));
    }
  }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

/// Reads a CSV file whose header must contain `columns`; returns rows keyed by column position.
template <class Fn>
void read_table(const std::filesystem::path& path, const std::vector<std::string>& columns,
                Fn&& on_row) {
  std::ifstream in(path);
  if (!in) fail(Errc::SchemaError, "missing file " + path.string());
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) fail(Errc::SchemaError, path.string() + ": empty file");
  std::vector<std::size_t> pos;
  for (const auto& col : columns) {
    auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end()) fail(Errc::SchemaError, path.string() + ": missing column '" + col + "'");
    pos.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<std::string> row;
  std::vector<std::string> picked(columns.size());
  std::size_t line = 1;
  while (reader.next(row)) {
    ++line;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != header.size())
      fail(Errc::SchemaError, path.string() + ":" + std::to_string(line) + ": wrong field count");
    for (std::size_t k = 0; k < pos.size(); ++k) picked[k] = row[pos[k]];
    try {
      on_row(picked);
    } catch (const SimError& e) {
      if (e.code() != Errc::SchemaError) throw;
      fail(Errc::SchemaError, path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  }
}

}  // namespace detail

/// Loads users.csv, creators.csv, items.csv and interactions.csv from `dir`.
/// An optional genres.csv (single `genre` column) replaces the default vocabulary.
inline Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset d;
  if (std::filesystem::exists(dir / "genres.csv")) {
    d.genres.clear();
    detail::read_table(dir / "genres.csv", {"genre"},
                       [&](const auto& r) { d.genres.push_back(r[0]); });
    if (d.genres.empty()) fail(Errc::SchemaError, "genres.csv lists no genres");
  }
  detail::read_table(dir / "users.csv", {"user_id", "name"}, [&](const auto& r) {
    d.users.push_back({parse_int(r[0]), r[1]});
  });
  detail::read_table(dir / "creators.csv", {"creator_id", "name", "followers"},
                     [&](const auto& r) {
                       d.creators.push_back({parse_int(r[0]), r[1], parse_int(r[2])});
                     });
  detail::read_table(
      dir / "items.csv",
      {"item_id", "creator_id", "genre", "title", "tags", "description", "created_day"},
      [&](const auto& r) {
        auto g = d.genre_of(r[2]);
        if (!g) fail(Errc::SchemaError, "genre '" + r[2] + "' is not in the vocabulary");
        d.items.push_back({parse_int(r[0]), parse_int(r[1]), *g, r[3], detail::split(r[4], '|'),
                           r[5], parse_int(r[6])});
      });
  detail::read_table(dir / "interactions.csv", {"user_id", "item_id", "day"}, [&](const auto& r) {
    d.interactions.push_back({parse_int(r[0]), parse_int(r[1]), parse_int(r[2])});
  });
  d.index_and_validate();
  return d;
}

inline void write_dataset(const Dataset& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) fail(Errc::DataError, "cannot write " + (dir / name).string());
    return out;
  };
  if (d.genres != default_genres()) {
    auto out = open("genres.csv");
    out << "genre\n";
    for (const auto& g : d.genres) write_csv_row(out, {g});
  }
  {
    auto out = open("users.csv");
    out << "user_id,name\n";
    for (const auto& u : d.users) write_csv_row(out, {std::to_string(u.id), u.name});
  }
  {
    auto out = open("creators.csv");
    out << "creator_id,name,followers\n";
    for (const auto& c : d.creators)
      write_csv_row(out, {std::to_string(c.id), c.name, std::to_string(c.followers)});
  }
  {
    auto out = open("items.csv");
    out << "item_id,creator_id,genre,title,tags,description,created_day\n";
    for (const auto& it : d.items) {
      write_csv_row(out, {std::to_string(it.id), std::to_string(it.creator_id),
                          d.genres[it.genre.value], it.title, detail::join(it.tags, '|'),
                          it.description, std::to_string(it.created_day)});
    }
  }
  {
    auto out = open("interactions.csv");
    out << "user_id,item_id,day\n";
    for (const auto& in : d.interactions) {
      write_csv_row(out, {std::to_string(in.user_id), std::to_string(in.item_id),
                          std::to_string(in.day)});
    }
  }
}

/// Keeps the first `n_users` users and `n_creators` creators (file order) together
/// with their items and the interactions that still resolve. Zero keeps everything.
inline Dataset subset_dataset(const Dataset& d, std::size_t n_users, std::size_t n_creators) {
  if ((n_users == 0 || n_users >= d.users.size()) &&
      (n_creators == 0 || n_creators >= d.creators.size())) {
    return d;
  }
  if (n_users > d.users.size() || n_creators > d.creators.size()) {
    fail(Errc::DataError, "requested more users or creators than the dataset holds");
  }
  Dataset out;
  out.genres = d.genres;
  out.users.assign(d.users.begin(), d.users.begin() + (n_users ? n_users : d.users.size()));
  out.creators.assign(d.creators.begin(),
                      d.creators.begin() + (n_creators ? n_creators : d.creators.size()));
  std::unordered_map<std::int64_t, bool> keep_user, keep_creator, keep_item;
  for (const auto& u : out.users) keep_user[u.id] = true;
  for (const auto& c : out.creators) keep_creator[c.id] = true;
  for (const auto& it : d.items) {
    if (keep_creator.contains(it.creator_id)) {
      out.items.push_back(it);
      keep_item[it.id] = true;
    }
  }
  for (const auto& in : d.interactions) {
    if (keep_user.contains(in.user_id) && keep_item.contains(in.item_id))
      out.interactions.push_back(in);
  }
  out.index_and_validate();
  return out;
}

}  // namespace platsim
