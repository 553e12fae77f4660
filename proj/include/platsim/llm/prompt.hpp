#pragma once

#include <map>
#include <string>
#include <string_view>

#include "platsim/core/errors.hpp"

namespace platsim {

enum class TemplateId { SocialIdentity, IntrinsicMotivation, SlowThinker, FastThinker };

/// Text with `{name}` placeholders; `{{` and `}}` render as literal braces.
struct PromptTemplate {
  TemplateId id;
  std::string text;
};

using PromptVars = std::map<std::string, std::string, std::less<>>;

inline std::string render_prompt(const PromptTemplate& t, const PromptVars& vars) {
  std::string out;
  out.reserve(t.text.size() * 2);
  const std::string_view s = t.text;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char ch = s[i];
    if (ch == '{' && i + 1 < s.size() && s[i + 1] == '{') {
      out += '{';
      ++i;
    } else if (ch == '}' && i + 1 < s.size() && s[i + 1] == '}') {
      out += '}';
      ++i;
    } else if (ch == '{') {
      const auto close = s.find('}', i + 1);
      if (close == std::string_view::npos) fail(Errc::MissingVar, "unterminated placeholder");
      const auto key = s.substr(i + 1, close - i - 1);
      const auto it = vars.find(key);
      if (it == vars.end()) fail(Errc::MissingVar, "no value for placeholder '" + std::string(key) + "'");
      out += it->second;
      i = close;
    } else {
      out += ch;
    }
  }
  return out;
}

// Prompt texts for profile summarization and the two thinking phases.

inline const PromptTemplate kSocialIdentityPrompt{
    TemplateId::SocialIdentity,
    "You are a content creator on {platform} and your name is {creator_name}. Here is the basic "
    "information about the content you have previously created.\n\n"
    "Recent created content: {recent_content}\n\n"
    "Created content genre (the genres you have created in the past and their respective "
    "proportions): {genre_proportion}\n\n"
    "Creation frequency (the average number of items you create each day): {creations_per_day}\n\n"
    "Please summarize your social identity in the following format: [Social Identity]: <the "
    "specific identity>. For example, [Social Identity]: movie enthusiast."};

inline const PromptTemplate kIntrinsicMotivationPrompt{
    TemplateId::IntrinsicMotivation,
    "You are a content creator on {platform} and your name is {creator_name}. Here is the basic "
    "information about the content you have previously created.\n\n"
    "Follower number: {followers}\n\n"
    "Average views per video: {average_views}.\n\n"
    "Recent created content: {recent_content}\n\n"
    "Recent interaction with users (your recent interaction records with the audience in the "
    "comments section.): {recent_comments}\n\n"
    "Creation frequency (the average number of items you create each day): {creations_per_day}\n\n"
    "Intrinsic motivation refers to whether your purpose for creating content is for profit or "
    "simply for sharing. Please summarize your intrinsic motivation in the following format: "
    "[Intrinsic Motivation]: <the specific motivation>. For example, [Intrinsic Motivation]: profit."};

inline const PromptTemplate kFastThinkerPrompt{
    TemplateId::FastThinker,
    "You are a content creator on YouTube and your nickname is {name}.\n\n"
    "{profile}\n\n"
    "Based on the analysis: {action}, please create ONE new content for {name} that fits user's "
    "interest.\n\n"
    "You can refer to the creation history of {name}: {history}\n\n"
    "Response in JSON dictionary format.\n"
    "Write {{\"name\": [item name], \"genre\": genre1|genre2|....,  \"tags\": [tag1, tag2, tag3], "
    "\"description\": \"item description text\"}})"};

inline const PromptTemplate kSlowThinkerPrompt{
    TemplateId::SlowThinker,
    "You are a content creator on YouTube and your nickname is {name}.\n\n"
    "{profile}\n\n"
    "The average utility per item of each genre {name} has created is as below: {audience}. "
    "([unknown] means the item genre {name} have not explored.\n\n"
    "Recently, {name} created an item of genre {last_genre}, and receives {last_utility} utility.\n\n"
    "Due to the statistical data, {name}'s profile and {name}'s familiarity on each genre: {skill}, "
    "{name} must choose one of the two actions below to obtain more user clicks:\n\n"
    "(1) [EXPLORE] Create content in a new genre that has not been explored before, which means "
    "other genres may have a larger audience and more opportunities to profit. But it might not be "
    "{name}'s area of expertise and requires greater effort to create.\n\n"
    "(2) [EXPLOIT] Sticking to creating content of a familiar genre, which means {name} will "
    "leverage his creative expertise to build a stable brand identity. But it might limit {name}'s "
    "audience reach and lead to insufficient income.\n\n"
    "To explore a new genre, write: [EXPLORE]:: <genre name>. If so, give the specific genre name "
    "chosen from {unknown_genres}.\n\n"
    "To stick to familiar genres, write: [EXPLOIT]:: <genre name>. If so, give the specific genre "
    "name chosen from {known_genres}.\n\n"
    "Let's think step by step. Please answer concisely and strictly follow the output rules."};

inline const PromptTemplate& prompt_template(TemplateId id) {
  switch (id) {
    case TemplateId::SocialIdentity: return kSocialIdentityPrompt;
    case TemplateId::IntrinsicMotivation: return kIntrinsicMotivationPrompt;
    case TemplateId::SlowThinker: return kSlowThinkerPrompt;
    case TemplateId::FastThinker: return kFastThinkerPrompt;
  }
  fail(Errc::InvalidParams, "unknown template id");
}

}  // namespace platsim
