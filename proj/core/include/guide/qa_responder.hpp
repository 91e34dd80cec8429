#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace guide {

/// Canned answers shared between the rule table and the dialogue engine.
namespace answers {
inline constexpr std::string_view kName = "My name is Lumen";
inline constexpr std::string_view kLocation =
    "Oh, I'm sorry. I don't know where it is. Maybe you can ask the crew or security.";
inline constexpr std::string_view kExplain =
    "My name is Lumen. I am robot guide and you are now in Lumen Super Intelligence Agent stand. "
    "I was made to be a tour guide robot. I am able to explain about my stand. I can also amuse you "
    "with dancing and singing. I was made by Syarif, Taki, and Putri. That is all about me.";
inline constexpr std::string_view kDance = "Of course I can dance. I will dance a Gangnam Style. Watch carefully, ok.";
inline constexpr std::string_view kSing =
    "Of course I can sing. I will sing Manuk Jajali Song. I will switch my voice to female voice.";
inline constexpr std::string_view kExhibition =
    "You are now in Electrical Engineering Days Exhibition. It's an exhibition to show final project of "
    "the students. It is held by electrical engineering department of ITB. There are 49 stands of bachelor "
    "students including this stand. That is all about EE Days.";
inline constexpr std::string_view kMade =
    "I am nao robot platform. I am from Aldebaran Robotics, a French robotics company. But, Lumen is "
    "programmed by Syarif, Taki, and Putri.";
inline constexpr std::string_view kWhatDo =
    "I can recognize human face. I can understand human language and respond to them. I can also amuse "
    "people with my dancing and singing. I can even walk, you know?";
inline constexpr std::string_view kBusy =
    "Well, actually I can. But today is a busy day. I need to be in this position for a while. I'm sorry.";
inline constexpr std::string_view kRun = "I want to, but no. I can't run.";
inline constexpr std::string_view kSpeakSlow = "I am sorry. I can only talk at this tempo.";
inline constexpr std::string_view kHeight = "I'm about 57 cm high.";
inline constexpr std::string_view kWeight = "My weight is 5.2 kg. I'm not fat, right?";
inline constexpr std::string_view kPlay =
    "Well, I want to play with you. But, I can't play around. I need to be in this stand. But I can show "
    "you my dancing and singing.";
inline constexpr std::string_view kProgrammed = "I was programmed by Syarif, Taki, and Putri.";
inline constexpr std::string_view kLumen = "Lumen is a humanoid robot designed to be an exhibition guide.";
inline constexpr std::string_view kAldebaran = "Aldebaran is a robotic company from French. That's all I can tell you.";
inline constexpr std::string_view kOld = "I am very young.";
inline constexpr std::string_view kWeather = "I think it is nice. I don't care anyway.";
inline constexpr std::string_view kStands =
    "There are 49 stands. In each stand presented the final product of electrical engineering students. "
    "For more information, you can ask the stand directly.";
}  // namespace answers

/// A rule fires when every keyword occurs as a token of the utterance.
struct ResponseRule {
  std::vector<std::string> keywords;  // lowercase, sorted, unique
  std::string answer;
  std::size_t rank = 0;  // position in the table

  friend bool operator==(const ResponseRule&, const ResponseRule&) = default;
};

/// Ordered, immutable rule set. Ranks are 0..size()-1 in table order.
class RuleTable {
 public:
  struct Entry {
    std::vector<std::string> keywords;
    std::string answer;
  };

  /// Keywords are normalized. Throws Error(MalformedRuleFile) on a rule
  /// without keywords or with an empty answer.
  explicit RuleTable(std::vector<Entry> entries);

  std::span<const ResponseRule> rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }

  friend bool operator==(const RuleTable&, const RuleTable&) = default;

 private:
  std::vector<ResponseRule> rules_;
};

struct RuleMatch {
  const ResponseRule* rule = nullptr;
  std::size_t matched_keyword_count = 0;
};

struct MatchResult {
  std::optional<RuleMatch> matched;
  std::vector<std::string> normalized_utterance;
};

/// Lowercases, turns everything except letters, digits and apostrophes
/// into separators, and trims apostrophes from token ends.
std::vector<std::string> normalize(std::string_view text);

/// Most matched keywords wins; ties go to the lowest rank.
MatchResult match(const RuleTable& rules, std::string_view utterance);

std::optional<std::string> respond(const RuleTable& rules, std::string_view utterance);

/// The exhibition question table. Rows listing alternative words become one
/// single-keyword rule per word sharing the answer; the paired rows
/// {what,do} {can,walk} {can,sit} {can,run} {speak,slow} {kind,stand} need
/// both words.
const RuleTable& default_rules();

/// Rule file: one rule per line, `keyword[&keyword...] TAB answer`.
/// Blank lines and lines starting with '#' are skipped.
/// Throws Error(MalformedRuleFile).
RuleTable parse_rules(std::string_view text);
std::string format_rules(const RuleTable& rules);
RuleTable load_rules_file(const std::filesystem::path& path);

}  // namespace guide
