#include "guide/qa_responder.hpp"

#include <algorithm>
#include <cctype>

#include "guide/errors.hpp"
#include "text_util.hpp"

namespace guide {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '\'' || c >= 0x80; }

RuleTable::Entry word_rule(std::string_view word, std::string_view answer) {
  return {{std::string(word)}, std::string(answer)};
}

RuleTable::Entry paired_rule(std::string_view a, std::string_view b, std::string_view answer) {
  return {{std::string(a), std::string(b)}, std::string(answer)};
}

}  // namespace

std::vector<std::string> normalize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    const auto b = current.find_first_not_of('\'');
    if (b != std::string::npos) {
      const auto e = current.find_last_not_of('\'');
      tokens.push_back(current.substr(b, e - b + 1));
    }
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_char(c)) {
      current += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

RuleTable::RuleTable(std::vector<Entry> entries) {
  rules_.reserve(entries.size());
  for (auto& entry : entries) {
    std::vector<std::string> keywords;
    for (const auto& k : entry.keywords) {
      for (auto& token : normalize(k)) keywords.push_back(std::move(token));
    }
    std::sort(keywords.begin(), keywords.end());
    keywords.erase(std::unique(keywords.begin(), keywords.end()), keywords.end());
    if (keywords.empty()) {
      throw Error(ErrorCode::MalformedRuleFile, "rule " + std::to_string(rules_.size()) + " has no keywords");
    }
    if (detail::trim(entry.answer).empty()) {
      throw Error(ErrorCode::MalformedRuleFile, "rule " + std::to_string(rules_.size()) + " has an empty answer");
    }
    rules_.push_back({std::move(keywords), std::move(entry.answer), rules_.size()});
  }
}

MatchResult match(const RuleTable& rules, std::string_view utterance) {
  MatchResult result;
  result.normalized_utterance = normalize(utterance);
  auto tokens = result.normalized_utterance;
  std::sort(tokens.begin(), tokens.end());

  for (const auto& rule : rules.rules()) {
    const bool all_present = std::all_of(rule.keywords.begin(), rule.keywords.end(), [&](const std::string& k) {
      return std::binary_search(tokens.begin(), tokens.end(), k);
    });
    if (!all_present) continue;
    // Rules are visited in rank order, so strict > keeps the lowest rank on ties.
    if (!result.matched || rule.keywords.size() > result.matched->matched_keyword_count) {
      result.matched = RuleMatch{&rule, rule.keywords.size()};
    }
  }
  return result;
}

std::optional<std::string> respond(const RuleTable& rules, std::string_view utterance) {
  const auto result = match(rules, utterance);
  if (!result.matched) return std::nullopt;
  return result.matched->rule->answer;
}

const RuleTable& default_rules() {
  using namespace answers;
  static const RuleTable table({
      word_rule("name", kName),
      word_rule("toilet", kLocation),
      word_rule("pray", kLocation),
      word_rule("room", kLocation),
      word_rule("door", kLocation),
      word_rule("explain", kExplain),
      word_rule("dance", kDance),
      word_rule("dancing", kDance),
      word_rule("sing", kSing),
      word_rule("singing", kSing),
      word_rule("exhibition", kExhibition),
      word_rule("event", kExhibition),
      word_rule("made", kMade),
      word_rule("create", kMade),
      paired_rule("what", "do", kWhatDo),
      paired_rule("can", "walk", kBusy),
      paired_rule("can", "sit", kBusy),
      paired_rule("can", "run", kRun),
      paired_rule("speak", "slow", kSpeakSlow),
      word_rule("tall", kHeight),
      word_rule("height", kHeight),
      word_rule("weight", kWeight),
      word_rule("fat", kWeight),
      word_rule("play", kPlay),
      word_rule("programmed", kProgrammed),
      word_rule("program", kProgrammed),
      word_rule("lumen", kLumen),
      word_rule("aldebaran", kAldebaran),
      word_rule("old", kOld),
      word_rule("weather", kWeather),
      paired_rule("kind", "stand", kStands),
  });
  return table;
}

RuleTable parse_rules(std::string_view text) {
  std::vector<RuleTable::Entry> entries;
  std::size_t number = 0;
  for (auto raw : detail::split(text, '\n')) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (detail::trim(raw).empty() || detail::trim(raw).front() == '#') continue;
    const auto tab = raw.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::MalformedRuleFile, "line " + std::to_string(number) + " has no TAB separator");
    }
    RuleTable::Entry entry;
    for (auto keyword : detail::split(raw.substr(0, tab), '&')) {
      keyword = detail::trim(keyword);
      if (keyword.empty()) {
        throw Error(ErrorCode::MalformedRuleFile, "line " + std::to_string(number) + " has an empty keyword");
      }
      entry.keywords.emplace_back(keyword);
    }
    entry.answer = std::string(detail::trim(raw.substr(tab + 1)));
    if (entry.answer.empty()) {
      throw Error(ErrorCode::MalformedRuleFile, "line " + std::to_string(number) + " has an empty answer");
    }
    entries.push_back(std::move(entry));
  }
  return RuleTable(std::move(entries));
}

std::string format_rules(const RuleTable& rules) {
  std::string out;
  for (const auto& rule : rules.rules()) {
    for (std::size_t i = 0; i < rule.keywords.size(); ++i) {
      if (i) out += '&';
      out += rule.keywords[i];
    }
    out += '\t';
    out += rule.answer;
    out += '\n';
  }
  return out;
}

RuleTable load_rules_file(const std::filesystem::path& path) { return parse_rules(detail::read_text_file(path)); }

}  // namespace guide
