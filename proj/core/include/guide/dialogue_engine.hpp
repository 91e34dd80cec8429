#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "guide/gender_id.hpp"
#include "guide/qa_responder.hpp"

namespace guide {

/// The fifteen conversation states, numbered as in the exhibition script.
enum class DialogueState : int {
  Standby = 1,
  Introduction = 2,
  AskingName = 3,
  GreetingByName = 4,
  SavingNameFace = 5,
  Goodbye = 6,
  ReplyingGreeting = 7,
  AskingRequest = 8,
  ExplainingProduct = 9,
  Dancing = 10,
  Singing = 11,
  PosingForPicture = 12,
  AnsweringFirstQuestion = 13,
  AskingAnythingElse = 14,
  AnsweringQuestion = 15,
};

inline constexpr int kStateCount = 15;

constexpr int state_id(DialogueState s) noexcept { return static_cast<int>(s); }
std::optional<DialogueState> state_from_id(int id) noexcept;
std::string_view describe(DialogueState s) noexcept;

/// Events observed by the robot. Auto is internal: the engine raises it
/// itself to leave states that complete on their own.
enum class Condition {
  A,      // there is a person
  NotA,   // nobody in view
  B,      // face recognized
  NotB,   // face unrecognized
  C,      // the visitor gave a name
  NotC,   // no name given
  D,      // greeting answered
  NotD,   // no greeting answer
  E,      // request to explain the product
  F,      // request to dance
  G,      // request for music
  H,      // question recognized
  NotH,   // question unrecognized
  I,      // nothing else wanted
  J,      // request for a picture
  Timeout20s,
  Auto,
};

std::string_view to_string(Condition c) noexcept;
std::optional<Condition> parse_condition(std::string_view text) noexcept;
std::string_view describe(Condition c) noexcept;

enum class Posture { Stand, StandInit, StandZero, Sit, SitRelax, Crouch };

std::string_view to_string(Posture p) noexcept;

namespace action {
struct Speak {
  std::string text;
  friend bool operator==(const Speak&, const Speak&) = default;
};
struct ChangePosture {
  Posture posture;
  friend bool operator==(const ChangePosture&, const ChangePosture&) = default;
};
struct Dance {
  friend bool operator==(const Dance&, const Dance&) = default;
};
struct PlaySong {
  friend bool operator==(const PlaySong&, const PlaySong&) = default;
};
struct WaveHands {
  friend bool operator==(const WaveHands&, const WaveHands&) = default;
};
struct PosePicture {
  friend bool operator==(const PosePicture&, const PosePicture&) = default;
};
struct SaveNameFace {
  std::string name;
  friend bool operator==(const SaveNameFace&, const SaveNameFace&) = default;
};
}  // namespace action

using RobotAction = std::variant<action::Speak, action::ChangePosture, action::Dance, action::PlaySong,
                                 action::WaveHands, action::PosePicture, action::SaveNameFace>;

/// e.g. `Speak("My name is Lumen")`, `Posture(Sit)`, `Dance`.
std::string describe(const RobotAction& a);

struct SessionContext {
  DialogueState state = DialogueState::Standby;
  std::optional<std::string> visitor_name;
  std::optional<GenderLabel> visitor_gender;
  double seconds_since_face_seen = 0.0;
  int name_retries = 0;

  friend bool operator==(const SessionContext&, const SessionContext&) = default;
};

struct Arc {
  DialogueState from;
  Condition condition;
  DialogueState to;
};

/// Every arc the engine follows, excluding the Timeout20s arcs (any state
/// other than Standby goes to Goodbye) and the retry cap on AskingName.
std::span<const Arc> transition_table() noexcept;

/// Audit listing, one `state, condition -> state` line per arc, including
/// the timeout arcs and the retry-capped name arc.
std::string export_transition_table();

/// One arc taken, with the actions of the state it entered.
struct Step {
  DialogueState from;
  Condition condition;
  DialogueState to;
  std::vector<RobotAction> actions;
};

struct Transition {
  SessionContext context;
  std::vector<RobotAction> actions;
  std::vector<Step> steps;
};

/// `STATE n | COND x | ACTION ...` lines, one per action of every step
/// (`ACTION none` for a step without actions). n is the entered state.
std::vector<std::string> trace_lines(const Transition& t);

/// Reply to the visitor's answer to "how are you".
std::string greet_response(std::string_view answer_text);

std::string honorific(GenderLabel gender);

/// "what can I help you, Sir?"; without a known gender the honorific is
/// left out.
std::string help_prompt(std::optional<GenderLabel> gender);

/// Pulls the name out of replies like "my name is putri" or "I'm Putri".
std::string extract_visitor_name(std::string_view utterance);

inline constexpr int kMaxNameRetries = 2;
inline constexpr double kFaceTimeoutSeconds = 20.0;

/// Conversation state machine. Stateless apart from its rule table; the
/// session lives in SessionContext so one engine can serve many sessions.
class DialogueEngine {
 public:
  explicit DialogueEngine(RuleTable rules = default_rules());

  /// Takes exactly one arc. Unknown (state, condition) pairs return the
  /// context unchanged with no actions. The utterance supplies the name for
  /// B and C, the greeting answer for D and the question for H.
  Transition next(const SessionContext& context, Condition condition, std::string_view utterance = {}) const;

  /// next() plus the engine's own Auto arcs: a pending action in states
  /// 9-13 completes before a condition those states do not handle, and the
  /// instantaneous states 5, 6, 7 and 15 are left immediately.
  Transition advance(const SessionContext& context, Condition condition, std::string_view utterance = {}) const;

  /// Host clock report: the visitor's face has been out of view for another
  /// elapsed_seconds. Fires Timeout20s once the total reaches 20 s.
  Transition face_absent(const SessionContext& context, double elapsed_seconds) const;

  const RuleTable& rules() const noexcept { return rules_; }

 private:
  void apply(Transition& t, Condition condition, std::string_view utterance) const;
  std::vector<RobotAction> entry_actions(const SessionContext& entered, DialogueState from, Condition condition,
                                         std::string_view utterance) const;

  RuleTable rules_;
};

}  // namespace guide
