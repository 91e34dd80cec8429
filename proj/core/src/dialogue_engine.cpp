#include "guide/dialogue_engine.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "text_util.hpp"

namespace guide {

namespace {

using S = DialogueState;
using C = Condition;

// The arcs below are rebuilt from the conversation walkthrough and the
// state/condition table. Two are reconstructions not forced by the prose:
// the AskingName retry cap (handled in apply()) and SavingNameFace chaining
// into GreetingByName.
constexpr std::array kArcs{
    Arc{S::Standby, C::A, S::Introduction},
    Arc{S::Introduction, C::B, S::GreetingByName},
    Arc{S::Introduction, C::NotB, S::AskingName},
    Arc{S::AskingName, C::C, S::SavingNameFace},
    Arc{S::AskingName, C::NotC, S::AskingName},
    Arc{S::SavingNameFace, C::Auto, S::GreetingByName},  // reconstruction
    Arc{S::GreetingByName, C::D, S::ReplyingGreeting},
    Arc{S::GreetingByName, C::NotD, S::AskingRequest},
    Arc{S::ReplyingGreeting, C::Auto, S::AskingRequest},
    Arc{S::AskingRequest, C::E, S::ExplainingProduct},
    Arc{S::AskingRequest, C::F, S::Dancing},
    Arc{S::AskingRequest, C::G, S::Singing},
    Arc{S::AskingRequest, C::J, S::PosingForPicture},
    Arc{S::AskingRequest, C::H, S::AnsweringFirstQuestion},
    Arc{S::AskingRequest, C::NotH, S::AskingRequest},
    Arc{S::AskingRequest, C::I, S::Goodbye},
    // States 9-13 finish when their action completes.
    Arc{S::ExplainingProduct, C::Auto, S::AskingAnythingElse},
    Arc{S::Dancing, C::Auto, S::AskingAnythingElse},
    Arc{S::Singing, C::Auto, S::AskingAnythingElse},
    Arc{S::PosingForPicture, C::Auto, S::AskingAnythingElse},
    Arc{S::AnsweringFirstQuestion, C::Auto, S::AskingAnythingElse},
    Arc{S::AskingAnythingElse, C::H, S::AnsweringQuestion},
    Arc{S::AskingAnythingElse, C::I, S::Goodbye},
    Arc{S::AnsweringQuestion, C::Auto, S::AskingAnythingElse},
    Arc{S::Goodbye, C::Auto, S::Standby},
};

constexpr std::string_view kIntroduction =
    "Hello, I am Lumen. I am robot guide and you are now in Lumen Super Intelligence Agent stand.";
constexpr std::string_view kAskName = "What is your name?";
constexpr std::string_view kAskNameAgain = "Sorry, I did not catch that. What is your name?";
constexpr std::string_view kGoodbye = "Thank you for visiting. Goodbye!";
constexpr std::string_view kUnrecognized = "I am sorry, I do not understand your question.";
constexpr std::string_view kPicture = "Sure, let's take a picture together.";
constexpr std::string_view kAnythingElse = "Is there anything else I can help you with?";

const Arc* find_arc(S from, C condition) {
  const auto it = std::find_if(kArcs.begin(), kArcs.end(),
                               [&](const Arc& a) { return a.from == from && a.condition == condition; });
  return it == kArcs.end() ? nullptr : &*it;
}

bool awaits_action_completion(S s) {
  return s == S::ExplainingProduct || s == S::Dancing || s == S::Singing || s == S::PosingForPicture ||
         s == S::AnsweringFirstQuestion;
}

bool leaves_immediately(S s) {
  return s == S::SavingNameFace || s == S::ReplyingGreeting || s == S::AnsweringQuestion || s == S::Goodbye;
}

std::string lowercase(std::string_view s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string title_case(std::string_view s) {
  std::string out;
  bool start = true;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    out += static_cast<char>(start ? std::toupper(u) : std::tolower(u));
    start = std::isspace(u) != 0;
  }
  return out;
}

}  // namespace

std::optional<DialogueState> state_from_id(int id) noexcept {
  if (id < 1 || id > kStateCount) return std::nullopt;
  return static_cast<DialogueState>(id);
}

std::string_view describe(DialogueState s) noexcept {
  switch (s) {
    case S::Standby: return "Standby.";
    case S::Introduction: return "Stand, face recognizing, face tracking, introduction.";
    case S::AskingName: return "Asking name.";
    case S::GreetingByName: return "Greeting with people's name.";
    case S::SavingNameFace: return "Saving new name and face.";
    case S::Goodbye: return "Saying goodbye, waving hand.";
    case S::ReplyingGreeting: return "Replying greeting.";
    case S::AskingRequest: return "Asking if there's any request.";
    case S::ExplainingProduct: return "Explaining about the product in stand.";
    case S::Dancing: return "Dancing.";
    case S::Singing: return "Singing.";
    case S::PosingForPicture: return "Making pose to take picture.";
    case S::AnsweringFirstQuestion: return "Answer first question.";
    case S::AskingAnythingElse: return "Asking if there's anything else.";
    case S::AnsweringQuestion: return "Answering a question.";
  }
  return "";
}

std::string_view to_string(Condition c) noexcept {
  switch (c) {
    case C::A: return "A";
    case C::NotA: return "!A";
    case C::B: return "B";
    case C::NotB: return "!B";
    case C::C: return "C";
    case C::NotC: return "!C";
    case C::D: return "D";
    case C::NotD: return "!D";
    case C::E: return "E";
    case C::F: return "F";
    case C::G: return "G";
    case C::H: return "H";
    case C::NotH: return "!H";
    case C::I: return "I";
    case C::J: return "J";
    case C::Timeout20s: return "TIMEOUT20S";
    case C::Auto: return "AUTO";
  }
  return "";
}

std::optional<Condition> parse_condition(std::string_view text) noexcept {
  for (int i = 0; i <= static_cast<int>(C::Auto); ++i) {
    const auto c = static_cast<Condition>(i);
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::string_view describe(Condition c) noexcept {
  switch (c) {
    case C::A: return "There is people.";
    case C::NotA: return "No people.";
    case C::B: return "Face recognized.";
    case C::NotB: return "Face unrecognized.";
    case C::C: return "There is name respond.";
    case C::NotC: return "No name respond.";
    case C::D: return "There is greeting respond.";
    case C::NotD: return "No greeting respond.";
    case C::E: return "Request for explaining product.";
    case C::F: return "Request for dancing.";
    case C::G: return "Request for playing music.";
    case C::H: return "Question recognized.";
    case C::NotH: return "Question unrecognized.";
    case C::I: return "User don't respond anything else.";
    case C::J: return "Request for take a picture with Lumen.";
    case C::Timeout20s: return "Face out of view for 20 seconds.";
    case C::Auto: return "State completed.";
  }
  return "";
}

std::string_view to_string(Posture p) noexcept {
  switch (p) {
    case Posture::Stand: return "Stand";
    case Posture::StandInit: return "StandInit";
    case Posture::StandZero: return "StandZero";
    case Posture::Sit: return "Sit";
    case Posture::SitRelax: return "SitRelax";
    case Posture::Crouch: return "Crouch";
  }
  return "";
}

std::string describe(const RobotAction& a) {
  struct Visitor {
    std::string operator()(const action::Speak& s) const { return "Speak(\"" + s.text + "\")"; }
    std::string operator()(const action::ChangePosture& p) const {
      return "Posture(" + std::string(to_string(p.posture)) + ")";
    }
    std::string operator()(const action::Dance&) const { return "Dance"; }
    std::string operator()(const action::PlaySong&) const { return "PlaySong"; }
    std::string operator()(const action::WaveHands&) const { return "WaveHands"; }
    std::string operator()(const action::PosePicture&) const { return "PosePicture"; }
    std::string operator()(const action::SaveNameFace& s) const { return "SaveNameFace(\"" + s.name + "\")"; }
  };
  return std::visit(Visitor{}, a);
}

std::span<const Arc> transition_table() noexcept { return kArcs; }

std::string export_transition_table() {
  std::ostringstream out;
  for (const auto& arc : kArcs) {
    out << state_id(arc.from) << ", " << to_string(arc.condition) << " -> " << state_id(arc.to) << '\n';
  }
  out << state_id(S::AskingName) << ", " << to_string(C::NotC) << " [retries=" << kMaxNameRetries << "] -> "
      << state_id(S::AskingRequest) << '\n';
  for (int id = state_id(S::Introduction); id <= kStateCount; ++id) {
    out << id << ", " << to_string(C::Timeout20s) << " -> " << state_id(S::Goodbye) << '\n';
  }
  return out.str();
}

std::vector<std::string> trace_lines(const Transition& t) {
  std::vector<std::string> lines;
  for (const auto& step : t.steps) {
    const std::string prefix =
        "STATE " + std::to_string(state_id(step.to)) + " | COND " + std::string(to_string(step.condition)) + " | ACTION ";
    if (step.actions.empty()) lines.push_back(prefix + "none");
    for (const auto& a : step.actions) lines.push_back(prefix + describe(a));
  }
  return lines;
}

std::string greet_response(std::string_view answer_text) {
  const auto tokens = normalize(answer_text);
  const auto fine = std::find(tokens.begin(), tokens.end(), "fine");
  if (fine != tokens.end()) {
    if (fine != tokens.begin() && *(fine - 1) == "not") return "I am sorry to hear that, get well soon.";
    return "I am happy to hear that";
  }
  return "Sorry, I did not catch that. How are you today?";
}

std::string honorific(GenderLabel gender) { return gender == GenderLabel::Male ? "Sir" : "Ma'am"; }

std::string help_prompt(std::optional<GenderLabel> gender) {
  if (!gender) return "what can I help you?";
  return "what can I help you, " + honorific(*gender) + "?";
}

std::string extract_visitor_name(std::string_view utterance) {
  std::string text(detail::trim(utterance));
  while (!text.empty() && std::ispunct(static_cast<unsigned char>(text.back()))) text.pop_back();
  const std::string lower = lowercase(text);
  for (std::string_view lead : {"my name is ", "i am ", "i'm ", "call me ", "it's ", "it is "}) {
    if (lower.starts_with(lead)) {
      text = text.substr(lead.size());
      break;
    }
  }
  return title_case(detail::trim(text));
}

DialogueEngine::DialogueEngine(RuleTable rules) : rules_(std::move(rules)) {}

std::vector<RobotAction> DialogueEngine::entry_actions(const SessionContext& entered, DialogueState from,
                                                       Condition condition, std::string_view utterance) const {
  using namespace action;
  std::vector<RobotAction> out;
  switch (entered.state) {
    case S::Standby:
      break;
    case S::Introduction:
      out.emplace_back(ChangePosture{Posture::Stand});
      out.emplace_back(Speak{std::string(kIntroduction)});
      break;
    case S::AskingName:
      out.emplace_back(Speak{std::string(from == S::AskingName ? kAskNameAgain : kAskName)});
      break;
    case S::GreetingByName: {
      std::string greeting = "good morning, how are you today";
      if (entered.visitor_name && !entered.visitor_name->empty()) greeting += " " + *entered.visitor_name;
      out.emplace_back(Speak{greeting + "?"});
      break;
    }
    case S::SavingNameFace:
      out.emplace_back(SaveNameFace{entered.visitor_name.value_or("")});
      break;
    case S::Goodbye:
      out.emplace_back(Speak{std::string(kGoodbye)});
      out.emplace_back(WaveHands{});
      out.emplace_back(ChangePosture{Posture::Sit});
      break;
    case S::ReplyingGreeting:
      out.emplace_back(Speak{greet_response(utterance)});
      break;
    case S::AskingRequest:
      if (condition == C::NotH) out.emplace_back(Speak{std::string(kUnrecognized)});
      out.emplace_back(Speak{help_prompt(entered.visitor_gender)});
      break;
    case S::ExplainingProduct:
      out.emplace_back(Speak{std::string(answers::kExplain)});
      break;
    case S::Dancing:
      out.emplace_back(Speak{std::string(answers::kDance)});
      out.emplace_back(Dance{});
      break;
    case S::Singing:
      out.emplace_back(Speak{std::string(answers::kSing)});
      out.emplace_back(PlaySong{});
      break;
    case S::PosingForPicture:
      out.emplace_back(Speak{std::string(kPicture)});
      out.emplace_back(PosePicture{});
      break;
    case S::AnsweringFirstQuestion:
    case S::AnsweringQuestion:
      if (auto answer = respond(rules_, utterance)) out.emplace_back(Speak{std::move(*answer)});
      break;
    case S::AskingAnythingElse:
      out.emplace_back(Speak{std::string(kAnythingElse)});
      break;
  }
  return out;
}

void DialogueEngine::apply(Transition& t, Condition condition, std::string_view utterance) const {
  SessionContext ctx = t.context;
  const S from = ctx.state;

  S to;
  if (condition == C::Timeout20s) {
    if (from == S::Standby) return;
    to = S::Goodbye;
  } else if (const Arc* arc = find_arc(from, condition)) {
    to = arc->to;
  } else {
    return;
  }

  switch (condition) {
    case C::A:
    case C::B:
      ctx.seconds_since_face_seen = 0.0;
      break;
    case C::Timeout20s:
      ctx.seconds_since_face_seen = 0.0;
      break;
    default:
      break;
  }
  if (condition == C::B && !detail::trim(utterance).empty()) ctx.visitor_name = title_case(detail::trim(utterance));
  if (condition == C::C) ctx.visitor_name = extract_visitor_name(utterance);

  if (from == S::AskingName && condition == C::NotC) {
    // Reconstruction: re-ask at most twice, then move on without a name.
    if (ctx.name_retries >= kMaxNameRetries) {
      to = S::AskingRequest;
    } else {
      ++ctx.name_retries;
    }
  } else if (to == S::AskingName) {
    ctx.name_retries = 0;
  }

  ctx.state = to;
  if (to == S::Standby) {
    ctx.visitor_name.reset();
    ctx.visitor_gender.reset();
    ctx.name_retries = 0;
  }

  auto actions = entry_actions(ctx, from, condition, utterance);
  t.actions.insert(t.actions.end(), actions.begin(), actions.end());
  t.steps.push_back(Step{from, condition, to, std::move(actions)});
  t.context = std::move(ctx);
}

Transition DialogueEngine::next(const SessionContext& context, Condition condition, std::string_view utterance) const {
  Transition t{context, {}, {}};
  apply(t, condition, utterance);
  return t;
}

Transition DialogueEngine::advance(const SessionContext& context, Condition condition,
                                   std::string_view utterance) const {
  Transition t{context, {}, {}};
  if (condition != C::Timeout20s && condition != C::Auto && awaits_action_completion(t.context.state) &&
      !find_arc(t.context.state, condition)) {
    apply(t, C::Auto, {});
  }
  apply(t, condition, utterance);
  while (leaves_immediately(t.context.state)) apply(t, C::Auto, {});
  return t;
}

Transition DialogueEngine::face_absent(const SessionContext& context, double elapsed_seconds) const {
  SessionContext ctx = context;
  ctx.seconds_since_face_seen += std::max(0.0, elapsed_seconds);
  if (ctx.state == S::Standby || ctx.seconds_since_face_seen < kFaceTimeoutSeconds) return Transition{ctx, {}, {}};
  return advance(ctx, C::Timeout20s);
}

}  // namespace guide
