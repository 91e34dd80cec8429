#include <doctest.h>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "fixtures.hpp"
#include "guide/pipeline.hpp"

extern char** environ;

using namespace guide;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

/// Runs the CLI through the shell with the given arguments.
Result guide_cli(const testing::TempDir& dir, const std::vector<std::string>& args, const std::string& stdin_text = {},
                 const std::string& env = "GUIDE_ASR_ENDPOINT=") {
  std::string cmd = env + " " + quote(GUIDE_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  const auto in = dir / "stdin.txt";
  std::ofstream(in) << stdin_text;
  cmd += " <" + quote(in.string()) + " >" + quote((dir / "stdout.txt").string()) + " 2>" +
         quote((dir / "stderr.txt").string());
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

std::vector<std::string> write_tones(const testing::TempDir& dir, const std::string& prefix,
                                     const std::vector<double>& freqs) {
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const auto p = dir / (prefix + std::to_string(i + 1) + ".wav");
    write_wav_file(p, testing::make_tone(freqs[i]));
    paths.push_back(p.string());
  }
  return paths;
}

std::string train_model(const testing::TempDir& dir) {
  std::vector<std::string> args{"train", "--male"};
  for (auto& p : write_tones(dir, "m", testing::kTrainingMale)) args.push_back(p);
  args.push_back("--female");
  for (auto& p : write_tones(dir, "f", testing::kTrainingFemale)) args.push_back(p);
  const auto model = (dir / "model.txt").string();
  args.insert(args.end(), {"-o", model});
  const auto r = guide_cli(dir, args);
  REQUIRE(r.status == 0);
  return model;
}

/// serve-mock in a child process; stopped with SIGTERM on destruction.
class MockProcess {
 public:
  explicit MockProcess(const std::vector<std::string>& extra) {
    int fds[2];
    REQUIRE(::pipe(fds) == 0);
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, fds[0]);
    std::vector<std::string> args{GUIDE_CLI_PATH, "serve-mock", "--port", "0"};
    args.insert(args.end(), extra.begin(), extra.end());
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    REQUIRE(posix_spawn(&pid_, GUIDE_CLI_PATH, &actions, nullptr, argv.data(), environ) == 0);
    posix_spawn_file_actions_destroy(&actions);
    ::close(fds[1]);
    out_ = ::fdopen(fds[0], "r");
    char line[256] = {};
    REQUIRE(std::fgets(line, sizeof line, out_) != nullptr);
    std::string text(line);
    const std::string prefix = "listening on ";
    REQUIRE(text.starts_with(prefix));
    endpoint_ = text.substr(prefix.size());
    while (!endpoint_.empty() && std::isspace(static_cast<unsigned char>(endpoint_.back()))) endpoint_.pop_back();
  }
  ~MockProcess() {
    ::kill(pid_, SIGTERM);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    if (out_) std::fclose(out_);
  }
  const std::string& endpoint() const { return endpoint_; }

 private:
  pid_t pid_ = -1;
  FILE* out_ = nullptr;
  std::string endpoint_;
};

}  // namespace

TEST_CASE("train prints the threshold") {
  testing::TempDir dir;
  const auto model = train_model(dir);
  const auto r = guide_cli(dir, {"train", "--male", (dir / "m1.wav").string(), "--female", (dir / "f1.wav").string(),
                                 "-o", (dir / "pair.txt").string()});
  CHECK(r.status == 0);
  const auto full = load_model_file(model);
  CHECK(full.display_threshold_hz() == 598);

  std::vector<std::string> args{"train", "--male"};
  for (std::size_t i = 1; i <= 5; ++i) args.push_back((dir / ("m" + std::to_string(i) + ".wav")).string());
  args.push_back("--female");
  for (std::size_t i = 1; i <= 5; ++i) args.push_back((dir / ("f" + std::to_string(i) + ".wav")).string());
  args.insert(args.end(), {"-o", (dir / "again.txt").string()});
  const auto again = guide_cli(dir, args);
  CHECK(again.status == 0);
  CHECK(again.out.find("threshold: 598 Hz\n") != std::string::npos);
  CHECK(again.err.find("warning:") != std::string::npos);  // the classes overlap
  CHECK(load_model_file(dir / "again.txt") == full);
}

TEST_CASE("identify matches the library") {
  testing::TempDir dir;
  const auto model = train_model(dir);
  write_wav_file(dir / "sample.wav", testing::make_tone(623.0));
  auto r = guide_cli(dir, {"identify", "--model", model, (dir / "sample.wav").string()});
  CHECK(r.status == 0);
  CHECK(r.out == "female\n");

  write_wav_file(dir / "low.wav", testing::make_tone(506.0));
  r = guide_cli(dir, {"identify", "--model", model, (dir / "low.wav").string(), "--show-peak"});
  const auto lib = classify(load_model_file(model), peak_feature(read_wav_file(dir / "low.wav")));
  CHECK(r.out.starts_with(std::string(to_string(lib))));
  CHECK(r.out.starts_with("male\t506"));
}

TEST_CASE("evaluate on the recognition manifest") {
  testing::TempDir dir;
  const auto model = train_model(dir);
  const std::vector<double> male{512, 698, 497, 506, 568};
  const std::vector<double> female{623, 676, 628, 576, 639};
  write_tones(dir, "em", male);
  write_tones(dir, "ef", female);
  std::ofstream manifest(dir / "manifest.tsv");
  manifest << "# path\texpected\n";
  for (int i = 1; i <= 5; ++i) manifest << "em" << i << ".wav\tmale\n";
  for (int i = 1; i <= 5; ++i) manifest << "ef" << i << ".wav\tfemale\n";
  manifest.close();
  const auto r = guide_cli(dir, {"evaluate", "--model", model, "--labeled", (dir / "manifest.tsv").string()});
  CHECK(r.status == 0);
  CHECK(r.out.find("correct: 8 / 10\n") != std::string::npos);
  CHECK(r.out.find("accuracy: 80.0%\n") != std::string::npos);
}

TEST_CASE("fft reports the peak") {
  testing::TempDir dir;
  write_wav_file(dir / "tone.wav", testing::make_tone(440.0));
  const auto r = guide_cli(dir, {"fft", (dir / "tone.wav").string(), "--top", "3"});
  CHECK(r.status == 0);
  CHECK(r.out.find("fft_size: 65536\n") != std::string::npos);
  CHECK(r.out.find("peak_frequency_hz: 440.1\n") != std::string::npos);
}

TEST_CASE("say writes the tone rendering") {
  testing::TempDir dir;
  const auto out = dir / "hi.wav";
  const auto r = guide_cli(dir, {"say", "hi", "-o", out.string()});
  CHECK(r.status == 0);
  CHECK(read_wav_file(out) == synthesize("hi"));
}

TEST_CASE("transcribe against the mock server") {
  testing::TempDir dir;
  const auto clip = testing::make_tone(310.0, 1.5);
  write_wav_file(dir / "hello.wav", clip);
  MockAsrServer server;
  server.prime(fingerprint(write_wav(clip)), "hello my friend");
  server.start();

  auto r = guide_cli(dir, {"transcribe", "--endpoint", server.endpoint(), (dir / "hello.wav").string()});
  CHECK(r.status == 0);
  CHECK(r.out == "starting recognition...\nlanguage : en-us\nrecognized words : hello my friend\n\n");

  // The environment supplies the endpoint when no flag is given.
  r = guide_cli(dir, {"transcribe", (dir / "hello.wav").string()}, {}, "GUIDE_ASR_ENDPOINT=" + server.endpoint());
  CHECK(r.out.find("recognized words : hello my friend") != std::string::npos);
}

TEST_CASE("serve-mock runs as a separate process") {
  testing::TempDir dir;
  const auto clip = testing::make_tone(180.0, 0.4);
  write_wav_file(dir / "short.wav", clip);
  std::ofstream(dir / "prime.tsv") << "short.wav\ta war\n";
  MockProcess mock({"--prime", (dir / "prime.tsv").string()});
  AsrClientOptions options;
  options.endpoint = mock.endpoint();
  CHECK(AsrClient(options).recognize(clip).text == "a war");

  const auto r = guide_cli(dir, {"transcribe", "--endpoint", mock.endpoint(), (dir / "short.wav").string()});
  CHECK(r.out.find("recognized words : a war") != std::string::npos);
}

TEST_CASE("converse matches the library loop") {
  testing::TempDir dir;
  const std::string script = "/person\n/face Putri\nI am fine\nwhat is your name\nno thanks\n";
  const auto r = guide_cli(dir, {"converse", "--output-dir", (dir / "cli").string()}, script);
  CHECK(r.status == 0);

  PipelineConfig config;
  config.output_dir = dir / "cli";
  auto session = GuideSession::from_config(config);
  std::istringstream in(script);
  std::ostringstream out, err;
  CHECK(run_conversation(session, in, out, err) == 0);
  CHECK(r.out == out.str());
  CHECK(r.out.find("STATE 13 | COND H | ACTION Speak(\"My name is Lumen\")\n") != std::string::npos);
}

TEST_CASE("failures exit nonzero with a tagged message") {
  testing::TempDir dir;
  write_wav_file(dir / "tone.wav", testing::make_tone(440.0, 0.1));

  auto r = guide_cli(dir, {"identify", "--model", (dir / "missing.txt").string(), (dir / "tone.wav").string()});
  CHECK(r.status != 0);
  CHECK(r.err.starts_with("error [identify] IoError"));

  r = guide_cli(dir, {"transcribe", "--endpoint", "http://127.0.0.1:1", (dir / "tone.wav").string()});
  CHECK(r.status != 0);
  CHECK(r.err.find("TransportError") != std::string::npos);

  r = guide_cli(dir, {"converse", "--model", (dir / "missing.txt").string()}, "/quit\n");
  CHECK(r.status != 0);
  CHECK(r.err.find("[setup]") != std::string::npos);

  r = guide_cli(dir, {"fft", (dir / "stdin.txt").string()});
  CHECK(r.status != 0);
  CHECK(r.err.find("MalformedContainer") != std::string::npos);

  r = guide_cli(dir, {"no-such-command"});
  CHECK(r.status != 0);
}
