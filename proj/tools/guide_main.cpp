// guide: command-line front end for the exhibition guide audio toolkit.

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include <CLI11.hpp>

#include "guide/audio_io.hpp"
#include "guide/config.hpp"
#include "guide/dialogue_engine.hpp"
#include "guide/errors.hpp"
#include "guide/gender_id.hpp"
#include "guide/pipeline.hpp"
#include "guide/spectral.hpp"
#include "guide/speech_services.hpp"

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<guide::PcmSignal> read_all(const std::vector<std::string>& paths) {
  std::vector<guide::PcmSignal> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(guide::read_wav_file(p));
  return out;
}

std::string hz(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << v;
  return s.str();
}

struct ManifestRow {
  fs::path path;
  std::string second;
};

// TAB separated two-column file; relative paths resolve against the manifest.
std::vector<ManifestRow> read_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw guide::Error(guide::ErrorCode::IoError, "cannot open " + manifest.string());
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw guide::Error(guide::ErrorCode::IoError,
                         manifest.string() + ":" + std::to_string(number) + ": expected 'path<TAB>value'");
    }
    fs::path path = trim(line.substr(0, tab));
    if (path.is_relative()) path = manifest.parent_path() / path;
    rows.push_back({path, trim(line.substr(tab + 1))});
  }
  return rows;
}

// Flags shared by the commands that build a pipeline configuration.
struct CommonFlags {
  std::optional<std::string> config_file;
  guide::ConfigOverrides overrides;

  void attach(CLI::App* cmd, bool asr) {
    cmd->add_option("--config", config_file, "key = value configuration file");
    cmd->add_option("--band-low", overrides.band_low_hz, "lower edge of the peak search band (Hz)");
    cmd->add_option("--band-high", overrides.band_high_hz, "upper edge of the peak search band (Hz)");
    if (asr) {
      cmd->add_option("--endpoint", overrides.asr_endpoint, "recognition service URL (env GUIDE_ASR_ENDPOINT)");
      cmd->add_option("--language", overrides.language_tag, "language tag sent with uploads");
      cmd->add_option("--retries", overrides.asr_retries, "result polls after the first");
      cmd->add_option("--retry-delay-ms", overrides.asr_retry_delay_ms, "delay between result polls");
    }
  }

  guide::PipelineConfig resolve() const {
    std::optional<fs::path> file;
    if (config_file) file = *config_file;
    return guide::resolve_config(file, overrides);
  }
};

int cmd_train(const std::vector<std::string>& male, const std::vector<std::string>& female, const std::string& output,
              const CommonFlags& flags) {
  const auto config = flags.resolve();
  const auto model = guide::train(read_all(male), read_all(female), config.band);
  for (std::size_t i = 0; i < male.size(); ++i) {
    std::cout << "male   " << male[i] << ": " << hz(model.male_peaks_hz()[i]) << " Hz\n";
  }
  for (std::size_t i = 0; i < female.size(); ++i) {
    std::cout << "female " << female[i] << ": " << hz(model.female_peaks_hz()[i]) << " Hz\n";
  }
  for (const auto& w : model.warnings()) std::cerr << "warning: " << w << '\n';
  if (!output.empty()) guide::save_model_file(output, model);
  std::cout << "threshold: " << model.display_threshold_hz() << " Hz\n";
  return 0;
}

int cmd_identify(const std::string& model_path, const std::vector<std::string>& files, bool show_peak,
                 const CommonFlags& flags) {
  auto config = flags.resolve();
  const auto model = guide::load_model_file(model_path);
  if (!flags.overrides.band_low_hz && !flags.overrides.band_high_hz && !flags.config_file) config.band = model.band();
  for (const auto& file : files) {
    const auto feature = guide::peak_feature(guide::read_wav_file(file), config.band);
    const auto label = guide::classify(model, feature);
    if (files.size() > 1) std::cout << file << '\t';
    std::cout << guide::to_string(label);
    if (show_peak) std::cout << '\t' << hz(feature.peak_frequency_hz) << " Hz";
    std::cout << '\n';
  }
  return 0;
}

int cmd_fft(const std::string& file, int top, const CommonFlags& flags) {
  const auto config = flags.resolve();
  const auto signal = guide::read_wav_file(file);
  const auto spectrum = guide::fft(signal);
  const auto feature = guide::extract_peak(spectrum, config.band);
  std::cout << "samples: " << signal.size() << '\n'
            << "sample_rate_hz: " << signal.sample_rate_hz() << '\n'
            << "fft_size: " << spectrum.fft_size() << '\n'
            << "bin_width_hz: " << std::setprecision(6) << spectrum.bin_width_hz() << '\n'
            << "band_hz: " << config.band.low_hz << " - " << config.band.high_hz << '\n'
            << "peak_frequency_hz: " << hz(feature.peak_frequency_hz) << '\n'
            << "peak_magnitude: " << std::setprecision(10) << feature.peak_magnitude << '\n';
  if (top > 0) {
    std::vector<std::size_t> bins;
    for (std::size_t k = 0; k < spectrum.magnitudes().size(); ++k) {
      const double f = spectrum.bin_frequency_hz(k);
      if (f >= config.band.low_hz && f <= config.band.high_hz) bins.push_back(k);
    }
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(top), bins.size());
    std::partial_sort(bins.begin(), bins.begin() + static_cast<std::ptrdiff_t>(count), bins.end(),
                      [&](std::size_t a, std::size_t b) {
                        const auto m = spectrum.magnitudes();
                        return m[a] != m[b] ? m[a] > m[b] : a < b;
                      });
    for (std::size_t i = 0; i < count; ++i) {
      std::cout << "  " << hz(spectrum.bin_frequency_hz(bins[i])) << " Hz\t" << spectrum.magnitudes()[bins[i]] << '\n';
    }
  }
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& manifest, const CommonFlags& flags) {
  auto config = flags.resolve();
  const auto model = guide::load_model_file(model_path);
  if (!flags.overrides.band_low_hz && !flags.overrides.band_high_hz && !flags.config_file) config.band = model.band();

  std::vector<guide::LabeledFeature> labeled;
  std::vector<fs::path> paths;
  for (const auto& row : read_manifest(manifest)) {
    const auto expected = guide::parse_gender_label(row.second);
    if (!expected) {
      throw guide::Error(guide::ErrorCode::IoError, "unknown gender label '" + row.second + "' for " + row.path.string());
    }
    labeled.push_back({guide::peak_feature(guide::read_wav_file(row.path), config.band), *expected});
    paths.push_back(row.path);
  }
  const auto report = guide::evaluate(model, labeled);
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const auto& o = report.per_sample[i];
    std::cout << paths[i].filename().string() << '\t' << hz(labeled[i].feature.peak_frequency_hz) << " Hz\texpected "
              << guide::to_string(o.expected) << "\tpredicted " << guide::to_string(o.predicted)
              << (o.correct() ? "" : "\tMISS") << '\n';
  }
  std::cout << "correct: " << report.correct() << " / " << report.total() << '\n';
  std::cout << "accuracy: " << std::fixed << std::setprecision(1) << report.accuracy_percent << "%\n";
  return 0;
}

int cmd_transcribe(const std::vector<std::string>& files, const CommonFlags& flags) {
  const auto config = flags.resolve();
  guide::AsrClientOptions options;
  options.endpoint = config.asr_endpoint;
  options.language_tag = config.language_tag;
  options.retries = config.asr_retries;
  options.retry_delay = config.asr_retry_delay;
  const guide::AsrClient client(options);
  for (const auto& file : files) {
    const auto signal = guide::read_wav_file(file);
    std::cout << "starting recognition...\n" << std::flush;
    const auto transcript = client.recognize(signal);
    std::cout << "language : " << options.language_tag << '\n'
              << "recognized words : " << transcript.text << "\n\n";
  }
  return 0;
}

int cmd_say(const std::string& text, const std::string& output, uint32_t rate) {
  const auto signal = guide::synthesize(text, rate);
  guide::write_wav_file(output, signal);
  std::cout << "wrote " << output << " (" << signal.size() << " samples @" << rate << " Hz)\n";
  return 0;
}

int cmd_converse(const std::optional<std::string>& script, const CommonFlags& flags) {
  auto session = guide::GuideSession::from_config(flags.resolve());
  if (script) {
    std::ifstream in(*script);
    if (!in) throw guide::Error(guide::ErrorCode::IoError, "cannot open " + *script);
    return guide::run_conversation(session, in, std::cout, std::cerr);
  }
  return guide::run_conversation(session, std::cin, std::cout, std::cerr);
}

int cmd_serve_mock(const std::string& host, int port, const std::optional<std::string>& manifest,
                   const std::vector<std::string>& fingerprints, int pending_polls) {
  guide::MockAsrServer::TranscriptTable table;
  const auto codec = guide::CodecBoundary::wav_passthrough();
  if (manifest) {
    for (const auto& row : read_manifest(*manifest)) {
      table[guide::fingerprint(codec.encode(guide::read_wav_file(row.path)))] = row.second;
    }
  }
  for (const auto& item : fingerprints) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw guide::Error(guide::ErrorCode::InvalidConfig, "--prime-fingerprint expects fingerprint=text");
    }
    table[item.substr(0, eq)] = item.substr(eq + 1);
  }

  // SIGINT/SIGTERM are taken synchronously by a watcher thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  guide::MockAsrServer server(std::move(table), guide::MockAsrOptions{pending_polls, 0});
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  watcher.detach();

  server.serve_blocking(host, port, [&](int bound) {
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exhibition guide audio toolkit: spectral gender identification, dialogue, speech services"};
  app.require_subcommand(1);

  CommonFlags train_flags, identify_flags, fft_flags, evaluate_flags, transcribe_flags, converse_flags;

  std::vector<std::string> male, female;
  std::string train_output;
  auto* train = app.add_subcommand("train", "fit the gender threshold from labeled WAV recordings");
  train->add_option("--male", male, "male training recordings")->required()->expected(1, -1);
  train->add_option("--female", female, "female training recordings")->required()->expected(1, -1);
  train->add_option("-o,--output", train_output, "model file to write");
  train_flags.attach(train, false);

  std::string identify_model;
  std::vector<std::string> identify_files;
  bool show_peak = false;
  auto* identify = app.add_subcommand("identify", "classify recordings as female or male");
  identify->add_option("--model", identify_model, "model file from `train`")->required();
  identify->add_option("files", identify_files, "WAV recordings")->required();
  identify->add_flag("--show-peak", show_peak, "also print the peak frequency");
  identify_flags.attach(identify, false);

  std::string fft_file;
  int fft_top = 0;
  auto* fft = app.add_subcommand("fft", "print the spectrum peak of a recording");
  fft->add_option("file", fft_file, "WAV recording")->required();
  fft->add_option("--top", fft_top, "also list the N strongest in-band bins");
  fft_flags.attach(fft, false);

  std::string evaluate_model, evaluate_manifest;
  auto* evaluate = app.add_subcommand("evaluate", "recognition accuracy over a labeled manifest");
  evaluate->add_option("--model", evaluate_model, "model file from `train`")->required();
  evaluate->add_option("--labeled", evaluate_manifest, "TSV manifest: path<TAB>female|male")->required();
  evaluate_flags.attach(evaluate, false);

  std::vector<std::string> transcribe_files;
  auto* transcribe = app.add_subcommand("transcribe", "send recordings to the recognition service");
  transcribe->add_option("files", transcribe_files, "WAV recordings")->required();
  transcribe_flags.attach(transcribe, true);

  std::string say_text, say_output = "speech.wav";
  uint32_t say_rate = 44100;
  auto* say = app.add_subcommand("say", "synthesize text to a WAV file with the tone voice");
  say->add_option("text", say_text, "text to speak")->required();
  say->add_option("-o,--output", say_output, "WAV file to write");
  say->add_option("--sample-rate", say_rate, "output sample rate")->check(CLI::PositiveNumber);

  std::optional<std::string> converse_script;
  auto* converse = app.add_subcommand("converse", "interactive conversation over the dialogue state machine");
  converse->add_option("--script", converse_script, "read input lines from a file instead of stdin");
  converse->add_option("--model", converse_flags.overrides.model_path, "gender model file");
  converse->add_option("--rules", converse_flags.overrides.rules_path, "rule file replacing the built-in answers");
  converse->add_option("--output-dir", converse_flags.overrides.output_dir, "directory for synthesized speech");
  converse_flags.attach(converse, true);

  std::string mock_host = "127.0.0.1";
  int mock_port = 8080;
  std::optional<std::string> mock_manifest;
  std::vector<std::string> mock_fingerprints;
  int mock_pending = 0;
  auto* serve = app.add_subcommand("serve-mock", "run the offline recognition service");
  serve->add_option("--host", mock_host, "bind address");
  serve->add_option("--port", mock_port, "port, 0 for any free port");
  serve->add_option("--prime", mock_manifest, "TSV manifest: wav_path<TAB>transcript");
  serve->add_option("--prime-fingerprint", mock_fingerprints, "fingerprint=transcript, repeatable");
  serve->add_option("--pending-polls", mock_pending, "answer 'pending' this many times per session");

  CLI11_PARSE(app, argc, argv);

  const auto* active = app.get_subcommands().front();
  try {
    if (active == train) return cmd_train(male, female, train_output, train_flags);
    if (active == identify) return cmd_identify(identify_model, identify_files, show_peak, identify_flags);
    if (active == fft) return cmd_fft(fft_file, fft_top, fft_flags);
    if (active == evaluate) return cmd_evaluate(evaluate_model, evaluate_manifest, evaluate_flags);
    if (active == transcribe) return cmd_transcribe(transcribe_files, transcribe_flags);
    if (active == say) return cmd_say(say_text, say_output, say_rate);
    if (active == converse) return cmd_converse(converse_script, converse_flags);
    if (active == serve) return cmd_serve_mock(mock_host, mock_port, mock_manifest, mock_fingerprints, mock_pending);
  } catch (const guide::StageError& e) {
    std::cerr << "error " << e.what() << '\n';
    return 1;
  } catch (const guide::Error& e) {
    std::cerr << "error [" << active->get_name() << "] " << e.what() << '\n';
    return 1;
  }
  return 2;
}
