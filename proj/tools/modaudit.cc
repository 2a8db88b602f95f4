// Copyright 2026 The modaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// modaudit: command-line front end for the moderation audit harness.
//
//   modaudit serve <channel-config> <lexicon> [--channel more.json] [--host H] [--port P]
//   modaudit run --recipe <name> --config <file> [overrides]
//   modaudit score <records.jsonl> --labels <corpus.jsonl> [--json]
//   modaudit report <run-dir>
//
// Exit codes: 0 success, 2 config error, 3 session error, 4 scoring error.

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "modaudit/datasets.h"
#include "modaudit/errors.h"
#include "modaudit/lexicon.h"
#include "modaudit/metrics.h"
#include "modaudit/mock_server.h"
#include "modaudit/moderation.h"
#include "modaudit/net.h"
#include "modaudit/reconciler.h"
#include "modaudit/report.h"
#include "modaudit/run.h"
#include "modaudit/transport.h"

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kSession = 3;
constexpr int kScoring = 4;

int Serve(const std::vector<std::string>& configs, const std::string& lexicon_path,
          const std::string& host, uint16_t port) {
  auto lexicon = std::make_shared<const modaudit::Lexicon>(modaudit::Lexicon::LoadJsonl(lexicon_path));
  std::vector<modaudit::ChannelState> channels;
  for (const auto& c : configs) channels.push_back(modaudit::LoadChannelConfig(c, lexicon));

  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  modaudit::MockServer server(std::move(channels));
  const uint16_t bound = server.Start(host, port);
  std::cout << "listening on " << host << ":" << bound << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  server.Stop();
  const auto& st = server.stats();
  std::cerr << "sends=" << st.sends << " echoes=" << st.echoes << " events=" << st.events
            << " prefiltered=" << st.prefiltered << " errors=" << st.errors << "\n";
  return kOk;
}

int Score(const std::string& records_path, const std::string& labels_path, bool json) {
  std::ifstream in(records_path);
  if (!in) throw modaudit::ConfigError("cannot open " + records_path);
  const auto records = modaudit::ReadRecords(in);
  const auto corpus = modaudit::ReadCorpus(std::filesystem::path(labels_path));
  const auto scored = modaudit::JoinLabels(records, corpus);
  modaudit::Table t = modaudit::RatesTable({{"all", modaudit::rates(modaudit::confusion(scored))}});
  if (json) {
    std::cout << modaudit::ToJson(t).dump(2) << "\n";
  } else {
    modaudit::WriteCsv(std::cout, t);
  }
  return kOk;
}

void PrintSummary(const modaudit::RunSummary& s) {
  std::cout << "run dir: " << s.run_dir.string() << "\n"
            << "sessions: " << s.sessions << "  sent: " << s.sent << "  skipped: " << s.skipped
            << "  conflicts: " << s.conflicts << "\n";
  for (const auto& r : s.reports) std::cout << "  " << r.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Black-box audit harness for chat moderation services"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "Start the reference moderation service");
  std::string channel_config;
  std::vector<std::string> channel_configs;
  std::string lexicon;
  std::string host = "127.0.0.1";
  uint16_t port = 7777;
  serve->add_option("channel-config", channel_config, "Channel config JSON")->required();
  serve->add_option("lexicon", lexicon, "Lexicon JSONL")->required();
  serve->add_option("--channel", channel_configs, "Additional channel config JSON");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks one)");

  auto* run = app.add_subcommand("run", "Run or resume an experiment recipe");
  std::string config_path;
  modaudit::RunOverrides ov;
  bool quiet = false;
  run->add_option("--config", config_path, "Run config JSON")->required();
  run->add_option("--recipe", ov.recipe, "Recipe name");
  run->add_option("--run-id", ov.run_id, "Run id");
  run->add_option("--active", ov.active, "Active criteria, comma-separated");
  run->add_option("--level", ov.level, "N, or Crit=N,...");
  run->add_option("--rate-limit", ov.rate_limit, "Messages per window");
  run->add_option("--endpoint", ov.endpoint, "loopback or host:port");
  run->add_option("--timeout", ov.timeout_s, "Prefilter timeout in seconds");
  run->add_option("--out", ov.out, "Output directory");
  run->add_flag("--quiet", quiet, "No progress output");

  auto* score = app.add_subcommand("score", "Score reconciled records against labels");
  std::string records_path;
  std::string labels_path;
  bool json = false;
  score->add_option("records", records_path, "records.jsonl")->required();
  score->add_option("--labels", labels_path, "Corpus JSONL with labels")->required();
  score->add_flag("--json", json, "JSON instead of CSV");

  auto* rep = app.add_subcommand("report", "Rebuild the reports of a finished run");
  std::string run_dir;
  rep->add_option("run-dir", run_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*serve) {
      channel_configs.insert(channel_configs.begin(), channel_config);
      return Serve(channel_configs, lexicon, host, port);
    }
    if (*run) {
      auto config = modaudit::RunConfig::Load(config_path);
      modaudit::ApplyOverrides(config, ov);
      PrintSummary(modaudit::run(config, quiet ? nullptr : &std::cerr));
      return kOk;
    }
    if (*score) return Score(records_path, labels_path, json);
    if (*rep) {
      PrintSummary(modaudit::report(run_dir, &std::cerr));
      return kOk;
    }
  } catch (const modaudit::SessionError& e) {
    std::cerr << "session error: " << e.what() << "\n";
    return kSession;
  } catch (const modaudit::IncompleteSessionError& e) {
    std::cerr << "session error: " << e.what() << "\n";
    return kSession;
  } catch (const modaudit::net::ConnectionClosed& e) {
    std::cerr << "session error: " << e.what() << "\n";
    return kSession;
  } catch (const modaudit::ScoringError& e) {
    std::cerr << "scoring error: " << e.what() << "\n";
    return kScoring;
  } catch (const modaudit::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
