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

#include "modaudit/run.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "modaudit/errors.h"
#include "modaudit/lexicon.h"
#include "modaudit/metrics.h"
#include "modaudit/mock_server.h"
#include "modaudit/moderation.h"
#include "modaudit/probes.h"
#include "modaudit/reconciler.h"
#include "modaudit/report.h"

namespace modaudit {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Utilities

std::string Sha256Hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

std::vector<std::size_t> Permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  std::mt19937_64 rng(seed);
  // Bounded draws by rejection so the result does not depend on the
  // standard library's distribution implementation.
  for (std::size_t i = n; i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = rng();
    } while (x >= limit);
    std::swap(p[i - 1], p[x % bound]);
  }
  return p;
}

namespace {

Duration Ms(double ms) { return Duration(static_cast<std::int64_t>(std::llround(ms * 1000.0))); }
double ToMs(Duration d) { return static_cast<double>(d.count()) / 1000.0; }

fs::path Resolve(const std::string& p, const fs::path& base) {
  if (p.empty()) return {};
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return fs::absolute(path).lexically_normal();
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string FileHash(const fs::path& path) {
  return path.empty() ? std::string() : Sha256Hex(ReadFile(path));
}

std::vector<std::string> SplitList(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) end = s.size();
    std::string item(s.substr(start, end - start));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

int ParseInt(const std::string& s, std::string_view what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + ": not an integer: " + s);
  }
}

std::string SafeName(std::string_view label) {
  std::string out;
  for (char c : label) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out;
}

ordered_json RateToJson(const RateConfig& rc) {
  ordered_json j;
  j["window_limit"] = rc.window_limit;
  j["window_ms"] = ToMs(rc.window);
  j["batch_size"] = rc.batch_size;
  j["intra_gap_ms"] = ToMs(rc.intra_gap);
  j["batch_pause_ms"] = ToMs(rc.batch_pause);
  j["pause_mode"] = rc.pause_mode == PauseMode::kAdditive ? "additive" : "replace";
  return j;
}

RateConfig RateFromJson(const nlohmann::json& j) {
  RateConfig rc;
  rc.window_limit = j.value("window_limit", rc.window_limit);
  if (j.contains("window_ms")) rc.window = Ms(j["window_ms"].get<double>());
  rc.batch_size = j.value("batch_size", rc.batch_size);
  if (j.contains("intra_gap_ms")) rc.intra_gap = Ms(j["intra_gap_ms"].get<double>());
  if (j.contains("batch_pause_ms")) rc.batch_pause = Ms(j["batch_pause_ms"].get<double>());
  const std::string mode = j.value("pause_mode", "additive");
  if (mode == "additive") {
    rc.pause_mode = PauseMode::kAdditive;
  } else if (mode == "replace") {
    rc.pause_mode = PauseMode::kReplace;
  } else {
    throw ConfigError("pause_mode must be 'additive' or 'replace'");
  }
  return rc;
}

ordered_json FiltersToJson(const FilterConfig& fc) {
  ordered_json j;
  j["active"] = ordered_json::array();
  for (const auto& c : fc.active) j["active"].push_back(c.name());
  j["levels"] = ordered_json::object();
  for (const auto& [c, l] : fc.levels) j["levels"][c.name()] = l.value();
  return j;
}

FilterConfig FiltersFromJson(const nlohmann::json& j) {
  FilterConfig fc;
  for (const auto& name : j.at("active")) fc.active.insert(FilterCriterion::Parse(name.get<std::string>()));
  if (j.contains("levels")) {
    for (const auto& [name, level] : j["levels"].items()) {
      fc.levels[FilterCriterion::Parse(name)] = FilterLevel(level.get<int>());
    }
  }
  if (j.contains("level")) {
    const FilterLevel all(j["level"].get<int>());
    for (const auto& c : fc.active) fc.levels.try_emplace(c, all);
  }
  return fc;
}

ordered_json ColumnsToJson(const ColumnBindings& c) {
  ordered_json j = ordered_json::object();
  if (!c.text.empty()) j["text"] = c.text;
  if (!c.label.empty()) j["label"] = c.label;
  if (!c.target.empty()) j["target"] = c.target;
  if (!c.prompt_label.empty()) j["prompt_label"] = c.prompt_label;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

const std::vector<std::string>& RecipeNames() {
  static const std::vector<std::string> kNames = {
      "table1",       "filterwise",  "community",     "level-sweep",       "order-invariance",
      "counterfactual", "perturbation", "policy-probes", "prefilter-unigrams"};
  return kNames;
}

RunConfig RunConfig::Parse(std::string_view json, const fs::path& base_dir) {
  RunConfig rc;
  try {
    const auto j = nlohmann::json::parse(json);
    rc.run_id = j.value("run_id", "");
    rc.recipe = j.value("recipe", rc.recipe);
    for (const auto& d : j.value("datasets", nlohmann::json::array())) {
      DatasetEntry e;
      e.name = d.value("name", "");
      e.sample = d.value("sample", std::size_t{0});
      e.mapping = Resolve(d.value("mapping", ""), base_dir);
      if (d.contains("corpus")) {
        e.corpus = Resolve(d["corpus"].get<std::string>(), base_dir);
        if (e.name.empty()) e.name = e.corpus.stem().string();
      } else {
        DatasetSpec spec;
        spec.kind = ParseDatasetKind(d.at("kind").get<std::string>());
        spec.path = Resolve(d.at("path").get<std::string>(), base_dir);
        if (d.contains("columns")) {
          const auto& c = d["columns"];
          spec.columns.text = c.value("text", "");
          spec.columns.label = c.value("label", "");
          spec.columns.target = c.value("target", "");
          spec.columns.prompt_label = c.value("prompt_label", "");
        }
        spec.sbic_threshold = d.value("sbic_threshold", spec.sbic_threshold);
        const std::string delim = d.value("delimiter", "");
        if (delim.size() > 1) throw ConfigError("delimiter must be one character");
        spec.delimiter = delim.empty() ? 0 : delim[0];
        if (e.name.empty()) e.name = std::string(ToString(spec.kind));
        spec.name = e.name;
        e.spec = std::move(spec);
      }
      rc.datasets.push_back(std::move(e));
    }
    if (j.contains("filters")) rc.filters = FiltersFromJson(j["filters"]);
    if (j.contains("rate")) rc.rate = RateFromJson(j["rate"]);
    rc.endpoint = j.value("endpoint", rc.endpoint);
    if (j.contains("mock")) {
      rc.mock.lexicon = Resolve(j["mock"].value("lexicon", ""), base_dir);
      rc.mock.prefilter_raw = j["mock"].value("prefilter_raw", false);
    }
    rc.channel = j.value("channel", rc.channel);
    if (j.contains("channels")) {
      rc.channels = j["channels"].get<std::map<std::string, std::string>>();
    }
    if (j.contains("timeout_ms")) rc.timeout = Ms(j["timeout_ms"].get<double>());
    if (j.contains("jitter_bound_ms")) rc.jitter_bound = Ms(j["jitter_bound_ms"].get<double>());
    rc.enforce_jitter = j.value("enforce_jitter", rc.enforce_jitter);
    rc.chunk_size = j.value("chunk_size", rc.chunk_size);
    if (j.contains("probes")) {
      const auto& p = j["probes"];
      rc.probes.slur_map = Resolve(p.value("slur_map", ""), base_dir);
      rc.probes.fragments = Resolve(p.value("fragments", ""), base_dir);
      rc.probes.stopwords = Resolve(p.value("stopwords", ""), base_dir);
      for (const auto& s : p.value("probe_sets", nlohmann::json::array())) {
        rc.probes.probe_sets.push_back(Resolve(s.get<std::string>(), base_dir));
      }
      rc.probes.top_k = p.value("top_k", rc.probes.top_k);
    }
    if (j.contains("sweep_levels")) rc.sweep_levels = j["sweep_levels"].get<std::vector<int>>();
    rc.seed = j.value("seed", rc.seed);
    if (j.contains("out")) rc.out = Resolve(j["out"].get<std::string>(), base_dir);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("run config: ") + ex.what());
  } catch (const Error& ex) {
    if (dynamic_cast<const ConfigError*>(&ex)) throw;
    throw ConfigError(std::string("run config: ") + ex.what());
  }
  return rc;
}

RunConfig RunConfig::Load(const fs::path& path) {
  return Parse(ReadFile(path), fs::absolute(path).parent_path());
}

ordered_json RunConfig::ToJson() const {
  ordered_json j;
  j["run_id"] = run_id;
  j["recipe"] = recipe;
  j["datasets"] = ordered_json::array();
  for (const auto& e : datasets) {
    ordered_json d;
    d["name"] = e.name;
    if (e.spec) {
      d["kind"] = ToString(e.spec->kind);
      d["path"] = e.spec->path.string();
      d["columns"] = ColumnsToJson(e.spec->columns);
      d["sbic_threshold"] = e.spec->sbic_threshold;
      d["delimiter"] = e.spec->delimiter ? std::string(1, e.spec->delimiter) : std::string();
    } else {
      d["corpus"] = e.corpus.string();
    }
    if (!e.mapping.empty()) d["mapping"] = e.mapping.string();
    d["sample"] = e.sample;
    j["datasets"].push_back(std::move(d));
  }
  j["filters"] = FiltersToJson(filters);
  j["rate"] = RateToJson(rate);
  j["endpoint"] = endpoint;
  j["mock"] = {{"lexicon", mock.lexicon.string()}, {"prefilter_raw", mock.prefilter_raw}};
  j["channel"] = channel;
  j["channels"] = channels;
  j["timeout_ms"] = ToMs(timeout);
  j["jitter_bound_ms"] = ToMs(jitter_bound);
  j["enforce_jitter"] = enforce_jitter;
  j["chunk_size"] = chunk_size;
  ordered_json p;
  p["slur_map"] = probes.slur_map.string();
  p["fragments"] = probes.fragments.string();
  p["stopwords"] = probes.stopwords.string();
  p["probe_sets"] = ordered_json::array();
  for (const auto& s : probes.probe_sets) p["probe_sets"].push_back(s.string());
  p["top_k"] = probes.top_k;
  j["probes"] = std::move(p);
  j["sweep_levels"] = sweep_levels;
  j["seed"] = seed;
  j["out"] = out.string();
  return j;
}

void RunConfig::Validate() const {
  const auto& names = RecipeNames();
  if (std::find(names.begin(), names.end(), recipe) == names.end()) {
    throw ConfigError("unknown recipe '" + recipe + "'");
  }
  if (run_id.find_first_of("/\\") != std::string::npos || run_id == "." || run_id == "..") {
    throw ConfigError("run id must be a plain name: " + run_id);
  }
  filters.Validate();
  rate.Validate();
  if (timeout <= Duration::zero()) throw ConfigError("timeout must be positive");
  if (jitter_bound <= Duration::zero()) throw ConfigError("jitter bound must be positive");
  auto require = [](const fs::path& p, std::string_view what) {
    if (p.empty()) throw ConfigError(std::string(what) + " is required");
    if (!fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
  };
  std::set<std::string> seen;
  for (const auto& e : datasets) {
    if (e.name.empty()) throw ConfigError("dataset without a name");
    if (!seen.insert(e.name).second) throw ConfigError("duplicate dataset name " + e.name);
    require(e.spec ? e.spec->path : e.corpus, "dataset " + e.name);
    if (!e.mapping.empty()) require(e.mapping, "mapping for " + e.name);
  }
  if (endpoint == "loopback") {
    require(mock.lexicon, "mock lexicon");
  } else {
    net::ParseEndpoint(endpoint);
  }
  for (int l : sweep_levels) FilterLevel{l};
  const bool needs_datasets = recipe != "perturbation" && recipe != "policy-probes";
  if (needs_datasets && datasets.empty()) throw ConfigError(recipe + " needs at least one dataset");
  if (recipe == "filterwise" || recipe == "community") {
    if (std::none_of(datasets.begin(), datasets.end(),
                     [](const DatasetEntry& e) { return !e.mapping.empty(); })) {
      throw ConfigError(recipe + " needs a dataset with a mapping file");
    }
  }
  if (recipe == "counterfactual") require(probes.slur_map, "slur map");
  if (recipe == "perturbation") require(probes.fragments, "fragment file");
  if (recipe == "policy-probes") {
    if (probes.probe_sets.empty()) throw ConfigError("policy-probes needs probe sets");
    for (const auto& p : probes.probe_sets) require(p, "probe set");
  }
  if (!probes.stopwords.empty()) require(probes.stopwords, "stopword list");
}

void ApplyOverrides(RunConfig& config, const RunOverrides& o) {
  if (o.recipe) config.recipe = *o.recipe;
  if (o.run_id) config.run_id = *o.run_id;
  if (o.endpoint) config.endpoint = *o.endpoint;
  if (o.out) config.out = fs::absolute(*o.out);
  if (o.timeout_s) {
    config.timeout = Duration(static_cast<std::int64_t>(std::llround(*o.timeout_s * 1e6)));
  }
  if (o.rate_limit) config.rate.window_limit = *o.rate_limit;
  if (o.active) {
    config.filters.active.clear();
    for (const auto& name : SplitList(*o.active, ',')) {
      const auto c = FilterCriterion::Parse(name);
      config.filters.active.insert(c);
      if (!config.filters.levels.contains(c)) config.filters.levels[c] = FilterLevel(4);
    }
  }
  if (o.level) {
    if (o.level->find('=') == std::string::npos) {
      const FilterLevel l(ParseInt(*o.level, "--level"));
      for (const auto& c : config.filters.active) config.filters.levels[c] = l;
    } else {
      for (const auto& item : SplitList(*o.level, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("--level expects Crit=N items: " + item);
        config.filters.levels[FilterCriterion::Parse(item.substr(0, eq))] =
            FilterLevel(ParseInt(item.substr(eq + 1), "--level"));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Runner

namespace {

struct Plan {
  std::string label;
  FilterConfig filters;
  std::vector<Message> messages;
};

struct Loaded {
  const DatasetEntry* entry;
  std::vector<Message> messages;
  std::optional<MappingTable> mapping;
};

std::vector<Message> HateOnly(std::span<const Message> in) {
  std::vector<Message> out;
  for (const auto& m : in) {
    if (m.label == Label::kHate) out.push_back(m);
  }
  return out;
}

FilterConfig OnlyCriterion(const FilterConfig& base, const FilterCriterion& c) {
  FilterConfig fc;
  fc.active.insert(c);
  auto it = base.levels.find(c);
  fc.levels[c] = it == base.levels.end() ? FilterLevel(4) : it->second;
  return fc;
}

FilterConfig AtLevel(const FilterConfig& base, FilterLevel level) {
  FilterConfig fc;
  fc.active = base.active;
  for (const auto& c : fc.active) fc.levels[c] = level;
  return fc;
}

// Append-only JSONL file whose final line may have been torn by an
// interruption. Torn tails are dropped on open.
std::vector<std::string> ReadJsonl(const fs::path& path) {
  std::vector<std::string> lines;
  if (!fs::exists(path)) return lines;
  std::string data = ReadFile(path);
  const std::size_t complete = data.rfind('\n') == std::string::npos ? 0 : data.rfind('\n') + 1;
  if (complete != data.size()) fs::resize_file(path, complete);
  std::size_t start = 0;
  while (start < complete) {
    const std::size_t end = data.find('\n', start);
    if (end > start) lines.push_back(data.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

class Appender {
 public:
  explicit Appender(const fs::path& path) : out_(path, std::ios::app | std::ios::binary) {
    if (!out_) throw Error("cannot write " + path.string());
  }
  void Line(const std::string& s) { out_ << s << '\n'; }
  void Flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

void AppendRawLogs(const fs::path& dir, std::size_t chunk, const RawLogs& logs) {
  Appender sent(dir / "sent.jsonl");
  for (const auto& s : logs.sent) {
    ordered_json j;
    j["chunk"] = chunk;
    j["id"] = s.id;
    j["text"] = s.text;
    j["scheduled_us"] = s.scheduled.count();
    j["sent_at_us"] = s.sent_at.count();
    sent.Line(j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
  }
  Appender echoes(dir / "echoes.jsonl");
  for (const auto& e : logs.echoes) {
    ordered_json j;
    j["chunk"] = chunk;
    j["id"] = e.id;
    j["text"] = e.text;
    j["received_at_us"] = e.received_at.count();
    echoes.Line(j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
  }
  Appender events(dir / "events.jsonl");
  for (const auto& e : logs.events) {
    ordered_json j;
    j["chunk"] = chunk;
    j["id"] = e.id;
    j["text"] = e.text;
    j["category"] = e.category.name();
    j["topics"] = e.topics;
    j["fragments"] = e.fragments;
    j["level"] = e.level.value();
    j["received_at_us"] = e.received_at.count();
    events.Line(j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
  }
}

class Runner {
 public:
  Runner(RunConfig config, fs::path run_dir, bool report_only, std::ostream* log)
      : config_(std::move(config)),
        run_dir_(std::move(run_dir)),
        report_only_(report_only),
        log_(log) {}

  RunSummary Run();

 private:
  // Executes (or resumes) each plan; returns its records in message order.
  std::vector<std::vector<OutcomeRecord>> Execute(const std::vector<Plan>& plans);
  void RunChunks(const Plan& plan, const fs::path& dir, std::vector<Message> pending,
                 const net::Endpoint& endpoint, const std::string& channel);
  std::string ChannelFor(const std::string& label, std::size_t index) const;

  void LoadInputs();
  std::string ManifestCheck();

  void Table1();
  void Filterwise();
  void Community();
  void LevelSweep();
  void OrderInvariance();
  void Counterfactual();
  void Perturbation();
  void PolicyProbes();
  void PrefilterUnigrams();

  void Emit(const Table& t);
  void EmitJson(const std::string& name, const ordered_json& j);
  void Log(const std::string& s) {
    if (log_) *log_ << s << '\n';
  }

  std::vector<Message> AllMessages() const;

  RunConfig config_;
  fs::path run_dir_;
  bool report_only_;
  std::ostream* log_;
  std::vector<Loaded> loaded_;
  std::shared_ptr<const Lexicon> lexicon_;
  RunSummary summary_;
};

void Runner::LoadInputs() {
  for (const auto& e : config_.datasets) {
    Loaded l{&e, {}, std::nullopt};
    if (e.spec) {
      l.messages = load(*e.spec);
    } else {
      l.messages = ReadCorpus(e.corpus);
    }
    if (e.sample > 0 && e.sample < l.messages.size()) {
      auto perm = Permutation(l.messages.size(), config_.seed);
      perm.resize(e.sample);
      std::sort(perm.begin(), perm.end());
      std::vector<Message> kept;
      kept.reserve(perm.size());
      for (std::size_t i : perm) kept.push_back(std::move(l.messages[i]));
      l.messages = std::move(kept);
    }
    if (!e.mapping.empty()) l.mapping = MappingTable::Load(e.mapping);
    Log("loaded " + e.name + ": " + std::to_string(l.messages.size()) + " messages");
    loaded_.push_back(std::move(l));
  }
  if (config_.endpoint == "loopback") {
    lexicon_ = std::make_shared<const Lexicon>(Lexicon::LoadJsonl(config_.mock.lexicon));
  }
}

std::vector<Message> Runner::AllMessages() const {
  std::vector<Message> out;
  for (const auto& l : loaded_) out.insert(out.end(), l.messages.begin(), l.messages.end());
  return out;
}

std::string Runner::ManifestCheck() {
  ordered_json cfg = config_.ToJson();
  ordered_json hashed = cfg;
  hashed.erase("out");
  hashed.erase("endpoint");
  const std::string config_hash = Sha256Hex(hashed.dump());

  std::string corpus;
  for (const auto& l : loaded_) {
    corpus += l.entry->name + "\n";
    for (const auto& m : l.messages) corpus += ToJsonLine(m) + "\n";
  }
  const std::string corpus_hash = Sha256Hex(corpus);

  ordered_json assets = ordered_json::object();
  auto add = [&](const std::string& key, const fs::path& p) {
    if (!p.empty()) assets[key] = FileHash(p);
  };
  if (config_.endpoint == "loopback") add("lexicon", config_.mock.lexicon);
  add("slur_map", config_.probes.slur_map);
  add("fragments", config_.probes.fragments);
  add("stopwords", config_.probes.stopwords);
  for (std::size_t i = 0; i < config_.probes.probe_sets.size(); ++i) {
    add("probe_set_" + std::to_string(i), config_.probes.probe_sets[i]);
  }
  for (const auto& l : loaded_) {
    if (!l.entry->mapping.empty()) add("mapping_" + l.entry->name, l.entry->mapping);
  }

  const fs::path manifest = run_dir_ / "manifest.json";
  if (fs::exists(manifest)) {
    const auto old = nlohmann::json::parse(ReadFile(manifest));
    if (old.value("config_sha256", "") != config_hash) {
      throw ConfigError("run id '" + config_.run_id + "' exists with a different config");
    }
    if (old.value("corpus_sha256", "") != corpus_hash) {
      throw ConfigError("run id '" + config_.run_id + "' exists with a different corpus");
    }
    if (nlohmann::json(old.value("assets_sha256", nlohmann::json::object())) !=
        nlohmann::json(assets)) {
      throw ConfigError("run id '" + config_.run_id + "' exists with different input files");
    }
    return config_hash;
  }
  if (report_only_) throw ConfigError("no manifest in " + run_dir_.string());
  fs::create_directories(run_dir_);
  ordered_json m;
  m["run_id"] = config_.run_id;
  m["recipe"] = config_.recipe;
  m["config_sha256"] = config_hash;
  m["corpus_sha256"] = corpus_hash;
  m["assets_sha256"] = assets;
  m["config"] = cfg;
  std::ofstream(manifest) << m.dump(2) << '\n';
  return config_hash;
}

std::string Runner::ChannelFor(const std::string& label, std::size_t index) const {
  if (config_.endpoint == "loopback") return config_.channel + "-" + std::to_string(index);
  auto it = config_.channels.find(label);
  return it == config_.channels.end() ? config_.channel : it->second;
}

void Runner::RunChunks(const Plan& plan, const fs::path& dir, std::vector<Message> pending,
                       const net::Endpoint& endpoint, const std::string& channel) {
  SessionOptions opts;
  opts.rate = config_.rate;
  opts.timeout = config_.timeout;
  opts.jitter_bound = config_.jitter_bound;
  opts.enforce_jitter = config_.enforce_jitter;
  opts.channel = channel;

  const std::size_t chunk = config_.chunk_size == 0 ? pending.size() : config_.chunk_size;
  std::size_t chunk_index = 0;
  if (fs::exists(dir / "sent.jsonl")) {
    for (const auto& line : ReadJsonl(dir / "sent.jsonl")) {
      chunk_index = std::max<std::size_t>(chunk_index, nlohmann::json::parse(line).value("chunk", 0) + 1);
    }
  }
  for (std::size_t start = 0; start < pending.size(); start += chunk, ++chunk_index) {
    const std::size_t end = std::min(pending.size(), start + chunk);
    std::span<const Message> batch(pending.data() + start, end - start);
    Log(plan.label + ": sending " + std::to_string(batch.size()) + " message(s)");

    LineJsonTarget target(endpoint, channel);
    SteadyClock clock;
    RawLogs logs;
    try {
      logs = run_session(batch, target, opts, clock);
    } catch (const SessionError& ex) {
      AppendRawLogs(dir, chunk_index, ex.partial());
      throw;
    }
    AppendRawLogs(dir, chunk_index, logs);
    const Reconciliation rec = reconcile(logs, config_.timeout, config_.run_id);
    Appender records(dir / "records.jsonl");
    for (const auto& r : rec.records) records.Line(ToJsonLine(r));
    records.Flush();
    Appender conflicts(dir / "conflicts.jsonl");
    for (const auto& c : rec.conflicts) conflicts.Line(ToJsonLine(c));
    summary_.sent += batch.size();
    summary_.conflicts += rec.conflicts.size();
  }
}

std::vector<std::vector<OutcomeRecord>> Runner::Execute(const std::vector<Plan>& plans) {
  struct State {
    fs::path dir;
    std::unordered_map<std::string, OutcomeRecord> records;
    std::unordered_set<std::string> conflicted;
    std::vector<Message> pending;
  };
  std::vector<State> states(plans.size());
  bool any_pending = false;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    State& s = states[i];
    s.dir = run_dir_ / "sessions" / SafeName(plans[i].label);
    fs::create_directories(s.dir);
    for (const auto& line : ReadJsonl(s.dir / "records.jsonl")) {
      auto r = ParseRecordLine(line);
      s.records.emplace(r.id, std::move(r));
    }
    for (const auto& line : ReadJsonl(s.dir / "conflicts.jsonl")) {
      s.conflicted.insert(nlohmann::json::parse(line).at("id").get<std::string>());
    }
    for (const auto& m : plans[i].messages) {
      if (s.records.contains(m.id) || s.conflicted.contains(m.id)) {
        ++summary_.skipped;
      } else {
        s.pending.push_back(m);
      }
    }
    any_pending = any_pending || !s.pending.empty();
    ++summary_.sessions;
  }

  if (any_pending) {
    if (report_only_) throw ConfigError("run is incomplete; resume it with 'run' first");
    std::unique_ptr<MockServer> mock;
    net::Endpoint endpoint;
    if (config_.endpoint == "loopback") {
      std::vector<ChannelState> channels;
      for (std::size_t i = 0; i < plans.size(); ++i) {
        if (states[i].pending.empty()) continue;
        ChannelState cs;
        cs.channel = ChannelFor(plans[i].label, i);
        cs.config = plans[i].filters;
        cs.lexicon = lexicon_;
        cs.prefilter_raw = config_.mock.prefilter_raw;
        cs.Validate();
        channels.push_back(std::move(cs));
      }
      mock = std::make_unique<MockServer>(std::move(channels));
      endpoint = {"127.0.0.1", mock->Start("127.0.0.1", 0)};
    } else {
      endpoint = net::ParseEndpoint(config_.endpoint);
    }
    for (std::size_t i = 0; i < plans.size(); ++i) {
      if (states[i].pending.empty()) continue;
      RunChunks(plans[i], states[i].dir, states[i].pending, endpoint, ChannelFor(plans[i].label, i));
      // Pick up what this invocation appended.
      for (const auto& line : ReadJsonl(states[i].dir / "records.jsonl")) {
        auto r = ParseRecordLine(line);
        states[i].records.emplace(r.id, std::move(r));
      }
    }
    if (mock) mock->Stop();
  }

  std::vector<std::vector<OutcomeRecord>> out(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    for (const auto& m : plans[i].messages) {
      auto it = states[i].records.find(m.id);
      if (it != states[i].records.end()) out[i].push_back(it->second);
    }
  }
  return out;
}

void Runner::Emit(const Table& t) {
  const fs::path dir = run_dir_ / "reports";
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / (t.name + ".csv"));
    WriteCsv(csv, t);
  }
  EmitJson(t.name, ToJson(t));
  summary_.reports.push_back(dir / (t.name + ".csv"));
}

void Runner::EmitJson(const std::string& name, const ordered_json& j) {
  const fs::path dir = run_dir_ / "reports";
  fs::create_directories(dir);
  std::ofstream(dir / (name + ".json")) << j.dump(2) << '\n';
  summary_.reports.push_back(dir / (name + ".json"));
}

// Prepends key columns to a RatesTable, dropping its "row" column.
Table Keyed(const std::string& name, const std::vector<std::string>& key_columns,
            const std::vector<std::vector<Cell>>& keys,
            const std::vector<std::pair<std::string, RateReport>>& rows) {
  Table base = RatesTable(rows);
  Table t;
  t.name = name;
  t.columns = key_columns;
  t.columns.insert(t.columns.end(), base.columns.begin() + 1, base.columns.end());
  for (std::size_t i = 0; i < base.rows.size(); ++i) {
    std::vector<Cell> row = keys[i];
    row.insert(row.end(), base.rows[i].begin() + 1, base.rows[i].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<ScoredRecord> Score(const std::vector<OutcomeRecord>& records,
                                std::span<const Message> corpus) {
  return JoinLabels(records, corpus);
}

void Runner::Table1() {
  std::vector<Plan> plans;
  for (const auto& l : loaded_) {
    plans.push_back({"table1." + l.entry->name, config_.filters, l.messages});
  }
  const auto results = Execute(plans);
  std::vector<std::pair<std::string, RateReport>> rows;
  ConfusionCounts overall;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto c = confusion(Score(results[i], plans[i].messages));
    overall += c;
    rows.emplace_back(loaded_[i].entry->name, rates(c));
  }
  rows.emplace_back("Overall (pooled)", rates(overall));
  Table t = RatesTable(rows);
  t.name = "table1";
  Emit(t);
}

void Runner::Filterwise() {
  struct Cellref {
    std::string dataset;
    FilterCriterion crit;
    std::size_t only = 0;
    std::size_t all = 0;
  };
  std::vector<Plan> plans;
  std::vector<Cellref> cells;
  std::vector<std::pair<std::string, FilterCriterion>> empty;
  for (const auto& l : loaded_) {
    if (!l.mapping) continue;
    const auto hate = HateOnly(l.messages);
    for (const auto& [crit, _] : l.mapping->filters) {
      auto subset = extract_subset(hate, crit.name(), *l.mapping);
      if (subset.empty()) {
        empty.emplace_back(l.entry->name, crit);
        continue;
      }
      const std::string base = "filterwise." + l.entry->name + "." + crit.name();
      cells.push_back({l.entry->name, crit, plans.size(), plans.size() + 1});
      plans.push_back({base + ".only", OnlyCriterion(config_.filters, crit), subset});
      plans.push_back({base + ".all", config_.filters, std::move(subset)});
    }
  }
  const auto results = Execute(plans);

  Table recall;
  recall.name = "filterwise";
  recall.columns = {"dataset", "filter", "n_hate", "recall", "pf", "pf_of_hate"};
  std::map<FilterCriterion, ConfusionCounts> pooled;
  std::map<std::string, FiringTally> tallies;
  FiringTally pooled_tally;
  for (const auto& c : cells) {
    const auto scored = Score(results[c.only], plans[c.only].messages);
    const auto counts = confusion(scored);
    pooled[c.crit] += counts;
    const auto r = rates(counts);
    recall.rows.push_back({c.dataset, c.crit.name(), static_cast<std::int64_t>(counts.tp + counts.fn),
                           RateCell(r.recall), RateCell(r.pf), RateCell(r.pf_of_hate)});
    const auto all = Score(results[c.all], plans[c.all].messages);
    TallyFirings(tallies[c.dataset], c.crit, all);
    TallyFirings(pooled_tally, c.crit, all);
  }
  for (const auto& [ds, crit] : empty) {
    recall.rows.push_back({ds, crit.name(), std::int64_t{0}, std::monostate{}, std::monostate{},
                           std::monostate{}});
  }
  for (const auto& [crit, counts] : pooled) {
    const auto r = rates(counts);
    recall.rows.push_back({std::string("Overall"), crit.name(),
                           static_cast<std::int64_t>(counts.tp + counts.fn), RateCell(r.recall),
                           RateCell(r.pf), RateCell(r.pf_of_hate)});
  }
  Emit(recall);

  Table precision;
  precision.name = "filter_precision";
  precision.columns = {"dataset", "filter", "precision"};
  auto add = [&](const std::string& ds, const FiringTally& tally) {
    for (const auto& [crit, v] : filter_precision(tally)) {
      precision.rows.push_back({ds, crit.name(), RateCell(v)});
    }
  };
  for (const auto& [ds, tally] : tallies) add(ds, tally);
  add("Overall", pooled_tally);
  Emit(precision);
}

void Runner::Community() {
  std::vector<Plan> plans;
  std::vector<const Loaded*> sources;
  for (const auto& l : loaded_) {
    if (!l.mapping || l.mapping->communities.empty()) continue;
    std::vector<Message> members;
    for (const auto& m : HateOnly(l.messages)) {
      for (const auto& [name, _] : l.mapping->communities) {
        if (InSubset(m, SubsetMembers(name, *l.mapping), *l.mapping)) {
          members.push_back(m);
          break;
        }
      }
    }
    if (members.empty()) continue;
    plans.push_back({"community." + l.entry->name, config_.filters, std::move(members)});
    sources.push_back(&l);
  }
  if (plans.empty()) throw ConfigError("no dataset has hate messages in a mapped community");
  const auto results = Execute(plans);
  Table t;
  t.name = "community";
  t.columns = {"dataset", "group", "n_hate", "recall", "pf", "pf_of_hate"};
  ordered_json plot = ordered_json::object();
  for (std::size_t i = 0; i < plans.size(); ++i) {
    auto scored = Score(results[i], plans[i].messages);
    TagGroups(scored, *sources[i]->mapping, Grouping::kCommunity);
    std::vector<std::string> order;
    for (const auto& [name, _] : sources[i]->mapping->communities) order.push_back(name);
    const auto s = stratified_recall(scored, order);
    for (const auto& row : StratifiedTable(s).rows) {
      std::vector<Cell> r{sources[i]->entry->name};
      r.insert(r.end(), row.begin(), row.end());
      t.rows.push_back(std::move(r));
    }
    plot[sources[i]->entry->name] = PlotData(s);
  }
  Emit(t);
  EmitJson("community_plot", plot);
}

void Runner::LevelSweep() {
  std::vector<Plan> plans;
  std::vector<std::vector<Cell>> keys;
  for (int level : config_.sweep_levels) {
    for (const auto& l : loaded_) {
      plans.push_back({"level-sweep." + l.entry->name + ".a" + std::to_string(level),
                       AtLevel(config_.filters, FilterLevel(level)), l.messages});
      keys.push_back({l.entry->name, static_cast<std::int64_t>(level)});
    }
  }
  const auto results = Execute(plans);
  std::vector<std::pair<std::string, RateReport>> rows;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    rows.emplace_back(plans[i].label, rates(confusion(Score(results[i], plans[i].messages))));
  }
  Emit(Keyed("level_sweep", {"dataset", "alpha"}, keys, rows));
}

void Runner::OrderInvariance() {
  const auto messages = AllMessages();
  std::vector<Message> permuted;
  permuted.reserve(messages.size());
  for (std::size_t i : Permutation(messages.size(), config_.seed)) permuted.push_back(messages[i]);
  std::vector<Plan> plans = {{"order.original", config_.filters, messages},
                             {"order.permuted", config_.filters, std::move(permuted)}};
  const auto results = Execute(plans);
  std::unordered_map<std::string, const OutcomeRecord*> second;
  for (const auto& r : results[1]) second.emplace(r.id, &r);

  Table diff;
  diff.name = "order_diff";
  diff.columns = {"id", "original", "permuted"};
  std::size_t compared = 0;
  for (const auto& r : results[0]) {
    auto it = second.find(r.id);
    if (it == second.end()) continue;
    ++compared;
    if (r.outcome != it->second->outcome) {
      diff.rows.push_back({r.id, ToJsonLine(OutcomeRecord{r.id, {}, r.outcome, {}, {}}, false),
                           ToJsonLine(OutcomeRecord{r.id, {}, it->second->outcome, {}, {}}, false)});
    }
  }
  Emit(diff);
  ordered_json s;
  s["compared"] = compared;
  s["differing"] = diff.rows.size();
  s["identical"] = diff.rows.empty();
  EmitJson("order_invariance", s);
}

void Runner::Counterfactual() {
  const SlurMap map = SlurMap::Load(config_.probes.slur_map);
  const auto hate = HateOnly(AllMessages());
  const auto base = Execute({{"counterfactual.baseline", config_.filters, hate}});

  std::vector<Message> rewritten;
  std::unordered_map<std::string, std::string> original_text;
  std::size_t false_negatives = 0;
  for (const auto& r : base[0]) {
    if (!std::holds_alternative<Passed>(r.outcome)) continue;
    ++false_negatives;
    std::string text = counterfactual(r.text, map);
    if (text == r.text) continue;
    Message m;
    m.id = r.id + "#cf";
    m.text = std::move(text);
    m.label = Label::kHate;
    m.source = "counterfactual";
    original_text[m.id] = r.text;
    rewritten.push_back(std::move(m));
  }
  std::size_t flipped = 0;
  Table pairs;
  pairs.name = "counterfactual_pairs";
  pairs.columns = {"id", "original", "rewritten", "outcome"};
  if (!rewritten.empty()) {
    const auto probe = Execute({{"counterfactual.probe", config_.filters, rewritten}});
    for (const auto& r : probe[0]) {
      if (IsBlocked(r.outcome)) ++flipped;
      pairs.rows.push_back(
          {r.id, original_text[r.id], r.text, std::string(ToString(KindOf(r.outcome)))});
    }
  }
  Table t;
  t.name = "counterfactual";
  t.columns = {"hate", "false_negatives", "rewritten", "flipped", "flip_rate"};
  t.rows.push_back({static_cast<std::int64_t>(hate.size()),
                    static_cast<std::int64_t>(false_negatives),
                    static_cast<std::int64_t>(rewritten.size()), static_cast<std::int64_t>(flipped),
                    RateCell(MetricValue::Of(flipped, rewritten.size(), "flip rate"))});
  Emit(t);
  Emit(pairs);
}

void Runner::Perturbation() {
  std::vector<std::string> fragments;
  {
    std::istringstream in(ReadFile(config_.probes.fragments));
    std::string line;
    while (std::getline(in, line)) {
      line.erase(line.find_last_not_of(" \t\r") + 1);
      line.erase(0, line.find_first_not_of(" \t"));
      if (!line.empty() && line[0] != '#') fragments.push_back(line);
    }
  }
  if (fragments.empty()) throw ConfigError("fragment file is empty");
  std::vector<Message> messages;
  std::vector<std::string> methods;
  std::vector<std::string> examples;
  std::unordered_map<std::string, std::string> method_of;
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    for (const auto& v : perturbation_suite(fragments[i])) {
      if (i == 0) {
        methods.push_back(v.method);
        examples.push_back(v.text);
      }
      Message m;
      m.id = "perturb:" + std::to_string(i) + ":" + v.method;
      m.text = v.text;
      m.label = Label::kHate;
      m.source = "perturbation";
      method_of[m.id] = v.method;
      messages.push_back(std::move(m));
    }
  }
  const auto results = Execute({{"perturbation", config_.filters, messages}});
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> tally;  // blocked, total
  Table variants;
  variants.name = "perturbation_variants";
  variants.columns = {"id", "method", "text", "outcome"};
  for (const auto& r : results[0]) {
    auto& [blocked, total] = tally[method_of[r.id]];
    ++total;
    if (IsBlocked(r.outcome)) ++blocked;
    variants.rows.push_back({r.id, method_of[r.id], r.text, std::string(ToString(KindOf(r.outcome)))});
  }
  Table t;
  t.name = "perturbation";
  t.columns = {"method", "example", "n", "moderated", "moderation_rate"};
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto [blocked, total] = tally[methods[i]];
    t.rows.push_back({methods[i], examples[i], static_cast<std::int64_t>(total),
                      static_cast<std::int64_t>(blocked),
                      RateCell(MetricValue::Of(blocked, total, "moderation rate"))});
  }
  Emit(t);
  Emit(variants);
}

void Runner::PolicyProbes() {
  std::vector<Message> messages;
  std::vector<std::string> sets;
  for (std::size_t i = 0; i < config_.probes.probe_sets.size(); ++i) {
    const auto& path = config_.probes.probe_sets[i];
    std::string source = path.stem().string();
    // Two sets with the same stem would share ids.
    if (std::find(sets.begin(), sets.end(), source) != sets.end()) {
      source += "-" + std::to_string(i);
    }
    sets.push_back(source);
    for (auto& m : LoadProbeSet(path, source)) messages.push_back(std::move(m));
  }
  const auto results = Execute({{"policy-probes", config_.filters, messages}});
  const auto scored = Score(results[0], messages);
  std::unordered_map<std::string, std::string> source_of;
  for (const auto& m : messages) source_of[m.id] = m.source;

  std::map<std::string, ConfusionCounts> per_set;
  Table detail;
  detail.name = "policy_probe_outcomes";
  detail.columns = {"id", "set", "text", "outcome"};
  for (const auto& r : scored) {
    Accumulate(per_set[source_of[r.id]], r.outcome, r.label);
    detail.rows.push_back({r.id, source_of[r.id], r.text, std::string(ToString(KindOf(r.outcome)))});
  }
  std::vector<std::pair<std::string, RateReport>> rows;
  ConfusionCounts all;
  for (const auto& s : sets) {
    all += per_set[s];
    rows.emplace_back(s, rates(per_set[s]));
  }
  rows.emplace_back("Overall (pooled)", rates(all));
  Table t = RatesTable(rows);
  t.name = "policy_probes";
  Emit(t);
  Emit(detail);
}

void Runner::PrefilterUnigrams() {
  std::set<std::string> stopwords;
  if (!config_.probes.stopwords.empty()) stopwords = LoadStopwords(config_.probes.stopwords);
  std::vector<Plan> plans;
  for (const auto& l : loaded_) {
    plans.push_back({"unigrams." + l.entry->name, config_.filters, l.messages});
  }
  const auto results = Execute(plans);
  Table t;
  t.name = "prefilter_unigrams";
  t.columns = {"dataset", "rank", "token", "frequency"};
  std::vector<OutcomeRecord> all;
  auto add = [&](const std::string& ds, std::span<const OutcomeRecord> records) {
    for (const auto& row : UnigramTable(prefiltered_unigrams(records, stopwords),
                                        config_.probes.top_k).rows) {
      std::vector<Cell> r{ds};
      r.insert(r.end(), row.begin(), row.end());
      t.rows.push_back(std::move(r));
    }
  };
  for (std::size_t i = 0; i < plans.size(); ++i) {
    add(loaded_[i].entry->name, results[i]);
    all.insert(all.end(), results[i].begin(), results[i].end());
  }
  add("Overall", all);
  Emit(t);
}

RunSummary Runner::Run() {
  config_.Validate();
  if (config_.run_id.empty()) config_.run_id = config_.recipe;
  summary_.run_dir = run_dir_;
  LoadInputs();
  ManifestCheck();
  const std::string& r = config_.recipe;
  if (r == "table1") {
    Table1();
  } else if (r == "filterwise") {
    Filterwise();
  } else if (r == "community") {
    Community();
  } else if (r == "level-sweep") {
    LevelSweep();
  } else if (r == "order-invariance") {
    OrderInvariance();
  } else if (r == "counterfactual") {
    Counterfactual();
  } else if (r == "perturbation") {
    Perturbation();
  } else if (r == "policy-probes") {
    PolicyProbes();
  } else if (r == "prefilter-unigrams") {
    PrefilterUnigrams();
  }
  ordered_json s;
  s["run_id"] = config_.run_id;
  s["recipe"] = r;
  s["sessions"] = summary_.sessions;
  s["sent"] = summary_.sent;
  s["skipped"] = summary_.skipped;
  s["conflicts"] = summary_.conflicts;
  EmitJson("summary", s);
  return summary_;
}

}  // namespace

RunSummary run(const RunConfig& config, std::ostream* log) {
  const std::string id = config.run_id.empty() ? config.recipe : config.run_id;
  Runner runner(config, config.out / id, false, log);
  return runner.Run();
}

RunSummary report(const fs::path& run_dir, std::ostream* log) {
  const fs::path manifest = run_dir / "manifest.json";
  if (!fs::exists(manifest)) throw ConfigError("no manifest in " + run_dir.string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(ReadFile(manifest));
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("bad manifest: ") + ex.what());
  }
  RunConfig config = RunConfig::Parse(m.at("config").dump());
  Runner runner(std::move(config), run_dir, true, log);
  return runner.Run();
}

}  // namespace modaudit
