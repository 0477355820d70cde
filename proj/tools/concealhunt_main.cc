/*
 * Copyright 2026 The concealhunt Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: synth, run, eval, attack, bench.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "concealhunt/attack.h"
#include "concealhunt/config.h"
#include "concealhunt/cti.h"
#include "concealhunt/error.h"
#include "concealhunt/evaluate.h"
#include "concealhunt/io.h"
#include "concealhunt/pipeline.h"
#include "concealhunt/synth.h"

namespace fs = std::filesystem;
using namespace concealhunt;
using namespace concealhunt::harness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitAbort = 2;
constexpr int kExitConfig = 3;

struct Settings {
  std::string config_file;
  std::vector<std::string> overrides;
  uint64_t seed = 0;
  bool seed_set = false;
};

void AddSettings(CLI::App* cmd, Settings& s) {
  cmd->add_option("-c,--config", s.config_file, "flat key=value config file");
  cmd->add_option("--set", s.overrides, "override one key, e.g. --set theta=0.2");
  cmd->add_option_function<uint64_t>(
      "--seed",
      [&s](const uint64_t& v) {
        s.seed = v;
        s.seed_set = true;
      },
      "seed for both synthesis and protocol");
}

void Resolve(const Settings& s, SynthConfig& synth, ProtocolParams& protocol) {
  if (!s.config_file.empty()) {
    ApplyConfig(ReadConfigFile(s.config_file), synth, protocol);
  }
  ConfigMap flags;
  for (const std::string& o : s.overrides) {
    const size_t eq = o.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + o + "'");
    }
    flags[o.substr(0, eq)] = o.substr(eq + 1);
  }
  ApplyConfig(flags, synth, protocol);
  if (s.seed_set) {
    synth.rng_seed = s.seed;
    protocol.seed = s.seed;
  }
  ValidateSynthConfig(synth);
  ValidateProtocolParams(protocol);
}

std::vector<unsigned> ParseList(const std::string& text, const char* what) {
  std::vector<unsigned> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<unsigned>(v));
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": bad list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

void PrintSummary(const PipelineResult& r) {
  size_t real = 0;
  for (const sti::VcOutcome& o : r.sti) real += o.vc.groups.size();
  std::cout << "virtual groups: " << (r.str ? r.str->groups.size() : 0)
            << ", real groups: " << real;
  if (r.session) {
    std::cout << ", messages: " << r.session->stored_transcripts().size();
  }
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concealed cooperative threat hunting simulator"};
  app.require_subcommand(1);

  Settings synth_s;
  std::string synth_out;
  CLI::App* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset");
  synth_cmd->add_option("-o,--out", synth_out, "dataset directory")->required();
  AddSettings(synth_cmd, synth_s);

  Settings run_s;
  std::string run_data, run_out;
  CLI::App* run_cmd = app.add_subcommand("run", "run the protocols on a dataset");
  run_cmd->add_option("-d,--data", run_data, "dataset directory")->required();
  run_cmd->add_option("-o,--out", run_out, "output directory")->required();
  AddSettings(run_cmd, run_s);

  std::string eval_groups, eval_truth, eval_out;
  CLI::App* eval_cmd = app.add_subcommand("eval", "precision and recall");
  eval_cmd->add_option("-g,--groups", eval_groups, "groups.json")->required();
  eval_cmd->add_option("-t,--truth", eval_truth, "truth.json")->required();
  eval_cmd->add_option("-o,--out", eval_out, "metrics.csv")->required();

  std::string attack_transcript, attack_data, attack_out;
  CLI::App* attack_cmd =
      app.add_subcommand("attack", "dictionary attack on a stored transcript");
  attack_cmd->add_option("-t,--transcript", attack_transcript, "transcript.jsonl")
      ->required();
  attack_cmd->add_option("-d,--data", attack_data,
                         "dataset directory (taxonomy, and truth for scoring)")
      ->required();
  attack_cmd->add_option("-o,--out", attack_out, "attack.json")->required();

  Settings bench_s;
  std::string bench_out, bench_gateways = "4,8,16", bench_bits = "512,1024";
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "time the pipeline over a parameter sweep");
  bench_cmd->add_option("-o,--out", bench_out, "timing.csv")->required();
  bench_cmd->add_option("--gateways", bench_gateways, "comma-separated counts");
  bench_cmd->add_option("--key-bits", bench_bits, "comma-separated key sizes");
  AddSettings(bench_cmd, bench_s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (synth_cmd->parsed()) {
      SynthConfig synth;
      ProtocolParams protocol;
      Resolve(synth_s, synth, protocol);
      const Dataset ds = Synthesize(synth);
      WriteDataset(synth_out, ds);
      WriteConfigFile(fs::path(synth_out) / "config.txt",
                      ToConfigMap(synth, protocol));
      std::cout << "wrote " << ds.logs.size() << " gateway logs to " << synth_out
                << '\n';
      return kExitOk;
    }
    if (run_cmd->parsed()) {
      SynthConfig synth;
      ProtocolParams protocol;
      Resolve(run_s, synth, protocol);
      const Dataset ds = ReadDataset(run_data);
      const PipelineResult r = RunPipeline(ds, protocol);
      WriteOutputs(run_out, r);
      PrintSummary(r);
      if (!r.complete) {
        std::cerr << "protocol aborted: " << r.abort_reason << '\n';
        return kExitAbort;
      }
      return kExitOk;
    }
    if (eval_cmd->parsed()) {
      const nlohmann::json groups = ReadJson(eval_groups);
      const GroundTruth truth = TruthFromJson(ReadJson(eval_truth));
      std::map<std::string, Metrics> by_level;
      by_level["real"] = Evaluate(RealGroupsFromJson(groups), truth.topic_of);
      by_level["virtual"] = Evaluate(VirtualGroupsFromJson(groups), truth.topic_of);
      WriteMetricsCsv(eval_out, by_level);
      for (const auto& [level, m] : by_level) {
        std::cout << level << ": precision " << m.macro_precision << ", recall "
                  << m.macro_recall << ", f1 " << m.macro_f1 << '\n';
      }
      return kExitOk;
    }
    if (attack_cmd->parsed()) {
      const std::vector<Message> transcript = cti::ReadTranscript(attack_transcript);
      const Dataset ds = ReadDataset(attack_data);
      std::set<Token> leaked;
      for (const auto& [p, tokens] : ds.truth.leaked) {
        leaked.insert(tokens.begin(), tokens.end());
      }
      const AttackReport report =
          LeakageAttack(transcript, ds.taxonomy, leaked, ds.truth.sensitive);
      WriteJson(attack_out, AttackToJson(report));
      std::cout << "hypernyms recovered: " << report.hypernyms_recovered.size()
                << ", suppressed recovered: " << report.suppressed_recovered.size()
                << '\n';
      return kExitOk;
    }
    if (bench_cmd->parsed()) {
      SynthConfig synth;
      ProtocolParams protocol;
      Resolve(bench_s, synth, protocol);
      const std::vector<unsigned> counts = ParseList(bench_gateways, "--gateways");
      const std::vector<unsigned> bits = ParseList(bench_bits, "--key-bits");
      std::ofstream out(bench_out);
      if (!out) throw Error("cannot write " + bench_out);
      out << "gateways,key_bits,phase,seconds\n";
      for (unsigned n : counts) {
        SynthConfig c = synth;
        c.num_gateways = n;
        c.planted_topics = std::min(c.planted_topics, n);
        ValidateSynthConfig(c);
        const Dataset ds = Synthesize(c);
        for (unsigned b : bits) {
          ProtocolParams p = protocol;
          p.str.key_bits = b;
          p.sti.group_bits = b;
          ValidateProtocolParams(p);
          const PipelineResult r = RunPipeline(ds, p);
          if (!r.complete) throw ProtocolAbort(r.abort_reason);
          for (const PhaseTiming& t : r.timing) {
            out << n << ',' << b << ',' << t.phase << ',' << t.seconds << '\n';
          }
          std::cout << n << " gateways, " << b << " bits: "
                    << r.timing.back().seconds << " s\n";
        }
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ProtocolAbort& e) {
    std::cerr << "protocol aborted: " << e.what() << '\n';
    return kExitAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
