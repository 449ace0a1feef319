// Copyright 2026 The vdq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vdq/pipeline.h"
#include "vdq/wire.h"

namespace vdq {

enum class BenchCategory { kC1, kC2, kC3, kScaleout };

std::string to_string(BenchCategory c);
BenchCategory bench_category_from_string(const std::string& s);

// Template ids: IQ1..IQ9, VQ1..VQ9, C2-image, C2-video. Every remote step
// targets `remote_url`, which may be a "pool://name" alias.
std::vector<std::string> query_template_ids();
nlohmann::json query_template(const std::string& id, const std::string& remote_url);
bool template_is_video(const std::string& id);

struct BenchSpec {
  BenchCategory category = BenchCategory::kC1;
  std::string query_id = "IQ2";
  int clients = 1;
  int repetitions = 15;
  int workers = 1;  // recorded in the CSV only
  std::string host = "127.0.0.1";
  int port = 55555;
  ExecutionMode mode = ExecutionMode::kAsync;
  std::string remote_url = "pool://workers";
  // Keeps per-entity result blobs of the first client of each run.
  bool keep_outputs = false;

  void validate() const;
};

struct BenchRun {
  int run_index = 0;
  double duration_s = 0;
  // Entities for image queries, frames for video queries.
  std::size_t entities = 0;
  double throughput = 0;
  bool valid = true;
  std::string problem;
  std::map<EntityId, Bytes> outputs;
};

struct BenchResult {
  BenchSpec spec;
  std::vector<BenchRun> runs;

  std::size_t valid_runs() const;
  double mean_duration() const;
  double mean_throughput() const;
};

// Runs spec.repetitions times. With several clients each opens its own
// connection and all send the same query at once; a run is timed from the
// first send to the last complete reply. A failed entity, an error reply or
// differing outputs between clients mark the run invalid.
BenchResult run_bench(const BenchSpec& spec);

inline constexpr const char* kBenchCsvHeader =
    "category,query_id,mode,clients,workers,run_index,duration_s,entities,throughput";

// Writes valid runs only. duration_s is printed with microsecond precision
// and throughput is computed from that printed value, so the columns agree.
void write_bench_csv(std::ostream& out, const std::vector<BenchResult>& results,
                     bool header = true);

struct SeedReport {
  std::size_t added = 0;
  std::vector<std::string> failures;
};

// Manifest: one JSON object per line, {"path", "kind", "metadata"}. Relative
// paths resolve against the manifest's directory. Unreadable or rejected
// files are reported and skipped.
SeedReport seed_from_manifest(QueryClient& client, const std::filesystem::path& manifest);

// Sends a query document and writes each returned blob to
// <out_dir>/<entity id>.<png|rvid>. Returns the reply document.
nlohmann::json run_query_to_dir(QueryClient& client, const nlohmann::json& query,
                                const std::filesystem::path& out_dir);

struct DatasetOptions {
  int images = 100;
  int videos = 0;
  int width = 64;
  int height = 64;
  int frames = 10;
  std::uint64_t seed = 1;
};

// Writes synthetic media plus manifest.jsonl into `dir`; returns the manifest path.
std::filesystem::path generate_dataset(const std::filesystem::path& dir,
                                       const DatasetOptions& options);

}  // namespace vdq
