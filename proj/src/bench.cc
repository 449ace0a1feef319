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

#include "vdq/bench.h"

#include <algorithm>
#include <barrier>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "vdq/codec.h"
#include "vdq/synthetic.h"

namespace vdq {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(BenchCategory c) {
  switch (c) {
    case BenchCategory::kC1: return "C1";
    case BenchCategory::kC2: return "C2";
    case BenchCategory::kC3: return "C3";
    case BenchCategory::kScaleout: return "scaleout";
  }
  return "?";
}

BenchCategory bench_category_from_string(const std::string& s) {
  if (s == "C1") return BenchCategory::kC1;
  if (s == "C2") return BenchCategory::kC2;
  if (s == "C3") return BenchCategory::kC3;
  if (s == "scaleout") return BenchCategory::kScaleout;
  throw Error("unknown bench category '" + s + "'");
}

namespace {

json remote(const std::string& url, json options) { return {{"type", "remoteOp"}, {"url", url}, {"options", std::move(options)}}; }

// Parameters suit the default 64x64 synthetic dataset (10 frames at 25 fps).
std::map<std::string, std::vector<json>> templates(const std::string& url) {
  std::map<std::string, std::vector<json>> t;
  t["IQ1"] = {remote(url, {{"id", "crop"}, {"x", 8}, {"y", 8}, {"width", 40}, {"height", 32}})};
  t["IQ2"] = {remote(url, {{"id", "grayscale"}})};
  t["IQ3"] = {remote(url, {{"id", "gaussianblur"}, {"kernel_w", 5}, {"kernel_h", 5}, {"sigmaX", 1.5}})};
  t["IQ4"] = {remote(url, {{"id", "facedetect_box"}})};
  t["IQ5"] = {remote(url, {{"id", "facedetect_mask"}, {"radius", 6}})};
  t["IQ6"] = {remote(url, {{"id", "upsample"}, {"X", 2.0}, {"Y", 1.5}})};
  t["IQ7"] = {remote(url, {{"id", "downsample"}, {"X", 2.0}, {"Y", 2.0}})};
  t["IQ8"] = {remote(url, {{"id", "caption"}, {"text", "VDQ"}, {"x", 2}, {"y", 2}})};
  t["IQ9"] = {remote(url, {{"id", "manipulation"}, {"radius", 12}})};
  t["VQ1"] = {remote(url, {{"id", "select"}, {"t1", 0.08}, {"t2", 0.32}, {"x", 8}, {"y", 8},
                           {"width", 48}, {"height", 48}})};
  t["VQ2"] = t["IQ2"];
  t["VQ3"] = t["IQ3"];
  t["VQ4"] = t["IQ4"];
  t["VQ5"] = t["IQ5"];
  t["VQ6"] = t["IQ6"];
  t["VQ7"] = t["IQ7"];
  t["VQ8"] = {remote(url, {{"id", "activity_label"}})};
  t["VQ9"] = t["IQ9"];
  t["C2-image"] = {{{"type", "resize"}, {"width", 96}, {"height", 80}},
                   remote(url, {{"id", "facedetect_box"}}),
                   remote(url, {{"id", "manipulation"}}),
                   {{"type", "rotate"}, {"angle", 90}}};
  t["C2-video"] = {remote(url, {{"id", "activity_label"}}),
                   {{"type", "resize"}, {"width", 96}, {"height", 80}},
                   remote(url, {{"id", "select"}, {"t1", 0.0}, {"t2", 0.2}, {"x", 0}, {"y", 0},
                                {"width", 64}, {"height", 64}}),
                   remote(url, {{"id", "manipulation"}})};
  return t;
}

}  // namespace

std::vector<std::string> query_template_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, ops] : templates("")) ids.push_back(id);
  return ids;
}

bool template_is_video(const std::string& id) { return id.rfind("VQ", 0) == 0 || id == "C2-video"; }

json query_template(const std::string& id, const std::string& remote_url) {
  auto all = templates(remote_url);
  auto it = all.find(id);
  if (it == all.end()) throw Error("unknown query template '" + id + "'");
  return {{template_is_video(id) ? "FindVideo" : "FindImage", {{"operations", it->second}}}};
}

void BenchSpec::validate() const {
  if (clients < 1) throw Error("clients must be at least 1");
  if (repetitions < 1) throw Error("repetitions must be at least 1");
  if ((category == BenchCategory::kC1 || category == BenchCategory::kC2) && clients != 1) {
    throw Error(to_string(category) + " runs use exactly one client");
  }
  query_template(query_id, remote_url);
}

std::size_t BenchResult::valid_runs() const {
  return std::count_if(runs.begin(), runs.end(), [](const BenchRun& r) { return r.valid; });
}

double BenchResult::mean_duration() const {
  double sum = 0;
  for (const auto& r : runs) {
    if (r.valid) sum += r.duration_s;
  }
  return valid_runs() ? sum / valid_runs() : 0.0;
}

double BenchResult::mean_throughput() const {
  double sum = 0;
  for (const auto& r : runs) {
    if (r.valid) sum += r.throughput;
  }
  return valid_runs() ? sum / valid_runs() : 0.0;
}

namespace {

struct ClientOutcome {
  Clock::time_point sent;
  Clock::time_point received;
  std::size_t units = 0;
  std::map<EntityId, Bytes> outputs;
  std::string problem;
};

ClientOutcome examine(const WireMessage& reply, bool video) {
  ClientOutcome out;
  if (reply.doc.value("status", "") != "ok") {
    out.problem = "error reply: " + reply.doc.value("error", reply.doc.dump());
    return out;
  }
  std::size_t blob = 0;
  for (const auto& e : reply.doc.at("entities")) {
    const EntityId id = e.at("id").get<EntityId>();
    if (e.at("status") != "ok") {
      out.problem = fmt::format("entity {} failed: {}", id, e.value("error", ""));
      return out;
    }
    out.units += video ? e.at("media").at("frame_count").get<std::size_t>() : 1;
    if (blob < reply.blobs.size()) out.outputs[id] = reply.blobs[blob++];
  }
  return out;
}

BenchRun run_once(const BenchSpec& spec, const WireMessage& request, int run_index) {
  const bool video = template_is_video(spec.query_id);
  std::vector<QueryClient> conns;
  conns.reserve(spec.clients);
  for (int i = 0; i < spec.clients; ++i) conns.emplace_back(spec.host, spec.port);

  std::vector<ClientOutcome> outcomes(spec.clients);
  std::barrier start(spec.clients);
  std::vector<std::thread> threads;
  for (int i = 0; i < spec.clients; ++i) {
    threads.emplace_back([&, i] {
      start.arrive_and_wait();
      auto& o = outcomes[i];
      try {
        const auto sent = Clock::now();
        auto reply = conns[i].send(request);
        const auto received = Clock::now();
        o = examine(reply, video);
        o.sent = sent;
        o.received = received;
      } catch (const std::exception& e) {
        o.problem = e.what();
      }
    });
  }
  for (auto& t : threads) t.join();

  BenchRun run;
  run.run_index = run_index;
  Clock::time_point first = outcomes[0].sent, last = outcomes[0].received;
  for (const auto& o : outcomes) {
    if (!o.problem.empty() && run.valid) {
      run.valid = false;
      run.problem = o.problem;
    }
    first = std::min(first, o.sent);
    last = std::max(last, o.received);
    run.entities += o.units;
  }
  for (std::size_t i = 1; run.valid && i < outcomes.size(); ++i) {
    if (outcomes[i].outputs != outcomes[0].outputs) {
      run.valid = false;
      run.problem = fmt::format("client {} received different outputs than client 0", i);
    }
  }
  const double seconds = std::chrono::duration<double>(last - first).count();
  run.duration_s = std::max<double>(std::llround(seconds * 1e6), 1.0) / 1e6;
  run.throughput = static_cast<double>(run.entities) / run.duration_s;
  if (spec.keep_outputs) run.outputs = std::move(outcomes[0].outputs);
  return run;
}

}  // namespace

BenchResult run_bench(const BenchSpec& spec) {
  spec.validate();
  WireMessage request;
  request.doc = query_template(spec.query_id, spec.remote_url);
  request.doc["mode"] = to_string(spec.mode);
  BenchResult result;
  result.spec = spec;
  for (int i = 0; i < spec.repetitions; ++i) {
    auto run = run_once(spec, request, i);
    if (!run.valid) spdlog::warn("run {} invalid: {}", i, run.problem);
    result.runs.push_back(std::move(run));
  }
  return result;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchResult>& results, bool header) {
  if (header) out << kBenchCsvHeader << '\n';
  for (const auto& r : results) {
    for (const auto& run : r.runs) {
      if (!run.valid) continue;
      out << fmt::format("{},{},{},{},{},{},{:.6f},{},{}\n", to_string(r.spec.category),
                         r.spec.query_id, to_string(r.spec.mode), r.spec.clients, r.spec.workers,
                         run.run_index, run.duration_s, run.entities, run.throughput);
    }
  }
}

namespace {

Bytes read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error("cannot read " + p.string());
  return Bytes(std::istreambuf_iterator<char>(f), {});
}

void write_file(const fs::path& p, const Bytes& bytes) {
  std::ofstream f(p, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("cannot write " + p.string());
}

}  // namespace

SeedReport seed_from_manifest(QueryClient& client, const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error("cannot read manifest " + manifest.string());
  SeedReport report;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = fmt::format("{}:{}", manifest.filename().string(), lineno);
    try {
      const auto row = json::parse(line);
      fs::path path = row.at("path").get<std::string>();
      if (path.is_relative()) path = manifest.parent_path() / path;
      where += " (" + path.string() + ")";
      MediaKind kind = row.contains("kind")
                           ? media_kind_from_string(row.at("kind").get<std::string>())
                           : (path.extension() == ".rvid" ? MediaKind::kVideo : MediaKind::kImage);
      WireMessage add;
      add.doc = {{kind == MediaKind::kImage ? "AddImage" : "AddVideo",
                  {{"properties", row.value("metadata", json::object())}}}};
      add.blobs.push_back(read_file(path));
      const auto reply = client.send(add);
      if (reply.doc.value("status", "") != "ok") {
        report.failures.push_back(where + ": " + reply.doc.value("error", "rejected"));
      } else {
        ++report.added;
      }
    } catch (const WireError&) {
      throw;
    } catch (const std::exception& e) {
      report.failures.push_back(where + ": " + e.what());
    }
  }
  return report;
}

json run_query_to_dir(QueryClient& client, const json& query, const fs::path& out_dir) {
  WireMessage request;
  request.doc = query;
  const auto reply = client.send(request);
  if (reply.doc.value("status", "") != "ok") return reply.doc;
  fs::create_directories(out_dir);
  std::size_t blob = 0;
  for (const auto& e : reply.doc.at("entities")) {
    if (e.at("status") != "ok" || blob >= reply.blobs.size()) continue;
    const auto kind = media_kind_from_string(e.at("media").at("kind").get<std::string>());
    write_file(out_dir / (std::to_string(e.at("id").get<EntityId>()) + file_extension(kind)),
               reply.blobs[blob++]);
  }
  return reply.doc;
}

fs::path generate_dataset(const fs::path& dir, const DatasetOptions& o) {
  static const char* const kActivities[] = {"running", "jumping", "dancing", "cooking", "swimming"};
  fs::create_directories(dir);
  const fs::path manifest = dir / "manifest.jsonl";
  std::ofstream out(manifest);
  for (int i = 0; i < o.images; ++i) {
    const auto name = fmt::format("img_{:05}", i);
    write_file(dir / (name + ".png"), encode_png(synthetic_image(o.seed + i, o.width, o.height)));
    out << json{{"path", name + ".png"}, {"kind", "image"},
                {"metadata", {{"category", "synthetic"}, {"name", name}, {"index", i}}}}.dump()
        << '\n';
  }
  for (int i = 0; i < o.videos; ++i) {
    const auto name = fmt::format("vid_{:05}", i);
    write_file(dir / (name + ".rvid"),
               encode_rvid(synthetic_video(o.seed + 1000000 + i, o.width, o.height, o.frames)));
    out << json{{"path", name + ".rvid"}, {"kind", "video"},
                {"metadata", {{"category", "activity"}, {"activity", kActivities[i % 5]}, {"index", i}}}}
               .dump()
        << '\n';
  }
  if (!out) throw Error("cannot write " + manifest.string());
  return manifest;
}

}  // namespace vdq
