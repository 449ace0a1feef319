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

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "vdq/bench.h"
#include "vdq/server.h"

namespace {

vdq::QueryClient connect(const std::string& server) {
  const auto [host, port] = vdq::split_host_port(server, vdq::kDefaultServerPort);
  return vdq::QueryClient(host.empty() ? "127.0.0.1" : host, port);
}

std::string expand_workers(std::string url, int workers) {
  const std::string key = "{workers}";
  if (auto pos = url.find(key); pos != std::string::npos) url.replace(pos, key.size(), std::to_string(workers));
  return url;
}

int run_bench_command(const std::string& server, const std::string& category, const std::string& query,
                      const std::vector<int>& clients, const std::vector<int>& workers,
                      const std::vector<std::string>& modes, int repetitions, const std::string& remote_url,
                      const std::string& csv_path) {
  const auto [host, port] = vdq::split_host_port(server, vdq::kDefaultServerPort);
  std::vector<vdq::BenchResult> results;
  bool all_valid = true;
  for (int w : workers) {
    for (int c : clients) {
      for (const auto& m : modes) {
        vdq::BenchSpec s;
        s.category = vdq::bench_category_from_string(category);
        s.query_id = query;
        s.clients = c;
        s.workers = w;
        s.repetitions = repetitions;
        s.host = host.empty() ? "127.0.0.1" : host;
        s.port = port;
        s.mode = vdq::execution_mode_from_string(m);
        s.remote_url = expand_workers(remote_url, w);
        auto r = vdq::run_bench(s);
        std::cout << fmt::format("{} {} mode={} clients={} workers={}: mean {:.4f} s, {:.1f} /s, {}/{} valid runs\n",
                                 vdq::to_string(s.category), s.query_id, m, c, w, r.mean_duration(),
                                 r.mean_throughput(), r.valid_runs(), r.runs.size());
        all_valid = all_valid && r.valid_runs() == r.runs.size();
        results.push_back(std::move(r));
      }
    }
  }

  auto mean_of = [&](const std::string& mode, int c, int w) -> double {
    for (const auto& r : results) {
      if (vdq::to_string(r.spec.mode) == mode && r.spec.clients == c && r.spec.workers == w && r.valid_runs()) {
        return r.mean_duration();
      }
    }
    return 0;
  };
  for (int w : workers) {
    for (int c : clients) {
      const double s = mean_of("sync", c, w), a = mean_of("async", c, w);
      if (s > 0 && a > 0) std::cout << fmt::format("speedup clients={} workers={}: {:.2f}x\n", c, w, s / a);
    }
  }
  if (workers.size() > 1) {
    for (const auto& m : modes) {
      for (int c : clients) {
        const double base = mean_of(m, c, workers.front());
        for (int w : workers) {
          const double t = mean_of(m, c, w);
          if (base > 0 && t > 0) {
            std::cout << fmt::format("T({})/T({}) mode={} clients={}: {:.2f}\n", workers.front(), w, m, c, base / t);
          }
        }
      }
    }
  }

  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    vdq::write_bench_csv(out, results);
    if (!out) throw vdq::Error("cannot write " + csv_path);
  } else {
    vdq::write_bench_csv(std::cout, results);
  }
  if (!all_valid) {
    spdlog::error("some runs were invalid and are left out of the CSV");
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vdq client and benchmark driver"};
  app.require_subcommand(1);
  std::string server = "127.0.0.1:55555", log_level = "info";
  app.add_option("--server", server, "query server host:port")->capture_default_str();
  app.add_option("--log-level", log_level)->check(CLI::IsMember({"trace", "debug", "info", "warn", "error"}));

  auto* seed = app.add_subcommand("seed", "add every entry of a JSONL manifest");
  std::string manifest;
  seed->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);

  auto* query = app.add_subcommand("query", "run a query file and save the returned media");
  std::string query_file, out_dir = ".";
  query->add_option("file", query_file)->required()->check(CLI::ExistingFile);
  query->add_option("--out", out_dir, "directory for <entity id>.<ext> files")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "time a query template and write CSV");
  std::string category = "C1", query_id = "IQ2", remote_url = "pool://workers", csv_path;
  std::vector<int> clients = {1}, workers = {1};
  std::vector<std::string> modes = {"async"};
  int repetitions = 15;
  bench->add_option("--category", category)->check(CLI::IsMember({"C1", "C2", "C3", "scaleout"}))->capture_default_str();
  bench->add_option("--query", query_id, "template id: IQ1-IQ9, VQ1-VQ9, C2-image, C2-video")->capture_default_str();
  bench->add_option("--clients", clients, "concurrent clients; a list runs each")->delimiter(',');
  bench->add_option("--workers", workers, "worker counts, substituted for {workers} in --remote-url")->delimiter(',');
  bench->add_option("--modes", modes, "sync, async or both")->delimiter(',')->check(CLI::IsMember({"sync", "async"}));
  bench->add_option("--repetitions", repetitions)->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--remote-url", remote_url, "endpoint for remote steps, e.g. pool://w{workers}")->capture_default_str();
  bench->add_option("--csv", csv_path, "output file (stdout when omitted)");

  auto* gen = app.add_subcommand("gen-dataset", "write synthetic media and a manifest");
  std::string gen_dir;
  vdq::DatasetOptions dataset;
  gen->add_option("dir", gen_dir)->required();
  gen->add_option("--images", dataset.images)->capture_default_str();
  gen->add_option("--videos", dataset.videos)->capture_default_str();
  gen->add_option("--width", dataset.width)->capture_default_str();
  gen->add_option("--height", dataset.height)->capture_default_str();
  gen->add_option("--frames", dataset.frames)->capture_default_str();
  gen->add_option("--seed", dataset.seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*seed) {
      auto client = connect(server);
      auto report = vdq::seed_from_manifest(client, manifest);
      for (const auto& f : report.failures) spdlog::warn("{}", f);
      std::cout << fmt::format("added {} entities, {} failed\n", report.added, report.failures.size());
      return report.failures.empty() ? 0 : 2;
    }
    if (*query) {
      std::ifstream in(query_file);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw vdq::Error(query_file + ": " + e.what());
      }
      auto client = connect(server);
      const auto reply = vdq::run_query_to_dir(client, doc, out_dir);
      std::cout << reply.dump(2) << '\n';
      return reply.value("status", "") == "ok" ? 0 : 1;
    }
    if (*bench) {
      return run_bench_command(server, category, query_id, clients, workers, modes, repetitions, remote_url,
                               csv_path);
    }
    if (*gen) {
      std::cout << vdq::generate_dataset(gen_dir, dataset).string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
