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

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vdq/entity.h"
#include "vdq/media.h"
#include "vdq/query.h"

namespace vdq {

struct OpOutcome {
  std::optional<MediaObject> media;
  std::string error;

  static OpOutcome success(MediaObject m) { return {std::move(m), {}}; }
  static OpOutcome failure(std::string e) { return {std::nullopt, std::move(e)}; }
  bool ok() const { return media.has_value(); }
};

using Completion = std::function<void(OpOutcome)>;

// Runs one remote or UDF step. dispatch() must return without waiting for the
// result; `done` is invoked exactly once, from any thread, possibly before
// dispatch() returns.
class DeferredExecutor {
 public:
  virtual ~DeferredExecutor() = default;
  virtual void dispatch(EntityId id, const OperationSpec& op, const MediaObject& media,
                        Completion done) = 0;
};

struct Executors {
  DeferredExecutor* remote = nullptr;
  DeferredExecutor* udf = nullptr;
};

enum class ExecutionMode { kSync, kAsync };

std::string to_string(ExecutionMode m);
ExecutionMode execution_mode_from_string(const std::string& s);

using MediaLoader = std::function<MediaObject(EntityId)>;
using Clock = std::chrono::steady_clock;

// Optional instrumentation. All members are safe to read after the run.
class PipelineProbe {
 public:
  std::atomic<std::size_t> dispatches{0};
  std::atomic<std::size_t> completions{0};
  std::atomic<std::size_t> native_execs{0};
  std::atomic<std::size_t> erd_updates{0};
  std::atomic<std::size_t> unknown_responses{0};

  void on_enqueue(EntityId id);
  void on_response(EntityId id);
  void on_step(EntityId id, std::size_t pc);

  std::optional<Clock::time_point> last_enqueue() const;
  std::optional<Clock::time_point> first_response() const;
  std::vector<EntityId> response_order() const;
  std::map<EntityId, std::vector<std::size_t>> pc_trace() const;

 private:
  mutable std::mutex mu_;
  std::optional<Clock::time_point> last_enqueue_;
  std::optional<Clock::time_point> first_response_;
  std::vector<EntityId> response_order_;
  std::map<EntityId, std::vector<std::size_t>> pc_trace_;
};

struct PipelineRequest {
  std::vector<EntityId> ids;
  MediaLoader load;
  std::shared_ptr<const std::vector<OperationSpec>> ops;
  Executors executors;
  std::shared_ptr<PipelineProbe> probe;
};

// Blocks until every entity is settled. Throws Error if an operation class in
// the pipeline has no executor.
EntityResponseDictionary run_pipeline(ExecutionMode mode, const PipelineRequest& request);

EntityResponseDictionary run_async(const PipelineRequest& request);
EntityResponseDictionary run_sync(const PipelineRequest& request);

}  // namespace vdq
