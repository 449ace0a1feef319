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

#include "vdq/pipeline.h"

#include <condition_variable>
#include <future>
#include <thread>

#include <spdlog/spdlog.h>

#include "vdq/native_ops.h"
#include "vdq/work_queue.h"

namespace vdq {

std::string to_string(ExecutionMode m) { return m == ExecutionMode::kSync ? "sync" : "async"; }

ExecutionMode execution_mode_from_string(const std::string& s) {
  if (s == "sync") return ExecutionMode::kSync;
  if (s == "async") return ExecutionMode::kAsync;
  throw Error("unknown execution mode '" + s + "'");
}

void PipelineProbe::on_enqueue(EntityId) {
  std::lock_guard lock(mu_);
  last_enqueue_ = Clock::now();
}

void PipelineProbe::on_response(EntityId id) {
  std::lock_guard lock(mu_);
  if (!first_response_) first_response_ = Clock::now();
  response_order_.push_back(id);
}

void PipelineProbe::on_step(EntityId id, std::size_t pc) {
  std::lock_guard lock(mu_);
  pc_trace_[id].push_back(pc);
}

std::optional<Clock::time_point> PipelineProbe::last_enqueue() const {
  std::lock_guard lock(mu_);
  return last_enqueue_;
}

std::optional<Clock::time_point> PipelineProbe::first_response() const {
  std::lock_guard lock(mu_);
  return first_response_;
}

std::vector<EntityId> PipelineProbe::response_order() const {
  std::lock_guard lock(mu_);
  return response_order_;
}

std::map<EntityId, std::vector<std::size_t>> PipelineProbe::pc_trace() const {
  std::lock_guard lock(mu_);
  return pc_trace_;
}

namespace {

std::string step_error(std::size_t pc, const OperationSpec& op, const std::string& what) {
  return "operation " + std::to_string(pc) + " (" + op.type + "): " + what;
}

DeferredExecutor* executor_for(const Executors& ex, ExecClass c) {
  switch (c) {
    case ExecClass::kRemote: return ex.remote;
    case ExecClass::kUdf: return ex.udf;
    case ExecClass::kNative: return nullptr;
  }
  return nullptr;
}

void check_executors(const PipelineRequest& req) {
  if (!req.ops) throw Error("pipeline has no operation list");
  for (const auto& op : *req.ops) {
    if (op.is_deferred() && executor_for(req.executors, op.exec_class) == nullptr) {
      throw Error("no executor configured for " + to_string(op.exec_class) + " operation '" +
                  op.type + "'");
    }
  }
}

TaskHandle make_task(EntityId id, MediaObject media,
                     const std::shared_ptr<const std::vector<OperationSpec>>& ops) {
  auto task = std::make_unique<EntityTask>();
  task->id = id;
  task->media = std::move(media);
  task->ops = ops;
  return task;
}

class AsyncRun : public std::enable_shared_from_this<AsyncRun> {
 public:
  explicit AsyncRun(const PipelineRequest& req)
      : ops_(req.ops), executors_(req.executors), probe_(req.probe), erd_(req.ids) {}

  EntityResponseDictionary run(const std::vector<EntityId>& ids, const MediaLoader& load) {
    auto self = shared_from_this();
    std::thread native([self] { self->native_loop(); });
    std::thread deferred([self] { self->deferred_loop(); });

    for (EntityId id : ids) {
      std::optional<MediaObject> media;
      try {
        media = load(id);
      } catch (const std::exception& e) {
        fail(id, std::string("load failed: ") + e.what(), 0);
        continue;
      }
      {
        std::lock_guard lock(erd_mu_);
        erd_.record_progress(id, *media, 0);
      }
      auto task = make_task(id, std::move(*media), ops_);
      if (probe_) probe_->on_enqueue(id);
      q1_.push(std::move(task));
    }

    {
      std::unique_lock lock(done_mu_);
      done_cv_.wait(lock, [&] { return completed_ == ids.size(); });
    }
    q1_.close();
    q2_.close();
    native.join();
    deferred.join();
    std::lock_guard lock(erd_mu_);
    return std::move(erd_);
  }

 private:
  // Thread 2: run native steps until the task finishes or reaches a deferred step.
  void native_loop() {
    while (auto next = q1_.pop()) {
      TaskHandle task = std::move(*next);
      bool failed = false;
      while (!task->done() && task->current().exec_class == ExecClass::kNative) {
        try {
          task->media = apply_native(task->current(), task->media);
        } catch (const std::exception& e) {
          fail(task->id, step_error(task->pc, task->current(), e.what()), task->pc);
          failed = true;
          break;
        }
        ++task->pc;
        if (probe_) ++probe_->native_execs;
        progress(*task);
      }
      if (failed) continue;
      if (task->done()) {
        succeed(task->id);
      } else {
        q2_.push(std::move(task));
      }
    }
  }

  // Thread 3: hand deferred steps to their executors without waiting.
  void deferred_loop() {
    while (auto next = q2_.pop()) {
      TaskHandle task = std::move(*next);
      const EntityId id = task->id;
      const std::size_t pc = task->pc;
      const OperationSpec& op = task->current();
      const auto input = std::make_shared<const MediaObject>(std::move(task->media));
      {
        std::lock_guard lock(inflight_mu_);
        inflight_.emplace(id, std::move(task));
      }
      if (probe_) ++probe_->dispatches;
      auto self = shared_from_this();
      try {
        executor_for(executors_, op.exec_class)
            ->dispatch(id, op, *input,
                       [self, id, pc](OpOutcome o) { self->on_response(id, pc, std::move(o)); });
      } catch (const std::exception& e) {
        if (auto orphan = take_inflight(id, pc)) {
          fail(id, step_error(pc, op, e.what()), pc);
        }
      }
    }
  }

  // A response matches only the step it was dispatched for; duplicates and
  // late replies find either no task or a task at a different pc.
  TaskHandle take_inflight(EntityId id, std::size_t pc) {
    std::lock_guard lock(inflight_mu_);
    auto it = inflight_.find(id);
    if (it == inflight_.end() || it->second->pc != pc) return nullptr;
    TaskHandle t = std::move(it->second);
    inflight_.erase(it);
    return t;
  }

  void on_response(EntityId id, std::size_t pc, OpOutcome outcome) {
    TaskHandle task = take_inflight(id, pc);
    if (!task) {
      if (probe_) ++probe_->unknown_responses;
      spdlog::warn("dropping response for entity {} step {}: not in flight", id, pc);
      return;
    }
    if (probe_) {
      ++probe_->completions;
      probe_->on_response(id);
    }
    if (!outcome.ok()) {
      fail(id, step_error(task->pc, task->current(), outcome.error), task->pc);
      return;
    }
    task->media = std::move(*outcome.media);
    ++task->pc;
    progress(*task);
    q1_.push(std::move(task));
  }

  void progress(const EntityTask& task) {
    {
      std::lock_guard lock(erd_mu_);
      erd_.record_progress(task.id, task.media, task.pc);
    }
    if (probe_) {
      ++probe_->erd_updates;
      probe_->on_step(task.id, task.pc);
    }
  }

  void succeed(EntityId id) {
    {
      std::lock_guard lock(erd_mu_);
      erd_.record_success(id);
    }
    finish();
  }

  void fail(EntityId id, std::string error, std::size_t ops_done) {
    {
      std::lock_guard lock(erd_mu_);
      erd_.record_failure(id, std::move(error), ops_done);
    }
    finish();
  }

  void finish() {
    {
      std::lock_guard lock(done_mu_);
      ++completed_;
    }
    done_cv_.notify_all();
  }

  std::shared_ptr<const std::vector<OperationSpec>> ops_;
  Executors executors_;
  std::shared_ptr<PipelineProbe> probe_;

  WorkQueue<TaskHandle> q1_;
  WorkQueue<TaskHandle> q2_;

  std::mutex erd_mu_;
  EntityResponseDictionary erd_;

  std::mutex inflight_mu_;
  std::map<EntityId, TaskHandle> inflight_;

  std::mutex done_mu_;
  std::condition_variable done_cv_;
  std::size_t completed_ = 0;
};

}  // namespace

EntityResponseDictionary run_async(const PipelineRequest& request) {
  check_executors(request);
  auto run = std::make_shared<AsyncRun>(request);
  return run->run(request.ids, request.load);
}

EntityResponseDictionary run_sync(const PipelineRequest& request) {
  check_executors(request);
  EntityResponseDictionary erd(request.ids);
  PipelineProbe* probe = request.probe.get();
  for (EntityId id : request.ids) {
    MediaObject media;
    try {
      media = request.load(id);
    } catch (const std::exception& e) {
      erd.record_failure(id, std::string("load failed: ") + e.what(), 0);
      continue;
    }
    erd.record_progress(id, media, 0);
    if (probe) probe->on_enqueue(id);
    std::size_t pc = 0;
    std::optional<std::string> error;
    for (const auto& op : *request.ops) {
      try {
        if (op.exec_class == ExecClass::kNative) {
          media = apply_native(op, media);
          if (probe) ++probe->native_execs;
        } else {
          std::promise<OpOutcome> promise;
          auto future = promise.get_future();
          if (probe) ++probe->dispatches;
          executor_for(request.executors, op.exec_class)
              ->dispatch(id, op, media, [&promise](OpOutcome o) { promise.set_value(std::move(o)); });
          OpOutcome outcome = future.get();
          if (probe) {
            ++probe->completions;
            probe->on_response(id);
          }
          if (!outcome.ok()) throw OpError(outcome.error);
          media = std::move(*outcome.media);
        }
      } catch (const std::exception& e) {
        error = step_error(pc, op, e.what());
        break;
      }
      ++pc;
      erd.record_progress(id, media, pc);
      if (probe) {
        ++probe->erd_updates;
        probe->on_step(id, pc);
      }
    }
    if (error) {
      erd.record_failure(id, std::move(*error), pc);
    } else {
      erd.record_success(id);
    }
  }
  return erd;
}

EntityResponseDictionary run_pipeline(ExecutionMode mode, const PipelineRequest& request) {
  return mode == ExecutionMode::kSync ? run_sync(request) : run_async(request);
}

}  // namespace vdq
