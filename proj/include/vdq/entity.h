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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vdq/media.h"
#include "vdq/query.h"

namespace vdq {

using EntityId = std::uint64_t;

// The unit handed between pipeline actors. Whoever holds the unique_ptr owns
// the task; pc only moves forward, one step per completed operation.
struct EntityTask {
  EntityId id = 0;
  MediaObject media;
  std::shared_ptr<const std::vector<OperationSpec>> ops;
  std::size_t pc = 0;

  bool done() const { return pc >= ops->size(); }
  const OperationSpec& current() const { return ops->at(pc); }
};

using TaskHandle = std::unique_ptr<EntityTask>;

enum class EntityStatus { kPending, kOk, kFailed };

std::string to_string(EntityStatus s);

struct ErdEntry {
  MediaObject media;
  EntityStatus status = EntityStatus::kPending;
  std::optional<std::string> error;
  std::size_t ops_done = 0;
};

// entity id -> latest snapshot. The key set is fixed when the dictionary is
// created; afterwards writers touch disjoint entries, so the map itself needs
// no lock. Readers must wait for pipeline termination.
class EntityResponseDictionary {
 public:
  EntityResponseDictionary() = default;
  explicit EntityResponseDictionary(const std::vector<EntityId>& ids);

  void record_progress(EntityId id, const MediaObject& media, std::size_t ops_done);
  void record_success(EntityId id);
  void record_failure(EntityId id, std::string error, std::size_t ops_done);

  const ErdEntry& at(EntityId id) const;
  bool contains(EntityId id) const { return entries_.count(id) != 0; }
  std::size_t size() const { return entries_.size(); }
  bool all_settled() const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  ErdEntry& slot(EntityId id);

  std::map<EntityId, ErdEntry> entries_;
};

// Canonical byte form (ascending id: status, ops_done, error, encoded media);
// two dictionaries are equivalent iff their byte forms are equal.
std::vector<std::uint8_t> erd_bytes(const EntityResponseDictionary& erd);

}  // namespace vdq
