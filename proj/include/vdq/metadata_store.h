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

#include <map>
#include <shared_mutex>
#include <vector>

#include "vdq/codec.h"
#include "vdq/entity.h"
#include "vdq/metadata.h"

namespace vdq {

class UnknownEntityError : public Error {
 public:
  using Error::Error;
};

struct StoreRecord {
  EntityId id = 0;
  MediaKind kind = MediaKind::kImage;
  PropertyMap properties;
  Bytes media_bytes;
};

// Process-lifetime entity store. Reads run concurrently; Add is exclusive.
class MetadataStore {
 public:
  // Validates that the blob decodes to `kind`, then stores it verbatim.
  EntityId add_entity(MediaKind kind, PropertyMap properties, Bytes media_bytes);

  // Ascending ids of `kind` records satisfying every constraint.
  std::vector<EntityId> filter(MediaKind kind, const std::vector<Constraint>& constraints) const;

  // Fresh decode of the stored blob; callers may mutate it freely.
  MediaObject get_media(EntityId id) const;
  PropertyMap properties(EntityId id) const;
  StoreRecord record(EntityId id) const;

  std::size_t size() const;
  // Snapshot of every record in id order (for diagnostics and tests).
  std::vector<StoreRecord> records() const;

 private:
  const StoreRecord& find(EntityId id) const;

  mutable std::shared_mutex mu_;
  std::map<EntityId, StoreRecord> records_;
  EntityId last_id_ = 0;
};

}  // namespace vdq
