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

#include "vdq/metadata_store.h"

#include <mutex>

namespace vdq {

EntityId MetadataStore::add_entity(MediaKind kind, PropertyMap properties, Bytes media_bytes) {
  decode_media(media_bytes, kind);
  std::unique_lock lock(mu_);
  const EntityId id = ++last_id_;
  records_.emplace(id, StoreRecord{id, kind, std::move(properties), std::move(media_bytes)});
  return id;
}

std::vector<EntityId> MetadataStore::filter(MediaKind kind,
                                            const std::vector<Constraint>& constraints) const {
  std::shared_lock lock(mu_);
  std::vector<EntityId> out;
  for (const auto& [id, rec] : records_) {
    if (rec.kind == kind && satisfies_all(rec.properties, constraints)) out.push_back(id);
  }
  return out;
}

const StoreRecord& MetadataStore::find(EntityId id) const {
  auto it = records_.find(id);
  if (it == records_.end()) throw UnknownEntityError("unknown entity id " + std::to_string(id));
  return it->second;
}

MediaObject MetadataStore::get_media(EntityId id) const {
  std::shared_lock lock(mu_);
  const auto& rec = find(id);
  // Records are never erased or modified, so decoding outside the lock is safe.
  const auto& bytes = rec.media_bytes;
  const auto kind = rec.kind;
  lock.unlock();
  return decode_media(bytes, kind);
}

PropertyMap MetadataStore::properties(EntityId id) const {
  std::shared_lock lock(mu_);
  return find(id).properties;
}

StoreRecord MetadataStore::record(EntityId id) const {
  std::shared_lock lock(mu_);
  return find(id);
}

std::size_t MetadataStore::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::vector<StoreRecord> MetadataStore::records() const {
  std::shared_lock lock(mu_);
  std::vector<StoreRecord> out;
  out.reserve(records_.size());
  for (const auto& [_, rec] : records_) out.push_back(rec);
  return out;
}

}  // namespace vdq
