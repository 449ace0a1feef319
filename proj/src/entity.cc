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

#include "vdq/entity.h"

#include "vdq/codec.h"

namespace vdq {

std::string to_string(EntityStatus s) {
  switch (s) {
    case EntityStatus::kPending: return "pending";
    case EntityStatus::kOk: return "ok";
    case EntityStatus::kFailed: return "failed";
  }
  return "?";
}

EntityResponseDictionary::EntityResponseDictionary(const std::vector<EntityId>& ids) {
  for (auto id : ids) entries_.try_emplace(id);
}

ErdEntry& EntityResponseDictionary::slot(EntityId id) {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw Error("entity " + std::to_string(id) + " not in ERD");
  return it->second;
}

const ErdEntry& EntityResponseDictionary::at(EntityId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw Error("entity " + std::to_string(id) + " not in ERD");
  return it->second;
}

void EntityResponseDictionary::record_progress(EntityId id, const MediaObject& media,
                                               std::size_t ops_done) {
  auto& e = slot(id);
  e.media = media;
  e.ops_done = ops_done;
}

void EntityResponseDictionary::record_success(EntityId id) { slot(id).status = EntityStatus::kOk; }

void EntityResponseDictionary::record_failure(EntityId id, std::string error,
                                              std::size_t ops_done) {
  auto& e = slot(id);
  e.status = EntityStatus::kFailed;
  e.error = std::move(error);
  e.ops_done = ops_done;
}

bool EntityResponseDictionary::all_settled() const {
  for (const auto& [_, e] : entries_) {
    if (e.status == EntityStatus::kPending) return false;
  }
  return true;
}

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_bytes(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> bytes) {
  put_u64(out, bytes.size());
  out.insert(out.end(), bytes.begin(), bytes.end());
}

}  // namespace

std::vector<std::uint8_t> erd_bytes(const EntityResponseDictionary& erd) {
  std::vector<std::uint8_t> out;
  for (const auto& [id, e] : erd) {
    put_u64(out, id);
    out.push_back(static_cast<std::uint8_t>(e.status));
    put_u64(out, e.ops_done);
    const std::string err = e.error.value_or("");
    put_bytes(out, {reinterpret_cast<const std::uint8_t*>(err.data()), err.size()});
    if (e.media.frame_count() == 0) {
      put_u64(out, 0);
    } else {
      put_bytes(out, encode_media(e.media));
    }
  }
  return out;
}

}  // namespace vdq
