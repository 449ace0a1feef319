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

#include <gtest/gtest.h>

#include <random>

#include "support/oracles.h"
#include "vdq/codec.h"
#include "vdq/synthetic.h"

namespace vdq {
namespace {

Bytes png_blob(std::uint64_t seed = 1, int w = 8, int h = 6) {
  return encode_png(synthetic_image(seed, w, h));
}

TEST(MetadataStore, FirstInsertGetsIdOne) {
  MetadataStore store;
  EXPECT_EQ(store.add_entity(MediaKind::kImage,
                             {{"category", std::string("lfw")}, {"name", std::string("x")}},
                             png_blob()),
            1u);
  EXPECT_EQ(store.add_entity(MediaKind::kVideo,
                             {{"category", std::string("activity")},
                              {"activity", std::string("running")}},
                             encode_rvid(synthetic_video(2, 8, 6, 3))),
            2u);
}

TEST(MetadataStore, RejectsUndecodableOrMismatchedBlobs) {
  MetadataStore store;
  auto blob = png_blob();
  blob.resize(blob.size() / 2);
  EXPECT_THROW(store.add_entity(MediaKind::kImage, {}, blob), CodecError);
  EXPECT_THROW(store.add_entity(MediaKind::kVideo, {}, png_blob()), CodecError);
  EXPECT_EQ(store.size(), 0u);
}

TEST(MetadataStore, FilterAgeRange) {
  MetadataStore store;
  for (std::int64_t age : {20, 25, 40}) {
    store.add_entity(MediaKind::kImage, {{"age", age}}, png_blob(age));
  }
  std::vector<Constraint> cs = {{"age", Comparator::kGe, std::int64_t{21}},
                                {"age", Comparator::kLe, std::int64_t{40}}};
  EXPECT_EQ(store.filter(MediaKind::kImage, cs), (std::vector<EntityId>{2, 3}));
  EXPECT_EQ(store.filter(MediaKind::kImage, cs),
            testing::filter_oracle(store.records(), MediaKind::kImage, cs));
}

TEST(MetadataStore, EmptyConstraintsMatchAllOfKind) {
  MetadataStore store;
  for (int i = 0; i < 5; ++i) store.add_entity(MediaKind::kImage, {}, png_blob(i));
  store.add_entity(MediaKind::kVideo, {}, encode_rvid(synthetic_video(1, 4, 4, 2)));
  EXPECT_EQ(store.filter(MediaKind::kImage, {}), (std::vector<EntityId>{1, 2, 3, 4, 5}));
  EXPECT_EQ(store.filter(MediaKind::kVideo, {}), (std::vector<EntityId>{6}));
}

TEST(MetadataStore, NoMatch) {
  MetadataStore store;
  store.add_entity(MediaKind::kImage, {{"category", std::string("lfw")}}, png_blob());
  EXPECT_TRUE(store
                  .filter(MediaKind::kImage,
                          {{"category", Comparator::kEq, std::string("celebrity")}})
                  .empty());
}

TEST(MetadataStore, TypeMismatchIsAnError) {
  MetadataStore store;
  store.add_entity(MediaKind::kImage, {{"name", std::string("bob")}}, png_blob());
  EXPECT_THROW(store.filter(MediaKind::kImage, {{"name", Comparator::kLt, std::int64_t{3}}}),
               TypeMismatchError);
}

TEST(MetadataStore, NumericPromotion) {
  MetadataStore store;
  store.add_entity(MediaKind::kImage, {{"score", 2.5}}, png_blob());
  store.add_entity(MediaKind::kImage, {{"score", std::int64_t{3}}}, png_blob());
  EXPECT_EQ(store.filter(MediaKind::kImage, {{"score", Comparator::kGt, std::int64_t{2}}}).size(),
            2u);
  EXPECT_EQ(store.filter(MediaKind::kImage, {{"score", Comparator::kEq, 3.0}}),
            (std::vector<EntityId>{2}));
}

TEST(MetadataStore, GetMediaIsDeepCopy) {
  MetadataStore store;
  const auto original = synthetic_image(9, 10, 7);
  const auto id = store.add_entity(MediaKind::kImage, {}, encode_png(original));
  auto m = store.get_media(id);
  EXPECT_EQ(m.frame(0), original);
  auto frames = m.frames();
  frames[0].data()[0] ^= 0xff;
  EXPECT_EQ(store.get_media(id).frame(0), original);
  EXPECT_THROW(store.get_media(999), UnknownEntityError);
}

TEST(MetadataStore, FilterMatchesBruteForceScan) {
  std::mt19937 rng(17);
  auto value = [&]() -> MetadataValue {
    switch (rng() % 3) {
      case 0: return std::string(1, char('a' + rng() % 4));
      case 1: return std::int64_t(rng() % 10);
      default: return (rng() % 20) / 2.0;
    }
  };
  for (int trial = 0; trial < 60; ++trial) {
    MetadataStore store;
    const auto blob = png_blob(trial, 2, 2);
    const int n = rng() % 40;
    for (int i = 0; i < n; ++i) {
      PropertyMap props;
      // Keep "s" string-typed and "n" numeric so comparisons are well-typed.
      if (rng() % 4) props["s"] = std::string(1, char('a' + rng() % 4));
      if (rng() % 4) props["n"] = rng() % 2 ? MetadataValue(std::int64_t(rng() % 10))
                                            : MetadataValue((rng() % 20) / 2.0);
      const bool image = rng() % 3 != 0;
      store.add_entity(image ? MediaKind::kImage : MediaKind::kVideo, props,
                       image ? blob : encode_rvid(synthetic_video(trial, 2, 2, 1)));
    }
    std::vector<Constraint> cs;
    for (int k = 0, m = rng() % 4; k < m; ++k) {
      auto v = value();
      const bool is_str = std::holds_alternative<std::string>(v);
      cs.push_back({is_str ? "s" : "n", static_cast<Comparator>(rng() % 6), v});
    }
    for (auto kind : {MediaKind::kImage, MediaKind::kVideo}) {
      std::vector<EntityId> got;
      try {
        got = store.filter(kind, cs);
      } catch (const TypeMismatchError&) {
        FAIL();
      }
      ASSERT_EQ(got, testing::filter_oracle(store.records(), kind, cs));
    }
  }
}

}  // namespace
}  // namespace vdq
