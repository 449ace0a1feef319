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

#include "vdq/server.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <thread>

#include "support/mock_executors.h"
#include "support/printers.h"
#include "vdq/remote_worker.h"
#include "vdq/synthetic.h"

namespace vdq {
namespace {

using namespace std::chrono_literals;
using nlohmann::json;

TEST(Wire, ByteLayout) {
  WireMessage m;
  m.doc = {{"a", 1}};
  m.blobs = {{7, 8, 9}};
  const Bytes b = encode_wire(m);
  const std::string text = R"({"a":1,"blob_count":1})";
  Bytes expected = {0, 0, 0, static_cast<std::uint8_t>(text.size())};
  expected.insert(expected.end(), text.begin(), text.end());
  for (std::uint8_t x : {0, 0, 0, 3, 7, 8, 9}) expected.push_back(x);
  EXPECT_EQ(b, expected);
  auto back = decode_wire(b);
  EXPECT_EQ(back.blobs, m.blobs);
  EXPECT_EQ(back.doc["a"], 1);
}

TEST(Wire, RejectsInconsistentFrames) {
  WireMessage m;
  m.blobs = {{1, 2}, {3}};
  auto b = encode_wire(m);
  auto trailing = b;
  trailing.push_back(0);
  EXPECT_THROW(decode_wire(trailing), WireError);
  b.pop_back();
  EXPECT_THROW(decode_wire(b), WireError);
  Bytes bad_json = {0, 0, 0, 2, '{', 'x'};
  EXPECT_THROW(decode_wire(bad_json), WireError);
}

TEST(Config, ParsesKeysAndPools) {
  auto c = parse_server_config(R"(
    # test config
    bind = 127.0.0.1:6000
    mode = sync
    max_inflight = 16
    remote_timeout_s = 2.5
    pool.faces = http://a:1/x, http://b:2/x
  )");
  EXPECT_EQ(c.bind, "127.0.0.1:6000");
  EXPECT_EQ(c.mode, ExecutionMode::kSync);
  EXPECT_EQ(c.max_inflight, 16u);
  EXPECT_EQ(c.remote_timeout, 2500ms);
  EXPECT_EQ(c.pools.at("faces"), (std::vector<std::string>{"http://a:1/x", "http://b:2/x"}));
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_server_config("colour = red"), Error);
  EXPECT_THROW(parse_server_config("pool.x ="), Error);
  EXPECT_THROW(parse_server_config("mode = eventually"), Error);
  EXPECT_THROW(parse_server_config("max_inflight = lots"), Error);
  EXPECT_THROW(parse_server_config("bind"), Error);
}

TEST(Config, EnvironmentOverrides) {
  ServerConfig c;
  setenv("VDQ_BIND", "127.0.0.1:7001", 1);
  setenv("VDQ_MODE", "sync", 1);
  apply_env_overrides(c);
  unsetenv("VDQ_BIND");
  unsetenv("VDQ_MODE");
  EXPECT_EQ(c.bind, "127.0.0.1:7001");
  EXPECT_EQ(c.mode, ExecutionMode::kSync);
}

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    worker_.start();
    ServerConfig c;
    c.bind = "127.0.0.1:0";
    c.pools["w"] = {worker_.url("/a"), worker_.url("/b")};
    server_ = std::make_unique<Server>(c);
    server_->start();
  }

  QueryClient connect() { return QueryClient("127.0.0.1", server_->port()); }

  EntityId add(QueryClient& c, const PropertyMap& props, const MediaObject& media) {
    WireMessage m;
    m.doc = {{media.is_image() ? "AddImage" : "AddVideo", {{"properties", to_json(props)}}}};
    m.blobs = {encode_media(media)};
    auto r = c.send(m);
    EXPECT_EQ(r.doc["status"], "ok") << r.doc.dump();
    return r.doc["id"].get<EntityId>();
  }

  void seed_people(QueryClient& c) {
    const std::int64_t ages[] = {20, 25, 40, 33, 50};
    for (int i = 0; i < 5; ++i) {
      add(c, {{"category", std::string(i == 3 ? "lfw" : "celebrity")}, {"age", ages[i]}},
          MediaObject::image(synthetic_image(i + 1, 40, 32)));
    }
  }

  json use_case_query(const std::string& url) {
    return json{{"FindImage",
                 {{"constraints", {{"category", {"==", "celebrity"}}, {"age", {">=", 21, "<=", 40}}}},
                  {"operations",
                   {{{"type", "resize"}, {"width", 64}, {"height", 80}},
                    {{"type", "remoteOp"}, {"url", url}, {"options", {{"id", "facedetect_box"}}}},
                    {{"type", "threshold"}, {"value", 150}}}}}}};
  }

  RemoteWorker worker_;
  std::unique_ptr<Server> server_;
};

TEST_F(ServerTest, AddAssignsIds) {
  auto c = connect();
  EXPECT_EQ(add(c, {}, MediaObject::image(synthetic_image(1, 8, 8))), 1u);
  EXPECT_EQ(add(c, {}, synthetic_video(2, 8, 8, 3)), 2u);
}

TEST_F(ServerTest, UseCaseQueryReturnsProcessedMatches) {
  auto c = connect();
  seed_people(c);
  WireMessage q;
  q.doc = use_case_query(worker_.url("/image"));
  auto r = c.send(q);
  ASSERT_EQ(r.doc["status"], "ok") << r.doc.dump();
  ASSERT_EQ(r.doc["entities"].size(), 2u);
  EXPECT_EQ(r.doc["entities"][0]["id"], 2);
  EXPECT_EQ(r.doc["entities"][1]["id"], 3);
  ASSERT_EQ(r.blobs.size(), 2u);
  auto ops = validate_query(q.doc).operations;
  for (int i = 0; i < 2; ++i) {
    const EntityId id = r.doc["entities"][i]["id"];
    auto expected = testing::reference_run(MediaObject::image(synthetic_image(id, 40, 32)), ops);
    EXPECT_EQ(decode_media(r.blobs[i]), *expected) << id;
  }
}

TEST_F(ServerTest, NoMatchGivesEmptyReply) {
  auto c = connect();
  seed_people(c);
  WireMessage q;
  q.doc = {{"FindImage", {{"constraints", {{"category", {"==", "nobody"}}}}}}};
  auto r = c.send(q);
  EXPECT_EQ(r.doc["status"], "ok");
  EXPECT_EQ(r.doc["blob_count"], 0);
  EXPECT_TRUE(r.doc["entities"].empty());
}

TEST_F(ServerTest, InvalidQueryListsProblemsAndKeepsConnection) {
  auto c = connect();
  WireMessage q;
  q.doc = {{"FindImage", {{"operations", {{{"type", "remoteOp"}, {"options", {{"id", "x"}}}}}}}}};
  auto r = c.send(q);
  EXPECT_EQ(r.doc["status"], "error");
  ASSERT_EQ(r.doc["problems"].size(), 1u);
  EXPECT_NE(r.doc["problems"][0].get<std::string>().find("operation 0"), std::string::npos);
  q.doc = {{"FindImage", {{"operations", {{{"type", "remoteOp"}, {"url", "pool://nope"},
                                            {"options", {{"id", "grayscale"}}}}}}}}};
  r = c.send(q);
  EXPECT_EQ(r.doc["status"], "error");
  EXPECT_NE(r.doc.dump().find("unknown endpoint pool"), std::string::npos);
}

TEST_F(ServerTest, MalformedFrameGetsErrorThenClose) {
  auto c = connect();
  const std::string junk = "{not json";
  Bytes raw = {0, 0, 0, static_cast<std::uint8_t>(junk.size())};
  raw.insert(raw.end(), junk.begin(), junk.end());
  c.send_raw(raw);
  auto r = c.receive();
  EXPECT_EQ(r.doc["status"], "error");
  EXPECT_THROW(c.receive(), std::exception);
}

TEST_F(ServerTest, PipelinedQueriesAnsweredInOrder) {
  auto c = connect();
  seed_people(c);
  WireMessage a, b;
  a.doc = {{"FindImage", {{"constraints", {{"age", {"<", 30}}}}}}};
  b.doc = {{"FindImage", {{"constraints", {{"age", {">", 30}}}}}}};
  Bytes both = encode_wire(a);
  auto bb = encode_wire(b);
  both.insert(both.end(), bb.begin(), bb.end());
  c.send_raw(both);
  auto ra = c.receive();
  auto rb = c.receive();
  EXPECT_EQ(ra.doc["matched"], 2);
  EXPECT_EQ(rb.doc["matched"], 3);
}

TEST_F(ServerTest, AsyncAndSyncRepliesAreByteIdentical) {
  auto c = connect();
  seed_people(c);
  WireMessage q;
  q.doc = use_case_query("pool://w");
  q.doc["FindImage"]["constraints"] = json::object();
  q.doc["mode"] = "async";
  auto ra = encode_wire(c.send(q));
  q.doc["mode"] = "sync";
  auto rs = encode_wire(c.send(q));
  EXPECT_EQ(ra, rs);
  EXPECT_EQ(worker_.requests(), 10u);
}

TEST_F(ServerTest, FailedEntitiesReportedWithoutBlobs) {
  auto c = connect();
  add(c, {}, MediaObject::image(synthetic_image(1, 40, 32)));
  add(c, {}, MediaObject::image(synthetic_image(2, 8, 8)));
  WireMessage q;
  q.doc = {{"FindImage", {{"operations", {{{"type", "remoteOp"}, {"url", worker_.url()},
                                            {"options", {{"id", "caption"}, {"text", "hi"},
                                                         {"x", 20}, {"y", 20}}}}}}}}};
  auto r = c.send(q);
  ASSERT_EQ(r.doc["entities"].size(), 2u);
  EXPECT_EQ(r.doc["entities"][0]["status"], "ok");
  EXPECT_EQ(r.doc["entities"][1]["status"], "failed");
  EXPECT_NE(r.doc["entities"][1]["error"].get<std::string>().find("HTTP 422"), std::string::npos);
  EXPECT_EQ(r.blobs.size(), 1u);
}

TEST_F(ServerTest, VideoLabelComesFromActivityProperty) {
  auto c = connect();
  add(c, {{"activity", std::string("running")}}, synthetic_video(3, 40, 24, 2));
  WireMessage q;
  q.doc = {{"FindVideo", {{"operations", {{{"type", "remoteOp"}, {"url", worker_.url()},
                                             {"options", {{"id", "activity_label"}}}}}}}}};
  auto r = c.send(q);
  ASSERT_EQ(r.blobs.size(), 1u);
  auto labelled = synthetic_video(3, 40, 24, 2);
  labelled.set_label_hint("running");
  EXPECT_EQ(decode_media(r.blobs[0]), WorkerOpRegistry::instance().apply("activity_label", labelled, {}));
}

TEST_F(ServerTest, DroppedConnectionReleasesResources) {
  {
    auto c = connect();
    seed_people(c);
  }
  {
    auto c = connect();
    WireMessage q;
    q.doc = use_case_query(worker_.url());
    q.doc["FindImage"]["constraints"] = json::object();
    c.send_raw(encode_wire(q));
  }
  for (int i = 0; i < 200 && (server_->active_connections() || server_->active_queries()); ++i) {
    std::this_thread::sleep_for(10ms);
  }
  EXPECT_EQ(server_->active_connections(), 0u);
  EXPECT_EQ(server_->active_queries(), 0u);
}

TEST_F(ServerTest, ManyConcurrentClientsGetIdenticalResults) {
  {
    auto c = connect();
    seed_people(c);
  }
  WireMessage q;
  q.doc = use_case_query("pool://w");
  constexpr int kClients = 128;
  std::vector<Bytes> replies(kClients);
  std::vector<std::thread> threads;
  for (int i = 0; i < kClients; ++i) {
    threads.emplace_back([&, i] {
      auto c = connect();
      replies[i] = encode_wire(c.send(q));
    });
  }
  for (auto& t : threads) t.join();
  auto first = decode_wire(replies[0]);
  ASSERT_EQ(first.blobs.size(), 2u);
  for (const auto& r : replies) EXPECT_EQ(r, replies[0]);
  EXPECT_GE(server_->connections_served(), static_cast<std::size_t>(kClients));
}

}  // namespace
}  // namespace vdq
