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

#include <gtest/gtest.h>

#include <fcntl.h>
#include <sys/select.h>
#include <unistd.h>

#include <future>
#include <httplib.h>

#include "support/mock_executors.h"
#include "support/printers.h"
#include "vdq/codec.h"
#include "vdq/remote_client.h"
#include "vdq/remote_worker.h"
#include "vdq/synthetic.h"
#include "vdq/worker_ops.h"

namespace vdq {
namespace {

using namespace std::chrono_literals;

OpOutcome call(RemoteClient& client, const OperationSpec& op, const MediaObject& media) {
  std::promise<OpOutcome> p;
  auto f = p.get_future();
  client.dispatch(1, op, media, [&p](OpOutcome o) { p.set_value(std::move(o)); });
  return f.get();
}

MediaObject face_image(std::uint64_t seed = 1) {
  return MediaObject::image(synthetic_image(seed, 40, 30));
}

TEST(Url, Parse) {
  auto u = Url::parse("http://localhost:5010/image");
  EXPECT_EQ(u.host, "localhost");
  EXPECT_EQ(u.port, "5010");
  EXPECT_EQ(u.target, "/image");
  auto d = Url::parse("http://w1");
  EXPECT_EQ(d.port, "80");
  EXPECT_EQ(d.target, "/");
  EXPECT_THROW(Url::parse("https://x/"), Error);
  EXPECT_THROW(Url::parse("http://:80/"), Error);
}

TEST(EndpointPool, RoundRobinPerResolve) {
  RemoteEndpointPool pool;
  pool.set("faces", {"http://a:1/", "http://b:2/"});
  EXPECT_EQ(pool.resolve("pool://faces"), "http://a:1/");
  EXPECT_EQ(pool.resolve("pool://faces"), "http://b:2/");
  EXPECT_EQ(pool.resolve("pool://faces"), "http://a:1/");
  EXPECT_EQ(pool.resolve("http://c:3/"), "http://c:3/");
  EXPECT_THROW(pool.resolve("pool://nope"), Error);
  EXPECT_THROW(pool.set("empty", {}), Error);
}

class RemoteTest : public ::testing::Test {
 protected:
  void SetUp() override { worker_.start(); }
  RemoteWorker worker_;
};

TEST_F(RemoteTest, HealthCheck) {
  httplib::Client c("127.0.0.1", worker_.port());
  auto res = c.Get("/healthz");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, "ok");
}

TEST_F(RemoteTest, RemoteResultEqualsLocalExecution) {
  RemoteClient client;
  auto media = face_image(3);
  for (const char* name : {"facedetect_box", "facedetect", "manipulation", "grayscale"}) {
    auto op = OperationSpec::remote(name, worker_.url("/image"));
    auto out = call(client, op, media);
    ASSERT_TRUE(out.ok()) << out.error;
    EXPECT_EQ(*out.media, WorkerOpRegistry::instance().apply(name, media, {})) << name;
  }
}

TEST_F(RemoteTest, VideoKeepsLabelHintAcrossTheWire) {
  RemoteClient client;
  auto video = synthetic_video(4, 48, 32, 3);
  video.set_label_hint("running");
  auto out = call(client, OperationSpec::remote("activity_label", worker_.url()), video);
  ASSERT_TRUE(out.ok()) << out.error;
  EXPECT_EQ(out.media->label_hint(), "running");
  EXPECT_EQ(*out.media, WorkerOpRegistry::instance().apply("activity_label", video, {}));
}

TEST_F(RemoteTest, UnknownOperationIs404) {
  RemoteClient client;
  auto out = call(client, OperationSpec::remote("sharpen", worker_.url()), face_image());
  ASSERT_FALSE(out.ok());
  EXPECT_NE(out.error.find("HTTP 404"), std::string::npos) << out.error;
  EXPECT_NE(out.error.find("sharpen"), std::string::npos);
}

TEST_F(RemoteTest, OperationFailureIs422) {
  RemoteClient client;
  auto op = OperationSpec::remote(
      "caption", worker_.url(),
      {{"text", std::string("hi")}, {"x", std::int64_t{500}}, {"y", std::int64_t{0}}});
  auto out = call(client, op, face_image());
  ASSERT_FALSE(out.ok());
  EXPECT_NE(out.error.find("HTTP 422"), std::string::npos) << out.error;
}

TEST_F(RemoteTest, MalformedRequestIs400) {
  httplib::Client c("127.0.0.1", worker_.port());
  auto res = c.Post("/", "{}", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  httplib::MultipartFormDataItems items = {
      {"jsonArgs", R"({"type":"grayscale","media":{"kind":"image","width":4,"height":4,
        "channels":3,"frame_count":1,"fps":0}})", "", "application/json"},
      {"mediaData", "not a png", "m.png", "application/octet-stream"}};
  res = c.Post("/", items);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

TEST_F(RemoteTest, DescriptorMismatchIs400) {
  httplib::Client c("127.0.0.1", worker_.port());
  const auto png = encode_png(synthetic_image(1, 4, 4));
  httplib::MultipartFormDataItems items = {
      {"jsonArgs", R"({"type":"grayscale","media":{"kind":"image","width":5,"height":4,
        "channels":3,"frame_count":1,"fps":0}})", "", "application/json"},
      {"mediaData", std::string(png.begin(), png.end()), "m.png", "application/octet-stream"}};
  auto res = c.Post("/", items);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

TEST_F(RemoteTest, ReusesKeepAliveConnection) {
  RemoteClient client;
  for (int i = 0; i < 30; ++i) {
    ASSERT_TRUE(call(client, OperationSpec::remote("grayscale", worker_.url()), face_image(i)).ok());
  }
  EXPECT_EQ(client.connections_opened(), 1u);
}

TEST(Remote, RecoversFromServerSideClose) {
  RemoteClient client;
  int port;
  {
    RemoteWorker first;
    port = first.start();
    ASSERT_TRUE(call(client, OperationSpec::remote("grayscale", first.url()), face_image()).ok());
  }
  RemoteWorkerOptions opts;
  opts.port = port;
  RemoteWorker second(opts);
  second.start();
  auto out = call(client, OperationSpec::remote("grayscale", second.url()), face_image());
  EXPECT_TRUE(out.ok()) << out.error;
  EXPECT_EQ(client.connections_opened(), 2u);
}

TEST(Remote, DeadEndpointFails) {
  int port;
  {
    RemoteWorker w;
    port = w.start();
  }
  RemoteClient client;
  auto out = call(client,
                  OperationSpec::remote("grayscale", "http://127.0.0.1:" + std::to_string(port)),
                  face_image());
  ASSERT_FALSE(out.ok());
  EXPECT_NE(out.error.find("127.0.0.1"), std::string::npos) << out.error;
}

TEST(Remote, TimeoutFails) {
  RemoteWorkerOptions wopts;
  wopts.latency = 500ms;
  RemoteWorker worker(wopts);
  worker.start();
  RemoteClientOptions copts;
  copts.timeout = 100ms;
  RemoteClient client(copts);
  auto out = call(client, OperationSpec::remote("grayscale", worker.url()), face_image());
  ASSERT_FALSE(out.ok());
  EXPECT_NE(out.error.find("timeout"), std::string::npos) << out.error;
}

TEST(Remote, ClientCapsInflightAndWorkerCapsExecutions) {
  RemoteWorkerOptions wopts;
  wopts.latency = 30ms;
  wopts.slots = 2;
  RemoteWorker worker(wopts);
  worker.start();
  RemoteClientOptions copts;
  copts.max_inflight = 4;
  RemoteClient client(copts);

  constexpr int kCalls = 16;
  std::vector<std::promise<OpOutcome>> promises(kCalls);
  auto t0 = Clock::now();
  for (int i = 0; i < kCalls; ++i) {
    client.dispatch(i, OperationSpec::remote("grayscale", worker.url()), face_image(i),
                    [&promises, i](OpOutcome o) { promises[i].set_value(std::move(o)); });
  }
  for (auto& p : promises) ASSERT_TRUE(p.get_future().get().ok());
  const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  EXPECT_LE(client.peak_inflight(), 4u);
  EXPECT_EQ(worker.peak_executing(), 2u);
  // 16 calls through 2 slots of 30 ms each.
  EXPECT_GE(elapsed, 0.24);
}

TEST(Remote, PoolSpreadsLoadAcrossWorkers) {
  RemoteWorker a, b;
  a.start();
  b.start();
  auto pools = std::make_shared<RemoteEndpointPool>();
  pools->set("w", {a.url(), b.url()});
  RemoteClient client({}, pools);
  for (int i = 0; i < 10; ++i) {
    ASSERT_TRUE(call(client, OperationSpec::remote("grayscale", "pool://w"), face_image()).ok());
  }
  EXPECT_EQ(a.requests(), 5u);
  EXPECT_EQ(b.requests(), 5u);
}

TEST(Remote, PoolErrorsNameTheAliasNotTheMember) {
  RemoteWorker a, b;
  a.start();
  b.start();
  auto pools = std::make_shared<RemoteEndpointPool>();
  pools->set("w", {a.url(), b.url()});
  RemoteClient client({}, pools);
  auto first = call(client, OperationSpec::remote("sharpen", "pool://w"), face_image());
  auto second = call(client, OperationSpec::remote("sharpen", "pool://w"), face_image());
  ASSERT_FALSE(first.ok());
  EXPECT_EQ(first.error, second.error);
  EXPECT_EQ(first.error.rfind("pool://w returned HTTP 404", 0), 0u) << first.error;
  EXPECT_EQ(a.requests() + b.requests(), 2u);
}

TEST(Remote, WorkerServesDescriptorsAboveSelectLimit) {
  std::vector<int> held;
  // open() returns the lowest free descriptor, so this also plugs holes
  // that other threads have released since the last call.
  auto fill = [&held] {
    for (int fd; (fd = ::open("/dev/null", O_RDONLY)) >= 0;) {
      held.push_back(fd);
      if (fd > FD_SETSIZE) break;
    }
  };
  fill();
  ASSERT_GT(held.back(), FD_SETSIZE) << "descriptor limit too low for this check";
  {
    RemoteWorker worker;
    worker.start();
    RemoteClient client;
    fill();
    auto out = call(client, OperationSpec::remote("grayscale", worker.url()), face_image());
    EXPECT_TRUE(out.ok()) << out.error;
  }
  for (int fd : held) ::close(fd);
}

TEST(Remote, PipelineOverHttpMatchesReference) {
  RemoteWorkerOptions wopts;
  wopts.jitter = 20ms;
  RemoteWorker worker(wopts);
  worker.start();
  RemoteClient client;
  std::vector<OperationSpec> ops = {
      OperationSpec::native("resize", {{"width", std::int64_t{64}}, {"height", std::int64_t{48}}}),
      OperationSpec::remote("facedetect_box", worker.url()),
      OperationSpec::remote("manipulation", worker.url()),
      OperationSpec::native("rotate", {{"angle", std::int64_t{90}}})};
  PipelineRequest req;
  for (EntityId id = 1; id <= 12; ++id) req.ids.push_back(id);
  req.load = [](EntityId id) { return face_image(id); };
  req.ops = std::make_shared<const std::vector<OperationSpec>>(ops);
  req.executors.remote = &client;
  auto async = run_async(req);
  auto sync = run_sync(req);
  EXPECT_EQ(erd_bytes(async), erd_bytes(sync));
  for (const auto& [id, e] : async) {
    ASSERT_EQ(e.status, EntityStatus::kOk) << e.error.value_or("");
    EXPECT_EQ(e.media, *testing::reference_run(face_image(id), ops));
  }
}

}  // namespace
}  // namespace vdq
