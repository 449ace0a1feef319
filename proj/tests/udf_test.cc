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

#include <future>
#include <random>

#include "support/mock_executors.h"
#include "support/mock_udf_worker.h"
#include "support/printers.h"
#include "vdq/synthetic.h"
#include "vdq/udf_gateway.h"

namespace vdq {
namespace {

using namespace std::chrono_literals;
using testing::MockUdfWorker;

MediaObject image(std::uint64_t seed) { return MediaObject::image(synthetic_image(seed, 20, 16)); }

OpOutcome call(UdfGateway& gw, const OperationSpec& op, const MediaObject& media) {
  std::promise<OpOutcome> p;
  auto f = p.get_future();
  gw.dispatch(7, op, media, [&p](OpOutcome o) { p.set_value(std::move(o)); });
  return f.get();
}

TEST(UdfFrame, ByteLayout) {
  UdfFrame f;
  f.direction = UdfFrame::Direction::kResponse;
  f.entity_id = 3;
  f.nonce = 9;
  f.op_type = "udf_x";
  f.error = "bad";
  f.payload = {0xAA, 0xBB};
  const Bytes bytes = encode_udf_frame(f);
  const std::string header =
      R"({"direction":"response","entity_id":3,"error":"bad","media":null,"nonce":9,)"
      R"("op_type":"udf_x","options":{}})";
  ASSERT_EQ(bytes.size(), 4 + header.size() + 4 + 2);
  EXPECT_EQ(Bytes(bytes.begin(), bytes.begin() + 4),
            (Bytes{0, 0, 0, static_cast<std::uint8_t>(header.size())}));
  EXPECT_EQ(std::string(bytes.begin() + 4, bytes.begin() + 4 + header.size()), header);
  EXPECT_EQ(Bytes(bytes.end() - 6, bytes.end()), (Bytes{0, 0, 0, 2, 0xAA, 0xBB}));
}

TEST(UdfFrame, RoundTripRandomFrames) {
  std::mt19937 rng(8);
  for (int i = 0; i < 200; ++i) {
    UdfFrame f;
    f.direction = rng() % 2 ? UdfFrame::Direction::kRequest : UdfFrame::Direction::kResponse;
    f.entity_id = rng();
    f.nonce = (std::uint64_t{rng()} << 32) | rng();
    f.op_type = "udf_" + std::to_string(rng() % 100);
    if (rng() % 2) f.options["k"] = std::int64_t(rng() % 1000) - 500;
    if (rng() % 2) f.options["s"] = std::string(rng() % 5, 'q');
    if (rng() % 2) f.media = MediaDescriptor::of(image(i));
    if (rng() % 3 == 0) f.error = "e" + std::to_string(i);
    f.payload.resize(rng() % 300);
    for (auto& b : f.payload) b = static_cast<std::uint8_t>(rng());
    ASSERT_EQ(decode_udf_frame(encode_udf_frame(f)), f);
  }
}

TEST(UdfFrame, RejectsMalformedInput) {
  UdfFrame f;
  f.op_type = "udf_grayscale";
  f.payload = {1, 2, 3};
  auto bytes = encode_udf_frame(f);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(decode_udf_frame(trailing), CodecError);
  bytes.pop_back();
  EXPECT_THROW(decode_udf_frame(bytes), CodecError);
  EXPECT_THROW(decode_udf_frame(Bytes{0, 0}), CodecError);
  const std::string bad = R"({"direction":"sideways","entity_id":1,"nonce":1})";
  EXPECT_THROW(decode_udf_header(std::span(reinterpret_cast<const std::uint8_t*>(bad.data()),
                                           bad.size())),
               CodecError);
}

TEST(UdfGateway, ResultEqualsLocalExecution) {
  MockUdfWorker worker;
  UdfGateway gw;
  auto media = image(1);
  for (const char* name : {"grayscale", "facedetect_box", "manipulation"}) {
    auto out = call(gw, OperationSpec::udf(std::string("udf_") + name, worker.port()), media);
    ASSERT_TRUE(out.ok()) << out.error;
    EXPECT_EQ(*out.media, WorkerOpRegistry::instance().apply(name, media, {}));
  }
  EXPECT_EQ(gw.channels_opened(), 1u);
}

TEST(UdfGateway, InterleavedRequestsMatchedByNonce) {
  MockUdfWorker::Options o;
  o.jitter = 20ms;
  MockUdfWorker worker(o);
  UdfGateway gw;
  constexpr int kN = 100;
  std::vector<std::promise<OpOutcome>> promises(kN);
  for (int i = 0; i < kN; ++i) {
    auto op = OperationSpec::udf(i % 2 ? "udf_grayscale" : "udf_flip", worker.port(),
                                 {{"axis", std::string("horizontal")}});
    gw.dispatch(i, op, image(i), [&promises, i](OpOutcome r) { promises[i].set_value(std::move(r)); });
  }
  for (int i = 0; i < kN; ++i) {
    auto out = promises[i].get_future().get();
    ASSERT_TRUE(out.ok()) << out.error;
    auto expected = WorkerOpRegistry::instance().apply(
        i % 2 ? "grayscale" : "flip", image(i), {{"axis", std::string("horizontal")}});
    ASSERT_EQ(*out.media, expected) << i;
  }
  EXPECT_EQ(gw.channels_opened(), 1u);
  EXPECT_EQ(worker.requests(), static_cast<std::size_t>(kN));
}

TEST(UdfGateway, UnknownUdfReportsWorkerError) {
  MockUdfWorker worker;
  UdfGateway gw;
  auto out = call(gw, OperationSpec::udf("udf_sharpen", worker.port()), image(1));
  ASSERT_FALSE(out.ok());
  EXPECT_NE(out.error.find("sharpen"), std::string::npos) << out.error;
}

TEST(UdfGateway, KilledWorkerFailsOutstandingThenReconnects) {
  MockUdfWorker::Options o;
  o.latency = 300ms;
  auto worker = std::make_unique<MockUdfWorker>(o);
  const int port = worker->port();
  UdfGateway gw;
  std::vector<std::promise<OpOutcome>> promises(5);
  for (int i = 0; i < 5; ++i) {
    gw.dispatch(i, OperationSpec::udf("udf_grayscale", port), image(i),
                [&promises, i](OpOutcome r) { promises[i].set_value(std::move(r)); });
  }
  std::this_thread::sleep_for(50ms);
  worker.reset();
  for (auto& p : promises) {
    auto out = p.get_future().get();
    ASSERT_FALSE(out.ok());
    EXPECT_NE(out.error.find("channel to port"), std::string::npos) << out.error;
  }
  MockUdfWorker::Options again;
  again.port = port;
  MockUdfWorker revived(again);
  auto out = call(gw, OperationSpec::udf("udf_grayscale", port), image(1));
  EXPECT_TRUE(out.ok()) << out.error;
  EXPECT_EQ(gw.channels_opened(), 2u);
}

TEST(UdfGateway, DeadPortFails) {
  int port;
  {
    MockUdfWorker w;
    port = w.port();
  }
  UdfGateway gw;
  auto out = call(gw, OperationSpec::udf("udf_grayscale", port), image(1));
  ASSERT_FALSE(out.ok());
  EXPECT_NE(out.error.find(std::to_string(port)), std::string::npos) << out.error;
  EXPECT_FALSE(call(gw, OperationSpec::udf("udf_grayscale", 0), image(1)).ok());
}

TEST(UdfGateway, TimeoutFails) {
  MockUdfWorker::Options o;
  o.latency = 500ms;
  MockUdfWorker worker(o);
  UdfGatewayOptions g;
  g.timeout = 100ms;
  UdfGateway gw(g);
  auto out = call(gw, OperationSpec::udf("udf_grayscale", worker.port()), image(1));
  ASSERT_FALSE(out.ok());
  EXPECT_NE(out.error.find("timed out"), std::string::npos) << out.error;
}

TEST(UdfGateway, PipelineWithUdfStepsMatchesReference) {
  MockUdfWorker::Options o;
  o.jitter = 10ms;
  MockUdfWorker worker(o);
  UdfGateway gw;
  std::vector<OperationSpec> ops = {
      OperationSpec::native("resize", {{"width", std::int64_t{30}}, {"height", std::int64_t{30}}}),
      OperationSpec::udf("udf_facedetect_box", worker.port()),
      OperationSpec::native("grayscale"),
      OperationSpec::udf("udf_threshold", worker.port(), {{"value", std::int64_t{100}}})};
  PipelineRequest req;
  for (EntityId id = 1; id <= 20; ++id) req.ids.push_back(id);
  req.load = image;
  req.ops = std::make_shared<const std::vector<OperationSpec>>(ops);
  req.executors.udf = &gw;
  auto erd = run_async(req);
  for (const auto& [id, e] : erd) {
    ASSERT_EQ(e.status, EntityStatus::kOk) << e.error.value_or("");
    EXPECT_EQ(e.media, *testing::reference_run(image(id), ops));
  }
  EXPECT_EQ(erd_bytes(erd), erd_bytes(run_sync(req)));
}

}  // namespace
}  // namespace vdq
