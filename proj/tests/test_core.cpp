#include <atomic>
#include <set>
#include <vector>

#include "swat/core/hashing.hpp"
#include "swat/core/json_io.hpp"
#include "swat/core/json_keys.hpp"
#include "swat/core/netpbm.hpp"
#include "swat/core/parallel.hpp"
#include "swat/core/rng.hpp"
#include "swat/core/svg_plot.hpp"
#include "test_util.hpp"

namespace swat {
namespace {

TEST(Hashing, Fnv1aReferenceVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(to_hex(0xabcULL), "0000000000000abc");
}

TEST(Hashing, IncrementalMatchesOneShot) {
  Fnv1a h;
  h.update("foo");
  h.update("bar");
  EXPECT_EQ(h.digest(), fnv1a("foobar"));
}

TEST(Hashing, MatrixHashSeesEveryEntry) {
  Matrix a = Matrix::Zero(2, 3);
  Matrix b = a;
  b(1, 2) = 1e-300;
  Fnv1a ha;
  Fnv1a hb;
  ha.update(a);
  hb.update(b);
  EXPECT_NE(ha.digest(), hb.digest());
}

TEST(Hashing, MixSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (std::uint64_t stream = 0; stream < 20; ++stream) seen.insert(mix_seed(seed, stream));
  }
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_EQ(mix_seed(7, 3), mix_seed(7, 3));
}

TEST(Rng, BetaStaysInUnitInterval) {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double x = sample_beta(rng, 1.0, 1.0);
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
    sum += x;
  }
  EXPECT_NEAR(sum / 20000.0, 0.5, 0.01);
}

TEST(JsonIo, VectorRoundTripIsExact) {
  Vector v(4);
  v << 0.1, -1.0 / 3.0, 1e-300, 12345.678;
  const Vector back = vector_from_json(Json::parse(to_json(v).dump()));
  ASSERT_EQ(back.size(), 4);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(back[i], v[i]);
}

TEST(JsonIo, FileRoundTripAndErrors) {
  test::TempDir dir;
  const Json j{{"a", 1}, {"b", {1, 2, 3}}};
  write_json_file(dir / "sub/x.json", j);
  EXPECT_EQ(read_json_file(dir / "sub/x.json"), j);
  EXPECT_THROW(read_json_file(dir / "missing.json"), IoError);
  write_text_file(dir / "bad.json", "{not json");
  EXPECT_THROW(read_json_file(dir / "bad.json"), IoError);
}

TEST(JsonKeys, UnknownAndMistypedKeysNameTheirPath) {
  const Json j{{"lr", "fast"}, {"extra", 1}};
  const auto msg = test::error_message<InvalidArgument>([&] { reject_unknown_keys(j, {"lr"}, "train"); });
  EXPECT_NE(msg.find("train.extra"), std::string::npos);
  double lr = 0.0;
  const auto msg2 = test::error_message<InvalidArgument>([&] { read_key(j, "lr", lr, "train"); });
  EXPECT_NE(msg2.find("train.lr"), std::string::npos);
}

TEST(Netpbm, GrayAndColorRoundTrip) {
  test::TempDir dir;
  for (int channels : {1, 3}) {
    Image img{channels, 3, 5, {}};
    for (int i = 0; i < channels * 15; ++i) img.pixels.push_back((i * 17 % 256) / 255.0);
    const auto path = dir / (channels == 1 ? "g.pgm" : "c.ppm");
    write_netpbm(path, img);
    const Image back = read_netpbm(path);
    EXPECT_EQ(back.channels, channels);
    EXPECT_EQ(back.height, 3);
    EXPECT_EQ(back.width, 5);
    ASSERT_EQ(back.pixels.size(), img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) EXPECT_NEAR(back.pixels[i], img.pixels[i], 1e-12);
  }
}

TEST(Netpbm, RejectsTextFormatAndTruncation) {
  test::TempDir dir;
  write_text_file(dir / "ascii.pgm", "P2\n2 2\n255\n0 0 0 0\n");
  EXPECT_THROW(read_netpbm(dir / "ascii.pgm"), IoError);
  write_text_file(dir / "short.pgm", "P5\n4 4\n255\nab");
  EXPECT_THROW(read_netpbm(dir / "short.pgm"), IoError);
}

TEST(Parallel, VisitsEachIndexOnceAndRethrows) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, 4);
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) { if (i == 7) throw InvalidArgument("x"); }, 3), InvalidArgument);
}

TEST(SvgPlot, RendersSeriesAndRejectsMismatch) {
  PlotSpec spec{"Accuracy & epochs", "epoch", "acc", {{"swat", {1, 2, 3}, {50, 60, 70}, {1, 1, 1}}}};
  const auto svg = render_svg(spec);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("Accuracy &amp; epochs"), std::string::npos);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
  spec.series[0].y.pop_back();
  EXPECT_THROW(render_svg(spec), InvalidArgument);
}

TEST(Types, SourceNamesRoundTrip) {
  EXPECT_EQ(source_from_string(to_string(Source::kFewShot)), Source::kFewShot);
  EXPECT_EQ(source_from_string(to_string(Source::kRetrieved)), Source::kRetrieved);
  EXPECT_THROW(source_from_string("web"), InvalidArgument);
}

}  // namespace
}  // namespace swat
