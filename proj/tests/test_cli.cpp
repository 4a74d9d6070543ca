#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "curvi/cli.hpp"
#include "curvi/image_io.hpp"

using namespace curvi;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("curvi_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream(path("tri.scene")) << "background 0 0 0.2\n"
                                        "v -1 -1 3  1 0 0 1  0 0\n"
                                        "v  1 -1 3  0 1 0 1  1 0\n"
                                        "v  0  1 3  0 0 1 1  0 1\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "curvi");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = runCli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenmapIdentity) {
  const auto r = run({"genmap", "universal", "--size", "64x64", "--fov", "h90", "--k", "1",
                      "--l", "1", "--out", path("id.exr")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const STMap map = readSTMap(path("id.exr"));
  double worst = 0.0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const Vec2 want = texelCenter(x, y, 64, 64);
      worst = std::max({worst, std::abs(map.texels(x, y).x - want.x),
                        std::abs(map.texels(x, y).y - want.y)});
    }
  }
  EXPECT_LE(worst, 1e-6);
  EXPECT_EQ(map.metadata.at("aov"), "h90");
}

TEST_F(Cli, GenmapDefaultName) {
  const fs::path old = fs::current_path();
  fs::current_path(dir_);
  const auto r = run({"genmap", "universal", "--size", "16x8", "--fov", "d140", "--k", "0",
                      "--l", "0.62", "--s", "0.98", "--pmap", "--vignette", "--desc", "Wide"});
  fs::current_path(old);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string name = "Wide_(Pm_V_M)_(d140_k0_l0.62_s0.98).exr";
  EXPECT_EQ(r.out, name + "\n");
  EXPECT_TRUE(fs::exists(dir_ / name));
  EXPECT_TRUE(readPerspectiveMap(dir_ / name).hasVignette());
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"genmap", "universal", "--size", "63x64", "--out", path("a.exr")}).code,
            kExitValidation);
  EXPECT_EQ(run({"genmap", "universal", "--size", "64x64", "--fov", "x90", "--out", path("a.exr")}).code,
            kExitValidation);
  EXPECT_EQ(run({"genmap", "universal", "--size", "64x64", "--fov", "h200", "--out", path("a.exr")}).code,
            kExitValidation);
  EXPECT_EQ(run({"genmap", "universal", "--size", "64x64", "--bogus"}).code, kExitValidation);
  EXPECT_EQ(run({"invert", "--in", path("missing.exr"), "--out", path("b.exr")}).code, kExitIo);
  EXPECT_EQ(run({"rasterize", "--mode", "rect", "--scene", path("missing.scene"), "--size",
                 "8x8", "--out", path("c.png")}).code,
            kExitIo);
  std::ofstream(path("bad.scene")) << "v 1 2\n";
  const auto bad = run({"rasterize", "--mode", "rect", "--scene", path("bad.scene"), "--size",
                        "8x8", "--out", path("c.png")});
  EXPECT_EQ(bad.code, kExitValidation);
  EXPECT_NE(bad.err.find("line"), std::string::npos) << bad.err;
}

TEST_F(Cli, RasterizeAllModes) {
  auto r = run({"rasterize", "--mode", "rect", "--scene", path("tri.scene"), "--size", "64x48",
                "--out", path("rect.png"), "--exr", path("rect.exr")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "triangles 1 drawn 1\n");
  EXPECT_TRUE(fs::exists(path("rect.png")));

  ASSERT_EQ(run({"genmap", "universal", "--size", "64x48", "--fov", "h90", "--out",
                 path("id.exr")}).code,
            kExitOk);
  r = run({"rasterize", "--mode", "stmap", "--scene", path("tri.scene"), "--map", path("id.exr"),
           "--exr", path("st.exr")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(run({"diff", path("rect.exr"), path("st.exr"), "--tolerance", "0.02"}).code, kExitOk);

  ASSERT_EQ(run({"genmap", "universal", "--size", "64x48", "--fov", "h270", "--k", "0", "--pmap",
                 "--vignette", "--out", path("fish.exr")}).code,
            kExitOk);
  r = run({"rasterize", "--mode", "pmap", "--scene", path("tri.scene"), "--map", path("fish.exr"),
           "--out", path("fish.png"), "--no-aa", "--variant", "II", "--cull"});
  ASSERT_EQ(r.code, kExitOk) << r.err;

  EXPECT_EQ(run({"rasterize", "--mode", "stmap", "--scene", path("tri.scene"), "--out",
                 path("x.png")}).code,
            kExitValidation);
  EXPECT_EQ(run({"rasterize", "--mode", "rect", "--scene", path("tri.scene"), "--size", "8x8"}).code,
            kExitValidation);
}

TEST_F(Cli, DiffIdenticalAndDifferent) {
  run({"genmap", "universal", "--size", "32x32", "--k", "0.5", "--out", path("a.exr")});
  run({"genmap", "universal", "--size", "32x32", "--k", "0.4", "--out", path("b.exr")});
  const auto same = run({"diff", path("a.exr"), path("a.exr"), "--tolerance", "0"});
  EXPECT_EQ(same.code, kExitOk);
  EXPECT_NE(same.out.find("overall max 0\n"), std::string::npos) << same.out;
  EXPECT_EQ(run({"diff", path("a.exr"), path("b.exr"), "--tolerance", "1e-6"}).code, kExitFailure);
  EXPECT_EQ(run({"diff", path("a.exr"), path("b.exr")}).code, kExitOk);
}

TEST_F(Cli, ConvertAndInvert) {
  ASSERT_EQ(run({"genmap", "universal", "--size", "64x48", "--pmap", "--out", path("pm.exr")}).code,
            kExitOk);
  ASSERT_EQ(run({"convert", "pm2st", "--in", path("pm.exr"), "--fov", "h90", "--out",
                 path("st.exr")}).code,
            kExitOk);
  ASSERT_EQ(run({"genmap", "universal", "--size", "64x48", "--out", path("ref.exr")}).code, kExitOk);
  EXPECT_EQ(run({"diff", path("st.exr"), path("ref.exr"), "--tolerance", "1e-4"}).code, kExitOk);
  EXPECT_EQ(run({"convert", "pm2st", "--in", path("pm.exr"), "--fov", "h180", "--out",
                 path("bad.exr")}).code,
            kExitValidation);

  ASSERT_EQ(run({"invert", "--in", path("ref.exr"), "--out", path("inv.exr")}).code, kExitOk);
  EXPECT_EQ(readSTMap(path("inv.exr")).kind, MapKind::Undistort);
  EXPECT_EQ(run({"invert", "--in", path("inv.exr"), "--out", path("inv2.exr")}).code,
            kExitValidation);
}

TEST_F(Cli, LensWarnings) {
  const auto r = run({"genmap", "lens", "--size", "32x16", "--radial", "0.5,0.1", "--out",
                      path("lens.exr")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.err.find("k1"), std::string::npos) << r.err;
  EXPECT_EQ(readSTMap(path("lens.exr")).metadata.at("k1"), "0.5");
}

TEST_F(Cli, ThreadCountDoesNotChangeOutput) {
  run({"genmap", "universal", "--size", "96x64", "--fov", "h300", "--k", "-0.5", "--pmap",
       "--out", path("pm.exr")});
  run({"--threads", "1", "rasterize", "--mode", "pmap", "--scene", path("tri.scene"), "--map",
       path("pm.exr"), "--exr", path("one.exr")});
  run({"--threads", "3", "rasterize", "--mode", "pmap", "--scene", path("tri.scene"), "--map",
       path("pm.exr"), "--exr", path("three.exr")});
  EXPECT_EQ(run({"diff", path("one.exr"), path("three.exr"), "--tolerance", "0"}).code, kExitOk);
}
