#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "roadmot/io/kitti.hpp"
#include "roadmot/sim/simulator.hpp"

using namespace roadmot;
using Catch::Approx;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("roadmot_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static inline int counter = 0;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream(path) << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("read_detections grammar") {
  TempDir dir;
  const std::string path = dir.file("dets.csv");

  write_file(path, "0,100.0,150.0,80.0,60.0,0.97\n2,5,5,10,10,0.5\n");
  const auto frames = read_detections(path);
  REQUIRE(frames.size() == 3);
  REQUIRE(frames[0].size() == 1);
  CHECK(frames[0][0].bbox.x == 100.0);
  CHECK(frames[0][0].bbox.h == 60.0);
  CHECK(frames[0][0].score == 0.97);
  CHECK(frames[1].empty());
  REQUIRE(frames[2].size() == 1);

  write_file(path, "");
  CHECK(read_detections(path).empty());

  write_file(path, "0,1,1,-5,10,0.5\n");
  CHECK_THROWS_AS(read_detections(path), NegativeDimension);

  write_file(path, "0,1,1,10,10\n");
  try {
    read_detections(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
  }

  write_file(path, "0,1,1,10,10,0.5\nnot,a,number,x,y,z\n");
  try {
    read_detections(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }

  CHECK_THROWS_AS(read_detections(dir.file("missing.csv")), Error);
}

TEST_CASE("read_features attaches by frame and index") {
  TempDir dir;
  const std::string dets = dir.file("dets.csv");
  const std::string feats = dir.file("feats.csv");
  write_file(dets, "0,10,10,20,20,0.9\n0,50,10,20,20,0.8\n1,10,10,20,20,0.9\n");

  auto frames = read_detections(dets);
  write_file(feats,
             "d=4\n"
             "0,0,1,2,3,4,0.1,0.2,0.3,0.4,0.5,0,0.7,0,1.5,1.6,4.0\n"
             "1,0,4,3,2,1,0.1,0.2,0.3,0.4,0.5,0,0.0,0,1.4,1.7,4.2\n");
  read_features(feats, frames);
  REQUIRE(frames[0][0].features.has_value());
  CHECK(!frames[0][1].features.has_value());
  REQUIRE(frames[1][0].features.has_value());
  CHECK(frames[0][0].features->psi.size() == 4);
  CHECK(frames[0][0].features->psi[3] == 4.0);
  CHECK(frames[0][0].features->lambda[0] == Approx(0.1));
  CHECK(frames[0][0].features->omega.y() == Approx(0.7));
  CHECK(frames[0][0].features->dims.length == 4.0);

  // 14 values after the keys instead of 15: dimension mismatch.
  write_file(feats, "d=4\n0,0,1,2,3,4,0.1,0.2,0.3,0.4,0.5,0,0.7,0,1.5,1.6\n");
  auto frames2 = read_detections(dets);
  CHECK_THROWS_AS(read_features(feats, frames2), DimensionMismatch);

  write_file(feats, "0,0,1,2,3\n");
  CHECK_THROWS_AS(read_features(feats, frames2), ParseError);
}

TEST_CASE("load_bundle without a feature file degrades to geometry") {
  TempDir dir;
  write_file(dir.file("dets.csv"), "0,10,10,20,20,0.9\n");
  write_file(dir.file("calib.txt"), "P2: 700 0 600 0 0 700 180 0 0 0 1 0\n");
  write_file(dir.file("poses.txt"),
             "1 0 0 0 0 1 0 0 0 0 1 0\n1 0 0 0 0 1 0 0 0 0 1 1\n");
  const SequenceBundle bundle =
      load_bundle(dir.file("dets.csv"), "", dir.file("calib.txt"),
                  dir.file("poses.txt"));
  REQUIRE(bundle.frames.size() == 2);
  CHECK(!bundle.frames[0][0].features.has_value());
  CHECK(bundle.rig.fx == 700.0);
}

TEST_CASE("read_calib accepts KITTI-style files") {
  TempDir dir;
  const std::string path = dir.file("calib.txt");
  write_file(path,
             "P0: 1 0 0 0 0 1 0 0 0 0 1 0\n"
             "P2: 721.5 0 609.5 44.8 0 721.5 172.8 0.2 0 0 1 0.002\n"
             "R_rect: 1 0 0 0 1 0 0 0 1\n"
             "GP: 0 1 0 1.72\n"
             "SIZE: 1242 375\n");
  const CameraRig rig = read_calib(path);
  CHECK(rig.fx == 721.5);
  CHECK(rig.fy == 721.5);
  CHECK(rig.cx == 609.5);
  CHECK(rig.cy == 172.8);
  CHECK(rig.h_cam == 1.72);
  CHECK(rig.image_width == 1242);
  CHECK(rig.image_height == 375);

  write_file(path, "P2: 1 2 3 4 5 6 7 8 9 10 11\n");
  CHECK_THROWS_AS(read_calib(path), ParseError);

  write_file(path, "P0: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  CHECK_THROWS_AS(read_calib(path), Error);
}

TEST_CASE("read_poses composes world-to-camera motions") {
  TempDir dir;
  const std::string path = dir.file("poses.txt");

  write_file(path,
             "1 0 0 0 0 1 0 0 0 0 1 0\n"
             "1 0 0 0 0 1 0 0 0 0 1 0\n"
             "1 0 0 0 0 1 0 0 0 0 1 0\n");
  auto motions = read_poses(path);
  REQUIRE(motions.size() == 2);
  for (const RigidMotion& m : motions) {
    CHECK(m.translation.norm() == 0.0);
    CHECK((m.rotation - Mat3::Identity()).norm() == 0.0);
  }

  // Camera advancing +1 m in Z per frame: static points drift -1 m in Z.
  write_file(path,
             "1 0 0 0 0 1 0 0 0 0 1 0\n"
             "1 0 0 0 0 1 0 0 0 0 1 1\n"
             "1 0 0 0 0 1 0 0 0 0 1 2\n");
  motions = read_poses(path);
  REQUIRE(motions.size() == 2);
  CHECK((motions[0].translation - Vec3(0, 0, -1)).norm() < 1e-12);
  CHECK((motions[1].translation - Vec3(0, 0, -1)).norm() < 1e-12);

  write_file(path, "1 0 0 0 0 1 0 0 0 0 1\n");
  CHECK_THROWS_AS(read_poses(path), ParseError);

  write_file(path, "1 0.5 0 0 0 1 0 0 0 0 1 0\n");
  CHECK_THROWS_AS(read_poses(path), NonOrthonormalRotation);
}

TEST_CASE("pose pair motions compose consistently") {
  TempDir dir;
  const std::string path = dir.file("poses.txt");
  std::ostringstream os;
  sim::Rng rng(83);
  double yaw = 0.0, x = 0.0, z = 0.0;
  for (int f = 0; f < 10; ++f) {
    const Mat3 r = RigidMotion::yaw_matrix(yaw);
    os << r(0, 0) << ' ' << r(0, 1) << ' ' << r(0, 2) << ' ' << x << ' '
       << r(1, 0) << ' ' << r(1, 1) << ' ' << r(1, 2) << ' ' << 0.0 << ' '
       << r(2, 0) << ' ' << r(2, 1) << ' ' << r(2, 2) << ' ' << z << '\n';
    yaw += rng.uniform(-0.05, 0.05);
    x += rng.uniform(-0.2, 0.2);
    z += rng.uniform(0.5, 1.0);
  }
  write_file(path, os.str());
  const auto motions = read_poses(path);
  REQUIRE(motions.size() == 9);

  // motion(f -> f+2) must equal motion(f+1 -> f+2) o motion(f -> f+1).
  for (size_t f = 0; f + 1 < motions.size(); ++f) {
    const RigidMotion direct = compose(motions[f + 1], motions[f]);
    sim::Rng probe(f);
    for (int k = 0; k < 5; ++k) {
      const Vec3 p(probe.normal(0, 10), probe.normal(0, 2), probe.normal(0, 10));
      const Vec3 a = apply_motion(motions[f + 1], apply_motion(motions[f], p));
      const Vec3 b = apply_motion(direct, p);
      CHECK((a - b).norm() < 1e-9);
    }
  }
}

TEST_CASE("write_results formats the KITTI line exactly") {
  TempDir dir;
  const std::string path = dir.file("results.txt");
  Track t;
  t.id = 3;
  Detection d;
  d.frame = 0;
  d.bbox = {100, 150, 80, 60};
  d.score = 0.9;
  t.entries.push_back({0, d});
  write_results({t}, path);
  CHECK(read_file(path) ==
        "0 3 Car -1 -1 -10 100.00 150.00 180.00 210.00 "
        "-1 -1 -1 -1000 -1000 -1000 -10 0.90\n");

  write_results({}, path);
  CHECK(read_file(path).empty());
}

TEST_CASE("results round trip exactly on the 2-decimal grid") {
  TempDir dir;
  const std::string path = dir.file("results.txt");
  sim::Rng rng(89);
  std::vector<Track> tracks;
  auto snap = [](double v) { return std::round(v * 100.0) / 100.0; };
  for (int id = 1; id <= 1000; ++id) {
    Track t;
    t.id = id;
    const int first = rng.uniform_int(0, 40);
    const int len = rng.uniform_int(1, 5);
    for (int f = first; f < first + len; ++f) {
      Detection d;
      d.frame = f;
      d.bbox = {snap(rng.uniform(0, 1000)), snap(rng.uniform(0, 300)),
                snap(rng.uniform(5, 200)), snap(rng.uniform(5, 100))};
      d.score = snap(rng.uniform(0, 1));
      t.entries.push_back({f, std::move(d)});
    }
    tracks.push_back(std::move(t));
  }
  write_results(tracks, path);
  const std::vector<Track> back = read_tracks(path);
  REQUIRE(back.size() == tracks.size());
  for (size_t i = 0; i < tracks.size(); ++i) {
    REQUIRE(back[i].id == tracks[i].id);
    REQUIRE(back[i].entries.size() == tracks[i].entries.size());
    for (size_t k = 0; k < tracks[i].entries.size(); ++k) {
      const Detection& a = tracks[i].entries[k].det;
      const Detection& b = back[i].entries[k].det;
      CHECK(b.frame == a.frame);
      CHECK(b.bbox.x == Approx(a.bbox.x).margin(1e-9));
      CHECK(b.bbox.w == Approx(a.bbox.w).margin(1e-9));
      CHECK(b.score == Approx(a.score).margin(1e-9));
    }
  }

  // Idempotence: writing the parsed tracks again is byte-identical.
  const std::string first_bytes = read_file(path);
  write_results(back, dir.file("again.txt"));
  CHECK(read_file(dir.file("again.txt")) == first_bytes);
}

TEST_CASE("read_tracks skips non-Car classes") {
  TempDir dir;
  const std::string path = dir.file("gt.txt");
  write_file(path,
             "0 1 Car 0 0 -10 10.00 10.00 30.00 30.00 -1 -1 -1 -1000 -1000 "
             "-1000 -10\n"
             "0 2 DontCare 0 0 -10 50.00 10.00 70.00 30.00 -1 -1 -1 -1000 "
             "-1000 -1000 -10\n");
  const auto tracks = read_tracks(path);
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].id == 1);

  write_file(path, "0 1 Car 0 0 -10 10 10 30 30\n");
  CHECK_THROWS_AS(read_tracks(path), ParseError);
}

TEST_CASE("sim files survive a full write/read cycle") {
  TempDir dir;
  sim::SimConfig cfg;
  cfg.frames = 12;
  cfg.objects = 5;
  cfg.pixel_sigma = 1.0;
  cfg.clutter_rate = 0.5;
  const sim::SimScene scene = sim::generate(cfg, 21);
  const SequenceBundle bundle = sim::render(scene);
  sim::write_scene_files(scene, bundle, dir.path.string());

  const SequenceBundle loaded = load_bundle(
      dir.file("detections.csv"), dir.file("features.csv"),
      dir.file("calib.txt"), dir.file("poses.txt"), dir.file("gt.txt"));
  REQUIRE(loaded.frames.size() == bundle.frames.size());
  REQUIRE(loaded.motions.size() == bundle.motions.size());
  CHECK(loaded.gt.size() == bundle.gt.size());
  CHECK(loaded.rig.h_cam == bundle.rig.h_cam);

  for (size_t f = 0; f < bundle.frames.size(); ++f) {
    REQUIRE(loaded.frames[f].size() == bundle.frames[f].size());
    for (size_t i = 0; i < bundle.frames[f].size(); ++i) {
      const Detection& a = bundle.frames[f][i];
      const Detection& b = loaded.frames[f][i];
      CHECK(b.bbox.x == a.bbox.x);  // full precision round trip
      CHECK(b.score == a.score);
      REQUIRE(b.features.has_value());
      CHECK(b.features->psi == a.features->psi);
      CHECK(b.features->omega == a.features->omega);
    }
  }
  for (size_t f = 0; f < bundle.motions.size(); ++f) {
    CHECK((loaded.motions[f].translation - bundle.motions[f].translation)
              .norm() < 1e-12);
    CHECK((loaded.motions[f].rotation - bundle.motions[f].rotation).norm() <
          1e-12);
  }
}
