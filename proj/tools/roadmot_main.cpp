// roadmot command line: track / eval / gridsearch / sim / overlay.
//
// Exit codes: 0 success, 1 usage, 2 missing or malformed input,
// 3 evaluation error (empty ground truth).

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "roadmot/roadmot.hpp"

namespace fs = std::filesystem;
using namespace roadmot;

namespace {

struct WeightFlags {
  double w_3d2d = 0.35, w_3d3d = 0.35, w_app = 0.2, w_shape = 0.1;
  double eta_app = 0.1, eta_s = 0.25, eta_p = 0.2;
  double gate_cost = 0.9;

  CostWeights resolve() const {
    CostWeights w = CostWeights::normalized(w_3d2d, w_3d3d, w_app, w_shape);
    w.eta_app = eta_app;
    w.eta_s = eta_s;
    w.eta_p = eta_p;
    w.gate_cost = gate_cost;
    if (!w.valid()) throw Error("invalid cost weights / normalizers");
    return w;
  }
};

void add_weight_flags(CLI::App* cmd, WeightFlags& w) {
  cmd->add_option("--w-3d2d", w.w_3d2d, "3D-2D cost weight");
  cmd->add_option("--w-3d3d", w.w_3d3d, "3D-3D cost weight");
  cmd->add_option("--w-app", w.w_app, "appearance cost weight");
  cmd->add_option("--w-shape", w.w_shape, "shape/pose cost weight");
  cmd->add_option("--eta-app", w.eta_app, "appearance normalizer");
  cmd->add_option("--eta-s", w.eta_s, "shape normalizer");
  cmd->add_option("--eta-p", w.eta_p, "pose normalizer");
  cmd->add_option("--gate-cost", w.gate_cost,
                  "combined costs above this are gated out");
}

struct TrackArgs {
  std::string detections, features, calib, poses, output, timing_log;
  WeightFlags weights;
  double min_score = 0.5, nms_iou = 0.5, sigma0 = kDefaultSigma0;
  double trans_sigma = 0.1, rot_sigma = 0.005, cam_height = 0.0;
  int hold_frames = 0;
};

void write_timing_log(const std::vector<FrameStats>& stats,
                      const std::string& path) {
  std::ofstream out(path);
  out << "frame,cost_assoc_ms,evaluated,rows,cols\n";
  char buf[64];
  for (const FrameStats& s : stats) {
    std::snprintf(buf, sizeof buf, "%.4f", s.cost_assoc_ms);
    out << s.frame << ',' << buf << ',' << s.evaluated << ',' << s.rows << ','
        << s.cols << '\n';
  }
}

int cmd_track(const TrackArgs& a) {
  SequenceBundle bundle = load_bundle(a.detections, a.features, a.calib,
                                      a.poses, "", a.trans_sigma, a.rot_sigma);
  if (a.cam_height > 0.0) bundle.rig.h_cam = a.cam_height;

  TrackerConfig cfg;
  cfg.min_score = a.min_score;
  cfg.nms_iou = a.nms_iou;
  cfg.sigma0 = a.sigma0;
  cfg.hold_frames = a.hold_frames;
  cfg.weights = a.weights.resolve();

  std::vector<FrameStats> stats;
  const std::vector<Track> tracks =
      run_sequence(bundle.frames, bundle.motions, bundle.rig, cfg, &stats);
  write_results(tracks, a.output);

  const std::string timing =
      a.timing_log.empty() ? a.output + ".timing.csv" : a.timing_log;
  write_timing_log(stats, timing);

  double ms = 0.0;
  long long evaluated = 0, possible = 0;
  for (const FrameStats& s : stats) {
    ms += s.cost_assoc_ms;
    evaluated += s.evaluated;
    possible += (long long)(s.rows) * s.cols;
  }
  std::cout << "tracks " << tracks.size() << "\n"
            << "frames " << bundle.frames.size() << "\n"
            << "mean_cost_assoc_ms "
            << (stats.empty() ? 0.0 : ms / double(stats.size())) << "\n"
            << "evaluated_pairs " << evaluated << " of " << possible << "\n";
  return 0;
}

struct EvalArgs {
  std::string gt, results, report_txt, report_json;
  double iou_min = 0.5;
};

int cmd_eval(const EvalArgs& a) {
  const std::vector<Track> gt = read_tracks(a.gt);
  const std::vector<Track> hyp = read_tracks(a.results);
  const MOTReport rep = score_tracks(gt, hyp, a.iou_min);
  std::cout << report_to_text(rep);
  if (!a.report_txt.empty()) {
    std::ofstream(a.report_txt) << report_to_text(rep);
  }
  if (!a.report_json.empty()) {
    std::ofstream(a.report_json) << report_to_json(rep).dump(2) << '\n';
  }
  return 0;
}

struct GridArgs {
  std::string data, grid_file, table = "gridsearch.csv";
  int splits = 4;
  WeightFlags weights;  // etas/gate shared across grid points
  double min_score = 0.5, nms_iou = 0.5, sigma0 = kDefaultSigma0;
  double trans_sigma = 0.1, rot_sigma = 0.005;
  int hold_frames = 0;
  double iou_min = 0.5;
};

std::vector<std::array<double, 4>> default_grid() {
  return {{1, 0, 0, 0},
          {0, 1, 0, 0},
          {0, 0, 1, 0},
          {0.5, 0.5, 0, 0},
          {0.4, 0.4, 0.2, 0},
          {0.45, 0.45, 0, 0.1},
          {0.35, 0.35, 0.2, 0.1},
          {0.25, 0.25, 0.4, 0.1}};
}

std::vector<std::array<double, 4>> read_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::array<double, 4>> grid;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::array<double, 4> w{};
    char sep;
    if (!(ss >> w[0] >> sep >> w[1] >> sep >> w[2] >> sep >> w[3])) {
      throw ParseError("expected w_3d2d,w_3d3d,w_app,w_shape", line_no);
    }
    grid.push_back(w);
  }
  if (grid.empty()) throw Error("empty weight grid in " + path);
  return grid;
}

int cmd_gridsearch(const GridArgs& a) {
  std::vector<std::string> seq_dirs;
  for (const auto& entry : fs::directory_iterator(a.data)) {
    if (entry.is_directory() &&
        fs::exists(entry.path() / "detections.csv") &&
        fs::exists(entry.path() / "gt.txt")) {
      seq_dirs.push_back(entry.path().string());
    }
  }
  std::sort(seq_dirs.begin(), seq_dirs.end());
  if (int(seq_dirs.size()) < a.splits) {
    throw InsufficientSequences(std::to_string(seq_dirs.size()) +
                                " sequences for " + std::to_string(a.splits) +
                                "-fold cross validation");
  }

  struct Seq {
    std::string dir;
    SequenceBundle bundle;
    int vehicles = 0;
    int split = -1;
  };
  std::vector<Seq> seqs;
  for (const std::string& dir : seq_dirs) {
    Seq s;
    s.dir = dir;
    const std::string feat = fs::exists(fs::path(dir) / "features.csv")
                                 ? dir + "/features.csv"
                                 : "";
    s.bundle = load_bundle(dir + "/detections.csv", feat, dir + "/calib.txt",
                           dir + "/poses.txt", dir + "/gt.txt", a.trans_sigma,
                           a.rot_sigma);
    s.vehicles = int(s.bundle.gt.size());
    seqs.push_back(std::move(s));
  }

  // Greedy balance: sequences by descending vehicle count into the currently
  // lightest split, so folds see similar traffic volume.
  std::vector<int> order(seqs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (seqs[x].vehicles != seqs[y].vehicles)
      return seqs[x].vehicles > seqs[y].vehicles;
    return seqs[x].dir < seqs[y].dir;
  });
  std::vector<int> load(a.splits, 0);
  for (int idx : order) {
    const int best =
        int(std::min_element(load.begin(), load.end()) - load.begin());
    seqs[idx].split = best;
    load[best] += seqs[idx].vehicles;
  }

  const std::vector<std::array<double, 4>> grid =
      a.grid_file.empty() ? default_grid() : read_grid(a.grid_file);

  struct GridResult {
    std::array<double, 4> w;
    double mean_mota = 0.0;
    long long fp = 0;
    std::vector<double> fold_mota;
  };
  std::vector<GridResult> results;
  for (const auto& w : grid) {
    TrackerConfig cfg;
    cfg.min_score = a.min_score;
    cfg.nms_iou = a.nms_iou;
    cfg.sigma0 = a.sigma0;
    cfg.hold_frames = a.hold_frames;
    WeightFlags wf = a.weights;
    wf.w_3d2d = w[0];
    wf.w_3d3d = w[1];
    wf.w_app = w[2];
    wf.w_shape = w[3];
    cfg.weights = wf.resolve();

    GridResult res;
    res.w = w;
    std::vector<double> fold_sum(a.splits, 0.0);
    std::vector<int> fold_n(a.splits, 0);
    for (Seq& s : seqs) {
      const std::vector<Track> tracks =
          run_sequence(s.bundle.frames, s.bundle.motions, s.bundle.rig, cfg);
      const MOTReport rep = score_tracks(s.bundle.gt, tracks, a.iou_min);
      fold_sum[s.split] += rep.mota;
      fold_n[s.split] += 1;
      res.fp += rep.fp;
    }
    for (int k = 0; k < a.splits; ++k) {
      res.fold_mota.push_back(fold_n[k] ? fold_sum[k] / fold_n[k] : 0.0);
      res.mean_mota += res.fold_mota.back();
    }
    res.mean_mota /= a.splits;
    results.push_back(std::move(res));
  }

  const GridResult* best = &results[0];
  for (const GridResult& r : results) {
    if (r.mean_mota > best->mean_mota ||
        (r.mean_mota == best->mean_mota &&
         (r.fp < best->fp || (r.fp == best->fp && r.w < best->w)))) {
      best = &r;
    }
  }

  std::ofstream table(a.table);
  table << "w_3d2d,w_3d3d,w_app,w_shape,mean_mota,total_fp";
  for (int k = 0; k < a.splits; ++k) table << ",fold" << k;
  table << '\n';
  for (const GridResult& r : results) {
    table << r.w[0] << ',' << r.w[1] << ',' << r.w[2] << ',' << r.w[3] << ','
          << r.mean_mota << ',' << r.fp;
    for (double m : r.fold_mota) table << ',' << m;
    table << '\n';
  }

  std::cout << "sequences " << seqs.size() << " splits " << a.splits << "\n"
            << "best_weights " << best->w[0] << ' ' << best->w[1] << ' '
            << best->w[2] << ' ' << best->w[3] << "\n"
            << "best_mean_mota " << best->mean_mota << "\n"
            << "table " << a.table << "\n";
  return 0;
}

struct SimArgs {
  std::string out = ".";
  uint64_t seed = 1;
  int frames = 50, objects = 10, lanes = 3, psi_dim = 8;
  std::string tmpl = "constant";
  double pixel_sigma = 0.0, dropout = 0.0, clutter = 0.0;
  double camera_speed = 8.0, lane_width = 3.5;
  double psi_distinct = 1.0, feature_sigma = 0.05;
};

int cmd_sim(const SimArgs& a) {
  sim::SimConfig cfg;
  cfg.frames = a.frames;
  cfg.objects = a.objects;
  cfg.lanes = a.lanes;
  cfg.psi_dim = a.psi_dim;
  cfg.pixel_sigma = a.pixel_sigma;
  cfg.dropout = a.dropout;
  cfg.clutter_rate = a.clutter;
  cfg.camera_speed = a.camera_speed;
  cfg.lane_width = a.lane_width;
  cfg.psi_distinct = a.psi_distinct;
  cfg.feature_sigma = a.feature_sigma;
  if (a.tmpl == "constant") {
    cfg.motion = sim::MotionTemplate::ConstantVelocity;
  } else if (a.tmpl == "lane-change") {
    cfg.motion = sim::MotionTemplate::LaneChange;
  } else if (a.tmpl == "intersection") {
    cfg.motion = sim::MotionTemplate::IntersectionTurn;
  } else {
    throw Error("unknown template '" + a.tmpl + "'");
  }

  const sim::SimScene scene = sim::generate(cfg, a.seed);
  const SequenceBundle bundle = sim::render(scene);
  fs::create_directories(a.out);
  sim::write_scene_files(scene, bundle, a.out);

  size_t dets = 0;
  for (const auto& f : bundle.frames) dets += f.size();
  std::cout << "seed " << a.seed << "\nobjects " << scene.objects.size()
            << "\nframes " << cfg.frames << "\ndetections " << dets
            << "\nout " << a.out << "\n";
  return 0;
}

struct OverlayArgs {
  std::string results, gt, out = "overlay";
  std::string calib;
  int width = 1200, height = 360;
};

std::string track_color(int id) {
  uint64_t h = uint64_t(id) + 0x9e3779b97f4a7c15ull;
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ull;
  h ^= h >> 27;
  const int hue = int(h % 360);
  return "hsl(" + std::to_string(hue) + ",70%,45%)";
}

int cmd_overlay(const OverlayArgs& a) {
  const std::vector<Track> hyp = read_tracks(a.results);
  std::vector<Track> gt;
  if (!a.gt.empty()) gt = read_tracks(a.gt);
  int width = a.width, height = a.height;
  if (!a.calib.empty()) {
    const CameraRig rig = read_calib(a.calib);
    width = rig.image_width;
    height = rig.image_height;
  }

  int last = -1;
  auto scan = [&](const std::vector<Track>& tracks) {
    for (const Track& t : tracks) {
      for (const TrackEntry& e : t.entries) last = std::max(last, e.frame);
    }
  };
  scan(hyp);
  scan(gt);

  fs::create_directories(a.out);
  std::vector<int> hyp_count(last + 1, 0), gt_count(last + 1, 0);
  for (int f = 0; f <= last; ++f) {
    char name[64];
    std::snprintf(name, sizeof name, "/frame_%06d.svg", f);
    std::ofstream svg(a.out + name);
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
        << "' height='" << height << "'>\n"
        << "<rect width='100%' height='100%' fill='#202020'/>\n";
    auto draw = [&](const Track& t, int frame, bool dashed) {
      for (const TrackEntry& e : t.entries) {
        if (e.frame != frame) continue;
        svg << "<rect x='" << e.det.bbox.x << "' y='" << e.det.bbox.y
            << "' width='" << e.det.bbox.w << "' height='" << e.det.bbox.h
            << "' fill='none' stroke='" << track_color(t.id)
            << "' stroke-width='2'"
            << (dashed ? " stroke-dasharray='6,4'" : "") << "/>\n";
        if (!dashed) {
          svg << "<text x='" << e.det.bbox.x << "' y='" << e.det.bbox.y - 3
              << "' fill='" << track_color(t.id) << "' font-size='12'>"
              << t.id << "</text>\n";
        }
      }
    };
    for (const Track& t : gt) {
      draw(t, f, true);
      for (const TrackEntry& e : t.entries)
        if (e.frame == f) ++gt_count[f];
    }
    for (const Track& t : hyp) {
      draw(t, f, false);
      for (const TrackEntry& e : t.entries)
        if (e.frame == f) ++hyp_count[f];
    }
    svg << "</svg>\n";
  }

  // Summary: per-frame box counts as polylines.
  const int n = last + 1;
  const int sw = 640, sh = 240, pad = 30;
  int peak = 1;
  for (int f = 0; f < n; ++f) peak = std::max({peak, hyp_count[f], gt_count[f]});
  std::ofstream svg(a.out + "/summary.svg");
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << sw
      << "' height='" << sh << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  auto polyline = [&](const std::vector<int>& counts, const char* color,
                      bool dashed) {
    svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5'"
        << (dashed ? " stroke-dasharray='5,3'" : "") << " points='";
    if (n == 1) {
      const double y = sh - pad - double(counts.empty() ? 0 : counts[0]) *
                                      (sh - 2 * pad) / peak;
      svg << pad << ',' << y << ' ' << (sw - pad) << ',' << y;
    }
    for (int f = 0; f < n; ++f) {
      const double x = pad + double(f) * (sw - 2 * pad) / std::max(1, n - 1);
      const double y = sh - pad - double(counts[f]) * (sh - 2 * pad) / peak;
      svg << x << ',' << y << ' ';
    }
    svg << "'/>\n";
  };
  if (n > 0) {
    if (!gt.empty()) polyline(gt_count, "#888888", true);
    polyline(hyp_count, "#c0392b", false);
  } else {
    svg << "<line x1='" << pad << "' y1='" << sh - pad << "' x2='" << sw - pad
        << "' y2='" << sh - pad << "' stroke='#c0392b'/>\n";
  }
  svg << "<text x='" << pad << "' y='15' font-size='12'>tracks per frame"
      << "</text>\n</svg>\n";
  std::cout << "frames " << n << "\nout " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric multi-object tracking for monocular road scenes"};
  app.require_subcommand(1);
  // Options may also come from an INI/TOML file with one section per
  // subcommand (e.g. [track]); explicit flags override file values.
  app.set_config("--config", "", "read options from a config file");
  app.fallthrough();

  TrackArgs track;
  CLI::App* t = app.add_subcommand("track", "run the tracker over a sequence");
  t->add_option("--detections", track.detections, "detections.csv")->required();
  t->add_option("--features", track.features, "features.csv sidecar");
  t->add_option("--calib", track.calib, "KITTI-style calib file")->required();
  t->add_option("--poses", track.poses, "camera-to-world poses")->required();
  t->add_option("--output,-o", track.output, "KITTI result file")->required();
  t->add_option("--timing-log", track.timing_log,
                "per-frame timing csv (default <output>.timing.csv)");
  t->add_option("--min-score", track.min_score, "detection score threshold");
  t->add_option("--nms-iou", track.nms_iou, "NMS IoU threshold");
  t->add_option("--sigma0", track.sigma0, "pixel sigma at score 1");
  t->add_option("--hold-frames", track.hold_frames,
                "frames a track survives unmatched");
  t->add_option("--trans-sigma", track.trans_sigma,
                "ego translation uncertainty (m/frame)");
  t->add_option("--rot-sigma", track.rot_sigma,
                "ego rotation uncertainty (rad/frame)");
  t->add_option("--cam-height", track.cam_height,
                "override camera height above road (m)");
  add_weight_flags(t, track.weights);

  EvalArgs eval;
  CLI::App* e = app.add_subcommand("eval", "CLEAR MOT scoring");
  e->add_option("--gt", eval.gt, "ground-truth tracks (KITTI labels)")
      ->required();
  e->add_option("--results", eval.results, "tracker output")->required();
  e->add_option("--iou-min", eval.iou_min, "match IoU threshold");
  e->add_option("--report-txt", eval.report_txt, "write key-value report");
  e->add_option("--report-json", eval.report_json, "write JSON report");

  GridArgs grid;
  CLI::App* g = app.add_subcommand(
      "gridsearch", "cross-validated cost-weight search over sequences");
  g->add_option("--data", grid.data, "directory of sequence directories")
      ->required();
  g->add_option("--grid", grid.grid_file,
                "CSV of weight rows w_3d2d,w_3d3d,w_app,w_shape");
  g->add_option("--splits", grid.splits, "cross-validation folds");
  g->add_option("--table", grid.table, "output grid table csv");
  g->add_option("--min-score", grid.min_score, "detection score threshold");
  g->add_option("--nms-iou", grid.nms_iou, "NMS IoU threshold");
  g->add_option("--sigma0", grid.sigma0, "pixel sigma at score 1");
  g->add_option("--hold-frames", grid.hold_frames, "track hold frames");
  g->add_option("--iou-min", grid.iou_min, "evaluation IoU threshold");
  add_weight_flags(g, grid.weights);

  SimArgs simargs;
  CLI::App* s = app.add_subcommand("sim", "generate a synthetic sequence");
  s->add_option("--out", simargs.out, "output directory")->required();
  s->add_option("--seed", simargs.seed, "RNG seed");
  s->add_option("--frames", simargs.frames, "frame count");
  s->add_option("--objects", simargs.objects, "object count");
  s->add_option("--lanes", simargs.lanes, "lane count (straight templates)");
  s->add_option("--lane-width", simargs.lane_width, "lane width (m)");
  s->add_option("--template", simargs.tmpl,
                "constant | lane-change | intersection");
  s->add_option("--pixel-sigma", simargs.pixel_sigma, "bbox corner noise (px)");
  s->add_option("--dropout", simargs.dropout, "detection dropout probability");
  s->add_option("--clutter", simargs.clutter, "clutter boxes per frame");
  s->add_option("--camera-speed", simargs.camera_speed, "ego speed (m/s)");
  s->add_option("--psi-dim", simargs.psi_dim, "descriptor length");
  s->add_option("--psi-distinct", simargs.psi_distinct,
                "0 = identical descriptors, 1 = independent");
  s->add_option("--feature-sigma", simargs.feature_sigma,
                "descriptor noise per frame");

  OverlayArgs overlay;
  CLI::App* o = app.add_subcommand("overlay", "emit per-frame SVG overlays");
  o->add_option("--results", overlay.results, "tracker output")->required();
  o->add_option("--gt", overlay.gt, "ground truth (drawn dashed)");
  o->add_option("--out", overlay.out, "output directory");
  o->add_option("--calib", overlay.calib, "calib file for the image size");
  o->add_option("--width", overlay.width, "image width");
  o->add_option("--height", overlay.height, "image height");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (t->parsed()) return cmd_track(track);
    if (e->parsed()) return cmd_eval(eval);
    if (g->parsed()) return cmd_gridsearch(grid);
    if (s->parsed()) return cmd_sim(simargs);
    if (o->parsed()) return cmd_overlay(overlay);
  } catch (const EmptyGroundTruth& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 1;
}
