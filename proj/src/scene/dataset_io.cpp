#include "dgcan/scene/dataset_io.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dgcan/common/png_io.hpp"
#include "dgcan/core/serialize.hpp"

namespace dgcan::scene {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json pose_to_json(const Eigen::Isometry3d& pose) {
  json R = json::array(), t = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) R.push_back(pose.linear()(r, c));
  for (int r = 0; r < 3; ++r) t.push_back(pose.translation()(r));
  return json{{"R", R}, {"t", t}};
}

Eigen::Isometry3d pose_from_json(const json& j) {
  Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();
  const auto& R = j.at("R");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) pose.linear()(r, c) = R[r * 3 + c].get<double>();
  const auto& t = j.at("t");
  for (int r = 0; r < 3; ++r) pose.translation()(r) = t[r].get<double>();
  return pose;
}

std::string read_file(const fs::path& path, const std::string& scene_id) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("dataset: missing file " + path.string() +
                             " for scene " + scene_id);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
  json j;
  j["seed"] = scene.seed;
  j["camera"] = {{"pose", pose_to_json(scene.camera_pose)},
                 {"fx", scene.intrinsics.fx},
                 {"fy", scene.intrinsics.fy},
                 {"cx", scene.intrinsics.cx},
                 {"cy", scene.intrinsics.cy},
                 {"width", scene.intrinsics.width},
                 {"height", scene.intrinsics.height}};
  json objs = json::array();
  for (const auto& o : scene.objects) {
    objs.push_back({{"kind", o.kind == PrimitiveObject::Kind::kBox ? "box" : "cylinder"},
                    {"dims", {o.dims.x(), o.dims.y(), o.dims.z()}},
                    {"pose", pose_to_json(o.pose)},
                    {"friction", o.friction},
                    {"albedo", {o.albedo.x(), o.albedo.y(), o.albedo.z()}}});
  }
  j["objects"] = objs;
  return j.dump(2);
}

Scene scene_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scene scene;
  scene.seed = j.at("seed").get<std::uint64_t>();
  const auto& cam = j.at("camera");
  scene.camera_pose = pose_from_json(cam.at("pose"));
  scene.intrinsics.fx = cam.at("fx").get<double>();
  scene.intrinsics.fy = cam.at("fy").get<double>();
  scene.intrinsics.cx = cam.at("cx").get<double>();
  scene.intrinsics.cy = cam.at("cy").get<double>();
  scene.intrinsics.width = cam.at("width").get<int>();
  scene.intrinsics.height = cam.at("height").get<int>();
  for (const auto& jo : j.at("objects")) {
    PrimitiveObject o;
    o.kind = jo.at("kind").get<std::string>() == "box" ? PrimitiveObject::Kind::kBox
                                                       : PrimitiveObject::Kind::kCylinder;
    const auto& d = jo.at("dims");
    o.dims = {d[0].get<double>(), d[1].get<double>(), d[2].get<double>()};
    o.pose = pose_from_json(jo.at("pose"));
    o.friction = jo.at("friction").get<double>();
    const auto& a = jo.at("albedo");
    o.albedo = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
    scene.objects.push_back(o);
  }
  return scene;
}

void write_scene_record(const std::string& root, const SceneRecord& rec) {
  const fs::path dir = fs::path(root) / rec.id;
  fs::create_directories(dir);
  write_color_png((dir / "color.png").string(), rec.color);
  write_depth_png((dir / "depth.png").string(), rec.depth);
  std::ofstream(dir / "scene.json") << scene_to_json(rec.scene);
  std::ofstream labels(dir / "labels.jsonl");
  for (std::size_t i = 0; i < rec.labels.labels.size(); ++i) {
    json j = core::grasp_to_json(rec.labels.labels[i]);
    j["object_id"] = rec.labels.object_ids[i];
    labels << j.dump() << '\n';
  }
}

SceneRecord read_scene_record(const std::string& root, const std::string& id,
                              const std::string& split) {
  const fs::path dir = fs::path(root) / id;
  SceneRecord rec;
  rec.id = id;
  rec.split = split;
  rec.scene = scene_from_json(read_file(dir / "scene.json", id));
  rec.color = read_color_png((dir / "color.png").string());
  rec.depth = read_depth_png((dir / "depth.png").string());

  const std::string label_text = read_file(dir / "labels.jsonl", id);
  std::istringstream in(label_text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw std::runtime_error("dataset: malformed label line " +
                               std::to_string(lineno) + " in scene " + id);
    rec.labels.labels.push_back(core::grasp_from_json(j));
    rec.labels.object_ids.push_back(j.value("object_id", -1));
  }
  return rec;
}

void write_manifest(const std::string& root, const DatasetManifest& manifest) {
  fs::create_directories(root);
  json scenes = json::array();
  for (const auto& e : manifest.entries)
    scenes.push_back({{"id", e.id}, {"split", e.split}});
  std::ofstream(fs::path(root) / "manifest.json") << json{{"scenes", scenes}}.dump(2);
}

DatasetManifest read_manifest(const std::string& root) {
  const json j = json::parse(read_file(fs::path(root) / "manifest.json", "<manifest>"));
  DatasetManifest m;
  for (const auto& e : j.at("scenes"))
    m.entries.push_back({e.at("id").get<std::string>(), e.at("split").get<std::string>()});
  return m;
}

std::vector<SceneRecord> read_split(const std::string& root, const std::string& split) {
  const DatasetManifest m = read_manifest(root);
  std::vector<SceneRecord> out;
  for (const auto& e : m.entries)
    if (e.split == split) out.push_back(read_scene_record(root, e.id, e.split));
  if (out.empty())
    throw std::runtime_error("dataset: split '" + split + "' is empty in " + root);
  return out;
}

}  // namespace dgcan::scene
