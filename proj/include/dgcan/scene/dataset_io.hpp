#pragma once

#include <string>
#include <vector>

#include "dgcan/common/image.hpp"
#include "dgcan/scene/label_pipeline.hpp"
#include "dgcan/scene/scene.hpp"

namespace dgcan::scene {

struct SceneRecord {
  std::string id;
  std::string split;  // train | seen | similar | novel
  Scene scene;
  ColorImage color;
  DepthImage depth;  // sensor-corrupted
  GraspLabelSet labels;
};

struct DatasetManifest {
  struct Entry {
    std::string id;
    std::string split;
  };
  std::vector<Entry> entries;
};

// Layout: <root>/manifest.json plus one directory per scene holding
// color.png (8-bit RGB), depth.png (16-bit grayscale, millimeters),
// scene.json and labels.jsonl.
void write_scene_record(const std::string& root, const SceneRecord& rec);
SceneRecord read_scene_record(const std::string& root, const std::string& id,
                              const std::string& split);

void write_manifest(const std::string& root, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::string& root);

std::vector<SceneRecord> read_split(const std::string& root, const std::string& split);

// Scene parameter (de)serialization, bit-exact for doubles.
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);

}  // namespace dgcan::scene
