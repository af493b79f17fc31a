#pragma once

// Procedural image-caption dataset with exact ground truth. Scenes are 1-3
// colored shapes on a solid background, rendered deterministically at 32x32
// with integer geometry and no anti-aliasing. Splits are made disjoint by a
// hash partition of the scene record, so no evaluation scene can ever appear
// in a training manifest.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dedi/common.hpp"
#include "dedi/vocab.hpp"

namespace dedi {

constexpr int kImageSize = 32;
constexpr int kImageChannels = 3;

enum class ShapeKind : uint8_t { Circle = 0, Square = 1, Triangle = 2 };
enum class SizeKind : uint8_t { Small = 0, Medium = 1, Large = 2 };
enum class PositionKind : uint8_t {
  Left = 0,
  Right = 1,
  Top = 2,
  Bottom = 3,
  Center = 4
};

extern const std::array<std::string, 3> kShapeNames;
extern const std::array<std::string, 8> kColorNames;
extern const std::array<std::string, 3> kSizeNames;
extern const std::array<std::string, 5> kPositionNames;
extern const std::array<int, 4> kBackgroundColors;  // indices into kColorNames

struct SceneObject {
  ShapeKind shape;
  int color;  // index into kColorNames
  SizeKind size;
  PositionKind pos;

  bool operator==(const SceneObject&) const = default;
};

struct SceneSpec {
  int background;  // index into kColorNames, one of kBackgroundColors
  std::vector<SceneObject> objects;  // sorted by position index

  bool operator==(const SceneSpec&) const = default;
  uint64_t hash() const;
};

struct DatasetOptions {
  int max_objects = 3;
  std::vector<int> allowed_colors;  // empty = all 8

  bool operator==(const DatasetOptions&) const = default;
};

struct DatasetManifest {
  uint64_t seed = 0;
  std::string split;
  DatasetOptions options;
  std::vector<SceneSpec> records;

  std::string to_jsonl() const;
  static DatasetManifest from_jsonl(const std::string& text);
  void save(const std::string& path) const;  // path.jsonl (+ .meta.json)
  static DatasetManifest load(const std::string& path);
};

// Uniform over valid configurations; collisions are rejection-resampled.
SceneSpec sample_scene(Rng& rng, const DatasetOptions& opts = {});

// [32,32,3] row-major HWC, values in [-1,1].
std::vector<float> render(const SceneSpec& scene);

// "<bg> background <size> <color> <shape> <position> [and ...]",
// objects in position-index order.
std::string caption(const SceneSpec& scene);

// Deterministic manifest; records are drawn from the split's hash partition
// of the scene space (train 12/16, val 2/16, test 2/16 of records).
DatasetManifest generate_dataset(int64_t count, uint64_t seed,
                                 const std::string& split,
                                 const DatasetOptions& opts = {});

// Stable content hash of a manifest (over its serialized records).
uint64_t manifest_hash(const DatasetManifest& m);

}  // namespace dedi
