#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dyntex/io/json_util.hpp"
#include "dyntex/synth/corpus.hpp"
#include "dyntex/synth/generator.hpp"

namespace dyntex::io {

inline constexpr int kManifestSchemaVersion = 1;

struct StudyRecord {
  std::string study_id;
  LesionClass label = LesionClass::HCC;
  synth::Split split = synth::Split::Train;
  std::uint64_t seed = 0;
  std::array<std::string, 4> phase_files;  // NC, A, V, D headers, relative to the manifest
  std::string mask_file;                   // per-slice lesion masks as one volume
  std::vector<synth::GroundTruthLesion> lesions;

  /// Primary boxes; the synthetic corpus has exactly one per study.
  std::vector<detect::Box3D> primary_boxes() const;
};

struct Manifest {
  std::uint64_t seed = 0;
  synth::ClassMix mix = synth::kDefaultMix;
  std::vector<StudyRecord> studies;
};

Json manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const Json& j);

void write_manifest(const fs::path& path, const Manifest& m);
/// Reads and validates; with `check_files` every referenced header must exist.
Manifest read_manifest(const fs::path& path, bool check_files = true);

std::array<Volume, 4> load_phases(const fs::path& root, const StudyRecord& s);
Volume load_mask(const fs::path& root, const StudyRecord& s);

const StudyRecord& find_study(const Manifest& m, const std::string& study_id);

}  // namespace dyntex::io
