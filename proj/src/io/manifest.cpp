#include "dyntex/io/manifest.hpp"

#include <set>

#include "dyntex/io/volume_io.hpp"

namespace dyntex::io {
namespace {

std::string_view role_name(synth::LesionRole r) { return r == synth::LesionRole::Primary ? "primary" : "non_primary"; }

synth::LesionRole parse_role(const std::string& s, const std::string& where) {
  if (s == "primary") return synth::LesionRole::Primary;
  if (s == "non_primary") return synth::LesionRole::NonPrimary;
  throw IoError(where + ": unknown lesion role '" + s + "'");
}

LesionClass parse_label(const std::string& s, const std::string& where) {
  const auto c = parse_class(s);
  if (!c) throw IoError(where + ": unknown class '" + s + "'");
  return *c;
}

}  // namespace

std::vector<detect::Box3D> StudyRecord::primary_boxes() const {
  std::vector<detect::Box3D> out;
  for (const auto& l : lesions)
    if (l.role == synth::LesionRole::Primary) out.push_back(l.box);
  return out;
}

Json manifest_to_json(const Manifest& m) {
  Json j;
  j["schema_version"] = kManifestSchemaVersion;
  j["seed"] = m.seed;
  j["mix"] = m.mix;
  Json studies = Json::array();
  for (const auto& s : m.studies) {
    Json e;
    e["study_id"] = s.study_id;
    e["label"] = std::string(class_name(s.label));
    e["split"] = std::string(synth::split_name(s.split));
    e["seed"] = s.seed;
    Json phases;
    for (std::size_t p = 0; p < 4; ++p) phases[std::string(phase_name(kContrastPhases[p]))] = s.phase_files[p];
    e["phases"] = phases;
    e["mask"] = s.mask_file;
    Json lesions = Json::array();
    for (const auto& l : s.lesions) {
      lesions.push_back({{"box", box_to_json(l.box)},
                         {"role", std::string(role_name(l.role))},
                         {"class", std::string(class_name(l.class_id))}});
    }
    e["lesions"] = lesions;
    studies.push_back(e);
  }
  j["studies"] = studies;
  return j;
}

Manifest manifest_from_json(const Json& j) {
  const std::string where = "manifest";
  const int version = get_field<int>(j, "schema_version", where);
  if (version != kManifestSchemaVersion) throw IoError(where + ": unsupported schema_version " + std::to_string(version));
  Manifest m;
  m.seed = get_field<std::uint64_t>(j, "seed", where);
  m.mix = get_field<synth::ClassMix>(j, "mix", where);
  std::set<std::string> ids;
  for (const auto& e : get_field<Json>(j, "studies", where)) {
    StudyRecord s;
    s.study_id = get_field<std::string>(e, "study_id", where);
    const std::string at = where + " study " + s.study_id;
    if (!ids.insert(s.study_id).second) throw IoError(at + ": duplicate study id");
    s.label = parse_label(get_field<std::string>(e, "label", at), at);
    try {
      s.split = synth::parse_split(get_field<std::string>(e, "split", at));
    } catch (const std::invalid_argument& ex) {
      throw IoError(at + ": " + ex.what());
    }
    s.seed = get_field<std::uint64_t>(e, "seed", at);
    const Json phases = get_field<Json>(e, "phases", at);
    if (!phases.is_object() || phases.size() != 4) throw IoError(at + ": exactly 4 phases required");
    for (std::size_t p = 0; p < 4; ++p)
      s.phase_files[p] = get_field<std::string>(phases, std::string(phase_name(kContrastPhases[p])).c_str(), at);
    s.mask_file = get_field<std::string>(e, "mask", at);
    for (const auto& l : get_field<Json>(e, "lesions", at)) {
      synth::GroundTruthLesion g;
      g.box = box_from_json(get_field<Json>(l, "box", at));
      g.role = parse_role(get_field<std::string>(l, "role", at), at);
      g.class_id = parse_label(get_field<std::string>(l, "class", at), at);
      s.lesions.push_back(g);
    }
    m.studies.push_back(std::move(s));
  }
  return m;
}

void write_manifest(const fs::path& path, const Manifest& m) { write_json(path, manifest_to_json(m)); }

Manifest read_manifest(const fs::path& path, bool check_files) {
  Manifest m;
  try {
    m = manifest_from_json(read_json(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (check_files) {
    const fs::path root = path.parent_path();
    for (const auto& s : m.studies) {
      for (const auto& f : s.phase_files)
        if (!fs::exists(root / f)) throw IoError(path.string() + ": study " + s.study_id + " references missing " + f);
      if (!fs::exists(root / s.mask_file))
        throw IoError(path.string() + ": study " + s.study_id + " references missing " + s.mask_file);
    }
  }
  return m;
}

std::array<Volume, 4> load_phases(const fs::path& root, const StudyRecord& s) {
  std::array<Volume, 4> out;
  for (std::size_t p = 0; p < 4; ++p) {
    out[p] = read_volume(root / s.phase_files[p]);
    if (out[p].phase != kContrastPhases[p])
      throw IoError(s.study_id + ": " + s.phase_files[p] + " holds phase " + std::string(phase_name(out[p].phase)));
    if (out[p].shape() != out[0].shape()) throw IoError(s.study_id + ": phases are not voxel-aligned");
  }
  return out;
}

Volume load_mask(const fs::path& root, const StudyRecord& s) { return read_volume(root / s.mask_file); }

const StudyRecord& find_study(const Manifest& m, const std::string& study_id) {
  for (const auto& s : m.studies)
    if (s.study_id == study_id) return s;
  throw IoError("manifest has no study '" + study_id + "'");
}

}  // namespace dyntex::io
