/*
 * Copyright 2026 The bbev Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bbev/io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <set>
#include <sstream>

#include "bbev/errors.h"

namespace bbev {
namespace {

using nlohmann::json;

class Writer {
 public:
  void Bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back((v >> (8 * i)) & 0xffu);
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back((v >> (8 * i)) & 0xffu);
  }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }

  std::vector<std::uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  const std::uint8_t* Take(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorKind::kMalformed, "descriptor file is truncated");
    }
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint32_t U32() {
    const std::uint8_t* p = Take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
  }
  std::uint64_t U64() {
    const std::uint8_t* p = Take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  double F64() { return std::bit_cast<double>(U64()); }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

void WriteGrid(Writer& w, const Grid& g) {
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    w.F32(static_cast<float>(g.data()[i]));
  }
}

Grid ReadGrid(Reader& r, Eigen::Index rows, Eigen::Index cols) {
  Grid g(rows, cols);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = r.F32();
  return g;
}

std::string ConfigComment(const json& snapshot) {
  return "# config: " + snapshot.dump() + "\n";
}

std::string Fixed(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

json ToJson(const PolarConfig& cfg) {
  return json{{"rings", cfg.rings},
              {"sectors", cfg.sectors},
              {"max_range", cfg.max_range},
              {"sigma_t", cfg.sigma_t},
              {"eps_bernoulli", cfg.eps_bernoulli},
              {"eps_union", cfg.eps_union},
              {"voxel", cfg.voxel},
              {"height_offset", cfg.height_offset},
              {"kernel_truncation", cfg.kernel_truncation},
              {"sigma_theta_cap", cfg.theta_cap()}};
}

PolarConfig ConfigFromJson(const json& j) {
  static const std::set<std::string> kKnown = {
      "rings",   "sectors",       "max_range",     "sigma_t",
      "eps_bernoulli", "eps_union", "voxel",       "height_offset",
      "kernel_truncation", "sigma_theta_cap"};
  if (!j.is_object()) {
    throw Error(ErrorKind::kParse, "config must be a JSON object");
  }
  PolarConfig cfg;
  try {
    for (const auto& [name, value] : j.items()) {
      if (!kKnown.contains(name)) {
        throw Error(ErrorKind::kParse, "unknown config field '" + name + "'");
      }
    }
    cfg.rings = j.value("rings", cfg.rings);
    cfg.sectors = j.value("sectors", cfg.sectors);
    cfg.max_range = j.value("max_range", cfg.max_range);
    cfg.sigma_t = j.value("sigma_t", cfg.sigma_t);
    cfg.eps_bernoulli = j.value("eps_bernoulli", cfg.eps_bernoulli);
    cfg.eps_union = j.value("eps_union", cfg.eps_union);
    cfg.voxel = j.value("voxel", cfg.voxel);
    cfg.height_offset = j.value("height_offset", cfg.height_offset);
    cfg.kernel_truncation = j.value("kernel_truncation", cfg.kernel_truncation);
    if (j.contains("sigma_theta_cap")) {
      cfg.sigma_theta_cap = j.at("sigma_theta_cap").get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("config: ") + e.what());
  }
  cfg.Validate();
  return cfg;
}

json ToJson(const MatchScore& score) {
  return json{{"delta_star", score.delta_star},
              {"cosine", score.cosine},
              {"kl_jaccard", score.kl_jaccard},
              {"similarity", score.similarity},
              {"distance", score.distance},
              {"union_cells", score.union_cells},
              {"empty_union", score.empty_union},
              {"small_union", score.small_union}};
}

json ToJson(const EvalOptions& options) {
  return json{{"d_gt", options.d_gt},
              {"exclusion", options.exclusion},
              {"top_k", options.top_k},
              {"score_mode", ToString(options.mode)},
              {"subsample_db", options.subsample_db},
              {"db_spacing", options.db_spacing}};
}

json ToJson(const EvalReport& report) {
  json records = json::array();
  for (const QueryRecord& r : report.records) {
    json rec{{"query_id", r.query_id},
             {"matched_id", nullptr},
             {"distance", r.distance},
             {"gt_positive", r.gt_positive},
             {"correct", r.correct}};
    if (r.matched_id) {
      rec["matched_id"] = *r.matched_id;
      rec["score"] = ToJson(r.score);
    }
    records.push_back(std::move(rec));
  }
  json points = json::array();
  for (const PrPoint& p : report.summary.points) {
    points.push_back({{"threshold", p.threshold},
                      {"precision", p.precision},
                      {"recall", p.recall},
                      {"f1", p.f1}});
  }
  const PrSummary& s = report.summary;
  return json{{"protocol", report.protocol},
              {"config", ToJson(report.config)},
              {"options", ToJson(report.options)},
              {"summary",
               {{"auc", s.auc},
                {"recall_at_1", s.recall_at_1},
                {"f1_max", s.f1_max},
                {"queries", s.queries},
                {"positives", s.positives},
                {"degenerate", s.degenerate}}},
              {"pr_curve", std::move(points)},
              {"records", std::move(records)}};
}

std::vector<std::uint8_t> EncodeDescriptor(const Descriptor& d) {
  const std::string snapshot = ToJson(d.config()).dump();
  Writer w;
  w.Bytes(kDescriptorMagic, sizeof(kDescriptorMagic));
  w.U32(kDescriptorVersion);
  w.U32(static_cast<std::uint32_t>(d.rings()));
  w.U32(static_cast<std::uint32_t>(d.sectors()));
  w.U32(static_cast<std::uint32_t>(snapshot.size()));
  w.F64(d.config().max_range);
  w.F64(d.config().sigma_t);
  w.Bytes(snapshot.data(), snapshot.size());
  WriteGrid(w, d.height());
  WriteGrid(w, d.mu());
  WriteGrid(w, d.sigma());
  for (Eigen::Index i = 0; i < d.key().size(); ++i) {
    w.F32(static_cast<float>(d.key()(i)));
  }
  w.Bytes(d.occupancy().data(), static_cast<std::size_t>(d.occupancy().size()));
  return w.Take();
}

Descriptor DecodeDescriptor(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (std::memcmp(r.Take(sizeof(kDescriptorMagic)), kDescriptorMagic,
                  sizeof(kDescriptorMagic)) != 0) {
    throw Error(ErrorKind::kMalformed, "not a descriptor file (bad magic)");
  }
  const std::uint32_t version = r.U32();
  if (version != kDescriptorVersion) {
    throw Error(ErrorKind::kMalformed,
                "unsupported descriptor version " + std::to_string(version));
  }
  const auto rings = static_cast<Eigen::Index>(r.U32());
  const auto sectors = static_cast<Eigen::Index>(r.U32());
  const std::uint32_t snapshot_size = r.U32();
  const double max_range = r.F64();
  const double sigma_t = r.F64();
  const auto* snapshot = reinterpret_cast<const char*>(r.Take(snapshot_size));

  PolarConfig cfg;
  try {
    cfg = ConfigFromJson(json::parse(snapshot, snapshot + snapshot_size));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformed,
                std::string("descriptor config snapshot: ") + e.what());
  }
  if (cfg.rings != rings || cfg.sectors != sectors ||
      cfg.max_range != max_range || cfg.sigma_t != sigma_t) {
    throw Error(ErrorKind::kMalformed,
                "descriptor header disagrees with its config snapshot");
  }

  Grid height = ReadGrid(r, rings, sectors);
  Grid mu = ReadGrid(r, rings, sectors);
  Grid sigma = ReadGrid(r, rings, sectors);
  Eigen::VectorXd key(2 * rings);
  for (Eigen::Index i = 0; i < key.size(); ++i) key(i) = r.F32();
  Occupancy occupancy(rings, sectors);
  std::memcpy(occupancy.data(), r.Take(static_cast<std::size_t>(rings * sectors)),
              static_cast<std::size_t>(rings * sectors));
  if (!r.AtEnd()) {
    throw Error(ErrorKind::kMalformed, "trailing bytes after descriptor");
  }
  return Descriptor(std::move(height), std::move(occupancy), std::move(mu),
                    std::move(sigma), std::move(key), cfg);
}

std::vector<std::uint8_t> ReadBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void SaveDescriptor(const std::filesystem::path& path, const Descriptor& d) {
  const auto bytes = EncodeDescriptor(d);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

Descriptor LoadDescriptor(const std::filesystem::path& path) {
  try {
    return DecodeDescriptor(ReadBytes(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void WriteManifest(const std::filesystem::path& path,
                   const std::vector<ManifestEntry>& entries,
                   const PolarConfig& cfg) {
  const std::filesystem::path base = path.parent_path();
  json frames = json::array();
  for (const ManifestEntry& e : entries) {
    const std::filesystem::path rel =
        base.empty() ? e.descriptor
                     : std::filesystem::proximate(e.descriptor, base);
    frames.push_back({{"frame_id", e.frame_id}, {"descriptor", rel.string()}});
  }
  const json manifest{{"format", "bbev-index"},
                      {"version", 1},
                      {"config", ToJson(cfg)},
                      {"frames", std::move(frames)}};
  WriteText(path, manifest.dump(2) + "\n");
}

DescriptorDatabase LoadDatabase(const std::filesystem::path& manifest_path) {
  json manifest;
  try {
    std::ifstream in(manifest_path);
    if (!in) {
      throw Error(ErrorKind::kIo, "cannot open " + manifest_path.string());
    }
    manifest = json::parse(in);
    if (manifest.at("format") != "bbev-index" || manifest.at("version") != 1) {
      throw Error(ErrorKind::kMalformed, "not a bbev-index v1 manifest");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse,
                manifest_path.string() + ": " + e.what());
  }
  const PolarConfig cfg = ConfigFromJson(manifest.at("config"));
  const std::filesystem::path base = manifest_path.parent_path();
  std::vector<Descriptor> descriptors;
  std::vector<FrameId> ids;
  for (const json& frame : manifest.at("frames")) {
    ids.push_back(frame.at("frame_id").get<FrameId>());
    descriptors.push_back(
        LoadDescriptor(base / frame.at("descriptor").get<std::string>()));
    if (!(descriptors.back().config() == cfg)) {
      throw Error(ErrorKind::kShapeMismatch,
                  "descriptor config differs from the manifest config");
    }
  }
  return DescriptorDatabase(std::move(descriptors), std::move(ids));
}

std::string PrCurveCsv(const EvalReport& report) {
  json snapshot{{"config", ToJson(report.config)},
                {"options", ToJson(report.options)},
                {"protocol", report.protocol}};
  std::string out = ConfigComment(snapshot);
  out += "threshold,precision,recall,f1\n";
  for (const PrPoint& p : report.summary.points) {
    out += Fixed(p.threshold) + "," + Fixed(p.precision) + "," +
           Fixed(p.recall) + "," + Fixed(p.f1) + "\n";
  }
  return out;
}

std::string SummaryCsv(const EvalReport& report) {
  json snapshot{{"config", ToJson(report.config)},
                {"options", ToJson(report.options)},
                {"protocol", report.protocol}};
  const PrSummary& s = report.summary;
  std::string out = ConfigComment(snapshot);
  out += "protocol,queries,positives,auc,recall_at_1,f1_max,degenerate\n";
  out += report.protocol + "," + std::to_string(s.queries) + "," +
         std::to_string(s.positives) + "," + Fixed(s.auc) + "," +
         Fixed(s.recall_at_1) + "," + Fixed(s.f1_max) + "," +
         (s.degenerate ? "1" : "0") + "\n";
  return out;
}

std::string RobustnessCsv(const std::vector<RobustnessRow>& rows,
                          const json& snapshot) {
  std::string out = ConfigComment(snapshot);
  out += "offset_m,sigma_t,mean_jkl,std_jkl\n";
  for (const RobustnessRow& row : rows) {
    out += Fixed(row.offset) + "," + Fixed(row.sigma_t) + "," +
           Fixed(row.mean_jkl) + "," + Fixed(row.std_jkl) + "\n";
  }
  return out;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace bbev
