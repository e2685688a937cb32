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

#ifndef BBEV_IO_H_
#define BBEV_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "bbev/config.h"
#include "bbev/descriptor.h"
#include "bbev/eval.h"
#include "bbev/retrieval.h"
#include "bbev/synth.h"

namespace bbev {

nlohmann::json ToJson(const PolarConfig& cfg);
// Missing fields keep their defaults; unknown fields are rejected.
PolarConfig ConfigFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const MatchScore& score);
nlohmann::json ToJson(const EvalOptions& options);
nlohmann::json ToJson(const EvalReport& report);

// Descriptor container, version 1. All integers and floats little-endian.
//
//   offset  bytes  field
//   0       8      magic "BBEVDESC"
//   8       4      u32 version (1)
//   12      4      u32 rings R
//   16      4      u32 sectors S
//   20      4      u32 length L of the JSON config snapshot
//   24      8      f64 max_range
//   32      8      f64 sigma_t
//   40      L      config snapshot, UTF-8 JSON
//   40+L    4RS    f32 height grid, row-major
//           4RS    f32 mu
//           4RS    f32 sigma
//           8R     f32 key (2R values)
//           RS     u8 occupancy
//
// Row spectra and the Frobenius norm are recomputed on load. Values are
// narrowed to float32, so Encode(Decode(bytes)) == bytes.
inline constexpr char kDescriptorMagic[8] = {'B', 'B', 'E', 'V',
                                             'D', 'E', 'S', 'C'};
inline constexpr std::uint32_t kDescriptorVersion = 1;

std::vector<std::uint8_t> EncodeDescriptor(const Descriptor& d);
Descriptor DecodeDescriptor(const std::vector<std::uint8_t>& bytes);
void SaveDescriptor(const std::filesystem::path& path, const Descriptor& d);
Descriptor LoadDescriptor(const std::filesystem::path& path);

// Index manifest: descriptor files plus frame ids; the KD-tree is rebuilt
// on load. Descriptor paths are stored relative to the manifest.
struct ManifestEntry {
  FrameId frame_id = 0;
  std::filesystem::path descriptor;
};
void WriteManifest(const std::filesystem::path& path,
                   const std::vector<ManifestEntry>& entries,
                   const PolarConfig& cfg);
DescriptorDatabase LoadDatabase(const std::filesystem::path& manifest);

// "# config: {...}" followed by the CSV body.
std::string PrCurveCsv(const EvalReport& report);
std::string SummaryCsv(const EvalReport& report);
std::string RobustnessCsv(const std::vector<RobustnessRow>& rows,
                          const nlohmann::json& snapshot);

void WriteText(const std::filesystem::path& path, const std::string& text);
std::vector<std::uint8_t> ReadBytes(const std::filesystem::path& path);

}  // namespace bbev

#endif  // BBEV_IO_H_
