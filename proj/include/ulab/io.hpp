// Copyright 2026 The uhlmann-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON encodings. Matrices are {"rows", "cols", "data"} with row-major
// interleaved (re, im) doubles; vectors are flat [re, im, re, im, ...] lists.

#ifndef ULAB_IO_HPP
#define ULAB_IO_HPP

#include <filesystem>

#include <json.hpp>

#include "ulab/channel.hpp"
#include "ulab/circuit.hpp"
#include "ulab/core.hpp"

namespace ulab {

using json = nlohmann::ordered_json;

class ParseError : public Error {
 public:
  using Error::Error;
};

json to_json(const Mat& m);
json to_json(const Vec& v);
json to_json(const Circuit& c);
json to_json(const ChannelDesc& ch);

Mat mat_from_json(const json& j);
/// Accepts [re, im, ...] or [[re, im], ...].
Vec vec_from_json(const json& j);
Circuit circuit_from_json(const json& j);
ChannelDesc channel_from_json(const json& j);

/// Parses text, reporting line and column on failure.
json parse_json(const std::string& text, const std::string& source = "<input>");
json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ulab

#endif  // ULAB_IO_HPP
