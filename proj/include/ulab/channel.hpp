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

#ifndef ULAB_CHANNEL_HPP
#define ULAB_CHANNEL_HPP

#include "ulab/core.hpp"

namespace ulab {

/// Stinespring form of a channel. The dilation acts on in (x) anc with the
/// ancilla prepared in |anc_state>; its output space is split as out (x) env.
struct ChannelDesc {
  Mat dilation;
  std::size_t d_in = 1;
  std::size_t d_anc = 1;
  std::size_t d_out = 1;
  std::size_t d_env = 1;
  std::size_t anc_state = 0;

  /// Checks shapes and unitarity of the dilation.
  void validate(double tol = 1e-9) const;
  /// The Stinespring isometry V: in -> out (x) env.
  Mat isometry() const;
  std::vector<Mat> kraus() const;

  static ChannelDesc identity(std::size_t d);
  static ChannelDesc from_unitary(const Mat& u);
  /// Completes an isometry in -> out (x) env to a dilation.
  static ChannelDesc from_isometry(const Mat& v, std::size_t d_out, std::size_t d_env);
  /// Fully depolarizing channel on dimension d (output id/d).
  static ChannelDesc depolarizing(std::size_t d);
};

/// Applies the channel and traces out the environment.
Mat run_channel(const ChannelDesc& ch, const Mat& rho);
/// The same dilation with the roles of out and env exchanged.
ChannelDesc complementary(const ChannelDesc& ch);
/// Applies a channel to one register of a multi-register state.
Mat run_channel_on(const ChannelDesc& ch, const Mat& rho, const Dims& dims, std::size_t reg);
/// Applies `second` after `first`.
ChannelDesc compose(const ChannelDesc& first, const ChannelDesc& second);

}  // namespace ulab

#endif  // ULAB_CHANNEL_HPP
