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

#include "ulab/channel.hpp"

#include "ulab/linalg.hpp"
#include "ulab/tensor.hpp"

namespace ulab {

void ChannelDesc::validate(double tol) const {
  const std::size_t d = d_in * d_anc;
  if (d_out * d_env != d) throw DimensionError("channel: out*env must equal in*anc");
  if (static_cast<std::size_t>(dilation.rows()) != d || static_cast<std::size_t>(dilation.cols()) != d)
    throw DimensionError("channel: dilation has the wrong shape");
  if (anc_state >= d_anc) throw DimensionError("channel: ancilla basis state out of range");
  if (!is_unitary(dilation, tol)) throw NumericalError("channel: dilation is not unitary");
}

Mat ChannelDesc::isometry() const {
  Mat v(d_out * d_env, d_in);
  for (std::size_t i = 0; i < d_in; ++i) v.col(i) = dilation.col(i * d_anc + anc_state);
  return v;
}

std::vector<Mat> ChannelDesc::kraus() const {
  Mat v = isometry();
  std::vector<Mat> out;
  for (std::size_t e = 0; e < d_env; ++e) {
    Mat k(d_out, d_in);
    for (std::size_t o = 0; o < d_out; ++o) k.row(o) = v.row(o * d_env + e);
    out.push_back(k);
  }
  return out;
}

ChannelDesc ChannelDesc::identity(std::size_t d) { return from_unitary(Mat::Identity(d, d)); }

ChannelDesc ChannelDesc::from_unitary(const Mat& u) {
  ChannelDesc ch;
  ch.dilation = u;
  ch.d_in = ch.d_out = static_cast<std::size_t>(u.rows());
  ch.validate();
  return ch;
}

ChannelDesc ChannelDesc::from_isometry(const Mat& v, std::size_t d_out, std::size_t d_env) {
  const auto d_in = static_cast<std::size_t>(v.cols());
  const std::size_t d = d_out * d_env;
  if (static_cast<std::size_t>(v.rows()) != d) throw DimensionError("isometry rows must equal out*env");
  if (d % d_in != 0) throw DimensionError("input dimension must divide out*env");
  if ((v.adjoint() * v - Mat::Identity(d_in, d_in)).cwiseAbs().maxCoeff() > 1e-9)
    throw NumericalError("matrix is not an isometry");
  ChannelDesc ch;
  ch.d_in = d_in;
  ch.d_anc = d / d_in;
  ch.d_out = d_out;
  ch.d_env = d_env;
  Mat comp = complement_basis(v);
  ch.dilation.resize(d, d);
  std::size_t next = 0;
  for (std::size_t i = 0; i < d_in; ++i)
    for (std::size_t a = 0; a < ch.d_anc; ++a)
      ch.dilation.col(i * ch.d_anc + a) = a == 0 ? Vec(v.col(i)) : Vec(comp.col(next++));
  ch.validate();
  return ch;
}

ChannelDesc ChannelDesc::depolarizing(std::size_t d) {
  // Swap the input into the environment and emit half of a maximally
  // entangled ancilla pair.
  const std::size_t anc = d * d;
  Mat v = Mat::Zero(d * anc, d);
  const double r = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      // out = k, env = (k, i): |k>_out |k>|i>_env
      v(k * (d * d) + k * d + i, i) = r;
    }
  return from_isometry(v, d, d * d);
}

Mat run_channel(const ChannelDesc& ch, const Mat& rho) {
  if (static_cast<std::size_t>(rho.rows()) != ch.d_in) throw DimensionError("channel input dimension mismatch");
  // Sum over environment slices instead of forming V rho V^dagger.
  const Mat v = ch.isometry();
  const Mat w = v * rho;
  const auto d_out = static_cast<Eigen::Index>(ch.d_out), d_env = static_cast<Eigen::Index>(ch.d_env);
  Mat out = Mat::Zero(d_out, d_out);
  for (Eigen::Index e = 0; e < d_env; ++e) {
    const auto rows = Eigen::seqN(e, d_out, d_env);
    const Mat we = w(rows, Eigen::all), ve = v(rows, Eigen::all);
    out.noalias() += we * ve.adjoint();
  }
  return out;
}

ChannelDesc complementary(const ChannelDesc& ch) {
  const std::size_t d = ch.d_out * ch.d_env;
  ChannelDesc out = ch;
  out.dilation.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t o = 0; o < ch.d_out; ++o)
    for (std::size_t e = 0; e < ch.d_env; ++e)
      out.dilation.row(static_cast<Eigen::Index>(e * ch.d_out + o)) =
          ch.dilation.row(static_cast<Eigen::Index>(o * ch.d_env + e));
  std::swap(out.d_out, out.d_env);
  return out;
}

Mat run_channel_on(const ChannelDesc& ch, const Mat& rho, const Dims& dims, std::size_t reg) {
  if (dims.at(reg) != ch.d_in) throw DimensionError("channel input dimension mismatch");
  Dims nd;
  Mat big = apply_isometry(ch.isometry(), rho, dims, reg, {ch.d_out, ch.d_env}, &nd);
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < nd.size(); ++k)
    if (k != reg + 1) keep.push_back(k);
  return partial_trace(big, nd, keep);
}

ChannelDesc compose(const ChannelDesc& first, const ChannelDesc& second) {
  if (first.d_out != second.d_in) throw DimensionError("compose: dimension mismatch");
  // V2 V1 : in -> out2 (x) env2 (x) env1
  Mat v1 = first.isometry();
  Dims nd;
  Mat v(second.d_out * second.d_env * first.d_env, first.d_in);
  for (std::size_t i = 0; i < first.d_in; ++i)
    v.col(i) = apply_isometry(second.isometry(), Vec(v1.col(i)), {first.d_out, first.d_env}, 0,
                              {second.d_out, second.d_env}, &nd);
  return ChannelDesc::from_isometry(v, second.d_out, second.d_env * first.d_env);
}

}  // namespace ulab
