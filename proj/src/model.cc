/* Copyright 2026 The KWST Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "kwst/model.h"

#include <cmath>

#include "kwst/error.h"
#include "kwst/rng.h"

namespace kwst {

void ArchConfig::validate() const {
  if (encoder_svdf_channels.size() != 4 || decoder_svdf_channels.size() != 3)
    throw ValidationError("arch: expected 4 encoder and 3 decoder svdf layers");
  if (encoder_classes < 3) throw ValidationError("arch: encoder classes must be >= 3");
  if (svdf_kernel < 1) throw ValidationError("arch: svdf kernel must be >= 1");
  if (input_dim < 1 || encoder_hidden < 1) throw ValidationError("arch: bad layer widths");
  for (int c : encoder_svdf_channels)
    if (c < 1) throw ValidationError("arch: bad encoder channel count");
  for (int c : decoder_svdf_channels)
    if (c < 1) throw ValidationError("arch: bad decoder channel count");
}

nlohmann::json arch_to_json(const ArchConfig& arch) {
  return nlohmann::json{{"input_dim", arch.input_dim},
                        {"encoder_svdf_channels", arch.encoder_svdf_channels},
                        {"decoder_svdf_channels", arch.decoder_svdf_channels},
                        {"svdf_kernel", arch.svdf_kernel},
                        {"encoder_hidden", arch.encoder_hidden},
                        {"encoder_classes", arch.encoder_classes}};
}

ArchConfig arch_from_json(const nlohmann::json& j) {
  ArchConfig arch;
  arch.input_dim = j.at("input_dim").get<int>();
  arch.encoder_svdf_channels = j.at("encoder_svdf_channels").get<std::vector<int>>();
  arch.decoder_svdf_channels = j.at("decoder_svdf_channels").get<std::vector<int>>();
  arch.svdf_kernel = j.at("svdf_kernel").get<int>();
  arch.encoder_hidden = j.at("encoder_hidden").get<int>();
  arch.encoder_classes = j.at("encoder_classes").get<int>();
  arch.validate();
  return arch;
}

ArchConfig make_tiny_arch(int channels, int kernel, int classes) {
  ArchConfig arch;
  arch.input_dim = 5;
  arch.encoder_svdf_channels = {channels, channels, channels, channels};
  arch.decoder_svdf_channels = {channels, channels, channels};
  arch.svdf_kernel = kernel;
  arch.encoder_hidden = channels;
  arch.encoder_classes = classes;
  return arch;
}

std::vector<const Matrix*> ModelParams::tensors() const {
  std::vector<const Matrix*> out;
  for (const auto& l : encoder_svdf) {
    out.push_back(&l.feature_filters);
    out.push_back(&l.time_filters);
    out.push_back(&l.bias);
  }
  out.push_back(&encoder_proj_hidden.weight);
  out.push_back(&encoder_proj_hidden.bias);
  out.push_back(&encoder_proj_out.weight);
  out.push_back(&encoder_proj_out.bias);
  for (const auto& l : decoder_svdf) {
    out.push_back(&l.feature_filters);
    out.push_back(&l.time_filters);
    out.push_back(&l.bias);
  }
  out.push_back(&decoder_proj.weight);
  out.push_back(&decoder_proj.bias);
  return out;
}

std::vector<Matrix*> ModelParams::tensors() {
  std::vector<Matrix*> out;
  for (const Matrix* m : static_cast<const ModelParams*>(this)->tensors())
    out.push_back(const_cast<Matrix*>(m));
  return out;
}

std::size_t ModelParams::param_count() const {
  std::size_t n = 0;
  for (const Matrix* m : tensors()) n += m->size();
  return n;
}

std::uint64_t ModelParams::digest() const {
  Fnv1a h;
  for (const Matrix* m : tensors()) {
    h.update_u64(static_cast<std::uint64_t>(m->rows()));
    h.update_u64(static_cast<std::uint64_t>(m->cols()));
    h.update(m->data().data(), m->data().size() * sizeof(double));
  }
  return h.digest();
}

std::size_t ArchConfig::param_count() const {
  return make_params(*this).param_count();
}

ModelParams make_params(const ArchConfig& arch) {
  arch.validate();
  ModelParams p;
  int in = arch.input_dim;
  for (int c : arch.encoder_svdf_channels) {
    SvdfParams l;
    l.feature_filters = Matrix(c, in);
    l.time_filters = Matrix(c, arch.svdf_kernel);
    l.bias = Matrix(1, c);
    p.encoder_svdf.push_back(std::move(l));
    in = c;
  }
  p.encoder_proj_hidden.weight = Matrix(arch.encoder_hidden, in);
  p.encoder_proj_hidden.bias = Matrix(1, arch.encoder_hidden);
  p.encoder_proj_out.weight = Matrix(arch.encoder_classes, arch.encoder_hidden);
  p.encoder_proj_out.bias = Matrix(1, arch.encoder_classes);

  in = arch.encoder_classes;
  for (int c : arch.decoder_svdf_channels) {
    SvdfParams l;
    l.feature_filters = Matrix(c, in);
    l.time_filters = Matrix(c, arch.svdf_kernel);
    l.bias = Matrix(1, c);
    p.decoder_svdf.push_back(std::move(l));
    in = c;
  }
  p.decoder_proj.weight = Matrix(kDecoderClasses, in);
  p.decoder_proj.bias = Matrix(1, kDecoderClasses);
  return p;
}

ModelParams init_params(const ArchConfig& arch, std::uint64_t seed) {
  ModelParams p = make_params(arch);
  std::size_t index = 0;
  for (Matrix* m : p.tensors()) {
    const bool is_bias = m->rows() == 1;
    if (!is_bias) {
      RngStream rng(derive_key(seed, "init", index));
      const double fan_in = m->cols(), fan_out = m->rows();
      const double a = std::sqrt(6.0 / (fan_in + fan_out));
      for (double& v : m->data()) v = rng.uniform(-a, a);
    }
    ++index;
  }
  return p;
}

void accumulate(ModelParams& into, const ModelParams& grads) {
  auto dst = into.tensors();
  auto src = grads.tensors();
  if (dst.size() != src.size()) throw NumericError("accumulate: tensor count mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i]->axpy(1.0, *src[i]);
}

void scale_params(ModelParams& p, double factor) {
  for (Matrix* m : p.tensors()) m->scale(factor);
}

void sgd_step(ModelParams& params, const ModelParams& grads, double lr) {
  auto dst = params.tensors();
  auto src = grads.tensors();
  if (dst.size() != src.size()) throw NumericError("sgd: tensor count mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) sgd_step(*dst[i], *src[i], lr);
}

std::vector<double> flatten_params(const ModelParams& p) {
  std::vector<double> flat;
  flat.reserve(p.param_count());
  for (const Matrix* m : p.tensors()) flat.insert(flat.end(), m->data().begin(), m->data().end());
  return flat;
}

void unflatten_params(ModelParams& p, const std::vector<double>& flat) {
  if (flat.size() != p.param_count()) throw CorruptionError("parameter payload length mismatch");
  std::size_t off = 0;
  for (Matrix* m : p.tensors()) {
    std::copy(flat.begin() + off, flat.begin() + off + m->size(), m->data().begin());
    off += m->size();
  }
}

ModelOutput forward(const Spectrogram& spec, const ModelParams& params, const ArchConfig& arch,
                    ForwardTrace* trace) {
  arch.validate();
  if (spec.frames.cols() != arch.input_dim) throw NumericError("forward: feature width mismatch");

  ForwardTrace local;
  ForwardTrace& tr = trace ? *trace : local;
  tr.enc_inputs.clear();
  tr.enc_caches.resize(params.encoder_svdf.size());
  tr.dec_inputs.clear();
  tr.dec_caches.resize(params.decoder_svdf.size());

  Matrix h = spec.frames;
  for (std::size_t i = 0; i < params.encoder_svdf.size(); ++i) {
    tr.enc_inputs.push_back(h);
    h = svdf_forward(h, params.encoder_svdf[i], &tr.enc_caches[i]);
  }
  tr.enc_hidden_in = h;
  h = projection_forward(h, params.encoder_proj_hidden);
  tr.enc_out_in = h;
  h = projection_forward(h, params.encoder_proj_out);
  Matrix enc_probs = softmax_rows(h);
  tr.enc_probs = enc_probs;

  Matrix d = enc_probs;
  for (std::size_t i = 0; i < params.decoder_svdf.size(); ++i) {
    tr.dec_inputs.push_back(d);
    d = svdf_forward(d, params.decoder_svdf[i], &tr.dec_caches[i]);
  }
  tr.dec_proj_in = d;
  d = projection_forward(d, params.decoder_proj);
  Matrix dec_probs = softmax_rows(d);
  tr.dec_probs = dec_probs;

  return ModelOutput{std::move(enc_probs), std::move(dec_probs)};
}

Matrix decoder_forward(const Matrix& encoder_probs, const ModelParams& params,
                       const ArchConfig& arch) {
  arch.validate();
  Matrix d = encoder_probs;
  for (const auto& layer : params.decoder_svdf) d = svdf_forward(d, layer);
  d = projection_forward(d, params.decoder_proj);
  return softmax_rows(d);
}

ModelParams backward(const ModelParams& params, const ArchConfig& arch, const ForwardTrace& trace,
                     const Matrix& d_encoder_probs, const Matrix& d_decoder_probs) {
  ModelParams grads = make_params(arch);

  // Decoder head.
  Matrix d = softmax_backward_rows(trace.dec_probs, d_decoder_probs);
  {
    ProjGrads pg;
    d = projection_backward(trace.dec_proj_in, params.decoder_proj, d, &pg);
    grads.decoder_proj.weight = std::move(pg.d_weight);
    grads.decoder_proj.bias = std::move(pg.d_bias);
  }
  for (int i = static_cast<int>(params.decoder_svdf.size()) - 1; i >= 0; --i) {
    SvdfGrads sg;
    d = svdf_backward(trace.dec_inputs[i], params.decoder_svdf[i], trace.dec_caches[i], d, &sg);
    grads.decoder_svdf[i].feature_filters = std::move(sg.d_feature_filters);
    grads.decoder_svdf[i].time_filters = std::move(sg.d_time_filters);
    grads.decoder_svdf[i].bias = std::move(sg.d_bias);
  }

  // The decoder consumes encoder posteriors, so its input gradient joins the
  // encoder head's own gradient before the encoder softmax.
  Matrix d_enc_total = d;
  d_enc_total.axpy(1.0, d_encoder_probs);

  Matrix e = softmax_backward_rows(trace.enc_probs, d_enc_total);
  {
    ProjGrads pg;
    e = projection_backward(trace.enc_out_in, params.encoder_proj_out, e, &pg);
    grads.encoder_proj_out.weight = std::move(pg.d_weight);
    grads.encoder_proj_out.bias = std::move(pg.d_bias);
  }
  {
    ProjGrads pg;
    e = projection_backward(trace.enc_hidden_in, params.encoder_proj_hidden, e, &pg);
    grads.encoder_proj_hidden.weight = std::move(pg.d_weight);
    grads.encoder_proj_hidden.bias = std::move(pg.d_bias);
  }
  for (int i = static_cast<int>(params.encoder_svdf.size()) - 1; i >= 0; --i) {
    SvdfGrads sg;
    e = svdf_backward(trace.enc_inputs[i], params.encoder_svdf[i], trace.enc_caches[i], e, &sg);
    grads.encoder_svdf[i].feature_filters = std::move(sg.d_feature_filters);
    grads.encoder_svdf[i].time_filters = std::move(sg.d_time_filters);
    grads.encoder_svdf[i].bias = std::move(sg.d_bias);
  }
  return grads;
}

StreamState make_stream_state(const ModelParams& params, bool normalize_input) {
  StreamState s;
  for (const auto& l : params.encoder_svdf) s.encoder_state.push_back(make_svdf_state(l));
  for (const auto& l : params.decoder_svdf) s.decoder_state.push_back(make_svdf_state(l));
  s.normalize_input = normalize_input;
  s.feature_sum.assign(params.encoder_svdf.front().in_channels(), 0.0);
  s.frames_seen = 0;
  return s;
}

void reset(StreamState& state) {
  for (auto& s : state.encoder_state) s.memory.fill(0.0);
  for (auto& s : state.decoder_state) s.memory.fill(0.0);
  std::fill(state.feature_sum.begin(), state.feature_sum.end(), 0.0);
  state.frames_seen = 0;
}

void stream_step(const std::vector<double>& frame, StreamState& state, const ModelParams& params,
                 const ArchConfig& arch, std::vector<double>* encoder_dist,
                 std::vector<double>* decoder_dist) {
  if (static_cast<int>(frame.size()) != arch.input_dim)
    throw NumericError("stream_step: frame width mismatch");

  Matrix h(1, arch.input_dim);
  if (state.normalize_input) {
    state.frames_seen += 1;
    for (int i = 0; i < arch.input_dim; ++i) {
      state.feature_sum[i] += frame[i];
      h(0, i) = frame[i] - state.feature_sum[i] / static_cast<double>(state.frames_seen);
    }
  } else {
    for (int i = 0; i < arch.input_dim; ++i) h(0, i) = frame[i];
  }

  for (std::size_t i = 0; i < params.encoder_svdf.size(); ++i)
    h = svdf_forward(h, params.encoder_svdf[i], nullptr, &state.encoder_state[i]);
  h = projection_forward(h, params.encoder_proj_hidden);
  h = projection_forward(h, params.encoder_proj_out);
  h = softmax_rows(h);
  if (encoder_dist) encoder_dist->assign(h.row(0), h.row(0) + h.cols());

  for (std::size_t i = 0; i < params.decoder_svdf.size(); ++i)
    h = svdf_forward(h, params.decoder_svdf[i], nullptr, &state.decoder_state[i]);
  h = projection_forward(h, params.decoder_proj);
  h = softmax_rows(h);
  if (decoder_dist) decoder_dist->assign(h.row(0), h.row(0) + h.cols());
}

}  // namespace kwst
