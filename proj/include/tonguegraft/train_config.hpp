// Copyright 2026 The Tonguegraft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tonguegraft {

struct TrainConfig {
  double max_lr = 1.0e-4;
  std::uint64_t warmup_steps = 1000;
  std::uint64_t total_steps = 23842;  // ceil(100e9 / (1024 * 4096))
  double final_lr_fraction = 1.0 / 30.0;
  double warmup_start_lr = 0.0;
  std::uint64_t batch_sequences = 1024;
  std::uint64_t context_length = 4096;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.95;
  double adam_epsilon = 1.0e-8;
  double weight_decay = 0.1;
  double grad_clip = 1.0;

  void validate() const;
  std::uint64_t tokens_per_batch() const { return batch_sequences * context_length; }
};

// Linear warmup from warmup_start_lr to max_lr over warmup_steps, then cosine
// decay reaching max_lr * final_lr_fraction exactly at total_steps.
double lr_at(const TrainConfig& cfg, std::uint64_t step);

// Steps needed to consume `tokens` at the configured batch size.
std::uint64_t steps_for_tokens(const TrainConfig& cfg, std::uint64_t tokens);

struct ArchSpec {
  std::string name;
  std::uint64_t params = 0;  // nominal, for display
  std::uint64_t d_model = 0;
  std::uint64_t n_heads = 0;
  std::uint64_t n_layers = 0;
  std::uint64_t context = 0;
  bool gqa = false;
  std::uint64_t n_kv_heads = 0;  // == n_heads without GQA
  std::uint64_t ffn_hidden = 0;  // gated MLP inner width
  std::uint64_t vocab_size = 0;

  void validate() const;
  // Exact weight count: attention, gated MLP, two RMSNorms per layer, the
  // final norm, and untied input/output embeddings.
  std::uint64_t parameter_count() const;
};

// Llama 2 shapes with the expanded 43,176-token vocabulary.
ArchSpec arch_preset(std::string_view name);  // "7b", "13b", "70b"
std::vector<std::string> arch_preset_names();

struct FlopsEstimate {
  double per_token_forward = 0.0;
  double per_token_training = 0.0;
  double total = 0.0;
  // 6 * N * T with N = parameter_count().
  double six_n_t = 0.0;
};

// Matmul FLOPs of a Llama-style decoder (no biases, SwiGLU MLP, grouped KV
// projections when gqa): per layer and token, 2*h*(h + 2*h_kv) for QKV,
// 2*h*h for the output projection, 4*s*h for scores and weighted values, and
// 6*h*f for the MLP; plus 2*h*V for logits. Training costs three forward
// passes (forward + backward at twice the cost).
FlopsEstimate estimate_flops(const ArchSpec& arch, double tokens);

struct LayoutReport {
  bool consistent = false;
  std::uint64_t layout_gpus = 0;
  std::uint64_t available_gpus = 0;
  std::vector<std::string> notes;

  std::string summary() const;
};

LayoutReport validate_layout(std::uint64_t dp, std::uint64_t tp, std::uint64_t pp,
                             std::uint64_t nodes, std::uint64_t gpus_per_node);

inline constexpr double kDefaultPeakTflops = 312.0;

double throughput_efficiency(double tflops_measured, double peak_tflops = kDefaultPeakTflops);

}  // namespace tonguegraft
