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

#include "tonguegraft/train_config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tonguegraft/error.hpp"

namespace tonguegraft {

void TrainConfig::validate() const {
  if (!(warmup_steps > 0 && warmup_steps < total_steps)) {
    throw Error(ErrorCode::kInvalidArgument, "warmup_steps must satisfy 0 < warmup < total_steps (got " +
                                                 std::to_string(warmup_steps) + " / " +
                                                 std::to_string(total_steps) + ")");
  }
  if (!(final_lr_fraction > 0.0 && final_lr_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "final_lr_fraction must be in (0, 1]");
  }
  if (!(max_lr > 0.0) || !std::isfinite(max_lr)) {
    throw Error(ErrorCode::kInvalidArgument, "max_lr must be positive");
  }
  if (batch_sequences == 0 || context_length == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch size and context length must be positive");
  }
}

double lr_at(const TrainConfig& cfg, std::uint64_t step) {
  cfg.validate();
  if (step > cfg.total_steps) {
    throw Error(ErrorCode::kInvalidArgument, "step " + std::to_string(step) +
                                                 " is outside [0, " +
                                                 std::to_string(cfg.total_steps) + "]");
  }
  if (step <= cfg.warmup_steps) {
    const double t = static_cast<double>(step) / static_cast<double>(cfg.warmup_steps);
    return cfg.warmup_start_lr + (cfg.max_lr - cfg.warmup_start_lr) * t;
  }
  const double min_lr = cfg.max_lr * cfg.final_lr_fraction;
  const double progress = static_cast<double>(step - cfg.warmup_steps) /
                          static_cast<double>(cfg.total_steps - cfg.warmup_steps);
  return min_lr + (cfg.max_lr - min_lr) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

std::uint64_t steps_for_tokens(const TrainConfig& cfg, std::uint64_t tokens) {
  const std::uint64_t per = cfg.tokens_per_batch();
  return (tokens + per - 1) / per;
}

void ArchSpec::validate() const {
  if (d_model == 0 || n_heads == 0 || n_layers == 0 || context == 0 || vocab_size == 0 ||
      ffn_hidden == 0 || n_kv_heads == 0) {
    throw Error(ErrorCode::kInvalidArgument, "architecture fields must be positive");
  }
  if (d_model % n_heads != 0) {
    throw Error(ErrorCode::kInvalidArgument, "d_model " + std::to_string(d_model) +
                                                 " is not divisible by n_heads " +
                                                 std::to_string(n_heads));
  }
  if (n_heads % n_kv_heads != 0 || (!gqa && n_kv_heads != n_heads)) {
    throw Error(ErrorCode::kInvalidArgument, "n_kv_heads must divide n_heads, and equal it without GQA");
  }
}

std::uint64_t ArchSpec::parameter_count() const {
  const std::uint64_t h = d_model;
  const std::uint64_t kv = n_kv_heads * (d_model / n_heads);
  const std::uint64_t attention = h * (h + 2 * kv) + h * h;
  const std::uint64_t mlp = 3 * h * ffn_hidden;
  const std::uint64_t layer = attention + mlp + 2 * h;
  return n_layers * layer + h + 2 * vocab_size * h;
}

ArchSpec arch_preset(std::string_view name) {
  constexpr std::uint64_t kVocab = 43176;
  if (name == "7b") return {"7b", 7'000'000'000, 4096, 32, 32, 4096, false, 32, 11008, kVocab};
  if (name == "13b") return {"13b", 13'000'000'000, 5120, 40, 40, 4096, false, 40, 13824, kVocab};
  if (name == "70b") return {"70b", 70'000'000'000, 8192, 64, 80, 4096, true, 8, 28672, kVocab};
  throw Error(ErrorCode::kInvalidArgument,
              "unknown architecture '" + std::string(name) + "' (expected 7b, 13b or 70b)");
}

std::vector<std::string> arch_preset_names() { return {"7b", "13b", "70b"}; }

FlopsEstimate estimate_flops(const ArchSpec& arch, double tokens) {
  arch.validate();
  if (!(tokens > 0.0)) throw Error(ErrorCode::kInvalidArgument, "token count must be positive");
  const double h = static_cast<double>(arch.d_model);
  const double h_kv = static_cast<double>(arch.n_kv_heads * (arch.d_model / arch.n_heads));
  const double s = static_cast<double>(arch.context);
  const double f = static_cast<double>(arch.ffn_hidden);
  const double v = static_cast<double>(arch.vocab_size);
  const double layer = 2.0 * h * (h + 2.0 * h_kv) + 2.0 * h * h + 4.0 * s * h + 6.0 * h * f;
  FlopsEstimate e;
  e.per_token_forward = static_cast<double>(arch.n_layers) * layer + 2.0 * h * v;
  e.per_token_training = 3.0 * e.per_token_forward;
  e.total = e.per_token_training * tokens;
  e.six_n_t = 6.0 * static_cast<double>(arch.parameter_count()) * tokens;
  return e;
}

std::string LayoutReport::summary() const {
  std::ostringstream os;
  os << (consistent ? "PASS" : "FAIL") << " layout_gpus=" << layout_gpus
     << " available_gpus=" << available_gpus;
  for (const auto& n : notes) os << "\n  " << n;
  return os.str();
}

LayoutReport validate_layout(std::uint64_t dp, std::uint64_t tp, std::uint64_t pp,
                             std::uint64_t nodes, std::uint64_t gpus_per_node) {
  if (dp == 0 || tp == 0 || pp == 0 || nodes == 0 || gpus_per_node == 0) {
    throw Error(ErrorCode::kInvalidArgument, "layout dimensions must be positive");
  }
  LayoutReport r;
  r.layout_gpus = dp * tp * pp;
  r.available_gpus = nodes * gpus_per_node;
  r.consistent = r.layout_gpus == r.available_gpus;
  if (!r.consistent) {
    r.notes.push_back("DP*TP*PP = " + std::to_string(dp) + "*" + std::to_string(tp) + "*" +
                      std::to_string(pp) + " = " + std::to_string(r.layout_gpus) +
                      " does not match nodes*gpus = " + std::to_string(nodes) + "*" +
                      std::to_string(gpus_per_node) + " = " + std::to_string(r.available_gpus));
    return r;
  }
  if (tp <= gpus_per_node && gpus_per_node % tp == 0) {
    const std::uint64_t dp_in_node = std::min(dp, gpus_per_node / tp);
    r.notes.push_back("tensor-parallel groups of " + std::to_string(tp) +
                      " fit inside one node (NVLink)");
    r.notes.push_back(std::to_string(dp_in_node) + " data-parallel replica(s) per node, " +
                      std::to_string(gpus_per_node / tp) + " TP group(s) per node");
  } else {
    r.notes.push_back("warning: tensor-parallel group of " + std::to_string(tp) +
                      " spans nodes; TP traffic will cross the interconnect");
  }
  const std::uint64_t stages_per_node =
      std::max<std::uint64_t>(1, gpus_per_node / std::min(gpus_per_node, tp * dp));
  r.notes.push_back(std::to_string(pp) + " pipeline stage(s) placed across nodes (" +
                    std::to_string(stages_per_node) + " per node)");
  return r;
}

double throughput_efficiency(double tflops_measured, double peak_tflops) {
  if (!(tflops_measured > 0.0) || !(peak_tflops > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "TFLOPS values must be positive");
  }
  return tflops_measured / peak_tflops;
}

}  // namespace tonguegraft
