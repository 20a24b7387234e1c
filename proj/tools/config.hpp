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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tonguegraft/corpus.hpp"
#include "tonguegraft/mixture.hpp"
#include "tonguegraft/train_config.hpp"

namespace tonguegraft::cli {

// Bad invocation or configuration; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// The pipeline configuration document (JSON). Sections are optional; each
// subcommand reads the fields it needs and flags take precedence.
//
//   seed                      sampling seed
//   vocab.{corpus,size,sample_records,out}
//   expand.{base,trained,out_model,out_addition}
//   embeddings.{base,addition,out}
//   mixture.{total_tokens,model,out,sources[{id,weight,path,format,token_cap}]}
//   parallel.{path,format,mode,model,out}
//   pack.{context_length,model,out,separator_id}
//   train.{max_lr,warmup_steps,total_steps,final_lr_fraction,warmup_start_lr,
//          batch_sequences,context_length}
class Config {
 public:
  Config() = default;
  static Config load(const std::filesystem::path& path);
  static Config parse(std::string text, std::filesystem::path base_dir = {});

  bool empty() const { return doc_.is_null(); }
  const std::string& raw() const { return raw_; }
  const nlohmann::json* find(std::string_view dotted) const;

  std::optional<std::string> string(std::string_view dotted) const;
  std::optional<std::uint64_t> uint(std::string_view dotted) const;
  std::optional<double> number(std::string_view dotted) const;

  // Flag value if given, else the config field, relative paths resolved
  // against the config file's directory. Throws UsageError naming the field
  // (and flag) when neither is set or, with must_exist, when the file is
  // missing.
  std::string path(const std::optional<std::string>& flag, std::string_view field,
                   std::string_view flag_name, bool must_exist) const;
  // Relative paths in the config are relative to the config file.
  std::string resolve(const std::string& path) const;
  std::optional<std::string> optional_path(const std::optional<std::string>& flag,
                                           std::string_view field, bool must_exist) const;

 private:
  std::string raw_;
  nlohmann::json doc_;
  std::filesystem::path base_dir_;
};

struct MixtureSourceFiles {
  std::string path;
  DocumentFormat format = DocumentFormat::kLines;
};

// The `mixture` section: the spec itself plus where each source lives.
MixtureSpec mixture_spec(const Config& config, std::vector<MixtureSourceFiles>* files,
                         std::optional<std::uint64_t> seed_override);

// The `train` section over the built-in defaults.
TrainConfig train_config(const Config& config);

}  // namespace tonguegraft::cli
