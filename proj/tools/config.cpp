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

#include "config.hpp"

#include <cstdio>

#include "tonguegraft/error.hpp"
#include "tonguegraft/tokenizer.hpp"

namespace tonguegraft::cli {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Config Config::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw UsageError("--config: file not found: " + path.string());
  }
  return parse(read_file(path), path.parent_path());
}

Config Config::parse(std::string text, std::filesystem::path base_dir) {
  Config c;
  try {
    c.doc_ = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!c.doc_.is_object()) throw UsageError("config must be a JSON object");
  c.raw_ = std::move(text);
  c.base_dir_ = std::move(base_dir);
  return c;
}

const nlohmann::json* Config::find(std::string_view dotted) const {
  if (!doc_.is_object()) return nullptr;
  const nlohmann::json* node = &doc_;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    std::size_t dot = dotted.find('.', start);
    if (dot == std::string_view::npos) dot = dotted.size();
    const std::string key(dotted.substr(start, dot - start));
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    start = dot + 1;
  }
  return node->is_null() ? nullptr : node;
}

std::optional<std::string> Config::string(std::string_view dotted) const {
  const auto* n = find(dotted);
  if (n == nullptr) return std::nullopt;
  if (!n->is_string()) throw UsageError("config field '" + std::string(dotted) + "' must be a string");
  return n->get<std::string>();
}

std::optional<std::uint64_t> Config::uint(std::string_view dotted) const {
  const auto* n = find(dotted);
  if (n == nullptr) return std::nullopt;
  if (n->is_number_unsigned()) return n->get<std::uint64_t>();
  if (n->is_number_float() && n->get<double>() >= 0.0 &&
      n->get<double>() == static_cast<double>(static_cast<std::uint64_t>(n->get<double>()))) {
    return static_cast<std::uint64_t>(n->get<double>());
  }
  throw UsageError("config field '" + std::string(dotted) + "' must be a non-negative integer");
}

std::optional<double> Config::number(std::string_view dotted) const {
  const auto* n = find(dotted);
  if (n == nullptr) return std::nullopt;
  if (!n->is_number()) throw UsageError("config field '" + std::string(dotted) + "' must be a number");
  return n->get<double>();
}

std::string Config::resolve(const std::string& path) const {
  if (base_dir_.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (base_dir_ / path).string();
}

std::optional<std::string> Config::optional_path(const std::optional<std::string>& flag,
                                                 std::string_view field, bool must_exist) const {
  std::optional<std::string> value = flag;
  bool from_config = false;
  if (!value) {
    value = string(field);
    from_config = value.has_value();
    if (from_config) value = resolve(*value);
  }
  if (value && must_exist && !std::filesystem::exists(*value)) {
    throw UsageError((from_config ? "config field '" + std::string(field) + "'"
                                  : "option for '" + std::string(field) + "'") +
                     ": file not found: " + *value);
  }
  return value;
}

std::string Config::path(const std::optional<std::string>& flag, std::string_view field,
                         std::string_view flag_name, bool must_exist) const {
  auto value = optional_path(flag, field, must_exist);
  if (!value) {
    throw UsageError("missing " + std::string(flag_name) + " (or config field '" +
                     std::string(field) + "')");
  }
  return *value;
}

namespace {

MixtureSpec parse_mixture(const Config& config, const nlohmann::json& sources,
                          std::vector<MixtureSourceFiles>* files,
                          std::optional<std::uint64_t> seed_override) {
  MixtureSpec spec;
  const auto total = config.uint("mixture.total_tokens");
  if (!total) throw UsageError("missing config field 'mixture.total_tokens'");
  spec.total_tokens = *total;
  const auto seed = seed_override ? seed_override : config.uint("seed");
  if (!seed) throw UsageError("missing config field 'seed' (mixture sampling requires a seed)");
  spec.seed = *seed;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& s = sources[i];
    const std::string where = "mixture.sources[" + std::to_string(i) + "]";
    if (!s.is_object() || !s.contains("id") || !s.contains("weight")) {
      throw UsageError("config field '" + where + "' needs 'id' and 'weight'");
    }
    MixtureSource src;
    src.id = s.at("id").get<std::string>();
    src.weight = s.at("weight").get<double>();
    if (s.contains("token_cap") && !s.at("token_cap").is_null()) {
      src.token_cap = s.at("token_cap").get<std::uint64_t>();
    }
    spec.sources.push_back(src);
    if (files != nullptr) {
      const std::string field = where + ".path";
      if (!s.contains("path") || !s.at("path").is_string()) {
        throw UsageError("missing config field '" + field + "'");
      }
      MixtureSourceFiles f;
      f.path = config.resolve(s.at("path").get<std::string>());
      if (!std::filesystem::exists(f.path)) {
        throw UsageError("config field '" + field + "': file not found: " + f.path);
      }
      const std::string fmt = s.value("format", std::string("lines"));
      if (fmt == "lines") {
        f.format = DocumentFormat::kLines;
      } else if (fmt == "records") {
        f.format = DocumentFormat::kRecords;
      } else {
        throw UsageError("config field '" + where + ".format' must be 'lines' or 'records'");
      }
      files->push_back(f);
    }
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("config section 'mixture': ") + e.what());
  }
  return spec;
}

}  // namespace

MixtureSpec mixture_spec(const Config& config, std::vector<MixtureSourceFiles>* files,
                         std::optional<std::uint64_t> seed_override) {
  const auto* sources = config.find("mixture.sources");
  if (sources == nullptr || !sources->is_array() || sources->empty()) {
    throw UsageError("missing config field 'mixture.sources'");
  }
  try {
    return parse_mixture(config, *sources, files, seed_override);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config section 'mixture': ") + e.what());
  }
}

TrainConfig train_config(const Config& config) {
  TrainConfig cfg;
  if (auto v = config.number("train.max_lr")) cfg.max_lr = *v;
  if (auto v = config.uint("train.warmup_steps")) cfg.warmup_steps = *v;
  if (auto v = config.uint("train.total_steps")) cfg.total_steps = *v;
  if (auto v = config.number("train.final_lr_fraction")) cfg.final_lr_fraction = *v;
  if (auto v = config.number("train.warmup_start_lr")) cfg.warmup_start_lr = *v;
  if (auto v = config.uint("train.batch_sequences")) cfg.batch_sequences = *v;
  if (auto v = config.uint("train.context_length")) cfg.context_length = *v;
  return cfg;
}

}  // namespace tonguegraft::cli
