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

#include "cli.hpp"

#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "tonguegraft/bpe_trainer.hpp"
#include "tonguegraft/corpus.hpp"
#include "tonguegraft/diagnostics.hpp"
#include "tonguegraft/embedding.hpp"
#include "tonguegraft/error.hpp"
#include "tonguegraft/mixture.hpp"
#include "tonguegraft/packing.hpp"
#include "tonguegraft/parallel_format.hpp"
#include "tonguegraft/tokenizer.hpp"
#include "tonguegraft/train_config.hpp"
#include "tonguegraft/vocab_expansion.hpp"

namespace tonguegraft::cli {
namespace {

using nlohmann::ordered_json;

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string join_ids(std::span<const TokenId> ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s.push_back(' ');
    s += std::to_string(ids[i]);
  }
  return s;
}

std::vector<TokenId> parse_ids(const std::string& text) {
  std::vector<TokenId> ids;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(tok, &used);
      if (used != tok.size() || v > 0xFFFFFFFFull) throw std::out_of_range(tok);
      ids.push_back(static_cast<TokenId>(v));
    } catch (const std::exception&) {
      throw UsageError("--ids: '" + tok + "' is not a token id");
    }
  }
  return ids;
}

std::vector<std::string> read_lines(const std::string& path) {
  auto docs = read_documents(path, DocumentFormat::kLines);
  for (auto& d : docs) {
    if (!d.empty() && d.back() == '\r') d.pop_back();
  }
  return docs;
}

// Documents of every mixture source, in config order.
std::vector<std::vector<std::string>> load_sources(const std::vector<MixtureSourceFiles>& files) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& f : files) docs.push_back(read_documents(f.path, f.format));
  return docs;
}

std::vector<TokenId> plain_ids(const TokenizerModel& tok,
                               const std::vector<std::vector<std::string>>& docs,
                               const PlanEntry& e) {
  if (e.source >= docs.size() || e.doc >= docs[e.source].size()) {
    throw Error(ErrorCode::kIdOutOfRange, "plan entry references document " +
                                              std::to_string(e.doc) + " which does not exist");
  }
  auto ids = tok.encode(docs[e.source][e.doc]);
  if (ids.size() < e.tokens) {
    throw Error(ErrorCode::kSizeMismatch,
                "plan entry expects " + std::to_string(e.tokens) + " tokens from document " +
                    std::to_string(e.doc) + " but it has " + std::to_string(ids.size()) +
                    "; was the plan made with another tokenizer?");
  }
  ids.resize(e.tokens);
  return ids;
}

// Plan source ids must line up with the config's mixture sources.
void check_plan_sources(const MixturePlan& plan, const MixtureSpec& spec) {
  if (plan.source_ids.size() != spec.sources.size()) {
    throw UsageError("plan and config 'mixture.sources' list different sources");
  }
  for (std::size_t i = 0; i < plan.source_ids.size(); ++i) {
    if (plan.source_ids[i] != spec.sources[i].id) {
      throw UsageError("plan source '" + plan.source_ids[i] +
                       "' does not match config 'mixture.sources[" + std::to_string(i) + "]'");
    }
  }
}

template <typename T>
T required(const std::optional<T>& flag, std::optional<T> from_config, const std::string& flag_name,
           const std::string& field) {
  if (flag) return *flag;
  if (from_config) return *from_config;
  throw UsageError("missing " + flag_name + " (or config field '" + field + "')");
}

struct Invocation {
  std::string name;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::function<int(const Config&, std::ostream&, std::ostream&)> handler;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-lingual vocabulary expansion and continual pre-training data toolkit",
               "tonguegraft"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Invocation inv;
  auto add = [&](const std::string& name, const std::string& description) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", inv.config_path, "Pipeline config file (JSON)");
    sub->callback([&inv, name] { inv.name = name; });
    return sub;
  };

  // train-vocab
  std::optional<std::string> tv_corpus, tv_out;
  std::optional<std::uint64_t> tv_size, tv_sample;
  bool tv_no_nfkc = false;
  {
    auto* s = add("train-vocab", "Train a BPE vocabulary on a pre-segmented corpus");
    s->add_option("--corpus", tv_corpus, "Segmented corpus: one record per line, words space-separated");
    s->add_option("--size", tv_size, "Target learned vocabulary size");
    s->add_option("--out", tv_out, "Output tokenizer file");
    s->add_option("--sample", tv_sample, "Train on a uniform sample of this many records");
    s->add_option("--seed", inv.seed, "Seed for --sample");
    s->add_flag("--no-nfkc", tv_no_nfkc, "Disable NFKC normalization");
  }

  // tokenize
  std::optional<std::string> tk_model, tk_text, tk_ids;
  bool tk_pieces = false;
  {
    auto* s = add("tokenize", "Encode text (or decode --ids) with a tokenizer");
    s->add_option("--model", tk_model, "Tokenizer file");
    s->add_option("--text", tk_text, "Text to encode");
    s->add_option("--ids", tk_ids, "Space-separated ids to decode");
    s->add_flag("--pieces", tk_pieces, "Also print token strings");
  }

  // expand
  std::optional<std::string> ex_base, ex_trained, ex_out_model, ex_out_addition;
  {
    auto* s = add("expand", "Graft a trained vocabulary onto a base tokenizer");
    s->add_option("--base", ex_base, "Base tokenizer file");
    s->add_option("--trained", ex_trained, "Trained target-language tokenizer file");
    s->add_option("--out-model", ex_out_model, "Expanded tokenizer output");
    s->add_option("--out-addition", ex_out_addition, "Addition set output");
  }

  // init-embeddings
  std::optional<std::string> ie_base, ie_addition, ie_out;
  {
    auto* s = add("init-embeddings", "Append mean-initialized rows for added tokens");
    s->add_option("--base", ie_base, "Base matrix (TGEM)");
    s->add_option("--addition", ie_addition, "Addition set file");
    s->add_option("--out", ie_out, "Expanded matrix output (TGEM)");
  }

  // check-logits
  std::optional<std::string> cl_base, cl_expanded, cl_addition;
  std::size_t cl_trials = 100;
  double cl_tolerance = 1e-6;
  {
    auto* s = add("check-logits", "Verify logit linearity of a mean-initialized output matrix");
    s->add_option("--base", cl_base, "Base output matrix (TGEM)");
    s->add_option("--expanded", cl_expanded, "Expanded output matrix (TGEM)");
    s->add_option("--addition", cl_addition, "Addition set file");
    s->add_option("--trials", cl_trials, "Random hidden vectors")->capture_default_str();
    s->add_option("--seed", inv.seed, "Seed for the hidden vectors");
    s->add_option("--tolerance", cl_tolerance, "Relative tolerance")->capture_default_str();
  }

  // mix
  std::optional<std::string> mx_model, mx_out;
  {
    auto* s = add("mix", "Plan a replay mixture from the config's mixture section");
    s->add_option("--model", mx_model, "Tokenizer used to measure document lengths");
    s->add_option("--out", mx_out, "Plan output file");
    s->add_option("--seed", inv.seed, "Override the config seed");
  }

  // format-parallel
  std::optional<std::string> fp_format, fp_mode, fp_model, fp_parallel, fp_plan, fp_out;
  {
    auto* s = add("format-parallel", "Format a parallel corpus and schedule it with plain text");
    s->add_option("--format", fp_format, "ntp or ti");
    s->add_option("--mode", fp_mode, "two-staged or mixed");
    s->add_option("--model", fp_model, "Tokenizer file");
    s->add_option("--parallel", fp_parallel, "Parallel corpus: ja<TAB>en per line");
    s->add_option("--plan", fp_plan, "Mixture plan with the plain-text documents");
    s->add_option("--out", fp_out, "Example stream output (JSON lines)");
  }

  // pack
  std::optional<std::string> pk_examples, pk_plan, pk_model, pk_out;
  std::optional<std::uint64_t> pk_context, pk_separator;
  {
    auto* s = add("pack", "Pack an example stream or a mixture plan into fixed-length sequences");
    s->add_option("--context", pk_context, "Context length (default 4096)");
    s->add_option("--examples", pk_examples, "Example stream from format-parallel");
    s->add_option("--plan", pk_plan, "Mixture plan (plain text only)");
    s->add_option("--model", pk_model, "Tokenizer file (for --plan, and the separator id)");
    s->add_option("--separator-id", pk_separator, "Document separator id (default </s>)");
    s->add_option("--out", pk_out, "Packed sequences output (JSON lines)");
  }

  // lr
  std::optional<std::uint64_t> lr_step, lr_warmup, lr_total;
  std::optional<double> lr_max, lr_final;
  {
    auto* s = add("lr", "Learning rate at a step of the warmup + cosine schedule");
    s->add_option("--step", lr_step, "Step");
    s->add_option("--max-lr", lr_max, "Peak learning rate");
    s->add_option("--warmup-steps", lr_warmup, "Warmup steps");
    s->add_option("--total-steps", lr_total, "Total steps");
    s->add_option("--final-fraction", lr_final, "Final LR as a fraction of the peak");
  }

  // flops
  std::string fl_arch = "7b";
  std::optional<double> fl_tokens;
  ArchSpec fl_custom;
  {
    auto* s = add("flops", "Estimate training FLOPs");
    s->add_option("--arch", fl_arch, "7b, 13b, 70b or custom")->capture_default_str();
    s->add_option("--tokens", fl_tokens, "Training tokens (e.g. 100e9)");
    s->add_option("--d-model", fl_custom.d_model, "custom: hidden size");
    s->add_option("--heads", fl_custom.n_heads, "custom: attention heads");
    s->add_option("--kv-heads", fl_custom.n_kv_heads, "custom: key/value heads");
    s->add_option("--layers", fl_custom.n_layers, "custom: layers");
    s->add_option("--seq", fl_custom.context, "custom: context length");
    s->add_option("--ffn", fl_custom.ffn_hidden, "custom: MLP inner width");
    s->add_option("--vocab", fl_custom.vocab_size, "custom: vocabulary size");
  }

  // layout
  std::optional<std::uint64_t> ly_dp, ly_tp, ly_pp, ly_nodes;
  std::uint64_t ly_gpus = 8;
  std::optional<std::string> ly_preset;
  std::optional<double> ly_tflops;
  double ly_peak = kDefaultPeakTflops;
  {
    auto* s = add("layout", "Validate a 3D-parallel layout against the cluster size");
    s->add_option("--dp", ly_dp, "Data-parallel size");
    s->add_option("--tp", ly_tp, "Tensor-parallel size");
    s->add_option("--pp", ly_pp, "Pipeline-parallel size");
    s->add_option("--nodes", ly_nodes, "Nodes");
    s->add_option("--gpus", ly_gpus, "GPUs per node")->capture_default_str();
    s->add_option("--preset", ly_preset, "7b, 13b or 70b: reference layout and node count");
    s->add_option("--tflops", ly_tflops, "Measured TFLOPS/GPU, to report execution efficiency");
    s->add_option("--peak", ly_peak, "Peak TFLOPS/GPU")->capture_default_str();
  }

  // report
  std::optional<std::string> rp_base, rp_expanded, rp_corpus;
  std::optional<double> rp_ratio;
  bool rp_json = false;
  {
    auto* s = add("report", "Tokenization efficiency of an expanded tokenizer");
    s->add_option("--base", rp_base, "Base tokenizer file");
    s->add_option("--expanded", rp_expanded, "Expanded tokenizer file");
    s->add_option("--corpus", rp_corpus, "One document per line");
    s->add_option("--ratio", rp_ratio, "Only convert a token ratio to an efficiency gain");
    s->add_flag("--json", rp_json, "Machine-readable output");
  }

  // diagnose-balance
  std::optional<std::string> db_pred, db_gold;
  double db_threshold = kDefaultInstabilityThreshold;
  bool db_json = false;
  {
    auto* s = add("diagnose-balance", "Majority-class imbalance of predictions vs gold labels");
    s->add_option("--pred", db_pred, "Predicted labels, one per line");
    s->add_option("--gold", db_gold, "Gold labels, one per line");
    s->add_option("--threshold", db_threshold, "Instability threshold")->capture_default_str();
    s->add_flag("--json", db_json, "Machine-readable output");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "tonguegraft: " << e.what() << "\n";
    err << "run 'tonguegraft --help' for usage\n";
    return kExitUsage;
  }

  std::map<std::string, std::function<int(const Config&)>> handlers;

  handlers["train-vocab"] = [&](const Config& cfg) {
    const std::string corpus_path = cfg.path(tv_corpus, "vocab.corpus", "--corpus", true);
    const std::uint64_t size = required(tv_size, cfg.uint("vocab.size"), "--size", "vocab.size");
    const std::string out_path = cfg.path(tv_out, "vocab.out", "--out", false);
    const auto sample = tv_sample ? tv_sample : cfg.uint("vocab.sample_records");
    SegmentedCorpus corpus = read_segmented_corpus(corpus_path);
    if (sample && *sample > 0) {
      const auto seed = inv.seed ? inv.seed : cfg.uint("seed");
      if (!seed) throw UsageError("--sample requires --seed (or config field 'seed')");
      corpus = sample_records(corpus, *sample, *seed);
    }
    const auto model = train_bpe(corpus, size, BpeTrainOptions{!tv_no_nfkc, true});
    model.save(out_path);
    out << "records " << corpus.records.size() << "\n"
        << "learned_tokens " << model.size() - reserved_tokens().size() << "\n"
        << "merges " << model.merges().size() << "\n"
        << "vocab_size " << model.size() << "\n";
    return kExitOk;
  };

  handlers["tokenize"] = [&](const Config& cfg) {
    const auto model = TokenizerModel::load(cfg.path(tk_model, "tokenize.model", "--model", true));
    if (tk_text.has_value() == tk_ids.has_value()) {
      throw UsageError("tokenize needs exactly one of --text or --ids");
    }
    if (tk_ids) {
      const auto result = model.decode(parse_ids(*tk_ids));
      out << result.text << "\n";
      if (result.replaced_invalid_bytes) {
        err << "warning: ill-formed UTF-8 byte tokens replaced with U+FFFD\n";
      }
      return kExitOk;
    }
    const auto ids = model.encode(*tk_text);
    out << join_ids(ids) << "\n";
    if (tk_pieces) {
      for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? " " : "") << model.piece(ids[i]);
      out << "\n";
    }
    return kExitOk;
  };

  handlers["expand"] = [&](const Config& cfg) {
    const auto base = TokenizerModel::load(cfg.path(ex_base, "expand.base", "--base", true));
    const auto trained =
        TokenizerModel::load(cfg.path(ex_trained, "expand.trained", "--trained", true));
    const std::string model_out = cfg.path(ex_out_model, "expand.out_model", "--out-model", false);
    const std::string add_out =
        cfg.path(ex_out_addition, "expand.out_addition", "--out-addition", false);
    AdditionStats stats;
    const AdditionSet addition = build_addition(trained, base, &stats);
    const TokenizerModel expanded = merge_vocabularies(base, addition);
    expanded.save(model_out);
    addition.save(add_out);
    out << "candidates " << stats.candidates << "\n"
        << "dropped_in_base " << stats.in_base << "\n"
        << "dropped_single_byte " << stats.single_byte << "\n"
        << "dropped_empty_after_escape " << stats.empty_after_escape << "\n"
        << "dropped_duplicates " << stats.duplicates << "\n"
        << "dropped_unreachable " << stats.unreachable << "\n"
        << "dropped_truncated " << stats.truncated << "\n"
        << "base_size " << base.size() << "\n"
        << "addition_size " << addition.size() << "\n"
        << "expanded_size " << expanded.size() << "\n";
    return kExitOk;
  };

  handlers["init-embeddings"] = [&](const Config& cfg) {
    const auto base = read_matrix(cfg.path(ie_base, "embeddings.base", "--base", true));
    const auto addition =
        AdditionSet::load(cfg.path(ie_addition, "embeddings.addition", "--addition", true));
    const std::string out_path = cfg.path(ie_out, "embeddings.out", "--out", false);
    const auto expanded = mean_init(base, addition);
    write_matrix(expanded, out_path);
    out << "rows " << expanded.rows() << "\n" << "cols " << expanded.cols() << "\n"
        << "added_rows " << addition.size() << "\n";
    return kExitOk;
  };

  handlers["check-logits"] = [&](const Config& cfg) {
    const auto base = read_matrix(cfg.path(cl_base, "check.base", "--base", true));
    const auto expanded = read_matrix(cfg.path(cl_expanded, "check.expanded", "--expanded", true));
    const auto addition =
        AdditionSet::load(cfg.path(cl_addition, "check.addition", "--addition", true));
    const auto seed = inv.seed ? inv.seed : cfg.uint("seed");
    if (!seed) throw UsageError("check-logits requires --seed (or config field 'seed')");
    const auto report =
        logit_consistency_check(base, expanded, addition, {cl_trials, *seed, cl_tolerance});
    out << report.summary() << "\n";
    return report.passed ? kExitOk : kExitDomainError;
  };

  handlers["mix"] = [&](const Config& cfg) {
    if (cfg.empty()) throw UsageError("mix requires --config with a 'mixture' section");
    std::vector<MixtureSourceFiles> files;
    const MixtureSpec spec = mixture_spec(cfg, &files, inv.seed);
    const auto tok = TokenizerModel::load(cfg.path(mx_model, "mixture.model", "--model", true));
    const std::string out_path = cfg.path(mx_out, "mixture.out", "--out", false);
    std::vector<std::vector<std::uint64_t>> lengths;
    for (const auto& docs : load_sources(files)) {
      auto& l = lengths.emplace_back();
      for (const auto& d : docs) l.push_back(tok.encode(d).size());
    }
    const MixturePlan plan = plan_mixture(spec, lengths);
    write_file(out_path, plan.to_text());
    for (std::size_t i = 0; i < plan.source_ids.size(); ++i) {
      out << "budget " << plan.source_ids[i] << " " << plan.budgets[i] << "\n";
    }
    out << "entries " << plan.entries.size() << "\n";
    return kExitOk;
  };

  handlers["format-parallel"] = [&](const Config& cfg) {
    const TaskFormat format = parse_task_format(
        required(fp_format, cfg.string("parallel.format"), "--format", "parallel.format"));
    const ScheduleMode mode = parse_schedule_mode(
        required(fp_mode, cfg.string("parallel.mode"), "--mode", "parallel.mode"));
    const auto tok = TokenizerModel::load(cfg.path(fp_model, "parallel.model", "--model", true));
    const auto pairs = read_parallel_tsv(cfg.path(fp_parallel, "parallel.path", "--parallel", true));
    const std::string out_path = cfg.path(fp_out, "parallel.out", "--out", false);

    std::optional<MixturePlan> plan;
    std::vector<std::vector<std::string>> docs;
    if (auto plan_path = cfg.optional_path(fp_plan, "parallel.plan", true)) {
      plan = MixturePlan::from_text(read_file(*plan_path));
      std::vector<MixtureSourceFiles> files;
      check_plan_sources(*plan, mixture_spec(cfg, &files, plan->seed));
      docs = load_sources(files);
    }
    const std::vector<PlanEntry> no_plain;
    const Schedule schedule =
        build_schedule(pairs, tok, plan ? std::span<const PlanEntry>(plan->entries) : no_plain,
                       mode, format);

    std::string lines;
    std::size_t parallel_tokens = 0;
    std::size_t plain_tokens = 0;
    for (const ScheduleItem& item : schedule.order) {
      ordered_json j;
      if (item.kind == ScheduleItem::Kind::kParallel) {
        const FormattedExample& ex = schedule.parallel[item.index];
        j["kind"] = "parallel";
        j["format"] = to_string(ex.format);
        j["direction"] = to_string(ex.direction);
        j["pair"] = ex.pair_id;
        j["ids"] = ex.token_ids;
        j["mask"] = ex.loss_mask;
        parallel_tokens += ex.token_ids.size();
      } else {
        const PlanEntry& e = schedule.plain[item.index];
        const auto ids = plain_ids(tok, docs, e);
        j["kind"] = "plain";
        j["source"] = plan->source_ids[e.source];
        j["doc"] = e.doc;
        j["ids"] = ids;
        j["mask"] = std::vector<int>(ids.size(), 1);
        plain_tokens += ids.size();
      }
      lines += j.dump();
      lines += "\n";
    }
    write_file(out_path, lines);
    out << "format " << to_string(format) << "\n"
        << "mode " << to_string(mode) << "\n"
        << "pairs " << pairs.size() << "\n"
        << "parallel_examples " << schedule.parallel.size() << "\n"
        << "parallel_tokens " << parallel_tokens << "\n"
        << "plain_documents " << schedule.plain.size() << "\n"
        << "plain_tokens " << plain_tokens << "\n";
    return kExitOk;
  };

  handlers["pack"] = [&](const Config& cfg) {
    const std::uint64_t context =
        pk_context ? *pk_context : cfg.uint("pack.context_length").value_or(4096);
    const std::string out_path = cfg.path(pk_out, "pack.out", "--out", false);
    const auto examples_path = cfg.optional_path(pk_examples, "pack.examples", true);
    const auto plan_path = cfg.optional_path(pk_plan, "pack.plan", true);
    if (examples_path.has_value() == plan_path.has_value()) {
      throw UsageError("pack needs exactly one of --examples or --plan");
    }
    std::optional<TokenizerModel> tok;
    if (auto model_path = cfg.optional_path(pk_model, "pack.model", true)) {
      tok = TokenizerModel::load(*model_path);
    }
    PackOptions options;
    options.context_length = context;
    if (pk_separator || cfg.uint("pack.separator_id")) {
      options.separator = static_cast<TokenId>(pk_separator ? *pk_separator : *cfg.uint("pack.separator_id"));
    } else if (tok) {
      const auto eos = tok->eos_id();
      if (!eos) throw UsageError("tokenizer has no </s>; pass --separator-id");
      options.separator = *eos;
    }
    options.pad = options.separator;

    SequencePacker packer(options);
    if (examples_path) {
      std::istringstream in(read_file(*examples_path));
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
          const auto j = nlohmann::json::parse(line);
          const auto ids = j.at("ids").get<std::vector<TokenId>>();
          const auto mask = j.at("mask").get<std::vector<std::uint8_t>>();
          packer.add(ids, mask);
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::kParse,
                      "examples line " + std::to_string(line_no) + ": " + e.what());
        }
      }
    } else {
      if (!tok) throw UsageError("pack --plan requires --model (or config field 'pack.model')");
      const MixturePlan plan = MixturePlan::from_text(read_file(*plan_path));
      std::vector<MixtureSourceFiles> files;
      check_plan_sources(plan, mixture_spec(cfg, &files, plan.seed));
      const auto docs = load_sources(files);
      for (const PlanEntry& e : plan.entries) {
        const auto ids = plain_ids(*tok, docs, e);
        const std::vector<std::uint8_t> mask(ids.size(), 1);
        packer.add(ids, mask);
      }
    }
    const auto sequences = packer.finish();
    const PackStats final_stats = packer.stats();
    std::string lines;
    for (const auto& seq : sequences) {
      ordered_json j;
      j["ids"] = seq.ids;
      j["mask"] = seq.mask;
      lines += j.dump();
      lines += "\n";
    }
    write_file(out_path, lines);
    out << "context_length " << context << "\n"
        << "documents " << final_stats.documents << "\n"
        << "sequences " << final_stats.sequences << "\n"
        << "used_positions " << final_stats.used_positions << "\n"
        << "separators " << final_stats.separators << "\n"
        << "padding " << final_stats.padding << "\n"
        << "split_documents " << final_stats.split_documents << "\n";
    if (final_stats.split_documents > 0) {
      err << "warning: " << final_stats.split_documents
          << " document(s) longer than the context were split\n";
    }
    return kExitOk;
  };

  handlers["lr"] = [&](const Config& cfg) {
    TrainConfig tc = train_config(cfg);
    if (lr_max) tc.max_lr = *lr_max;
    if (lr_warmup) tc.warmup_steps = *lr_warmup;
    if (lr_total) tc.total_steps = *lr_total;
    if (lr_final) tc.final_lr_fraction = *lr_final;
    if (!lr_step) throw UsageError("missing --step");
    try {
      tc.validate();
    } catch (const Error& e) {
      throw UsageError(std::string("train config: ") + e.what());
    }
    out << format_double("%.12e", lr_at(tc, *lr_step)) << "\n";
    return kExitOk;
  };

  handlers["flops"] = [&](const Config&) {
    if (!fl_tokens) throw UsageError("missing --tokens");
    ArchSpec arch;
    if (fl_arch == "custom") {
      arch = fl_custom;
      arch.name = "custom";
      if (arch.n_kv_heads == 0) arch.n_kv_heads = arch.n_heads;
      arch.gqa = arch.n_kv_heads != arch.n_heads;
      try {
        arch.validate();
      } catch (const Error& e) {
        throw UsageError(std::string("custom architecture: ") + e.what());
      }
    } else {
      try {
        arch = arch_preset(fl_arch);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }
    const FlopsEstimate est = estimate_flops(arch, *fl_tokens);
    out << "arch " << arch.name << "\n"
        << "parameters " << arch.parameter_count() << "\n"
        << "tokens " << format_double("%.6e", *fl_tokens) << "\n"
        << "flops_per_token " << format_double("%.6e", est.per_token_training) << "\n"
        << "total_flops " << format_double("%.6e", est.total) << "\n"
        << "six_n_t " << format_double("%.6e", est.six_n_t) << "\n";
    return kExitOk;
  };

  handlers["layout"] = [&](const Config&) {
    if (ly_preset) {
      struct Row {
        std::uint64_t dp, tp, pp, nodes;
        double tflops;
      };
      static const std::map<std::string, Row> kRows = {
          {"7b", {16, 2, 2, 4, 134}}, {"13b", {8, 2, 4, 8, 143}}, {"70b", {4, 8, 8, 32, 158}}};
      auto it = kRows.find(*ly_preset);
      if (it == kRows.end()) throw UsageError("--preset must be 7b, 13b or 70b");
      ly_dp = ly_dp.value_or(it->second.dp);
      ly_tp = ly_tp.value_or(it->second.tp);
      ly_pp = ly_pp.value_or(it->second.pp);
      ly_nodes = ly_nodes.value_or(it->second.nodes);
      ly_tflops = ly_tflops.value_or(it->second.tflops);
    }
    if (!ly_dp || !ly_tp || !ly_pp || !ly_nodes) {
      throw UsageError("layout needs --dp, --tp, --pp and --nodes (or --preset)");
    }
    const LayoutReport r = validate_layout(*ly_dp, *ly_tp, *ly_pp, *ly_nodes, ly_gpus);
    out << r.summary() << "\n";
    if (ly_tflops) {
      out << "execution_efficiency "
          << format_double("%.4f", throughput_efficiency(*ly_tflops, ly_peak)) << "\n";
    }
    return r.consistent ? kExitOk : kExitDomainError;
  };

  handlers["report"] = [&](const Config& cfg) {
    if (rp_ratio) {
      const double gain = efficiency_gain_from_ratio(*rp_ratio);
      if (rp_json) {
        ordered_json j;
        j["token_ratio"] = *rp_ratio;
        j["efficiency_gain"] = gain;
        out << j.dump(2) << "\n";
      } else {
        out << "token_ratio " << format_double("%.4f", *rp_ratio) << "\n"
            << "efficiency_gain " << format_double("%.4f", gain) << " ("
            << format_double("%.1f", gain * 100.0) << "%)\n";
      }
      return kExitOk;
    }
    const auto base = TokenizerModel::load(cfg.path(rp_base, "report.base", "--base", true));
    const auto expanded =
        TokenizerModel::load(cfg.path(rp_expanded, "report.expanded", "--expanded", true));
    const auto docs = read_lines(cfg.path(rp_corpus, "report.corpus", "--corpus", true));
    const EfficiencyReport r = efficiency_report(base, expanded, docs);
    out << (rp_json ? r.to_json() : r.to_text());
    return kExitOk;
  };

  handlers["diagnose-balance"] = [&](const Config& cfg) {
    auto pred = read_lines(cfg.path(db_pred, "balance.pred", "--pred", true));
    auto gold = read_lines(cfg.path(db_gold, "balance.gold", "--gold", true));
    const BalanceReport r = class_balance(pred, gold, db_threshold);
    out << (db_json ? r.to_json() : r.to_text());
    return kExitOk;
  };

  try {
    const Config cfg = inv.config_path ? Config::load(*inv.config_path) : Config{};
    std::string digest_input = cfg.raw();
    for (const auto& a : args) {
      digest_input.push_back('\0');
      digest_input += a;
    }
    std::string seed = "none";
    if (inv.seed) {
      seed = std::to_string(*inv.seed);
    } else if (auto s = cfg.uint("seed")) {
      seed = std::to_string(*s);
    }
    err << "tonguegraft " << inv.name << ": config digest fnv1a64:" << hex64(fnv1a64(digest_input))
        << " seed " << seed << "\n";
    return handlers.at(inv.name)(cfg);
  } catch (const UsageError& e) {
    err << "tonguegraft " << inv.name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "tonguegraft " << inv.name << ": error (" << to_string(e.code()) << "): " << e.what()
        << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "tonguegraft " << inv.name << ": error: " << e.what() << "\n";
    return kExitDomainError;
  }
}

}  // namespace tonguegraft::cli
