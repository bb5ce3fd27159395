// SPDX-License-Identifier: Apache-2.0

#include "segeval/cli.hpp"

#include <filesystem>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "segeval/cost_pareto.hpp"
#include "segeval/error.hpp"
#include "segeval/io.hpp"
#include "segeval/reporting.hpp"
#include "segeval/scorers.hpp"
#include "segeval/synth.hpp"

namespace segeval::cli {

namespace fs = std::filesystem;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse:
      return kExitParse;
    case ErrorKind::validation:
      return kExitValidation;
    case ErrorKind::coverage:
      return kExitCoverage;
    case ErrorKind::io:
      return kExitIo;
  }
  return kExitInternal;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

// ─── validate ────────────────────────────────────────────────

int cmd_validate(const std::vector<std::string>& paths, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    auto listed = list_seg_files(p);
    if (listed.empty()) throw IoError(fmt::format("{}: no SEG files found", p));
    files.insert(files.end(), listed.begin(), listed.end());
  }

  bool parse_failed = false;
  bool invalid = false;
  std::map<std::string, std::string> owner;
  for (const auto& file : files) {
    std::vector<std::string> warnings;
    SemanticErrorGraph seg;
    try {
      seg = parse_seg(read_text_file(file), file.string(), &warnings);
    } catch (const ParseError& e) {
      err << "error: " << e.what() << '\n';
      parse_failed = true;
      continue;
    }
    auto report = validate_seg(seg);
    print_warnings(warnings, err);
    for (const auto& w : report.warnings) err << "warning: " << file.string() << ": " << w << '\n';
    for (const auto& v : report.violations) {
      out << "INVALID " << file.string() << " (seg " << seg.id << "): " << v.message << '\n';
      invalid = true;
    }
    auto [it, inserted] = owner.emplace(seg.id, file.string());
    if (!inserted) {
      out << "INVALID " << file.string() << ": duplicate seg id " << seg.id << " (also in "
          << it->second << ")\n";
      invalid = true;
    } else if (report.ok()) {
      out << "ok " << file.string() << " (seg " << seg.id << ")\n";
    }
  }
  if (parse_failed) return kExitParse;
  if (invalid) return kExitValidation;
  out << files.size() << " SEG file(s) valid\n";
  return kExitOk;
}

// ─── score ───────────────────────────────────────────────────

struct ScoreArgs {
  std::string segs;
  std::string scores;
  std::vector<std::string> metrics;
  std::string tie_mode = "midrank";
  std::string pair_mode = "per-walk";
  std::string subset;
  std::string correlation = "spearman";
  std::size_t bins = 10;
  bool raw = false;
  std::string out;
};

int cmd_score(const ScoreArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  auto collection = load_segs(args.segs, &warnings);
  print_warnings(warnings, err);
  auto score_set = load_scores(args.scores);

  std::vector<const ScoreTable*> tables;
  if (args.metrics.empty()) {
    for (const auto& [_, table] : score_set) tables.push_back(&table);
  } else {
    std::vector<std::string> unknown;
    std::set<std::string> picked;
    for (const auto& name : args.metrics) {
      auto it = score_set.find(name);
      if (it == score_set.end()) {
        unknown.push_back(name);
      } else if (picked.insert(name).second) {
        tables.push_back(&it->second);
      }
    }
    if (!unknown.empty()) {
      throw CoverageError(fmt::format("metric(s) not present in {}: {}", args.scores,
                                      fmt::join(unknown, ", ")),
                          unknown);
    }
  }

  ReportOptions options;
  options.meta.tie_mode = *parse_tie_mode(args.tie_mode);
  options.meta.pair_mode = *parse_pair_mode(args.pair_mode);
  if (!args.subset.empty()) options.subset = parse_subset(args.subset);
  options.correlation = *parse_correlation_kind(args.correlation);
  options.histogram_bins = args.bins;

  auto bundle = build_report(collection, tables, options);
  auto written = emit_report(bundle, args.out);
  out << render_aggregate_table(bundle.aggregates, !args.raw);
  out << "wrote " << written.size() << " file(s) to " << args.out << '\n';
  return kExitOk;
}

// ─── accumulate / embed ──────────────────────────────────────

int cmd_accumulate(const std::string& mode, const std::string& questions,
                   const std::string& answers, const std::string& metric, const std::string& out_file,
                   std::ostream& out) {
  auto graphs = load_question_graphs(questions);
  auto table = load_answers(answers);
  auto accumulation = mode == "tifa" ? AccumulationMode::tifa : AccumulationMode::dsg;
  auto scores = accumulate_scores(graphs, table, accumulation, metric);
  write_text_file(out_file, serialize_score_csv({&scores}));
  out << "wrote " << scores.size() << " " << scores.metric() << " score(s) to " << out_file << '\n';
  return kExitOk;
}

int cmd_embed(const std::string& text_file, const std::string& image_file,
              const std::string& metric, const std::string& out_file, std::ostream& out) {
  auto texts = load_embeddings(text_file, EmbeddingKind::text);
  auto images = load_embeddings(image_file, EmbeddingKind::image);
  auto scores = embedding_scores(texts, images, metric);
  write_text_file(out_file, serialize_score_csv({&scores}));
  out << "wrote " << scores.size() << " " << scores.metric() << " score(s) to " << out_file << '\n';
  return kExitOk;
}

// ─── pareto ──────────────────────────────────────────────────

int cmd_pareto(const std::string& report, const std::string& costs, const std::string& basis_text,
               const std::string& subset_text, const std::string& out_file, std::ostream& out) {
  auto basis = *parse_basis(basis_text);
  std::optional<Subset> subset;
  if (!subset_text.empty()) subset = parse_subset(subset_text);
  auto quality = read_report_quality(report, basis, subset);
  if (quality.empty()) throw CoverageError(fmt::format("{}: no metrics to rank", report), {});
  auto models = load_cost_models(costs);

  std::vector<QualityCostPoint> points;
  std::vector<std::string> missing;
  for (const auto& [metric, q] : quality) {
    auto it = models.find(metric);
    if (it == models.end()) {
      missing.push_back(metric);
      continue;
    }
    points.push_back({metric, q, estimate_flops(it->second)});
  }
  if (!missing.empty()) {
    throw CoverageError(fmt::format("no cost model for metric(s): {}", fmt::join(missing, ", ")),
                        missing);
  }

  auto frontier = pareto_frontier(points);
  std::string csv = "metric,quality,cost_flops\n";
  out << fmt::format("Pareto frontier ({} of {} metrics, basis {}):\n", frontier.size(),
                     points.size(), basis_text);
  for (const auto& p : frontier) {
    out << fmt::format("  {:<24} {:>10} {:>12} FLOPs\n", p.metric, format_number(p.quality),
                       format_number(p.cost_flops));
    csv += fmt::format("{},{},{}\n", csv_escape(p.metric), format_number(p.quality),
                       format_number(p.cost_flops));
  }
  write_text_file(out_file, csv);
  return kExitOk;
}

// ─── synth ───────────────────────────────────────────────────

int cmd_synth(const SynthConfig& config, const std::string& out_dir, std::ostream& out) {
  auto collection = generate_segs(config);
  const fs::path root(out_dir);
  write_segs(collection, root / "segs");

  const auto noise_seed = derive_seed(config.seed, 0x5EED);
  auto perfect = oracle_scores(collection, {OracleKind::perfect});
  auto inverse = oracle_scores(collection, {OracleKind::inverse});
  auto constant = oracle_scores(collection, {OracleKind::constant});
  auto noisy = oracle_scores(collection, {OracleKind::noisy, config.noise_sigma, noise_seed});
  write_text_file(root / "scores.csv", serialize_score_csv({&perfect, &inverse, &constant, &noisy}));

  auto fixture = generate_answer_fixture(collection, derive_seed(config.seed, 0xA115));
  write_text_file(root / "questions.json", serialize_question_graphs(fixture.graphs));
  write_text_file(root / "answers.csv", serialize_answer_csv(fixture.answers));

  out << "wrote " << collection.size() << " SEG(s) to " << (root / "segs").string()
      << ", oracle scores to " << (root / "scores.csv").string() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Meta-evaluation of text-to-image faithfulness metrics over semantic error graphs",
               "segeval"};
  app.require_subcommand(1);
  std::function<int()> action;

  auto* validate = app.add_subcommand("validate", "Check SEG files or directories");
  std::vector<std::string> validate_paths;
  validate->add_option("paths", validate_paths, "SEG files or directories")->required();
  validate->callback([&] { action = [&] { return cmd_validate(validate_paths, out, err); }; });

  auto* score = app.add_subcommand("score", "Compute rank/sep/delta meta-metrics and reports");
  ScoreArgs score_args;
  score->add_option("--segs", score_args.segs, "SEG directory or file")->required();
  score->add_option("--scores", score_args.scores, "score CSV")->required();
  score->add_option("--metric", score_args.metrics, "metric to evaluate (repeatable; default all)");
  score->add_option("--tie-mode", score_args.tie_mode, "rank tie convention")
      ->check(CLI::IsMember({"midrank", "countbelow"}));
  score->add_option("--pair-mode", score_args.pair_mode, "adjacent node pairing")
      ->check(CLI::IsMember({"per-walk", "unique-edge"}));
  score->add_option("--subset", score_args.subset, "restrict to one subset")
      ->check(CLI::IsMember({"synth", "nat", "real"}));
  score->add_option("--correlation", score_args.correlation, "metric x metric correlation")
      ->check(CLI::IsMember({"spearman", "pearson"}));
  score->add_option("--bins", score_args.bins, "histogram bins")->check(CLI::PositiveNumber);
  score->add_flag("--raw", score_args.raw, "print raw values instead of percent");
  score->add_option("--out", score_args.out, "output directory")->required();
  score->callback([&] { action = [&] { return cmd_score(score_args, out, err); }; });

  auto* accumulate = app.add_subcommand("accumulate", "Turn VQA answers into per-image scores");
  std::string acc_mode, acc_questions, acc_answers, acc_out, acc_metric = "dsg";
  accumulate->add_option("--mode", acc_mode, "accumulation rule")
      ->required()
      ->check(CLI::IsMember({"tifa", "dsg"}));
  accumulate->add_option("--questions", acc_questions, "question graph JSON")->required();
  accumulate->add_option("--answers", acc_answers, "answer CSV")->required();
  accumulate->add_option("--metric", acc_metric, "base metric name");
  accumulate->add_option("--out", acc_out, "output score CSV")->required();
  accumulate->callback([&] {
    action = [&] {
      return cmd_accumulate(acc_mode, acc_questions, acc_answers, acc_metric, acc_out, out);
    };
  });

  auto* embed = app.add_subcommand("embed", "Score images from precomputed embeddings");
  std::string embed_text, embed_images, embed_out, embed_metric = "embedding";
  embed->add_option("--text", embed_text, "prompt embeddings, keyed by seg id")->required();
  embed->add_option("--images", embed_images, "image embeddings, keyed <seg>/<image>")->required();
  embed->add_option("--metric", embed_metric, "metric name");
  embed->add_option("--out", embed_out, "output score CSV")->required();
  embed->callback([&] {
    action = [&] { return cmd_embed(embed_text, embed_images, embed_metric, embed_out, out); };
  });

  auto* pareto = app.add_subcommand("pareto", "Cost/quality Pareto frontier");
  std::string pareto_report, pareto_costs, pareto_out, pareto_basis = "rank", pareto_subset;
  pareto->add_option("--report", pareto_report, "report.json from score")->required();
  pareto->add_option("--costs", pareto_costs, "cost model JSON")->required();
  pareto->add_option("--basis", pareto_basis, "quality axis")
      ->check(CLI::IsMember({"rank", "sep", "delta"}));
  pareto->add_option("--subset", pareto_subset, "use one subset row")
      ->check(CLI::IsMember({"synth", "nat", "real"}));
  pareto->add_option("--out", pareto_out, "frontier CSV")->required();
  pareto->callback([&] {
    action = [&] {
      return cmd_pareto(pareto_report, pareto_costs, pareto_basis, pareto_subset, pareto_out, out);
    };
  });

  auto* synth = app.add_subcommand("synth", "Generate synthetic SEGs and oracle fixtures");
  SynthConfig config;
  config.seg_count = 10;
  std::string synth_out;
  synth->add_option("--seed", config.seed, "generator seed");
  synth->add_option("--segs", config.seg_count, "number of SEGs");
  synth->add_option("--nodes-min", config.nodes_per_seg.min);
  synth->add_option("--nodes-max", config.nodes_per_seg.max);
  synth->add_option("--images-min", config.images_per_node.min);
  synth->add_option("--images-max", config.images_per_node.max);
  synth->add_option("--branch-prob", config.branch_probability);
  synth->add_option("--multi-error-prob", config.multi_error_edge_probability);
  synth->add_option("--noise-sigma", config.noise_sigma);
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->callback([&] { action = [&] { return cmd_synth(config, synth_out, out); }; });

  std::vector<std::string> argv_storage{"segeval"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace segeval::cli
