// finprog - command line front end: DSL parsing/execution, table
// linearization, keyphrase extraction, pretraining corpus generation,
// metric evaluation, dataset validation and the reference trainer.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finprog/corpus.hpp"
#include "finprog/dsl.hpp"
#include "finprog/equivalence.hpp"
#include "finprog/executor.hpp"
#include "finprog/keyphrase.hpp"
#include "finprog/linearize.hpp"
#include "finprog/metrics.hpp"
#include "finprog/model.hpp"
#include "finprog/pretrain.hpp"
#include "finprog/serialize.hpp"

namespace {

using finprog::detail::format_value;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::vector<std::vector<std::string>> load_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw finprog::CorpusError(finprog::CorpusErrc::FileUnreadable,
                               "cannot open table file: " + path);
  }
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    throw finprog::CorpusError(finprog::CorpusErrc::SchemaMismatch,
                               "table file is not a JSON matrix: " + path);
  }
  std::vector<std::vector<std::string>> table;
  for (const auto& row : j) {
    std::vector<std::string> cells;
    for (const auto& cell : row) {
      cells.push_back(cell.is_string() ? cell.get<std::string>() : cell.dump());
    }
    table.push_back(std::move(cells));
  }
  return table;
}

std::vector<std::string> load_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw finprog::CorpusError(finprog::CorpusErrc::FileUnreadable,
                               "cannot open file: " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

finprog::KeyphraseOptions keyphrase_options(std::size_t window, const std::string& stoplist_flag) {
  finprog::KeyphraseOptions opts;
  opts.window = window;
  std::string path = stoplist_flag;
  if (path.empty()) {
    if (const char* env = std::getenv("FINPROG_STOPLIST")) path = env;
  }
  if (!path.empty()) opts.stopwords = finprog::load_stoplist(path);
  return opts;
}

void print_value(const finprog::ExecValue& value) {
  if (value.is_number()) {
    std::cout << format_value(value.number()) << "\n";
  } else {
    std::cout << (value.yes_no() ? "yes" : "no") << "\n";
  }
}

// ---------------------------------------------------------------------------
// gen subcommands

struct GenConfig {
  std::string input;
  std::string output;
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::size_t window = 2;
  std::string stoplist;
  std::size_t jobs = 1;
};

enum class GenTask { Vir, NoisyVir, Vop, Vkm };

const char* gen_task_name(GenTask task) {
  switch (task) {
    case GenTask::Vir: return "vir";
    case GenTask::NoisyVir: return "noisy-vir";
    case GenTask::Vop: return "vop";
    case GenTask::Vkm: return "vkm";
  }
  return "?";
}

struct GenOutput {
  std::vector<nlohmann::json> records;
  std::vector<std::string> diagnostics;
};

GenOutput generate_for_example(GenTask task, const finprog::HybridExample& ex,
                               const GenConfig& cfg, const finprog::KeyphraseOptions& kp) {
  GenOutput out;
  try {
    switch (task) {
      case GenTask::Vir:
      case GenTask::NoisyVir: {
        const std::uint64_t seed = finprog::derive_seed(cfg.seed, ex.id);
        const auto sets = task == GenTask::Vir
                              ? finprog::gen_vir_sets(ex, cfg.k, seed)
                              : finprog::gen_noisy_vir_sets(ex, cfg.k, seed);
        for (const finprog::RankPair& pair : finprog::gen_vir_pairs(sets, ex.question)) {
          out.records.push_back(finprog::to_json(pair));
        }
        break;
      }
      case GenTask::Vop: {
        finprog::VopResult result = finprog::gen_vop(ex);
        for (const finprog::OperatorExample& example : result.examples) {
          out.records.push_back(finprog::to_json(example));
        }
        out.diagnostics = std::move(result.skipped);
        break;
      }
      case GenTask::Vkm: {
        const std::uint64_t seed = finprog::derive_seed(cfg.seed, ex.id);
        for (const finprog::MaskedExample& example : finprog::gen_vkm(ex, seed, kp)) {
          out.records.push_back(finprog::to_json(example));
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    out.diagnostics.push_back(std::string("skipped ") + ex.id + ": " + e.what());
  }
  return out;
}

int run_gen(GenTask task, const GenConfig& cfg) {
  finprog::LoadResult loaded = finprog::load_finqa(cfg.input);
  for (const finprog::LoadReject& reject : loaded.rejects) {
    std::cerr << "reject " << reject.id << ": " << reject.reason << "\n";
  }
  // Output order is by example id, independent of scheduling.
  std::vector<const finprog::HybridExample*> order;
  for (const finprog::HybridExample& ex : loaded.examples) order.push_back(&ex);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->id < b->id; });

  const finprog::KeyphraseOptions kp = keyphrase_options(cfg.window, cfg.stoplist);
  std::vector<GenOutput> outputs(order.size());
  const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      outputs[i] = generate_for_example(task, *order[i], cfg, kp);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < order.size(); i = next.fetch_add(1)) {
          outputs[i] = generate_for_example(task, *order[i], cfg, kp);
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
  }

  std::ofstream out(cfg.output);
  if (!out) {
    throw finprog::CorpusError(finprog::CorpusErrc::FileUnreadable,
                               "cannot write output file: " + cfg.output);
  }
  // run configuration, echoed for provenance; workers do not affect content
  nlohmann::json config{{"command", std::string("gen ") + gen_task_name(task)},
                        {"input", cfg.input},
                        {"k", cfg.k},
                        {"seed", cfg.seed},
                        {"window", cfg.window},
                        {"damping", kp.pagerank.damping},
                        {"tol", kp.pagerank.tol},
                        {"max_iter", kp.pagerank.max_iter},
                        {"noisy", task == GenTask::NoisyVir}};
  finprog::write_config_header(out, config);
  std::size_t records = 0;
  for (const GenOutput& output : outputs) {
    for (const nlohmann::json& record : output.records) {
      out << record.dump() << '\n';
      ++records;
    }
    for (const std::string& diag : output.diagnostics) std::cerr << diag << "\n";
  }
  std::cerr << "wrote " << records << " records from " << loaded.examples.size()
            << " examples to " << cfg.output << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

int run_eval(const std::string& gold_path, const std::string& pred_path, double tol,
             bool percent_equiv, bool keep_dead_steps, const std::string& report_path) {
  finprog::LoadResult loaded = finprog::load_finqa(gold_path);
  if (!loaded.rejects.empty()) {
    std::cerr << loaded.rejects.size() << " gold example(s) could not be ingested and are "
              << "excluded from scoring\n";
  }
  std::unordered_map<std::string, std::string> predictions;
  for (const std::string& line : load_lines(pred_path)) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || j.contains("_config")) continue;
    if (!j.contains("id") || !j.contains("program")) continue;
    predictions[j["id"].get<std::string>()] = j["program"].get<std::string>();
  }

  std::vector<finprog::PredictionRecord> records;
  for (const finprog::HybridExample& ex : loaded.examples) {
    finprog::PredictionRecord record;
    record.example_id = ex.id;
    record.gold_program = ex.program;
    record.gold_answer = ex.execution_answer;
    record.table = ex.ctx;
    if (auto it = predictions.find(ex.id); it != predictions.end()) {
      try {
        record.predicted = finprog::parse_program(it->second);
      } catch (const finprog::DslError&) {
        // unparseable predictions score zero
      }
    }
    records.push_back(std::move(record));
  }

  finprog::MetricOptions opts;
  opts.tol = tol;
  opts.percent_equiv = percent_equiv;
  opts.canon.eliminate_dead_steps = !keep_dead_steps;
  if (records.empty()) {
    std::cerr << "warning: no scorable records\n";
  }
  const finprog::EvalReport report = finprog::evaluate(records, opts);

  std::cout << "examples   " << report.n << "\n";
  std::cout << "exe acc    " << format_value(report.exe_acc * 100.0) << "%\n";
  std::cout << "prog acc   " << format_value(report.prog_acc * 100.0) << "%\n";
  nlohmann::json report_json = finprog::to_json(report);
  report_json["_config"] = {{"command", "eval"},          {"gold", gold_path},
                            {"pred", pred_path},          {"tol", tol},
                            {"percent_equiv", percent_equiv},
                            {"keep_dead_steps", keep_dead_steps}};
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) {
      throw finprog::CorpusError(finprog::CorpusErrc::FileUnreadable,
                                 "cannot write report file: " + report_path);
    }
    out << report_json.dump(2) << '\n';
  } else {
    std::cout << report_json.dump() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train-demo

int run_train_demo(const std::string& input, std::size_t k, std::uint64_t seed,
                   std::size_t steps, std::size_t batch_size, double lr, std::size_t dim,
                   std::size_t window, const std::string& metrics_path,
                   const std::string& checkpoint_path) {
  finprog::LoadResult loaded = finprog::load_finqa(input);
  finprog::KeyphraseOptions kp = keyphrase_options(window, "");

  std::vector<finprog::RankPair> vir;
  std::vector<finprog::OperatorExample> vop;
  std::vector<finprog::MaskedExample> vkm;
  for (const finprog::HybridExample& ex : loaded.examples) {
    try {
      const auto sets = finprog::gen_vir_sets(ex, k, finprog::derive_seed(seed, ex.id + "#vir"));
      for (finprog::RankPair& pair : finprog::gen_vir_pairs(sets, ex.question)) {
        vir.push_back(std::move(pair));
      }
    } catch (const finprog::PretrainError&) {
      // examples without distractors contribute no ranking pairs
    }
    finprog::VopResult vop_result = finprog::gen_vop(ex);
    for (finprog::OperatorExample& example : vop_result.examples) {
      vop.push_back(std::move(example));
    }
    for (finprog::MaskedExample& example :
         finprog::gen_vkm(ex, finprog::derive_seed(seed, ex.id + "#vkm"), kp)) {
      vkm.push_back(std::move(example));
    }
  }
  std::cout << "corpora: " << vir.size() << " ranking pairs, " << vop.size()
            << " operator examples, " << vkm.size() << " masked examples\n";

  finprog::TrainOptions opts;
  opts.dim = dim;
  opts.batch_size = batch_size;
  opts.steps = steps;
  opts.lr = lr;
  opts.seed = seed;
  finprog::TrainResult result = finprog::train_multitask(vir, vop, vkm, opts);

  std::cout << "final pair-order accuracy " << format_value(finprog::vir_pair_accuracy(
                   vir, result.encoder, result.heads)) << "\n";
  std::cout << "final operator accuracy   " << format_value(finprog::vop_accuracy(
                   vop, result.encoder, result.heads)) << "\n";
  std::cout << "final masked-token accuracy " << format_value(finprog::vkm_accuracy(
                   vkm, result.encoder, result.heads)) << "\n";

  if (!metrics_path.empty()) {
    std::ofstream out(metrics_path);
    if (!out) {
      throw finprog::CorpusError(finprog::CorpusErrc::FileUnreadable,
                                 "cannot write metrics file: " + metrics_path);
    }
    finprog::write_metrics_csv(out, result.log);
  }
  if (!checkpoint_path.empty()) {
    const nlohmann::json config{{"command", "train-demo"}, {"input", input},
                                {"k", k},                  {"seed", seed},
                                {"steps", steps},          {"batch_size", batch_size},
                                {"lr", lr},                {"dim", dim},
                                {"window", window}};
    finprog::save_checkpoint(checkpoint_path, result.encoder, result.heads, config);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// validate-dataset

int run_validate(const std::vector<std::string>& paths, const std::string& rejects_path,
                 const std::string& export_path) {
  const nlohmann::json config{{"command", "validate-dataset"}, {"files", paths}};
  std::ofstream rejects_out;
  if (!rejects_path.empty()) {
    rejects_out.open(rejects_path);
    if (!rejects_out) {
      throw finprog::CorpusError(finprog::CorpusErrc::FileUnreadable,
                                 "cannot write rejects file: " + rejects_path);
    }
    finprog::write_config_header(rejects_out, config);
  }
  std::ofstream export_out;
  if (!export_path.empty()) {
    export_out.open(export_path);
    if (!export_out) {
      throw finprog::CorpusError(finprog::CorpusErrc::FileUnreadable,
                                 "cannot write export file: " + export_path);
    }
    finprog::write_config_header(export_out, config);
  }
  for (const std::string& path : paths) {
    finprog::LoadResult loaded = finprog::load_finqa(path);
    const finprog::CorpusStats stats = finprog::corpus_stats(loaded.examples);
    std::cout << path << "\n";
    std::cout << "  records        " << loaded.total_records << "\n";
    std::cout << "  accepted       " << loaded.examples.size() << "\n";
    std::cout << "  rejected       " << loaded.rejects.size() << "\n";
    std::cout << "  mean operators " << format_value(stats.mean_operators) << "\n";
    std::cout << "  mean gold      " << format_value(stats.mean_gold) << "\n";
    std::cout << "  max operators  " << stats.max_operators << "\n";
    std::cout << "  max gold       " << stats.max_gold << "\n";
    if (rejects_out.is_open()) {
      for (const finprog::LoadReject& reject : loaded.rejects) {
        rejects_out << nlohmann::json{{"file", path}, {"id", reject.id},
                                      {"reason", reject.reason}}
                           .dump()
                    << '\n';
      }
    }
    if (export_out.is_open()) {
      for (const finprog::HybridExample& ex : loaded.examples) {
        export_out << finprog::to_json(ex).dump() << '\n';
      }
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finprog: arithmetic program DSL, evaluation metrics and "
               "pretraining-data construction for report-style numerical QA"};
  app.require_subcommand(1);

  // parse
  std::string parse_text;
  bool parse_nested = false;
  auto* cmd_parse = app.add_subcommand("parse", "parse a program and print its canonical form");
  cmd_parse->add_option("program", parse_text, "program text")->required();
  cmd_parse->add_flag("--nested", parse_nested, "print the nested form");

  // exec
  std::string exec_text;
  std::string exec_table;
  auto* cmd_exec = app.add_subcommand("exec", "evaluate a program");
  cmd_exec->add_option("program", exec_text, "program text")->required();
  cmd_exec->add_option("--table", exec_table, "JSON table matrix (row 0 = column headers)");

  // equiv
  std::string equiv_a;
  std::string equiv_b;
  bool keep_dead_steps = false;
  auto* cmd_equiv = app.add_subcommand("equiv", "decide mathematical equivalence of two programs");
  cmd_equiv->add_option("a", equiv_a, "first program")->required();
  cmd_equiv->add_option("b", equiv_b, "second program")->required();
  cmd_equiv->add_flag("--keep-dead-steps", keep_dead_steps,
                      "treat unused steps as significant");

  // linearize
  std::string lin_table;
  int lin_row = -1;
  auto* cmd_lin = app.add_subcommand("linearize", "turn table rows into evidence sentences");
  cmd_lin->add_option("--table", lin_table, "JSON table matrix")->required();
  cmd_lin->add_option("--row", lin_row, "data row index (1-based); all rows when omitted");

  // keyphrases
  std::string kp_question;
  std::string kp_evidence;
  std::string kp_table;
  std::string kp_stoplist;
  std::size_t kp_window = 2;
  auto* cmd_kp = app.add_subcommand("keyphrases", "extract variable keyphrases");
  cmd_kp->add_option("--question", kp_question, "question text");
  cmd_kp->add_option("--evidence", kp_evidence, "file with one evidence sentence per line");
  cmd_kp->add_option("--table", kp_table, "JSON table matrix for header keyphrases");
  cmd_kp->add_option("--window", kp_window, "co-occurrence window (default 2)");
  cmd_kp->add_option("--stoplist", kp_stoplist,
                     "stoplist file (overrides FINPROG_STOPLIST and the built-in list)");

  // gen
  auto* cmd_gen = app.add_subcommand("gen", "generate pretraining corpora");
  cmd_gen->require_subcommand(1);
  GenConfig gen_cfg;
  std::vector<std::pair<GenTask, CLI::App*>> gen_subs;
  for (GenTask task : {GenTask::Vir, GenTask::NoisyVir, GenTask::Vop, GenTask::Vkm}) {
    auto* sub = cmd_gen->add_subcommand(gen_task_name(task));
    sub->add_option("input", gen_cfg.input, "dataset JSON file")->required();
    sub->add_option("--output,-o", gen_cfg.output, "output JSONL file")->required();
    if (task == GenTask::Vir || task == GenTask::NoisyVir) {
      sub->add_option("--k", gen_cfg.k, "number of gold replacements (default 2)");
    }
    if (task == GenTask::Vkm) {
      sub->add_option("--window", gen_cfg.window, "co-occurrence window (default 2)");
      sub->add_option("--stoplist", gen_cfg.stoplist, "stoplist file");
    }
    sub->add_option("--seed", gen_cfg.seed, "random seed (default 0)");
    sub->add_option("--jobs", gen_cfg.jobs, "worker threads (default 1)");
    gen_subs.emplace_back(task, sub);
  }

  // eval
  std::string eval_gold;
  std::string eval_pred;
  std::string eval_report;
  double eval_tol = 1e-4;
  bool eval_percent = false;
  bool eval_keep_dead = false;
  auto* cmd_eval = app.add_subcommand("eval", "score predictions against a dataset file");
  cmd_eval->add_option("--gold", eval_gold, "dataset JSON file")->required();
  cmd_eval->add_option("--pred", eval_pred, "predictions JSONL: {\"id\", \"program\"}")
      ->required();
  cmd_eval->add_option("--tol", eval_tol, "relative tolerance (default 1e-4)");
  cmd_eval->add_flag("--percent-equiv", eval_percent, "accept x100 / /100 matches");
  cmd_eval->add_flag("--keep-dead-steps", eval_keep_dead, "treat unused steps as significant");
  cmd_eval->add_option("--report", eval_report, "write the JSON report here instead of stdout");

  // train-demo
  std::string train_input;
  std::string train_metrics;
  std::string train_checkpoint;
  std::size_t train_k = 2;
  std::uint64_t train_seed = 0;
  std::size_t train_steps = 500;
  std::size_t train_batch = 4;
  std::size_t train_dim = 32;
  std::size_t train_window = 2;
  double train_lr = 0.5;
  auto* cmd_train = app.add_subcommand(
      "train-demo", "build the three corpora and train the reference encoder");
  cmd_train->add_option("input", train_input, "dataset JSON file")->required();
  cmd_train->add_option("--k", train_k, "ranking replacements (default 2)");
  cmd_train->add_option("--seed", train_seed, "random seed (default 0)");
  cmd_train->add_option("--steps", train_steps, "update steps (default 500)");
  cmd_train->add_option("--batch-size", train_batch, "mini-batch size (default 4)");
  cmd_train->add_option("--lr", train_lr, "learning rate (default 0.5)");
  cmd_train->add_option("--dim", train_dim, "encoder dimension (default 32)");
  cmd_train->add_option("--window", train_window, "keyphrase window (default 2)");
  cmd_train->add_option("--metrics", train_metrics, "write step,task,loss,accuracy CSV here");
  cmd_train->add_option("--checkpoint", train_checkpoint, "write model checkpoint JSON here");

  // validate-dataset
  std::vector<std::string> validate_paths;
  std::string validate_rejects;
  std::string validate_export;
  auto* cmd_validate =
      app.add_subcommand("validate-dataset", "ingest dataset files and print split statistics");
  cmd_validate->add_option("files", validate_paths, "dataset JSON files")->required();
  cmd_validate->add_option("--rejects", validate_rejects, "write reject diagnostics JSONL here");
  cmd_validate->add_option("--export", validate_export, "write accepted examples JSONL here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return kExitUsage;
  }

  try {
    if (cmd_parse->parsed()) {
      const finprog::Program p = finprog::parse_program(parse_text);
      std::cout << finprog::render_program(
                       p, parse_nested ? finprog::ProgramForm::Nested
                                       : finprog::ProgramForm::Flattened)
                << "\n";
      return kExitOk;
    }
    if (cmd_exec->parsed()) {
      const finprog::Program p = finprog::parse_program(exec_text);
      if (!exec_table.empty()) {
        const finprog::TableContext ctx =
            finprog::TableContext::from_matrix(load_table_file(exec_table));
        print_value(finprog::eval_program(p, &ctx));
      } else {
        print_value(finprog::eval_program(p));
      }
      return kExitOk;
    }
    if (cmd_equiv->parsed()) {
      finprog::CanonicalizeOptions canon;
      canon.eliminate_dead_steps = !keep_dead_steps;
      const bool equal = finprog::prog_equal(finprog::parse_program(equiv_a),
                                             finprog::parse_program(equiv_b), canon);
      std::cout << (equal ? "equivalent" : "different") << "\n";
      return kExitOk;
    }
    if (cmd_lin->parsed()) {
      const auto table = load_table_file(lin_table);
      if (lin_row >= 0) {
        std::cout << finprog::linearize_row(table, static_cast<std::size_t>(lin_row)) << "\n";
      } else {
        for (std::size_t r = 1; r < table.size(); ++r) {
          std::cout << finprog::linearize_row(table, r) << "\n";
        }
      }
      return kExitOk;
    }
    if (cmd_kp->parsed()) {
      const finprog::KeyphraseOptions opts = keyphrase_options(kp_window, kp_stoplist);
      std::vector<std::string> evidence;
      if (!kp_evidence.empty()) evidence = load_lines(kp_evidence);
      std::vector<finprog::Keyphrase> phrases =
          finprog::extract_textrank_keyphrases(kp_question, evidence, opts);
      if (!kp_table.empty()) {
        for (finprog::Keyphrase& header :
             finprog::extract_header_keyphrases(load_table_file(kp_table))) {
          const std::string key = finprog::detail::phrase_key(header.tokens);
          const bool seen =
              std::any_of(phrases.begin(), phrases.end(), [&](const finprog::Keyphrase& p) {
                return finprog::detail::phrase_key(p.tokens) == key;
              });
          if (!seen) phrases.push_back(std::move(header));
        }
      }
      for (const finprog::Keyphrase& phrase : phrases) {
        std::cout << phrase.surface << "\t" << phrase.frequency << "\n";
      }
      return kExitOk;
    }
    for (const auto& [task, sub] : gen_subs) {
      if (sub->parsed()) return run_gen(task, gen_cfg);
    }
    if (cmd_eval->parsed()) {
      return run_eval(eval_gold, eval_pred, eval_tol, eval_percent, eval_keep_dead, eval_report);
    }
    if (cmd_train->parsed()) {
      return run_train_demo(train_input, train_k, train_seed, train_steps, train_batch,
                            train_lr, train_dim, train_window, train_metrics, train_checkpoint);
    }
    if (cmd_validate->parsed()) {
      return run_validate(validate_paths, validate_rejects, validate_export);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
