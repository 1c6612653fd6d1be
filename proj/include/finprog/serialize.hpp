#pragma once

#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "finprog/corpus.hpp"
#include "finprog/metrics.hpp"
#include "finprog/model.hpp"
#include "finprog/pretrain.hpp"

// File formats. Every generated artifact starts with a single header line
// `{"_config": {...}}` echoing the run configuration, followed by one JSON
// record per line. Readers skip lines carrying "_config".

namespace finprog {

inline void write_config_header(std::ostream& out, const nlohmann::json& config) {
  nlohmann::json line;
  line["_config"] = config;
  out << line.dump() << '\n';
}

// vir_pairs.jsonl: {"question", "higher": [sentences], "lower": [sentences],
// "levels": [u, v]}
inline nlohmann::json to_json(const RankPair& pair) {
  nlohmann::json j;
  j["question"] = pair.question;
  auto sentences = [](const IntegritySet& set) {
    std::vector<std::string> out;
    for (const EvidenceItem& item : set.evidence) out.push_back(item.sentence);
    return out;
  };
  j["higher"] = sentences(pair.higher);
  j["lower"] = sentences(pair.lower);
  j["levels"] = {pair.higher.level, pair.lower.level};
  return j;
}

// vop.jsonl: {"question", "evidence": [sentences], "spans": [[idx, begin,
// end]], "label"}
inline nlohmann::json to_json(const OperatorExample& example) {
  nlohmann::json j;
  j["question"] = example.question;
  std::vector<std::string> evidence;
  for (const EvidenceItem& item : example.evidence) evidence.push_back(item.sentence);
  j["evidence"] = evidence;
  nlohmann::json spans = nlohmann::json::array();
  for (const OperandSpan& span : example.spans) {
    spans.push_back({span.evidence_index, span.token_begin, span.token_end});
  }
  j["spans"] = spans;
  j["label"] = std::string(op_name(example.label));
  return j;
}

// vkm.jsonl: {"question", "tokens", "mask_positions", "targets"}
inline nlohmann::json to_json(const MaskedExample& example) {
  nlohmann::json j;
  j["question"] = example.question;
  j["tokens"] = example.tokens;
  std::vector<std::size_t> positions;
  std::vector<std::string> targets;
  for (const auto& [position, original] : example.targets) {
    positions.push_back(position);
    targets.push_back(original);
  }
  j["mask_positions"] = positions;
  j["targets"] = targets;
  return j;
}

// corpus export: {"question", "candidates": [{"id", "sentence", "gold"}],
// "program", "exe_ans"}
inline nlohmann::json to_json(const HybridExample& ex) {
  nlohmann::json j;
  j["id"] = ex.id;
  j["question"] = ex.question;
  nlohmann::json candidates = nlohmann::json::array();
  for (const EvidenceItem& item : ex.candidates) {
    candidates.push_back({{"id", item.id}, {"sentence", item.sentence}, {"gold", item.is_gold}});
  }
  j["candidates"] = candidates;
  j["program"] = render_program(ex.program, ProgramForm::Flattened);
  if (ex.execution_answer.is_number()) {
    j["exe_ans"] = ex.execution_answer.number();
  } else {
    j["exe_ans"] = ex.execution_answer.yes_no() ? "yes" : "no";
  }
  return j;
}

inline nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["exe_acc"] = report.exe_acc;
  j["prog_acc"] = report.prog_acc;
  j["n"] = report.n;
  j["failures"] = report.failures;
  return j;
}

// --------------------------------------------------------------------------
// Trainer artifacts

// metrics CSV: step,task,loss,accuracy
inline void write_metrics_csv(std::ostream& out, const std::vector<TrainLogRow>& log) {
  out << "step,task,loss,accuracy\n";
  for (const TrainLogRow& row : log) {
    out << row.step << ',' << row.task << ',' << detail::format_value(row.loss) << ','
        << detail::format_value(row.accuracy) << '\n';
  }
}

inline void save_checkpoint(const std::string& path, const TinyEncoder& enc,
                            const LossHeads& heads,
                            const nlohmann::json& config = nullptr) {
  nlohmann::json j;
  j["dim"] = enc.dim;
  j["vocab"] = enc.vocab.tokens;
  j["encoder_params"] = enc.params;
  j["head_params"] = heads.params;
  if (!config.is_null()) j["_config"] = config;
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write checkpoint: " + path);
  }
  out << j.dump() << '\n';
}

struct Checkpoint {
  TinyEncoder encoder;
  LossHeads heads;
};

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read checkpoint: " + path);
  }
  nlohmann::json j = nlohmann::json::parse(in);
  Checkpoint ckpt;
  Vocab vocab;
  for (const auto& token : j.at("vocab")) {
    vocab.add(token.get<std::string>());
  }
  ckpt.encoder = TinyEncoder::zeros(std::move(vocab), j.at("dim").get<std::size_t>());
  ckpt.encoder.params = j.at("encoder_params").get<std::vector<double>>();
  ckpt.heads = LossHeads::zeros(ckpt.encoder.dim, ckpt.encoder.vocab.size());
  ckpt.heads.params = j.at("head_params").get<std::vector<double>>();
  return ckpt;
}

}  // namespace finprog
