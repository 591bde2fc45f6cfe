// Deterministic report serialization. Every emitter builds the document by
// hand with a fixed field order and a fixed "%.6g" float rendering, so a
// repeated run with the same flags produces a byte-identical file. Wall
// times are deliberately not serialized.
#pragma once

#include <string>
#include <vector>

#include "softrank/bench.hpp"
#include "softrank/metrics.hpp"

namespace softrank {

// "%.6g" rendering shared by all emitters ("null" for non-finite values).
std::string fmt_num(double x);

std::string ablation_report_json(const AblationReport& r);
std::string ablation_report_csv(const AblationReport& r);
std::string metric_report_json(const nlg::MetricReport& r);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// JSONL corpus loader: one {"id", "hypothesis", "references"} object per
// line. Malformed lines raise SchemaError with the 1-based line number; an
// empty corpus raises ParameterError.
std::vector<nlg::CorpusPair> load_corpus_jsonl(const std::string& path);

// load_corpus_jsonl + evaluate_corpus.
nlg::MetricReport eval_metrics_file(const std::string& path);

}  // namespace softrank
