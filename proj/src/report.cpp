#include "softrank/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "softrank/errors.hpp"

namespace softrank {
namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

void join_nums(std::ostringstream& os, const std::vector<double>& xs) {
  os << "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ", ";
    os << fmt_num(xs[i]);
  }
  os << "]";
}

const char* optimizer_name(Optimizer o) {
  return o == Optimizer::AdaptiveMoment ? "adaptive-moment" : "plain-gradient-descent";
}

void emit_margin_check(std::ostringstream& os, const MarginCheck& mc) {
  os << "{\"name\": \"" << json_escape(mc.name) << "\", \"delta\": " << fmt_num(mc.value)
     << ", \"required\": " << fmt_num(mc.required)
     << ", \"passed\": " << (mc.passed ? "true" : "false") << "}";
}

}  // namespace

std::string fmt_num(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string ablation_report_json(const AblationReport& r) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"schema\": \"softrank-ablation-v1\",\n";

  const auto& t = r.task_cfg;
  os << "  \"task\": {\n";
  os << "    \"n_views\": " << t.n_views << ",\n";
  os << "    \"d_v\": " << t.d_v << ",\n";
  os << "    \"d_t\": " << t.d_t << ",\n";
  os << "    \"d_e\": " << t.d_e << ",\n";
  os << "    \"n_concepts\": " << t.n_concepts << ",\n";
  os << "    \"noise_sigma\": " << fmt_num(t.noise_sigma) << ",\n";
  os << "    \"distractor_sigma\": " << fmt_num(t.distractor_sigma) << ",\n";
  os << "    \"samples_train\": " << t.samples_train << ",\n";
  os << "    \"samples_eval\": " << t.samples_eval << ",\n";
  os << "    \"seed\": " << fmt_u64(t.seed) << "\n";
  os << "  },\n";

  const auto& c = r.train_cfg;
  os << "  \"train\": {\n";
  os << "    \"steps\": " << c.steps << ",\n";
  os << "    \"batch\": " << c.batch << ",\n";
  os << "    \"learning_rate\": " << fmt_num(c.learning_rate) << ",\n";
  os << "    \"optimizer\": \"" << optimizer_name(c.optimizer) << "\",\n";
  os << "    \"seed\": " << fmt_u64(c.seed) << "\n";
  os << "  },\n";

  os << "  \"seeds\": [";
  for (std::size_t i = 0; i < r.seeds.size(); ++i) {
    if (i) os << ", ";
    os << fmt_u64(r.seeds[i]);
  }
  os << "],\n";

  os << "  \"strategies\": [\n";
  for (std::size_t k = 0; k < r.strategies.size(); ++k) {
    const StrategyOutcome& s = r.strategies[k];
    os << "    {\n";
    os << "      \"name\": \"" << strategy_name(s.kind) << "\",\n";
    os << "      \"trained\": " << (s.trained ? "true" : "false") << ",\n";
    os << "      \"error\": \"" << json_escape(s.error) << "\",\n";
    os << "      \"accuracy\": " << fmt_num(s.accuracy) << ",\n";
    os << "      \"top_view_hit_rate\": " << fmt_num(s.top_view_hit_rate) << ",\n";
    os << "      \"per_seed_accuracy\": ";
    join_nums(os, s.per_seed_accuracy);
    os << ",\n";
    os << "      \"per_seed_hit_rate\": ";
    join_nums(os, s.per_seed_hit_rate);
    os << ",\n";
    os << "      \"flops\": {\n";
    os << "        \"additions\": " << s.flops.additions << ",\n";
    os << "        \"multiplications\": " << s.flops.multiplications << ",\n";
    os << "        \"exponentials\": " << s.flops.exponentials << ",\n";
    os << "        \"comparisons\": " << s.flops.comparisons << ",\n";
    os << "        \"divisions\": " << s.flops.divisions << ",\n";
    os << "        \"total\": " << s.flops.total() << "\n";
    os << "      }\n";
    os << "    }" << (k + 1 < r.strategies.size() ? "," : "") << "\n";
  }
  os << "  ],\n";

  const auto& a = r.assertions;
  os << "  \"assertions\": {\n";
  os << "    \"guided_vs_uniform\": [";
  for (std::size_t i = 0; i < a.guided_vs_uniform.size(); ++i) {
    if (i) os << ", ";
    emit_margin_check(os, a.guided_vs_uniform[i]);
  }
  os << "],\n";
  os << "    \"softsort_vs_hardtop1\": ";
  if (a.has_softsort_vs_hard) {
    emit_margin_check(os, a.softsort_vs_hard);
  } else {
    os << "null";
  }
  os << ",\n";
  os << "    \"all_passed\": " << (a.all_passed ? "true" : "false") << "\n";
  os << "  }\n";
  os << "}\n";
  return os.str();
}

std::string ablation_report_csv(const AblationReport& r) {
  std::ostringstream os;
  os << "strategy,trained,accuracy,top_view_hit_rate,flops.additions,flops.multiplications,"
        "flops.exponentials,flops.comparisons,flops.divisions,flops.total\n";
  for (const StrategyOutcome& s : r.strategies) {
    os << strategy_name(s.kind) << "," << (s.trained ? 1 : 0) << "," << fmt_num(s.accuracy)
       << "," << fmt_num(s.top_view_hit_rate) << "," << s.flops.additions << ","
       << s.flops.multiplications << "," << s.flops.exponentials << "," << s.flops.comparisons
       << "," << s.flops.divisions << "," << s.flops.total() << "\n";
  }
  return os.str();
}

std::string metric_report_json(const nlg::MetricReport& r) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"schema\": \"softrank-metrics-v1\",\n";
  os << "  \"corpus\": {\n";
  for (int n = 0; n < 4; ++n)
    os << "    \"bleu_" << (n + 1) << "\": " << fmt_num(r.bleu[n]) << ",\n";
  os << "    \"meteor\": " << fmt_num(r.meteor) << ",\n";
  os << "    \"rouge_l\": " << fmt_num(r.rouge_l) << ",\n";
  os << "    \"cider\": " << fmt_num(r.cider) << ",\n";
  os << "    \"degenerate_corpus\": " << (r.degenerate_corpus ? "true" : "false") << ",\n";
  os << "    \"references_dropped\": " << (r.references_dropped ? "true" : "false") << "\n";
  os << "  },\n";
  os << "  \"per_sentence\": [\n";
  for (std::size_t i = 0; i < r.per_sentence.size(); ++i) {
    const auto& s = r.per_sentence[i];
    os << "    {\"id\": \"" << json_escape(s.id) << "\"";
    for (int n = 0; n < 4; ++n) os << ", \"bleu_" << (n + 1) << "\": " << fmt_num(s.bleu[n]);
    os << ", \"meteor\": " << fmt_num(s.meteor);
    os << ", \"rouge_l\": " << fmt_num(s.rouge_l);
    os << ", \"cider\": " << fmt_num(s.cider);
    os << ", \"empty_hypothesis\": " << (s.empty_hypothesis ? "true" : "false") << "}";
    os << (i + 1 < r.per_sentence.size() ? "," : "") << "\n";
  }
  os << "  ]\n";
  os << "}\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<nlg::CorpusPair> load_corpus_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);

  std::vector<nlg::CorpusPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char ch : line)
      if (ch != ' ' && ch != '\t') blank = false;
    if (blank) continue;

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(detail::msg(path, " line ", lineno, ": ", e.what()));
    }
    if (!j.is_object())
      throw SchemaError(detail::msg(path, " line ", lineno, ": expected a JSON object"));

    auto need = [&](const char* key) -> const nlohmann::json& {
      auto it = j.find(key);
      if (it == j.end())
        throw SchemaError(detail::msg(path, " line ", lineno, ": missing field '", key, "'"));
      return *it;
    };

    nlg::CorpusPair p;
    const auto& id = need("id");
    if (!id.is_string())
      throw SchemaError(detail::msg(path, " line ", lineno, ": 'id' must be a string"));
    p.id = id.get<std::string>();

    const auto& hyp = need("hypothesis");
    if (!hyp.is_string())
      throw SchemaError(detail::msg(path, " line ", lineno, ": 'hypothesis' must be a string"));
    p.hypothesis = hyp.get<std::string>();

    const auto& refs = need("references");
    if (!refs.is_array() || refs.empty())
      throw SchemaError(
          detail::msg(path, " line ", lineno, ": 'references' must be a non-empty array"));
    for (const auto& rj : refs) {
      if (!rj.is_string())
        throw SchemaError(
            detail::msg(path, " line ", lineno, ": 'references' entries must be strings"));
      p.references.push_back(rj.get<std::string>());
    }
    pairs.push_back(std::move(p));
  }
  if (pairs.empty()) throw ParameterError(path + ": no pairs in corpus");
  return pairs;
}

nlg::MetricReport eval_metrics_file(const std::string& path) {
  return nlg::evaluate_corpus(load_corpus_jsonl(path));
}

}  // namespace softrank
