// softrank command-line interface.
//
// Subcommands:
//   grad-check    finite-difference sweep over every backward pass
//   ablate        train all ranking strategies on the synthetic task
//   flops         operation-count table for the ranking strategies
//   eval-metrics  BLEU/METEOR/ROUGE-L/CIDEr over a JSONL corpus
//   demo          one fusion forward pass with weights printed
//
// Exit codes: 0 success, 1 assertion/ordering failure, 2 usage/IO error.
// SOFTRANK_SEED overrides --seed everywhere a seed is taken.
#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "softrank/bench.hpp"
#include "softrank/errors.hpp"
#include "softrank/kernels.hpp"
#include "softrank/report.hpp"
#include "softrank/rng.hpp"

namespace {

using namespace softrank;

std::optional<std::uint64_t> env_seed() {
  const char* e = std::getenv("SOFTRANK_SEED");
  if (!e || !*e) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(e, &end, 10);
  if (errno != 0 || end == e || *end != '\0')
    throw ParameterError("SOFTRANK_SEED must be a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

std::vector<StrategyKind> parse_strategies(const std::string& text) {
  if (text == "all") return all_strategies();
  std::vector<StrategyKind> kinds;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    const auto a = token.find_first_not_of(" \t");
    const auto b = token.find_last_not_of(" \t");
    if (a == std::string::npos) throw ParameterError("empty strategy name in --strategies");
    kinds.push_back(strategy_from_name(token.substr(a, b - a + 1)));
  }
  if (kinds.empty()) throw ParameterError("--strategies selected nothing");
  return kinds;
}

int cmd_grad_check(std::size_t seeds, double tol) {
  const GradSuiteReport rep = grad_check_suite(seeds, tol);
  std::printf("%-28s %7s %14s   %s\n", "group", "checks", "max rel err", "status");
  for (const auto& g : rep.groups) {
    std::printf("%-28s %7zu %14.3e   %s\n", g.name.c_str(), g.checks, g.max_rel_error,
                g.passed ? "ok" : "FAIL");
  }
  std::printf("%zu checks, worst %.3e (%s), tol %.1e -> %s\n", rep.total_checks, rep.worst,
              rep.worst_group.c_str(), rep.tol, rep.passed ? "PASS" : "FAIL");
  return rep.passed ? 0 : 1;
}

int cmd_ablate(const SyntheticTaskConfig& cfg, const TrainConfig& tcfg,
               const std::string& strategies, const std::string& out,
               const std::string& format) {
  const std::vector<StrategyKind> kinds = parse_strategies(strategies);
  const AblationReport rep = run_ablation(cfg, tcfg, kinds, 3, &std::cerr);

  std::printf("%-15s %8s %8s %10s %10s\n", "strategy", "acc", "hit", "flops", "wall s");
  for (const auto& s : rep.strategies) {
    if (s.trained) {
      std::printf("%-15s %8.4f %8.4f %10llu %10.1f\n", strategy_name(s.kind), s.accuracy,
                  s.top_view_hit_rate,
                  static_cast<unsigned long long>(s.flops.total()), s.wall_time_seconds);
    } else {
      std::printf("%-15s aborted (%s)\n", strategy_name(s.kind), s.error.c_str());
    }
  }
  for (const auto& mc : rep.assertions.guided_vs_uniform) {
    std::printf("assert %-15s - uniformpooling = %+.4f (need >= %.2f): %s\n", mc.name.c_str(),
                mc.value, mc.required, mc.passed ? "ok" : "FAIL");
  }
  if (rep.assertions.has_softsort_vs_hard) {
    const auto& mc = rep.assertions.softsort_vs_hard;
    std::printf("assert softsort - hardtop1 = %+.4f (need >= 0): %s\n", mc.value,
                mc.passed ? "ok" : "FAIL");
  }
  std::printf("assertions: %s\n", rep.assertions.all_passed ? "PASS" : "FAIL");

  if (!out.empty()) {
    const std::string doc =
        format == "csv" ? ablation_report_csv(rep) : ablation_report_json(rep);
    write_text_file(out, doc);
    std::printf("report written to %s\n", out.c_str());
  }
  return rep.assertions.all_passed ? 0 : 1;
}

int cmd_flops(std::size_t views, std::size_t sinkhorn_iters, std::size_t topk) {
  std::printf("operation counts per weight computation at n = %zu\n", views);
  std::printf("(every scalar add/sub, mul, div, exp, and comparison counts 1;\n");
  std::printf(" sorting is charged ceil(n*log2(n)) comparisons)\n");
  std::printf("%-15s %8s %8s %8s %8s %8s %10s\n", "strategy", "add", "mul", "exp", "cmp",
              "div", "total");
  std::uint64_t soft_total = 0, sink_total = 0;
  for (StrategyKind k : all_strategies()) {
    StrategyConfig c;
    c.kind = k;
    c.sinkhorn_iters = sinkhorn_iters;
    c.top_k = topk;
    const FlopCount f = flop_count(c, views);
    if (k == StrategyKind::SoftSort) soft_total = f.total();
    if (k == StrategyKind::SinkhornSort) sink_total = f.total();
    std::printf("%-15s %8llu %8llu %8llu %8llu %8llu %10llu\n", strategy_name(k),
                static_cast<unsigned long long>(f.additions),
                static_cast<unsigned long long>(f.multiplications),
                static_cast<unsigned long long>(f.exponentials),
                static_cast<unsigned long long>(f.comparisons),
                static_cast<unsigned long long>(f.divisions),
                static_cast<unsigned long long>(f.total()));
  }
  if (soft_total > 0) {
    std::printf("sinkhornsort/softsort total ratio = %.1f\n",
                static_cast<double>(sink_total) / static_cast<double>(soft_total));
  }
  return 0;
}

int cmd_eval_metrics(const std::string& input, std::string out) {
  const nlg::MetricReport rep = eval_metrics_file(input);
  if (out.empty()) out = input + ".report.json";
  write_text_file(out, metric_report_json(rep));
  std::printf("pairs: %zu\n", rep.per_sentence.size());
  for (int n = 0; n < 4; ++n) std::printf("bleu_%d:  %s\n", n + 1, fmt_num(rep.bleu[n]).c_str());
  std::printf("meteor:  %s\n", fmt_num(rep.meteor).c_str());
  std::printf("rouge_l: %s\n", fmt_num(rep.rouge_l).c_str());
  std::printf("cider:   %s\n", fmt_num(rep.cider).c_str());
  if (rep.degenerate_corpus)
    std::printf("note: single-pair corpus -> CIDEr is degenerate (all IDF = 0)\n");
  if (rep.references_dropped)
    std::printf("note: METEOR/ROUGE-L scored against the first reference only\n");
  std::printf("report written to %s\n", out.c_str());
  return 0;
}

int cmd_demo(const std::string& strategy, double tau, std::uint64_t seed) {
  SyntheticTaskConfig cfg;
  cfg.samples_train = 1;
  cfg.samples_eval = 1;
  cfg.seed = seed;
  const SyntheticTask task = generate_task(cfg);
  const Sample& sample = task.train[0];

  TgsspParams params = init_params(cfg.d_v, cfg.d_t, cfg.d_e, derive_seed(seed, 7));
  params.strategy.kind = strategy_from_name(strategy);
  params.strategy.tau = tau;
  params.strategy.top_k = std::min<std::size_t>(params.strategy.top_k, cfg.n_views);
  params.strategy.validate(cfg.n_views);

  const FusionOutput out = fuse(sample.views, sample.query, params);
  std::printf("kernel: %s\n", kernels::active_kernel_name().c_str());
  std::printf("strategy: %s  tau: %s  seed: %llu\n", strategy_name(params.strategy.kind),
              fmt_num(tau).c_str(), static_cast<unsigned long long>(seed));
  std::printf("concept label: %zu  relevant view: %zu\n", sample.label, sample.relevant_view);
  std::printf("%-6s %12s %12s\n", "view", "score", "weight");
  double wsum = 0.0;
  for (std::size_t i = 0; i < out.weights.len(); ++i) {
    std::printf("%-6zu %12.6f %12.6f\n", i, out.scores[i], out.weights[i]);
    wsum += out.weights[i];
  }
  std::printf("weight sum: %.6f\n", wsum);
  std::printf("fused[0..7]:");
  for (std::size_t i = 0; i < 8 && i < out.fused.len(); ++i)
    std::printf(" %s", fmt_num(out.fused[i]).c_str());
  std::printf("\n");
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"text-guided ranking fusion: strategies, gradients, metrics, ablations"};
  app.require_subcommand(1);

  auto* gc = app.add_subcommand("grad-check", "finite-difference check of every backward pass");
  std::size_t gc_seeds = 20;
  double gc_tol = 1e-4;
  gc->add_option("--seeds", gc_seeds, "random points per group")->capture_default_str();
  gc->add_option("--tol", gc_tol, "max relative error accepted")->capture_default_str();

  auto* ab = app.add_subcommand("ablate", "train every strategy on the synthetic task");
  SyntheticTaskConfig cfg;
  TrainConfig tcfg;
  std::uint64_t ab_seed = 0;
  std::string ab_strategies = "all";
  std::string ab_out;
  std::string ab_format = "json";
  ab->add_option("--views", cfg.n_views, "views per sample")->capture_default_str();
  ab->add_option("--dim-v", cfg.d_v, "view embedding dimension")->capture_default_str();
  ab->add_option("--dim-t", cfg.d_t, "query embedding dimension")->capture_default_str();
  ab->add_option("--dim-e", cfg.d_e, "shared embedding dimension")->capture_default_str();
  ab->add_option("--concepts", cfg.n_concepts, "number of concepts")->capture_default_str();
  ab->add_option("--steps", tcfg.steps, "training steps")->capture_default_str();
  ab->add_option("--seed", ab_seed, "base seed (SOFTRANK_SEED overrides)")
      ->capture_default_str();
  ab->add_option("--strategies", ab_strategies, "'all' or comma-separated names")
      ->capture_default_str();
  ab->add_option("--out", ab_out, "write the report to this path");
  ab->add_option("--format", ab_format, "report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  auto* fl = app.add_subcommand("flops", "operation-count table for all strategies");
  std::size_t fl_views = 6, fl_iters = 50, fl_topk = 3;
  fl->add_option("--views", fl_views, "score vector length")->capture_default_str();
  fl->add_option("--sinkhorn-iters", fl_iters, "sinkhorn iterations")->capture_default_str();
  fl->add_option("--topk", fl_topk, "top-k cut")->capture_default_str();

  auto* ev = app.add_subcommand("eval-metrics", "score a JSONL hypothesis/reference corpus");
  std::string ev_input, ev_out;
  ev->add_option("--input", ev_input, "JSONL corpus path")
      ->required()
      ->check(CLI::ExistingFile);
  ev->add_option("--out", ev_out, "report path (default: <input>.report.json)");

  auto* dm = app.add_subcommand("demo", "print one fusion forward pass");
  std::string dm_strategy = "softsort";
  double dm_tau = 1.0;
  dm->add_option("--strategy", dm_strategy, "ranking strategy")->capture_default_str();
  dm->add_option("--tau", dm_tau, "temperature")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::optional<std::uint64_t> seed_override = env_seed();

  if (*gc) return cmd_grad_check(gc_seeds, gc_tol);
  if (*ab) {
    const std::uint64_t seed = seed_override.value_or(ab_seed);
    cfg.seed = seed;
    tcfg.seed = seed;
    return cmd_ablate(cfg, tcfg, ab_strategies, ab_out, ab_format);
  }
  if (*fl) return cmd_flops(fl_views, fl_iters, fl_topk);
  if (*ev) return cmd_eval_metrics(ev_input, ev_out);
  if (*dm) return cmd_demo(dm_strategy, dm_tau, seed_override.value_or(0));
  return 2;  // unreachable with require_subcommand(1)
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    // Evaluation/training-domain failures: the run executed but did not
    // meet its contract.
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
