// Text-generation metrics over tokenized hypothesis/reference pairs:
// BLEU-1..4 (clipped n-gram precision with the exponent-form brevity term),
// ROUGE-L (LCS recall), METEOR (exact-match alignment with a fragmentation
// penalty), and CIDEr (TF-IDF n-gram cosine, x10 scale).
#pragma once

#include <string>
#include <vector>

#include "softrank/vec.hpp"

namespace softrank::nlg {

using TokenSeq = std::vector<std::string>;

// Lowercases, splits on Unicode whitespace, strips leading/trailing ASCII
// punctuation from each token, drops empty tokens.
TokenSeq tokenize(const std::string& text);

// BLEU-max_n: exp(min(1 - l_r/l_g, 0) + sum_{n<=max_n} (1/max_n) log p_n)
// with p_n the clipped n-gram precision. Any p_n = 0 (or an empty
// hypothesis) scores 0. l_r is the reference length closest to l_g, ties
// resolved toward the shorter reference.
double bleu(const TokenSeq& hyp, const std::vector<TokenSeq>& refs, int max_n);

// LCS(hyp, ref) / |ref| (recall form). Empty ref is a parameter error;
// empty hyp scores 0.
double rouge_l(const TokenSeq& hyp, const TokenSeq& ref);

// Longest common subsequence length by dynamic programming (exposed for the
// oracle tests).
std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

// METEOR with exact-token matching: m = multiset unigram overlap; among all
// maximal-match alignments the chunk count is minimized. P = m/|hyp|,
// R = m/|ref|, F = PR/(0.9P + 0.1R), penalty = 0.5 (chunks/m)^3,
// score = F (1 - penalty). m = 0 scores 0.
double meteor(const TokenSeq& hyp, const TokenSeq& ref);

struct MeteorAlignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
};

// The (max matches, then min chunks) alignment statistics behind meteor().
MeteorAlignment meteor_align(const TokenSeq& hyp, const TokenSeq& ref);

struct CiderResult {
  double corpus = 0.0;
  std::vector<double> per_sentence;
  bool degenerate_corpus = false;  // M = 1 forces IDF = 0 and score 0
};

// CIDEr over the whole corpus: per-sentence 10 * (1/4) sum_{n=1..4} of the
// mean TF-IDF cosine against each reference; corpus score is the mean.
// Document frequencies are counted over reference sets; IDF(g) =
// log(M / max(1, df(g))).
CiderResult cider(const std::vector<TokenSeq>& hyps,
                  const std::vector<std::vector<TokenSeq>>& refs);

// --- corpus evaluation -------------------------------------------------------

struct CorpusPair {
  std::string id;
  std::string hypothesis;
  std::vector<std::string> references;
};

struct SentenceScores {
  std::string id;
  double bleu[4] = {0, 0, 0, 0};
  double meteor = 0.0;
  double rouge_l = 0.0;
  double cider = 0.0;
  bool empty_hypothesis = false;
};

struct MetricReport {
  double bleu[4] = {0, 0, 0, 0};  // corpus-level, pooled counts and lengths
  double meteor = 0.0;            // sentence mean
  double rouge_l = 0.0;           // sentence mean
  double cider = 0.0;
  std::vector<SentenceScores> per_sentence;
  bool degenerate_corpus = false;   // single-pair CIDEr
  bool references_dropped = false;  // METEOR/ROUGE-L used only the first reference
};

// Tokenizes and scores every pair. METEOR and ROUGE-L use the first
// reference (extra references are dropped and flagged); BLEU and CIDEr use
// all references. Corpus BLEU pools clipped counts and lengths, so a
// one-pair corpus reproduces the sentence score exactly.
MetricReport evaluate_corpus(const std::vector<CorpusPair>& pairs);

}  // namespace softrank::nlg
