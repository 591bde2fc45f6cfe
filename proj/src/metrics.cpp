#include "softrank/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "softrank/errors.hpp"

namespace softrank::nlg {
namespace {

// Unicode whitespace codepoints beyond ASCII that the tokenizer honors.
bool is_unicode_space(std::uint32_t cp) {
  switch (cp) {
    case 0x0085: case 0x00A0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return (cp >= 0x2000 && cp <= 0x200A) || (cp <= 0x7F && std::isspace(static_cast<int>(cp)));
  }
}

// Minimal UTF-8 decode; invalid bytes pass through as single codepoints so
// tokenization never throws on arbitrary input.
std::uint32_t decode_utf8(const std::string& s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    i += 1;
    return b0;
  }
  auto cont = [&s](std::size_t k) {
    return k < s.size() && (static_cast<unsigned char>(s[k]) & 0xC0) == 0x80;
  };
  if ((b0 & 0xE0) == 0xC0 && cont(i + 1)) {
    const std::uint32_t cp = ((b0 & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
    const std::uint32_t cp = ((b0 & 0x0Fu) << 12) |
                             ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6) |
                             (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
    const std::uint32_t cp = ((b0 & 0x07u) << 18) |
                             ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12) |
                             ((static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6) |
                             (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
    i += 4;
    return cp;
  }
  i += 1;
  return b0;
}

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

std::string strip_punct(const std::string& tok) {
  std::size_t b = 0, e = tok.size();
  while (b < e && is_ascii_punct(tok[b])) ++b;
  while (e > b && is_ascii_punct(tok[e - 1])) --e;
  return tok.substr(b, e - b);
}

using NGram = std::vector<std::string>;
using NGramMap = std::map<NGram, std::size_t>;

NGramMap count_ngrams(const TokenSeq& seq, std::size_t n) {
  NGramMap counts;
  if (seq.size() < n || n == 0) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    counts[NGram(seq.begin() + i, seq.begin() + i + n)] += 1;
  }
  return counts;
}

// Pooled clipped-count state for corpus BLEU.
struct BleuAccumulator {
  std::size_t clipped[4] = {0, 0, 0, 0};
  std::size_t hyp_total[4] = {0, 0, 0, 0};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;

  void add_pair(const TokenSeq& hyp, const std::vector<TokenSeq>& refs) {
    hyp_len += hyp.size();
    // Reference length closest to the hypothesis length; ties -> shorter.
    std::size_t best = 0;
    bool have = false;
    for (const auto& r : refs) {
      if (!have) {
        best = r.size();
        have = true;
        continue;
      }
      const auto d_new = r.size() > hyp.size() ? r.size() - hyp.size() : hyp.size() - r.size();
      const auto d_old = best > hyp.size() ? best - hyp.size() : hyp.size() - best;
      if (d_new < d_old || (d_new == d_old && r.size() < best)) best = r.size();
    }
    ref_len += best;
    for (std::size_t n = 1; n <= 4; ++n) {
      const NGramMap hyp_counts = count_ngrams(hyp, n);
      for (const auto& [gram, count] : hyp_counts) {
        std::size_t cap = 0;
        for (const auto& r : refs) {
          const NGramMap rc = count_ngrams(r, n);
          const auto it = rc.find(gram);
          if (it != rc.end()) cap = std::max(cap, it->second);
        }
        clipped[n - 1] += std::min(count, cap);
        hyp_total[n - 1] += count;
      }
    }
  }

  double score(int max_n) const {
    if (max_n < 1 || max_n > 4) throw ParameterError("bleu: max_n must be in 1..4");
    if (hyp_len == 0) return 0.0;
    double log_sum = 0.0;
    for (int n = 1; n <= max_n; ++n) {
      if (clipped[n - 1] == 0 || hyp_total[n - 1] == 0) return 0.0;
      log_sum += std::log(static_cast<double>(clipped[n - 1]) /
                          static_cast<double>(hyp_total[n - 1])) /
                 static_cast<double>(max_n);
    }
    const double brevity =
        std::min(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len), 0.0);
    return std::exp(brevity + log_sum);
  }
};

}  // namespace

TokenSeq tokenize(const std::string& text) {
  TokenSeq out;
  std::string current;
  std::size_t i = 0;
  auto flush = [&out, &current] {
    if (!current.empty()) {
      const std::string stripped = strip_punct(current);
      if (!stripped.empty()) out.push_back(stripped);
      current.clear();
    }
  };
  while (i < text.size()) {
    const std::size_t start = i;
    const std::uint32_t cp = decode_utf8(text, i);
    if (is_unicode_space(cp)) {
      flush();
    } else if (cp < 0x80) {
      current.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
    } else {
      current.append(text, start, i - start);
    }
  }
  flush();
  return out;
}

double bleu(const TokenSeq& hyp, const std::vector<TokenSeq>& refs, int max_n) {
  BleuAccumulator acc;
  acc.add_pair(hyp, refs);
  return acc.score(max_n);
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  const std::size_t m = a.size(), n = b.size();
  std::vector<std::size_t> prev(n + 1, 0), cur(n + 1, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

double rouge_l(const TokenSeq& hyp, const TokenSeq& ref) {
  if (ref.empty()) throw ParameterError("rouge_l: reference must be nonempty");
  if (hyp.empty()) return 0.0;
  return static_cast<double>(lcs_length(hyp, ref)) / static_cast<double>(ref.size());
}

namespace {

// Exact minimum-chunk search over maximal-match alignments. Hypothesis
// positions are processed left to right; at each position a matchable token
// is either aligned to one of the remaining reference slots for that word
// or skipped when its quota can still be met later. Branches are cut as
// soon as they cannot beat the best chunk count found, and the
// chunk-continuing slot is tried first so the bound tightens early.
struct ChunkSearch {
  const TokenSeq& hyp;
  std::map<std::string, std::vector<std::size_t>> ref_slots;  // word -> ref positions
  std::map<std::string, std::size_t> quota;                   // matches still to place
  std::map<std::string, std::size_t> hyp_remaining;           // occurrences left in hyp
  std::vector<bool> ref_used;
  std::size_t best = std::numeric_limits<std::size_t>::max();

  void run(std::size_t i, std::size_t last_h, std::size_t last_r, bool have_prev,
           std::size_t chunks) {
    if (chunks >= best) return;  // chunk count never decreases
    if (i == hyp.size()) {
      best = chunks;  // quotas are guaranteed met by the skip rule
      return;
    }
    const std::string& word = hyp[i];
    auto q = quota.find(word);
    const bool matchable = q != quota.end() && q->second > 0;
    hyp_remaining[word] -= 1;
    if (matchable) {
      q->second -= 1;
      const auto& slots = ref_slots[word];
      // Continuation slot first.
      const bool can_continue = have_prev && i == last_h + 1;
      for (int phase = 0; phase < 2; ++phase) {
        for (const std::size_t r : slots) {
          if (ref_used[r]) continue;
          const bool continues = can_continue && r == last_r + 1;
          if ((phase == 0) != continues) continue;
          ref_used[r] = true;
          run(i + 1, i, r, true, chunks + (continues ? 0 : 1));
          ref_used[r] = false;
        }
      }
      q->second += 1;
      // Skipping is allowed only if later occurrences can absorb the quota.
      if (hyp_remaining[word] >= q->second) {
        run(i + 1, last_h, last_r, have_prev, chunks);
      }
    } else {
      run(i + 1, last_h, last_r, have_prev, chunks);
    }
    hyp_remaining[word] += 1;
  }
};

}  // namespace

MeteorAlignment meteor_align(const TokenSeq& hyp, const TokenSeq& ref) {
  std::map<std::string, std::size_t> hyp_counts, ref_counts;
  for (const auto& w : hyp) hyp_counts[w] += 1;
  for (const auto& w : ref) ref_counts[w] += 1;
  std::size_t m = 0;
  std::map<std::string, std::size_t> quota;
  for (const auto& [w, hc] : hyp_counts) {
    const auto it = ref_counts.find(w);
    if (it != ref_counts.end()) {
      const std::size_t q = std::min(hc, it->second);
      quota[w] = q;
      m += q;
    }
  }
  if (m == 0) return {0, 0};

  ChunkSearch search{hyp, {}, std::move(quota), {}, std::vector<bool>(ref.size(), false)};
  for (std::size_t r = 0; r < ref.size(); ++r) {
    if (search.quota.count(ref[r]) != 0) search.ref_slots[ref[r]].push_back(r);
  }
  search.hyp_remaining = hyp_counts;
  search.run(0, 0, 0, false, 0);
  return {m, search.best};
}

double meteor(const TokenSeq& hyp, const TokenSeq& ref) {
  const MeteorAlignment a = meteor_align(hyp, ref);
  if (a.matches == 0) return 0.0;
  const double m = static_cast<double>(a.matches);
  const double p = m / static_cast<double>(hyp.size());
  const double r = m / static_cast<double>(ref.size());
  const double f_mean = p * r / (0.9 * p + 0.1 * r);
  const double frag = static_cast<double>(a.chunks) / m;
  const double penalty = 0.5 * frag * frag * frag;
  return f_mean * (1.0 - penalty);
}

CiderResult cider(const std::vector<TokenSeq>& hyps,
                  const std::vector<std::vector<TokenSeq>>& refs) {
  if (hyps.empty()) throw ParameterError("cider: corpus must contain at least one pair");
  if (hyps.size() != refs.size()) {
    throw ShapeError(detail::msg("cider: ", hyps.size(), " hypotheses vs ", refs.size(),
                                 " reference sets"));
  }
  const std::size_t m_docs = hyps.size();
  CiderResult result;
  result.degenerate_corpus = m_docs == 1;

  // Document frequency of each n-gram over reference sets.
  std::array<NGramMap, 4> doc_freq;
  for (const auto& ref_set : refs) {
    for (std::size_t n = 1; n <= 4; ++n) {
      NGramMap seen;
      for (const auto& r : ref_set) {
        for (const auto& [gram, count] : count_ngrams(r, n)) seen[gram] = 1;
      }
      for (const auto& kv : seen) doc_freq[n - 1][kv.first] += 1;
    }
  }
  auto idf = [&doc_freq, m_docs](const NGram& gram, std::size_t n) {
    const auto it = doc_freq[n - 1].find(gram);
    const std::size_t df = it == doc_freq[n - 1].end() ? 1 : std::max<std::size_t>(1, it->second);
    return std::log(static_cast<double>(m_docs) / static_cast<double>(df));
  };
  auto tfidf = [&idf](const TokenSeq& seq, std::size_t n) {
    std::map<NGram, double> v;
    const NGramMap counts = count_ngrams(seq, n);
    std::size_t total = 0;
    for (const auto& [gram, count] : counts) total += count;
    for (const auto& [gram, count] : counts) {
      v[gram] = (static_cast<double>(count) / static_cast<double>(total)) * idf(gram, n);
    }
    return v;
  };
  auto cosine = [](const std::map<NGram, double>& a, const std::map<NGram, double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [gram, x] : a) {
      na += x * x;
      const auto it = b.find(gram);
      if (it != b.end()) dot += x * it->second;
    }
    for (const auto& [gram, x] : b) nb += x * x;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
  };

  result.per_sentence.resize(m_docs);
  double corpus_sum = 0.0;
  for (std::size_t i = 0; i < m_docs; ++i) {
    double score = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto hyp_vec = tfidf(hyps[i], n);
      double ref_mean = 0.0;
      for (const auto& r : refs[i]) ref_mean += cosine(hyp_vec, tfidf(r, n));
      if (!refs[i].empty()) ref_mean /= static_cast<double>(refs[i].size());
      score += ref_mean;
    }
    score *= 10.0 / 4.0;
    result.per_sentence[i] = score;
    corpus_sum += score;
  }
  result.corpus = corpus_sum / static_cast<double>(m_docs);
  return result;
}

MetricReport evaluate_corpus(const std::vector<CorpusPair>& pairs) {
  if (pairs.empty()) throw ParameterError("evaluate_corpus: no pairs");
  const std::size_t m = pairs.size();

  std::vector<TokenSeq> hyps(m);
  std::vector<std::vector<TokenSeq>> refs(m);
  MetricReport report;
  for (std::size_t i = 0; i < m; ++i) {
    if (pairs[i].references.empty()) {
      throw ParameterError(detail::msg("evaluate_corpus: pair '", pairs[i].id,
                                       "' has no references"));
    }
    hyps[i] = tokenize(pairs[i].hypothesis);
    refs[i].reserve(pairs[i].references.size());
    for (const auto& r : pairs[i].references) refs[i].push_back(tokenize(r));
    if (pairs[i].references.size() > 1) report.references_dropped = true;
  }

  BleuAccumulator corpus_bleu;
  const CiderResult cider_result = cider(hyps, refs);
  report.cider = cider_result.corpus;
  report.degenerate_corpus = cider_result.degenerate_corpus;

  report.per_sentence.resize(m);
  double meteor_sum = 0.0, rouge_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    SentenceScores& sent = report.per_sentence[i];
    sent.id = pairs[i].id;
    sent.empty_hypothesis = hyps[i].empty();
    corpus_bleu.add_pair(hyps[i], refs[i]);
    BleuAccumulator one;
    one.add_pair(hyps[i], refs[i]);
    for (int n = 1; n <= 4; ++n) sent.bleu[n - 1] = one.score(n);
    sent.meteor = meteor(hyps[i], refs[i][0]);
    sent.rouge_l = rouge_l(hyps[i], refs[i][0]);
    sent.cider = cider_result.per_sentence[i];
    meteor_sum += sent.meteor;
    rouge_sum += sent.rouge_l;
  }
  for (int n = 1; n <= 4; ++n) report.bleu[n - 1] = corpus_bleu.score(n);
  report.meteor = meteor_sum / static_cast<double>(m);
  report.rouge_l = rouge_sum / static_cast<double>(m);
  return report;
}

}  // namespace softrank::nlg
