#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "finprog/linearize.hpp"
#include "finprog/text.hpp"

// Keyphrase extraction for variable descriptions: a co-occurrence token graph
// ranked with PageRank, plus table headers, filtered to phrases that occur at
// least twice so a masked mention stays recoverable from the others.

namespace finprog {

class KeyphraseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --------------------------------------------------------------------------
// Token graph

struct TokenGraph {
  std::vector<std::string> nodes;  // distinct content tokens, first-seen order
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;

  std::size_t node_id(const std::string& token) {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    const std::size_t id = nodes.size();
    index_.emplace(token, id);
    nodes.push_back(token);
    adjacency.emplace_back();
    return id;
  }

  // undirected; repeated co-occurrence accumulates weight
  void add_edge(std::size_t a, std::size_t b, double weight = 1.0) {
    if (a == b) return;  // no self-edges
    bump(a, b, weight);
    bump(b, a, weight);
  }

  /// Graph over a content-token sequence: tokens closer than `window`
  /// positions co-occur.
  static TokenGraph from_tokens(const std::vector<std::string>& content_tokens,
                                std::size_t window) {
    TokenGraph g;
    std::vector<std::size_t> ids;
    ids.reserve(content_tokens.size());
    for (const std::string& token : content_tokens) ids.push_back(g.node_id(token));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size() && j - i < window; ++j) {
        g.add_edge(ids[i], ids[j]);
      }
    }
    return g;
  }

 private:
  void bump(std::size_t from, std::size_t to, double weight) {
    for (auto& [other, w] : adjacency[from]) {
      if (other == to) {
        w += weight;
        return;
      }
    }
    adjacency[from].emplace_back(to, weight);
  }

  std::unordered_map<std::string, std::size_t> index_;
};

struct PagerankOptions {
  double damping = 0.85;
  double tol = 1e-6;
  std::size_t max_iter = 100;
};

/// Weighted PageRank; scores are normalized to sum to 1. Convergence is the
/// maximum per-node delta dropping below tol.
inline std::vector<double> pagerank(const TokenGraph& g, const PagerankOptions& opts = {}) {
  const std::size_t n = g.nodes.size();
  if (n == 0) {
    throw KeyphraseError("pagerank on an empty graph");
  }
  std::vector<double> out_weight(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [_, w] : g.adjacency[i]) out_weight[i] += w;
  }
  std::vector<double> rank(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);
  const double teleport = (1.0 - opts.damping) / static_cast<double>(n);
  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    double max_delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double inflow = 0.0;
      for (const auto& [j, w] : g.adjacency[i]) {
        inflow += w / out_weight[j] * rank[j];
      }
      next[i] = teleport + opts.damping * inflow;
      max_delta = std::max(max_delta, std::abs(next[i] - rank[i]));
    }
    rank.swap(next);
    if (max_delta < opts.tol) break;
  }
  const double total = std::accumulate(rank.begin(), rank.end(), 0.0);
  for (double& r : rank) r /= total;
  return rank;
}

// --------------------------------------------------------------------------
// Keyphrases

struct Keyphrase {
  std::vector<std::string> tokens;  // lowercased word keys
  std::string surface;              // original-cased span from the source
  std::size_t frequency = 0;        // occurrence count in the source text

  bool operator==(const Keyphrase&) const = default;
};

struct KeyphraseOptions {
  std::size_t window = 2;
  PagerankOptions pagerank;
  Stoplist stopwords = default_stopwords();
};

namespace detail {

inline std::string phrase_key(const std::vector<std::string>& tokens) {
  std::string key;
  for (const std::string& t : tokens) {
    if (!key.empty()) key.push_back(' ');
    key += t;
  }
  return key;
}

inline std::size_t count_phrase(const std::vector<std::string>& keys,
                                const std::vector<std::string>& phrase) {
  if (phrase.empty() || keys.size() < phrase.size()) return 0;
  std::size_t count = 0;
  for (std::size_t p = 0; p + phrase.size() <= keys.size(); ++p) {
    bool match = true;
    for (std::size_t i = 0; i < phrase.size(); ++i) {
      if (keys[p + i] != phrase[i]) {
        match = false;
        break;
      }
    }
    if (match) ++count;
  }
  return count;
}

}  // namespace detail

/// TextRank keyphrases over the question and its gold evidence: top third of
/// graph nodes by score, adjacent selected tokens merged into phrases, kept
/// when the phrase occurs at least twice. Deterministic: ties break by first
/// occurrence.
inline std::vector<Keyphrase> extract_textrank_keyphrases(
    std::string_view question, const std::vector<std::string>& gold_evidence,
    const KeyphraseOptions& opts = {}) {
  std::string text(question);
  for (const std::string& sentence : gold_evidence) {
    if (!text.empty()) text += ' ';
    text += sentence;
  }
  const std::vector<TextToken> raw = word_tokenize(text);
  if (raw.empty()) return {};

  std::vector<std::string> keys(raw.size());
  std::vector<bool> content(raw.size(), false);
  std::vector<std::string> content_seq;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    keys[i] = detail::lower_copy(raw[i].surface);
    content[i] = opts.stopwords.find(keys[i]) == opts.stopwords.end();
    if (content[i]) content_seq.push_back(keys[i]);
  }
  if (content_seq.empty()) return {};

  TokenGraph graph = TokenGraph::from_tokens(content_seq, opts.window);
  const std::vector<double> scores = pagerank(graph, opts.pagerank);

  std::unordered_map<std::string, double> score_of;
  std::unordered_map<std::string, std::size_t> first_seen;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) score_of[graph.nodes[i]] = scores[i];
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (content[i] && !first_seen.count(keys[i])) first_seen[keys[i]] = i;
  }

  // top ceil(|V|/3) nodes form the selection set
  std::vector<std::size_t> order(graph.nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return first_seen[graph.nodes[a]] < first_seen[graph.nodes[b]];
  });
  const std::size_t keep = (graph.nodes.size() + 2) / 3;
  std::unordered_map<std::string, bool> selected;
  for (std::size_t i = 0; i < order.size(); ++i) {
    selected[graph.nodes[order[i]]] = i < keep;
  }

  // merge adjacent selected tokens into maximal runs
  struct Candidate {
    std::vector<std::string> tokens;
    std::size_t first_token = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
    double score = 0.0;
  };
  std::map<std::string, Candidate> phrases;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (!content[i] || !selected[keys[i]]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < raw.size() && content[j] && selected[keys[j]]) ++j;
    Candidate cand;
    cand.tokens.assign(keys.begin() + static_cast<std::ptrdiff_t>(i),
                       keys.begin() + static_cast<std::ptrdiff_t>(j));
    cand.first_token = i;
    cand.begin = raw[i].begin;
    cand.end = raw[j - 1].end;
    for (const std::string& t : cand.tokens) cand.score += score_of[t];
    phrases.try_emplace(detail::phrase_key(cand.tokens), std::move(cand));
    i = j;
  }

  std::vector<Keyphrase> out;
  std::vector<const Candidate*> ordered;
  for (const auto& [_, cand] : phrases) ordered.push_back(&cand);
  std::sort(ordered.begin(), ordered.end(), [](const Candidate* a, const Candidate* b) {
    if (a->score != b->score) return a->score > b->score;
    return a->first_token < b->first_token;
  });
  for (const Candidate* cand : ordered) {
    const std::size_t freq = detail::count_phrase(keys, cand->tokens);
    if (freq < 2) continue;
    out.push_back({cand->tokens, text.substr(cand->begin, cand->end - cand->begin), freq});
  }
  return out;
}

/// Header keyphrases: row and column headers whose text occurs at least twice
/// across the table's per-cell sentences. A column header over k cells has
/// frequency k; a row header naming a single cell cannot be reconstructed
/// from context and is dropped.
inline std::vector<Keyphrase> extract_header_keyphrases(
    const std::vector<std::vector<std::string>>& table) {
  if (table.size() < 2 || table[0].size() < 2) return {};

  std::vector<std::vector<std::string>> cell_keys;
  for (std::size_t r = 1; r < table.size(); ++r) {
    for (const std::string& sentence : linearize_row_cells(table, r)) {
      std::vector<std::string> keys;
      for (const TextToken& tok : word_tokenize(sentence)) {
        keys.push_back(detail::lower_copy(tok.surface));
      }
      cell_keys.push_back(std::move(keys));
    }
  }

  struct HeaderEntry {
    std::string surface;
    std::vector<std::string> tokens;
  };
  std::vector<HeaderEntry> headers;
  auto add_header = [&](std::string_view text) {
    const std::string surface = detail::normalize_ws_copy(text);
    if (surface.empty()) return;
    HeaderEntry entry{surface, {}};
    for (const TextToken& tok : word_tokenize(surface)) {
      entry.tokens.push_back(detail::lower_copy(tok.surface));
    }
    if (entry.tokens.empty()) return;
    const std::string key = detail::phrase_key(entry.tokens);
    for (const HeaderEntry& existing : headers) {
      if (detail::phrase_key(existing.tokens) == key) return;
    }
    headers.push_back(std::move(entry));
  };
  for (std::size_t c = 1; c < table[0].size(); ++c) add_header(table[0][c]);
  for (std::size_t r = 1; r < table.size(); ++r) {
    if (!table[r].empty()) add_header(table[r][0]);
  }

  std::vector<Keyphrase> out;
  for (const HeaderEntry& header : headers) {
    std::size_t freq = 0;
    for (const auto& keys : cell_keys) freq += detail::count_phrase(keys, header.tokens);
    if (freq >= 2) out.push_back({header.tokens, header.surface, freq});
  }
  std::stable_sort(out.begin(), out.end(), [](const Keyphrase& a, const Keyphrase& b) {
    return a.frequency > b.frequency;
  });
  return out;
}

}  // namespace finprog
