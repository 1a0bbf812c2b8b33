#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "coauth/random.hpp"
#include "coauth/textprep.hpp"

namespace coauth {

struct LdaModel {
  int num_topics = 0;
  double alpha = 0;  // symmetric document-topic prior
  double beta = 0;   // symmetric topic-word prior
  std::uint64_t seed = 0;
  int iterations = 0;
  std::vector<std::string> vocab;
  std::vector<std::string> doc_ids;
  std::vector<std::vector<double>> topic_word;  // K x V, rows sum to 1
  std::vector<std::vector<double>> doc_topic;   // D x K, rows sum to 1
};

inline double default_alpha(int num_topics) { return 50.0 / num_topics; }
inline constexpr double kDefaultBeta = 0.01;
inline constexpr int kDefaultIterations = 1000;

// Collapsed Gibbs sampler. Point estimates are read off the final sweep:
//   doc_topic[d][k]  = (n_dk + alpha) / (N_d + K*alpha)
//   topic_word[k][w] = (n_kw + beta)  / (n_k + V*beta)
// Every output bit is a function of the seed.
inline LdaModel fit_lda(const DocTermMatrix& dtm, int num_topics, double alpha, double beta,
                        int iterations, std::uint64_t seed) {
  if (num_topics < 1) throw std::invalid_argument("fit_lda: K must be >= 1");
  if (iterations < 1) throw std::invalid_argument("fit_lda: iterations must be >= 1");
  if (dtm.num_docs() == 0) throw std::invalid_argument("fit_lda: empty matrix");
  if (alpha <= 0) throw std::invalid_argument("fit_lda: alpha must be positive");
  if (beta <= 0) throw std::invalid_argument("fit_lda: beta must be positive");

  const int K = num_topics;
  const std::size_t V = dtm.vocab_size();
  const std::size_t D = dtm.num_docs();
  if (static_cast<std::size_t>(K) > V)
    std::cerr << "fit_lda: warning: K=" << K << " exceeds vocabulary size " << V << "\n";

  // Flatten to one entry per token occurrence.
  std::vector<std::int32_t> token_word;
  std::vector<std::int32_t> doc_begin(D + 1, 0);
  for (std::size_t d = 0; d < D; ++d) {
    for (const auto& [term, count] : dtm.rows[d])
      for (std::int32_t c = 0; c < count; ++c) token_word.push_back(term);
    doc_begin[d + 1] = static_cast<std::int32_t>(token_word.size());
  }
  const std::size_t N = token_word.size();
  if (N == 0) throw std::invalid_argument("fit_lda: matrix has no tokens");

  std::vector<std::int32_t> token_topic(N);
  std::vector<std::int32_t> n_dk(D * static_cast<std::size_t>(K), 0);
  std::vector<std::int32_t> n_kw(static_cast<std::size_t>(K) * V, 0);
  std::vector<std::int32_t> n_k(static_cast<std::size_t>(K), 0);

  Rng rng(seed);
  for (std::size_t d = 0; d < D; ++d) {
    for (std::int32_t t = doc_begin[d]; t < doc_begin[d + 1]; ++t) {
      const int k = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(K)));
      token_topic[t] = k;
      ++n_dk[d * K + k];
      ++n_kw[static_cast<std::size_t>(k) * V + token_word[t]];
      ++n_k[k];
    }
  }

  const double v_beta = static_cast<double>(V) * beta;
  std::vector<double> weight(static_cast<std::size_t>(K));

  for (int iter = 0; iter < iterations; ++iter) {
    for (std::size_t d = 0; d < D; ++d) {
      std::int32_t* doc_counts = &n_dk[d * K];
      for (std::int32_t t = doc_begin[d]; t < doc_begin[d + 1]; ++t) {
        const std::int32_t w = token_word[t];
        const int old_k = token_topic[t];
        --doc_counts[old_k];
        --n_kw[static_cast<std::size_t>(old_k) * V + w];
        --n_k[old_k];

        double total = 0;
        for (int k = 0; k < K; ++k) {
          const double p = (doc_counts[k] + alpha) *
                           (n_kw[static_cast<std::size_t>(k) * V + w] + beta) /
                           (n_k[k] + v_beta);
          total += p;
          weight[k] = total;
        }
        const double u = rng.next_double() * total;
        int new_k = 0;
        while (new_k < K - 1 && weight[new_k] < u) ++new_k;

        token_topic[t] = new_k;
        ++doc_counts[new_k];
        ++n_kw[static_cast<std::size_t>(new_k) * V + w];
        ++n_k[new_k];
      }
    }
#ifndef NDEBUG
    // Count bookkeeping: per-doc topic counts resum to doc length, per-topic
    // word counts resum to topic totals.
    for (std::size_t d = 0; d < D; ++d) {
      std::int64_t sum = 0;
      for (int k = 0; k < K; ++k) sum += n_dk[d * K + k];
      assert(sum == doc_begin[d + 1] - doc_begin[d]);
    }
    for (int k = 0; k < K; ++k) {
      std::int64_t sum = 0;
      for (std::size_t w = 0; w < V; ++w) sum += n_kw[static_cast<std::size_t>(k) * V + w];
      assert(sum == n_k[k]);
    }
#endif
  }

  LdaModel model;
  model.num_topics = K;
  model.alpha = alpha;
  model.beta = beta;
  model.seed = seed;
  model.iterations = iterations;
  model.vocab = dtm.vocab;
  model.doc_ids = dtm.doc_ids;
  model.doc_topic.assign(D, std::vector<double>(static_cast<std::size_t>(K)));
  for (std::size_t d = 0; d < D; ++d) {
    const double len = static_cast<double>(doc_begin[d + 1] - doc_begin[d]);
    for (int k = 0; k < K; ++k)
      model.doc_topic[d][static_cast<std::size_t>(k)] = (n_dk[d * K + k] + alpha) / (len + K * alpha);
  }
  model.topic_word.assign(static_cast<std::size_t>(K), std::vector<double>(V));
  for (int k = 0; k < K; ++k)
    for (std::size_t w = 0; w < V; ++w)
      model.topic_word[static_cast<std::size_t>(k)][w] =
          (n_kw[static_cast<std::size_t>(k) * V + w] + beta) / (n_k[k] + v_beta);
  return model;
}

// Sum over token positions of log sum_k theta_dk * phi_kw. Zero for an
// empty corpus, otherwise <= 0.
inline double log_likelihood(const LdaModel& model, const DocTermMatrix& dtm) {
  if (model.vocab != dtm.vocab)
    throw std::runtime_error("log_likelihood: vocabulary mismatch between model and matrix");
  if (dtm.num_docs() != model.doc_topic.size())
    throw std::runtime_error("log_likelihood: document count mismatch");
  const int K = model.num_topics;
  double ll = 0;
  for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
    const auto& theta = model.doc_topic[d];
    for (const auto& [w, count] : dtm.rows[d]) {
      double p = 0;
      for (int k = 0; k < K; ++k)
        p += theta[static_cast<std::size_t>(k)] *
             model.topic_word[static_cast<std::size_t>(k)][static_cast<std::size_t>(w)];
      ll += count * std::log(p);
    }
  }
  return ll;
}

// exp(-LL / N_tokens); equals V for a uniform model, >= 1 always.
inline double perplexity(const LdaModel& model, const DocTermMatrix& dtm) {
  const std::size_t n_tokens = dtm.total_tokens();
  if (n_tokens == 0) throw std::runtime_error("perplexity: matrix has no tokens");
  return std::exp(-log_likelihood(model, dtm) / static_cast<double>(n_tokens));
}

struct KSelectionRow {
  int num_topics;
  double perplexity;
  double log_likelihood;
};

// Fits one model per candidate K and tabulates the fit metrics; picking K is
// left to the caller. Chains use independent seeds derived as seed + K.
inline std::vector<KSelectionRow> select_k(const DocTermMatrix& dtm,
                                           const std::vector<int>& candidates, std::uint64_t seed,
                                           double alpha = -1, double beta = kDefaultBeta,
                                           int iterations = kDefaultIterations) {
  if (candidates.empty()) throw std::invalid_argument("select_k: no candidates");
  std::vector<KSelectionRow> rows;
  rows.reserve(candidates.size());
  for (int k : candidates) {
    const double a = alpha > 0 ? alpha : default_alpha(k);
    const LdaModel model =
        fit_lda(dtm, k, a, beta, iterations, seed + static_cast<std::uint64_t>(k));
    const double ll = log_likelihood(model, dtm);
    rows.push_back({k, std::exp(-ll / static_cast<double>(dtm.total_tokens())), ll});
  }
  return rows;
}

inline nlohmann::json model_to_json(const LdaModel& model) {
  return {{"num_topics", model.num_topics},
          {"alpha", model.alpha},
          {"beta", model.beta},
          {"seed", model.seed},
          {"iterations", model.iterations},
          {"vocab", model.vocab},
          {"doc_ids", model.doc_ids},
          {"topic_word", model.topic_word},
          {"doc_topic", model.doc_topic}};
}

inline void save_model(const LdaModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << model_to_json(model).dump() << '\n';
}

inline LdaModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open model file: " + path);
  nlohmann::json j;
  is >> j;
  LdaModel model;
  model.num_topics = j.at("num_topics").get<int>();
  model.alpha = j.at("alpha").get<double>();
  model.beta = j.at("beta").get<double>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.iterations = j.value("iterations", 0);
  model.vocab = j.at("vocab").get<std::vector<std::string>>();
  model.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
  model.topic_word = j.at("topic_word").get<std::vector<std::vector<double>>>();
  model.doc_topic = j.at("doc_topic").get<std::vector<std::vector<double>>>();
  return model;
}

}  // namespace coauth
