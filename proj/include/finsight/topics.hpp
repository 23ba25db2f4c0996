#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "finsight/rng.hpp"

namespace finsight::topics {

struct TokenizerRules {
  std::set<std::string> stopwords;
  std::size_t min_length = 3;
  bool strip_masks = true;  // drop pure runs of 2+ 'x' (the CFPB redaction pattern)
};

// The built-in English stopword list, identical to data/stopwords_en.txt.
const std::set<std::string>& default_stopwords();

// One stopword per line; blank lines and leading/trailing whitespace ignored.
std::set<std::string> load_stopwords(const std::string& path);

TokenizerRules default_rules();

// Lowercases, splits on non-alphabetic runs, then applies the drop rules.
std::vector<std::string> tokenize(const std::string& text, const TokenizerRules& rules);

struct Vocabulary {
  std::vector<std::string> words;   // id -> word, ids dense in [0, V)
  std::map<std::string, int> ids;   // word -> id
  std::vector<int> doc_freq;        // id -> number of documents containing the word

  int size() const { return static_cast<int>(words.size()); }
};

struct Corpus {
  std::vector<std::vector<int>> documents;  // token ids; empty documents are kept
  Vocabulary vocabulary;
  std::size_t total_tokens = 0;

  std::size_t doc_count() const { return documents.size(); }
};

// Keeps words with document frequency in [min_df, max_df_fraction * D],
// truncated to max_vocab by descending corpus frequency (ties lexicographic);
// ids are assigned in that ranking order. Out-of-vocabulary tokens are dropped
// from documents. EmptyCorpus when there are no documents or no tokens survive.
Corpus build_corpus(const std::vector<std::vector<std::string>>& token_lists, int min_df = 5,
                    double max_df_fraction = 0.5, int max_vocab = 50000);

struct LdaConfig {
  int topics = 10;
  double alpha = 0.0;  // 0 resolves to 50 / topics at fit time
  double beta = 0.01;
  int sweeps = 200;
  std::uint64_t seed = 0;

  double resolved_alpha() const { return alpha > 0.0 ? alpha : 50.0 / topics; }
  void validate() const;
};

struct TopicModel {
  Eigen::MatrixXd phi;    // K x V, rows sum to 1
  Eigen::MatrixXd theta;  // D x K, rows sum to 1
  Eigen::MatrixXi doc_topic;   // n_dk, D x K
  Eigen::MatrixXi topic_word;  // n_kw, K x V
  Eigen::VectorXi topic_total;  // n_k, K
  std::vector<std::vector<int>> assignments;  // z, parallel to the corpus documents
  std::vector<std::string> vocabulary_words;
  double alpha = 0.0;
  double beta = 0.0;
  double log_likelihood = 0.0;  // joint log p(w, z) at the final sweep

  int topic_count() const { return static_cast<int>(phi.rows()); }
  int vocab_size() const { return static_cast<int>(phi.cols()); }
};

// One collapsed Gibbs chain. Exposed stepwise so callers can checkpoint
// between sweeps; fit_lda wraps the common run-to-completion case.
class LdaSampler {
 public:
  // Initializes every assignment uniformly at random from the seed.
  LdaSampler(const Corpus& corpus, const LdaConfig& config);

  // One full pass: every token resampled from the collapsed conditional
  // p(z=k) proportional to (n_dk+alpha)(n_kw+beta)/(n_k+V*beta), own count removed.
  void sweep();

  int sweeps_done() const { return sweeps_done_; }
  double log_likelihood() const;  // joint log p(w, z) under the current counts

  const Eigen::MatrixXi& doc_topic() const { return doc_topic_; }
  const Eigen::MatrixXi& topic_word() const { return topic_word_; }
  const Eigen::VectorXi& topic_total() const { return topic_total_; }
  const std::vector<std::vector<int>>& assignments() const { return assignments_; }

  TopicModel finish() const;  // phi/theta smoothed from the current counts

 private:
  const Corpus* corpus_;
  int topics_;
  double alpha_;
  double beta_;
  Eigen::MatrixXi doc_topic_;
  Eigen::MatrixXi topic_word_;
  Eigen::VectorXi topic_total_;
  std::vector<std::vector<int>> assignments_;
  Rng rng_;
  int sweeps_done_ = 0;
};

// Runs config.sweeps sweeps of one chain. Deterministic per (corpus, config).
TopicModel fit_lda(const Corpus& corpus, const LdaConfig& config);

// Descending phi, ties by lexicographic word order; n capped at V.
std::vector<std::pair<std::string, double>> top_words(const TopicModel& model, int topic, int n);

// exp(-(sum over tokens of log sum_k theta[d][k]*phi[k][w]) / N).
double perplexity(const TopicModel& model, const Corpus& corpus);

// Gibbs over one unseen document with phi held fixed; returns smoothed topic
// proportions. All tokens out of vocabulary -> uniform prior proportions.
Eigen::VectorXd infer_document(const TopicModel& model, const std::vector<std::string>& tokens,
                               int sweeps, std::uint64_t seed);

}  // namespace finsight::topics
